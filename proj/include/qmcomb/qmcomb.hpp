#pragma once

#include "qmcomb/circuit.hpp"
#include "qmcomb/delay.hpp"
#include "qmcomb/design.hpp"
#include "qmcomb/errors.hpp"
#include "qmcomb/phase.hpp"
#include "qmcomb/response.hpp"
#include "qmcomb/timesim.hpp"
