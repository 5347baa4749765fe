#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qmcomb/circuit.hpp"
#include "qmcomb/delay.hpp"
#include "qmcomb/design.hpp"
#include "qmcomb/phase.hpp"
#include "qmcomb/timesim.hpp"

namespace qmcomb::io {

using json = nlohmann::ordered_json;

// Circuit files: {"unit": "Delta", "elements": [{"type": "block", ...}, {"type": "comb", ...}]}
Circuit<double> circuit_from_json(const json& j);
json circuit_to_json(const Circuit<double>& c);
Circuit<double> read_circuit(const std::filesystem::path& path);
void write_circuit(const std::filesystem::path& path, const Circuit<double>& c);

SearchConfig search_config_from_json(const json& j, SearchConfig base = {});
json search_config_to_json(const SearchConfig& s);

json to_json(const OptimResult& r, OptimMode mode);
json to_json(const GlueResult& r);
json to_json(const StorageMetrics& m);

/// Response CSV: nu,re_S,im_S,phase_unwrapped,T,T_rel. T_rel is left empty
/// when undefined (T(0) = 0).
std::string response_csv(const SpectralResponse<double>& r, const DelayProfile<double>& p);

/// Waveform CSV: t,re_a,im_a.
std::string waveform_csv(const Waveform& w);

/// 12 significant digits, period separator.
std::string format_number(double x);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string dump(const json& j);

json read_json(const std::filesystem::path& path);

}  // namespace qmcomb::io
