#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qmcomb/circuit.hpp"
#include "qmcomb/errors.hpp"
#include "qmcomb/phase.hpp"
#include "qmcomb/response.hpp"

namespace qmcomb {

/// T(nu) = kPhaseToDelay * phase(nu) / nu. With d/dt -> -i nu the solver's
/// transfer phase of a single block is exactly twice the closed-form arctan,
/// so the normalised delay is half the phase slope and the physical group
/// delay at band centre is 2 T(0).
template <typename Scalar>
constexpr Scalar kPhaseToDelay = Scalar(0.5);

template <typename Scalar>
struct DelayProfile {
  FrequencyGrid<Scalar> grid;
  std::vector<Scalar> delay;      // T(nu_i)
  Scalar delay_at_zero{0};        // T(0)
  std::vector<Scalar> relative;   // T(nu_i) / T(0); NaN when T(0) = 0
};

namespace detail {

// T(0) from samples at +-h and +-2h: the even part removes odd terms and
// (4 Te(h) - Te(2h)) / 3 removes the nu^2 term.
template <typename Scalar>
Scalar extrapolate_to_zero(Scalar tm2, Scalar tm1, Scalar tp1, Scalar tp2) {
  const Scalar e1 = (tm1 + tp1) / 2;
  const Scalar e2 = (tm2 + tp2) / 2;
  return (4 * e1 - e2) / 3;
}

// One-sided quadratic extrapolation from T at h, 2h, 3h (or their mirror).
template <typename Scalar>
Scalar extrapolate_one_sided(Scalar t1, Scalar t2, Scalar t3) {
  return 3 * t1 - 3 * t2 + t3;
}

}  // namespace detail

template <typename Scalar>
DelayProfile<Scalar> delay_profile(const SpectralResponse<Scalar>& response) {
  const auto& grid = response.grid;
  const auto i0opt = grid.zero_index();
  if (!i0opt) throw ContractViolation("delay profile: grid has no sample at nu = 0");
  const int i0 = *i0opt;
  const int n = grid.n_points;
  if (response.phase.size() != std::size_t(n)) throw ContractViolation("delay profile: phase size mismatch");
  if (response.phase[std::size_t(i0)] != Scalar(0))
    throw ContractViolation("delay profile: phase is not anchored at nu = 0");

  DelayProfile<Scalar> p;
  p.grid = grid;
  p.delay.resize(std::size_t(n));
  for (int i = 0; i < n; ++i)
    if (i != i0) p.delay[std::size_t(i)] = kPhaseToDelay<Scalar> * response.phase[std::size_t(i)] / grid[i];

  if (response.exact_delay_at_zero) {
    p.delay_at_zero = *response.exact_delay_at_zero;
  } else {
    auto t = [&](int i) { return p.delay[std::size_t(i)]; };
    if (i0 >= 2 && i0 + 2 < n)
      p.delay_at_zero = detail::extrapolate_to_zero(t(i0 - 2), t(i0 - 1), t(i0 + 1), t(i0 + 2));
    else if (i0 + 3 < n)
      p.delay_at_zero = detail::extrapolate_one_sided(t(i0 + 1), t(i0 + 2), t(i0 + 3));
    else if (i0 >= 3)
      p.delay_at_zero = detail::extrapolate_one_sided(t(i0 - 1), t(i0 - 2), t(i0 - 3));
    else
      throw ContractViolation("delay profile: too few samples around nu = 0");
  }
  p.delay[std::size_t(i0)] = p.delay_at_zero;

  p.relative.resize(std::size_t(n));
  const Scalar t0 = p.delay_at_zero;
  for (int i = 0; i < n; ++i)
    p.relative[std::size_t(i)] = t0 == 0 ? std::numeric_limits<Scalar>::quiet_NaN() : p.delay[std::size_t(i)] / t0;
  if (t0 != 0) p.relative[std::size_t(i0)] = Scalar(1);
  return p;
}

template <typename Scalar>
DelayProfile<Scalar> delay_profile(const Circuit<Scalar>& circuit, const FrequencyGrid<Scalar>& grid) {
  return delay_profile(spectral_response(circuit, grid));
}

/// max - min of T_rel over grid samples inside [lo, hi].
template <typename Scalar>
Scalar delay_spread(const DelayProfile<Scalar>& profile, Scalar lo, Scalar hi) {
  if (!(lo <= hi)) throw InvalidParameter("spread: band must satisfy lo <= hi");
  const Scalar slack = profile.grid.step() * Scalar(1e-9);
  if (lo < profile.grid.nu_min - slack || hi > profile.grid.nu_max + slack)
    throw InvalidParameter("spread: band exceeds the grid range");
  Scalar mn = std::numeric_limits<Scalar>::infinity();
  Scalar mx = -mn;
  int count = 0;
  for (int i = 0; i < profile.grid.n_points; ++i) {
    const Scalar nu = profile.grid[i];
    if (nu < lo - slack || nu > hi + slack) continue;
    const Scalar r = profile.relative[std::size_t(i)];
    if (std::isnan(r)) throw ContractViolation("spread: relative delay undefined (T(0) = 0)");
    mn = std::min(mn, r);
    mx = std::max(mx, r);
    ++count;
  }
  if (count == 0) throw InvalidParameter("spread: no samples inside the band");
  return mx - mn;
}

/// T(nu) of a circuit at a single frequency, nu != 0.
template <typename Scalar>
Scalar delay_at(const Circuit<Scalar>& circuit, Scalar nu, Scalar max_step = Scalar(1e-2)) {
  if (nu == 0) throw InvalidParameter("delay_at: use delay_at_zero for nu = 0");
  return kPhaseToDelay<Scalar> * unwrapped_phase_at(circuit, nu, max_step) / nu;
}

/// T(0) of a circuit by extrapolation from +-h, +-2h.
template <typename Scalar>
Scalar delay_at_zero(const Circuit<Scalar>& circuit, Scalar h = Scalar(1e-3)) {
  return detail::extrapolate_to_zero(delay_at(circuit, -2 * h), delay_at(circuit, -h), delay_at(circuit, h),
                                     delay_at(circuit, 2 * h));
}

}  // namespace qmcomb
