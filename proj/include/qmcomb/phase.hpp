#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qmcomb/circuit.hpp"
#include "qmcomb/errors.hpp"
#include "qmcomb/response.hpp"

namespace qmcomb {

struct UnwrapOptions {
  // Shift the sequence so the sample at nu = 0 is exactly zero.
  bool anchor_at_zero = false;
  // Replace phase(nu) by (phase(nu) - phase(-nu)) / 2 on a symmetric grid.
  bool antisymmetrize = false;
};

/// Largest phase step between neighbouring samples accepted after the 2 pi
/// correction. A step of pi is already ambiguous, so the grid must resolve
/// the phase at least twice as finely.
template <typename Scalar>
constexpr Scalar kMaxPhaseStep = std::numbers::pi_v<Scalar> / 2;

/// Continuous phase from principal-value arguments sampled on `grid`.
template <typename Scalar>
std::vector<Scalar> unwrap_phase(std::span<const Scalar> raw_args, const FrequencyGrid<Scalar>& grid,
                                 UnwrapOptions options = {}) {
  grid.validate();
  if (raw_args.size() != static_cast<std::size_t>(grid.n_points))
    throw InvalidParameter("unwrap: argument count does not match grid");
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;

  std::vector<Scalar> phase(raw_args.size());
  phase[0] = raw_args[0];
  for (std::size_t i = 1; i < raw_args.size(); ++i) {
    Scalar d = raw_args[i] - raw_args[i - 1];
    d -= two_pi * std::round(d / two_pi);
    if (std::abs(d) > kMaxPhaseStep<Scalar>)
      throw GridTooCoarse("unwrap: phase step exceeds pi/2 near nu = " + std::to_string(grid[int(i)]) +
                          "; refine the grid");
    phase[i] = phase[i - 1] + d;
  }

  if (options.anchor_at_zero) {
    const auto i0 = grid.zero_index();
    if (!i0) throw ContractViolation("unwrap: grid has no sample at nu = 0 to anchor on");
    const Scalar ref = phase[std::size_t(*i0)];
    for (auto& p : phase) p -= ref;
  }
  if (options.antisymmetrize && grid.symmetric()) {
    const std::size_t n = phase.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      const Scalar odd = (phase[i] - phase[n - 1 - i]) / 2;
      phase[i] = odd;
      phase[n - 1 - i] = -odd;
    }
    if (n % 2 == 1) phase[n / 2] = Scalar(0);
  }
  return phase;
}

/// Sampled transfer function with its unwrapped, zero-anchored phase.
template <typename Scalar>
struct SpectralResponse {
  FrequencyGrid<Scalar> grid;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> s;
  std::vector<Scalar> phase;
  // Exact T(0) when the circuit is one block centred at zero.
  std::optional<Scalar> exact_delay_at_zero;
};

template <typename Scalar>
SpectralResponse<Scalar> spectral_response(const Circuit<Scalar>& circuit, const FrequencyGrid<Scalar>& grid) {
  circuit.validate();
  grid.validate();
  SpectralResponse<Scalar> r;
  r.grid = grid;
  r.s = cascade_response(circuit, grid.values());
  std::vector<Scalar> args(std::size_t(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) args[std::size_t(i)] = std::arg(r.s[i]);
  UnwrapOptions opt;
  opt.anchor_at_zero = grid.zero_index().has_value();
  opt.antisymmetrize = opt.anchor_at_zero && circuit.symmetric();
  r.phase = unwrap_phase<Scalar>(args, grid, opt);

  if (circuit.elements.size() == 1) {
    if (const auto* b = std::get_if<Block<Scalar>>(&circuit.elements.front()); b && b->center == 0)
      r.exact_delay_at_zero = closed_form_delay_at_zero(b->k, b->g, b->delta);
  }
  return r;
}

/// Unwrapped phase at a single frequency, relative to nu = 0, obtained by
/// walking from 0 to nu in steps no larger than `max_step`.
template <typename Scalar>
Scalar unwrapped_phase_at(const Circuit<Scalar>& circuit, Scalar nu, Scalar max_step = Scalar(1e-2)) {
  if (nu == 0) return Scalar(0);
  const int steps = std::max(1, int(std::ceil(std::abs(nu) / max_step)));
  const std::complex<Scalar> s0 = cascade_response(circuit, Scalar(0));
  std::complex<Scalar> prev = s0;
  Scalar phase{0};
  for (int i = 1; i <= steps; ++i) {
    const Scalar x = nu * Scalar(i) / Scalar(steps);
    const std::complex<Scalar> s = cascade_response(circuit, x);
    const Scalar d = std::arg(s * std::conj(prev));
    if (std::abs(d) > kMaxPhaseStep<Scalar>)
      throw GridTooCoarse("phase walk: step too large; reduce max_step");
    phase += d;
    prev = s;
  }
  return phase;
}

}  // namespace qmcomb
