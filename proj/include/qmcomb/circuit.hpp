#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "qmcomb/errors.hpp"

namespace qmcomb {

// All frequencies are in units of the block detuning Delta, times in 1/Delta.

/// Symmetric three-resonator memory block. Resonators sit at
/// center - delta, center, center + delta; the outer two couple to the
/// waveguide with rate k and to the middle one with rate g.
template <typename Scalar>
struct Block {
  Scalar center{0};
  Scalar delta{1};
  Scalar k{0};
  Scalar g{0};

  void validate() const {
    if (!std::isfinite(center) || !std::isfinite(delta) || !std::isfinite(k) || !std::isfinite(g))
      throw InvalidParameter("block: non-finite parameter");
    if (!(delta > 0)) throw InvalidParameter("block: delta must be > 0");
    if (k < 0) throw InvalidParameter("block: k must be >= 0");
    if (g < 0) throw InvalidParameter("block: g must be >= 0");
  }

  bool operator==(const Block&) const = default;
};

/// Independently side-coupled resonators (no inter-resonator coupling).
template <typename Scalar>
struct Comb {
  std::vector<Scalar> detunings;
  Scalar k{0};

  void validate() const {
    if (detunings.empty()) throw InvalidParameter("comb: no resonators");
    if (!std::isfinite(k) || k < 0) throw InvalidParameter("comb: k must be finite and >= 0");
    for (std::size_t i = 0; i < detunings.size(); ++i) {
      if (!std::isfinite(detunings[i])) throw InvalidParameter("comb: non-finite detuning");
      if (i > 0 && !(detunings[i] > detunings[i - 1]))
        throw InvalidParameter("comb: detunings must be strictly increasing");
    }
  }

  bool symmetric(Scalar tol = Scalar(1e-12)) const {
    const std::size_t n = detunings.size();
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(detunings[i] + detunings[n - 1 - i]) > tol) return false;
    return true;
  }

  bool operator==(const Comb&) const = default;
};

/// N resonators at detunings 2i - (N - 1): neighbours two units apart,
/// matching the spacing of a block's outer resonators.
template <typename Scalar>
Comb<Scalar> equidistant_comb(int n_resonators, Scalar k) {
  if (n_resonators < 1) throw InvalidParameter("comb: need at least one resonator");
  Comb<Scalar> comb;
  comb.k = k;
  for (int i = 0; i < n_resonators; ++i) comb.detunings.push_back(Scalar(2 * i - (n_resonators - 1)));
  return comb;
}

template <typename Scalar>
using Element = std::variant<Block<Scalar>, Comb<Scalar>>;

/// Ordered cascade of elements along one waveguide.
template <typename Scalar>
struct Circuit {
  std::vector<Element<Scalar>> elements;

  Circuit() = default;
  explicit Circuit(std::vector<Element<Scalar>> e) : elements(std::move(e)) {}
  Circuit(std::initializer_list<Element<Scalar>> e) : elements(e) {}

  void validate() const {
    if (elements.empty()) throw InvalidParameter("circuit: no elements");
    for (const auto& e : elements) std::visit([](const auto& x) { x.validate(); }, e);
  }

  /// True when mirroring every element about nu = 0 maps the element set
  /// onto itself. Cascade order does not matter for the response.
  bool symmetric(Scalar tol = Scalar(1e-12)) const {
    std::vector<bool> used(elements.size(), false);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < elements.size() && !found; ++j) {
        if (used[j]) continue;
        if (mirrors(elements[i], elements[j], tol)) {
          used[j] = true;
          found = true;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  bool operator==(const Circuit&) const = default;

 private:
  static bool mirrors(const Element<Scalar>& a, const Element<Scalar>& b, Scalar tol) {
    if (a.index() != b.index()) return false;
    if (const auto* ba = std::get_if<Block<Scalar>>(&a)) {
      const auto& bb = std::get<Block<Scalar>>(b);
      return std::abs(ba->center + bb.center) <= tol && std::abs(ba->delta - bb.delta) <= tol &&
             std::abs(ba->k - bb.k) <= tol && std::abs(ba->g - bb.g) <= tol;
    }
    const auto& ca = std::get<Comb<Scalar>>(a);
    const auto& cb = std::get<Comb<Scalar>>(b);
    if (ca.detunings.size() != cb.detunings.size() || std::abs(ca.k - cb.k) > tol) return false;
    const std::size_t n = ca.detunings.size();
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(ca.detunings[i] + cb.detunings[n - 1 - i]) > tol) return false;
    return true;
  }
};

/// Largest rate appearing in the equations of motion of the circuit.
template <typename Scalar>
Scalar max_rate(const Circuit<Scalar>& circuit) {
  Scalar r{0};
  for (const auto& e : circuit.elements) {
    if (const auto* b = std::get_if<Block<Scalar>>(&e)) {
      r = std::max({r, b->k, b->g, std::abs(b->center) + b->delta});
    } else {
      const auto& c = std::get<Comb<Scalar>>(e);
      r = std::max(r, c.k);
      for (Scalar d : c.detunings) r = std::max(r, std::abs(d));
    }
  }
  return r;
}

/// Uniform frequency sampling. A grid with odd n over [-a, a] is symmetric
/// and contains nu = 0 exactly.
template <typename Scalar>
struct FrequencyGrid {
  Scalar nu_min{-1};
  Scalar nu_max{1};
  int n_points{3};

  FrequencyGrid() = default;
  FrequencyGrid(Scalar lo, Scalar hi, int n) : nu_min(lo), nu_max(hi), n_points(n) { validate(); }

  static FrequencyGrid symmetric_around_zero(Scalar halfwidth, int n) {
    if (n % 2 == 0) throw InvalidParameter("grid: symmetric grid needs an odd point count");
    return FrequencyGrid(-halfwidth, halfwidth, n);
  }

  void validate() const {
    if (!(nu_min < nu_max)) throw InvalidParameter("grid: nu_min must be < nu_max");
    if (n_points < 3) throw InvalidParameter("grid: need at least 3 points");
  }

  Scalar step() const { return (nu_max - nu_min) / Scalar(n_points - 1); }

  // Computed from both ends so that mirrored samples of a symmetric grid
  // are exact negatives and the centre sample is exactly zero.
  Scalar operator[](int i) const {
    const int j = n_points - 1 - i;
    if (i == j && symmetric()) return Scalar(0);
    if (i <= j) return nu_min + Scalar(i) * step();
    return nu_max - Scalar(j) * step();
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n_points);
    for (int i = 0; i < n_points; ++i) v[i] = (*this)[i];
    return v;
  }

  bool symmetric() const { return nu_min == -nu_max; }

  /// Index of the sample at nu = 0, if the grid has one.
  std::optional<int> zero_index() const {
    const Scalar h = step();
    const Scalar pos = -nu_min / h;
    const long i = std::lround(pos);
    if (i < 0 || i >= n_points) return std::nullopt;
    if (symmetric() && n_points % 2 == 1) return n_points / 2;
    if (std::abs(nu_min + Scalar(i) * h) > Scalar(1e-12) * std::max(Scalar(1), std::abs(nu_max)))
      return std::nullopt;
    return static_cast<int>(i);
  }
};

}  // namespace qmcomb
