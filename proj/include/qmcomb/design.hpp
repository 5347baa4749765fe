#pragma once

#include <string>
#include <utility>

#include "qmcomb/circuit.hpp"
#include "qmcomb/errors.hpp"

namespace qmcomb {

/// Sampling of the flatness objective: n_samples uniform points over
/// [-band_halfwidth, band_halfwidth] (odd, so nu = 0 is included).
struct ObjectiveSpec {
  double band_halfwidth = 1.0;
  int n_samples = 41;

  void validate() const;
};

struct SearchConfig {
  std::pair<double, double> k_bounds{0.01, 10.0};
  std::pair<double, double> g_bounds{0.0, 5.0};
  int starts = 25;
  double tol = 1e-4;
  long budget = 100000;
  // 0 places starts at cell centres; other values jitter them reproducibly.
  unsigned long long seed = 0;

  void validate() const;
};

enum class OptimMode { partial, full };

OptimMode parse_mode(const std::string& s);
std::string to_string(OptimMode m);

struct OptimResult {
  double k = 0;
  double g = 0;
  double objective_value = 0;
  double spread_in_band = 0;
  long n_evaluations = 0;
  bool converged = false;
};

/// Thrown when the evaluation budget runs out; carries the best point seen.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, OptimResult best) : Error(what), best_(best) {}
  const OptimResult& best() const { return best_; }

 private:
  OptimResult best_;
};

struct GlueResult {
  double delta_shift = 0;
  Circuit<double> composite;
  double spread_in_band = 0;
  double residual = 0;
};

struct DesignComparison {
  double spread_a = 0;
  double spread_b = 0;
  double ratio = 0;  // spread_a / spread_b
};

/// Sum over the objective grid of (T(nu_m) - T(0))^2.
double flatness_objective(const Circuit<double>& circuit, const ObjectiveSpec& spec);

/// Multistart Nelder-Mead over (k) or (k, g) for Block{center 0, delta 1}.
OptimResult optimize_block(OptimMode mode, const ObjectiveSpec& spec = {}, const SearchConfig& search = {});

/// Same search started from a single point; used for descent checks.
OptimResult refine_block(OptimMode mode, double k0, double g0, const ObjectiveSpec& spec = {},
                         const SearchConfig& search = {});

/// d^2 T / d nu^2 at nu = 0 by the 5-point central stencil (step h).
double delay_curvature_at_zero(const Comb<double>& comb, double h = 1e-3);

/// k in (0, 20] where the comb's delay curvature at nu = 0 vanishes.
double curvature_flat_k(const Comb<double>& comb);

/// Two copies of `block` at centres -delta, +delta.
Circuit<double> glued_pair(const Block<double>& block, double delta);

/// delta > 0 with T(delta) = T(0) for the glued pair (its own delay).
GlueResult glue_delta(const Block<double>& block, double band_halfwidth = 1.0, double spread_halfwidth = 3.0);

/// Delay spreads of two circuits over [lo, hi] and their ratio.
DesignComparison compare_designs(const Circuit<double>& a, const Circuit<double>& b, double lo, double hi);

/// T_rel spread of a circuit over [lo, hi] on the default analysis grid.
double circuit_spread(const Circuit<double>& circuit, double lo, double hi);

/// Default analysis grids: 4001 points over [-4, 4] for a single block,
/// [-6, 6] otherwise, widened if the band does not fit.
FrequencyGrid<double> default_grid(const Circuit<double>& circuit, double band_extent = 0);

}  // namespace qmcomb
