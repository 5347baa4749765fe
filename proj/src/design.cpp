#include "qmcomb/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qmcomb/delay.hpp"
#include "qmcomb/nelder_mead.hpp"
#include "qmcomb/parallel.hpp"
#include "qmcomb/phase.hpp"
#include "qmcomb/response.hpp"

namespace qmcomb {

void ObjectiveSpec::validate() const {
  if (!(band_halfwidth > 0)) throw InvalidParameter("objective: band_halfwidth must be > 0");
  if (n_samples < 5 || n_samples % 2 == 0) throw InvalidParameter("objective: n_samples must be odd and >= 5");
}

void SearchConfig::validate() const {
  if (!(k_bounds.first > 0 && k_bounds.first < k_bounds.second))
    throw InvalidParameter("search: k bounds must satisfy 0 < lo < hi");
  if (!(g_bounds.first >= 0 && g_bounds.first <= g_bounds.second))
    throw InvalidParameter("search: g bounds must satisfy 0 <= lo <= hi");
  if (starts < 1) throw InvalidParameter("search: starts must be >= 1");
  if (!(tol > 0)) throw InvalidParameter("search: tol must be > 0");
  if (budget < 1) throw InvalidParameter("search: budget must be >= 1");
}

OptimMode parse_mode(const std::string& s) {
  if (s == "partial") return OptimMode::partial;
  if (s == "full") return OptimMode::full;
  throw InvalidParameter("mode must be 'partial' or 'full', got '" + s + "'");
}

std::string to_string(OptimMode m) { return m == OptimMode::partial ? "partial" : "full"; }

namespace {

double smallest_linewidth(const Circuit<double>& circuit) {
  double k = std::numeric_limits<double>::infinity();
  for (const auto& e : circuit.elements) {
    const double ke = std::visit([](const auto& x) { return x.k; }, e);
    if (ke > 0) k = std::min(k, ke);
  }
  return k;
}

Circuit<double> single_block(double k, double g) { return Circuit<double>{Block<double>{0.0, 1.0, k, g}}; }

}  // namespace

double flatness_objective(const Circuit<double>& circuit, const ObjectiveSpec& spec) {
  spec.validate();
  circuit.validate();
  // Phase is unwrapped on a refined grid; only every `refine`-th sample enters the sum.
  const double coarse = 2 * spec.band_halfwidth / double(spec.n_samples - 1);
  const double max_step = std::min(1e-2, smallest_linewidth(circuit) / 4);
  const int refine = std::max(1, int(std::ceil(coarse / max_step)));
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(spec.band_halfwidth, (spec.n_samples - 1) * refine + 1);
  const auto profile = delay_profile(spectral_response(circuit, grid));
  double h = 0;
  for (int m = 0; m < spec.n_samples; ++m) {
    const double d = profile.delay[std::size_t(m * refine)] - profile.delay_at_zero;
    h += d * d;
  }
  return h;
}

FrequencyGrid<double> default_grid(const Circuit<double>& circuit, double band_extent) {
  const bool single = circuit.elements.size() == 1 && std::holds_alternative<Block<double>>(circuit.elements[0]);
  const double w = std::max(single ? 4.0 : 6.0, band_extent);
  int n = 4001;
  const int needed = 2 * int(std::ceil(w / 0.003)) + 1;
  if (w > 6.0) n = std::max(n, needed);
  return FrequencyGrid<double>::symmetric_around_zero(w, n);
}

double circuit_spread(const Circuit<double>& circuit, double lo, double hi) {
  const auto grid = default_grid(circuit, std::max(std::abs(lo), std::abs(hi)));
  return delay_spread(delay_profile(circuit, grid), lo, hi);
}

namespace {

struct StartOutcome {
  double k = 0, g = 0, value = std::numeric_limits<double>::infinity();
  long evaluations = 0;
  bool converged = false;
};

StartOutcome run_start(OptimMode mode, double k0, double g0, const ObjectiveSpec& spec, const SearchConfig& search,
                       double k_step, double g_step, int budget) {
  StartOutcome o;
  if (mode == OptimMode::partial) {
    using V = Eigen::Matrix<double, 1, 1>;
    Box<double, 1> box{V(search.k_bounds.first), V(search.k_bounds.second)};
    auto f = [&](const V& x) { return flatness_objective(single_block(x[0], 0.0), spec); };
    const auto r = nelder_mead<double, 1>(f, V(k0), box, V(k_step), search.tol, budget);
    o = {r.x[0], 0.0, r.value, r.evaluations, r.converged};
  } else {
    using V = Eigen::Vector2d;
    Box<double, 2> box{V(search.k_bounds.first, search.g_bounds.first), V(search.k_bounds.second, search.g_bounds.second)};
    auto f = [&](const V& x) { return flatness_objective(single_block(x[0], x[1]), spec); };
    const auto r = nelder_mead<double, 2>(f, V(k0, g0), box, V(k_step, g_step), search.tol, budget);
    o = {r.x[0], r.x[1], r.value, r.evaluations, r.converged};
  }
  return o;
}

OptimResult finish(const StartOutcome& best, long evaluations, bool converged, const ObjectiveSpec& spec) {
  OptimResult r;
  r.k = best.k;
  r.g = best.g;
  r.objective_value = best.value;
  r.n_evaluations = evaluations;
  r.converged = converged;
  if (std::isfinite(best.value))
    r.spread_in_band = circuit_spread(single_block(best.k, best.g), -spec.band_halfwidth, spec.band_halfwidth);
  return r;
}

}  // namespace

OptimResult optimize_block(OptimMode mode, const ObjectiveSpec& spec, const SearchConfig& search) {
  spec.validate();
  search.validate();
  const int side = std::max(1, int(std::lround(std::sqrt(double(search.starts)))));
  const int nk = side;
  const int ng = mode == OptimMode::full ? side : 1;

  const double k_cell = (search.k_bounds.second - search.k_bounds.first) / nk;
  const double g_cell = (search.g_bounds.second - search.g_bounds.first) / ng;

  std::vector<std::pair<double, double>> starts;
  std::mt19937_64 rng(search.seed);
  std::uniform_real_distribution<double> jitter(0.1, 0.9);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < ng; ++j) {
      const double uk = search.seed == 0 ? 0.5 : jitter(rng);
      const double ug = search.seed == 0 ? 0.5 : jitter(rng);
      const double g0 = mode == OptimMode::full ? search.g_bounds.first + (j + ug) * g_cell : 0.0;
      starts.emplace_back(search.k_bounds.first + (i + uk) * k_cell, g0);
    }

  // A budget smaller than the start grid keeps the leading starts only.
  if (long(starts.size()) > search.budget) starts.resize(std::size_t(search.budget));
  const int per_start = int(std::min<long>(search.budget / long(starts.size()), std::numeric_limits<int>::max()));

  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(int(starts.size()), [&](int i) {
    outcomes[std::size_t(i)] = run_start(mode, starts[std::size_t(i)].first, starts[std::size_t(i)].second, spec,
                                         search, k_cell / 4, std::max(g_cell / 4, 1e-3), per_start);
  });

  long evaluations = 0;
  bool all_converged = true;
  const StartOutcome* best = nullptr;
  for (const auto& o : outcomes) {
    evaluations += o.evaluations;
    all_converged = all_converged && o.converged;
    if (!best) {
      best = &o;
      continue;
    }
    // Within 1e-10 counts as a tie: prefer smaller k, then smaller g.
    if (o.value < best->value - 1e-10) {
      best = &o;
    } else if (std::abs(o.value - best->value) <= 1e-10) {
      if (o.k < best->k || (o.k == best->k && o.g < best->g)) best = &o;
    }
  }

  OptimResult result = finish(*best, evaluations, all_converged, spec);
  if (!all_converged) throw BudgetExceeded("optimizer: evaluation budget exhausted before convergence", result);
  return result;
}

OptimResult refine_block(OptimMode mode, double k0, double g0, const ObjectiveSpec& spec, const SearchConfig& search) {
  spec.validate();
  search.validate();
  const auto o = run_start(mode, k0, mode == OptimMode::full ? g0 : 0.0, spec, search, 0.05, 0.05,
                           int(std::min<long>(search.budget, std::numeric_limits<int>::max())));
  OptimResult r = finish(o, o.evaluations, o.converged, spec);
  if (!o.converged) throw BudgetExceeded("optimizer: evaluation budget exhausted before convergence", r);
  return r;
}

double delay_curvature_at_zero(const Comb<double>& comb, double h) {
  comb.validate();
  const Circuit<double> c{comb};
  // Exact T(0): each resonator contributes 2k / (k^2 + 4 d^2).
  double t0 = 0;
  for (double d : comb.detunings) t0 += 2 * comb.k / (comb.k * comb.k + 4 * d * d);
  const double tm2 = delay_at(c, -2 * h), tm1 = delay_at(c, -h);
  const double tp1 = delay_at(c, h), tp2 = delay_at(c, 2 * h);
  return (-tm2 + 16 * tm1 - 30 * t0 + 16 * tp1 - tp2) / (12 * h * h);
}

double curvature_flat_k(const Comb<double>& comb) {
  comb.validate();
  if (!comb.symmetric()) throw InvalidParameter("curvature_flat_k: comb must be symmetric about 0");
  auto curvature = [&](double k) {
    Comb<double> c = comb;
    c.k = k;
    return delay_curvature_at_zero(c);
  };
  constexpr double step = 0.05, k_max = 20.0;
  double lo = step, flo = curvature(lo);
  for (double hi = lo + step; hi <= k_max + 1e-12; hi += step) {
    const double fhi = curvature(hi);
    if (flo == 0) return lo;
    if ((flo < 0) != (fhi < 0)) {
      double a = lo, b = hi, fa = flo;
      while (b - a > 1e-12) {
        const double m = (a + b) / 2;
        const double fm = curvature(m);
        if (fm == 0) return m;
        if ((fa < 0) == (fm < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return (a + b) / 2;
    }
    lo = hi;
    flo = fhi;
  }
  throw NoSolution("curvature_flat_k: no sign change of the delay curvature for k in (0, 20]");
}

Circuit<double> glued_pair(const Block<double>& block, double delta) {
  Block<double> left = block, right = block;
  left.center = block.center - delta;
  right.center = block.center + delta;
  return Circuit<double>{left, right};
}

GlueResult glue_delta(const Block<double>& block, double band_halfwidth, double spread_halfwidth) {
  block.validate();
  if (!(band_halfwidth > 0)) throw InvalidParameter("glue: band_halfwidth must be > 0");
  auto residual = [&](double delta) {
    const auto c = glued_pair(block, delta);
    return delay_at(c, delta) - delay_at_zero(c);
  };

  // The coincident pair (delta -> 0) is a trivial root; the glue point is the
  // first upward crossing of the residual.
  constexpr double step = 0.05;
  const double d_max = 6 * band_halfwidth;
  double lo = step, flo = residual(lo);
  for (double hi = lo + step; hi <= d_max + 1e-12; hi += step) {
    const double fhi = residual(hi);
    if (flo < 0 && fhi >= 0) {
      double a = lo, b = hi, fb = fhi;
      double m = b, fm = fb;
      for (int it = 0; it < 200 && std::abs(fm) >= 1e-8; ++it) {
        m = (a + b) / 2;
        fm = residual(m);
        if (fm < 0)
          a = m;
        else
          b = m;
      }
      GlueResult r;
      r.delta_shift = m;
      r.residual = fm;
      r.composite = glued_pair(block, m);
      r.spread_in_band = circuit_spread(r.composite, -spread_halfwidth, spread_halfwidth);
      return r;
    }
    lo = hi;
    flo = fhi;
  }
  throw NoSolution("glue: no delta in (0, 6 * band_halfwidth] with T(delta) = T(0)");
}

DesignComparison compare_designs(const Circuit<double>& a, const Circuit<double>& b, double lo, double hi) {
  DesignComparison c;
  c.spread_a = circuit_spread(a, lo, hi);
  c.spread_b = circuit_spread(b, lo, hi);
  c.ratio = c.spread_a == c.spread_b ? 1.0 : c.spread_a / c.spread_b;
  return c;
}

}  // namespace qmcomb
