#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace qmcomb {

template <typename Scalar, int Dim>
struct Box {
  Eigen::Matrix<Scalar, Dim, 1> lower;
  Eigen::Matrix<Scalar, Dim, 1> upper;

  Eigen::Matrix<Scalar, Dim, 1> clamp(const Eigen::Matrix<Scalar, Dim, 1>& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
};

template <typename Scalar, int Dim>
struct SimplexResult {
  Eigen::Matrix<Scalar, Dim, 1> x;
  Scalar value{};
  int evaluations = 0;
  bool converged = false;
  // Best objective value after each iteration; non-increasing.
  std::vector<Scalar> best_trace;
};

/// Nelder-Mead downhill simplex inside a box. Trial points are projected
/// onto the box. Stops when every vertex is within `xtol` (max-norm) of the
/// best vertex or when `max_evaluations` is reached.
template <typename Scalar, int Dim, typename F>
SimplexResult<Scalar, Dim> nelder_mead(F&& f, Eigen::Matrix<Scalar, Dim, 1> x0, const Box<Scalar, Dim>& box,
                                       const Eigen::Matrix<Scalar, Dim, 1>& initial_step, Scalar xtol,
                                       int max_evaluations) {
  using Vec = Eigen::Matrix<Scalar, Dim, 1>;
  constexpr int n = Dim;
  constexpr Scalar alpha = 1, gamma = 2, rho = Scalar(0.5), sigma = Scalar(0.5);

  SimplexResult<Scalar, Dim> out;
  std::array<Vec, n + 1> pts;
  std::array<Scalar, n + 1> vals;

  auto eval = [&](const Vec& x) {
    ++out.evaluations;
    return f(x);
  };

  x0 = box.clamp(x0);
  pts[0] = x0;
  for (int j = 0; j < n; ++j) {
    Vec x = x0;
    x[j] += initial_step[j];
    if (x[j] > box.upper[j]) x[j] = x0[j] - initial_step[j];
    pts[std::size_t(j + 1)] = box.clamp(x);
  }

  for (int i = 0; i <= n; ++i) {
    if (out.evaluations >= max_evaluations) break;
    vals[std::size_t(i)] = eval(pts[std::size_t(i)]);
  }
  if (out.evaluations < n + 1) {
    out.x = pts[0];
    out.value = out.evaluations > 0 ? vals[0] : Scalar(0);
    return out;
  }

  std::array<int, n + 1> order;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[std::size_t(a)] < vals[std::size_t(b)]; });
    auto p2 = pts;
    auto v2 = vals;
    for (int i = 0; i <= n; ++i) {
      pts[std::size_t(i)] = p2[std::size_t(order[std::size_t(i)])];
      vals[std::size_t(i)] = v2[std::size_t(order[std::size_t(i)])];
    }
  };

  sort_simplex();
  out.best_trace.push_back(vals[0]);
  while (true) {
    Scalar size = 0;
    for (int i = 1; i <= n; ++i) size = std::max(size, (pts[std::size_t(i)] - pts[0]).cwiseAbs().maxCoeff());
    if (size <= xtol) {
      out.converged = true;
      break;
    }
    if (out.evaluations >= max_evaluations) break;

    Vec centroid = Vec::Zero();
    for (int i = 0; i < n; ++i) centroid += pts[std::size_t(i)];
    centroid /= Scalar(n);
    const Vec& worst = pts[std::size_t(n)];

    const Vec xr = box.clamp(centroid + alpha * (centroid - worst));
    const Scalar fr = eval(xr);
    if (fr < vals[0]) {
      const Vec xe = box.clamp(centroid + gamma * (centroid - worst));
      const Scalar fe = eval(xe);
      if (fe < fr) {
        pts[std::size_t(n)] = xe;
        vals[std::size_t(n)] = fe;
      } else {
        pts[std::size_t(n)] = xr;
        vals[std::size_t(n)] = fr;
      }
    } else if (fr < vals[std::size_t(n - 1)]) {
      pts[std::size_t(n)] = xr;
      vals[std::size_t(n)] = fr;
    } else {
      const bool outside = fr < vals[std::size_t(n)];
      const Vec xc = outside ? box.clamp(centroid + rho * (xr - centroid)) : box.clamp(centroid + rho * (worst - centroid));
      const Scalar fc = eval(xc);
      if (fc < (outside ? fr : vals[std::size_t(n)])) {
        pts[std::size_t(n)] = xc;
        vals[std::size_t(n)] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[std::size_t(i)] = box.clamp(pts[0] + sigma * (pts[std::size_t(i)] - pts[0]));
          vals[std::size_t(i)] = eval(pts[std::size_t(i)]);
        }
      }
    }
    sort_simplex();
    out.best_trace.push_back(vals[0]);
  }
  out.x = pts[0];
  out.value = vals[0];
  return out;
}

}  // namespace qmcomb
