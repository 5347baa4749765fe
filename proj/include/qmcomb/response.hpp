#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <variant>

#include <Eigen/Dense>

#include "qmcomb/circuit.hpp"
#include "qmcomb/errors.hpp"

namespace qmcomb {

// Steady state of the coupled-mode equations under the Fourier convention
// a(t) = (2 pi)^-1/2 \int dnu exp(-i nu t) a(nu), i.e. d/dt -> -i nu.

/// Transfer function of one side-coupled resonator,
/// (i(d - nu) - k/2) / (i(d - nu) + k/2).
template <typename Scalar>
std::complex<Scalar> single_resonator_response(Scalar detuning, Scalar k, Scalar nu) {
  if (!(k >= 0)) throw InvalidParameter("resonator: k must be >= 0");
  using C = std::complex<Scalar>;
  if (k == 0) return C(1);
  const C x(Scalar(0), detuning - nu);
  const C half(k / 2, Scalar(0));
  return (x - half) / (x + half);
}

namespace detail {

template <typename Scalar>
using Mat3c = Eigen::Matrix<std::complex<Scalar>, 3, 3>;
template <typename Scalar>
using Vec3c = Eigen::Matrix<std::complex<Scalar>, 3, 1>;

/// Steady-state mode amplitudes of a block centered at zero for unit input.
/// Rows are the three resonator equations with resonator 3 driven by the
/// waveguide field after resonator 1, a3 = a1 - sqrt(k) b1.
template <typename Scalar>
Vec3c<Scalar> block_system(Scalar delta, Scalar k, Scalar g, Scalar nu, Mat3c<Scalar>& a) {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  const Scalar sk = std::sqrt(k);
  a << -i * (nu + delta) + k / 2, i * g, C(0),
       i * g, -i * nu, i * g,
       C(k), i * g, -i * (nu - delta) + k / 2;
  Vec3c<Scalar> rhs;
  rhs << C(sk), C(0), C(sk);
  return rhs;
}

}  // namespace detail

/// Condition-number ceiling of the 3x3 steady-state solve.
template <typename Scalar>
constexpr Scalar kMaxCondition = Scalar(1e12);

/// Output/input ratio of one symmetric block at detuning nu (absolute).
///
/// The block always has a dark mode at its centre frequency (b1 = -b3) that
/// the waveguide can neither drive nor read out, so the system is singular
/// at nu = center for every k and g. Ill-conditioned solves fall back to a
/// minimum-norm SVD solution; they only fail when a null direction is driven
/// or visible in the output.
template <typename Scalar>
std::complex<Scalar> block_response(const Block<Scalar>& block, Scalar nu) {
  block.validate();
  if (!std::isfinite(nu)) throw InvalidParameter("block: nu must be finite");
  using C = std::complex<Scalar>;
  if (block.k == 0) return C(1);

  const Scalar x = nu - block.center;
  detail::Mat3c<Scalar> a;
  const detail::Vec3c<Scalar> rhs = detail::block_system(block.delta, block.k, block.g, x, a);
  const Scalar sk = std::sqrt(block.k);

  Eigen::PartialPivLU<detail::Mat3c<Scalar>> lu(a);
  detail::Vec3c<Scalar> b;
  if (lu.rcond() * kMaxCondition<Scalar> > Scalar(1)) {
    b = lu.solve(rhs);
  } else {
    Eigen::JacobiSVD<detail::Mat3c<Scalar>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Scalar cutoff = s[0] / kMaxCondition<Scalar>;
    svd.setThreshold(Scalar(1) / kMaxCondition<Scalar>);
    const Scalar scale = rhs.norm();
    for (int j = 0; j < 3; ++j) {
      if (s[j] > cutoff) continue;
      const C driven = svd.matrixU().col(j).adjoint() * rhs;
      const auto v = svd.matrixV().col(j);
      const C seen = sk * (v[0] + v[2]);
      if (std::abs(driven) > Scalar(1e-9) * scale || std::abs(seen) > Scalar(1e-9) * sk)
        throw NearSingular("block: steady-state system is singular at this frequency");
    }
    b = svd.solve(rhs);
  }
  return C(1) - sk * (b[0] + b[2]);
}

/// Tangent of the closed-form half-phase, 4 k nu / (8 g^2 + k^2 + 4 delta^2 - 4 nu^2).
template <typename Scalar>
Scalar closed_form_tan_phase(Scalar k, Scalar g, Scalar nu, Scalar delta = Scalar(1)) {
  const Scalar d = 8 * g * g + k * k + 4 * delta * delta - 4 * nu * nu;
  const Scalar scale = 8 * g * g + k * k + 4 * delta * delta + 4 * nu * nu;
  if (std::abs(d) <= 16 * std::numeric_limits<Scalar>::epsilon() * scale)
    throw PoleError("closed form: denominator vanishes at this frequency");
  return 4 * k * nu / d;
}

/// Small-nu limit of the closed-form delay, 4k / (8g^2 + k^2 + 4 delta^2).
template <typename Scalar>
Scalar closed_form_delay_at_zero(Scalar k, Scalar g, Scalar delta = Scalar(1)) {
  return 4 * k / (8 * g * g + k * k + 4 * delta * delta);
}

template <typename Scalar>
std::complex<Scalar> comb_response(const Comb<Scalar>& comb, Scalar nu) {
  comb.validate();
  std::complex<Scalar> s(1);
  for (Scalar d : comb.detunings) s *= single_resonator_response(d, comb.k, nu);
  return s;
}

template <typename Scalar>
std::complex<Scalar> element_response(const Element<Scalar>& element, Scalar nu) {
  if (const auto* b = std::get_if<Block<Scalar>>(&element)) return block_response(*b, nu);
  return comb_response(std::get<Comb<Scalar>>(element), nu);
}

/// Product of the element responses; elements are placed with no transit
/// phase between them.
template <typename Scalar>
std::complex<Scalar> cascade_response(const Circuit<Scalar>& circuit, Scalar nu) {
  circuit.validate();
  std::complex<Scalar> s(1);
  for (const auto& e : circuit.elements) s *= element_response(e, nu);
  return s;
}

/// Cascade response on every sample of a frequency vector.
template <typename Scalar, typename Derived>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> cascade_response(
    const Circuit<Scalar>& circuit, const Eigen::MatrixBase<Derived>& nu) {
  circuit.validate();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> s(nu.size());
  for (Eigen::Index i = 0; i < nu.size(); ++i) s[i] = cascade_response(circuit, Scalar(nu[i]));
  return s;
}

}  // namespace qmcomb
