#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "qmcomb/response.hpp"

using namespace qmcomb;
using cd = std::complex<double>;

namespace {

// Independent route: the six coupled-mode relations as one linear system in
// (b1, b2, b3, a2, a3, a4) with a1 = 1 and d/dt -> -i nu.
cd six_equation_oracle(double center, double delta, double k, double g, double nu) {
  const cd i(0, 1);
  const double sk = std::sqrt(k);
  const double d1 = center - delta, d2 = center, d3 = center + delta;
  Eigen::Matrix<cd, 6, 6> m = Eigen::Matrix<cd, 6, 6>::Zero();
  Eigen::Matrix<cd, 6, 1> r = Eigen::Matrix<cd, 6, 1>::Zero();
  // (-i nu + i d1 + k/2) b1 + i g b2 = sqrt(k) a1
  m(0, 0) = -i * nu + i * d1 + k / 2;
  m(0, 1) = i * g;
  r(0) = sk;
  // (-i nu + i d2) b2 + i g b1 + i g b3 = 0
  m(1, 1) = -i * nu + i * d2;
  m(1, 0) = i * g;
  m(1, 2) = i * g;
  // (-i nu + i d3 + k/2) b3 + i g b2 - sqrt(k) a3 = 0
  m(2, 2) = -i * nu + i * d3 + k / 2;
  m(2, 1) = i * g;
  m(2, 4) = -sk;
  // a1 - a2 = sqrt(k) b1
  m(3, 3) = 1;
  m(3, 0) = sk;
  r(3) = 1;
  // a3 - a4 = sqrt(k) b3
  m(4, 4) = 1;
  m(4, 5) = -1;
  m(4, 2) = -sk;
  // a2 = a3
  m(5, 3) = 1;
  m(5, 4) = -1;
  const Eigen::Matrix<cd, 6, 1> x = m.fullPivLu().solve(r);
  return x(5);
}

}  // namespace

TEST_CASE("single resonator: on resonance flips the sign") {
  const cd s = single_resonator_response(1.0, 2.0, 1.0);
  CHECK(s.real() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(s.imag()) < 1e-15);
}

TEST_CASE("single resonator: far off resonance is transparent") {
  for (double nu : {1e8, -1e8}) {
    const cd s = single_resonator_response(0.0, 2.0, nu);
    CHECK(std::abs(s - cd(1)) < 1e-7);
  }
}

TEST_CASE("single resonator matches a 1x1 steady-state solve") {
  const double d = 0.7, k = 3.3, nu = 0.2;
  const cd i(0, 1);
  // (-i nu + i d + k/2) b = sqrt(k); a_out = 1 - sqrt(k) b
  const cd b = std::sqrt(k) / (-i * nu + i * d + k / 2);
  const cd oracle = 1.0 - std::sqrt(k) * b;
  const cd s = single_resonator_response(d, k, nu);
  CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
  CHECK(std::abs(s - oracle) < 1e-14);
}

TEST_CASE("single resonator rejects negative k") {
  CHECK_THROWS_AS(single_resonator_response(0.0, -1.0, 0.0), InvalidParameter);
}

TEST_CASE("block with g = 0 is the product of its outer resonators") {
  for (double k : {0.3, 1.0, 3.17, 7.5})
    for (double nu = -4; nu <= 4; nu += 0.173) {
      const cd s = block_response(Block<double>{0, 1, k, 0}, nu);
      const cd prod = single_resonator_response(-1.0, k, nu) * single_resonator_response(1.0, k, nu);
      CHECK(std::abs(s - prod) < 1e-12);
    }
}

TEST_CASE("block agrees with the six-equation oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uk(0.05, 10), ug(0, 5), uc(-5, 5), ud(0.2, 3), un(-8, 8);
  for (int t = 0; t < 200; ++t) {
    const Block<double> b{uc(rng), ud(rng), uk(rng), ug(rng)};
    const double nu = un(rng);
    CHECK(std::abs(block_response(b, nu) - six_equation_oracle(b.center, b.delta, b.k, b.g, nu)) < 1e-10);
  }
}

TEST_CASE("block at its own centre: dark mode does not break the solve") {
  for (double g : {0.0, 0.29, 2.0}) {
    const Block<double> b{0.5, 1, 3.47, g};
    const cd s = block_response(b, 0.5);
    CHECK(std::abs(s - cd(1)) < 1e-12);
    // Continuity through the singular point.
    CHECK(std::abs(block_response(b, 0.5 + 1e-7) - s) < 1e-6);
  }
}

TEST_CASE("full-optimized block has zero phase at band centre") {
  const cd s = block_response(Block<double>{0, 1, 3.47, 0.29}, 0.0);
  CHECK(std::abs(s - cd(1)) < 1e-12);
}

TEST_CASE("closed form: values and pole") {
  CHECK(closed_form_tan_phase(3.47, 0.29, 0.0) == 0.0);
  // D(1) = 8 * 0.0841 + 12.0409 + 4 - 4 = 12.7137
  CHECK(closed_form_tan_phase(3.47, 0.29, 1.0) == doctest::Approx(13.88 / 12.7137).epsilon(1e-12));
  CHECK(closed_form_tan_phase(3.47, 0.29, 1.0) == doctest::Approx(1.0917).epsilon(1e-4));
  CHECK_THROWS_AS(closed_form_tan_phase(2.0, 0.0, std::sqrt(2.0)), PoleError);
}

TEST_CASE("closed form is tan(phase / 2) of the solver") {
  // The solver phase is twice the closed-form arctan: tan(arg S / 2) = 4 k nu / D.
  const Block<double> b{0, 1, 3.47, 0.29};
  for (double nu : {0.1, 0.5, 1.0, 1.7, 2.5, 3.9}) {
    const double half = std::arg(block_response(b, nu)) / 2;
    CHECK(std::tan(half) == doctest::Approx(closed_form_tan_phase(3.47, 0.29, nu)).epsilon(1e-10));
  }
}

TEST_CASE("cascade: singleton equals the element, identical pair squares") {
  const Block<double> b{0, 1, 3.47, 0.29};
  const Circuit<double> one{b}, two{b, b};
  for (double nu = -3; nu <= 3; nu += 0.37) {
    CHECK(std::abs(cascade_response(one, nu) - block_response(b, nu)) < 1e-15);
    const cd s = block_response(b, nu);
    CHECK(std::abs(cascade_response(two, nu) - s * s) < 1e-14);
  }
}

TEST_CASE("unitarity and conjugate symmetry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uk(1e-3, 10), ug(0, 5), un(-10, 10);
  for (int t = 0; t < 300; ++t) {
    const double k = uk(rng), g = ug(rng), c = un(rng) / 2;
    const Circuit<double> sym{Block<double>{-c, 1, k, g}, Block<double>{c, 1, k, g}, Comb<double>{{-2, 0, 2}, k}};
    for (int j = 0; j < 10; ++j) {
      const double nu = un(rng);
      const cd s = cascade_response(sym, nu);
      CHECK(std::abs(std::abs(s) - 1) < 1e-10);
      CHECK(std::abs(cascade_response(sym, -nu) - std::conj(s)) < 1e-10);
    }
  }
}

TEST_CASE("zero waveguide coupling means no interaction") {
  const Circuit<double> c{Block<double>{0, 1, 0, 0.7}, Comb<double>{{-1, 1}, 0}};
  for (double nu = -5; nu <= 5; nu += 0.5) CHECK(cascade_response(c, nu) == cd(1));
}

TEST_CASE("invalid elements are rejected") {
  CHECK_THROWS_AS(block_response(Block<double>{0, 0, 1, 0}, 0.1), InvalidParameter);
  CHECK_THROWS_AS(block_response(Block<double>{0, 1, -1, 0}, 0.1), InvalidParameter);
  CHECK_THROWS_AS(block_response(Block<double>{0, 1, 1, -0.1}, 0.1), InvalidParameter);
  CHECK_THROWS_AS(cascade_response(Circuit<double>{}, 0.0), InvalidParameter);
  CHECK_THROWS_AS(cascade_response(Circuit<double>{Comb<double>{{1, 0}, 1}}, 0.0), InvalidParameter);
}

TEST_CASE("templated on scalar: long double path agrees") {
  const Block<long double> bl{0, 1, 3.47L, 0.29L};
  const Block<double> bd{0, 1, 3.47, 0.29};
  for (double nu : {-2.0, -0.3, 0.8, 1.9}) {
    const auto sl = block_response(bl, static_cast<long double>(nu));
    const auto sd = block_response(bd, nu);
    CHECK(std::abs(cd(double(sl.real()), double(sl.imag())) - sd) < 1e-13);
  }
}
