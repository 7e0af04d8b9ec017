#include <doctest.h>

#include <cmath>
#include <limits>

#include "perturbkit/exact_oracle.hpp"
#include "test_helpers.hpp"

using namespace perturbkit;
using Cplx = std::complex<double>;

namespace {

Eigen::MatrixXcd mat2(Cplx a, Cplx b, Cplx c, Cplx d) {
  Eigen::MatrixXcd M(2, 2);
  M << a, b, c, d;
  return M;
}

DensityMatrix diag_state2(double p, double q) {
  return DensityMatrix::from_operator(HermitianOperator(mat2(p, 0, 0, q)));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(diag_state2(1, 0)) == 0.0);
  CHECK(von_neumann_entropy(diag_state2(0.5, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(von_neumann_entropy(diag_state2(0.51, 0.49)) ==
        doctest::Approx(0.6929471672).epsilon(1e-9));

  // range invariant on random states
  for (unsigned seed : {3u, 5u, 8u}) {
    const DensityMatrix rho = random_density(4, 4, seed);
    const double s = von_neumann_entropy(rho);
    CHECK(s >= 0.0);
    CHECK(s <= std::log(4.0) + 1e-12);
  }
}

TEST_CASE("quantum relative entropy") {
  const DensityMatrix rho = random_density(3, 3, 11);
  CHECK(std::abs(quantum_relative_entropy(rho, rho)) <= 1e-12);

  CHECK(quantum_relative_entropy(diag_state2(1, 0), diag_state2(0.5, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK(quantum_relative_entropy(diag_state2(0.5, 0.5), diag_state2(1, 0)) ==
        kInf);

  // nonnegativity, zero iff equal
  const DensityMatrix a = random_density(4, 4, 13);
  const DensityMatrix b = random_density(4, 4, 17);
  CHECK(quantum_relative_entropy(a, b) >= -1e-10);
  CHECK(quantum_relative_entropy(a, b) > 1e-4);  // distinct random states
}

TEST_CASE("Chernoff exponent at fixed s") {
  const DensityMatrix rho = random_density(3, 3, 19);
  CHECK(std::abs(chernoff_exponent_s(rho, rho, 0.37)) <= 1e-12);

  CHECK(chernoff_exponent_s(diag_state2(0.51, 0.49), diag_state2(0.5, 0.5),
                            0.5) == doctest::Approx(5.0e-5).epsilon(2e-2));

  CHECK(chernoff_exponent_s(diag_state2(1, 0), diag_state2(0, 1), 0.5) ==
        kInf);

  CHECK_THROWS_AS(chernoff_exponent_s(rho, rho, 1.5), Error);
}

TEST_CASE("Chernoff exponent boundary values use support projectors") {
  // s = 0: rho1^0 is the support projector, so Tr[Pi_1 rho_2] = 0.7.
  const DensityMatrix rho1 = diag_state2(1, 0);
  const DensityMatrix rho2 = diag_state2(0.7, 0.3);
  CHECK(chernoff_exponent_s(rho1, rho2, 0.0) ==
        doctest::Approx(-std::log(0.7)).epsilon(1e-12));
  // s = 1: rho2 is full rank, Tr[rho1 Pi_2] = 1.
  CHECK(std::abs(chernoff_exponent_s(rho1, rho2, 1.0)) <= 1e-12);
  // swapped arguments hit the projector on the other side
  CHECK(chernoff_exponent_s(rho2, rho1, 1.0) ==
        doctest::Approx(-std::log(0.7)).epsilon(1e-12));
}

TEST_CASE("Chernoff bound maximization") {
  const DensityMatrix rho = random_density(3, 3, 23);
  const ChernoffBound same = chernoff_bound(rho, rho);
  CHECK(same.xi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same.s_star == doctest::Approx(0.5));

  // the support-extending counterexample: maximizer away from 1/2
  const ChernoffBound cb =
      chernoff_bound(diag_state2(0.99, 0.01), diag_state2(0.98, 0.02), 1e-8);
  CHECK(std::abs(cb.s_star - 0.471234) <= 2e-3);
  CHECK(cb.xi == doctest::Approx(8.737e-4).epsilon(1e-3));

  // continuity of xi_s along a grid
  for (int i = 0; i + 1 <= 20; ++i) {
    const double s0 = double(i) / 20.0;
    const double s1 = double(i + 1) / 20.0;
    const double d = std::abs(
        chernoff_exponent_s(diag_state2(0.99, 0.01), diag_state2(0.98, 0.02),
                            s0) -
        chernoff_exponent_s(diag_state2(0.99, 0.01), diag_state2(0.98, 0.02),
                            s1));
    CHECK(d <= 5e-4);
  }
}

TEST_CASE("fidelity") {
  const DensityMatrix rho = random_density(4, 4, 29);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(fidelity(diag_state2(1, 0), diag_state2(0.99, 0.01)) ==
        doctest::Approx(0.99).epsilon(1e-10));

  CHECK(fidelity(diag_state2(0.51, 0.49), diag_state2(0.5, 0.5)) ==
        doctest::Approx(0.9999000025).epsilon(2e-11));

  // symmetry under swapping arguments
  const DensityMatrix a = random_density(4, 3, 31);
  const DensityMatrix b = random_density(4, 4, 37);
  CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) <= 1e-10);
}

TEST_CASE("Tsallis entropies and the q -> 1 limit") {
  const DensityMatrix pure = diag_state2(1, 0);
  for (double q : {0.3, 0.9, 2.0}) {
    CHECK(std::abs(tsallis_entropy(pure, q)) <= 1e-12);
  }

  const DensityMatrix half = diag_state2(0.5, 0.5);
  for (double q : {0.4, 0.7, 1.3}) {
    const double expected = (std::pow(2.0, 1.0 - q) - 1.0) / (1.0 - q);
    CHECK(tsallis_entropy(half, q) == doctest::Approx(expected).epsilon(1e-12));
  }

  CHECK_THROWS_AS(tsallis_entropy(half, 1.0), Error);
  CHECK_THROWS_AS(tsallis_entropy(half, 0.0), Error);
  CHECK_THROWS_AS(tsallis_relative_entropy(half, half, 1.0), Error);

  const DensityMatrix rho = random_density(3, 3, 41);
  const double s_vn = von_neumann_entropy(rho);
  for (double q : {0.9, 0.99, 0.999}) {
    CHECK(std::abs(tsallis_entropy(rho, q) - s_vn) <= 10.0 * (1.0 - q));
  }

  // relative form: zero at equal arguments, support condition
  CHECK(std::abs(tsallis_relative_entropy(rho, rho, 0.5)) <= 1e-12);
  CHECK(tsallis_relative_entropy(diag_state2(0.5, 0.5), diag_state2(1, 0),
                                 0.5) == kInf);
  const DensityMatrix r2 = random_density(3, 3, 43);
  CHECK(std::abs(tsallis_relative_entropy(rho, r2, 0.999) -
                 quantum_relative_entropy(rho, r2)) <= 1e-2);
}

TEST_CASE("Bures distance") {
  const DensityMatrix rho = random_density(3, 3, 47);
  CHECK(std::abs(bures_distance(rho, rho)) <= 1e-10);
  CHECK(bures_distance(diag_state2(1, 0), diag_state2(0, 1)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bures_distance(diag_state2(1, 0), diag_state2(0.99, 0.01)) ==
        doctest::Approx(0.0100252).epsilon(1e-4));
}
