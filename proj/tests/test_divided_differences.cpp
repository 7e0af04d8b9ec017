#include <doctest.h>

#include <cmath>
#include <random>

#include "perturbkit/divided_differences.hpp"

using namespace perturbkit;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("first divided differences: worked tables") {
  const auto t = first_divided_difference(fn_sqrt(), vec({4.0, 1.0}));
  CHECK(t.values(0, 0) == doctest::Approx(0.25));
  CHECK(t.values(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(t.values(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(t.values(1, 1) == doctest::Approx(0.5));

  const auto deg = first_divided_difference(fn_sqrt(), vec({0.5, 0.5}));
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      CHECK(deg.values(k, l) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
  }

  const auto ones = first_divided_difference(fn_identity(), vec({-3, 0.2, 7}));
  CHECK((ones.values.array() == 1.0).all());
}

TEST_CASE("first divided differences are exactly symmetric") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  Eigen::VectorXd lam(6);
  for (int i = 0; i < 6; ++i) lam[i] = unif(rng);
  const auto t = first_divided_difference(fn_log(), lam);
  CHECK((t.values - t.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel-extended table branches") {
  const auto t = first_divided_difference_extended(0.5, vec({1.0, 0.0}),
                                                   {false, true});
  CHECK(t.variant == DividedDifferenceFirst::Variant::kernel_extended);
  CHECK(t.values(0, 0) == doctest::Approx(0.5));   // s*lam^(s-1) at lam=1
  CHECK(t.values(0, 1) == doctest::Approx(1.0));   // (1^s - 0)/(1 - 0)
  CHECK(t.values(1, 1) == doctest::Approx(1.0));   // zero/zero pair

  const auto id = first_divided_difference_extended(1.0, vec({2.0, 0.0, 0.7}),
                                                    {false, true, false});
  CHECK((id.values.array() - 1.0).abs().maxCoeff() <= 1e-15);

  const auto mixed = first_divided_difference_extended(0.5, vec({4.0, 0.0}),
                                                       {false, true});
  CHECK(mixed.values(0, 1) == doctest::Approx(0.5));  // (2 - 0)/(4 - 0)

  CHECK_THROWS_AS(
      first_divided_difference_extended(0.5, vec({-0.1, 0.0}), {false, true}),
      DomainError);
  CHECK_THROWS_AS(
      first_divided_difference_extended(0.0, vec({1.0}), {false}),
      DomainError);
  CHECK_THROWS_AS(
      first_divided_difference_extended(1.5, vec({1.0}), {false}),
      DomainError);
}

TEST_CASE("second divided differences: worked tables") {
  const auto sq = second_divided_difference(fn_square(), vec({0.3, 1.1, 2.0}));
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      for (int m = 0; m < 3; ++m) {
        CHECK(sq.at(k, l, m) == doctest::Approx(1.0));
      }
    }
  }

  const auto lin = second_divided_difference(fn_identity(), vec({0.3, 1.1}));
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      for (int m = 0; m < 2; ++m) {
        CHECK(lin.at(k, l, m) == doctest::Approx(0.0));
      }
    }
  }

  const auto lg = second_divided_difference(fn_log(), vec({1.0, 1.0, 1.0}));
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      for (int m = 0; m < 3; ++m) {
        CHECK(lg.at(k, l, m) == doctest::Approx(-0.5));
      }
    }
  }
}

TEST_CASE("second divided difference k<->m symmetry on random spectra") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0.3, 2.5);
  Eigen::VectorXd lam(5);
  for (int i = 0; i < 5; ++i) lam[i] = unif(rng);
  lam[3] = lam[1];  // a planted degeneracy
  const auto t = second_divided_difference(fn_log(), lam);
  for (int k = 0; k < 5; ++k) {
    for (int l = 0; l < 5; ++l) {
      for (int m = 0; m < 5; ++m) {
        CHECK(t.at(k, l, m) == doctest::Approx(t.at(m, l, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("continuity across the degeneracy seam") {
  // Just above the branch switch the quotient must stay within first-order
  // Taylor control of the derivative branch.
  const double lam = 1.0;
  const double delta = 2e-8;  // above kDegeneracyTol * max(1, lam)
  for (const auto& f : {fn_log(), fn_sqrt(), fn_power(0.6)}) {
    const auto t = first_divided_difference(f, vec({lam, lam + delta}));
    CHECK(std::abs(t.values(0, 1) - f.deriv1(lam)) <=
          10.0 * std::abs(f.deriv2(lam)) * delta);
  }
}

TEST_CASE("closed forms for sqrt and 1/sqrt tables") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.05, 4.0);
  Eigen::VectorXd lam(7);
  for (int i = 0; i < 7; ++i) lam[i] = unif(rng);
  const auto ts = first_divided_difference(fn_sqrt(), lam);
  const auto ti = first_divided_difference(fn_invsqrt(), lam);
  for (int k = 0; k < 7; ++k) {
    for (int l = 0; l < 7; ++l) {
      const double closed_s = 1.0 / (std::sqrt(lam[k]) + std::sqrt(lam[l]));
      const double closed_i =
          -1.0 / (std::sqrt(lam[k] * lam[l]) *
                  (std::sqrt(lam[k]) + std::sqrt(lam[l])));
      CHECK(ts.values(k, l) == doctest::Approx(closed_s).epsilon(1e-12));
      CHECK(ti.values(k, l) == doctest::Approx(closed_i).epsilon(1e-12));
    }
  }
}

TEST_CASE("product bound dd_{x^s} dd_{x^{1-s}} <= dd_sqrt^2") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.05, 4.0);
  Eigen::VectorXd lam(6);
  for (int i = 0; i < 6; ++i) lam[i] = unif(rng);
  const auto root = first_divided_difference(fn_sqrt(), lam);
  for (int i = 0; i <= 20; ++i) {
    const double s = double(i) / 20.0;
    const auto a = first_divided_difference(fn_power(s), lam);
    const auto b = first_divided_difference(fn_power(1.0 - s), lam);
    for (int k = 0; k < 6; ++k) {
      for (int l = 0; l < 6; ++l) {
        CHECK(a.values(k, l) * b.values(l, k) <=
              root.values(k, l) * root.values(k, l) + 1e-12);
      }
    }
  }
}

TEST_CASE("divided differences enforce smoothness domains") {
  CHECK_THROWS_AS(first_divided_difference(fn_log(), vec({1.0, -2.0})),
                  DomainError);
  CHECK_THROWS_AS(first_divided_difference(fn_sqrt(), vec({1.0, 0.0})),
                  DomainError);
  CHECK_THROWS_AS(second_divided_difference(fn_log(), vec({0.5, 0.0})),
                  DomainError);
}
