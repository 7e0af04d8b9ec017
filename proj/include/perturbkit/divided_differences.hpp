#pragma once

#include <Eigen/Dense>
#include <vector>

#include "perturbkit/defaults.hpp"
#include "perturbkit/scalar_functions.hpp"

namespace perturbkit {

// First divided-difference table of f over a set of eigenvalues:
//   (f(l_k) - f(l_l)) / (l_k - l_l)  off a degenerate pair,
//   f'((l_k + l_l)/2)                on one.
// The kernel-extended variant (matrix roots on singular operators) instead
// assigns 1 on zero/zero pairs.
struct DividedDifferenceFirst {
  enum class Variant { standard, kernel_extended };

  Eigen::MatrixXd values;      // symmetric
  Eigen::VectorXd eigenvalues;
  Variant variant = Variant::standard;
};

// Second divided-difference tensor, symmetric under k <-> m:
//   (dd1[k,l] - dd1[m,l]) / (l_k - l_m)   l_k != l_m
//   (f'(l_k) - dd1[k,l]) / (l_k - l_l)    l_k == l_m != l_l
//   f''(l_k) / 2                          l_k == l_m == l_l
struct DividedDifferenceSecond {
  int dim = 0;
  std::vector<double> values;  // flat, index (k*dim + l)*dim + m
  Eigen::VectorXd eigenvalues;

  double at(int k, int l, int m) const {
    return values[static_cast<size_t>((k * dim + l) * dim + m)];
  }
};

// Relative closeness rule shared by every degeneracy decision:
// |a - b| <= tol * max(1, |a|, |b|).
bool eigenvalues_close(double a, double b, double tol);

DividedDifferenceFirst first_divided_difference(
    const ScalarFunctionSpec& f, const Eigen::VectorXd& eigenvalues,
    double degeneracy_tol = defaults::kDegeneracyTol);

// Extended table for f(x) = x^s, s in (0, 1], over nonnegative eigenvalues
// with kernel entries flagged. Branches: quotient on distinct pairs,
// s*l^(s-1) on equal positive pairs, 1 on zero/zero pairs.
DividedDifferenceFirst first_divided_difference_extended(
    double s, const Eigen::VectorXd& eigenvalues,
    const std::vector<bool>& is_zero,
    double degeneracy_tol = defaults::kDegeneracyTol);

DividedDifferenceSecond second_divided_difference(
    const ScalarFunctionSpec& f, const Eigen::VectorXd& eigenvalues,
    double degeneracy_tol = defaults::kDegeneracyTol);

// Single second divided-difference entry, with the first-difference table
// precomputed; used to contract the second directional derivative without
// materializing the dim^3 tensor.
double second_divided_difference_entry(const ScalarFunctionSpec& f,
                                       const Eigen::VectorXd& eigenvalues,
                                       const Eigen::MatrixXd& dd1, int k,
                                       int l, int m, double degeneracy_tol);

}  // namespace perturbkit
