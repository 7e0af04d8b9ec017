#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "perturbkit/divided_differences.hpp"
#include "perturbkit/hermitian.hpp"

namespace perturbkit {

// A truncated operator series together with its per-order terms and the
// residual exponent the underlying theorem claims for it.
struct ExpansionResult {
  int order = 0;
  HermitianOperator value;
  std::vector<HermitianOperator> terms;
  double claimed_residual_exponent = 0.0;
};

// Frechet derivative L_f(A, E) = U (dd1_f o U^dag E U) U^dag, the directional
// derivative of the primary matrix function f at A in direction E.
HermitianOperator frechet_derivative(
    const SpectralData& A, const HermitianOperator& E,
    const ScalarFunctionSpec& f,
    double degeneracy_tol = defaults::kDegeneracyTol);

// Second directional derivative, contracted in the eigenbasis:
//   D2_f(A,E)[k,m] = 2 sum_l dd2_f[k,l,m] E^[k,l] E^[l,m].
// Fixed ascending summation order keeps results bit-stable.
HermitianOperator second_directional_derivative(
    const SpectralData& A, const HermitianOperator& E,
    const ScalarFunctionSpec& f,
    double degeneracy_tol = defaults::kDegeneracyTol);

// Daleckii-Krein expansion of f(A + E) truncated at `order` (0, 1 or 2);
// claimed residual exponent is order + 1.
ExpansionResult dk_expand(const SpectralData& A, const HermitianOperator& E,
                          const ScalarFunctionSpec& f, int order,
                          double degeneracy_tol = defaults::kDegeneracyTol);

// First-order expansion of (A + E)^s for singular PSD A, s in (0,1), via the
// kernel-extended divided-difference table. With use_schur the kernel block
// is the Schur complement D - C^dag (L+ + B)^{-1} C raised to s (claimed
// exponent min(1+s, 3s)); otherwise D^s is used directly (claimed exponent
// 1+s from the block-wise bounds). The hypothesis |E|^2/|E_D| = O(|E|) is
// the caller's responsibility; |E_D| < 0.1 |E| only appends a warning.
ExpansionResult singular_root_expansion(
    const SpectralData& A, const HermitianOperator& E, double s,
    bool use_schur, std::vector<std::string>* warnings = nullptr,
    double degeneracy_tol = defaults::kDegeneracyTol);

// First-order expansion of |X + Z| for PSD X with a kernel and a general
// (not necessarily Hermitian) square Z, in X's eigenbasis:
//   |X| + [[dd1_sqrt(sigma^2) o (S Z11 + Z11^dag S), Z12], [Z12^dag, |Z22|]]
// with |Z22| computed exactly as sqrt(Z22^dag Z22). Claimed exponent 3/2.
ExpansionResult modulus_expansion(const SpectralData& X,
                                  const Eigen::MatrixXcd& Z);

// PSD power through the eigendecomposition; negative rounding eigenvalues
// are clamped at 0. Used for matrix roots of kernel blocks.
Eigen::MatrixXcd psd_power(const Eigen::MatrixXcd& M, double exponent,
                           double psd_tol = defaults::kPsdTol);

}  // namespace perturbkit
