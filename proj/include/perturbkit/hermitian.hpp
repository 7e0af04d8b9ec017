#pragma once

#include <Eigen/Dense>
#include <vector>

#include "perturbkit/defaults.hpp"
#include "perturbkit/errors.hpp"

namespace perturbkit {

class ScalarFunctionSpec;

// Dense complex Hermitian matrix, the common currency of all calculus here.
// Construction checks hermiticity to a relative tolerance and symmetrizes the
// input, so downstream code can rely on exact A == A^dag.
class HermitianOperator {
public:
  explicit HermitianOperator(Eigen::MatrixXcd entries,
                             double herm_tol = defaults::kHermTol);

  static HermitianOperator Zero(int dim);
  static HermitianOperator Identity(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  double trace() const { return mat_.trace().real(); }

private:
  Eigen::MatrixXcd mat_;
};

// Eigenvalues and orthonormal eigenbasis of a Hermitian operator, with the
// index set split into support (nonzero eigenvalues) and kernel.
struct SpectralData {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns are eigenvectors
  std::vector<int> support_indices;
  std::vector<int> kernel_indices;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  int rank() const { return static_cast<int>(support_indices.size()); }
  int kernel_dim() const { return static_cast<int>(kernel_indices.size()); }
  bool has_kernel() const { return !kernel_indices.empty(); }

  // Index permutation listing support indices first, then kernel indices.
  std::vector<int> support_first_order() const;
  // Eigenvector columns permuted support-first.
  Eigen::MatrixXcd basis_support_first() const;
  // Eigenvalues permuted support-first (kernel entries as stored).
  Eigen::VectorXd eigenvalues_support_first() const;
  // Support eigenvalues only, ascending.
  Eigen::VectorXd support_eigenvalues() const;

  Eigen::MatrixXcd reconstruct() const;
  // Rotate E into this eigenbasis: U^dag E U.
  Eigen::MatrixXcd rotate_in(const Eigen::MatrixXcd& E) const;

  // Spectral data of a diagonal operator in the standard basis.
  static SpectralData diagonal(const Eigen::VectorXd& eigenvalues_ascending,
                               double zero_threshold = defaults::kZeroThreshold);
};

// B = support block, C = support/kernel coupling, D = kernel block of an
// operator expressed in a reference eigenbasis, ordered support-first.
struct BlockDecomposition {
  Eigen::MatrixXcd B;  // r x r, Hermitian
  Eigen::MatrixXcd C;  // r x (dim - r)
  Eigen::MatrixXcd D;  // (dim - r) x (dim - r), Hermitian
  SpectralData basis;

  // [[B, C], [C^dag, D]] in the support-first basis ordering.
  Eigen::MatrixXcd assemble_in_basis() const;
  // The decomposed operator back in the original (standard) basis.
  Eigen::MatrixXcd assemble() const;
};

SpectralData eigendecompose(const HermitianOperator& A,
                            double zero_threshold = defaults::kZeroThreshold);

double hs_norm(const HermitianOperator& A);
double hs_norm(const Eigen::MatrixXcd& A);

BlockDecomposition block_decompose(const HermitianOperator& E,
                                   const SpectralData& basis);

// f applied eigenvalue-wise: U diag(f(lambda_i)) U^dag. Kernel-classified
// eigenvalues use the function's zero convention (e.g. 0*log 0 := 0) and
// raise a domain error when the function has none.
HermitianOperator apply_function_exact(
    const HermitianOperator& A, const ScalarFunctionSpec& f,
    double zero_threshold = defaults::kZeroThreshold);

HermitianOperator apply_function(const SpectralData& spectral,
                                 const ScalarFunctionSpec& f);

// Symmetrize a matrix that should be Hermitian up to rounding; relative
// asymmetry beyond rel_tol raises InternalConsistencyError.
HermitianOperator hermitize_checked(const Eigen::MatrixXcd& M,
                                    double rel_tol = defaults::kHermitizeTol);

}  // namespace perturbkit
