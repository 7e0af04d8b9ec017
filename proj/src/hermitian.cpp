#include "perturbkit/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "perturbkit/scalar_functions.hpp"

namespace perturbkit {

namespace {

double max_entry_modulus(const Eigen::MatrixXcd& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator::HermitianOperator(Eigen::MatrixXcd entries, double herm_tol)
    : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols()) {
    std::ostringstream msg;
    msg << "HermitianOperator: matrix is " << mat_.rows() << "x" << mat_.cols()
        << ", expected square";
    throw DimensionMismatchError(msg.str());
  }
  if (mat_.rows() < 1) {
    throw DimensionMismatchError("HermitianOperator: dim must be >= 1");
  }
  if (!mat_.allFinite()) {
    throw NotHermitianError("HermitianOperator: entries contain NaN or Inf");
  }
  const double scale = max_entry_modulus(mat_);
  const double dev = max_entry_modulus(mat_ - mat_.adjoint());
  if (dev > herm_tol * scale) {
    std::ostringstream msg;
    msg << "HermitianOperator: max |A - A^dag| entry " << dev
        << " exceeds tolerance " << herm_tol << " * " << scale;
    throw NotHermitianError(msg.str());
  }
  mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

HermitianOperator HermitianOperator::Zero(int dim) {
  return HermitianOperator(Eigen::MatrixXcd::Zero(dim, dim));
}

HermitianOperator HermitianOperator::Identity(int dim) {
  return HermitianOperator(Eigen::MatrixXcd::Identity(dim, dim));
}

std::vector<int> SpectralData::support_first_order() const {
  std::vector<int> order;
  order.reserve(eigenvalues.size());
  order.insert(order.end(), support_indices.begin(), support_indices.end());
  order.insert(order.end(), kernel_indices.begin(), kernel_indices.end());
  return order;
}

Eigen::MatrixXcd SpectralData::basis_support_first() const {
  const auto order = support_first_order();
  Eigen::MatrixXcd U(eigenvectors.rows(), eigenvectors.cols());
  for (int j = 0; j < static_cast<int>(order.size()); ++j) {
    U.col(j) = eigenvectors.col(order[j]);
  }
  return U;
}

Eigen::VectorXd SpectralData::eigenvalues_support_first() const {
  const auto order = support_first_order();
  Eigen::VectorXd lam(eigenvalues.size());
  for (int j = 0; j < static_cast<int>(order.size()); ++j) {
    lam[j] = eigenvalues[order[j]];
  }
  return lam;
}

Eigen::VectorXd SpectralData::support_eigenvalues() const {
  Eigen::VectorXd lam(support_indices.size());
  for (int j = 0; j < static_cast<int>(support_indices.size()); ++j) {
    lam[j] = eigenvalues[support_indices[j]];
  }
  return lam;
}

Eigen::MatrixXcd SpectralData::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

Eigen::MatrixXcd SpectralData::rotate_in(const Eigen::MatrixXcd& E) const {
  return eigenvectors.adjoint() * E * eigenvectors;
}

SpectralData SpectralData::diagonal(const Eigen::VectorXd& eigs,
                                    double zero_threshold) {
  const int n = static_cast<int>(eigs.size());
  for (int i = 1; i < n; ++i) {
    if (eigs[i] < eigs[i - 1]) {
      throw Error("SpectralData::diagonal: eigenvalues must be ascending");
    }
  }
  SpectralData out;
  out.eigenvalues = eigs;
  out.eigenvectors = Eigen::MatrixXcd::Identity(n, n);
  const double thr =
      zero_threshold * std::max(1.0, eigs.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    if (std::abs(eigs[i]) <= thr) {
      out.kernel_indices.push_back(i);
    } else {
      out.support_indices.push_back(i);
    }
  }
  return out;
}

SpectralData eigendecompose(const HermitianOperator& A, double zero_threshold) {
  const int n = A.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(A.matrix());
  if (solver.info() != Eigen::Success) {
    const double norm = hs_norm(A);
    throw EigensolverError(
        "eigendecompose: solver failed to converge (dim=" +
            std::to_string(n) + ", ||A||_HS=" + std::to_string(norm) + ")",
        n, norm > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  }

  SpectralData out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  const double lam_max = out.eigenvalues.cwiseAbs().maxCoeff();
  const double ortho_dev =
      ((out.eigenvectors.adjoint() * out.eigenvectors -
        Eigen::MatrixXcd::Identity(n, n))
           .cwiseAbs())
          .maxCoeff();
  const double recon_err = (out.reconstruct() - A.matrix()).norm();
  const double recon_rel = recon_err / std::max(1e-300, A.matrix().norm());
  if (ortho_dev > defaults::kSpectralTol ||
      (A.matrix().norm() > 0 && recon_rel > defaults::kSpectralTol)) {
    const double lam_min_abs = out.eigenvalues.cwiseAbs().minCoeff();
    const double cond = lam_max / std::max(lam_min_abs, 1e-300);
    throw EigensolverError(
        "eigendecompose: spectral invariants violated (dim=" +
            std::to_string(n) + ", cond~" + std::to_string(cond) + ")",
        n, cond);
  }

  const double thr = zero_threshold * std::max(1.0, lam_max);
  for (int i = 0; i < n; ++i) {
    if (std::abs(out.eigenvalues[i]) <= thr) {
      out.kernel_indices.push_back(i);
    } else {
      out.support_indices.push_back(i);
    }
  }
  return out;
}

double hs_norm(const HermitianOperator& A) { return A.matrix().norm(); }

double hs_norm(const Eigen::MatrixXcd& A) { return A.norm(); }

Eigen::MatrixXcd BlockDecomposition::assemble_in_basis() const {
  const int r = static_cast<int>(B.rows());
  const int k = static_cast<int>(D.rows());
  Eigen::MatrixXcd M(r + k, r + k);
  M.topLeftCorner(r, r) = B;
  M.topRightCorner(r, k) = C;
  M.bottomLeftCorner(k, r) = C.adjoint();
  M.bottomRightCorner(k, k) = D;
  return M;
}

Eigen::MatrixXcd BlockDecomposition::assemble() const {
  const Eigen::MatrixXcd U = basis.basis_support_first();
  return U * assemble_in_basis() * U.adjoint();
}

BlockDecomposition block_decompose(const HermitianOperator& E,
                                   const SpectralData& basis) {
  if (E.dim() != basis.dim()) {
    throw DimensionMismatchError(
        "block_decompose: operator dim " + std::to_string(E.dim()) +
        " != basis dim " + std::to_string(basis.dim()));
  }
  if (basis.support_indices.empty()) {
    throw Error("block_decompose: basis has empty support");
  }
  const Eigen::MatrixXcd U = basis.basis_support_first();
  const Eigen::MatrixXcd Ehat = U.adjoint() * E.matrix() * U;
  const int r = basis.rank();
  const int k = basis.kernel_dim();

  BlockDecomposition out;
  out.B = Ehat.topLeftCorner(r, r);
  out.C = Ehat.topRightCorner(r, k);
  out.D = Ehat.bottomRightCorner(k, k);
  out.basis = basis;
  return out;
}

HermitianOperator apply_function(const SpectralData& spectral,
                                 const ScalarFunctionSpec& f) {
  const int n = spectral.dim();
  Eigen::VectorXd fx(n);
  std::vector<bool> kernel(n, false);
  for (int idx : spectral.kernel_indices) kernel[idx] = true;
  for (int i = 0; i < n; ++i) {
    fx[i] = f.value_at_eigenvalue(spectral.eigenvalues[i], kernel[i]);
  }
  Eigen::MatrixXcd M = spectral.eigenvectors * fx.asDiagonal() *
                       spectral.eigenvectors.adjoint();
  return hermitize_checked(M);
}

HermitianOperator apply_function_exact(const HermitianOperator& A,
                                       const ScalarFunctionSpec& f,
                                       double zero_threshold) {
  return apply_function(eigendecompose(A, zero_threshold), f);
}

HermitianOperator hermitize_checked(const Eigen::MatrixXcd& M,
                                    double rel_tol) {
  const double asym = (M - M.adjoint()).norm();
  const double scale = std::max(1.0, M.norm());
  if (asym > rel_tol * scale) {
    std::ostringstream msg;
    msg << "hermitize_checked: asymmetry " << asym << " on scale " << scale
        << " exceeds " << rel_tol;
    throw InternalConsistencyError(msg.str());
  }
  return HermitianOperator(0.5 * (M + M.adjoint().eval()),
                           /*herm_tol=*/1.0);
}

}  // namespace perturbkit
