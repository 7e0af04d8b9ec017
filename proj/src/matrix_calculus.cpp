#include "perturbkit/matrix_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perturbkit {

namespace {

void require_same_dim(const SpectralData& A, int other_dim,
                      const char* where) {
  if (A.dim() != other_dim) {
    std::ostringstream msg;
    msg << where << ": spectral dim " << A.dim() << " != operator dim "
        << other_dim;
    throw DimensionMismatchError(msg.str());
  }
}

Eigen::MatrixXcd hadamard(const Eigen::MatrixXd& real_table,
                          const Eigen::MatrixXcd& M) {
  return real_table.cast<std::complex<double>>().cwiseProduct(M);
}

}  // namespace

Eigen::MatrixXcd psd_power(const Eigen::MatrixXcd& M, double exponent,
                           double psd_tol) {
  if (M.rows() == 0) return M;
  const HermitianOperator H = hermitize_checked(M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.matrix());
  if (solver.info() != Eigen::Success) {
    throw EigensolverError("psd_power: eigensolver failed",
                           static_cast<int>(M.rows()), 0.0);
  }
  const Eigen::VectorXd lam = solver.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  Eigen::VectorXd powered(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -psd_tol * scale) {
      std::ostringstream msg;
      msg << "psd_power: eigenvalue " << lam[i]
          << " is negative; matrix root undefined";
      throw NotPsdError(msg.str());
    }
    const double clamped = std::max(lam[i], 0.0);
    powered[i] = clamped == 0.0 ? 0.0 : std::pow(clamped, exponent);
  }
  return solver.eigenvectors() * powered.asDiagonal() *
         solver.eigenvectors().adjoint();
}

HermitianOperator frechet_derivative(const SpectralData& A,
                                     const HermitianOperator& E,
                                     const ScalarFunctionSpec& f,
                                     double degeneracy_tol) {
  require_same_dim(A, E.dim(), "frechet_derivative");
  const DividedDifferenceFirst dd1 =
      first_divided_difference(f, A.eigenvalues, degeneracy_tol);
  const Eigen::MatrixXcd Ehat = A.rotate_in(E.matrix());
  const Eigen::MatrixXcd M = A.eigenvectors * hadamard(dd1.values, Ehat) *
                             A.eigenvectors.adjoint();
  return hermitize_checked(M);
}

HermitianOperator second_directional_derivative(const SpectralData& A,
                                                const HermitianOperator& E,
                                                const ScalarFunctionSpec& f,
                                                double degeneracy_tol) {
  require_same_dim(A, E.dim(), "second_directional_derivative");
  const int n = A.dim();
  const Eigen::VectorXd& lam = A.eigenvalues;
  const DividedDifferenceFirst dd1 =
      first_divided_difference(f, lam, degeneracy_tol);
  const Eigen::MatrixXcd Ehat = A.rotate_in(E.matrix());

  // D2[k,m] = 2 sum_l dd2[k,l,m] E^[k,l] E^[l,m]; l runs in ascending order
  // so the summation is bit-stable.
  Eigen::MatrixXcd D2hat(n, n);
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) {
      std::complex<double> acc(0.0, 0.0);
      for (int l = 0; l < n; ++l) {
        const double w = second_divided_difference_entry(
            f, lam, dd1.values, k, l, m, degeneracy_tol);
        acc += w * Ehat(k, l) * Ehat(l, m);
      }
      D2hat(k, m) = 2.0 * acc;
    }
  }
  const Eigen::MatrixXcd M =
      A.eigenvectors * D2hat * A.eigenvectors.adjoint();
  return hermitize_checked(M);
}

ExpansionResult dk_expand(const SpectralData& A, const HermitianOperator& E,
                          const ScalarFunctionSpec& f, int order,
                          double degeneracy_tol) {
  if (order < 0 || order > 2) {
    throw Error("dk_expand: order must be 0, 1 or 2, got " +
                std::to_string(order));
  }
  require_same_dim(A, E.dim(), "dk_expand");

  ExpansionResult out{order, apply_function(A, f), {}, double(order) + 1.0};
  out.terms.push_back(out.value);
  if (order >= 1) {
    out.terms.push_back(frechet_derivative(A, E, f, degeneracy_tol));
  }
  if (order >= 2) {
    const HermitianOperator d2 =
        second_directional_derivative(A, E, f, degeneracy_tol);
    out.terms.push_back(HermitianOperator(0.5 * d2.matrix()));
  }
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(A.dim(), A.dim());
  for (const auto& term : out.terms) sum += term.matrix();
  out.value = HermitianOperator(sum);
  return out;
}

ExpansionResult singular_root_expansion(const SpectralData& A,
                                        const HermitianOperator& E, double s,
                                        bool use_schur,
                                        std::vector<std::string>* warnings,
                                        double degeneracy_tol) {
  require_same_dim(A, E.dim(), "singular_root_expansion");
  if (!A.has_kernel()) {
    throw Error("singular_root_expansion: operator has no kernel");
  }
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError("singular_root_expansion: s must lie in (0,1), got " +
                      std::to_string(s));
  }

  const int r = A.rank();
  const int k = A.kernel_dim();
  const Eigen::MatrixXcd U = A.basis_support_first();
  const Eigen::MatrixXcd Ehat = U.adjoint() * E.matrix() * U;
  const Eigen::MatrixXcd B = Ehat.topLeftCorner(r, r);
  const Eigen::MatrixXcd C = Ehat.topRightCorner(r, k);
  const Eigen::MatrixXcd D = Ehat.bottomRightCorner(k, k);

  const double norm_e = E.matrix().norm();
  const double norm_d = D.norm();
  if (warnings != nullptr && norm_e > 0.0) {
    if (norm_d < 0.1 * norm_e) {
      std::ostringstream msg;
      msg << "singular_root_expansion: |E_D| = " << norm_d << " < 0.1 |E| = "
          << 0.1 * norm_e
          << "; the residual-control hypothesis |E|^2/|E_D| = O(|E|) looks "
             "marginal";
      warnings->push_back(msg.str());
    }
  }

  Eigen::MatrixXcd kernel_block = D;
  if (use_schur) {
    Eigen::MatrixXcd M =
        A.support_eigenvalues().cast<std::complex<double>>().asDiagonal();
    M += B;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible()) {
      throw Error(
          "singular_root_expansion: Lambda+ + B is singular; Schur "
          "complement undefined");
    }
    kernel_block = D - C.adjoint() * lu.solve(C);
  }
  const Eigen::MatrixXcd kernel_root = psd_power(kernel_block, s);

  Eigen::VectorXd lam_sf(r + k);
  std::vector<bool> is_zero(r + k, false);
  lam_sf.head(r) = A.support_eigenvalues();
  for (int i = 0; i < k; ++i) {
    lam_sf[r + i] = 0.0;
    is_zero[r + i] = true;
  }
  const DividedDifferenceFirst dd =
      first_divided_difference_extended(s, lam_sf, is_zero, degeneracy_tol);

  Eigen::MatrixXcd inner(r + k, r + k);
  inner.topLeftCorner(r, r) = B;
  inner.topRightCorner(r, k) = C;
  inner.bottomLeftCorner(k, r) = C.adjoint();
  inner.bottomRightCorner(k, k) = kernel_root;

  const HermitianOperator zeroth = apply_function(A, fn_power(s));
  const HermitianOperator correction =
      hermitize_checked(U * hadamard(dd.values, inner) * U.adjoint());

  return ExpansionResult{
      1, HermitianOperator(zeroth.matrix() + correction.matrix()),
      {zeroth, correction},
      use_schur ? std::min(1.0 + s, 3.0 * s) : 1.0 + s};
}

ExpansionResult modulus_expansion(const SpectralData& X,
                                  const Eigen::MatrixXcd& Z) {
  if (Z.rows() != Z.cols()) {
    throw DimensionMismatchError("modulus_expansion: Z is not square");
  }
  require_same_dim(X, static_cast<int>(Z.rows()), "modulus_expansion");
  const double lam_scale = std::max(1.0, X.eigenvalues.cwiseAbs().maxCoeff());
  if (X.eigenvalues.minCoeff() < -defaults::kPsdTol * lam_scale) {
    throw NotPsdError("modulus_expansion: X must be PSD");
  }

  const int r = X.rank();
  const int k = X.kernel_dim();
  const Eigen::MatrixXcd U = X.basis_support_first();
  const Eigen::MatrixXcd Zhat = U.adjoint() * Z * U;
  const Eigen::MatrixXcd Z11 = Zhat.topLeftCorner(r, r);
  const Eigen::MatrixXcd Z12 = Zhat.topRightCorner(r, k);
  const Eigen::MatrixXcd Z22 = Zhat.bottomRightCorner(k, k);

  // |X| through the spectrum; PSD noise on the kernel folds to ~0.
  Eigen::VectorXd abs_sf = X.eigenvalues_support_first().cwiseAbs();
  const HermitianOperator absX =
      hermitize_checked(U * abs_sf.asDiagonal() * U.adjoint());

  const Eigen::VectorXd sigma = X.support_eigenvalues();
  const Eigen::VectorXd sigma_sq = sigma.cwiseProduct(sigma);
  const DividedDifferenceFirst dd = first_divided_difference(
      fn_sqrt(), sigma_sq, defaults::kDegeneracyTol);

  const Eigen::MatrixXcd sliding =
      sigma.cast<std::complex<double>>().asDiagonal() * Z11 +
      Z11.adjoint() *
          Eigen::MatrixXcd(sigma.cast<std::complex<double>>().asDiagonal());

  Eigen::MatrixXcd inner(r + k, r + k);
  inner.topLeftCorner(r, r) = hadamard(dd.values, sliding);
  inner.topRightCorner(r, k) = Z12;
  inner.bottomLeftCorner(k, r) = Z12.adjoint();
  inner.bottomRightCorner(k, k) = psd_power(Z22.adjoint() * Z22, 0.5);

  const HermitianOperator correction =
      hermitize_checked(U * inner * U.adjoint());

  return ExpansionResult{
      1, HermitianOperator(absX.matrix() + correction.matrix()),
      {absX, correction}, 1.5};
}

}  // namespace perturbkit
