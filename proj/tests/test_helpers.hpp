#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

// Shared generators for the unit suites. These are test-local on purpose:
// the library's seeded generators are themselves under test.

inline Eigen::MatrixXcd test_random_hermitian(int n, unsigned seed,
                                              double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd H(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = scale * gauss(rng);
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> z(gauss(rng), gauss(rng));
      H(i, j) = scale * z / std::sqrt(2.0);
      H(j, i) = std::conj(H(i, j));
    }
  }
  return H;
}

// Hermitian with spectrum drawn uniformly from [lo, hi].
inline Eigen::MatrixXcd test_random_posdef(int n, unsigned seed,
                                           double lo = 0.5, double hi = 1.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      G(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam[i] = unif(rng);
  Eigen::MatrixXcd A = Q * lam.asDiagonal() * Q.adjoint();
  return 0.5 * (A + A.adjoint().eval());
}

inline double test_max_abs(const Eigen::MatrixXcd& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}
