#include "perturbkit/exact_oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace perturbkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mass a state places outside the support of another's spectral data;
// leakage beyond this is a genuine support violation, not rounding.
constexpr double kSupportLeakTol = 1e-10;

// U diag(lambda^s) U^dag with 0^s := 0 on the (already clamped) kernel.
Eigen::MatrixXcd state_power(const DensityMatrix& rho, double s) {
  const SpectralData& sd = rho.spectral();
  Eigen::VectorXd powered = Eigen::VectorXd::Zero(sd.dim());
  for (int idx : sd.support_indices) {
    powered[idx] = std::pow(sd.eigenvalues[idx], s);
  }
  Eigen::MatrixXcd M =
      sd.eigenvectors * powered.asDiagonal() * sd.eigenvectors.adjoint();
  return 0.5 * (M + M.adjoint().eval());
}

double kernel_mass(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  double leak = 0.0;
  for (int j : rho2.spectral().kernel_indices) {
    const Eigen::VectorXcd v = rho2.spectral().eigenvectors.col(j);
    leak += (v.adjoint() * rho1.op().matrix() * v)(0, 0).real();
  }
  return leak;
}

double golden_section_max(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (int idx : rho.spectral().support_indices) {
    const double lam = rho.spectral().eigenvalues[idx];
    s -= lam * std::log(lam);
  }
  return s;
}

double quantum_relative_entropy(const DensityMatrix& rho1,
                                const DensityMatrix& rho2) {
  if (kernel_mass(rho1, rho2) > kSupportLeakTol) return kInf;

  double term1 = 0.0;
  for (int idx : rho1.spectral().support_indices) {
    const double lam = rho1.spectral().eigenvalues[idx];
    term1 += lam * std::log(lam);
  }
  double term2 = 0.0;
  for (int j : rho2.spectral().support_indices) {
    const Eigen::VectorXcd v = rho2.spectral().eigenvectors.col(j);
    const double weight = (v.adjoint() * rho1.op().matrix() * v)(0, 0).real();
    term2 += weight * std::log(rho2.spectral().eigenvalues[j]);
  }
  return term1 - term2;
}

double chernoff_exponent_s(const DensityMatrix& rho1,
                           const DensityMatrix& rho2, double s) {
  if (s < 0.0 || s > 1.0) {
    throw Error("chernoff_exponent_s: s must lie in [0, 1]");
  }
  const double trace =
      (state_power(rho1, s) * state_power(rho2, 1.0 - s)).trace().real();
  if (trace <= 0.0) {
    if (trace > -1e-12) return kInf;  // perfectly distinguishable states
    throw InternalConsistencyError(
        "chernoff_exponent_s: Tr[rho1^s rho2^(1-s)] = " +
        std::to_string(trace) + " < 0 for valid states");
  }
  return -std::log(trace);
}

ChernoffBound chernoff_bound(const DensityMatrix& rho1,
                             const DensityMatrix& rho2, double tol_s) {
  auto xi = [&](double s) { return chernoff_exponent_s(rho1, rho2, s); };

  constexpr int kGridPoints = 21;
  std::vector<double> values(kGridPoints);
  int best = 0;
  double vmin = kInf;
  for (int i = 0; i < kGridPoints; ++i) {
    const double s = double(i) / (kGridPoints - 1);
    values[i] = xi(s);
    vmin = std::min(vmin, values[i]);
    const double s_best = double(best) / (kGridPoints - 1);
    if (values[i] > values[best] ||
        (values[i] == values[best] &&
         std::abs(s - 0.5) < std::abs(s_best - 0.5))) {
      best = i;
    }
  }
  // Flat profile (identical states): tie-break to the Bhattacharyya point.
  if (std::isfinite(values[best]) &&
      values[best] - vmin <= 1e-15 * std::max(1.0, std::abs(values[best]))) {
    return {xi(0.5), 0.5};
  }
  const double s_best = double(best) / (kGridPoints - 1);
  if (!std::isfinite(values[best])) return {kInf, s_best};

  const double lo = std::max(0.0, s_best - 1.0 / (kGridPoints - 1));
  const double hi = std::min(1.0, s_best + 1.0 / (kGridPoints - 1));
  const double s_star = golden_section_max(xi, lo, hi, tol_s);
  return {xi(s_star), s_star};
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const Eigen::MatrixXcd sq1 = state_power(rho1, 0.5);
  Eigen::MatrixXcd M = sq1 * rho2.op().matrix() * sq1;
  M = 0.5 * (M + M.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M);
  if (solver.info() != Eigen::Success) {
    throw EigensolverError("fidelity: inner eigensolve failed", rho1.dim(),
                           0.0);
  }
  double root_sum = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    root_sum += std::sqrt(std::max(0.0, solver.eigenvalues()[i]));
  }
  const double F = root_sum * root_sum;
  if (F > 1.0 + 1e-10) {
    throw InternalConsistencyError("fidelity: value " + std::to_string(F) +
                                   " exceeds 1 beyond rounding");
  }
  return F;
}

double tsallis_entropy(const DensityMatrix& rho, double q) {
  if (q == 1.0 || q <= 0.0) {
    throw Error(
        "tsallis_entropy: q must lie in (0,1) or (1,inf); use the von "
        "Neumann entropy for q = 1");
  }
  const double trace = state_power(rho, q).trace().real();
  return (trace - 1.0) / (1.0 - q);
}

double tsallis_relative_entropy(const DensityMatrix& rho1,
                                const DensityMatrix& rho2, double q) {
  if (q == 1.0 || q <= 0.0) {
    throw Error(
        "tsallis_relative_entropy: q must lie in (0,1) or (1,inf); use the "
        "quantum relative entropy for q = 1");
  }
  if (kernel_mass(rho1, rho2) > kSupportLeakTol) return kInf;
  const double trace =
      (state_power(rho1, q) * state_power(rho2, 1.0 - q)).trace().real();
  return (1.0 - trace) / (1.0 - q);
}

double bures_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return 2.0 * (1.0 - std::sqrt(fidelity(rho1, rho2)));
}

}  // namespace perturbkit
