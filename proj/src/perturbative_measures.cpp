#include "perturbkit/perturbative_measures.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "perturbkit/exact_oracle.hpp"

namespace perturbkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_preserving(const StatePerturbation& nu, const char* where) {
  if (nu.classification() != SupportClass::preserving) {
    throw ClassificationError(
        std::string(where) +
        ": perturbation is support-extending; use the support-extending "
        "(_se) expansion path");
  }
}

void require_extending_or_zero(const StatePerturbation& nu,
                               const char* where) {
  if (nu.norm() > 0.0 &&
      nu.classification() != SupportClass::extending) {
    throw ClassificationError(
        std::string(where) +
        ": perturbation is support-preserving; use the support-preserving "
        "(_sp) expansion path");
  }
}

// Spectrum of rho0 restricted to its support, as a diagonal operator in the
// support-first basis ordering. All downstream tables then see strictly
// positive eigenvalues.
SpectralData support_spectral(const DensityMatrix& rho0) {
  return SpectralData::diagonal(rho0.spectral().support_eigenvalues());
}

HermitianOperator block_operator(const Eigen::MatrixXcd& block) {
  return HermitianOperator(block);
}

double real_trace_product(const Eigen::MatrixXcd& A,
                          const Eigen::MatrixXcd& B) {
  return (A * B).trace().real();
}

void warn_residual_hypothesis(const StatePerturbation& nu, const char* where,
                              std::vector<std::string>* warnings) {
  if (warnings == nullptr) return;
  const double norm = nu.norm();
  if (norm == 0.0) {
    warnings->push_back(std::string(where) +
                        ": nu = 0, residual-control hypothesis is vacuous");
    return;
  }
  const double norm_d = nu.blocks().D.norm();
  if (norm_d < 0.1 * norm) {
    std::ostringstream msg;
    msg << where << ": |nu_D| = " << norm_d << " < 0.1 |nu| = " << 0.1 * norm
        << "; hypothesis |nu|^2/|nu_D| = O(|nu|) looks marginal";
    warnings->push_back(msg.str());
  }
}

struct KernelSpectrum {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd values;   // clamped at 0
  std::vector<bool> zero;   // relative zero classification
};

KernelSpectrum decompose_kernel_block(const Eigen::MatrixXcd& D,
                                      const char* where) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      0.5 * (D + D.adjoint().eval()));
  if (solver.info() != Eigen::Success) {
    throw EigensolverError(std::string(where) + ": kernel-block eigensolve "
                           "failed", static_cast<int>(D.rows()), 0.0);
  }
  KernelSpectrum out;
  out.vectors = solver.eigenvectors();
  out.values = solver.eigenvalues();
  const double scale =
      std::max(1.0, out.values.size() ? out.values.cwiseAbs().maxCoeff() : 0.0);
  out.zero.assign(out.values.size(), false);
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    if (out.values[i] < -defaults::kPsdTol * scale) {
      throw NotPsdError(std::string(where) + ": nu_D eigenvalue " +
                        std::to_string(out.values[i]) +
                        " is negative; matrix root/log undefined");
    }
    if (out.values[i] <= defaults::kZeroThreshold * scale) {
      out.values[i] = 0.0;
      out.zero[i] = true;
    }
  }
  return out;
}

}  // namespace

ExpansionResult dk_expand_state(const PerturbationScenario& scenario,
                                const ScalarFunctionSpec& f, int order) {
  require_preserving(scenario.nu1, "dk_expand_state");
  const DensityMatrix& rho0 = scenario.rho0;
  const SpectralData sup = support_spectral(rho0);
  const HermitianOperator nu_b = block_operator(scenario.nu1.blocks().B);

  const ExpansionResult on_support = dk_expand(sup, nu_b, f, order);

  const int r = rho0.rank();
  const int k = rho0.dim() - r;
  const Eigen::MatrixXcd U = rho0.spectral().basis_support_first();
  // Kernel sector: f(0) by the zero convention on the zeroth term, nothing
  // from the derivative terms (nu vanishes there).
  const double f_at_kernel =
      k > 0 ? f.value_at_eigenvalue(0.0, true) : 0.0;

  std::vector<HermitianOperator> terms;
  terms.reserve(on_support.terms.size());
  for (size_t i = 0; i < on_support.terms.size(); ++i) {
    Eigen::MatrixXcd inner = Eigen::MatrixXcd::Zero(r + k, r + k);
    inner.topLeftCorner(r, r) = on_support.terms[i].matrix();
    if (i == 0 && k > 0 && f_at_kernel != 0.0) {
      inner.bottomRightCorner(k, k) =
          f_at_kernel * Eigen::MatrixXcd::Identity(k, k);
    }
    terms.push_back(hermitize_checked(U * inner * U.adjoint()));
  }
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(r + k, r + k);
  for (const auto& term : terms) sum += term.matrix();
  return ExpansionResult{order, HermitianOperator(std::move(sum)),
                         std::move(terms), double(order) + 1.0};
}

double entropy_sp(const PerturbationScenario& scenario) {
  require_preserving(scenario.nu1, "entropy_sp");
  const DensityMatrix& rho0 = scenario.rho0;
  const SpectralData sup = support_spectral(rho0);
  const Eigen::MatrixXcd& B = scenario.nu1.blocks().B;

  double first = 0.0;
  for (int i = 0; i < sup.dim(); ++i) {
    first += B(i, i).real() * std::log(sup.eigenvalues[i]);
  }
  const HermitianOperator L =
      frechet_derivative(sup, block_operator(B), fn_log());
  const double second = 0.5 * real_trace_product(B, L.matrix());
  return von_neumann_entropy(rho0) - first - second;
}

double qre_sp(const PerturbationScenario& scenario) {
  require_preserving(scenario.nu1, "qre_sp");
  require_preserving(scenario.second(), "qre_sp");
  const SpectralData sup = support_spectral(scenario.rho0);
  const Eigen::MatrixXcd delta =
      scenario.nu1.blocks().B - scenario.second().blocks().B;
  const HermitianOperator L =
      frechet_derivative(sup, block_operator(delta), fn_log());
  return 0.5 * real_trace_product(delta, L.matrix());
}

double qcb_sp_at(const PerturbationScenario& scenario, double s) {
  if (s < 0.0 || s > 1.0) throw Error("qcb_sp_at: s must lie in [0, 1]");
  require_preserving(scenario.nu1, "qcb_sp");
  require_preserving(scenario.second(), "qcb_sp");
  const SpectralData sup = support_spectral(scenario.rho0);
  const HermitianOperator delta = block_operator(
      scenario.nu1.blocks().B - scenario.second().blocks().B);
  const HermitianOperator L1 = frechet_derivative(sup, delta, fn_power(s));
  const HermitianOperator L2 =
      frechet_derivative(sup, delta, fn_power(1.0 - s));
  return 0.5 * real_trace_product(L1.matrix(), L2.matrix());
}

ChernoffValue qcb_sp(const PerturbationScenario& scenario) {
  require_preserving(scenario.nu1, "qcb_sp");
  require_preserving(scenario.second(), "qcb_sp");
  const SpectralData sup = support_spectral(scenario.rho0);
  const HermitianOperator delta = block_operator(
      scenario.nu1.blocks().B - scenario.second().blocks().B);
  const HermitianOperator L = frechet_derivative(sup, delta, fn_sqrt());
  // The maximum over s sits at the Bhattacharyya point s = 1/2.
  return {0.5 * real_trace_product(L.matrix(), L.matrix()), 0.5};
}

double fidelity_sp(const PerturbationScenario& scenario) {
  require_preserving(scenario.nu1, "fidelity_sp");
  require_preserving(scenario.second(), "fidelity_sp");
  const Eigen::VectorXd lam = scenario.rho0.spectral().support_eigenvalues();
  const SpectralData sup_sq =
      SpectralData::diagonal(lam.cwiseProduct(lam));  // rho0^2 on support
  const Eigen::MatrixXcd delta =
      scenario.nu1.blocks().B - scenario.second().blocks().B;
  const HermitianOperator L =
      frechet_derivative(sup_sq, block_operator(delta), fn_sqrt());
  return 1.0 - 0.5 * real_trace_product(delta, L.matrix());
}

double bures_sp(const PerturbationScenario& scenario) {
  require_preserving(scenario.nu1, "bures_sp");
  require_preserving(scenario.second(), "bures_sp");
  const Eigen::VectorXd lam = scenario.rho0.spectral().support_eigenvalues();
  const Eigen::MatrixXcd delta =
      scenario.nu1.blocks().B - scenario.second().blocks().B;
  double sum = 0.0;
  for (int k = 0; k < lam.size(); ++k) {
    for (int l = 0; l < lam.size(); ++l) {
      sum += std::norm(delta(k, l)) / (lam[k] + lam[l]);
    }
  }
  return 0.5 * sum;
}

double entropy_se(const PerturbationScenario& scenario,
                  std::vector<std::string>* warnings) {
  const StatePerturbation& nu = scenario.nu1;
  if (nu.norm() == 0.0) return von_neumann_entropy(scenario.rho0);
  require_extending_or_zero(nu, "entropy_se");
  warn_residual_hypothesis(nu, "entropy_se", warnings);

  const SpectralData sup = support_spectral(scenario.rho0);
  const HermitianOperator L =
      frechet_derivative(sup, block_operator(nu.blocks().B), fn_xlogx());
  const double b_term = L.matrix().trace().real();

  const KernelSpectrum kd = decompose_kernel_block(nu.blocks().D, "entropy_se");
  double d_term = 0.0;
  for (Eigen::Index i = 0; i < kd.values.size(); ++i) {
    if (kd.zero[i]) {
      if (warnings != nullptr) {
        warnings->push_back(
            "entropy_se: nu_D has a zero eigenvalue; 0*log 0 := 0 applied "
            "(supp(nu) >= H0 hypothesis marginal)");
      }
      continue;
    }
    d_term += kd.values[i] * std::log(kd.values[i]);
  }
  return von_neumann_entropy(scenario.rho0) - b_term - d_term;
}

double qre_se(const PerturbationScenario& scenario,
              std::vector<std::string>* warnings) {
  const StatePerturbation& nu1 = scenario.nu1;
  const StatePerturbation& nu2 = scenario.second();
  if (nu1.norm() == 0.0 || nu2.norm() == 0.0) {
    throw ClassificationError(
        "qre_se: both perturbations must extend into the kernel (the D-block "
        "logarithms are otherwise undefined)");
  }
  require_extending_or_zero(nu1, "qre_se");
  require_extending_or_zero(nu2, "qre_se");
  warn_residual_hypothesis(nu1, "qre_se", warnings);
  warn_residual_hypothesis(nu2, "qre_se", warnings);

  const double b_term = nu1.blocks().B.trace().real() -
                        nu2.blocks().B.trace().real();

  const KernelSpectrum k1 = decompose_kernel_block(nu1.blocks().D, "qre_se");
  const KernelSpectrum k2 = decompose_kernel_block(nu2.blocks().D, "qre_se");

  // Support condition on the kernel sector, mirroring the exact QRE.
  double leak = 0.0;
  for (Eigen::Index j = 0; j < k2.values.size(); ++j) {
    if (!k2.zero[j]) continue;
    const Eigen::VectorXcd v = k2.vectors.col(j);
    leak += (v.adjoint() * nu1.blocks().D * v)(0, 0).real();
  }
  if (leak > 1e-10 * std::max(1.0, nu1.blocks().D.norm())) return kInf;

  double t1 = 0.0;
  for (Eigen::Index i = 0; i < k1.values.size(); ++i) {
    if (k1.zero[i]) {
      if (warnings != nullptr) {
        warnings->push_back(
            "qre_se: nu1_D has a zero eigenvalue; 0*log 0 := 0 applied");
      }
      continue;
    }
    t1 += k1.values[i] * std::log(k1.values[i]);
  }
  double t2 = 0.0;
  for (Eigen::Index j = 0; j < k2.values.size(); ++j) {
    if (k2.zero[j]) continue;
    const Eigen::VectorXcd v = k2.vectors.col(j);
    const double weight = (v.adjoint() * nu1.blocks().D * v)(0, 0).real();
    t2 += weight * std::log(k2.values[j]);
  }
  return b_term + t1 - t2;
}

ChernoffValue qcb_se(const PerturbationScenario& scenario, double tol_s,
                     std::vector<std::string>* warnings) {
  const StatePerturbation& nu1 = scenario.nu1;
  const StatePerturbation& nu2 = scenario.second();
  require_extending_or_zero(nu1, "qcb_se");
  require_extending_or_zero(nu2, "qcb_se");
  warn_residual_hypothesis(nu1, "qcb_se", warnings);
  warn_residual_hypothesis(nu2, "qcb_se", warnings);

  const double b1 = nu1.blocks().B.trace().real();
  const double b2 = nu2.blocks().B.trace().real();
  const KernelSpectrum k1 = decompose_kernel_block(nu1.blocks().D, "qcb_se");
  const KernelSpectrum k2 = decompose_kernel_block(nu2.blocks().D, "qcb_se");

  // Tr[nu1_D^s nu2_D^(1-s)] = sum_ij d1_i^s d2_j^(1-s) |<w1_i|w2_j>|^2; the
  // overlap table makes the s-scan cheap after one diagonalization per block.
  const Eigen::MatrixXcd overlap_c = k1.vectors.adjoint() * k2.vectors;
  const Eigen::MatrixXd overlap = overlap_c.cwiseAbs2();

  auto objective = [&](double s) {
    double cross = 0.0;
    for (Eigen::Index i = 0; i < k1.values.size(); ++i) {
      if (k1.zero[i]) continue;  // 0^s := 0
      const double a = std::pow(k1.values[i], s);
      for (Eigen::Index j = 0; j < k2.values.size(); ++j) {
        if (k2.zero[j]) continue;
        cross += a * std::pow(k2.values[j], 1.0 - s) * overlap(i, j);
      }
    }
    return s * b1 + (1.0 - s) * b2 + cross;
  };

  constexpr int kGridPoints = 21;
  int best = 0;
  double vmin = kInf, vmax = -kInf;
  std::vector<double> values(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    const double s = double(i) / (kGridPoints - 1);
    values[i] = objective(s);
    vmin = std::min(vmin, values[i]);
    vmax = std::max(vmax, values[i]);
    const double s_best = double(best) / (kGridPoints - 1);
    if (values[i] < values[best] ||
        (values[i] == values[best] &&
         std::abs(s - 0.5) < std::abs(s_best - 0.5))) {
      best = i;
    }
  }
  if (vmax - vmin <= 1e-15 * std::max(1.0, std::abs(vmax))) {
    return {-objective(0.5), 0.5};
  }
  const double s_best = double(best) / (kGridPoints - 1);
  double a = std::max(0.0, s_best - 1.0 / (kGridPoints - 1));
  double b = std::min(1.0, s_best + 1.0 / (kGridPoints - 1));
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > tol_s) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
    }
  }
  const double s_star = 0.5 * (a + b);
  return {-objective(s_star), s_star};
}

namespace {

// Tr sqrt(sqrt(D1) D2 sqrt(D1)) for PSD kernel blocks.
double root_cross_trace(const Eigen::MatrixXcd& D1, const Eigen::MatrixXcd& D2,
                        const char* where) {
  if (D1.rows() == 0) return 0.0;
  const Eigen::MatrixXcd r1 = psd_power(D1, 0.5);
  Eigen::MatrixXcd M = r1 * D2 * r1;
  M = 0.5 * (M + M.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M);
  if (solver.info() != Eigen::Success) {
    throw EigensolverError(std::string(where) + ": root-product eigensolve "
                           "failed", static_cast<int>(D1.rows()), 0.0);
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    sum += std::sqrt(std::max(0.0, solver.eigenvalues()[i]));
  }
  return sum;
}

}  // namespace

double fidelity_se(const PerturbationScenario& scenario,
                   std::vector<std::string>* warnings) {
  const StatePerturbation& nu1 = scenario.nu1;
  const StatePerturbation& nu2 = scenario.second();
  require_extending_or_zero(nu1, "fidelity_se");
  require_extending_or_zero(nu2, "fidelity_se");
  warn_residual_hypothesis(nu1, "fidelity_se", warnings);
  warn_residual_hypothesis(nu2, "fidelity_se", warnings);

  const double b_term =
      nu1.blocks().B.trace().real() + nu2.blocks().B.trace().real();
  const double cross =
      root_cross_trace(nu1.blocks().D, nu2.blocks().D, "fidelity_se");
  return 1.0 + b_term + 2.0 * cross;
}

double bures_se(const PerturbationScenario& scenario,
                std::vector<std::string>* warnings) {
  const StatePerturbation& nu1 = scenario.nu1;
  const StatePerturbation& nu2 = scenario.second();
  require_extending_or_zero(nu1, "bures_se");
  require_extending_or_zero(nu2, "bures_se");
  warn_residual_hypothesis(nu1, "bures_se", warnings);
  warn_residual_hypothesis(nu2, "bures_se", warnings);

  const double d_term =
      nu1.blocks().D.trace().real() + nu2.blocks().D.trace().real();
  const double cross =
      root_cross_trace(nu1.blocks().D, nu2.blocks().D, "bures_se");
  return d_term - 2.0 * cross;
}

double claimed_exponent_sp() { return 3.0; }
double claimed_exponent_se_entropic() { return 2.0; }
double claimed_exponent_se_root() { return 1.5; }

}  // namespace perturbkit
