#include "perturbkit/state_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace perturbkit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Self-contained deterministic RNG so generated objects are bit-stable
// across platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() {  // [0, 1)
    std::uint64_t bits = splitmix64(state_);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
  }

private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

Eigen::MatrixXcd gue_hermitian(int n, Rng& rng) {
  Eigen::MatrixXcd H(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = rng.normal();
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> z = rng.complex_normal();
      H(i, j) = z;
      H(j, i) = std::conj(z);
    }
  }
  return H;
}

Eigen::MatrixXcd ginibre(int rows, int cols, Rng& rng) {
  Eigen::MatrixXcd G(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      G(i, j) = rng.complex_normal();
    }
  }
  return G;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal
// phases folded into Q.
Eigen::MatrixXcd haar_unitary(int n, Rng& rng) {
  const Eigen::MatrixXcd G = ginibre(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd R = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = R(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) Q.col(j) *= d / mag;
  }
  return Q;
}

double min_eigenvalue(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

std::string to_string(SupportClass c) {
  return c == SupportClass::preserving ? "preserving" : "extending";
}

DensityMatrix::DensityMatrix(HermitianOperator op, SpectralData spectral,
                             int rank)
    : op_(std::move(op)), spectral_(std::move(spectral)), rank_(rank) {}

DensityMatrix DensityMatrix::from_operator(HermitianOperator op,
                                           double zero_threshold) {
  SpectralData spectral = eigendecompose(op, zero_threshold);
  const double tr = op.trace();
  if (std::abs(tr - 1.0) > defaults::kTraceTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << tr << " deviates from 1 by more than "
        << defaults::kTraceTol;
    throw TraceError(msg.str());
  }
  const double min_lam = spectral.eigenvalues.minCoeff();
  if (min_lam < -defaults::kPsdTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: eigenvalue " << min_lam << " is negative";
    throw NotPsdError(msg.str());
  }
  // Clamp kernel-classified noise to exact zeros for downstream roots/logs.
  for (int idx : spectral.kernel_indices) spectral.eigenvalues[idx] = 0.0;
  const int rank = spectral.rank();
  return DensityMatrix(std::move(op), std::move(spectral), rank);
}

StatePerturbation::StatePerturbation(HermitianOperator op,
                                     BlockDecomposition blocks,
                                     SupportClass classification, double norm)
    : op_(std::move(op)),
      blocks_(std::move(blocks)),
      classification_(classification),
      norm_(norm) {}

StatePerturbation validate_perturbation(const DensityMatrix& rho0,
                                        const HermitianOperator& nu) {
  if (nu.dim() != rho0.dim()) {
    throw DimensionMismatchError(
        "validate_perturbation: perturbation dim " + std::to_string(nu.dim()) +
        " != state dim " + std::to_string(rho0.dim()));
  }
  const double tr = nu.trace();
  if (std::abs(tr) > defaults::kTraceTol) {
    std::ostringstream msg;
    msg << "validate_perturbation: perturbation trace " << tr
        << " is not zero (tolerance " << defaults::kTraceTol << ")";
    throw TraceError(msg.str());
  }

  const Eigen::MatrixXcd sum = rho0.op().matrix() + nu.matrix();
  const double min_lam = min_eigenvalue(sum);
  if (min_lam < -defaults::kPsdTol) {
    // The paper's diagonal bound -lambda_i <= <i|nu|i> <= 1 - lambda_i is
    // necessary for PSD; report it when it is the visible culprit.
    const Eigen::MatrixXcd nu_hat = rho0.spectral().rotate_in(nu.matrix());
    std::ostringstream msg;
    msg << "validate_perturbation: rho0 + nu has eigenvalue " << min_lam;
    for (int i = 0; i < rho0.dim(); ++i) {
      const double d = nu_hat(i, i).real();
      const double lam = rho0.spectral().eigenvalues[i];
      if (d < -lam - defaults::kPsdTol || d > 1.0 - lam + defaults::kPsdTol) {
        msg << "; diagonal bound violated at eigenvector " << i << ": "
            << -lam << " <= " << d << " <= " << 1.0 - lam << " fails";
        break;
      }
    }
    throw NotPsdError(msg.str());
  }

  BlockDecomposition blocks = block_decompose(nu, rho0.spectral());
  const double norm = hs_norm(nu);
  const double thr = defaults::kZeroThreshold * std::max(1.0, norm);
  const SupportClass cls =
      (blocks.C.norm() <= thr && blocks.D.norm() <= thr)
          ? SupportClass::preserving
          : SupportClass::extending;
  if (cls == SupportClass::preserving) {
    // Sub-threshold coupling is basis round-trip noise; clamp it so the
    // stored blocks of a preserving perturbation are exact zeros.
    blocks.C.setZero();
    blocks.D.setZero();
  }
  return StatePerturbation(nu, std::move(blocks), cls, norm);
}

const StatePerturbation& PerturbationScenario::second() const {
  if (!nu2.has_value()) {
    throw Error("scenario carries no second perturbation");
  }
  return *nu2;
}

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t state =
      master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 0x2545F4914F6CDD1DULL));
  splitmix64(state);
  return splitmix64(state);
}

DensityMatrix random_density(int dim, int rank, std::uint64_t seed) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw Error("random_density: need 1 <= rank <= dim");
  }
  const double floor = 0.05 / rank;  // min eigenvalue and min gap
  const double fixed_mass = floor * rank * (rank + 1) / 2.0;
  if (fixed_mass >= 1.0) {
    throw InfeasibleError(
        "random_density: rank too large for the 0.05/rank spacing contract");
  }

  Rng rng(seed);
  Eigen::VectorXd increments(rank);
  for (int i = 0; i < rank; ++i) increments[i] = rng.uniform(0.1, 1.0);
  const double total = increments.sum();
  const double free_mass = 1.0 - fixed_mass;

  Eigen::VectorXd eigs = Eigen::VectorXd::Zero(dim);
  double cumulative = 0.0;
  for (int i = 0; i < rank; ++i) {
    cumulative += increments[i];
    eigs[dim - rank + i] =
        floor * (i + 1) + free_mass * cumulative / total;
  }

  const Eigen::MatrixXcd U = haar_unitary(dim, rng);
  Eigen::MatrixXcd rho = U * eigs.asDiagonal() * U.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  // Renormalize the rounding drift so the trace check cannot trip.
  rho *= 1.0 / rho.trace().real();
  return DensityMatrix::from_operator(HermitianOperator(std::move(rho)));
}

namespace {

// Assemble support-first blocks in rho0's eigenbasis back into the original
// basis and rescale to the target norm.
Eigen::MatrixXcd assemble_perturbation(const DensityMatrix& rho0,
                                       const Eigen::MatrixXcd& B,
                                       const Eigen::MatrixXcd& C,
                                       const Eigen::MatrixXcd& D) {
  const int r = static_cast<int>(B.rows());
  const int k = static_cast<int>(D.rows());
  Eigen::MatrixXcd inner(r + k, r + k);
  inner.topLeftCorner(r, r) = B;
  inner.topRightCorner(r, k) = C;
  inner.bottomLeftCorner(k, r) = C.adjoint();
  inner.bottomRightCorner(k, k) = D;
  const Eigen::MatrixXcd U = rho0.spectral().basis_support_first();
  Eigen::MatrixXcd nu = U * inner * U.adjoint();
  return 0.5 * (nu + nu.adjoint().eval());
}

StatePerturbation finalize_random_perturbation(const DensityMatrix& rho0,
                                               Eigen::MatrixXcd nu,
                                               double epsilon) {
  int halvings = 0;
  while (min_eigenvalue(rho0.op().matrix() + nu) < -defaults::kPsdTol) {
    if (++halvings > 20) {
      throw InfeasibleError(
          "random_perturbation: rho0 + nu not PSD after 20 halvings; try a "
          "smaller epsilon");
    }
    nu *= 0.5;
  }
  if (nu.norm() < 0.5 * epsilon) {
    throw InfeasibleError(
        "random_perturbation: PSD forces |nu| below 0.5*epsilon; try a "
        "smaller epsilon");
  }
  return validate_perturbation(rho0, HermitianOperator(std::move(nu)));
}

}  // namespace

StatePerturbation random_perturbation(const DensityMatrix& rho0,
                                      SupportClass kind, double epsilon,
                                      std::uint64_t seed) {
  if (epsilon < 0.0) {
    throw Error("random_perturbation: epsilon must be nonnegative");
  }
  if (epsilon == 0.0) {
    return validate_perturbation(rho0, HermitianOperator::Zero(rho0.dim()));
  }

  const int r = rho0.rank();
  const int k = rho0.dim() - r;
  Rng rng(seed);

  if (kind == SupportClass::preserving) {
    if (r < 2) {
      throw InfeasibleError(
          "random_perturbation: a rank-1 state admits no nonzero "
          "support-preserving perturbation");
    }
    Eigen::MatrixXcd B = gue_hermitian(r, rng);
    B -= (B.trace() / double(r)) * Eigen::MatrixXcd::Identity(r, r);
    Eigen::MatrixXcd nu =
        assemble_perturbation(rho0, B, Eigen::MatrixXcd::Zero(r, k),
                              Eigen::MatrixXcd::Zero(k, k));
    const double target = epsilon * rng.uniform(0.75, 1.25);
    nu *= target / nu.norm();
    // Re-zero the coupling blocks exactly after the basis round trip.
    const Eigen::MatrixXcd U = rho0.spectral().basis_support_first();
    Eigen::MatrixXcd inner = U.adjoint() * nu * U;
    inner.topRightCorner(r, k).setZero();
    inner.bottomLeftCorner(k, r).setZero();
    inner.bottomRightCorner(k, k).setZero();
    nu = U * inner * U.adjoint();
    return finalize_random_perturbation(rho0, std::move(nu), epsilon);
  }

  if (k < 1) {
    throw InfeasibleError(
        "random_perturbation: support-extending draw needs rank < dim");
  }
  Eigen::MatrixXcd B = gue_hermitian(r, rng);
  Eigen::MatrixXcd C = ginibre(r, k, rng);
  Eigen::MatrixXcd Draw = gue_hermitian(k, rng);
  Eigen::MatrixXcd D = Draw * Draw;  // PSD, generically full rank on H0

  if (B.norm() > 0) B *= 0.55 / B.norm();
  if (C.norm() > 0) C *= 0.15 / C.norm();
  D *= 0.30 / D.norm();

  // Zero total trace via the B block, then float the D weight up until the
  // |nu_D| >= 0.1 |nu| floor holds (Theorem hypothesis along t-families).
  for (int attempt = 0; attempt < 32; ++attempt) {
    Eigen::MatrixXcd Bfixed =
        B - ((B.trace() + D.trace()) / double(r)) *
                Eigen::MatrixXcd::Identity(r, r);
    const double norm = std::sqrt(Bfixed.squaredNorm() + 2.0 * C.squaredNorm() +
                                  D.squaredNorm());
    if (D.norm() >= 0.1 * norm) {
      Eigen::MatrixXcd nu = assemble_perturbation(rho0, Bfixed, C, D);
      const double target = epsilon * rng.uniform(0.75, 1.25);
      nu *= target / nu.norm();
      return finalize_random_perturbation(rho0, std::move(nu), epsilon);
    }
    D *= 1.5;
  }
  throw InfeasibleError(
      "random_perturbation: could not satisfy the |nu_D| >= 0.1 |nu| floor");
}

PerturbationScenario make_scenario(const ScenarioConfig& config) {
  DensityMatrix rho0 =
      random_density(config.dim, config.rank, derive_stream(config.seed, 0));
  StatePerturbation nu1 = random_perturbation(
      rho0, config.kind, config.epsilon, derive_stream(config.seed, 1));
  std::optional<StatePerturbation> nu2;
  if (config.pair) {
    nu2 = random_perturbation(rho0, config.kind, config.epsilon,
                              derive_stream(config.seed, 2));
  }
  return PerturbationScenario{std::move(rho0), std::move(nu1), std::move(nu2),
                              config.epsilon};
}

}  // namespace perturbkit
