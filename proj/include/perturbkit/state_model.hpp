#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "perturbkit/hermitian.hpp"

namespace perturbkit {

enum class SupportClass { preserving, extending };

std::string to_string(SupportClass c);

// Unit-trace PSD Hermitian operator with cached spectral data. Eigenvalues
// classified as kernel are clamped to exactly 0 so downstream roots and logs
// see clean zeros instead of solver noise.
class DensityMatrix {
public:
  static DensityMatrix from_operator(
      HermitianOperator op, double zero_threshold = defaults::kZeroThreshold);

  const HermitianOperator& op() const { return op_; }
  const SpectralData& spectral() const { return spectral_; }
  int dim() const { return op_.dim(); }
  int rank() const { return rank_; }

private:
  DensityMatrix(HermitianOperator op, SpectralData spectral, int rank);
  HermitianOperator op_;
  SpectralData spectral_;
  int rank_;
};

// Zero-trace Hermitian perturbation, validated against a reference state and
// carrying its block decomposition in that state's eigenbasis.
class StatePerturbation {
public:
  const HermitianOperator& op() const { return op_; }
  const BlockDecomposition& blocks() const { return blocks_; }
  SupportClass classification() const { return classification_; }
  double norm() const { return norm_; }

  friend StatePerturbation validate_perturbation(const DensityMatrix& rho0,
                                                 const HermitianOperator& nu);

private:
  StatePerturbation(HermitianOperator op, BlockDecomposition blocks,
                    SupportClass classification, double norm);
  HermitianOperator op_;
  BlockDecomposition blocks_;
  SupportClass classification_;
  double norm_;
};

// Zeroth-order state plus one or two validated perturbations.
struct PerturbationScenario {
  DensityMatrix rho0;
  StatePerturbation nu1;
  std::optional<StatePerturbation> nu2;
  double scale = 0.0;

  const StatePerturbation& second() const;
};

// Checks hermiticity, zero trace, PSD of rho0 + nu (the paper's diagonal
// bound is reported in the error message when it is the visible culprit) and
// classifies the perturbation from its C and D blocks.
StatePerturbation validate_perturbation(const DensityMatrix& rho0,
                                        const HermitianOperator& nu);

// Seeded generators. Identical (seed, parameters) give bit-identical output.
//
// random_density draws support eigenvalues with min gap and min value
// >= 0.05/rank (keeps divided differences well conditioned) and a Haar-like
// random eigenbasis.
DensityMatrix random_density(int dim, int rank, std::uint64_t seed);

// GUE-style direction, projected to zero trace and to the requested block
// structure, rescaled to |nu| in [0.5, 1.5]*epsilon, then halved (<= 20
// times) until rho0 + nu is PSD. Extending draws keep the D block PSD with
// |nu_D| >= 0.1 |nu| so the support-extending theorems' hypothesis holds
// uniformly along t-scaling families.
StatePerturbation random_perturbation(const DensityMatrix& rho0,
                                      SupportClass kind, double epsilon,
                                      std::uint64_t seed);

// Scenario request, mirroring the scenario JSON schema.
struct ScenarioConfig {
  int dim = 2;
  int rank = 2;
  SupportClass kind = SupportClass::preserving;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  bool pair = false;
};

PerturbationScenario make_scenario(const ScenarioConfig& config);

// Derive an independent RNG stream from a master seed (splitmix64-style), so
// parallel scenario generation is order-independent.
std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace perturbkit
