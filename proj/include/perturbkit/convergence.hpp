#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "perturbkit/state_model.hpp"

namespace perturbkit {

// How a fitted slope is compared against the expected exponent. Measures
// whose theorems give an exact order use the two-sided window; lower-bound
// claims (matrix roots, fidelity/Bures with extending support) only require
// the residual to decay at least that fast.
enum class SlopeComparison { two_sided, lower_bound };

struct ConvergeConfig {
  // entropy | qre | qcb | fidelity | bures | dk_expand | singular_root |
  // singular_root_diff
  std::string measure = "entropy";
  SupportClass kind = SupportClass::preserving;
  int dim = 4;
  int rank = 4;
  std::uint64_t seed = 1;
  int trials = 8;
  double t_min = 1e-4;
  double t_max = 1e-1;
  int t_points = 12;
  double slope_tolerance = 0.2;
  double tol_s = 1e-6;
  // measure-specific knobs
  int order = 2;             // dk_expand truncation order
  std::string f = "xlogx";   // dk_expand scalar function (CLI name)
  double s = 0.5;            // singular_root exponent
  bool use_schur = false;    // singular_root kernel-block form
  bool nu1_zero = false;     // pair measures: force nu1 = 0
  std::string comparison;    // "two_sided" | "lower_bound"; empty = default
  int threads = 1;
};

struct TrialResult {
  int trial = 0;
  std::vector<double> scales;     // usable grid points (above noise floor)
  std::vector<double> residuals;  // |oracle - expansion| per point
  double fitted_slope = 0.0;
  bool exact = false;  // every residual below the noise floor
};

struct ConvergenceReport {
  std::string measure;
  std::string scenario;  // human-readable descriptor
  std::vector<double> scales;
  std::vector<TrialResult> trials;
  double median_slope = 0.0;
  double expected_slope = 0.0;
  double slope_tolerance = 0.0;
  SlopeComparison comparison = SlopeComparison::two_sided;
  bool exact_everywhere = false;
  bool pass = false;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
};

// Least-squares slope of log(residual) against log(scale). Requires at least
// 4 strictly positive residuals.
double fit_slope(const std::vector<double>& scales,
                 const std::vector<double>& residuals);

// Builds per-trial scaling families nu(t) = t * nu_hat, evaluates
// |oracle - expansion| on the grid, fits a slope per trial and takes the
// median. Passes when the median meets the expected exponent within
// slope_tolerance, or when every residual sits below the noise floor.
// Trials run on config.threads workers; the outcome is thread-count
// independent.
ConvergenceReport run_convergence(const ConvergeConfig& config);

// CSV with columns: trial,t,residual,fitted_slope,expected_slope,pass.
// Formatting is fixed so identical configs give byte-identical files.
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

struct LemmaConfig {
  int dim = 4;
  int rank = 4;
  int trials = 50;
  std::uint64_t seed = 1;
  double epsilon = 0.05;
  double tolerance = 1e-10;
};

struct LemmaRecord {
  int lemma = 0;              // 1..5
  std::string functions;      // function or (f, g) pair label
  int trials = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Checks the five trace identities behind the support-preserving theorems on
// random scenarios: Tr L_f = Tr[nu f'(rho0)], Tr D2_f = Tr[nu L_f'],
// Tr[f'(rho0)^{-1} L_f] = Tr[nu], Tr[f'(rho0)^{-1} D2_f] = -Tr[L_{1/f'} L_f]
// and the bilinear difference identity. Deviations are relative with a unit
// floor: |lhs - rhs| / max(1, |lhs|, |rhs|).
std::vector<LemmaRecord> run_lemma_suite(const LemmaConfig& config);

void write_lemma_csv(const std::vector<LemmaRecord>& records,
                     std::ostream& out);

bool all_pass(const std::vector<LemmaRecord>& records);

}  // namespace perturbkit
