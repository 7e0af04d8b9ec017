#include "perturbkit/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "perturbkit/exact_oracle.hpp"
#include "perturbkit/matrix_calculus.hpp"
#include "perturbkit/perturbative_measures.hpp"

namespace perturbkit {

namespace {

struct PointEval {
  double residual = 0.0;
  double magnitude = 1.0;  // scale for the noise floor
};

using PointFn = std::function<PointEval(double)>;

struct MeasureTraits {
  bool needs_pair = false;
  double expected_slope = 0.0;
  SlopeComparison comparison = SlopeComparison::two_sided;
};

MeasureTraits measure_traits(const ConvergeConfig& cfg) {
  const bool preserving = cfg.kind == SupportClass::preserving;
  if (cfg.measure == "entropy") {
    return {false, preserving ? 3.0 : 2.0, SlopeComparison::two_sided};
  }
  if (cfg.measure == "qre") {
    return {true, preserving ? 3.0 : 2.0, SlopeComparison::two_sided};
  }
  if (cfg.measure == "qcb") {
    return {true, preserving ? 3.0 : 2.0, SlopeComparison::two_sided};
  }
  if (cfg.measure == "fidelity") {
    return {true, preserving ? 3.0 : 1.5,
            preserving ? SlopeComparison::two_sided
                       : SlopeComparison::lower_bound};
  }
  if (cfg.measure == "bures") {
    return {true, preserving ? 3.0 : 1.5, SlopeComparison::lower_bound};
  }
  if (cfg.measure == "dk_expand") {
    return {false, double(cfg.order) + 1.0, SlopeComparison::two_sided};
  }
  if (cfg.measure == "singular_root") {
    return {false,
            cfg.use_schur ? std::min(1.0 + cfg.s, 3.0 * cfg.s) : 1.0 + cfg.s,
            SlopeComparison::lower_bound};
  }
  if (cfg.measure == "singular_root_diff") {
    return {false, 1.0 + cfg.s, SlopeComparison::lower_bound};
  }
  throw Error("run_convergence: unknown measure '" + cfg.measure + "'");
}

DensityMatrix perturbed_state(const DensityMatrix& rho0,
                              const Eigen::MatrixXcd& nu) {
  return DensityMatrix::from_operator(
      HermitianOperator(rho0.op().matrix() + nu));
}

// One trial's scaling family: fixed rho0 plus unit directions; nu(t) = t*dir.
struct TrialFamily {
  DensityMatrix rho0;
  Eigen::MatrixXcd dir1;
  Eigen::MatrixXcd dir2;  // zero matrix when unused
  double t_cap = 0.0;     // largest scale proven PSD-valid
  bool has_second = false;
};

TrialFamily build_family(const ConvergeConfig& cfg, bool needs_pair,
                         std::uint64_t trial_seed) {
  TrialFamily fam{
      random_density(cfg.dim, cfg.rank, derive_stream(trial_seed, 0)),
      Eigen::MatrixXcd::Zero(cfg.dim, cfg.dim),
      Eigen::MatrixXcd::Zero(cfg.dim, cfg.dim), 0.0, needs_pair};

  const StatePerturbation nu1 = random_perturbation(
      fam.rho0, cfg.kind, cfg.t_max, derive_stream(trial_seed, 1));
  fam.t_cap = nu1.norm();
  if (cfg.nu1_zero) {
    fam.t_cap = std::numeric_limits<double>::infinity();
  } else {
    fam.dir1 = nu1.op().matrix() / nu1.norm();
  }
  if (needs_pair) {
    const StatePerturbation nu2 = random_perturbation(
        fam.rho0, cfg.kind, cfg.t_max, derive_stream(trial_seed, 2));
    fam.dir2 = nu2.op().matrix() / nu2.norm();
    fam.t_cap = std::min(fam.t_cap, nu2.norm());
  }
  return fam;
}

PointFn make_point_fn(const ConvergeConfig& cfg, const TrialFamily& fam) {
  const std::string& m = cfg.measure;
  const bool preserving = cfg.kind == SupportClass::preserving;

  if (m == "dk_expand") {
    const ScalarFunctionSpec f = parse_function(cfg.f);
    return [&fam, f, &cfg](double t) {
      const HermitianOperator nu_t(t * fam.dir1);
      const HermitianOperator exact = apply_function_exact(
          HermitianOperator(fam.rho0.op().matrix() + nu_t.matrix()), f);
      const ExpansionResult approx =
          dk_expand(fam.rho0.spectral(), nu_t, f, cfg.order);
      return PointEval{hs_norm(exact.matrix() - approx.value.matrix()),
                       std::max(1.0, hs_norm(exact))};
    };
  }
  if (m == "singular_root" || m == "singular_root_diff") {
    if (preserving) {
      throw Error("run_convergence: " + m + " needs kind=extending");
    }
    const bool diff = (m == "singular_root_diff");
    return [&fam, &cfg, diff](double t) {
      const HermitianOperator nu_t(t * fam.dir1);
      const ExpansionResult primary = singular_root_expansion(
          fam.rho0.spectral(), nu_t, cfg.s, diff ? true : cfg.use_schur);
      Eigen::MatrixXcd reference;
      if (diff) {
        reference = singular_root_expansion(fam.rho0.spectral(), nu_t, cfg.s,
                                            /*use_schur=*/false)
                        .value.matrix();
      } else {
        reference =
            psd_power(fam.rho0.op().matrix() + nu_t.matrix(), cfg.s);
      }
      return PointEval{hs_norm(primary.value.matrix() - reference),
                       std::max(1.0, hs_norm(reference))};
    };
  }

  // Scalar measures: build the scenario at scale t and compare against the
  // diagonalization oracle.
  return [&fam, &cfg, m, preserving](double t) {
    const Eigen::MatrixXcd nu1_t = t * fam.dir1;
    StatePerturbation p1 =
        validate_perturbation(fam.rho0, HermitianOperator(nu1_t));
    std::optional<StatePerturbation> p2;
    Eigen::MatrixXcd nu2_t;
    if (fam.has_second) {
      nu2_t = t * fam.dir2;
      p2 = validate_perturbation(fam.rho0, HermitianOperator(nu2_t));
    }
    PerturbationScenario scenario{fam.rho0, std::move(p1), std::move(p2), t};

    const DensityMatrix rho1 = perturbed_state(fam.rho0, nu1_t);
    double oracle = 0.0;
    double approx = 0.0;
    if (m == "entropy") {
      oracle = von_neumann_entropy(rho1);
      approx = preserving ? entropy_sp(scenario) : entropy_se(scenario);
    } else {
      const DensityMatrix rho2 = perturbed_state(fam.rho0, nu2_t);
      if (m == "qre") {
        oracle = quantum_relative_entropy(rho1, rho2);
        approx = preserving ? qre_sp(scenario) : qre_se(scenario);
      } else if (m == "qcb") {
        oracle = chernoff_bound(rho1, rho2, cfg.tol_s).xi;
        approx = preserving ? qcb_sp(scenario).xi
                            : qcb_se(scenario, cfg.tol_s).xi;
      } else if (m == "fidelity") {
        oracle = fidelity(rho1, rho2);
        approx = preserving ? fidelity_sp(scenario) : fidelity_se(scenario);
      } else if (m == "bures") {
        oracle = bures_distance(rho1, rho2);
        approx = preserving ? bures_sp(scenario) : bures_se(scenario);
      } else {
        throw Error("run_convergence: unknown measure '" + m + "'");
      }
    }
    if (!std::isfinite(oracle) || !std::isfinite(approx)) {
      throw Error("run_convergence: non-finite value for measure '" + m +
                  "' at t=" + std::to_string(t));
    }
    return PointEval{std::abs(oracle - approx), std::max(1.0, std::abs(oracle))};
  };
}

TrialResult run_trial(const ConvergeConfig& cfg, bool needs_pair, int trial,
                      const std::vector<double>& grid) {
  const std::uint64_t trial_seed = derive_stream(cfg.seed, trial);
  const TrialFamily fam = build_family(cfg, needs_pair, trial_seed);
  const PointFn eval = make_point_fn(cfg, fam);

  TrialResult out;
  out.trial = trial;
  std::vector<double> fit_t, fit_r;
  bool any_above_floor = false;
  for (double t : grid) {
    if (t > fam.t_cap) continue;  // PSD validity trims the top of the grid
    const PointEval pe = eval(t);
    out.scales.push_back(t);
    out.residuals.push_back(pe.residual);
    if (pe.residual > defaults::kNoiseFloor * pe.magnitude) {
      any_above_floor = true;
      fit_t.push_back(t);
      fit_r.push_back(pe.residual);
    }
  }
  if (!any_above_floor) {
    out.exact = true;
    out.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  if (fit_t.size() < 4) {
    throw DegenerateDataError(
        "run_convergence: fewer than 4 usable grid points above the noise "
        "floor in trial " + std::to_string(trial));
  }
  out.fitted_slope = fit_slope(fit_t, fit_r);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double fit_slope(const std::vector<double>& scales,
                 const std::vector<double>& residuals) {
  if (scales.size() != residuals.size()) {
    throw DimensionMismatchError("fit_slope: input length mismatch");
  }
  if (scales.size() < 4) {
    throw DegenerateDataError("fit_slope: need at least 4 points");
  }
  const int n = static_cast<int>(scales.size());
  double mean_x = 0.0, mean_y = 0.0;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    if (!(scales[i] > 0.0) || !(residuals[i] > 0.0)) {
      throw DegenerateDataError(
          "fit_slope: scales and residuals must be strictly positive");
    }
    xs[i] = std::log(scales[i]);
    ys[i] = std::log(residuals[i]);
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (sxx <= 0.0) {
    throw DegenerateDataError("fit_slope: scales are all identical");
  }
  return sxy / sxx;
}

ConvergenceReport run_convergence(const ConvergeConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.trials < 1) throw Error("run_convergence: trials must be >= 1");
  if (cfg.t_points < 4) throw Error("run_convergence: need t_points >= 4");
  if (!(cfg.t_min > 0.0) || !(cfg.t_min < cfg.t_max)) {
    throw Error("run_convergence: need 0 < t_min < t_max");
  }
  const MeasureTraits traits = measure_traits(cfg);

  SlopeComparison comparison = traits.comparison;
  if (cfg.comparison == "two_sided") comparison = SlopeComparison::two_sided;
  else if (cfg.comparison == "lower_bound") {
    comparison = SlopeComparison::lower_bound;
  } else if (!cfg.comparison.empty()) {
    throw Error("run_convergence: unknown comparison '" + cfg.comparison +
                "'");
  }

  std::vector<double> grid(cfg.t_points);
  const double ratio = cfg.t_max / cfg.t_min;
  for (int i = 0; i < cfg.t_points; ++i) {
    grid[i] =
        cfg.t_min * std::pow(ratio, double(i) / double(cfg.t_points - 1));
  }

  std::vector<TrialResult> trials(cfg.trials);
  std::vector<std::string> failures(cfg.trials);
  const int workers = std::max(1, std::min(cfg.threads, cfg.trials));
  std::atomic<int> next{0};
  auto work = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= cfg.trials) break;
      try {
        trials[i] = run_trial(cfg, traits.needs_pair, i, grid);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error(f);
  }

  std::vector<double> slopes;
  for (const auto& tr : trials) {
    if (!tr.exact) slopes.push_back(tr.fitted_slope);
  }
  std::sort(slopes.begin(), slopes.end());

  ConvergenceReport report;
  report.measure = cfg.measure;
  {
    std::ostringstream desc;
    desc << "kind=" << to_string(cfg.kind) << " dim=" << cfg.dim
         << " rank=" << cfg.rank;
    if (cfg.measure == "dk_expand") {
      desc << " f=" << cfg.f << " order=" << cfg.order;
    }
    if (cfg.measure.rfind("singular_root", 0) == 0) {
      desc << " s=" << cfg.s << (cfg.use_schur ? " schur" : "");
    }
    if (cfg.nu1_zero) desc << " nu1=0";
    report.scenario = desc.str();
  }
  report.scales = grid;
  report.trials = std::move(trials);
  report.expected_slope = traits.expected_slope;
  report.slope_tolerance = cfg.slope_tolerance;
  report.comparison = comparison;
  report.seed = cfg.seed;
  report.exact_everywhere = slopes.empty();
  if (slopes.empty()) {
    report.median_slope = std::numeric_limits<double>::quiet_NaN();
    report.pass = true;  // exact to machine precision
  } else {
    const size_t n = slopes.size();
    report.median_slope = (n % 2 == 1)
                              ? slopes[n / 2]
                              : 0.5 * (slopes[n / 2 - 1] + slopes[n / 2]);
    if (comparison == SlopeComparison::two_sided) {
      report.pass = std::abs(report.median_slope - report.expected_slope) <=
                    cfg.slope_tolerance;
    } else {
      report.pass = report.median_slope >=
                    report.expected_slope - cfg.slope_tolerance;
    }
  }
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

void write_convergence_csv(const ConvergenceReport& report,
                           std::ostream& out) {
  out << "trial,t,residual,fitted_slope,expected_slope,pass\n";
  for (const auto& tr : report.trials) {
    const std::string slope =
        tr.exact ? "exact" : format_double(tr.fitted_slope);
    for (size_t i = 0; i < tr.scales.size(); ++i) {
      out << tr.trial << ',' << format_double(tr.scales[i]) << ','
          << format_double(tr.residuals[i]) << ',' << slope << ','
          << format_double(report.expected_slope) << ','
          << (report.pass ? 1 : 0) << '\n';
    }
  }
}

namespace {

double unit_floor_deviation(double lhs, double rhs) {
  return std::abs(lhs - rhs) /
         std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

double diag_weighted_trace(const Eigen::VectorXd& weights,
                           const Eigen::MatrixXcd& M) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    sum += weights[i] * M(i, i).real();
  }
  return sum;
}

}  // namespace

std::vector<LemmaRecord> run_lemma_suite(const LemmaConfig& cfg) {
  const std::vector<ScalarFunctionSpec> fns = {
      fn_log(), fn_xlogx(), fn_sqrt(), fn_power(0.3), fn_power(0.7)};

  struct Acc {
    int lemma;
    std::string label;
    double max_dev = 0.0;
  };
  std::vector<Acc> acc;
  for (int lemma = 1; lemma <= 4; ++lemma) {
    for (const auto& f : fns) acc.push_back({lemma, f.name()});
  }
  acc.push_back({5, "(x, log)"});
  acc.push_back({5, "(pow:0.3, pow:0.7)"});

  for (int trial = 0; trial < cfg.trials; ++trial) {
    ScenarioConfig sc;
    sc.dim = cfg.dim;
    sc.rank = cfg.rank;
    sc.kind = SupportClass::preserving;
    sc.epsilon = cfg.epsilon;
    sc.seed = derive_stream(cfg.seed, trial);
    sc.pair = true;
    const PerturbationScenario scenario = make_scenario(sc);

    const SpectralData sup =
        SpectralData::diagonal(scenario.rho0.spectral().support_eigenvalues());
    const Eigen::VectorXd& lam = sup.eigenvalues;
    const HermitianOperator nu1 = HermitianOperator(scenario.nu1.blocks().B);
    const HermitianOperator nu2 =
        HermitianOperator(scenario.second().blocks().B);

    size_t slot = 0;
    // Lemma 1: Tr[L_f(rho0, nu)] = Tr[nu f'(rho0)].
    for (const auto& f : fns) {
      const HermitianOperator L = frechet_derivative(sup, nu1, f);
      Eigen::VectorXd fprime(lam.size());
      for (Eigen::Index i = 0; i < lam.size(); ++i) fprime[i] = f.deriv1(lam[i]);
      const double lhs = L.matrix().trace().real();
      const double rhs = diag_weighted_trace(fprime, nu1.matrix());
      acc[slot].max_dev =
          std::max(acc[slot].max_dev, unit_floor_deviation(lhs, rhs));
      ++slot;
    }
    // Lemma 2: Tr[D2_f(rho0, nu)] = Tr[nu L_f'(rho0, nu)].
    for (const auto& f : fns) {
      const HermitianOperator D2 = second_directional_derivative(sup, nu1, f);
      const HermitianOperator Lp =
          frechet_derivative(sup, nu1, derivative_of(f));
      const double lhs = D2.matrix().trace().real();
      const double rhs = (nu1.matrix() * Lp.matrix()).trace().real();
      acc[slot].max_dev =
          std::max(acc[slot].max_dev, unit_floor_deviation(lhs, rhs));
      ++slot;
    }
    // Lemma 3: Tr[f'(rho0)^{-1} L_f(rho0, nu)] = Tr[nu] = 0.
    for (const auto& f : fns) {
      const HermitianOperator L = frechet_derivative(sup, nu1, f);
      Eigen::VectorXd inv_fprime(lam.size());
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        inv_fprime[i] = 1.0 / f.deriv1(lam[i]);
      }
      const double lhs = diag_weighted_trace(inv_fprime, L.matrix());
      acc[slot].max_dev =
          std::max(acc[slot].max_dev, unit_floor_deviation(lhs, 0.0));
      ++slot;
    }
    // Lemma 4: Tr[f'(rho0)^{-1} D2_f] = -Tr[L_{1/f'} L_f]; the minus sign is
    // the one a 1x1 scalar check resolves.
    for (const auto& f : fns) {
      const HermitianOperator D2 = second_directional_derivative(sup, nu1, f);
      Eigen::VectorXd inv_fprime(lam.size());
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        inv_fprime[i] = 1.0 / f.deriv1(lam[i]);
      }
      const double lhs = diag_weighted_trace(inv_fprime, D2.matrix());
      const HermitianOperator Linv =
          frechet_derivative(sup, nu1, derivative_reciprocal(f));
      const HermitianOperator Lf = frechet_derivative(sup, nu1, f);
      const double rhs = -(Linv.matrix() * Lf.matrix()).trace().real();
      acc[slot].max_dev =
          std::max(acc[slot].max_dev, unit_floor_deviation(lhs, rhs));
      ++slot;
    }
    // Lemma 5: three-term bilinear identity in nu1 - nu2.
    const std::vector<std::pair<ScalarFunctionSpec, ScalarFunctionSpec>>
        pairs = {{fn_identity(), fn_log()}, {fn_power(0.3), fn_power(0.7)}};
    for (const auto& [f, g] : pairs) {
      const HermitianOperator Lf1 = frechet_derivative(sup, nu1, f);
      const HermitianOperator Lf2 = frechet_derivative(sup, nu2, f);
      const HermitianOperator Lg1 = frechet_derivative(sup, nu1, g);
      const HermitianOperator Lg2 = frechet_derivative(sup, nu2, g);
      const double lhs = ((Lf1.matrix() * Lg1.matrix()).trace() -
                          2.0 * (Lf1.matrix() * Lg2.matrix()).trace() +
                          (Lf2.matrix() * Lg2.matrix()).trace())
                             .real();
      const HermitianOperator delta =
          HermitianOperator(nu1.matrix() - nu2.matrix());
      const HermitianOperator Lfd = frechet_derivative(sup, delta, f);
      const HermitianOperator Lgd = frechet_derivative(sup, delta, g);
      const double rhs = (Lfd.matrix() * Lgd.matrix()).trace().real();
      acc[slot].max_dev =
          std::max(acc[slot].max_dev, unit_floor_deviation(lhs, rhs));
      ++slot;
    }
  }

  std::vector<LemmaRecord> records;
  records.reserve(acc.size());
  for (const auto& a : acc) {
    records.push_back({a.lemma, a.label, cfg.trials, a.max_dev, cfg.tolerance,
                       a.max_dev <= cfg.tolerance});
  }
  return records;
}

void write_lemma_csv(const std::vector<LemmaRecord>& records,
                     std::ostream& out) {
  out << "lemma,functions,trials,max_deviation,tolerance,pass\n";
  for (const auto& r : records) {
    out << r.lemma << ",\"" << r.functions << "\"," << r.trials << ','
        << format_double(r.max_deviation) << ',' << format_double(r.tolerance)
        << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

bool all_pass(const std::vector<LemmaRecord>& records) {
  for (const auto& r : records) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace perturbkit
