#include <doctest.h>

#include <cmath>
#include <sstream>

#include "perturbkit/convergence.hpp"

using namespace perturbkit;

namespace {

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  }
  return out;
}

}  // namespace

TEST_CASE("fit_slope on synthetic power laws") {
  const auto ts = geometric(1e-4, 1e-2, 10);

  std::vector<double> cubic, three_halves, mixed;
  for (double t : ts) {
    cubic.push_back(7.0 * t * t * t);
    three_halves.push_back(0.3 * std::pow(t, 1.5));
    mixed.push_back(2.0 * t * t * t + 5.0 * t * t * t * t);
  }
  CHECK(fit_slope(ts, cubic) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit_slope(ts, three_halves) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(fit_slope(ts, mixed) - 3.0) <= 0.05);
}

TEST_CASE("fit_slope rejects degenerate data") {
  CHECK_THROWS_AS(fit_slope({1e-2, 1e-3, 1e-4}, {1.0, 2.0, 3.0}),
                  DegenerateDataError);
  CHECK_THROWS_AS(fit_slope({1e-2, 1e-3, 1e-4, 1e-5}, {1.0, 2.0, 0.0, 3.0}),
                  DegenerateDataError);
  CHECK_THROWS_AS(fit_slope({1e-2, 1e-2, 1e-2, 1e-2}, {1.0, 1.0, 1.0, 1.0}),
                  DegenerateDataError);
  CHECK_THROWS_AS(fit_slope({1e-2, 1e-3}, {1.0}), DimensionMismatchError);
}

TEST_CASE("run_convergence on support-preserving entropy") {
  ConvergeConfig cfg;
  cfg.measure = "entropy";
  cfg.kind = SupportClass::preserving;
  cfg.dim = 4;
  cfg.rank = 4;
  cfg.trials = 3;
  cfg.t_min = 1e-4;
  cfg.t_max = 1e-2;
  cfg.t_points = 8;
  cfg.seed = 7;
  const ConvergenceReport report = run_convergence(cfg);
  CHECK(report.expected_slope == doctest::Approx(3.0));
  CHECK(std::abs(report.median_slope - 3.0) <= 0.2);
  CHECK(report.pass);
  CHECK(report.trials.size() == 3);
}

TEST_CASE("run_convergence on support-extending fidelity") {
  ConvergeConfig cfg;
  cfg.measure = "fidelity";
  cfg.kind = SupportClass::extending;
  cfg.dim = 4;
  cfg.rank = 3;
  cfg.trials = 3;
  cfg.t_min = 1e-4;
  cfg.t_max = 1e-2;
  cfg.t_points = 8;
  cfg.seed = 11;
  const ConvergenceReport report = run_convergence(cfg);
  CHECK(report.expected_slope == doctest::Approx(1.5));
  CHECK(report.median_slope >= 1.3);
  CHECK(report.pass);
}

TEST_CASE("quadratic functions are exact at order 2") {
  ConvergeConfig cfg;
  cfg.measure = "dk_expand";
  cfg.f = "square";
  cfg.order = 2;
  cfg.kind = SupportClass::preserving;
  cfg.dim = 3;
  cfg.rank = 3;
  cfg.trials = 2;
  cfg.t_points = 6;
  cfg.t_min = 1e-4;
  cfg.t_max = 1e-2;
  cfg.seed = 13;
  const ConvergenceReport report = run_convergence(cfg);
  CHECK(report.exact_everywhere);
  CHECK(report.pass);
}

TEST_CASE("slope drops by one when truncating at first order") {
  ConvergeConfig cfg;
  cfg.measure = "dk_expand";
  cfg.f = "log";
  cfg.kind = SupportClass::preserving;
  cfg.dim = 4;
  cfg.rank = 4;
  cfg.trials = 3;
  cfg.t_points = 8;
  cfg.t_min = 1e-4;
  cfg.t_max = 1e-2;
  cfg.seed = 17;

  cfg.order = 2;
  const double s2 = run_convergence(cfg).median_slope;
  cfg.order = 1;
  const double s1 = run_convergence(cfg).median_slope;
  CHECK(std::abs(s2 - 3.0) <= 0.2);
  CHECK(std::abs(s1 - 2.0) <= 0.2);
  CHECK(s2 - s1 >= 0.5);
}

TEST_CASE("csv output is byte-identical across runs and thread counts") {
  ConvergeConfig cfg;
  cfg.measure = "qre";
  cfg.kind = SupportClass::preserving;
  cfg.dim = 3;
  cfg.rank = 3;
  cfg.trials = 4;
  cfg.t_points = 6;
  cfg.t_min = 1e-3;
  cfg.t_max = 1e-2;
  cfg.seed = 19;

  auto render = [&](int threads) {
    ConvergeConfig c = cfg;
    c.threads = threads;
    std::ostringstream ss;
    write_convergence_csv(run_convergence(c), ss);
    return ss.str();
  };
  const std::string a = render(1);
  const std::string b = render(1);
  const std::string c = render(4);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.rfind("trial,t,residual,fitted_slope,expected_slope,pass\n", 0) ==
        0);
}

TEST_CASE("singular root families fit their claimed exponents") {
  ConvergeConfig cfg;
  cfg.measure = "singular_root";
  cfg.kind = SupportClass::extending;
  cfg.dim = 4;
  cfg.rank = 2;
  cfg.trials = 3;
  cfg.t_points = 8;
  cfg.t_min = 1e-4;
  cfg.t_max = 1e-2;
  cfg.seed = 23;
  cfg.s = 0.5;

  cfg.use_schur = true;
  const ConvergenceReport schur = run_convergence(cfg);
  CHECK(schur.expected_slope == doctest::Approx(1.5));
  CHECK(schur.median_slope >= 1.5 - 0.2);
  CHECK(schur.pass);

  cfg.use_schur = false;
  const ConvergenceReport dform = run_convergence(cfg);
  CHECK(dform.expected_slope == doctest::Approx(1.5));
  CHECK(dform.pass);

  ConvergeConfig diff = cfg;
  diff.measure = "singular_root_diff";
  const ConvergenceReport agreement = run_convergence(diff);
  CHECK(agreement.expected_slope == doctest::Approx(1.5));
  CHECK(agreement.pass);
}

TEST_CASE("run_convergence validates its configuration") {
  ConvergeConfig cfg;
  cfg.measure = "nonsense";
  CHECK_THROWS_AS(run_convergence(cfg), Error);

  ConvergeConfig bad_grid;
  bad_grid.measure = "entropy";
  bad_grid.t_points = 3;
  CHECK_THROWS_AS(run_convergence(bad_grid), Error);

  ConvergeConfig bad_kind;
  bad_kind.measure = "singular_root";
  bad_kind.kind = SupportClass::preserving;
  CHECK_THROWS_AS(run_convergence(bad_kind), Error);
}

TEST_CASE("lemma suite passes at 1e-10 on a small configuration") {
  LemmaConfig cfg;
  cfg.dim = 3;
  cfg.rank = 3;
  cfg.trials = 10;
  cfg.seed = 29;
  const auto records = run_lemma_suite(cfg);
  REQUIRE(records.size() == 22);  // 4 lemmas x 5 functions + 2 pairs
  for (const auto& r : records) {
    CAPTURE(r.lemma);
    CAPTURE(r.functions);
    CHECK(r.max_deviation <= 1e-10);
    CHECK(r.pass);
  }
  CHECK(all_pass(records));

  std::ostringstream ss;
  write_lemma_csv(records, ss);
  CHECK(ss.str().rfind("lemma,functions,trials,max_deviation,tolerance,pass",
                       0) == 0);
}
