#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "perturbkit/convergence.hpp"
#include "perturbkit/exact_oracle.hpp"
#include "perturbkit/io.hpp"
#include "perturbkit/perturbative_measures.hpp"

namespace {

using namespace perturbkit;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run_converge(const std::string& config_path, const std::string& out_path,
                 int threads_override) {
  ConvergeConfig cfg = read_converge_config(config_path);
  if (threads_override > 0) cfg.threads = threads_override;
  const ConvergenceReport report = run_convergence(cfg);

  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  write_convergence_csv(report, out);

  std::cout << "measure=" << report.measure << " " << report.scenario
            << " expected_slope=" << fmt(report.expected_slope);
  if (report.exact_everywhere) {
    std::cout << " exact to machine precision";
  } else {
    std::cout << " median_slope=" << fmt(report.median_slope);
  }
  std::cout << " pass=" << (report.pass ? "yes" : "no") << "\n";
  return report.pass ? 0 : 1;
}

int run_lemmas(const std::string& config_path, const std::string& out_path) {
  const LemmaConfig cfg = read_lemma_config(config_path);
  const std::vector<LemmaRecord> records = run_lemma_suite(cfg);

  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  write_lemma_csv(records, out);

  for (const auto& r : records) {
    std::cout << "lemma " << r.lemma << " [" << r.functions
              << "] max_deviation=" << fmt(r.max_deviation) << " pass="
              << (r.pass ? "yes" : "no") << "\n";
  }
  return all_pass(records) ? 0 : 1;
}

int run_eval(const std::string& measure, const std::string& rho0_path,
             const std::string& nu1_path, const std::string& nu2_path,
             const std::string& mode, double tol_s) {
  const DensityMatrix rho0 =
      DensityMatrix::from_operator(read_matrix_json(rho0_path));
  StatePerturbation nu1 =
      validate_perturbation(rho0, read_matrix_json(nu1_path));
  std::optional<StatePerturbation> nu2;
  if (!nu2_path.empty()) {
    nu2 = validate_perturbation(rho0, read_matrix_json(nu2_path));
  }

  const bool preserving =
      nu1.classification() == SupportClass::preserving &&
      (!nu2 || nu2->classification() == SupportClass::preserving);
  const double scale = nu1.norm();
  PerturbationScenario scenario{rho0, std::move(nu1), std::move(nu2), scale};

  std::vector<std::string> warnings;
  double value = 0.0;
  double s_star = -1.0;
  if (mode == "exact") {
    const DensityMatrix rho1 = DensityMatrix::from_operator(HermitianOperator(
        rho0.op().matrix() + scenario.nu1.op().matrix()));
    if (measure == "entropy") {
      value = von_neumann_entropy(rho1);
    } else {
      const DensityMatrix rho2 =
          DensityMatrix::from_operator(HermitianOperator(
              rho0.op().matrix() + scenario.second().op().matrix()));
      if (measure == "qre") {
        value = quantum_relative_entropy(rho1, rho2);
      } else if (measure == "qcb") {
        const ChernoffBound qcb = chernoff_bound(rho1, rho2, tol_s);
        value = qcb.xi;
        s_star = qcb.s_star;
      } else if (measure == "fidelity") {
        value = fidelity(rho1, rho2);
      } else if (measure == "bures") {
        value = bures_distance(rho1, rho2);
      } else {
        throw Error("eval: unknown measure '" + measure + "'");
      }
    }
  } else if (mode == "expansion") {
    if (measure == "entropy") {
      value = preserving ? entropy_sp(scenario)
                         : entropy_se(scenario, &warnings);
    } else if (measure == "qre") {
      value = preserving ? qre_sp(scenario) : qre_se(scenario, &warnings);
    } else if (measure == "qcb") {
      const ChernoffValue qcb = preserving
                                    ? qcb_sp(scenario)
                                    : qcb_se(scenario, tol_s, &warnings);
      value = qcb.xi;
      s_star = qcb.s_star;
    } else if (measure == "fidelity") {
      value = preserving ? fidelity_sp(scenario)
                         : fidelity_se(scenario, &warnings);
    } else if (measure == "bures") {
      value =
          preserving ? bures_sp(scenario) : bures_se(scenario, &warnings);
    } else {
      throw Error("eval: unknown measure '" + measure + "'");
    }
  } else {
    throw Error("eval: mode must be exact or expansion");
  }

  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << fmt(value);
  if (s_star >= 0.0) std::cout << " s_star=" << fmt(s_star);
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "perturbkit: series expansions of quantum information measures for "
      "perturbed density matrices, with an exact oracle and a convergence "
      "harness"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int threads = 0;
  auto* converge = app.add_subcommand(
      "converge", "fit residual scaling exponents against the exact oracle");
  converge->add_option("--config", config_path, "config JSON")->required();
  converge->add_option("--out", out_path, "output CSV")->required();
  converge->add_option("--threads", threads, "worker threads (overrides config)");

  std::string lemma_config, lemma_out;
  auto* lemmas = app.add_subcommand(
      "lemmas", "check the Frechet-derivative trace identities");
  lemmas->add_option("--config", lemma_config, "config JSON")->required();
  lemmas->add_option("--out", lemma_out, "output CSV")->required();

  std::string measure, rho0_path, nu1_path, nu2_path, mode = "exact";
  double tol_s = 1e-6;
  auto* eval = app.add_subcommand(
      "eval", "evaluate one measure on explicit matrices");
  eval->add_option("--measure", measure,
                   "entropy|qre|qcb|fidelity|bures")->required();
  eval->add_option("--rho0", rho0_path, "zeroth-order state JSON")->required();
  eval->add_option("--nu1", nu1_path, "perturbation JSON")->required();
  eval->add_option("--nu2", nu2_path, "second perturbation JSON");
  eval->add_option("--mode", mode, "exact|expansion");
  eval->add_option("--tol-s", tol_s, "Chernoff maximizer tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (converge->parsed()) return run_converge(config_path, out_path, threads);
    if (lemmas->parsed()) return run_lemmas(lemma_config, lemma_out);
    if (eval->parsed()) {
      return run_eval(measure, rho0_path, nu1_path, nu2_path, mode, tol_s);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
