#include "perturbkit/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace perturbkit {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw Error(std::string("invalid JSON in ") + what);
  }
  return j;
}

SupportClass parse_kind(const std::string& kind) {
  if (kind == "preserving") return SupportClass::preserving;
  if (kind == "extending") return SupportClass::extending;
  throw Error("unknown kind '" + kind + "' (expected preserving|extending)");
}

}  // namespace

HermitianOperator parse_matrix_json(const std::string& text) {
  const json j = parse(text, "matrix");
  if (!j.contains("dim") || !j.contains("entries")) {
    throw Error("matrix JSON needs \"dim\" and \"entries\"");
  }
  const int dim = j.at("dim").get<int>();
  if (dim < 1) throw Error("matrix JSON: dim must be >= 1");
  const json& rows = j.at("entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
    throw Error("matrix JSON: entries must be dim rows");
  }
  Eigen::MatrixXcd M(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = rows.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw Error("matrix JSON: row " + std::to_string(r) +
                  " must have dim [re, im] pairs");
    }
    for (int c = 0; c < dim; ++c) {
      const json& cell = row.at(c);
      if (!cell.is_array() || cell.size() != 2) {
        throw Error("matrix JSON: entry (" + std::to_string(r) + "," +
                    std::to_string(c) + ") must be [re, im]");
      }
      M(r, c) = std::complex<double>(cell.at(0).get<double>(),
                                     cell.at(1).get<double>());
    }
  }
  return HermitianOperator(std::move(M));
}

HermitianOperator read_matrix_json(const std::string& path) {
  return parse_matrix_json(slurp(path));
}

std::string matrix_to_json(const HermitianOperator& A) {
  json rows = json::array();
  for (int r = 0; r < A.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < A.dim(); ++c) {
      row.push_back({A.matrix()(r, c).real(), A.matrix()(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  json j;
  j["dim"] = A.dim();
  j["entries"] = std::move(rows);
  return j.dump();
}

ScenarioConfig parse_scenario_json(const std::string& text) {
  const json j = parse(text, "scenario config");
  ScenarioConfig cfg;
  cfg.dim = j.value("dim", cfg.dim);
  cfg.rank = j.value("rank", cfg.dim);
  if (j.contains("kind")) cfg.kind = parse_kind(j.at("kind").get<std::string>());
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.pair = j.value("pair", cfg.pair);
  return cfg;
}

ConvergeConfig parse_converge_config(const std::string& text) {
  const json j = parse(text, "converge config");
  ConvergeConfig cfg;
  cfg.measure = j.value("measure", cfg.measure);
  if (j.contains("kind")) cfg.kind = parse_kind(j.at("kind").get<std::string>());
  cfg.dim = j.value("dim", cfg.dim);
  cfg.rank = j.value("rank", cfg.dim);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.t_min = j.value("t_min", cfg.t_min);
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.t_points = j.value("t_points", cfg.t_points);
  cfg.slope_tolerance = j.value("slope_tolerance", cfg.slope_tolerance);
  cfg.tol_s = j.value("tol_s", cfg.tol_s);
  cfg.order = j.value("order", cfg.order);
  cfg.f = j.value("f", cfg.f);
  cfg.s = j.value("s", cfg.s);
  cfg.use_schur = j.value("use_schur", cfg.use_schur);
  cfg.nu1_zero = j.value("nu1_zero", cfg.nu1_zero);
  cfg.comparison = j.value("comparison", cfg.comparison);
  cfg.threads = j.value("threads", cfg.threads);
  return cfg;
}

ConvergeConfig read_converge_config(const std::string& path) {
  return parse_converge_config(slurp(path));
}

LemmaConfig parse_lemma_config(const std::string& text) {
  const json j = parse(text, "lemma config");
  LemmaConfig cfg;
  cfg.dim = j.value("dim", cfg.dim);
  cfg.rank = j.value("rank", cfg.dim);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.tolerance = j.value("tolerance", cfg.tolerance);
  return cfg;
}

LemmaConfig read_lemma_config(const std::string& path) {
  return parse_lemma_config(slurp(path));
}

}  // namespace perturbkit
