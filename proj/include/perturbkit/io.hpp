#pragma once

#include <string>

#include "perturbkit/convergence.hpp"
#include "perturbkit/hermitian.hpp"
#include "perturbkit/state_model.hpp"

namespace perturbkit {

// Matrix JSON format used by all CLI inputs:
//   {"dim": n, "entries": [[[re, im], ...], ...]}  (row-major)
HermitianOperator read_matrix_json(const std::string& path);
HermitianOperator parse_matrix_json(const std::string& text);
std::string matrix_to_json(const HermitianOperator& A);

// Scenario JSON: {"dim", "rank", "kind", "epsilon", "seed", "pair"}.
ScenarioConfig parse_scenario_json(const std::string& text);

// Convergence config JSON keys: measure, kind, dim, rank, seed, trials,
// t_min, t_max, t_points, slope_tolerance, tol_s, plus the measure-specific
// order, f, s, use_schur, nu1_zero, comparison.
ConvergeConfig read_converge_config(const std::string& path);
ConvergeConfig parse_converge_config(const std::string& text);

LemmaConfig read_lemma_config(const std::string& path);
LemmaConfig parse_lemma_config(const std::string& text);

}  // namespace perturbkit
