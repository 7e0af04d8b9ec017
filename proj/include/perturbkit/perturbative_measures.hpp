#pragma once

#include <string>
#include <vector>

#include "perturbkit/matrix_calculus.hpp"
#include "perturbkit/state_model.hpp"

namespace perturbkit {

// Lowest-order expansions of the quantum information measures for perturbed
// states rho_i = rho0 + nu_i. The _sp forms require support-preserving
// perturbations and carry an O(eps^3) residual claim; the _se forms handle
// support-extending perturbations (O(eps^2), fidelity/Bures O(eps^{3/2})).
// Every computation diagonalizes rho0 only; the perturbations enter through
// their matrix elements in rho0's eigenbasis.

struct ChernoffValue {
  double xi = 0.0;
  double s_star = 0.5;
};

// f(rho0) + L_f(rho0,nu) + (1/2) D2_f(rho0,nu) truncated at `order`. Only f's
// smoothness at the nonzero eigenvalues is required; on the kernel the zero
// convention of f applies. (The source theorem assumes C^6 at the
// eigenvalues; only C^2 is consumed by the formulas.)
ExpansionResult dk_expand_state(const PerturbationScenario& scenario,
                                const ScalarFunctionSpec& f, int order);

// S(rho0) - Tr[nu log rho0] - (1/2) Tr[nu L_log(rho0, nu)].
double entropy_sp(const PerturbationScenario& scenario);

// (1/2) Tr[(nu1 - nu2) L_log(rho0, nu1 - nu2)]; symmetric in its arguments.
double qre_sp(const PerturbationScenario& scenario);

// (1/2) Tr[L_sqrt(rho0, nu1 - nu2)^2], attained at s = 1/2 (the quantum
// Bhattacharyya point).
ChernoffValue qcb_sp(const PerturbationScenario& scenario);

// General-s second-order Chernoff exponent
// (1/2) Tr[L_{x^s}(rho0, nu1-nu2) L_{x^{1-s}}(rho0, nu1-nu2)].
double qcb_sp_at(const PerturbationScenario& scenario, double s);

// 1 - (1/2) Tr[(nu1 - nu2) L_sqrt(rho0^2, nu1 - nu2)]; the derivative is
// taken at rho0 squared.
double fidelity_sp(const PerturbationScenario& scenario);

// (1/2) sum_{k,l} |<k|nu1 - nu2|l>|^2 / (lambda_k + lambda_l).
double bures_sp(const PerturbationScenario& scenario);

// S(rho0) - Tr[L_xlogx(rho0+, nu_B)] - Tr[nu_D log nu_D], the Frechet
// derivative evaluated on the support subspace only.
double entropy_se(const PerturbationScenario& scenario,
                  std::vector<std::string>* warnings = nullptr);

// Tr[nu1_B - nu2_B] + Tr[nu1_D (log nu1_D - log nu2_D)]; +infinity when
// supp(nu1_D) is not contained in supp(nu2_D).
double qre_se(const PerturbationScenario& scenario,
              std::vector<std::string>* warnings = nullptr);

// Maximize -( s Tr[nu1_B] + (1-s) Tr[nu2_B] + Tr[nu1_D^s nu2_D^{1-s}] ) over
// s in [0,1] by grid + golden section. The maximizer is generally not 1/2.
ChernoffValue qcb_se(const PerturbationScenario& scenario, double tol_s = 1e-6,
                     std::vector<std::string>* warnings = nullptr);

// 1 + Tr[nu1_B + nu2_B] + 2 Tr[sqrt(sqrt(nu1_D) nu2_D sqrt(nu1_D))].
double fidelity_se(const PerturbationScenario& scenario,
                   std::vector<std::string>* warnings = nullptr);

// Tr[nu1_D + nu2_D] - 2 Tr[sqrt(sqrt(nu1_D) nu2_D sqrt(nu1_D))]. nu1 = 0 is
// permitted (the rank-change Bures discontinuity case) and reduces the value
// to Tr[nu2_D].
double bures_se(const PerturbationScenario& scenario,
                std::vector<std::string>* warnings = nullptr);

// Residual exponents attached to the measures, so the harness needs no side
// table: 3 for the _sp family, 2 for entropy/qre/qcb _se, 3/2 for
// fidelity/bures _se.
double claimed_exponent_sp();
double claimed_exponent_se_entropic();
double claimed_exponent_se_root();

}  // namespace perturbkit
