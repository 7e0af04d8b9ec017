#pragma once

#include "perturbkit/state_model.hpp"

namespace perturbkit {

// Ground truth for every measure by full diagonalization. All logarithms are
// natural; 0*log 0 := 0 and 0^s := 0 on classified kernels. Support
// violations return an infinity marker, never an error.

double von_neumann_entropy(const DensityMatrix& rho);

// Tr[rho1 (log rho1 - log rho2)] on supp(rho2); +infinity when
// supp(rho1) is not contained in supp(rho2).
double quantum_relative_entropy(const DensityMatrix& rho1,
                                const DensityMatrix& rho2);

// xi_s = -log Tr[rho1^s rho2^(1-s)], s in [0, 1].
double chernoff_exponent_s(const DensityMatrix& rho1,
                           const DensityMatrix& rho2, double s);

struct ChernoffBound {
  double xi = 0.0;
  double s_star = 0.5;
};

// Maximizes xi_s over s in [0,1]: 21-point coarse grid, then golden-section
// refinement to tol_s. Ties are broken toward s = 1/2.
ChernoffBound chernoff_bound(const DensityMatrix& rho1,
                             const DensityMatrix& rho2, double tol_s = 1e-6);

// (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 in [0, 1 + 1e-10].
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

// (Tr[rho^q] - 1)/(1 - q), q in (0,1) u (1,inf); q = 1 is rejected.
double tsallis_entropy(const DensityMatrix& rho, double q);

// (1 - Tr[rho1^q rho2^(1-q)])/(1 - q), same support condition as the QRE.
double tsallis_relative_entropy(const DensityMatrix& rho1,
                                const DensityMatrix& rho2, double q);

// Squared Bures distance 2(1 - sqrt(F)).
double bures_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

}  // namespace perturbkit
