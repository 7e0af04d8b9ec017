#pragma once

namespace perturbkit::defaults {

// Hermiticity construction tolerance, relative to the largest entry modulus.
// Inputs within tolerance are symmetrized as (A + A^dag)/2.
inline constexpr double kHermTol = 1e-10;

// Relative threshold below which an eigenvalue is classified as kernel.
inline constexpr double kZeroThreshold = 1e-12;

// Relative eigenvalue-gap threshold at which divided differences switch from
// the subtractive quotient to the derivative branch.
inline constexpr double kDegeneracyTol = 1e-8;

// Max entry deviation allowed in U^dag U = I and in spectral reconstruction.
inline constexpr double kSpectralTol = 1e-12;

// Relative asymmetry beyond which a rotated result is treated as an internal
// bug rather than rounding.
inline constexpr double kHermitizeTol = 1e-9;

// Residuals below this (relative to the measure magnitude) count as exact to
// machine precision in convergence fits.
inline constexpr double kNoiseFloor = 1e-13;

// Absolute tolerances on state validity.
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;

}  // namespace perturbkit::defaults
