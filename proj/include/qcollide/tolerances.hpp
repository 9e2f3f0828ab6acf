#pragma once

// Central numerical-tolerance table. Every comparison threshold used by the
// library lives here so that the accuracy contract is visible in one place.
// Values are chosen to sit well above double-precision eigensolver noise for
// 16-dimensional problems while staying far below any physical scale of the
// model.

namespace qcollide::tol {

// Structural checks on states and operators.
inline constexpr double hermiticity  = 1e-12;  // max |rho - rho^dagger|
inline constexpr double unit_trace   = 1e-12;  // |Tr rho - 1|
inline constexpr double psd_floor    = -1e-10; // smallest admissible eigenvalue
inline constexpr double unitarity    = 1e-10;  // max |U^dagger U - 1|

// Spectral clamps.
inline constexpr double entropy_floor  = 1e-14; // eigenvalues below this: 0 ln 0 = 0
inline constexpr double support_floor  = 1e-12; // sigma eigenvalue treated as zero
inline constexpr double support_weight = 1e-10; // rho weight that makes D infinite

// Fixed-point determination.
inline constexpr double steady_residual = 1e-10; // max |Phi(rho) - rho|
inline constexpr double degeneracy_gap  = 1e-8;  // second unit-modulus eigenvalue
inline constexpr long   power_max_iters = 1000000;

// Reconstruction / property-test bounds.
inline constexpr double eig_reconstruction = 1e-10;

// Geometry and classification.
inline constexpr double containment  = 1e-9;  // outward hull tolerance
inline constexpr double mode_epsilon = 1e-12; // work/heat sign threshold

// Optimizer.
inline constexpr double discord_objective = 1e-8; // simplex convergence

} // namespace qcollide::tol
