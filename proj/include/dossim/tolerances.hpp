#pragma once

// Numerical tolerances, centralized so they can be tuned in one place.

namespace dossim::tol {

/// Lyapunov-equation residual, relative to ||Q||.
inline constexpr double kLyapunovResidual = 1e-9;

/// Relative asymmetry allowed before a matrix is rejected as non-symmetric.
inline constexpr double kSymmetry = 1e-12;

/// Eigenvalue real parts must lie strictly below -kHurwitzMargin.
inline constexpr double kHurwitzMargin = 1e-12;

/// Convergence threshold for iterative eigenvalue computations.
inline constexpr double kEigen = 1e-14;

/// Slack applied when checking DoS budget inequalities.
inline constexpr double kBudgetSlack = 1e-12;

/// Relative slack for time-grid alignment (slot and step matching).
inline constexpr double kTimeGrid = 1e-9;

}  // namespace dossim::tol
