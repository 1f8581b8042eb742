#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dossim/dos.hpp"
#include "dossim/matrix.hpp"
#include "dossim/plant.hpp"

namespace dossim {

/**
 * Scalar comparison-system data built from Young's-inequality constants:
 * per-subsystem decay rates alpha (diagonal of A), cross-state injection
 * rates beta (B, zero diagonal) and error injection rates gamma.
 */
struct ComparisonMatrices {
    double delta = 0.0;
    std::vector<double> alpha;  // diag of A
    Matrix beta;                // N x N, zero outside neighbor pairs
    Matrix gamma;               // N x N, zero outside diagonal + neighbor pairs

    int count() const { return static_cast<int>(alpha.size()); }
    Matrix alpha_matrix() const { return Matrix::diagonal(alpha); }
};

/// Explicit values pinned by the caller in place of the computed ones.
struct CertificateOverrides {
    std::optional<std::vector<double>> alpha;
    std::optional<Matrix> beta;
    std::optional<Matrix> gamma;

    bool any() const { return alpha || beta || gamma; }
};

/// Everything the small-gain analysis derives for a plant. sigma_max and
/// sigma entries are NaN for subsystems whose error never enters the
/// comparison system (zero gamma column): those are unconstrained.
struct GainCertificate {
    std::vector<Matrix> p;
    std::vector<double> p_lambda_min;
    std::vector<double> p_lambda_max;
    ComparisonMatrices comparison;
    double small_gain_radius = 0.0;  // r(A^-1 B)
    std::vector<double> mu;
    std::vector<double> l_row;      // mu' (A - B)
    std::vector<double> j_row;      // mu' Gamma
    std::vector<double> sigma_max;  // strict upper bounds, NaN = unconstrained
    std::vector<double> sigma;      // chosen values, NaN = not applicable
    double omega1 = 0.0;
    double omega2 = 0.0;
    double resilience_bound = 0.0;  // omega1 / (omega1 + omega2)

    int count() const { return static_cast<int>(mu.size()); }
    bool sigma_unconstrained(int id) const;
};

/// Switched-envelope constants derived from a budget and certificate;
/// carries the budget and rate sum it was computed from.
struct EnvelopeParams {
    DoSBudget budget;
    double delta_star = 0.0;  // N * Delta
    double kappa_star = 0.0;  // kappa + (1 + eta) * delta_star
    double t_star = 0.0;      // tau_d * T / (tau_d + T * delta_star)
    double beta_star = 0.0;   // omega1 - (omega1 + omega2)(delta_star/tau_d + 1/T)
    double rate_sum = 0.0;    // omega1 + omega2
};

/// Event-trigger thresholds: fire when ||e_i|| >= max(sigma_i ||x_i||, c_i).
struct TriggerParams {
    std::vector<double> sigma;
    std::vector<double> c;

    void validate() const;  // 0 < sigma_i < 1, c_i > 0 and finite
    /// sigma_i / (1 - sigma_i), used by the inter-event bound.
    std::vector<double> sigma_bar() const;
};

/// P_i from the per-subsystem Lyapunov equations.
std::vector<Matrix> lyapunov_solutions(const PlantModel& model);

/// Comparison-system data at a given delta. Throws AlphaNonPositive when
/// delta is too large for some subsystem.
ComparisonMatrices comparison_matrices(const PlantModel& model, double delta);
ComparisonMatrices comparison_matrices(const PlantModel& model, double delta,
                                       std::span<const Matrix> p);

/// Grid search over feasible delta maximizing the resilience bound;
/// deterministic 200-point logarithmic grid, ties toward smaller delta.
double choose_delta(const PlantModel& model);

/// A positive weight vector with mu'(-A + B) < 0: all-ones when feasible,
/// otherwise the M-matrix solve (A - B)' mu = 1.
std::vector<double> choose_mu(const ComparisonMatrices& cm);

/// Strict upper bounds sqrt(l_i / j_i); NaN marks an unconstrained entry
/// (zero gamma column).
std::vector<double> sigma_bounds(const ComparisonMatrices& cm, std::span<const double> mu);

struct OmegaRates {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double resilience_bound = 0.0;
};

OmegaRates omega_rates(std::span<const double> l_row, std::span<const double> j_row,
                       std::span<const double> sigma, std::span<const double> sigma_max,
                       std::span<const double> mu, std::span<const double> p_lambda_min,
                       std::span<const double> p_lambda_max);

struct CertificateOptions {
    std::optional<double> delta;               // default: choose_delta
    std::optional<std::vector<double>> mu;     // default: choose_mu
    std::optional<std::vector<double>> sigma;  // default: half the upper bound (capped at 1)
    CertificateOverrides overrides;
};

/// Runs the full pipeline: P, comparison matrices, mu, sigma bounds, rates.
GainCertificate build_certificate(const PlantModel& model, const CertificateOptions& options = {});

struct AdmissibilityCheck {
    double lhs = 0.0;  // 1/T + N Delta / tau_d
    double rhs = 0.0;  // resilience bound
    bool certified = false;
};

/// Strict inequality test of the resilience condition.
AdmissibilityCheck check_dos_admissible(const DoSBudget& budget, int n_subsystems, double delta,
                                        double resilience_bound);

EnvelopeParams envelope_params(const DoSBudget& budget, const GainCertificate& cert,
                               int n_subsystems, double delta);

/// Strictly positive lower bound on the next inter-event time of subsystem
/// `id` under the trigger law, from caller-supplied trace bounds.
double zeno_interevent_bound(const PlantModel& model, const TriggerParams& trigger,
                             double x_bound, double m_bound, int id);

struct PracticalBound {
    double c_total = 0.0;  // sum j_i c_i^2
    double bound = 0.0;    // asymptotic Lyapunov bound
};

/// Asymptotic bound of the hybrid scheme; requires beta_star > 0.
PracticalBound practical_bound(const GainCertificate& cert, const TriggerParams& trigger,
                               const EnvelopeParams& env);

}  // namespace dossim
