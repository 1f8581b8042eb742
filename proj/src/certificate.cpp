#include "dossim/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dossim/errors.hpp"
#include "dossim/tolerances.hpp"

namespace dossim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool mu_feasible(const ComparisonMatrices& cm, std::span<const double> mu) {
    // mu'(-A + B) < 0 componentwise
    const int n = cm.count();
    for (int j = 0; j < n; ++j) {
        double col = -mu[j] * cm.alpha[j];
        for (int i = 0; i < n; ++i) col += mu[i] * cm.beta(i, j);
        if (!(col < 0.0)) return false;
    }
    return true;
}

double quotient_radius(const ComparisonMatrices& cm) {
    const int n = cm.count();
    Matrix quotient(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) quotient(i, j) = cm.beta(i, j) / cm.alpha[i];
    return spectral_radius(quotient);
}

}  // namespace

bool GainCertificate::sigma_unconstrained(int id) const {
    return std::isnan(sigma_max[id - 1]);
}

void TriggerParams::validate() const {
    if (sigma.size() != c.size()) throw DimensionMismatch("sigma and c sizes differ");
    for (size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0) || !(sigma[i] < 1.0))
            throw BadRange("trigger sigma_" + std::to_string(i + 1) + " must lie in (0, 1)");
        if (!(c[i] > 0.0) || !std::isfinite(c[i]))
            throw NonPositiveC("trigger c_" + std::to_string(i + 1) +
                               " must be positive and finite");
    }
}

std::vector<double> TriggerParams::sigma_bar() const {
    std::vector<double> out(sigma.size());
    for (size_t i = 0; i < sigma.size(); ++i) out[i] = sigma[i] / (1.0 - sigma[i]);
    return out;
}

std::vector<Matrix> lyapunov_solutions(const PlantModel& model) {
    std::vector<Matrix> p;
    p.reserve(model.subsystems.size());
    for (const auto& s : model.subsystems) p.push_back(solve_lyapunov(s.closed_loop(), s.q));
    return p;
}

ComparisonMatrices comparison_matrices(const PlantModel& model, double delta,
                                       std::span<const Matrix> p) {
    if (!(delta > 0.0)) throw BadRange("delta must be positive");
    const int n = model.count();
    ComparisonMatrices cm;
    cm.delta = delta;
    cm.alpha.resize(n);
    cm.beta = Matrix(n, n);
    cm.gamma = Matrix(n, n);

    for (const auto& s : model.subsystems) {
        const int i = s.id - 1;
        const auto& nbrs = model.neighbors_of(s.id);
        const double p_norm = spectral_norm(p[i]);
        const double p_norm_sq = p_norm * p_norm;
        const double q_min = symmetric_eigenvalues(s.q).front();

        // one Young term for e_i, two per neighbor (x_j and e_j)
        cm.alpha[i] = q_min - delta * (1.0 + 2.0 * static_cast<double>(nbrs.size()));
        if (!(cm.alpha[i] > 0.0)) throw AlphaNonPositive(s.id, delta);

        const double bk = spectral_norm(s.b * s.k);
        cm.gamma(i, i) = p_norm_sq * bk * bk / delta;

        for (int j : nbrs) {
            Matrix coupling(s.state_dim(), model.subsystem(j).state_dim());
            if (auto it = s.coupling_control.find(j); it != s.coupling_control.end()) {
                coupling = s.b * it->second;
                const double bl = spectral_norm(coupling);
                cm.gamma(i, j - 1) = p_norm_sq * bl * bl / delta;
            }
            if (auto it = s.coupling_physical.find(j); it != s.coupling_physical.end())
                coupling += it->second;
            const double blh = spectral_norm(coupling);
            cm.beta(i, j - 1) = p_norm_sq * blh * blh / delta;
        }
    }
    return cm;
}

ComparisonMatrices comparison_matrices(const PlantModel& model, double delta) {
    return comparison_matrices(model, delta, lyapunov_solutions(model));
}

std::vector<double> choose_mu(const ComparisonMatrices& cm) {
    const int n = cm.count();
    for (double a : cm.alpha)
        if (!(a > 0.0)) throw BadRange("comparison matrix has nonpositive alpha");
    const double radius = quotient_radius(cm);
    if (!(radius < 1.0)) throw SmallGainViolated(radius);

    std::vector<double> ones(n, 1.0);
    if (mu_feasible(cm, ones)) return ones;

    // (A - B)' mu = 1; inverse positivity of the M-matrix gives mu > 0
    Matrix system(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double entry = (i == j ? cm.alpha[i] : 0.0) - cm.beta(i, j);
            system(j, i) = entry;
        }
    auto mu = solve_linear(system, std::vector<double>(n, 1.0));
    for (double v : mu)
        if (!(v > 0.0)) throw SmallGainViolated(radius);
    if (!mu_feasible(cm, mu)) throw SmallGainViolated(radius);
    return mu;
}

std::vector<double> sigma_bounds(const ComparisonMatrices& cm, std::span<const double> mu) {
    const int n = cm.count();
    if (static_cast<int>(mu.size()) != n) throw DimensionMismatch("mu size mismatch");
    std::vector<double> bounds(n);
    for (int i = 0; i < n; ++i) {
        double l = mu[i] * cm.alpha[i];
        double j_col = 0.0;
        for (int k = 0; k < n; ++k) {
            l -= mu[k] * cm.beta(k, i);
            j_col += mu[k] * cm.gamma(k, i);
        }
        // zero gamma column: the error of subsystem i never enters the
        // comparison system, so no constraint is imposed
        bounds[i] = (j_col == 0.0) ? kNaN : std::sqrt(l / j_col);
    }
    return bounds;
}

OmegaRates omega_rates(std::span<const double> l_row, std::span<const double> j_row,
                       std::span<const double> sigma, std::span<const double> sigma_max,
                       std::span<const double> mu, std::span<const double> p_lambda_min,
                       std::span<const double> p_lambda_max) {
    const size_t n = l_row.size();
    OmegaRates out;
    double omega1 = std::numeric_limits<double>::infinity();
    double j_max = 0.0;
    double floor_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        double decay = l_row[i];
        if (j_row[i] > 0.0) {
            if (std::isnan(sigma[i]) || !(sigma[i] < sigma_max[i]))
                throw SigmaTooLarge(static_cast<int>(i + 1));
            decay -= sigma[i] * sigma[i] * j_row[i];
        }
        omega1 = std::min(omega1, decay / (p_lambda_max[i] * mu[i]));
        j_max = std::max(j_max, j_row[i]);
        floor_min = std::min(floor_min, mu[i] * p_lambda_min[i]);
    }
    out.omega1 = omega1;
    out.omega2 = 4.0 * j_max / floor_min;
    out.resilience_bound = out.omega1 / (out.omega1 + out.omega2);
    return out;
}

namespace {

std::vector<double> default_sigma(std::span<const double> sigma_max) {
    std::vector<double> sigma(sigma_max.size());
    for (size_t i = 0; i < sigma_max.size(); ++i)
        sigma[i] = std::isnan(sigma_max[i]) ? kNaN : 0.5 * std::min(sigma_max[i], 1.0);
    return sigma;
}

GainCertificate assemble(const PlantModel& model, double delta, const CertificateOptions& options,
                         std::vector<Matrix> p) {
    GainCertificate cert;
    cert.p = std::move(p);
    for (const auto& pi : cert.p) {
        const auto [lo, hi] = eig_extremes_symmetric(pi);
        cert.p_lambda_min.push_back(lo);
        cert.p_lambda_max.push_back(hi);
    }
    cert.comparison = comparison_matrices(model, delta, cert.p);
    if (options.overrides.alpha) {
        if (static_cast<int>(options.overrides.alpha->size()) != model.count())
            throw DimensionMismatch("alpha override size mismatch");
        cert.comparison.alpha = *options.overrides.alpha;
    }
    if (options.overrides.beta) {
        if (options.overrides.beta->rows() != model.count() ||
            options.overrides.beta->cols() != model.count())
            throw DimensionMismatch("beta override size mismatch");
        cert.comparison.beta = *options.overrides.beta;
    }
    if (options.overrides.gamma) {
        if (options.overrides.gamma->rows() != model.count() ||
            options.overrides.gamma->cols() != model.count())
            throw DimensionMismatch("gamma override size mismatch");
        cert.comparison.gamma = *options.overrides.gamma;
    }

    cert.small_gain_radius = quotient_radius(cert.comparison);
    if (!(cert.small_gain_radius < 1.0)) throw SmallGainViolated(cert.small_gain_radius);

    if (options.mu) {
        cert.mu = *options.mu;
        if (static_cast<int>(cert.mu.size()) != model.count())
            throw DimensionMismatch("mu size mismatch");
        for (double v : cert.mu)
            if (!(v > 0.0)) throw BadRange("mu entries must be positive");
        if (!mu_feasible(cert.comparison, cert.mu))
            throw SmallGainViolated(cert.small_gain_radius);
    } else {
        cert.mu = choose_mu(cert.comparison);
    }

    const int n = model.count();
    cert.l_row.resize(n);
    cert.j_row.resize(n);
    for (int i = 0; i < n; ++i) {
        double l = cert.mu[i] * cert.comparison.alpha[i];
        double j_col = 0.0;
        for (int k = 0; k < n; ++k) {
            l -= cert.mu[k] * cert.comparison.beta(k, i);
            j_col += cert.mu[k] * cert.comparison.gamma(k, i);
        }
        cert.l_row[i] = l;
        cert.j_row[i] = j_col;
    }
    cert.sigma_max = sigma_bounds(cert.comparison, cert.mu);

    if (options.sigma) {
        if (static_cast<int>(options.sigma->size()) != n)
            throw DimensionMismatch("sigma size mismatch");
        cert.sigma = *options.sigma;
        for (int i = 0; i < n; ++i)
            if (!std::isnan(cert.sigma[i]) && !(cert.sigma[i] > 0.0))
                throw BadRange("sigma entries must be positive");
    } else {
        cert.sigma = default_sigma(cert.sigma_max);
    }

    const auto rates = omega_rates(cert.l_row, cert.j_row, cert.sigma, cert.sigma_max, cert.mu,
                                   cert.p_lambda_min, cert.p_lambda_max);
    cert.omega1 = rates.omega1;
    cert.omega2 = rates.omega2;
    cert.resilience_bound = rates.resilience_bound;
    return cert;
}

}  // namespace

double choose_delta(const PlantModel& model) {
    const auto p = lyapunov_solutions(model);
    double q_min = std::numeric_limits<double>::infinity();
    for (const auto& s : model.subsystems)
        q_min = std::min(q_min, symmetric_eigenvalues(s.q).front());

    constexpr int kGridPoints = 200;
    constexpr double kDecades = 4.0;
    double best_bound = -1.0;
    double best_delta = 0.0;
    for (int k = 1; k <= kGridPoints; ++k) {
        const double delta =
            q_min * std::pow(10.0, -kDecades * static_cast<double>(kGridPoints - k) /
                                       static_cast<double>(kGridPoints - 1));
        try {
            const auto cm = comparison_matrices(model, delta, p);
            const auto mu = choose_mu(cm);
            const auto bounds = sigma_bounds(cm, mu);
            const auto sigma = default_sigma(bounds);
            std::vector<double> lo, hi;
            for (const auto& pi : p) {
                const auto [a, b] = eig_extremes_symmetric(pi);
                lo.push_back(a);
                hi.push_back(b);
            }
            std::vector<double> l(cm.count()), j(cm.count());
            for (int i = 0; i < cm.count(); ++i) {
                double li = mu[i] * cm.alpha[i];
                double ji = 0.0;
                for (int c = 0; c < cm.count(); ++c) {
                    li -= mu[c] * cm.beta(c, i);
                    ji += mu[c] * cm.gamma(c, i);
                }
                l[i] = li;
                j[i] = ji;
            }
            const auto rates = omega_rates(l, j, sigma, bounds, mu, lo, hi);
            if (rates.resilience_bound > best_bound) {
                best_bound = rates.resilience_bound;
                best_delta = delta;
            }
        } catch (const AlphaNonPositive&) {
        } catch (const SmallGainViolated&) {
        }
    }
    if (best_bound < 0.0)
        throw NoFeasibleDelta("no delta satisfies alpha_i > 0 with r(A^-1 B) < 1");
    return best_delta;
}

GainCertificate build_certificate(const PlantModel& model, const CertificateOptions& options) {
    validate_or_throw(model);
    const double delta = options.delta ? *options.delta : choose_delta(model);
    return assemble(model, delta, options, lyapunov_solutions(model));
}

AdmissibilityCheck check_dos_admissible(const DoSBudget& budget, int n_subsystems, double delta,
                                        double resilience_bound) {
    budget.validate();
    AdmissibilityCheck out;
    out.lhs = 1.0 / budget.t_ratio + static_cast<double>(n_subsystems) * delta / budget.tau_d;
    out.rhs = resilience_bound;
    out.certified = out.lhs < out.rhs;
    return out;
}

EnvelopeParams envelope_params(const DoSBudget& budget, const GainCertificate& cert,
                               int n_subsystems, double delta) {
    budget.validate();
    EnvelopeParams env;
    env.budget = budget;
    env.delta_star = static_cast<double>(n_subsystems) * delta;
    env.kappa_star = budget.kappa + (1.0 + budget.eta) * env.delta_star;
    env.t_star = budget.tau_d * budget.t_ratio / (budget.tau_d + budget.t_ratio * env.delta_star);
    env.beta_star = cert.omega1 - (cert.omega1 + cert.omega2) *
                                      (env.delta_star / budget.tau_d + 1.0 / budget.t_ratio);
    env.rate_sum = cert.omega1 + cert.omega2;
    return env;
}

double zeno_interevent_bound(const PlantModel& model, const TriggerParams& trigger,
                             double x_bound, double m_bound, int id) {
    trigger.validate();
    if (static_cast<int>(trigger.sigma.size()) != model.count())
        throw DimensionMismatch("trigger parameters do not match the subsystem count");
    const auto& s = model.subsystem(id);
    const int i = id - 1;
    if (!(trigger.c[i] > 0.0)) throw NonPositiveC("c must be positive");

    const auto bar = trigger.sigma_bar();
    double denom = spectral_norm(s.closed_loop()) * x_bound;
    for (int j : model.neighbors_of(id)) {
        Matrix combined(s.state_dim(), model.subsystem(j).state_dim());
        double h_norm = 0.0;
        if (auto it = s.coupling_control.find(j); it != s.coupling_control.end())
            combined = s.b * it->second;
        if (auto it = s.coupling_physical.find(j); it != s.coupling_physical.end()) {
            combined += it->second;
            h_norm = spectral_norm(it->second);
        }
        const double zeta = spectral_norm(combined) + h_norm * bar[j - 1];
        denom += m_bound * zeta + h_norm * bar[j - 1] * trigger.c[j - 1];
    }
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();

    const double z = trigger.c[i] / denom;
    const double mu_a = log_norm(s.a);
    if (mu_a <= 0.0) return z;
    return std::log1p(z * mu_a) / mu_a;
}

PracticalBound practical_bound(const GainCertificate& cert, const TriggerParams& trigger,
                               const EnvelopeParams& env) {
    if (static_cast<int>(trigger.c.size()) != cert.count())
        throw DimensionMismatch("trigger size does not match certificate");
    for (double ci : trigger.c)
        if (ci < 0.0 || !std::isfinite(ci)) throw NonPositiveC("c must be nonnegative and finite");
    if (!(env.beta_star > 0.0))
        throw NotCertified("beta_star <= 0: the resilience condition does not hold");

    PracticalBound out;
    for (int i = 0; i < cert.count(); ++i)
        out.c_total += cert.j_row[i] * trigger.c[i] * trigger.c[i];
    const double rate_sum = cert.omega1 + cert.omega2;
    const double gain = std::exp(env.kappa_star * rate_sum +
                                 env.beta_star * env.budget.tau_d * env.budget.eta) /
                        (1.0 - std::exp(-env.beta_star * env.budget.tau_d));
    out.bound = (gain + 1.0) * out.c_total / cert.omega1;
    return out;
}

}  // namespace dossim
