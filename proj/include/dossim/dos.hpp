#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace dossim {

/// One attack interval [start, start + length). A zero-length entry is a
/// single pulse: the instant itself counts as attacked.
struct DoSInterval {
    double start = 0.0;
    double length = 0.0;
    double end() const { return start + length; }
};

/**
 * A DoS attack trace over [0, horizon]: a sorted, disjoint sequence of
 * attack intervals. Overlapping or touching inputs are merged at
 * construction (union semantics), so measures and transition counts are
 * unambiguous. Immutable after construction; all queries are pure.
 */
class DoSSignal {
public:
    DoSSignal() = default;
    DoSSignal(std::vector<DoSInterval> intervals, double horizon);

    const std::vector<DoSInterval>& intervals() const { return intervals_; }
    double horizon() const { return horizon_; }

    /// True iff transmissions are denied at time t.
    bool active(double t) const;

    /// Lebesgue measure of the attacked subset of [from, to].
    double active_measure(double from, double to) const;

    /// Measure of the attack-free subset of [from, to].
    double inactive_measure(double from, double to) const;

    /// Number of off/on transitions (interval starts) in [from, to).
    int transition_count(double from, double to) const;

private:
    std::vector<DoSInterval> intervals_;
    double horizon_ = 0.0;
};

/// Attack frequency/duration budget: at most eta + len/tau_d transitions and
/// kappa + len/t_ratio attacked time in any window of length len.
struct DoSBudget {
    double eta = 0.0;      // chattering bound, >= 0
    double tau_d = 1.0;    // average dwell time, > 0
    double kappa = 0.0;    // duration regularization, >= 0
    double t_ratio = 2.0;  // inverse duty-cycle bound, > 1

    void validate() const;
};

struct BudgetWitness {
    double from = 0.0;
    double to = 0.0;
    double value = 0.0;    // n(from,to) or attacked measure
    double allowed = 0.0;  // budget right-hand side for this window
};

struct BudgetCheck {
    bool frequency_ok = true;
    bool duration_ok = true;
    BudgetWitness worst_frequency;
    BudgetWitness worst_duration;
    bool ok() const { return frequency_ok && duration_ok; }
};

/// Verifies both budget inequalities over every window. The excesses are
/// extremal at interval endpoints, so the check enumerates endpoint pairs
/// and is exact.
BudgetCheck check_budget(const DoSSignal& signal, const DoSBudget& budget);

struct BudgetFit {
    double eta_min = 0.0;
    double kappa_min = 0.0;
};

/// Smallest eta and kappa making the signal admissible at the given
/// tau_d and t_ratio.
BudgetFit fit_budget(const DoSSignal& signal, double tau_d, double t_ratio);

// --- generators ------------------------------------------------------------

struct PeriodicSpec {
    double period = 1.0;
    double duty = 0.0;  // attacked fraction of each period, in [0, 1)
};

struct RandomBurstsSpec {
    double mean_gap = 1.0;     // exponential mean of attack-free gaps
    double mean_length = 0.1;  // exponential mean of burst lengths
};

struct PulseTrainSpec {
    std::vector<double> times;
    std::vector<double> lengths;
};

using GeneratorSpec = std::variant<PeriodicSpec, RandomBurstsSpec, PulseTrainSpec>;

/// Builds a signal over [0, horizon]; deterministic for a fixed seed.
DoSSignal generate(const GeneratorSpec& spec, std::uint64_t seed, double horizon);

}  // namespace dossim
