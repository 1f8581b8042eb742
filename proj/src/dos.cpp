#include "dossim/dos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dossim/errors.hpp"
#include "dossim/tolerances.hpp"

namespace dossim {

DoSSignal::DoSSignal(std::vector<DoSInterval> intervals, double horizon) : horizon_(horizon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw BadRange("signal horizon must be finite and nonnegative");
    for (const auto& iv : intervals) {
        if (!std::isfinite(iv.start) || !std::isfinite(iv.length) || iv.length < 0.0)
            throw BadRange("attack intervals need finite start and nonnegative length");
        if (iv.start < 0.0 || iv.end() > horizon)
            throw BadRange("attack interval outside [0, horizon]");
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const DoSInterval& a, const DoSInterval& b) { return a.start < b.start; });
    // union semantics: merge overlap and contiguous coverage; a zero-length
    // pulse exactly at another interval's right-open end stays separate
    for (const auto& iv : intervals) {
        if (!intervals_.empty()) {
            auto& last = intervals_.back();
            const bool overlaps = iv.start < last.end();
            const bool touches = iv.start == last.end() && iv.length > 0.0;
            const bool duplicate_pulse = iv.start == last.start && iv.length == 0.0;
            if (overlaps || touches || (duplicate_pulse && last.length == 0.0)) {
                last.length = std::max(last.end(), iv.end()) - last.start;
                continue;
            }
        }
        intervals_.push_back(iv);
    }
}

bool DoSSignal::active(double t) const {
    if (t < 0.0 || t > horizon_) throw OutOfHorizon("query time outside [0, horizon]");
    // first interval with start > t, then look left
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double v, const DoSInterval& iv) { return v < iv.start; });
    if (it == intervals_.begin()) return false;
    --it;
    if (it->length == 0.0) return t == it->start;
    return t < it->end();
}

double DoSSignal::active_measure(double from, double to) const {
    if (to < from) throw BadRange("window end before start");
    double total = 0.0;
    for (const auto& iv : intervals_) {
        const double lo = std::max(from, iv.start);
        const double hi = std::min(to, iv.end());
        if (hi > lo) total += hi - lo;
    }
    return total;
}

double DoSSignal::inactive_measure(double from, double to) const {
    return (to - from) - active_measure(from, to);
}

int DoSSignal::transition_count(double from, double to) const {
    if (to < from) throw BadRange("window end before start");
    int count = 0;
    for (const auto& iv : intervals_)
        if (iv.start >= from && iv.start < to) ++count;
    return count;
}

void DoSBudget::validate() const {
    if (!(tau_d > 0.0)) throw BadRange("tau_d must be positive");
    if (!(t_ratio > 1.0)) throw BadRange("t_ratio must exceed 1");
    if (eta < 0.0 || kappa < 0.0) throw BadRange("eta and kappa must be nonnegative");
}

namespace {

// Worst windows for both budget inequalities. The frequency excess
// n(tau,t) - (t-tau)/tau_d is maximized in the limit t -> h_b (from above)
// with tau = h_a, i.e. over transition pairs counted inclusively; the
// duration excess is piecewise linear with slope sign changes only at
// interval endpoints, so [h_a, h_b + len_b] windows are exhaustive.
struct WorstWindows {
    BudgetWitness frequency;  // value = transition count
    BudgetWitness duration;   // value = attacked measure
    double frequency_excess = 0.0;
    double duration_excess = 0.0;
};

WorstWindows worst_windows(const DoSSignal& signal, double tau_d, double t_ratio) {
    WorstWindows out;
    const auto& ivs = signal.intervals();
    const int n = static_cast<int>(ivs.size());

    std::vector<double> prefix_len(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix_len[i + 1] = prefix_len[i] + ivs[i].length;

    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            const double count = static_cast<double>(b - a + 1);
            const double span_f = ivs[b].start - ivs[a].start;
            const double excess_f = count - span_f / tau_d;
            if (excess_f > out.frequency_excess) {
                out.frequency_excess = excess_f;
                out.frequency = {ivs[a].start, ivs[b].start, count, 0.0};
            }
            const double measure = prefix_len[b + 1] - prefix_len[a];
            const double span_d = ivs[b].end() - ivs[a].start;
            const double excess_d = measure - span_d / t_ratio;
            if (excess_d > out.duration_excess) {
                out.duration_excess = excess_d;
                out.duration = {ivs[a].start, ivs[b].end(), measure, 0.0};
            }
        }
    }
    return out;
}

}  // namespace

BudgetCheck check_budget(const DoSSignal& signal, const DoSBudget& budget) {
    budget.validate();
    BudgetCheck out;
    auto worst = worst_windows(signal, budget.tau_d, budget.t_ratio);
    worst.frequency.allowed =
        budget.eta + (worst.frequency.to - worst.frequency.from) / budget.tau_d;
    worst.duration.allowed =
        budget.kappa + (worst.duration.to - worst.duration.from) / budget.t_ratio;
    out.worst_frequency = worst.frequency;
    out.worst_duration = worst.duration;
    out.frequency_ok = worst.frequency_excess <= budget.eta + tol::kBudgetSlack;
    out.duration_ok = worst.duration_excess <= budget.kappa + tol::kBudgetSlack;
    return out;
}

BudgetFit fit_budget(const DoSSignal& signal, double tau_d, double t_ratio) {
    if (!(tau_d > 0.0)) throw BadRange("tau_d must be positive");
    if (!(t_ratio > 1.0)) throw BadRange("t_ratio must exceed 1");
    const auto worst = worst_windows(signal, tau_d, t_ratio);
    return {std::max(0.0, worst.frequency_excess), std::max(0.0, worst.duration_excess)};
}

namespace {

// Deterministic uniform in [0, 1) from raw engine output; avoids the
// implementation-defined std::distributions so traces are portable.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_exponential(std::mt19937_64& rng, double mean) {
    return -mean * std::log1p(-next_uniform(rng));
}

}  // namespace

DoSSignal generate(const GeneratorSpec& spec, std::uint64_t seed, double horizon) {
    if (!(horizon > 0.0)) throw InfeasibleSpec("generator horizon must be positive");
    std::vector<DoSInterval> intervals;

    if (const auto* periodic = std::get_if<PeriodicSpec>(&spec)) {
        if (!(periodic->period > 0.0)) throw InfeasibleSpec("period must be positive");
        if (periodic->duty < 0.0 || periodic->duty >= 1.0)
            throw InfeasibleSpec("duty must lie in [0, 1)");
        if (periodic->duty > 0.0) {
            const double len = periodic->duty * periodic->period;
            for (int k = 0;; ++k) {
                const double start = k * periodic->period;
                if (start >= horizon - tol::kTimeGrid * std::max(1.0, horizon)) break;
                intervals.push_back({start, std::min(len, horizon - start)});
            }
        }
    } else if (const auto* bursts = std::get_if<RandomBurstsSpec>(&spec)) {
        if (!(bursts->mean_gap > 0.0)) throw InfeasibleSpec("mean_gap must be positive");
        if (bursts->mean_length < 0.0) throw InfeasibleSpec("mean_length must be nonnegative");
        std::mt19937_64 rng(seed);
        double t = 0.0;
        while (true) {
            t += next_exponential(rng, bursts->mean_gap);
            if (t >= horizon) break;
            const double len =
                std::min(next_exponential(rng, bursts->mean_length), horizon - t);
            intervals.push_back({t, len});
            t += len;
        }
    } else {
        const auto& train = std::get<PulseTrainSpec>(spec);
        if (train.times.size() != train.lengths.size())
            throw InfeasibleSpec("pulse train needs matching times and lengths");
        for (size_t i = 0; i < train.times.size(); ++i) {
            if (train.lengths[i] < 0.0) throw InfeasibleSpec("pulse lengths must be nonnegative");
            intervals.push_back({train.times[i], train.lengths[i]});
        }
    }
    return DoSSignal(std::move(intervals), horizon);
}

}  // namespace dossim
