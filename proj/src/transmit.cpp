#include "dossim/transmit.hpp"

#include <algorithm>
#include <cmath>

#include "dossim/errors.hpp"
#include "dossim/tolerances.hpp"

namespace dossim {

std::vector<std::pair<double, int>> RoundRobinSchedule::attempts_in(double from, double to) const {
    if (to < from) throw BadRange("window end before start");
    std::vector<std::pair<double, int>> out;
    if (n_subsystems <= 0 || !(delta > 0.0)) return out;
    const double pad = tol::kTimeGrid * std::max(1.0, std::abs(from));
    long slot = static_cast<long>(std::ceil(from / delta - pad));
    if (slot < 0) slot = 0;
    while (slot_time(slot) < from - pad) ++slot;
    for (; slot_time(slot) < to - tol::kTimeGrid * std::max(1.0, std::abs(to)); ++slot)
        out.emplace_back(slot_time(slot), slot_subsystem(slot));
    return out;
}

bool TriggerMonitor::fires(int id, std::span<const double> x_i,
                           std::span<const double> held_i) const {
    if (x_i.size() != held_i.size()) throw DimensionMismatch("trigger state size mismatch");
    const int i = id - 1;
    double err_sq = 0.0;
    for (size_t r = 0; r < x_i.size(); ++r) {
        const double d = held_i[r] - x_i[r];
        err_sq += d * d;
    }
    const double threshold = std::max(params.sigma[i] * vec_norm(x_i), params.c[i]);
    return std::sqrt(err_sq) >= threshold;
}

const char* mode_name(PolicyMode mode) {
    switch (mode) {
        case PolicyMode::kRoundRobin: return "RR";
        case PolicyMode::kEventTriggered: return "ET";
        case PolicyMode::kRrRecovery: return "RRREC";
    }
    return "?";
}

std::vector<TransmissionEvent> hybrid_step(HybridState& state, double now,
                                           const std::set<int>& fired, const DoSSignal& dos,
                                           const RoundRobinSchedule& schedule,
                                           std::optional<long> slot_at_now) {
    std::vector<TransmissionEvent> events;

    if (state.mode == PolicyMode::kEventTriggered) {
        const bool denied = !fired.empty() && dos.active(now);
        for (int id : fired)
            events.push_back({now, id, true, !denied, PolicyMode::kEventTriggered});
        if (denied) {
            // a failed attempt is the only DoS detector: recover everyone
            state.mode = PolicyMode::kRrRecovery;
            state.pending.clear();
            for (int id = 1; id <= schedule.n_subsystems; ++id) state.pending.insert(id);
            state.rr_cursor =
                static_cast<long>(std::floor(now / schedule.delta + tol::kTimeGrid)) + 1;
        }
        return events;
    }

    // recovery: attempt only on the slot grid, every slot, DoS or not
    long slot = -1;
    if (slot_at_now) {
        slot = *slot_at_now;
    } else {
        const double rounded = std::round(now / schedule.delta);
        if (std::abs(now - rounded * schedule.delta) <=
            tol::kTimeGrid * std::max(1.0, std::abs(now)))
            slot = static_cast<long>(rounded);
    }
    if (slot < state.rr_cursor) return events;

    state.rr_cursor = slot + 1;
    const int id = schedule.slot_subsystem(slot);
    const bool ok = !dos.active(now);
    events.push_back({now, id, true, ok, PolicyMode::kRrRecovery});
    if (ok) {
        state.pending.erase(id);
        if (state.pending.empty()) state.mode = PolicyMode::kEventTriggered;
    }
    return events;
}

}  // namespace dossim
