#pragma once

#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dossim/certificate.hpp"
#include "dossim/dos.hpp"

namespace dossim {

/// Time-slotted schedule: slot k starts at k * delta and belongs to
/// subsystem (k mod N) + 1, so a full round spans N * delta.
struct RoundRobinSchedule {
    int n_subsystems = 0;
    double delta = 0.0;

    int slot_subsystem(long slot) const { return static_cast<int>(slot % n_subsystems) + 1; }
    double slot_time(long slot) const { return static_cast<double>(slot) * delta; }

    /// All (time, subsystem) slots with time in [from, to), in order.
    std::vector<std::pair<double, int>> attempts_in(double from, double to) const;
};

/// The event-trigger monitor: fires when the held-state error reaches
/// max(sigma_i ||x_i||, c_i).
struct TriggerMonitor {
    TriggerParams params;

    bool fires(int id, std::span<const double> x_i, std::span<const double> held_i) const;
};

enum class PolicyMode { kRoundRobin, kEventTriggered, kRrRecovery };

const char* mode_name(PolicyMode mode);  // "RR", "ET", "RRREC"

struct TransmissionEvent {
    double time = 0.0;
    int subsystem = 0;
    bool attempted = false;
    bool succeeded = false;
    PolicyMode mode = PolicyMode::kEventTriggered;
};

/**
 * Hybrid policy state. Event-triggered while the channel looks healthy; a
 * failed attempt reveals DoS and switches to Round-robin recovery until
 * every subsystem gets one successful update, after which event triggering
 * resumes. Recovery slots stay on the global grid anchored at t = 0.
 */
struct HybridState {
    PolicyMode mode = PolicyMode::kEventTriggered;
    std::set<int> pending;  // not yet refreshed since recovery began
    long rr_cursor = 0;     // next recovery slot index

    bool consistent() const { return mode != PolicyMode::kEventTriggered || pending.empty(); }
};

/// Advances the hybrid machine at time `now` given the set of subsystems
/// whose triggers fired; returns the transmission events at this instant.
/// `slot_at_now` identifies `now` on the slot grid when the caller already
/// knows it; otherwise grid membership is derived within tolerance.
std::vector<TransmissionEvent> hybrid_step(HybridState& state, double now,
                                           const std::set<int>& fired, const DoSSignal& dos,
                                           const RoundRobinSchedule& schedule,
                                           std::optional<long> slot_at_now = std::nullopt);

}  // namespace dossim
