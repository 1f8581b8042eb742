#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dossim/certificate.hpp"
#include "dossim/dos.hpp"
#include "dossim/plant.hpp"
#include "dossim/transmit.hpp"

namespace dossim {

struct RoundRobinPolicy {
    double delta = 0.0;
};

struct EventTriggeredPolicy {
    TriggerParams trigger;
};

struct HybridPolicy {
    double delta = 0.0;
    TriggerParams trigger;
};

using Policy = std::variant<RoundRobinPolicy, EventTriggeredPolicy, HybridPolicy>;

struct SimConfig {
    PlantModel model;
    Policy policy;
    DoSSignal dos;
    std::vector<double> x0;
    double horizon = 0.0;
    double step = 0.0;
    std::optional<GainCertificate> cert;  // enables the Lyapunov column
};

struct SubsystemCounters {
    long attempts = 0;
    long successes = 0;
};

/**
 * Fixed-step trace: one sample per integrator step, plus the transmission
 * event log and per-subsystem counters. Held samples change exactly at step
 * boundaries. `aborted` marks a numerical-blowup stop with a partial trace.
 */
struct SimTrace {
    int state_dim = 0;
    double step = 0.0;
    std::vector<double> times;
    std::vector<double> states;  // flattened, stride = state_dim
    std::vector<double> held;
    std::vector<double> v_total;
    std::vector<std::uint8_t> dos_flag;
    std::vector<PolicyMode> mode;
    std::vector<TransmissionEvent> events;
    std::vector<SubsystemCounters> counters;
    bool aborted = false;
    double abort_time = 0.0;

    size_t samples() const { return times.size(); }
    std::span<const double> state_at(size_t s) const {
        return {states.data() + s * state_dim, static_cast<size_t>(state_dim)};
    }
    std::span<const double> held_at(size_t s) const {
        return {held.data() + s * state_dim, static_cast<size_t>(state_dim)};
    }
    long attempts_total() const;
    long successes_total() const;
};

/// Runs the closed loop under the configured policy and attack signal.
/// Deterministic: identical configs yield identical traces.
SimTrace run(const SimConfig& cfg);

/// V(t) = sum_i mu_i x_i' P_i x_i along the trace.
std::vector<std::pair<double, double>> lyapunov_series(const SimTrace& trace,
                                                       const GainCertificate& cert);

struct EnvelopeReport {
    bool certified = false;  // beta_star > 0
    double max_ratio = 0.0;
    std::optional<double> first_violation;
    std::string verdict;
};

/// Pointwise comparison of the recorded V against the switched decay
/// envelope. Advisory: with beta_star > 0 a violation indicates the
/// inter-sampling hypothesis fails for the chosen slot length.
EnvelopeReport envelope_check(const SimTrace& trace, const EnvelopeParams& env);

struct ProbeResult {
    double delta = 0.0;
    std::vector<double> worst_ratio;  // per subsystem, ||e_i|| / ||x_i||
    bool pass = false;
};

/// Empirical check of the Round-robin inter-sampling hypothesis: simulates
/// one DoS-free round per probe state and reports the worst error/state
/// ratio for each candidate slot length.
std::vector<ProbeResult> inter_sampling_probe(const PlantModel& model, std::span<const double> sigma,
                                           std::span<const double> delta_candidates,
                                           const std::vector<std::vector<double>>& probe_states);

}  // namespace dossim
