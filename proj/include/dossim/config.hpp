#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dossim/certificate.hpp"
#include "dossim/dos.hpp"
#include "dossim/plant.hpp"

namespace dossim {

using json = nlohmann::ordered_json;

enum class PolicyKind { kRoundRobin, kEventTriggered, kHybrid };

struct PolicyBlock {
    PolicyKind kind = PolicyKind::kRoundRobin;
    double delta = 0.0;     // slot length for round_robin / hybrid
    std::vector<double> c;  // trigger floors for event_triggered / hybrid
};

struct RunBlock {
    double horizon = 0.0;
    std::optional<double> step;  // default: delta/10, or 1e-4 for pure ET
    std::vector<double> x0;
    std::string trace_path = "trace.csv";
    std::string report_path = "report.json";
};

/**
 * A parsed experiment file. `echo` keeps the normalized document (with any
 * command-line overrides applied) so reports can reproduce the exact run.
 */
struct ExperimentConfig {
    PlantModel model;
    CertificateOptions certificate;
    std::optional<PolicyBlock> policy;
    std::optional<DoSBudget> budget;
    std::optional<GeneratorSpec> generator;
    std::uint64_t seed = 0;
    std::optional<std::vector<DoSInterval>> pulses;
    std::optional<double> dos_horizon;
    std::optional<RunBlock> run;
    json echo;

    double signal_horizon() const;
    DoSSignal make_signal() const;
    double effective_step() const;
};

/// Parses a config document; unknown keys and malformed fields raise
/// ConfigError with a field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_json(const json& doc);
ExperimentConfig load_config_file(const std::string& path);

/// Overrides applied after parsing (mirrored into the echo).
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<double> horizon;
};
ExperimentConfig apply_overrides(ExperimentConfig cfg, const ConfigOverrides& ov);

/// Built-in experiment files reproducing the two worked examples.
const std::vector<std::string>& builtin_example_names();
json builtin_example(const std::string& name);

}  // namespace dossim
