#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "dossim/config.hpp"
#include "dossim/simulate.hpp"

namespace dossim {

/// Value formatted with 12 significant digits (report precision).
std::string format_significant(double v);
/// Same value rounded through its 12-digit decimal form.
double round_significant(double v);
/// Shortest decimal string that parses back to exactly v.
std::string format_exact(double v);

/// Certificate analysis plus the budget checks derivable from the config.
struct AnalysisOutcome {
    GainCertificate cert;
    std::optional<BudgetFit> budget_fit;
    std::optional<BudgetCheck> budget_check;  // stated budget vs the actual signal
    std::optional<AdmissibilityCheck> admissibility;
    std::optional<EnvelopeParams> envelope;
    std::optional<PracticalBound> practical;
    std::string practical_status;  // reason when `practical` is absent
};

AnalysisOutcome analyze(const ExperimentConfig& cfg);

/// Simulation-ready config assembled from the experiment file.
SimConfig make_sim_config(const ExperimentConfig& cfg, const GainCertificate& cert);

json certificate_to_json(const GainCertificate& cert, const CertificateOverrides& overrides);
json certify_report(const ExperimentConfig& cfg, const AnalysisOutcome& outcome);
json simulate_report(const ExperimentConfig& cfg, const AnalysisOutcome& outcome,
                     const SimTrace& trace, const std::optional<EnvelopeReport>& env_report,
                     const std::string& trace_path);

std::string trace_csv_header(const PlantModel& model);
void write_trace_csv(std::ostream& out, const PlantModel& model, const SimTrace& trace);

/// DoS signal as [start, length] decimal-string pairs (drift-free round trip).
json signal_to_json(const DoSSignal& signal);
DoSSignal signal_from_json(const json& j, double horizon);

}  // namespace dossim
