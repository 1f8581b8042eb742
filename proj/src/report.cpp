#include "dossim/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dossim/errors.hpp"

namespace dossim {

std::string format_significant(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double round_significant(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_significant(v).c_str(), nullptr);
}

std::string format_exact(double v) {
    char buf[64];
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

namespace {

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return round_significant(v);
}

json vector_to_json(std::span<const double> v) {
    json out = json::array();
    for (double x : v) out.push_back(number_or_null(x));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(round_significant(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

Policy make_policy(const PolicyBlock& block, const GainCertificate& cert) {
    switch (block.kind) {
        case PolicyKind::kRoundRobin:
            return RoundRobinPolicy{block.delta};
        case PolicyKind::kEventTriggered:
            return EventTriggeredPolicy{TriggerParams{cert.sigma, block.c}};
        case PolicyKind::kHybrid:
            return HybridPolicy{block.delta, TriggerParams{cert.sigma, block.c}};
    }
    throw ConfigError("unreachable policy kind");
}

}  // namespace

AnalysisOutcome analyze(const ExperimentConfig& cfg) {
    AnalysisOutcome out;
    out.cert = build_certificate(cfg.model, cfg.certificate);

    if (cfg.budget) {
        const auto signal = cfg.make_signal();
        if (signal.horizon() > 0.0) {
            out.budget_fit = fit_budget(signal, cfg.budget->tau_d, cfg.budget->t_ratio);
            out.budget_check = check_budget(signal, *cfg.budget);
        }
        if (cfg.policy && cfg.policy->kind != PolicyKind::kEventTriggered) {
            out.admissibility = check_dos_admissible(*cfg.budget, cfg.model.count(),
                                                     cfg.policy->delta,
                                                     out.cert.resilience_bound);
            out.envelope = envelope_params(*cfg.budget, out.cert, cfg.model.count(),
                                           cfg.policy->delta);
        }
    }

    if (cfg.policy && cfg.policy->kind == PolicyKind::kHybrid) {
        if (!out.envelope) {
            out.practical_status = "no budget/slot data to derive the envelope";
        } else if (!(out.envelope->beta_star > 0.0)) {
            out.practical_status = "not certified: beta_star <= 0";
        } else {
            out.practical = practical_bound(out.cert, TriggerParams{out.cert.sigma, cfg.policy->c},
                                            *out.envelope);
        }
    }
    return out;
}

SimConfig make_sim_config(const ExperimentConfig& cfg, const GainCertificate& cert) {
    if (!cfg.policy) throw ConfigError("simulation needs a policy block");
    if (!cfg.run) throw ConfigError("simulation needs a run block");
    SimConfig sim;
    sim.model = cfg.model;
    sim.policy = make_policy(*cfg.policy, cert);
    sim.dos = cfg.make_signal();
    sim.x0 = cfg.run->x0;
    sim.horizon = cfg.run->horizon;
    sim.step = cfg.effective_step();
    sim.cert = cert;
    return sim;
}

json certificate_to_json(const GainCertificate& cert, const CertificateOverrides& overrides) {
    json j;
    j["delta"] = round_significant(cert.comparison.delta);
    j["small_gain_radius"] = round_significant(cert.small_gain_radius);
    json p = json::array();
    for (const auto& pi : cert.p) p.push_back(matrix_to_json(pi));
    j["p"] = std::move(p);
    j["p_lambda_min"] = vector_to_json(cert.p_lambda_min);
    j["p_lambda_max"] = vector_to_json(cert.p_lambda_max);
    j["a_diag"] = vector_to_json(cert.comparison.alpha);
    j["b_off"] = matrix_to_json(cert.comparison.beta);
    j["gamma"] = matrix_to_json(cert.comparison.gamma);
    json applied = json::array();
    if (overrides.alpha) applied.push_back("a_diag");
    if (overrides.beta) applied.push_back("b_off");
    if (overrides.gamma) applied.push_back("gamma");
    j["overrides_applied"] = std::move(applied);
    j["mu"] = vector_to_json(cert.mu);
    j["l_row"] = vector_to_json(cert.l_row);
    j["j_row"] = vector_to_json(cert.j_row);
    j["sigma_max"] = vector_to_json(cert.sigma_max);
    j["sigma"] = vector_to_json(cert.sigma);
    j["omega1"] = round_significant(cert.omega1);
    j["omega2"] = round_significant(cert.omega2);
    j["resilience_bound"] = round_significant(cert.resilience_bound);
    return j;
}

namespace {

json analysis_to_json(const ExperimentConfig& cfg, const AnalysisOutcome& outcome) {
    json j;
    j["certificate"] = certificate_to_json(outcome.cert, cfg.certificate.overrides);
    if (outcome.budget_fit && cfg.budget) {
        json fit;
        fit["tau_d"] = round_significant(cfg.budget->tau_d);
        fit["t_ratio"] = round_significant(cfg.budget->t_ratio);
        fit["eta_min"] = round_significant(outcome.budget_fit->eta_min);
        fit["kappa_min"] = round_significant(outcome.budget_fit->kappa_min);
        j["dos_budget_fit"] = std::move(fit);
    } else {
        j["dos_budget_fit"] = nullptr;
    }
    if (outcome.budget_check) {
        const auto witness = [](const BudgetWitness& w) {
            json out;
            out["from"] = round_significant(w.from);
            out["to"] = round_significant(w.to);
            out["value"] = round_significant(w.value);
            out["allowed"] = round_significant(w.allowed);
            return out;
        };
        json check;
        check["frequency_ok"] = outcome.budget_check->frequency_ok;
        check["duration_ok"] = outcome.budget_check->duration_ok;
        check["worst_frequency_window"] = witness(outcome.budget_check->worst_frequency);
        check["worst_duration_window"] = witness(outcome.budget_check->worst_duration);
        j["dos_budget_check"] = std::move(check);
    } else {
        j["dos_budget_check"] = nullptr;
    }
    if (outcome.admissibility) {
        json adm;
        adm["lhs"] = round_significant(outcome.admissibility->lhs);
        adm["rhs"] = round_significant(outcome.admissibility->rhs);
        adm["certified"] = outcome.admissibility->certified;
        j["admissibility"] = std::move(adm);
    } else {
        j["admissibility"] = nullptr;
    }
    if (outcome.envelope) {
        json env;
        env["delta_star"] = round_significant(outcome.envelope->delta_star);
        env["kappa_star"] = round_significant(outcome.envelope->kappa_star);
        env["t_star"] = round_significant(outcome.envelope->t_star);
        env["beta_star"] = round_significant(outcome.envelope->beta_star);
        j["envelope"] = std::move(env);
    } else {
        j["envelope"] = nullptr;
    }
    if (outcome.practical) {
        json pb;
        pb["c_total"] = round_significant(outcome.practical->c_total);
        pb["bound"] = round_significant(outcome.practical->bound);
        j["practical_bound"] = std::move(pb);
    } else if (!outcome.practical_status.empty()) {
        j["practical_bound"] = json{{"status", outcome.practical_status}};
    } else {
        j["practical_bound"] = nullptr;
    }
    return j;
}

}  // namespace

json certify_report(const ExperimentConfig& cfg, const AnalysisOutcome& outcome) {
    json j;
    j["tool"] = "dossim";
    j["kind"] = "certify";
    j.update(analysis_to_json(cfg, outcome));
    j["config_echo"] = cfg.echo;
    return j;
}

json simulate_report(const ExperimentConfig& cfg, const AnalysisOutcome& outcome,
                     const SimTrace& trace, const std::optional<EnvelopeReport>& env_report,
                     const std::string& trace_path) {
    json j;
    j["tool"] = "dossim";
    j["kind"] = "simulate";
    j.update(analysis_to_json(cfg, outcome));

    json tx;
    tx["attempts"] = trace.attempts_total();
    tx["successes"] = trace.successes_total();
    json per = json::array();
    for (size_t i = 0; i < trace.counters.size(); ++i) {
        json row;
        row["id"] = static_cast<int>(i + 1);
        row["attempts"] = trace.counters[i].attempts;
        row["successes"] = trace.counters[i].successes;
        per.push_back(std::move(row));
    }
    tx["per_subsystem"] = std::move(per);
    j["transmissions"] = std::move(tx);

    const double initial = vec_norm(trace.state_at(0));
    const double final_norm = vec_norm(trace.state_at(trace.samples() - 1));
    j["initial_state_norm"] = round_significant(initial);
    j["final_state_norm"] = round_significant(final_norm);
    j["final_over_initial"] =
        initial > 0.0 ? json(round_significant(final_norm / initial)) : json(nullptr);
    j["aborted"] = trace.aborted;
    if (trace.aborted) j["abort_time"] = round_significant(trace.abort_time);

    if (env_report) {
        json env;
        env["certified"] = env_report->certified;
        env["max_ratio"] = std::isfinite(env_report->max_ratio)
                               ? json(round_significant(env_report->max_ratio))
                               : json("inf");
        env["first_violation"] = env_report->first_violation
                                     ? json(round_significant(*env_report->first_violation))
                                     : json(nullptr);
        env["verdict"] = env_report->verdict;
        j["envelope_check"] = std::move(env);
    } else {
        j["envelope_check"] = nullptr;
    }
    j["outputs"] = json{{"trace", trace_path}};
    j["config_echo"] = cfg.echo;
    return j;
}

std::string trace_csv_header(const PlantModel& model) {
    std::string header = "t";
    for (const auto& s : model.subsystems)
        for (int r = 0; r < s.state_dim(); ++r)
            header += ",x_" + std::to_string(s.id) + "_" + std::to_string(r + 1);
    for (const auto& s : model.subsystems)
        for (int r = 0; r < s.state_dim(); ++r)
            header += ",held_" + std::to_string(s.id) + "_" + std::to_string(r + 1);
    header += ",v_total,dos_active,mode,tx_subsystem,tx_success";
    return header;
}

void write_trace_csv(std::ostream& out, const PlantModel& model, const SimTrace& trace) {
    out << trace_csv_header(model) << "\n";
    size_t ev = 0;
    for (size_t s = 0; s < trace.samples(); ++s) {
        const double t = trace.times[s];
        std::string prefix = format_significant(t);
        for (double v : trace.state_at(s)) prefix += "," + format_significant(v);
        for (double v : trace.held_at(s)) prefix += "," + format_significant(v);
        prefix += "," + format_significant(trace.v_total[s]);
        prefix += trace.dos_flag[s] ? ",1," : ",0,";
        prefix += mode_name(trace.mode[s]);

        // one row per sample; simultaneous transmissions get extra rows
        bool first = true;
        while (ev < trace.events.size() && trace.events[ev].time == t) {
            if (!first) out << "\n";
            out << prefix << "," << trace.events[ev].subsystem << ","
                << (trace.events[ev].succeeded ? 1 : 0);
            first = false;
            ++ev;
        }
        if (first) out << prefix << ",0,0";
        out << "\n";
    }
}

json signal_to_json(const DoSSignal& signal) {
    json out = json::array();
    for (const auto& iv : signal.intervals())
        out.push_back(json::array({format_exact(iv.start), format_exact(iv.length)}));
    return out;
}

DoSSignal signal_from_json(const json& j, double horizon) {
    if (!j.is_array()) throw ConfigError("signal: expected an array of [start, length] pairs");
    std::vector<DoSInterval> intervals;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw ConfigError("signal: each entry is [start, length]");
        const auto num = [](const json& v) {
            if (v.is_number()) return v.get<double>();
            if (v.is_string()) return std::strtod(v.get<std::string>().c_str(), nullptr);
            throw ConfigError("signal: entries must be numbers or decimal strings");
        };
        intervals.push_back({num(pair[0]), num(pair[1])});
    }
    return DoSSignal(std::move(intervals), horizon);
}

}  // namespace dossim
