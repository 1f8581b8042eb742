// dossim: small-gain certificates and transmission-policy simulation for
// networked distributed control systems under denial-of-service attacks.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dossim/config.hpp"
#include "dossim/errors.hpp"
#include "dossim/report.hpp"
#include "dossim/simulate.hpp"

namespace fs = std::filesystem;
using dossim::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitSmallGain = 2;
constexpr int kExitAborted = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<double> horizon;
};

dossim::ExperimentConfig load(const CommonOpts& opts) {
    auto cfg = dossim::load_config_file(opts.config_path);
    dossim::ConfigOverrides ov;
    ov.seed = opts.seed;
    ov.step = opts.step;
    ov.horizon = opts.horizon;
    return dossim::apply_overrides(std::move(cfg), ov);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dossim::ConfigError("cannot write " + path.string());
    out << content;
}

int run_certify(const CommonOpts& opts) {
    const auto cfg = load(opts);
    const auto outcome = dossim::analyze(cfg);
    const auto report = dossim::certify_report(cfg, outcome);
    std::cout << report.dump(2) << "\n";
    if (!opts.out_dir.empty()) {
        fs::create_directories(opts.out_dir);
        const std::string name = cfg.run ? cfg.run->report_path : "report.json";
        write_file(fs::path(opts.out_dir) / name, report.dump(2) + "\n");
    }
    return kExitOk;
}

int simulate_one(const dossim::ExperimentConfig& cfg, const fs::path& out_dir, bool quiet) {
    const auto outcome = dossim::analyze(cfg);
    const auto sim_cfg = dossim::make_sim_config(cfg, outcome.cert);
    const auto trace = dossim::run(sim_cfg);
    std::optional<dossim::EnvelopeReport> env_report;
    if (outcome.envelope) env_report = dossim::envelope_check(trace, *outcome.envelope);

    fs::create_directories(out_dir);
    const fs::path trace_path = out_dir / cfg.run->trace_path;
    const fs::path report_path = out_dir / cfg.run->report_path;
    {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) throw dossim::ConfigError("cannot write " + trace_path.string());
        dossim::write_trace_csv(out, cfg.model, trace);
    }
    const auto report =
        dossim::simulate_report(cfg, outcome, trace, env_report, cfg.run->trace_path);
    write_file(report_path, report.dump(2) + "\n");

    if (!quiet) {
        std::cout << "certificate: r=" << dossim::format_significant(outcome.cert.small_gain_radius)
                  << " bound=" << dossim::format_significant(outcome.cert.resilience_bound) << "\n";
        if (outcome.admissibility)
            std::cout << "admissibility: lhs="
                      << dossim::format_significant(outcome.admissibility->lhs) << " -> "
                      << (outcome.admissibility->certified ? "certified" : "not certified")
                      << "\n";
        std::cout << "transmissions: " << trace.successes_total() << "/" << trace.attempts_total()
                  << " successes/attempts\n";
        std::cout << "final |x| = "
                  << dossim::format_significant(dossim::vec_norm(
                         trace.state_at(trace.samples() - 1)))
                  << (trace.aborted ? " (aborted)" : "") << "\n";
        std::cout << "wrote " << trace_path.string() << " " << report_path.string() << "\n";
    }
    return trace.aborted ? kExitAborted : kExitOk;
}

int run_simulate(const CommonOpts& opts) {
    const auto cfg = load(opts);
    return simulate_one(cfg, opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir),
                        false);
}

dossim::DoSSignal load_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dossim::ConfigError("cannot open signal file: " + path);
    if (fs::path(path).extension() == ".csv") {
        // reconstruct attack intervals from a trace's dos_active column
        std::string line;
        if (!std::getline(in, line)) throw dossim::ConfigError("empty trace file");
        std::vector<std::string> cols;
        std::stringstream header(line);
        std::string col;
        while (std::getline(header, col, ',')) cols.push_back(col);
        long t_idx = -1, dos_idx = -1;
        for (size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] == "t") t_idx = static_cast<long>(i);
            if (cols[i] == "dos_active") dos_idx = static_cast<long>(i);
        }
        if (t_idx < 0 || dos_idx < 0)
            throw dossim::ConfigError("trace file lacks t/dos_active columns");
        std::vector<dossim::DoSInterval> intervals;
        double horizon = 0.0, last_t = -1.0;
        bool active = false;
        double start = 0.0;
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string field;
            double t = 0.0;
            bool dos = false;
            for (long i = 0; std::getline(row, field, ','); ++i) {
                if (i == t_idx) t = std::strtod(field.c_str(), nullptr);
                if (i == dos_idx) dos = field == "1";
            }
            if (t == last_t) continue;  // event continuation rows repeat the sample
            last_t = t;
            horizon = t;
            if (dos && !active) {
                active = true;
                start = t;
            } else if (!dos && active) {
                active = false;
                intervals.push_back({start, t - start});
            }
        }
        if (active) intervals.push_back({start, horizon - start});
        return dossim::DoSSignal(std::move(intervals), horizon);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw dossim::ConfigError(std::string("signal parse error: ") + e.what());
    }
    const dossim::json* pulses = nullptr;
    double horizon = 0.0;
    if (doc.is_array()) {
        pulses = &doc;
    } else {
        if (!doc.contains("pulses"))
            throw dossim::ConfigError("signal file needs a pulses array");
        pulses = &doc.at("pulses");
        if (doc.contains("horizon"))
            horizon = doc.at("horizon").is_string()
                          ? std::strtod(doc.at("horizon").get<std::string>().c_str(), nullptr)
                          : doc.at("horizon").get<double>();
    }
    if (horizon == 0.0) {
        const auto unbounded = dossim::signal_from_json(*pulses, 1e300);
        for (const auto& iv : unbounded.intervals()) horizon = std::max(horizon, iv.end());
    }
    return dossim::signal_from_json(*pulses, horizon);
}

int run_fit_dos(const std::string& signal_path, double tau_d, double t_ratio,
                std::optional<double> bound, std::optional<int> n, std::optional<double> delta,
                const std::string& config_path) {
    dossim::DoSSignal signal = load_signal(signal_path);
    const auto fit = dossim::fit_budget(signal, tau_d, t_ratio);

    json out;
    out["tau_d"] = dossim::round_significant(tau_d);
    out["t_ratio"] = dossim::round_significant(t_ratio);
    out["eta_min"] = dossim::round_significant(fit.eta_min);
    out["kappa_min"] = dossim::round_significant(fit.kappa_min);

    if (!config_path.empty()) {
        const auto cfg = dossim::load_config_file(config_path);
        const auto outcome = dossim::analyze(cfg);
        bound = outcome.cert.resilience_bound;
        if (cfg.policy && cfg.policy->kind != dossim::PolicyKind::kEventTriggered) {
            n = cfg.model.count();
            delta = cfg.policy->delta;
        }
    }
    if (bound && n && delta) {
        dossim::DoSBudget budget{fit.eta_min, tau_d, fit.kappa_min, t_ratio};
        const auto adm = dossim::check_dos_admissible(budget, *n, *delta, *bound);
        out["lhs"] = dossim::round_significant(adm.lhs);
        out["rhs"] = dossim::round_significant(adm.rhs);
        out["certified"] = adm.certified;
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int run_sweep(const std::vector<std::string>& config_paths, const std::string& out_dir,
              unsigned jobs, std::optional<std::uint64_t> seed) {
    if (config_paths.empty()) throw dossim::ConfigError("sweep needs at least one config");
    fs::create_directories(out_dir);

    struct Task {
        std::string path;
        int code = kExitOk;
        std::string message;
    };
    std::vector<Task> tasks;
    for (const auto& p : config_paths) tasks.push_back({p});

    std::atomic<size_t> next{0};
    const unsigned workers =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            auto& task = tasks[i];
            try {
                auto cfg = dossim::load_config_file(task.path);
                dossim::ConfigOverrides ov;
                ov.seed = seed;
                cfg = dossim::apply_overrides(std::move(cfg), ov);
                const fs::path run_dir = fs::path(out_dir) / fs::path(task.path).stem();
                task.code = simulate_one(cfg, run_dir, true);
                task.message = "ok -> " + run_dir.string();
                if (task.code == kExitAborted) task.message = "aborted -> " + run_dir.string();
            } catch (const dossim::SmallGainViolated& e) {
                task.code = kExitSmallGain;
                task.message = e.what();
            } catch (const std::exception& e) {
                task.code = kExitParse;
                task.message = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    int worst = kExitOk;
    for (const auto& task : tasks) {
        std::cout << task.path << ": " << task.message << "\n";
        worst = std::max(worst, task.code);
    }
    return worst;
}

int run_gen_example(const std::string& name, std::string out_path, bool list) {
    if (list) {
        for (const auto& n : dossim::builtin_example_names()) std::cout << n << "\n";
        return kExitOk;
    }
    const auto doc = dossim::builtin_example(name);
    if (out_path.empty()) out_path = name + ".json";
    write_file(out_path, doc.dump(2) + "\n");
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-gain certificates and DoS-resilience simulation for "
                 "networked distributed control systems"};
    app.require_subcommand(1);

    CommonOpts certify_opts, sim_opts;

    auto* certify = app.add_subcommand("certify", "Run the certificate analysis only");
    certify->add_option("--config", certify_opts.config_path, "experiment file")->required();
    certify->add_option("--out-dir", certify_opts.out_dir, "also write the report here");

    auto* simulate = app.add_subcommand("simulate", "Simulate and write trace + report");
    simulate->add_option("--config", sim_opts.config_path, "experiment file")->required();
    simulate->add_option("--out-dir", sim_opts.out_dir, "output directory (default .)");
    simulate->add_option("--seed", sim_opts.seed, "override the DoS generator seed");
    simulate->add_option("--step", sim_opts.step, "override the integrator step");
    simulate->add_option("--horizon", sim_opts.horizon, "override the simulation horizon");

    std::string fit_signal, fit_config;
    double fit_tau_d = 0.0, fit_t_ratio = 0.0;
    std::optional<double> fit_bound, fit_delta;
    std::optional<int> fit_n;
    auto* fit = app.add_subcommand("fit-dos", "Fit the tightest eta/kappa budget to a signal");
    fit->add_option("--signal", fit_signal, "signal JSON or trace CSV")->required();
    fit->add_option("--tau-d", fit_tau_d, "average dwell time")->required();
    fit->add_option("--t-ratio", fit_t_ratio, "duration ratio T")->required();
    fit->add_option("--bound", fit_bound, "resilience bound for the admissibility check");
    fit->add_option("--n", fit_n, "subsystem count for the admissibility check");
    fit->add_option("--delta", fit_delta, "slot length for the admissibility check");
    fit->add_option("--config", fit_config, "pull bound/n/delta from this experiment file");

    std::vector<std::string> sweep_configs;
    std::string sweep_out;
    unsigned sweep_jobs = std::max(1u, std::thread::hardware_concurrency());
    std::optional<std::uint64_t> sweep_seed;
    auto* sweep = app.add_subcommand("sweep", "Run several configs in parallel");
    sweep->add_option("configs", sweep_configs, "experiment files")->required();
    sweep->add_option("--out-dir", sweep_out, "output root (one directory per run)")->required();
    sweep->add_option("--jobs", sweep_jobs, "parallel workers");
    sweep->add_option("--seed", sweep_seed, "override every DoS generator seed");

    std::string gen_name, gen_out;
    bool gen_list = false;
    auto* gen = app.add_subcommand("gen-example", "Write a built-in experiment file");
    gen->add_option("--name", gen_name, "example1[-rr|-hybrid], example2[-rr|-hybrid]");
    gen->add_option("--out", gen_out, "output path (default <name>.json)");
    gen->add_flag("--list", gen_list, "list available names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify->parsed()) return run_certify(certify_opts);
        if (simulate->parsed()) return run_simulate(sim_opts);
        if (fit->parsed())
            return run_fit_dos(fit_signal, fit_tau_d, fit_t_ratio, fit_bound, fit_n, fit_delta,
                               fit_config);
        if (sweep->parsed()) return run_sweep(sweep_configs, sweep_out, sweep_jobs, sweep_seed);
        if (gen->parsed()) {
            if (!gen_list && gen_name.empty()) {
                std::cerr << "gen-example needs --name or --list\n";
                return kExitParse;
            }
            return run_gen_example(gen_name, gen_out, gen_list);
        }
    } catch (const dossim::SmallGainViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSmallGain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}
