#include "dossim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dossim/errors.hpp"

namespace dossim {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            fail(path + "." + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') fail(path, "not a decimal number: '" + s + "'");
        return v;
    }
    fail(path, "expected a number (or decimal string)");
}

double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing");
    return get_number(j.at(key), path + "." + key);
}

std::vector<double> parse_vector(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Matrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nested array");
    const int rows = static_cast<int>(j.size());
    int cols = -1;
    Matrix m;
    for (int r = 0; r < rows; ++r) {
        const auto row = parse_vector(j[r], path + "[" + std::to_string(r) + "]");
        if (cols < 0) {
            cols = static_cast<int>(row.size());
            if (cols == 0) fail(path, "empty matrix row");
            m = Matrix(rows, cols);
        } else if (static_cast<int>(row.size()) != cols) {
            fail(path, "ragged matrix rows");
        }
        for (int c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

int parse_id_key(const std::string& key, const std::string& path) {
    char* end = nullptr;
    const long v = std::strtol(key.c_str(), &end, 10);
    if (end == key.c_str() || *end != '\0' || v < 1) fail(path + "." + key, "not a subsystem id");
    return static_cast<int>(v);
}

std::map<int, Matrix> parse_coupling_map(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object keyed by neighbor id");
    std::map<int, Matrix> out;
    for (const auto& [key, value] : j.items())
        out[parse_id_key(key, path)] = parse_matrix(value, path + "." + key);
    return out;
}

PlantModel parse_plant(const json& j, const std::string& path) {
    expect_keys(j, path, {"subsystems", "neighbors"});
    if (!j.contains("subsystems")) fail(path + ".subsystems", "missing");
    const auto& subs = j.at("subsystems");
    if (!subs.is_array() || subs.empty()) fail(path + ".subsystems", "expected a nonempty array");

    std::vector<Subsystem> list;
    for (size_t i = 0; i < subs.size(); ++i) {
        const std::string sp = path + ".subsystems[" + std::to_string(i) + "]";
        const auto& sj = subs[i];
        expect_keys(sj, sp, {"id", "a", "b", "k", "q", "coupling_physical", "coupling_control"});
        Subsystem s;
        s.id = sj.contains("id") ? static_cast<int>(require_number(sj, sp, "id"))
                                 : static_cast<int>(i + 1);
        for (const char* key : {"a", "b", "k", "q"})
            if (!sj.contains(key)) fail(sp + "." + key, "missing");
        s.a = parse_matrix(sj.at("a"), sp + ".a");
        s.b = parse_matrix(sj.at("b"), sp + ".b");
        s.k = parse_matrix(sj.at("k"), sp + ".k");
        s.q = parse_matrix(sj.at("q"), sp + ".q");
        if (sj.contains("coupling_physical"))
            s.coupling_physical = parse_coupling_map(sj.at("coupling_physical"),
                                                     sp + ".coupling_physical");
        if (sj.contains("coupling_control"))
            s.coupling_control = parse_coupling_map(sj.at("coupling_control"),
                                                    sp + ".coupling_control");
        list.push_back(std::move(s));
    }

    if (!j.contains("neighbors")) return PlantModel::with_inferred_neighbors(std::move(list));

    PlantModel model;
    model.subsystems = std::move(list);
    const auto& nb = j.at("neighbors");
    if (!nb.is_object()) fail(path + ".neighbors", "expected an object keyed by subsystem id");
    for (const auto& [key, value] : nb.items()) {
        const int id = parse_id_key(key, path + ".neighbors");
        if (!value.is_array()) fail(path + ".neighbors." + key, "expected an array of ids");
        auto& set = model.neighbors[id];
        for (const auto& v : value)
            set.insert(static_cast<int>(get_number(v, path + ".neighbors." + key)));
    }
    return model;
}

CertificateOptions parse_certificate(const json& j, const std::string& path) {
    expect_keys(j, path, {"delta", "mu", "sigma", "overrides"});
    CertificateOptions opt;
    const auto is_auto = [](const json& v) { return v.is_string() && v == "auto"; };
    if (j.contains("delta") && !is_auto(j.at("delta")))
        opt.delta = get_number(j.at("delta"), path + ".delta");
    if (j.contains("mu") && !is_auto(j.at("mu")))
        opt.mu = parse_vector(j.at("mu"), path + ".mu");
    if (j.contains("sigma") && !is_auto(j.at("sigma")))
        opt.sigma = parse_vector(j.at("sigma"), path + ".sigma");
    if (j.contains("overrides")) {
        const auto& ov = j.at("overrides");
        expect_keys(ov, path + ".overrides", {"a_diag", "b_off", "gamma"});
        if (ov.contains("a_diag"))
            opt.overrides.alpha = parse_vector(ov.at("a_diag"), path + ".overrides.a_diag");
        if (ov.contains("b_off"))
            opt.overrides.beta = parse_matrix(ov.at("b_off"), path + ".overrides.b_off");
        if (ov.contains("gamma"))
            opt.overrides.gamma = parse_matrix(ov.at("gamma"), path + ".overrides.gamma");
    }
    return opt;
}

GeneratorSpec parse_generator(const json& j, const std::string& path, std::uint64_t& seed) {
    expect_keys(j, path,
                {"kind", "period", "duty", "mean_gap", "mean_length", "pulses", "seed"});
    if (!j.contains("kind")) fail(path + ".kind", "missing");
    const std::string kind = j.at("kind").get<std::string>();
    if (j.contains("seed")) seed = static_cast<std::uint64_t>(require_number(j, path, "seed"));
    if (kind == "periodic") {
        PeriodicSpec spec;
        spec.period = require_number(j, path, "period");
        spec.duty = require_number(j, path, "duty");
        return spec;
    }
    if (kind == "random_bursts") {
        RandomBurstsSpec spec;
        spec.mean_gap = require_number(j, path, "mean_gap");
        spec.mean_length = require_number(j, path, "mean_length");
        return spec;
    }
    if (kind == "pulse_train") {
        if (!j.contains("pulses")) fail(path + ".pulses", "missing");
        PulseTrainSpec spec;
        for (size_t i = 0; i < j.at("pulses").size(); ++i) {
            const auto pair = parse_vector(j.at("pulses")[i],
                                           path + ".pulses[" + std::to_string(i) + "]");
            if (pair.size() != 2) fail(path + ".pulses", "each pulse is [start, length]");
            spec.times.push_back(pair[0]);
            spec.lengths.push_back(pair[1]);
        }
        return spec;
    }
    fail(path + ".kind", "unknown generator kind '" + kind + "'");
}

PolicyBlock parse_policy(const json& j, const std::string& path) {
    expect_keys(j, path, {"kind", "delta", "c"});
    if (!j.contains("kind")) fail(path + ".kind", "missing");
    const std::string kind = j.at("kind").get<std::string>();
    PolicyBlock block;
    if (kind == "round_robin")
        block.kind = PolicyKind::kRoundRobin;
    else if (kind == "event_triggered")
        block.kind = PolicyKind::kEventTriggered;
    else if (kind == "hybrid")
        block.kind = PolicyKind::kHybrid;
    else
        fail(path + ".kind", "unknown policy kind '" + kind + "'");
    if (block.kind != PolicyKind::kEventTriggered) block.delta = require_number(j, path, "delta");
    if (block.kind != PolicyKind::kRoundRobin) {
        if (!j.contains("c")) fail(path + ".c", "missing");
        block.c = parse_vector(j.at("c"), path + ".c");
    }
    return block;
}

RunBlock parse_run(const json& j, const std::string& path) {
    expect_keys(j, path, {"horizon", "step", "x0", "trace", "report"});
    RunBlock run;
    run.horizon = require_number(j, path, "horizon");
    if (j.contains("step")) run.step = get_number(j.at("step"), path + ".step");
    if (!j.contains("x0")) fail(path + ".x0", "missing");
    run.x0 = parse_vector(j.at("x0"), path + ".x0");
    if (j.contains("trace")) run.trace_path = j.at("trace").get<std::string>();
    if (j.contains("report")) run.report_path = j.at("report").get<std::string>();
    return run;
}

}  // namespace

double ExperimentConfig::signal_horizon() const {
    if (dos_horizon) return *dos_horizon;
    if (run) return run->horizon;
    if (pulses) {
        double h = 0.0;
        for (const auto& p : *pulses) h = std::max(h, p.end());
        return h;
    }
    return 0.0;
}

DoSSignal ExperimentConfig::make_signal() const {
    const double h = signal_horizon();
    if (generator) return generate(*generator, seed, h);
    if (pulses) return DoSSignal(*pulses, h);
    return DoSSignal({}, h);
}

double ExperimentConfig::effective_step() const {
    if (run && run->step) return *run->step;
    if (!policy) throw ConfigError("no policy block: cannot determine a step");
    if (policy->kind == PolicyKind::kEventTriggered) return 1e-4;
    return policy->delta / 10.0;
}

ExperimentConfig parse_config_json(const json& doc) {
    expect_keys(doc, "$", {"plant", "certificate", "dos", "policy", "run"});
    ExperimentConfig cfg;
    cfg.echo = doc;
    if (!doc.contains("plant")) fail("$.plant", "missing");
    cfg.model = parse_plant(doc.at("plant"), "plant");
    if (doc.contains("certificate"))
        cfg.certificate = parse_certificate(doc.at("certificate"), "certificate");
    if (doc.contains("dos")) {
        const auto& dj = doc.at("dos");
        expect_keys(dj, "dos", {"horizon", "generator", "pulses", "budget"});
        if (dj.contains("horizon")) cfg.dos_horizon = get_number(dj.at("horizon"), "dos.horizon");
        if (dj.contains("generator") && dj.contains("pulses"))
            fail("dos", "give either a generator or explicit pulses, not both");
        if (dj.contains("generator"))
            cfg.generator = parse_generator(dj.at("generator"), "dos.generator", cfg.seed);
        if (dj.contains("pulses")) {
            std::vector<DoSInterval> pulses;
            for (size_t i = 0; i < dj.at("pulses").size(); ++i) {
                const auto pair = parse_vector(dj.at("pulses")[i],
                                               "dos.pulses[" + std::to_string(i) + "]");
                if (pair.size() != 2) fail("dos.pulses", "each pulse is [start, length]");
                pulses.push_back({pair[0], pair[1]});
            }
            cfg.pulses = std::move(pulses);
        }
        if (dj.contains("budget")) {
            const auto& bj = dj.at("budget");
            expect_keys(bj, "dos.budget", {"eta", "tau_d", "kappa", "t_ratio"});
            DoSBudget budget;
            budget.eta = require_number(bj, "dos.budget", "eta");
            budget.tau_d = require_number(bj, "dos.budget", "tau_d");
            budget.kappa = require_number(bj, "dos.budget", "kappa");
            budget.t_ratio = require_number(bj, "dos.budget", "t_ratio");
            budget.validate();
            cfg.budget = budget;
        }
    }
    if (doc.contains("policy")) cfg.policy = parse_policy(doc.at("policy"), "policy");
    if (doc.contains("run")) cfg.run = parse_run(doc.at("run"), "run");

    if (cfg.policy && cfg.policy->kind != PolicyKind::kRoundRobin &&
        static_cast<int>(cfg.policy->c.size()) != cfg.model.count())
        fail("policy.c", "size must match the subsystem count");
    if (cfg.run && static_cast<int>(cfg.run->x0.size()) != cfg.model.state_dim())
        fail("run.x0", "size must match the stacked state dimension");
    if (cfg.generator && cfg.signal_horizon() <= 0.0)
        fail("dos.horizon", "required with a generator");
    if (cfg.run && cfg.dos_horizon && *cfg.dos_horizon < cfg.run->horizon)
        fail("dos.horizon", "must cover the run horizon");
    return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config_json(doc);
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

namespace {

// Two coupled scalar subsystems with open-loop instability; the a_diag
// override pins the published comparison diagonal.
const char* kExample1Plant = R"json({
  "subsystems": [
    {
      "id": 1,
      "a": [[1]], "b": [[1]], "k": [[-4.5]], "q": [[1]],
      "coupling_physical": {"2": [[1]]},
      "coupling_control": {"2": [[-1.4]]}
    },
    {
      "id": 2,
      "a": [[1]], "b": [[1]], "k": [[-6]], "q": [[1]],
      "coupling_control": {"1": [[-1]]}
    }
  ],
  "neighbors": {"1": [2], "2": [1]}
})json";

const char* kExample1Certificate = R"json({
  "delta": 0.1,
  "mu": [1, 1],
  "sigma": [0.2, 0.2],
  "overrides": {"a_diag": [0.7, 0.9]}
})json";

// Three spring-coupled inverted pendulums in a line. b_off and gamma pin
// the published comparison data (the formula path gives larger couplings).
const char* kExample2Plant = R"json({
  "subsystems": [
    {
      "id": 1,
      "a": [[0, 1], [-3.75, 0]], "b": [[0], [0.25]],
      "k": [[-23, -12]], "q": [[1, 0], [0, 1]],
      "coupling_physical": {"2": [[0, 0], [1.25, 0]]},
      "coupling_control": {"2": [[-5, 0.25]]}
    },
    {
      "id": 2,
      "a": [[0, 1], [-2.5, 0]], "b": [[0], [0.25]],
      "k": [[-18, -12]], "q": [[1, 0], [0, 1]],
      "coupling_physical": {"1": [[0, 0], [1.25, 0]], "3": [[0, 0], [1.25, 0]]},
      "coupling_control": {"1": [[-4.75, -0.25]], "3": [[-4.75, -0.25]]}
    },
    {
      "id": 3,
      "a": [[0, 1], [-3.75, 0]], "b": [[0], [0.25]],
      "k": [[-23, -12]], "q": [[1, 0], [0, 1]],
      "coupling_physical": {"2": [[0, 0], [1.25, 0]]},
      "coupling_control": {"2": [[-5, 0.25]]}
    }
  ],
  "neighbors": {"1": [2], "2": [1, 3], "3": [2]}
})json";

const char* kExample2Certificate = R"json({
  "delta": 0.11,
  "mu": "auto",
  "sigma": [0.01, 0.01, 0.01],
  "overrides": {
    "b_off": [[0, 0.0608, 0], [0.1217, 0, 0.1217], [0, 0.0608, 0]],
    "gamma": [[47.7983, 24.4007, 0], [22.0276, 33.2386, 22.0276], [0, 24.4007, 47.7983]]
  }
})json";

// ~40% duty attack over 20 s: 11 bursts whose spacing equals the stated
// average dwell time, so the budget below is tight.
const char* kSharedDos = R"json({
  "horizon": 20,
  "generator": {"kind": "periodic", "period": 1.8182, "duty": 0.4, "seed": 1},
  "budget": {"eta": 1, "tau_d": 1.8182, "kappa": 0.44, "t_ratio": 2.5}
})json";

json assemble_example(const char* plant, const char* certificate, const json& policy,
                      const json& run) {
    json cfg;
    cfg["plant"] = json::parse(plant);
    cfg["certificate"] = json::parse(certificate);
    cfg["dos"] = json::parse(kSharedDos);
    if (!policy.is_null()) cfg["policy"] = policy;
    if (!run.is_null()) cfg["run"] = run;
    return cfg;
}

json example_run(double horizon, double step, json x0, const std::string& stem) {
    json run;
    run["horizon"] = horizon;
    run["step"] = step;
    run["x0"] = std::move(x0);
    run["trace"] = stem + "-trace.csv";
    run["report"] = stem + "-report.json";
    return run;
}

}  // namespace

const std::vector<std::string>& builtin_example_names() {
    static const std::vector<std::string> kNames = {
        "example1", "example1-rr", "example1-hybrid",
        "example2", "example2-rr", "example2-hybrid",
    };
    return kNames;
}

json builtin_example(const std::string& name) {
    const json x0_ex1 = json::array({3, -3});
    const json x0_ex2 = json::array({1, 0, -1, 0, 1, 0});
    if (name == "example1" || name == "example1-rr") {
        json policy = {{"kind", "round_robin"}, {"delta", 0.01}};
        return assemble_example(kExample1Plant, kExample1Certificate, policy,
                                example_run(20, 0.001, x0_ex1, name));
    }
    if (name == "example1-hybrid") {
        json policy = {{"kind", "hybrid"}, {"delta", 0.01}, {"c", json::array({0.05, 0.05})}};
        return assemble_example(kExample1Plant, kExample1Certificate, policy,
                                example_run(20, 0.001, x0_ex1, name));
    }
    if (name == "example2" || name == "example2-rr") {
        json policy = {{"kind", "round_robin"}, {"delta", 0.001}};
        return assemble_example(kExample2Plant, kExample2Certificate, policy,
                                example_run(20, 0.0001, x0_ex2, name));
    }
    if (name == "example2-hybrid") {
        json policy = {{"kind", "hybrid"}, {"delta", 0.001}, {"c", json::array({0.1, 0.1, 0.1})}};
        return assemble_example(kExample2Plant, kExample2Certificate, policy,
                                example_run(20, 0.0001, x0_ex2, name));
    }
    throw ConfigError("unknown built-in example '" + name + "'");
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const ConfigOverrides& ov) {
    if (ov.seed) {
        if (!cfg.generator) throw ConfigError("--seed requires a dos generator");
        cfg.seed = *ov.seed;
        cfg.echo["dos"]["generator"]["seed"] = *ov.seed;
    }
    if (ov.step) {
        if (!cfg.run) throw ConfigError("--step requires a run block");
        cfg.run->step = *ov.step;
        cfg.echo["run"]["step"] = *ov.step;
    }
    if (ov.horizon) {
        if (!cfg.run) throw ConfigError("--horizon requires a run block");
        cfg.run->horizon = *ov.horizon;
        cfg.echo["run"]["horizon"] = *ov.horizon;
        if (cfg.dos_horizon && *cfg.dos_horizon < *ov.horizon) {
            cfg.dos_horizon = *ov.horizon;
            cfg.echo["dos"]["horizon"] = *ov.horizon;
        }
    }
    return cfg;
}

}  // namespace dossim
