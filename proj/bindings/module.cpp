#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dossim/config.hpp"
#include "dossim/errors.hpp"
#include "dossim/matrix.hpp"
#include "dossim/report.hpp"
#include "dossim/simulate.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

dossim::Matrix to_matrix(const Rows& rows) {
    if (rows.empty()) throw dossim::DimensionMismatch("empty matrix");
    dossim::Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
            throw dossim::DimensionMismatch("ragged matrix rows");
        for (size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
    return m;
}

Rows from_matrix(const dossim::Matrix& m) {
    Rows rows(m.rows(), std::vector<double>(m.cols()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
    return rows;
}

dossim::DoSSignal to_signal(const std::vector<std::pair<double, double>>& pulses,
                            double horizon) {
    std::vector<dossim::DoSInterval> intervals;
    intervals.reserve(pulses.size());
    for (const auto& [start, length] : pulses) intervals.push_back({start, length});
    return dossim::DoSSignal(std::move(intervals), horizon);
}

std::string certify_json(const std::string& config_text) {
    const auto cfg = dossim::parse_config(config_text);
    return dossim::certify_report(cfg, dossim::analyze(cfg)).dump(2);
}

py::dict simulate_json(const std::string& config_text) {
    const auto cfg = dossim::parse_config(config_text);
    const auto outcome = dossim::analyze(cfg);
    const auto trace = dossim::run(dossim::make_sim_config(cfg, outcome.cert));
    std::optional<dossim::EnvelopeReport> env;
    if (outcome.envelope) env = dossim::envelope_check(trace, *outcome.envelope);
    const auto report = dossim::simulate_report(cfg, outcome, trace, env,
                                                cfg.run ? cfg.run->trace_path : "trace.csv");
    py::dict out;
    out["report"] = report.dump(2);
    out["times"] = trace.times;
    out["v_total"] = trace.v_total;
    out["attempts"] = trace.attempts_total();
    out["successes"] = trace.successes_total();
    out["final_state_norm"] = dossim::vec_norm(trace.state_at(trace.samples() - 1));
    out["aborted"] = trace.aborted;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Small-gain certificates and DoS-resilience simulation for networked "
              "distributed control systems";

    py::register_exception<dossim::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<dossim::SmallGainViolated>(m, "SmallGainViolated",
                                                      PyExc_ArithmeticError);

    m.def(
        "solve_lyapunov",
        [](const Rows& phi, const Rows& q) {
            return from_matrix(dossim::solve_lyapunov(to_matrix(phi), to_matrix(q)));
        },
        py::arg("phi"), py::arg("q"),
        "Unique P with phi' P + P phi + q = 0 for Hurwitz phi and s.p.d. q.");
    m.def(
        "spectral_radius",
        [](const Rows& m_in) { return dossim::spectral_radius(to_matrix(m_in)); },
        py::arg("m"));
    m.def(
        "spectral_norm",
        [](const Rows& m_in) { return dossim::spectral_norm(to_matrix(m_in)); }, py::arg("m"));
    m.def(
        "log_norm", [](const Rows& m_in) { return dossim::log_norm(to_matrix(m_in)); },
        py::arg("m"), "lambda_max((M + M') / 2)");
    m.def(
        "eig_extremes_symmetric",
        [](const Rows& m_in) { return dossim::eig_extremes_symmetric(to_matrix(m_in)); },
        py::arg("m"));
    m.def(
        "is_hurwitz", [](const Rows& m_in) { return dossim::is_hurwitz(to_matrix(m_in)); },
        py::arg("m"));

    m.def("certify", &certify_json, py::arg("config_json"),
          "Run the certificate pipeline on an experiment document; returns the report JSON.");
    m.def("simulate", &simulate_json, py::arg("config_json"),
          "Run a full simulation; returns a dict with the report JSON and trace summaries.");

    m.def(
        "fit_budget",
        [](const std::vector<std::pair<double, double>>& pulses, double horizon, double tau_d,
           double t_ratio) {
            const auto fit = dossim::fit_budget(to_signal(pulses, horizon), tau_d, t_ratio);
            return std::make_pair(fit.eta_min, fit.kappa_min);
        },
        py::arg("pulses"), py::arg("horizon"), py::arg("tau_d"), py::arg("t_ratio"),
        "Smallest (eta, kappa) making the pulse list admissible at (tau_d, t_ratio).");
    m.def(
        "check_budget",
        [](const std::vector<std::pair<double, double>>& pulses, double horizon, double eta,
           double tau_d, double kappa, double t_ratio) {
            return dossim::check_budget(to_signal(pulses, horizon),
                                        {eta, tau_d, kappa, t_ratio})
                .ok();
        },
        py::arg("pulses"), py::arg("horizon"), py::arg("eta"), py::arg("tau_d"),
        py::arg("kappa"), py::arg("t_ratio"));

    m.def(
        "gen_example",
        [](const std::string& name) { return dossim::builtin_example(name).dump(2); },
        py::arg("name"), "Built-in experiment document as a JSON string.");
    m.def("builtin_names", [] {
        return dossim::builtin_example_names();
    });
}
