#include "dossim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dossim/errors.hpp"
#include "dossim/tolerances.hpp"

namespace dossim {

namespace {

constexpr double kBlowupNorm = 1e12;

long checked_ratio(double num, double den, const char* what) {
    const double q = num / den;
    const long rounded = std::lround(q);
    if (rounded <= 0 || std::abs(q - static_cast<double>(rounded)) > 1e-6)
        throw ConfigError(std::string(what) + " must be an integer multiple of the step");
    return rounded;
}

double lyapunov_value(const GainCertificate& cert, std::span<const double> x) {
    double v = 0.0;
    size_t off = 0;
    for (int i = 0; i < cert.count(); ++i) {
        const auto& p = cert.p[i];
        const size_t n = static_cast<size_t>(p.rows());
        double quad = 0.0;
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c)
                quad += x[off + r] * p(static_cast<int>(r), static_cast<int>(c)) * x[off + c];
        v += cert.mu[i] * quad;
        off += n;
    }
    if (off != x.size()) throw DimensionMismatch("certificate does not match state size");
    return v;
}

struct Rk4Scratch {
    std::vector<double> k1, k2, k3, k4, tmp;
    explicit Rk4Scratch(size_t dim) : k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim) {}
};

void rk4_step(const PlantModel& model, const HeldState& held, double h, std::vector<double>& x,
              Rk4Scratch& s) {
    const size_t dim = x.size();
    closed_loop_derivative_into(model, x, held, s.k1);
    for (size_t i = 0; i < dim; ++i) s.tmp[i] = x[i] + 0.5 * h * s.k1[i];
    closed_loop_derivative_into(model, s.tmp, held, s.k2);
    for (size_t i = 0; i < dim; ++i) s.tmp[i] = x[i] + 0.5 * h * s.k2[i];
    closed_loop_derivative_into(model, s.tmp, held, s.k3);
    for (size_t i = 0; i < dim; ++i) s.tmp[i] = x[i] + h * s.k3[i];
    closed_loop_derivative_into(model, s.tmp, held, s.k4);
    for (size_t i = 0; i < dim; ++i)
        x[i] += h / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
}

}  // namespace

long SimTrace::attempts_total() const {
    long t = 0;
    for (const auto& c : counters) t += c.attempts;
    return t;
}

long SimTrace::successes_total() const {
    long t = 0;
    for (const auto& c : counters) t += c.successes;
    return t;
}

SimTrace run(const SimConfig& cfg) {
    validate_or_throw(cfg.model);
    if (!(cfg.step > 0.0)) throw ConfigError("step must be positive");
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (cfg.dos.horizon() < cfg.horizon)
        throw ConfigError("DoS signal horizon shorter than the simulation horizon");
    if (static_cast<int>(cfg.x0.size()) != cfg.model.state_dim())
        throw ConfigError("x0 size does not match the model");
    for (double v : cfg.x0)
        if (!std::isfinite(v)) throw ConfigError("x0 entries must be finite");

    const long total_steps = checked_ratio(cfg.horizon, cfg.step, "horizon");

    const int n = cfg.model.count();
    long slot_steps = 0;  // steps per Round-robin slot, 0 when no schedule
    const TriggerParams* trigger = nullptr;
    const bool hybrid = std::holds_alternative<HybridPolicy>(cfg.policy);
    PolicyMode base_mode = PolicyMode::kEventTriggered;

    if (const auto* rr = std::get_if<RoundRobinPolicy>(&cfg.policy)) {
        slot_steps = checked_ratio(rr->delta, cfg.step, "slot length");
        if (slot_steps < 10) throw ConfigError("step must be at most a tenth of the slot length");
        base_mode = PolicyMode::kRoundRobin;
    } else if (const auto* et = std::get_if<EventTriggeredPolicy>(&cfg.policy)) {
        trigger = &et->trigger;
    } else {
        const auto& hy = std::get<HybridPolicy>(cfg.policy);
        slot_steps = checked_ratio(hy.delta, cfg.step, "slot length");
        if (slot_steps < 10) throw ConfigError("step must be at most a tenth of the slot length");
        trigger = &hy.trigger;
    }
    if (trigger) {
        trigger->validate();
        if (static_cast<int>(trigger->sigma.size()) != n)
            throw ConfigError("trigger parameters do not match the subsystem count");
    }

    const RoundRobinSchedule schedule{n, slot_steps > 0 ? slot_steps * cfg.step : 0.0};
    const TriggerMonitor monitor{trigger ? *trigger : TriggerParams{}};
    HybridState hstate;

    SimTrace trace;
    trace.state_dim = cfg.model.state_dim();
    trace.step = cfg.step;
    trace.counters.assign(n, {});
    const size_t expected = static_cast<size_t>(total_steps) + 1;
    trace.times.reserve(expected);
    trace.states.reserve(expected * trace.state_dim);
    trace.held.reserve(expected * trace.state_dim);
    trace.v_total.reserve(expected);
    trace.dos_flag.reserve(expected);
    trace.mode.reserve(expected);

    std::vector<double> x = cfg.x0;
    HeldState held = HeldState::from_state(cfg.model, x, 0.0);
    Rk4Scratch scratch(x.size());

    const auto record = [&](double t, PolicyMode mode) {
        trace.times.push_back(t);
        trace.states.insert(trace.states.end(), x.begin(), x.end());
        const auto h = held.stacked();
        trace.held.insert(trace.held.end(), h.begin(), h.end());
        trace.v_total.push_back(cfg.cert ? lyapunov_value(*cfg.cert, x) : 0.0);
        trace.dos_flag.push_back(cfg.dos.active(t) ? 1 : 0);
        trace.mode.push_back(mode);
    };

    for (long s = 0; s < total_steps; ++s) {
        const double t = static_cast<double>(s) * cfg.step;
        std::vector<TransmissionEvent> events;

        if (base_mode == PolicyMode::kRoundRobin) {
            if (s % slot_steps == 0) {
                const long slot = s / slot_steps;
                const int id = schedule.slot_subsystem(slot);
                events.push_back({t, id, true, !cfg.dos.active(t), PolicyMode::kRoundRobin});
            }
        } else if (!hybrid) {
            for (int id = 1; id <= n; ++id) {
                const auto xi = cfg.model.state_of(x, id);
                if (monitor.fires(id, xi, held.sample[id - 1]))
                    events.push_back({t, id, true, !cfg.dos.active(t),
                                      PolicyMode::kEventTriggered});
            }
        } else {
            std::set<int> fired;
            if (hstate.mode == PolicyMode::kEventTriggered) {
                for (int id = 1; id <= n; ++id) {
                    const auto xi = cfg.model.state_of(x, id);
                    if (monitor.fires(id, xi, held.sample[id - 1])) fired.insert(id);
                }
            }
            std::optional<long> slot;
            if (slot_steps > 0 && s % slot_steps == 0) slot = s / slot_steps;
            events = hybrid_step(hstate, t, fired, cfg.dos, schedule, slot);
        }

        for (const auto& ev : events) {
            trace.counters[ev.subsystem - 1].attempts++;
            if (ev.succeeded) {
                trace.counters[ev.subsystem - 1].successes++;
                held.update(cfg.model, ev.subsystem, x, t);
            }
            trace.events.push_back(ev);
        }

        record(t, hybrid ? hstate.mode : base_mode);

        rk4_step(cfg.model, held, cfg.step, x, scratch);
        if (!(vec_norm(x) <= kBlowupNorm)) {
            trace.aborted = true;
            trace.abort_time = static_cast<double>(s + 1) * cfg.step;
            record(trace.abort_time, hybrid ? hstate.mode : base_mode);
            return trace;
        }
    }
    record(cfg.horizon, hybrid ? hstate.mode : base_mode);
    return trace;
}

std::vector<std::pair<double, double>> lyapunov_series(const SimTrace& trace,
                                                       const GainCertificate& cert) {
    std::vector<std::pair<double, double>> series;
    series.reserve(trace.samples());
    for (size_t s = 0; s < trace.samples(); ++s)
        series.emplace_back(trace.times[s], lyapunov_value(cert, trace.state_at(s)));
    return series;
}

EnvelopeReport envelope_check(const SimTrace& trace, const EnvelopeParams& env) {
    EnvelopeReport report;
    report.certified = env.beta_star > 0.0;
    if (trace.v_total.empty()) return report;

    const double v0 = trace.v_total.front();
    const double prefactor = std::exp(env.kappa_star * env.rate_sum) * v0;
    double max_ratio = 0.0;
    for (size_t s = 0; s < trace.samples(); ++s) {
        const double envelope = prefactor * std::exp(-env.beta_star * trace.times[s]);
        const double v = trace.v_total[s];
        double ratio = 0.0;
        if (envelope > 0.0)
            ratio = v / envelope;
        else if (v > 0.0)
            ratio = std::numeric_limits<double>::infinity();
        if (ratio > max_ratio) max_ratio = ratio;
        if (!report.first_violation && ratio > 1.0 + 1e-9)
            report.first_violation = trace.times[s];
    }
    report.max_ratio = max_ratio;
    if (!report.certified)
        report.verdict = "not certified; envelope grows";
    else if (report.first_violation)
        report.verdict = "violated: inter-sampling hypothesis fails for this slot length";
    else
        report.verdict = "holds pointwise";
    return report;
}

std::vector<ProbeResult> inter_sampling_probe(const PlantModel& model, std::span<const double> sigma,
                                           std::span<const double> delta_candidates,
                                           const std::vector<std::vector<double>>& probe_states) {
    validate_or_throw(model);
    const int n = model.count();
    if (static_cast<int>(sigma.size()) != n) throw DimensionMismatch("sigma size mismatch");

    std::vector<ProbeResult> results;
    for (double delta : delta_candidates) {
        ProbeResult res;
        res.delta = delta;
        res.worst_ratio.assign(n, 0.0);
        for (const auto& x0 : probe_states) {
            SimConfig cfg;
            cfg.model = model;
            cfg.policy = RoundRobinPolicy{delta};
            cfg.dos = DoSSignal({}, static_cast<double>(n) * delta);
            cfg.x0 = x0;
            cfg.horizon = static_cast<double>(n) * delta;
            cfg.step = delta / 10.0;
            const auto trace = run(cfg);
            for (size_t s = 0; s < trace.samples(); ++s) {
                const auto xs = trace.state_at(s);
                const auto hs = trace.held_at(s);
                for (const auto& sub : model.subsystems) {
                    const int off = model.offset(sub.id);
                    const int ns = sub.state_dim();
                    double e = 0.0, xn = 0.0;
                    for (int r = 0; r < ns; ++r) {
                        const double d = hs[off + r] - xs[off + r];
                        e += d * d;
                        xn += xs[off + r] * xs[off + r];
                    }
                    e = std::sqrt(e);
                    xn = std::sqrt(xn);
                    double ratio = 0.0;
                    if (xn > 0.0)
                        ratio = e / xn;
                    else if (e > 0.0)
                        ratio = std::numeric_limits<double>::infinity();
                    res.worst_ratio[sub.id - 1] = std::max(res.worst_ratio[sub.id - 1], ratio);
                }
            }
        }
        res.pass = true;
        for (int i = 0; i < n; ++i)
            if (!(res.worst_ratio[i] < sigma[i])) res.pass = false;
        results.push_back(std::move(res));
    }
    return results;
}

}  // namespace dossim
