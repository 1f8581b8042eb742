#include <doctest.h>

#include <cmath>
#include <random>

#include "dossim/dos.hpp"
#include "dossim/errors.hpp"

using namespace dossim;

namespace {

// Independent route: scan a uniform grid of (from, to) pairs. Exact when
// every interval endpoint lies on the grid.
BudgetFit grid_fit(const DoSSignal& sig, double tau_d, double t_ratio, double resolution) {
    const int points = static_cast<int>(std::llround(sig.horizon() / resolution));
    std::vector<double> cum_measure(points + 1, 0.0);
    std::vector<int> cum_starts(points + 1, 0);
    for (int g = 0; g < points; ++g) {
        const double lo = g * resolution;
        const double hi = (g + 1) * resolution;
        cum_measure[g + 1] = cum_measure[g] + sig.active_measure(lo, hi);
        cum_starts[g + 1] = cum_starts[g] + sig.transition_count(lo, hi);
    }
    double eta = 0.0, kappa = 0.0;
    for (int a = 0; a <= points; ++a) {
        for (int b = a; b <= points; ++b) {
            const double len = (b - a) * resolution;
            // closed-window transition count (limit of right-open windows)
            const int count =
                cum_starts[b] - cum_starts[a] +
                ((b < points) ? sig.transition_count(b * resolution,
                                                     b * resolution + resolution * 0.5)
                              : 0);
            eta = std::max(eta, count - len / tau_d);
            kappa = std::max(kappa, (cum_measure[b] - cum_measure[a]) - len / t_ratio);
        }
    }
    return {eta, kappa};
}

}  // namespace

TEST_CASE("activity queries on a single interval") {
    const DoSSignal sig({{1.0, 0.5}}, 2.0);
    CHECK(sig.active(1.2));
    CHECK_FALSE(sig.active(1.5));  // right-open
    CHECK_FALSE(sig.active(0.0));
    CHECK_THROWS_AS(sig.active(2.5), OutOfHorizon);

    const DoSSignal empty({}, 2.0);
    CHECK_FALSE(empty.active(1.0));
}

TEST_CASE("zero-length pulses are single attacked instants") {
    const DoSSignal sig({{1.0, 0.0}}, 2.0);
    CHECK(sig.active(1.0));
    CHECK_FALSE(sig.active(1.0 + 1e-12));
    CHECK(sig.active_measure(0.0, 2.0) == 0.0);
    CHECK(sig.transition_count(0.0, 2.0) == 1);
}

TEST_CASE("measures clip to the window") {
    const DoSSignal sig({{1.0, 0.5}}, 3.0);
    CHECK(sig.active_measure(0.0, 2.0) == doctest::Approx(0.5));
    CHECK(sig.active_measure(1.2, 1.3) == doctest::Approx(0.1));
    CHECK(sig.inactive_measure(0.0, 3.0) == doctest::Approx(2.5));
    CHECK_THROWS_AS(sig.active_measure(2.0, 1.0), BadRange);
}

TEST_CASE("overlapping intervals merge to their union") {
    const DoSSignal sig({{1.0, 1.0}, {1.5, 1.0}}, 3.0);
    REQUIRE(sig.intervals().size() == 1);
    CHECK(sig.active_measure(0.0, 3.0) == doctest::Approx(1.5));
    CHECK(sig.transition_count(0.0, 3.0) == 1);
}

TEST_CASE("transition counts use right-open windows") {
    const DoSSignal sig({{1.0, 0.5}, {3.0, 0.2}}, 10.0);
    CHECK(sig.transition_count(0.0, 2.0) == 1);
    CHECK(sig.transition_count(1.0, 3.0) == 1);
    CHECK(sig.transition_count(0.0, 10.0) == 2);
}

TEST_CASE("budget verification on a single pulse") {
    const DoSSignal sig({{0.0, 1.0}}, 4.0);
    CHECK(check_budget(sig, {1.0, 1.0, 1.0, 2.0}).ok());

    const auto failed = check_budget(sig, {1.0, 1.0, 0.4, 2.0});
    CHECK(failed.frequency_ok);
    CHECK_FALSE(failed.duration_ok);
    CHECK(failed.worst_duration.from == doctest::Approx(0.0));
    CHECK(failed.worst_duration.to == doctest::Approx(1.0));
    CHECK(failed.worst_duration.value == doctest::Approx(1.0));

    const DoSSignal empty({}, 4.0);
    CHECK(check_budget(empty, {0.0, 0.5, 0.0, 1.5}).ok());
}

TEST_CASE("tightest budget for a single pulse") {
    const DoSSignal sig({{0.0, 1.0}}, 4.0);
    const auto fit = fit_budget(sig, 1.0, 2.0);
    CHECK(fit.eta_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.kappa_min == doctest::Approx(0.5).epsilon(1e-12));

    const auto empty = fit_budget(DoSSignal({}, 4.0), 1.0, 2.0);
    CHECK(empty.eta_min == 0.0);
    CHECK(empty.kappa_min == 0.0);
}

TEST_CASE("fitted budgets pass and anything smaller fails") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<DoSInterval> ivs;
        double t = 0.0;
        const int count = 1 + static_cast<int>(u(rng) * 6);
        for (int i = 0; i < count; ++i) {
            t += 0.1 + u(rng);
            if (t >= 9.5) break;
            const double len = std::min(u(rng) * 0.8, 10.0 - t);
            ivs.push_back({t, len});
            t += len;
        }
        const DoSSignal sig(ivs, 10.0);
        const double tau_d = 0.3 + u(rng);
        const double t_ratio = 1.5 + 2.0 * u(rng);
        const auto fit = fit_budget(sig, tau_d, t_ratio);

        CHECK(check_budget(sig, {fit.eta_min, tau_d, fit.kappa_min, t_ratio}).ok());
        CHECK(check_budget(sig, {fit.eta_min + 1e-6, tau_d, fit.kappa_min + 1e-6, t_ratio}).ok());
        if (fit.eta_min > 1e-9)
            CHECK_FALSE(
                check_budget(sig, {fit.eta_min - 1e-6, tau_d, fit.kappa_min, t_ratio})
                    .frequency_ok);
        if (fit.kappa_min > 1e-9)
            CHECK_FALSE(
                check_budget(sig, {fit.eta_min, tau_d, fit.kappa_min - 1e-6, t_ratio})
                    .duration_ok);
    }
}

TEST_CASE("endpoint enumeration matches the dense-grid oracle") {
    // periodic: length-1 pulses every 4 s over 40 s
    std::vector<DoSInterval> periodic;
    for (int k = 0; k < 10; ++k) periodic.push_back({4.0 * k, 1.0});
    const DoSSignal sig(periodic, 40.0);
    const auto fit = fit_budget(sig, 2.0, 4.0);
    const auto oracle = grid_fit(sig, 2.0, 4.0, 0.001);
    CHECK(fit.eta_min == doctest::Approx(oracle.eta_min).epsilon(1e-6));
    CHECK(fit.kappa_min == doctest::Approx(oracle.kappa_min).epsilon(1e-6));

    // random signals with grid-aligned endpoints
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> ms(1, 800);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<DoSInterval> ivs;
        int t_ms = 0;
        while (true) {
            t_ms += ms(rng);
            const int len_ms = ms(rng) / 2;
            if (t_ms + len_ms >= 4000) break;
            ivs.push_back({t_ms * 1e-3, len_ms * 1e-3});
            t_ms += len_ms;
        }
        const DoSSignal random_sig(ivs, 4.0);
        const double tau_d = 0.25 + 0.002 * ms(rng);
        const double t_ratio = 1.5 + 0.003 * ms(rng);
        const auto f = fit_budget(random_sig, tau_d, t_ratio);
        const auto g = grid_fit(random_sig, tau_d, t_ratio, 0.001);
        CHECK(f.eta_min == doctest::Approx(g.eta_min).epsilon(1e-6));
        CHECK(f.kappa_min == doctest::Approx(g.kappa_min).epsilon(1e-6));
    }
}

TEST_CASE("adding an interval never shrinks the fit") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<DoSInterval> ivs;
        double t = 0.5;
        for (int i = 0; i < 4; ++i) {
            ivs.push_back({t, 0.2 * u(rng)});
            t += 1.0 + u(rng);
        }
        const DoSSignal base(ivs, 10.0);
        ivs.push_back({t, std::min(0.5, 10.0 - t)});
        const DoSSignal extended(ivs, 10.0);
        const auto f0 = fit_budget(base, 1.0, 2.0);
        const auto f1 = fit_budget(extended, 1.0, 2.0);
        CHECK(f1.eta_min >= f0.eta_min - 1e-12);
        CHECK(f1.kappa_min >= f0.kappa_min - 1e-12);
    }
}

TEST_CASE("active and inactive measures partition the horizon") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<DoSInterval> ivs;
        double t = 0.0;
        for (int i = 0; i < 5; ++i) {
            t += u(rng);
            if (t >= 8.0) break;
            const double len = std::min(u(rng), 8.0 - t);
            ivs.push_back({t, len});
            t += len;
        }
        const DoSSignal sig(ivs, 8.0);
        CHECK(sig.active_measure(0.0, 8.0) + sig.inactive_measure(0.0, 8.0) ==
              doctest::Approx(8.0).epsilon(1e-12));
    }
}

TEST_CASE("periodic generator") {
    const auto sig = generate(PeriodicSpec{2.0, 0.4}, 0, 20.0);
    REQUIRE(sig.intervals().size() == 10);
    for (const auto& iv : sig.intervals()) CHECK(iv.length == doctest::Approx(0.8));
    CHECK(sig.active_measure(0.0, 20.0) == doctest::Approx(8.0));

    CHECK_THROWS_AS(generate(PeriodicSpec{2.0, 1.0}, 0, 20.0), InfeasibleSpec);
    CHECK_THROWS_AS(generate(PeriodicSpec{-1.0, 0.4}, 0, 20.0), InfeasibleSpec);
}

TEST_CASE("pulse train round-trips") {
    const PulseTrainSpec train{{0.5, 2.0, 5.0}, {0.25, 0.0, 1.0}};
    const auto sig = generate(train, 0, 10.0);
    REQUIRE(sig.intervals().size() == 3);
    CHECK(sig.intervals()[0].start == 0.5);
    CHECK(sig.intervals()[1].length == 0.0);
    CHECK(sig.intervals()[2].end() == doctest::Approx(6.0));
    CHECK_THROWS_AS(generate(PulseTrainSpec{{1.0}, {-0.5}}, 0, 10.0), InfeasibleSpec);
}

TEST_CASE("random bursts are deterministic per seed") {
    const auto a = generate(RandomBurstsSpec{1.0, 0.3}, 99, 50.0);
    const auto b = generate(RandomBurstsSpec{1.0, 0.3}, 99, 50.0);
    REQUIRE(a.intervals().size() == b.intervals().size());
    CHECK(a.intervals().size() > 5);
    for (size_t i = 0; i < a.intervals().size(); ++i) {
        CHECK(a.intervals()[i].start == b.intervals()[i].start);
        CHECK(a.intervals()[i].length == b.intervals()[i].length);
    }
    const auto c = generate(RandomBurstsSpec{1.0, 0.3}, 100, 50.0);
    CHECK(c.intervals().front().start != a.intervals().front().start);
}
