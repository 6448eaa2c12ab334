#include <doctest.h>

#include "rismec/channel.hpp"
#include "rismec/ris.hpp"

#include "oracles.hpp"

#include <cmath>
#include <map>
#include <numbers>

using namespace rismec;

namespace {

Complex phi_oracle(double s, double f_res, double chi, double f) { return oracle::phi(s, f_res, chi, f); }

double delta_oracle(const ChannelRealization& ch, const std::vector<RisElementConfig>& elems, double noise) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < ch.bins(); ++b) {
        Complex t = ch.h_los(b);
        for (std::size_t n = 0; n < elems.size(); ++n)
            t += ch.g(b, Eigen::Index(n)) * ch.h(b, Eigen::Index(n)) *
                 phi_oracle(elems[n].s, elems[n].f_res, elems[n].chi, ch.freqs(b));
        acc += std::norm(t);
    }
    return acc / noise;
}

SystemConfig small_system(int bins, int elements) {
    SystemConfig cfg;
    cfg.B = bins;
    cfg.n_elements = elements;
    return cfg;
}

}  // namespace

TEST_CASE("Lorentzian response") {
    const double f_res = 3.5e9;
    for (double chi : {10.0, 25.0, 50.0, 100.0}) {
        for (double s : {0.0, 0.003, 0.02, 1.0}) {
            const Complex phi = lorentzian_response(s, f_res, chi, f_res);
            CHECK(phi.real() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(phi.imag() == doctest::Approx(-2.0 * chi * s).epsilon(1e-12));
            CHECK(std::abs(phi) == doctest::Approx(2.0 * chi * s).epsilon(1e-12));
        }
    }
    // resonance at a power of two keeps every intermediate exact
    CHECK(lorentzian_response(0.25, 1024.0, 8.0, 1024.0) == Complex(0.0, -4.0));

    for (double f : {1e9, 3.49e9, 3.6e9}) CHECK(lorentzian_response(0.0, f_res, 25.0, f) == Complex(0.0, 0.0));

    const Complex far = lorentzian_response(0.3, 1e7, 25.0, 1e9);
    CHECK(far.real() == doctest::Approx(-0.3).epsilon(0.02));
    CHECK(std::abs(far.imag()) < 0.02 * 0.3);

    const double f = 3.503e9;
    const Complex got = lorentzian_response(RisElementConfig{0.4, f_res, 50.0}, f);
    const Complex want = phi_oracle(0.4, f_res, 50.0, f);
    CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
}

TEST_CASE("feasible strength") {
    const SystemConfig cfg;
    const Vec freqs = bin_frequencies(cfg);
    for (int b = 0; b < cfg.B; ++b) {
        for (double chi : {10.0, 25.0, 50.0, 100.0}) {
            const double s = feasible_strength(freqs(b), chi, freqs);
            CHECK(s <= 1.0 / (2.0 * chi) + 1e-15);
            double peak = 0.0;
            for (int k = 0; k < cfg.B; ++k) peak = std::max(peak, std::abs(phi_oracle(s, freqs(b), chi, freqs(k))));
            CHECK(peak <= 1.0 + 1e-9);
            CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // far above resonance |phi(S=1)| is about 1; well below it is tiny, so S clamps to 1
    Vec low(1);
    low << 1e6;
    CHECK(std::abs(phi_oracle(1.0, 1.414e6, 0.1, 1e6)) < 1.0);
    CHECK(feasible_strength(1.414e6, 0.1, low) == 1.0);
    Vec half(1);
    half << 1.0;
    // choose f_res with |phi(S=1)| = 0.5 at f = 1: f_res^2 = 3 with negligible damping
    CHECK(std::abs(phi_oracle(1.0, std::sqrt(3.0), 1e12, 1.0)) == doctest::Approx(0.5));
    CHECK(feasible_strength(std::sqrt(3.0), 1e12, half) == 1.0);
}

TEST_CASE("response matrix and configs are pure data") {
    const SystemConfig cfg;
    const Vec freqs = bin_frequencies(cfg);
    auto rng = make_stream(8, 1);
    const auto space = subcarrier_search_space(freqs, {10, 25, 50, 100});
    const RisConfig ris = random_config(rng, space, freqs, 12);
    const RisConfig copy = ris;
    CHECK(response_matrix(ris, freqs) == response_matrix(copy, freqs));
    const CMat phi = response_matrix(ris, freqs);
    for (int n = 0; n < 12; ++n)
        for (int b = 0; b < cfg.B; ++b) CHECK(phi(b, n) == lorentzian_response(ris.elements[std::size_t(n)], freqs(b)));
}

TEST_CASE("greedy equals exhaustive search for one element") {
    const SystemConfig cfg = small_system(2, 1);
    auto streams = ChannelStreams::from_seed(77);
    const double noise = cfg.noise_power();
    int non_trivial = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto ch = draw_channel(streams, cfg);
        RisSearchSpace space;
        space.omega = {ch.freqs(0), ch.freqs(1)};
        space.chi_set = {10.0, 50.0};

        // exhaustive over off + 4 candidates; off first so it wins ties
        std::vector<RisElementConfig> best{{0.0, 0.0, 1.0}};
        double best_val = delta_oracle(ch, best, noise);
        for (double f_res : space.omega) {
            for (double chi : space.chi_set) {
                double peak = 0.0;
                for (int b = 0; b < 2; ++b) peak = std::max(peak, std::abs(phi_oracle(1.0, f_res, chi, ch.freqs(b))));
                std::vector<RisElementConfig> c{{std::min(1.0, 1.0 / peak), f_res, chi}};
                const double val = delta_oracle(ch, c, noise);
                if (val > best_val) {
                    best_val = val;
                    best = c;
                }
            }
        }
        const RisConfig got = greedy_optimize(ch, space, cfg);
        REQUIRE(got.elements.size() == 1);
        CHECK(delta_oracle(ch, got.elements, noise) == doctest::Approx(best_val).epsilon(1e-12));
        if (best[0].s > 0.0) {
            ++non_trivial;
            CHECK(got.elements[0].f_res == best[0].f_res);
            CHECK(got.elements[0].chi == best[0].chi);
            CHECK(got.elements[0].s == doctest::Approx(best[0].s).epsilon(1e-12));
        } else {
            CHECK(got.elements[0].s == 0.0);
        }
    }
    CHECK(non_trivial > 0);
}

TEST_CASE("greedy with no reflected channel keeps every element off") {
    SystemConfig cfg = small_system(16, 10);
    auto streams = ChannelStreams::from_seed(4);
    auto ch = draw_channel(streams, cfg);
    ch.g.setZero();
    std::vector<double> trace;
    const auto space = subcarrier_search_space(ch.freqs, {10, 25, 50, 100});
    const RisConfig ris = greedy_optimize(ch, space, cfg, &trace);
    const double direct = sum_gain(cascaded_cnr(ch, RisConfig{}, cfg));
    for (const auto& e : ris.elements) CHECK(e.s == 0.0);
    for (double d : trace) CHECK(d == doctest::Approx(direct).epsilon(1e-12));
    CHECK(sum_gain(cascaded_cnr(ch, ris, cfg)) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("greedy trace, amplitude bound and final objective") {
    const SystemConfig cfg;
    auto streams = ChannelStreams::from_seed(123);
    const Vec freqs = bin_frequencies(cfg);
    const auto table = CandidateTable::build(subcarrier_search_space(freqs, {10, 25, 50, 100}), freqs);
    REQUIRE(table.candidates.size() == 64);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ch = draw_channel(streams, cfg);
        std::vector<double> trace;
        const RisConfig ris = greedy_optimize(ch, table, cfg, &trace);
        REQUIRE(trace.size() == std::size_t(cfg.n_elements) + 1);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
        CHECK(trace.front() == doctest::Approx(sum_gain(cascaded_cnr(ch, RisConfig{}, cfg))).epsilon(1e-12));
        CHECK(trace.back() == doctest::Approx(sum_gain(cascaded_cnr(ch, ris, cfg))).epsilon(1e-9));
        CHECK(max_amplitude(ris, freqs) <= 1.0 + 1e-9);
    }
}

TEST_CASE("candidate enumeration order") {
    Vec freqs(2);
    freqs << 1e9, 1.001e9;
    RisSearchSpace space{{1e9, 1.001e9}, {10.0, 20.0, 30.0}};
    const auto table = CandidateTable::build(space, freqs);
    REQUIRE(table.candidates.size() == 6);
    CHECK(table.candidates[0].f_res == 1e9);
    CHECK(table.candidates[0].chi == 10.0);
    CHECK(table.candidates[1].chi == 20.0);
    CHECK(table.candidates[3].f_res == 1.001e9);
    CHECK(table.candidates[3].chi == 10.0);
    CHECK_THROWS(RisSearchSpace{}.validate());
}

TEST_CASE("flat design: single element against the exhaustive phase grid") {
    const SystemConfig cfg = small_system(1, 1);
    auto streams = ChannelStreams::from_seed(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ch = draw_channel(streams, cfg);
        const Complex c = ch.g(0, 0) * ch.h(0, 0);
        int best = 0;
        double best_val = -1.0;
        for (int k = 0; k < 16; ++k) {
            const double val = std::norm(ch.h_los(0) + c * std::polar(1.0, 2.0 * std::numbers::pi * k / 16.0));
            if (val > best_val) {
                best_val = val;
                best = k;
            }
        }
        const RisConfig ris = flat_optimize(ch, 16, cfg);
        REQUIRE(ris.phases.size() == 1);
        CHECK(ris.phases[0] == doctest::Approx(2.0 * std::numbers::pi * best / 16.0));
        // the chosen phase is the grid point nearest to the aligning phase
        const double align = std::arg(ch.h_los(0)) - std::arg(c);
        const double gap = std::remainder(ris.phases[0] - align, 2.0 * std::numbers::pi);
        CHECK(std::abs(gap) <= std::numbers::pi / 16.0 + 1e-9);
    }
}

TEST_CASE("flat design dominates every uniform phase and has a monotone trace") {
    const SystemConfig cfg;
    auto streams = ChannelStreams::from_seed(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ch = draw_channel(streams, cfg);
        std::vector<double> trace;
        const RisConfig ris = flat_optimize(ch, 16, cfg, &trace);
        const double got = sum_gain(cascaded_cnr(ch, ris, cfg));
        for (int k = 0; k < 16; ++k) {
            RisConfig uniform;
            uniform.mode = RisMode::flat;
            uniform.phases.assign(std::size_t(cfg.n_elements), 2.0 * std::numbers::pi * k / 16.0);
            CHECK(got >= sum_gain(cascaded_cnr(ch, uniform, cfg)));
        }
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
        CHECK(max_amplitude(ris, ch.freqs) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(flat_optimize(draw_channel(streams, cfg), 1, cfg), std::invalid_argument);
}

TEST_CASE("flat design realized on Lorentzian hardware") {
    const SystemConfig cfg;
    auto streams = ChannelStreams::from_seed(5);
    const auto ch = draw_channel(streams, cfg);
    const auto table = CandidateTable::build(subcarrier_search_space(ch.freqs, {10, 25, 50, 100}), ch.freqs);
    const RisConfig flat = flat_optimize(ch, 16, cfg);
    const RisConfig real = realize_on_lorentzian(flat, table, cfg.f_c);
    REQUIRE(real.elements.size() == flat.phases.size());
    CHECK(max_amplitude(real, ch.freqs) <= 1.0 + 1e-9);
    for (std::size_t n = 0; n < real.elements.size(); ++n) {
        const Complex target = std::polar(1.0, flat.phases[n]);
        const double got = std::abs(lorentzian_response(real.elements[n], cfg.f_c) - target);
        for (const auto& c : table.candidates) CHECK(got <= std::abs(lorentzian_response(c, cfg.f_c) - target));
    }
    CHECK_THROWS(realize_on_lorentzian(real, table, cfg.f_c));
}

TEST_CASE("random configurations") {
    const SystemConfig cfg;
    const Vec freqs = bin_frequencies(cfg);
    const auto space = subcarrier_search_space(freqs, {10, 25, 50, 100});

    SUBCASE("feasible and reproducible") {
        auto a = make_stream(3, 301);
        auto b = make_stream(3, 301);
        for (int i = 0; i < 20; ++i) {
            const RisConfig ra = random_config(a, space, freqs, 100);
            CHECK(ra == random_config(b, space, freqs, 100));
            CHECK(max_amplitude(ra, freqs) <= 1.0 + 1e-9);
            for (const auto& e : ra.elements) {
                CHECK(e.s >= 0.0);
                CHECK(e.s <= feasible_strength(e.f_res, e.chi, freqs));
            }
        }
    }
    SUBCASE("resonance marginal is uniform over the grid") {
        auto rng = make_stream(99, 301);
        const RisConfig ris = random_config(rng, space, freqs, 10000);
        std::map<double, int> counts;
        for (const auto& e : ris.elements) ++counts[e.f_res];
        CHECK(counts.size() == 16);
        const double expected = 10000.0 / 16.0;
        double chi2 = 0.0;
        for (const auto& [f, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
        // 99th percentile of chi-square with 15 degrees of freedom
        CHECK(chi2 < 30.578);
    }
}

TEST_CASE("greedy beats random on paired channels") {
    const SystemConfig cfg;
    auto streams = ChannelStreams::from_seed(2024);
    auto rng = make_stream(2024, 301);
    const Vec freqs = bin_frequencies(cfg);
    const auto space = subcarrier_search_space(freqs, {10, 25, 50, 100});
    const auto table = CandidateTable::build(space, freqs);
    double sum_greedy = 0.0, sum_random = 0.0;
    int wins = 0;
    for (int i = 0; i < 100; ++i) {
        const auto ch = draw_channel(streams, cfg);
        const double g = sum_gain(cascaded_cnr(ch, greedy_optimize(ch, table, cfg), cfg));
        const double r = sum_gain(cascaded_cnr(ch, random_config(rng, space, freqs, cfg.n_elements), cfg));
        sum_greedy += g;
        sum_random += r;
        wins += g >= r;
    }
    CHECK(sum_greedy > sum_random);
    CHECK(wins >= 95);
}
