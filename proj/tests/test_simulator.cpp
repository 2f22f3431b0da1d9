#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cogmac/analytic.hpp"
#include "cogmac/simulator.hpp"
#include "oracles.hpp"

using namespace cogmac;
using Catch::Approx;

namespace {

NetworkConfig baseline(int n, double k, long long trials, std::uint64_t seed = 42) {
    NetworkConfig c;
    c.mode = Mode::Baseline;
    c.m_patterns = 1;
    c.n_users = n;
    c.k_factor = k;
    c.trials = trials;
    c.seed = seed;
    return c;
}

NetworkConfig rab(int n, int m, double k, long long trials, std::uint64_t seed = 42) {
    NetworkConfig c = baseline(n, k, trials, seed);
    c.mode = Mode::Rab;
    c.m_patterns = m;
    return c;
}

ChannelRealization realization(std::vector<ComplexGain> s, std::vector<ComplexGain> i, int m = 1, double gps = 0.0) {
    ChannelRealization r;
    r.m_patterns = m;
    r.n_users = static_cast<int>(s.size()) / m;
    r.secondary = std::move(s);
    r.interference = std::move(i);
    r.primary_to_secondary_power = gps;
    return r;
}

}  // namespace

TEST_CASE("slot_sinr unit case", "[simulator]") {
    const auto c = baseline(1, 0.0, 100);
    const auto r = realization({{1.0, 0.0}}, {{0.0, 1.0}});
    const auto s = slot_sinr(r, c);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == Approx(1.0));
}

TEST_CASE("slot_sinr scales with Q_p and shares the primary denominator", "[simulator]") {
    auto c = baseline(3, 0.0, 100);
    const auto r = realization({{1.0, 0.5}, {0.2, 0.0}, {2.0, -1.0}}, {{0.3, 0.1}, {0.1, 0.1}, {1.0, 1.0}}, 1, 0.7);
    const auto s1 = slot_sinr(r, c);
    c.peak_interference = 3.5;
    const auto s2 = slot_sinr(r, c);
    c.primary_power = 2.0;
    const auto s3 = slot_sinr(r, c);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(s2[n] == Approx(3.5 * s1[n]));
        CHECK(s3[n] == Approx(s2[n] / (1.0 + 2.0 * 0.7)));
    }
    CHECK(std::max_element(s1.begin(), s1.end()) - s1.begin() == std::max_element(s3.begin(), s3.end()) - s3.begin());
}

TEST_CASE("slot_sinr argmax equals the ratio argmax", "[simulator]") {
    auto c = baseline(2, 1.0, 100);
    c.primary_power = 1.3;
    const auto los = draw_los_geometry(c);
    for (std::uint64_t t = 0; t < 2000; ++t) {
        Rng rng = make_rng(5, Stream::Trial, t);
        const auto r = draw_slot(c, los, rng);
        const auto s = slot_sinr(r, c);
        const double z0 = std::norm(r.secondary_at(0, 0)) / std::norm(r.interference_at(0, 0));
        const double z1 = std::norm(r.secondary_at(1, 0)) / std::norm(r.interference_at(1, 0));
        REQUIRE((s[0] > s[1]) == (z0 > z1));
    }
}

TEST_CASE("slot_sinr rejects inconsistent inputs", "[simulator]") {
    const auto c = baseline(2, 0.0, 100);
    const auto r = realization({{1, 0}, {1, 0}}, {{1, 0}, {1, 0}});
    const std::vector<RabWeights> w(2, RabWeights{{1.0}, {0.0}});
    CHECK_THROWS_AS(slot_sinr(r, c, w), std::invalid_argument);
    const auto c3 = baseline(3, 0.0, 100);
    CHECK_THROWS_AS(slot_sinr(r, c3), std::invalid_argument);
    auto cr = rab(2, 1, 0.0, 100);
    CHECK_THROWS_AS(slot_sinr(r, cr), std::invalid_argument);
    CHECK_NOTHROW(slot_sinr(r, cr, w));
}

TEST_CASE("run_slot invariants", "[simulator]") {
    for (const auto& c : {baseline(1, 0.0, 100), baseline(16, 3.0, 100), rab(16, 2, 10.0, 100), rab(5, 4, 1.0, 100)}) {
        NetworkConfig cc = c;
        cc.peak_interference = 2.5;
        cc.primary_power = 0.5;
        const auto los = draw_los_geometry(cc);
        SlotWorkspace ws;
        for (std::uint64_t t = 0; t < 500; ++t) {
            Rng rng = make_rng(1, Stream::Trial, t);
            const auto o = run_slot(cc, los, rng, ws);
            REQUIRE(o.selected_user >= 0);
            REQUIRE(o.selected_user < cc.n_users);
            if (cc.n_users == 1) REQUIRE(o.selected_user == 0);
            REQUIRE(o.capacity_nats == std::log1p(o.sinr));
            REQUIRE(std::abs(o.interference_power_at_pu - cc.peak_interference) <= 1e-12 * cc.peak_interference);
            REQUIRE_FALSE(o.flagged);
        }
    }
}

TEST_CASE("run_slot selection is invariant to a common secondary gain", "[simulator]") {
    auto c = baseline(8, 2.0, 100);
    auto scaled = c;
    scaled.mean_secondary_power = 7.0;
    const auto los = draw_los_geometry(c);
    for (std::uint64_t t = 0; t < 500; ++t) {
        Rng a = make_rng(3, Stream::Trial, t), b = make_rng(3, Stream::Trial, t);
        REQUIRE(run_slot(c, los, a).selected_user == run_slot(scaled, los, b).selected_user);
    }
}

TEST_CASE("symmetric users are selected equally often", "[simulator]") {
    const auto outcomes = run_trials(baseline(2, 2.0, 100000, 8), {4});
    double first = 0.0;
    for (const auto& o : outcomes) first += o.selected_user == 0 ? 1.0 : 0.0;
    CHECK(first / outcomes.size() == Approx(0.5).margin(0.01));
}

TEST_CASE("single-user Rayleigh capacity matches quadrature", "[simulator]") {
    const auto est = ergodic_capacity(baseline(1, 0.0, 200000, 3), {4});
    const RatioDistParams p{0.0, 1.0};
    const double via_pdf = oracle::integrate_half_line([&](double z) { return std::log1p(z) * ratio_pdf(z, p); });
    const double closed = oracle::integrate_half_line([](double z) { return std::log1p(z) / ((1 + z) * (1 + z)); });
    CHECK(via_pdf == Approx(1.0).epsilon(1e-9));
    CHECK(closed == Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(est.mean - via_pdf) <= 3.0 * est.std_error);
    CHECK(est.trials == 200000);
    CHECK(est.flagged_slots == 0);
}

TEST_CASE("capacity orderings", "[simulator]") {
    const auto c8 = ergodic_capacity(baseline(8, 0.0, 20000, 1), {4});
    const auto c64 = ergodic_capacity(baseline(64, 0.0, 20000, 2), {4});
    CHECK(c64.mean - c8.mean > 3.0 * std::hypot(c8.std_error, c64.std_error));

    const auto k0 = ergodic_capacity(baseline(200, 0.0, 20000, 3), {4});
    const auto k10 = ergodic_capacity(baseline(200, 10.0, 20000, 4), {4});
    CHECK(k0.mean - k10.mean > 3.0 * std::hypot(k0.std_error, k10.std_error));
}

TEST_CASE("Rab with one pattern reduces to baseline", "[simulator]") {
    const auto b = ergodic_capacity(baseline(32, 5.0, 40000, 11), {4});
    const auto r = ergodic_capacity(rab(32, 1, 5.0, 40000, 12), {4});
    CHECK(std::abs(b.mean - r.mean) <= 3.0 * std::hypot(b.std_error, r.std_error));
}

TEST_CASE("results do not depend on the thread count", "[simulator]") {
    const auto c = rab(20, 3, 4.0, 3001, 99);
    const auto one = run_trials(c, {1});
    for (unsigned threads : {2u, 4u, 7u}) {
        const auto many = run_trials(c, {threads});
        REQUIRE(many.size() == one.size());
        for (std::size_t t = 0; t < one.size(); ++t) {
            REQUIRE(many[t].selected_user == one[t].selected_user);
            REQUIRE(many[t].sinr == one[t].sinr);
        }
    }
    const auto e1 = ergodic_capacity(c, {1});
    const auto e4 = ergodic_capacity(c, {4});
    CHECK(e1.mean == e4.mean);
    CHECK(e1.std_error == e4.std_error);
}

TEST_CASE("ergodic_capacity requires 100 trials", "[simulator]") {
    try {
        ergodic_capacity(baseline(4, 0.0, 99));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "trials");
    }
}

TEST_CASE("power cap bounds the transmit power", "[simulator]") {
    auto c = baseline(4, 0.0, 2000, 5);
    c.max_power_cap = 2.0;
    for (const auto& o : run_trials(c)) {
        REQUIRE(o.transmit_power <= 2.0);
        REQUIRE(o.interference_power_at_pu <= c.peak_interference * (1.0 + 1e-12));
    }
}

TEST_CASE("sweep of a singleton grid equals a direct call", "[simulator]") {
    const auto tmpl = rab(16, 2, 10.0, 500, 7);
    const auto res = sweep(tmpl, {{16}, {10.0}, {2}, {Mode::Rab}});
    REQUIRE(res.points.size() == 1);
    REQUIRE(res.points[0].ok());
    const auto direct = ergodic_capacity(tmpl);
    CHECK(res.points[0].estimate->mean == direct.mean);
    CHECK(res.points[0].estimate->std_error == direct.std_error);
    REQUIRE(res.points[0].single_user);
    auto one = tmpl;
    one.n_users = 1;
    CHECK(res.points[0].single_user->mean == ergodic_capacity(one).mean);
}

TEST_CASE("sweep grid order, baseline collapse and error capture", "[simulator]") {
    const auto tmpl = rab(4, 2, 0.0, 200, 1);
    const auto res = sweep(tmpl, {{4, 8}, {0.0, 2.0}, {2, 3}, {Mode::Baseline, Mode::Rab}});
    REQUIRE(res.points.size() == 2 * 2 + 2 * 2 * 2);
    CHECK(res.points[0].mode == Mode::Baseline);
    CHECK(res.points[0].m_patterns == 1);
    CHECK(res.points[1].n_users == 8);
    CHECK(res.points[4].mode == Mode::Rab);
    CHECK(res.failed() == 0);

    auto bad = tmpl;
    bad.trials = 50;
    const auto failed = sweep(bad, {{4}, {0.0}, {2}, {Mode::Rab}});
    CHECK(failed.failed() == 1);
    CHECK_FALSE(failed.points[0].error.empty());
    CHECK_THROWS_AS(sweep(tmpl, {{}, {0.0}, {2}, {Mode::Rab}}), std::invalid_argument);
}

TEST_CASE("growth_flatness on synthetic curves", "[simulator]") {
    std::vector<double> n, logn, loglogn;
    for (int x = 8; x <= 512; x *= 2) {
        n.push_back(x);
        logn.push_back(2.0 * std::log(x));
        loglogn.push_back(2.0 * std::log(std::log(x)));
    }
    CHECK(std::abs(growth_flatness(n, logn, GrowthLaw::LogN)) <= 1e-12);
    CHECK(std::abs(growth_flatness(n, loglogn, GrowthLaw::LogLogN)) <= 1e-12);
    CHECK(growth_flatness(n, loglogn, GrowthLaw::LogN) < 0.0);
    CHECK(growth_flatness(n, logn, GrowthLaw::None) == Approx(2.0));

    const std::vector<double> short_n{8, 16, 32}, short_v{1, 2, 3};
    CHECK_THROWS_AS(growth_flatness(short_n, short_v, GrowthLaw::LogN), std::invalid_argument);
    const std::vector<double> narrow{8, 9, 10, 11}, four{1, 2, 3, 4};
    CHECK_THROWS_AS(growth_flatness(narrow, four, GrowthLaw::LogN), std::invalid_argument);
    const std::vector<double> tiny{2, 8, 32, 128};
    CHECK_THROWS_AS(growth_flatness(tiny, four, GrowthLaw::LogLogN), std::invalid_argument);
}

TEST_CASE("simulated Rayleigh baseline is flatter under log N than a log log N curve", "[simulator]") {
    std::vector<double> n, cap, control;
    std::uint64_t seed = 100;
    for (int x = 8; x <= 512; x *= 2) {
        n.push_back(x);
        cap.push_back(ergodic_capacity(baseline(x, 0.0, 20000, seed++), {4}).mean);
    }
    const double c = cap.back() / std::log(std::log(n.back()));
    for (double x : n) control.push_back(c * std::log(std::log(x)));
    const double data_slope = growth_flatness(n, cap, GrowthLaw::LogN);
    const double control_slope = growth_flatness(n, control, GrowthLaw::LogN);
    INFO("data " << data_slope << ", control " << control_slope);
    CHECK(std::abs(data_slope) < std::abs(control_slope));
}

TEST_CASE("log base conversion", "[simulator]") {
    CHECK(to_log_base(std::log(2.0), LogBase::Bits) == Approx(1.0));
    CHECK(to_log_base(1.5, LogBase::Nats) == 1.5);
}
