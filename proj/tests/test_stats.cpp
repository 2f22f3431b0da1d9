#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cogmac/stats.hpp"

using namespace cogmac;
using Catch::Approx;

namespace {

std::vector<double> exponential_draws(std::size_t n, double mean, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(-mean * std::log1p(-u(rng)));
    return xs;
}

std::vector<double> unit_frechet_draws(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
        double p = u(rng);
        while (p == 0.0) p = u(rng);
        xs.push_back(-1.0 / std::log(p));
    }
    return xs;
}

}  // namespace

TEST_CASE("empirical_cdf is a right-continuous step function", "[stats]") {
    const EmpiricalDist d(std::vector<double>{3.0, 1.0, 2.0, 5.0, 4.0});
    CHECK(empirical_cdf(d, 0.5) == 0.0);
    CHECK(empirical_cdf(d, 1.0) == Approx(0.2));
    CHECK(empirical_cdf(d, 3.0) == Approx(3.0 / 5.0));  // rank of the median over n
    CHECK(empirical_cdf(d, 3.5) == Approx(3.0 / 5.0));
    CHECK(empirical_cdf(d, 5.0) == 1.0);
    CHECK(empirical_cdf(d, 99.0) == 1.0);
    CHECK(d.sorted_samples().front() == 1.0);
    CHECK_THROWS_AS(EmpiricalDist(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("empirical_cdf of uniform samples", "[stats]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = u(rng);
    CHECK(empirical_cdf(EmpiricalDist(std::move(xs)), 0.5) == Approx(0.5).margin(0.002));
}

TEST_CASE("ks_test accepts the null and rejects a scale mismatch", "[stats]") {
    const EmpiricalDist d(exponential_draws(10000, 1.0, 5));
    const auto same = ks_test(d, [](double x) { return exponential_cdf(x, 1.0); });
    CHECK(same.pass);
    CHECK(same.n == 10000);
    CHECK(same.threshold_1pct == Approx(0.01628));
    const auto wrong = ks_test(d, [](double x) { return exponential_cdf(x, 2.0); });
    CHECK_FALSE(wrong.pass);
    CHECK(wrong.statistic > 0.1);
}

TEST_CASE("ks_test statistic matches a brute-force sup over both step sides", "[stats]") {
    const std::vector<double> xs{0.1, 0.4, 0.45, 0.8};
    const auto r = ks_test(EmpiricalDist(xs), [](double x) { return x; });
    double brute = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        brute = std::max(brute, std::abs((i + 1) / 4.0 - xs[i]));
        brute = std::max(brute, std::abs(xs[i] - i / 4.0));
    }
    CHECK(r.statistic == Approx(brute));
}

TEST_CASE("ks_test rejects a non-monotone analytic cdf", "[stats]") {
    const EmpiricalDist d(std::vector<double>{0.1, 0.5, 0.9});
    CHECK_THROWS_AS(ks_test(d, [](double x) { return 1.0 - x; }), std::domain_error);
}

TEST_CASE("ks statistic is invariant under monotone transforms", "[stats]") {
    auto xs = exponential_draws(5000, 1.0, 17);
    const auto direct = ks_test(EmpiricalDist(xs), [](double x) { return exponential_cdf(x, 1.0); });
    for (auto& x : xs) x = std::log(x);
    const auto logged = ks_test(EmpiricalDist(xs), [](double y) { return exponential_cdf(std::exp(y), 1.0); });
    CHECK(logged.statistic == Approx(direct.statistic).epsilon(1e-12));
}

TEST_CASE("ks_test rejection rate on inverse-transform samples", "[stats][property]") {
    int rejections = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto r = ks_test(EmpiricalDist(exponential_draws(10000, 1.0, 1000 + rep)),
                               [](double x) { return exponential_cdf(x, 1.0); });
        rejections += r.pass ? 0 : 1;
    }
    CHECK(rejections <= 2);
}

TEST_CASE("max_normalization_check against unit Frechet", "[stats]") {
    const auto draws = unit_frechet_draws(10000, 23);
    CHECK(max_normalization_check(draws, 1.0).pass);
    CHECK_FALSE(max_normalization_check(draws, 10.0).pass);
    CHECK_THROWS_AS(max_normalization_check(draws, 0.0), std::domain_error);
}

TEST_CASE("compensated mean and standard error", "[stats]") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto ms = mean_and_stderr(xs);
    CHECK(ms.mean == 2.5);
    CHECK(ms.std_error == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    const std::vector<double> hard{1e16, 1.0, -1e16, 1.0};
    CHECK(compensated_sum(hard) == 2.0);
}
