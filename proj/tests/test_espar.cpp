#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cogmac/espar.hpp"

using namespace cogmac::espar;
using Catch::Approx;

namespace {

Eigen::VectorXcd random_currents(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXcd i(m);
    for (int k = 0; k < m; ++k) i(k) = cd(n(rng), n(rng));
    return i;
}

std::vector<double> reactances_for(int m) {
    std::vector<double> x;
    for (int k = 1; k < m; ++k) x.push_back(-40.0 + 25.0 * k);
    return x;
}

}  // namespace

TEST_CASE("single element current is a scalar reduction", "[espar]") {
    auto cfg = default_config(1);
    cfg.feed_voltage = cd(2.0, -1.0);
    const auto i = element_currents(cfg, {});
    const cd y11 = cfg.admittance(0, 0);
    CHECK(std::abs(i(0) - cfg.feed_voltage / (1.0 / y11 + 50.0)) < 1e-15);
}

TEST_CASE("currents are linear in the feed voltage", "[espar]") {
    auto cfg = default_config(4);
    const auto x = reactances_for(4);
    const auto i1 = element_currents(cfg, x);
    cfg.feed_voltage *= 2.0;
    const auto i2 = element_currents(cfg, x);
    CHECK((i2 - 2.0 * i1).cwiseAbs().maxCoeff() < 1e-15 * i1.cwiseAbs().maxCoeff() * 10);
}

TEST_CASE("two-element currents match a hand-solved 2x2 system", "[espar]") {
    EsparConfig cfg;
    cfg.m_elements = 2;
    cfg.positions = circular_positions(2);
    cfg.admittance.resize(2, 2);
    const cd y11(9e-3, -3e-3), y12(-2e-3, 1.2e-3), y22(7e-3, -5e-3);
    cfg.admittance << y11, y12, y12, y22;
    cfg.feed_voltage = cd(1.0, 0.5);
    const double x1 = 35.0;

    // Y^-1 by the adjugate, then (Y^-1 + X)^-1 e_0 by Cramer's rule
    const cd det = y11 * y22 - y12 * y12;
    const cd a11 = y22 / det + 50.0, a12 = -y12 / det, a22 = y11 / det + cd(0.0, x1);
    const cd det_a = a11 * a22 - a12 * a12;
    const cd i0 = cfg.feed_voltage * a22 / det_a;
    const cd i1 = -cfg.feed_voltage * a12 / det_a;

    const std::vector<double> x{x1};
    const auto i = element_currents(cfg, x);
    CHECK(std::abs(i(0) - i0) <= 1e-12 * std::abs(i0));
    CHECK(std::abs(i(1) - i1) <= 1e-12 * std::abs(i1));
}

TEST_CASE("degenerate loads and bad inputs are rejected", "[espar]") {
    EsparConfig cfg = default_config(2);
    cfg.admittance << cd(1e-3, 0.0), cd(1e-3, 0.0), cd(1e-3, 0.0), cd(1e-3, 0.0);
    const std::vector<double> x{10.0};
    CHECK_THROWS_AS(element_currents(cfg, x), DegenerateLoadError);
    try {
        element_currents(cfg, x);
    } catch (const DegenerateLoadError& e) {
        CHECK(e.condition() > 1e12);
    }

    auto good = default_config(3);
    const std::vector<double> wrong_len{1.0};
    CHECK_THROWS_AS(element_currents(good, wrong_len), EsparError);
    good.admittance(0, 1) += cd(1e-3, 0.0);
    CHECK_THROWS_AS(element_currents(good, reactances_for(3)), EsparError);  // asymmetric
}

TEST_CASE("basis is orthonormal and spans the steering functions", "[espar]") {
    for (int m : {1, 2, 3, 4}) {
        for (int g : {64, 256}) {
            const auto cfg = default_config(m);
            const auto b = build_basis(cfg, g);
            INFO("M = " << m << ", G = " << g);
            REQUIRE(b.size() == m);
            CHECK(orthonormality_error(b) <= 1e-8);

            // a_m(theta_k) = sum_l <a_m, Phi_l> Phi_l(theta_k)
            double worst = 0.0;
            for (int k = 0; k < g; ++k) {
                const auto a = steering_vector(cfg.positions, b.theta_grid[static_cast<std::size_t>(k)]);
                const Eigen::VectorXcd rebuilt = b.projections * b.basis_values.col(k);
                worst = std::max(worst, (a - rebuilt).cwiseAbs().maxCoeff());
            }
            CHECK(worst <= 1e-8);

            const auto i = random_currents(m, static_cast<std::uint64_t>(m * 1000 + g));
            CHECK(reconstruction_error(i, b) <= 1e-8);
            CHECK(parseval_error(i, b) <= 1e-8 * std::max(1.0, i.squaredNorm()));
        }
    }
}

TEST_CASE("single element basis is the normalised constant", "[espar]") {
    const auto b = build_basis(default_config(1), 64);
    for (int k = 0; k < 64; ++k) CHECK(std::abs(b.basis_values(0, k) - cd(1.0, 0.0)) < 1e-14);
}

TEST_CASE("basis count equals element count on circular arrays", "[espar]") {
    for (int m : {5, 6}) {
        const auto b = build_basis(default_config(m, 0.25), 128);
        CHECK(b.size() == m);
        CHECK(orthonormality_error(b) <= 1e-8);
    }
}

TEST_CASE("coincident elements are rank deficient", "[espar]") {
    auto cfg = default_config(3);
    cfg.positions[2] = cfg.positions[1];
    cfg.admittance = synthetic_admittance(cfg.positions);
    CHECK_THROWS_AS(build_basis(cfg, 64), EsparError);
    CHECK_THROWS_AS(build_basis(default_config(4), 15), EsparError);
}

TEST_CASE("pattern weights: zero and single-basis currents", "[espar]") {
    const auto b = build_basis(default_config(4), 256);
    CHECK(pattern_weights(Eigen::VectorXcd::Zero(4), b).cwiseAbs().maxCoeff() == 0.0);

    // currents equal to the Gram-Schmidt coefficients of Phi_l radiate exactly Phi_l
    for (Eigen::Index l = 0; l < 4; ++l) {
        const Eigen::VectorXcd i = b.coefficients.row(l).transpose();
        const auto w = pattern_weights(i, b);
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(w(j) - (j == l ? cd(1.0) : cd(0.0))) < 1e-8);
    }
    CHECK_THROWS_AS(pattern_weights(Eigen::VectorXcd::Zero(3), b), EsparError);
}

TEST_CASE("pattern value agrees with the basis expansion on and off the grid", "[espar]") {
    const auto cfg = default_config(4);
    const auto b = build_basis(cfg, 256);
    const auto i = element_currents(cfg, reactances_for(4));
    const auto w = pattern_weights(i, b);
    for (int k = 0; k < 256; k += 7) {
        const double t = b.theta_grid[static_cast<std::size_t>(k)];
        CHECK(std::abs(pattern_value(i, cfg, t) - pattern_from_weights(w, b, t)) <= 1e-8);
    }
    for (double t : {0.123, 1.0, 2.5, 5.9})
        CHECK(std::abs(pattern_value(i, cfg, t) - pattern_from_weights(w, b, t)) <= 1e-8);
    for (int k = 0; k < 256; k += 17)
        CHECK(std::abs(b.evaluate(1, b.theta_grid[static_cast<std::size_t>(k)]) - b.basis_values(1, k)) < 1e-12);
}

TEST_CASE("pattern periodicity and isotropy", "[espar]") {
    const auto cfg = default_config(4);
    const auto i = random_currents(4, 9);
    CHECK(pattern_value(i, cfg, 0.0) == pattern_value(i, cfg, 2.0 * std::numbers::pi));

    const auto one = default_config(1);
    const auto i1 = element_currents(one, {});
    for (double t : {0.0, 1.0, 3.0, 6.0}) CHECK(pattern_value(i1, one, t) == pattern_value(i1, one, 0.0));
}

TEST_CASE("reconstruction residual does not grow with grid size", "[espar]") {
    const auto cfg = default_config(4);
    const auto i = random_currents(4, 77);
    double previous = 1e300;
    for (int g : {16, 32, 64, 128, 256}) {
        const double r = reconstruction_error(i, build_basis(cfg, g));
        CHECK((r <= previous || r <= 1e-12));
        previous = r;
    }
}
