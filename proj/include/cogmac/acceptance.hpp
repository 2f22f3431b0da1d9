#ifndef COGMAC_ACCEPTANCE_HPP
#define COGMAC_ACCEPTANCE_HPP

// End-to-end acceptance checks shared by `cogmac_cli validate` and the acceptance
// test binary. Every check is seeded from the suite seed, so results are fixed.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "channels.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "espar.hpp"
#include "rab.hpp"
#include "rng.hpp"
#include "simulator.hpp"
#include "stats.hpp"

namespace cogmac::acceptance {

enum class Level { Fast, Full };

inline Level parse_level(const std::string& s) {
    if (s == "fast") return Level::Fast;
    if (s == "full") return Level::Full;
    throw std::invalid_argument("level must be 'fast' or 'full'");
}

struct SuiteOptions {
    Level level = Level::Fast;
    unsigned threads = 1;
    std::uint64_t seed = 20240607;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

inline long long sim_trials(const SuiteOptions& o) { return o.level == Level::Full ? 100000 : 10000; }

inline Rng validation_rng(const SuiteOptions& o, std::uint64_t counter) {
    return make_rng(o.seed, Stream::Validation, counter);
}

inline NetworkConfig capacity_config(const SuiteOptions& o, Mode mode, int n, int m, double k, std::uint64_t tag) {
    NetworkConfig c;
    c.mode = mode;
    c.m_patterns = mode == Mode::Baseline ? 1 : m;
    c.n_users = n;
    c.k_factor = k;
    c.trials = sim_trials(o);
    c.seed = derive_seed(o.seed, Stream::Trial, tag);
    return c;
}

inline double capacity(const SuiteOptions& o, Mode mode, int n, int m, double k, std::uint64_t tag) {
    return ergodic_capacity(capacity_config(o, mode, n, m, k, tag), {o.threads}).mean;
}

/// gamma_s / gamma_sp with unit mean powers: Rayleigh numerator, Rician denominator.
template <class Urbg>
double draw_ratio(double k, Urbg& rng) {
    const double gs = std::norm(sample_rayleigh(1.0, rng));
    const double gsp = std::norm(sample_rician(FadingSpec::rician(k, 1.0, 0.0), rng));
    return gs / gsp;
}

/// Two-pattern z_eq with fixed LoS phases.
template <class Urbg>
double draw_rab_ratio(int m, double k, std::span<const double> los_phases, Urbg& rng) {
    const auto w = draw_weights(m, rng);
    std::vector<ComplexGain> hs(static_cast<std::size_t>(m)), b(static_cast<std::size_t>(m));
    for (auto& x : hs) x = sample_rayleigh(1.0, rng);
    for (auto& x : b) x = sample_unit_cn(rng);
    const auto eq = equivalent_interference(w, FadingSpec::rician(k, 1.0, 0.0), los_phases, b);
    return std::norm(equivalent_secondary(w, hs)) / std::norm(eq.interference_eq);
}

template <class Urbg>
double draw_rab_interference_power(int m, double k, std::span<const double> los_phases, Urbg& rng) {
    const auto w = draw_weights(m, rng);
    std::vector<ComplexGain> b(static_cast<std::size_t>(m));
    for (auto& x : b) x = sample_unit_cn(rng);
    return std::norm(equivalent_interference(w, FadingSpec::rician(k, 1.0, 0.0), los_phases, b).interference_eq);
}

inline std::vector<double> fixed_phases(int m, Rng& rng) {
    std::vector<double> phi(static_cast<std::size_t>(m));
    for (auto& p : phi) p = sample_phase(rng);
    return phi;
}

/// I0 by its power series in long double; independent of bessel_i0.
inline double bessel_i0_reference(double x) {
    const long double q = 0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m < 2000 && term > sum * 1e-21L; ++m) {
        term *= q / (static_cast<long double>(m) * m);
        sum += term;
    }
    return static_cast<double>(sum);
}

inline std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(4);
    ss << x;
    return ss.str();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace detail

/// Worst |ratio_cdf(a_N) - (1 - 1/N)| over the grid for a given W0(exp(.)) routine.
template <class WOfExp>
double quantile_identity_error(WOfExp&& w_of_exp) {
    double worst = 0.0;
    for (long long n : {2LL, 10LL, 100LL, 10000LL})
        for (double k : {0.0, 0.5, 2.0, 10.0})
            for (double rho : {0.5, 1.0, 4.0}) {
                const RatioDistParams p{k, rho};
                const double a = cogmac::detail::normalizer_a_n_with(n, p, w_of_exp);
                worst = std::max(worst, std::abs(ratio_cdf(a, p) - (1.0 - 1.0 / static_cast<double>(n))));
            }
    return worst;
}

inline CheckResult check_quantile_identity(const SuiteOptions&) {
    const double err = quantile_identity_error([](double lx) { return lambert_w0_of_exp(lx); });
    const double mutant = quantile_identity_error([](double lx) { return 1.01 * lambert_w0_of_exp(lx); });
    const bool pass = err <= 1e-9 && mutant > 1e-9;
    return {1, "quantile identity", pass,
            "max error " + detail::fmt(err) + " (tol 1e-9); 1% Lambert W mutant error " + detail::fmt(mutant) +
                (mutant > 1e-9 ? " (detected)" : " (NOT detected)")};
}

inline CheckResult check_ratio_distribution(const SuiteOptions& o) {
    bool pass = true;
    std::string info;
    std::uint64_t counter = 200;
    for (double k : {0.5, 2.0, 10.0}) {
        Rng rng = detail::validation_rng(o, counter++);
        std::vector<double> z(10000);
        for (auto& x : z) x = detail::draw_ratio(k, rng);
        const RatioDistParams p{k, 1.0};
        const auto r = ks_test(EmpiricalDist(std::move(z)), [&](double x) { return ratio_cdf(x, p); });
        pass = pass && r.pass;
        info += "K=" + detail::fmt(k) + " D=" + detail::fmt(r.statistic) + " ";
    }
    return {2, "ratio distribution fit", pass, info + "(thr " + detail::fmt(ks_threshold_1pct(10000)) + ")"};
}

inline CheckResult check_frechet(const SuiteOptions& o) {
    bool pass = true;
    std::string info;
    std::uint64_t counter = 300;
    const int n_users = 256;
    for (double k : {0.0, 2.0}) {
        Rng rng = detail::validation_rng(o, counter++);
        const double a_n = normalizer_a_n(n_users, {k, 1.0});
        std::vector<double> maxima(10000);
        for (auto& m : maxima) {
            m = 0.0;
            for (int i = 0; i < n_users; ++i) m = std::max(m, detail::draw_ratio(k, rng));
        }
        const auto r = max_normalization_check(maxima, a_n);
        pass = pass && r.pass;
        info += "K=" + detail::fmt(k) + " D=" + detail::fmt(r.statistic) + " ";
    }
    return {3, "Frechet normalisation", pass, info + "(thr " + detail::fmt(ks_threshold_1pct(10000)) + ")"};
}

inline CheckResult check_effective_users_moderate_k(const SuiteOptions& o) {
    const int n_eff = static_cast<int>(std::lround(effective_users_moderate_k(500.0, 2.0)));
    const double c_k2 = detail::capacity(o, Mode::Baseline, 500, 1, 2.0, 400);
    const double c_ref = detail::capacity(o, Mode::Baseline, n_eff, 1, 0.0, 401);
    const double rel = detail::rel_diff(c_k2, c_ref);
    return {4, "effective users, K=2", rel <= 0.02,
            "C(K=2,N=500)=" + detail::fmt(c_k2) + " C(K=0,N=" + std::to_string(n_eff) + ")=" + detail::fmt(c_ref) +
                " rel " + detail::fmt(rel) + " (tol 0.02)"};
}

inline std::vector<double> capacity_curve(const SuiteOptions& o, Mode mode, int m, double k,
                                          const std::vector<int>& n_list, std::uint64_t tag) {
    std::vector<double> caps;
    for (int n : n_list) caps.push_back(detail::capacity(o, mode, n, m, k, tag++));
    return caps;
}

inline const std::vector<int>& growth_grid() {
    static const std::vector<int> n{16, 32, 64, 128, 256, 512};
    return n;
}

inline CheckResult check_large_k_growth(const SuiteOptions& o) {
    const auto& n_list = growth_grid();
    const std::vector<double> n(n_list.begin(), n_list.end());
    const auto caps = capacity_curve(o, Mode::Baseline, 1, 10.0, n_list, 500);
    const double s_loglog = growth_flatness(n, caps, GrowthLaw::LogLogN);
    const double s_none = growth_flatness(n, caps, GrowthLaw::None);
    const bool pass = 5.0 * std::abs(s_loglog) <= std::abs(s_none);
    return {5, "large-K log log N growth", pass,
            "slope loglogN-normalised " + detail::fmt(s_loglog) + ", unnormalised " + detail::fmt(s_none) +
                ", ratio " + detail::fmt(std::abs(s_none) / std::abs(s_loglog)) + " (need >= 5)"};
}

inline CheckResult check_rab_effective_users(const SuiteOptions& o) {
    bool pass = true;
    std::string info;
    std::uint64_t tag = 600;
    for (double k : {10.0, 100.0}) {
        const int n_eff = static_cast<int>(std::lround(effective_users_rab_m2(200.0, k)));
        const double c_rab = detail::capacity(o, Mode::Rab, 200, 2, k, tag++);
        const double c_ref = detail::capacity(o, Mode::Baseline, n_eff, 1, 0.0, tag++);
        const double rel = detail::rel_diff(c_rab, c_ref);
        pass = pass && rel <= 0.03;
        info += "K=" + detail::fmt(k) + ": RAB " + detail::fmt(c_rab) + " vs N=" + std::to_string(n_eff) + " " +
                  detail::fmt(c_ref) + " rel " + detail::fmt(rel) + "; ";
    }
    return {6, "RAB effective users", pass, info + "(tol 0.03)"};
}

/// The log log N control is c log log N with c matched to the data at the largest N.
inline CheckResult check_log_n_restoration(const SuiteOptions& o) {
    const auto& n_list = growth_grid();
    const std::vector<double> n(n_list.begin(), n_list.end());
    const auto caps = capacity_curve(o, Mode::Rab, 2, 10.0, n_list, 700);
    const double c = caps.back() / std::log(std::log(n.back()));
    std::vector<double> control;
    for (double x : n) control.push_back(c * std::log(std::log(x)));
    const double s_data = growth_flatness(n, caps, GrowthLaw::LogN);
    const double s_ctrl = growth_flatness(n, control, GrowthLaw::LogN);
    const bool pass = std::abs(s_data) <= std::abs(s_ctrl) / 5.0;
    return {7, "RAB log N restoration", pass,
            "slope logN-normalised " + detail::fmt(s_data) + ", log log N control " + detail::fmt(s_ctrl) +
                ", ratio " + detail::fmt(std::abs(s_ctrl) / std::abs(s_data)) + " (need >= 5)"};
}

inline CheckResult check_rab_distribution_facts(const SuiteOptions& o) {
    std::string info;
    // (a) M = 16 equivalent interference power is close to Exponential(1)
    Rng rng_a = detail::validation_rng(o, 800);
    const auto phi16 = detail::fixed_phases(16, rng_a);
    std::vector<double> power(10000);
    for (auto& p : power) p = detail::draw_rab_interference_power(16, 10.0, phi16, rng_a);
    const auto ks_a = ks_test(EmpiricalDist(std::move(power)), [](double x) { return exponential_cdf(x, 1.0); });
    info += "(a) D=" + detail::fmt(ks_a.statistic) + " thr " + detail::fmt(ks_a.threshold_1pct) + "; ";

    // (b) null probability at K = 1e6
    std::vector<double> null_prob;
    std::uint64_t counter = 801;
    for (int m : {2, 4, 8}) {
        Rng rng = detail::validation_rng(o, counter++);
        const auto phi = detail::fixed_phases(m, rng);
        long long hits = 0;
        const long long draws = 1000000;
        for (long long t = 0; t < draws; ++t) hits += detail::draw_rab_interference_power(m, 1e6, phi, rng) < 0.05;
        null_prob.push_back(static_cast<double>(hits) / static_cast<double>(draws));
    }
    const bool pass_b = null_prob[0] > null_prob[1] && null_prob[0] > null_prob[2];
    info += "(b) P(null) M=2 " + detail::fmt(null_prob[0]) + ", M=4 " + detail::fmt(null_prob[1]) + ", M=8 " +
              detail::fmt(null_prob[2]) + "; ";

    // (c) cos of the two-pattern phase difference is arcsine distributed with variance 1/2
    Rng rng_c = detail::validation_rng(o, 810);
    const std::array<double, 2> phi2{sample_phase(rng_c), sample_phase(rng_c)};
    std::vector<double> y(100000);
    for (auto& v : y) {
        const auto w = draw_weights(2, rng_c);
        v = std::cos((w.phases[0] + phi2[0]) - (w.phases[1] + phi2[1]));
    }
    const auto ms = mean_and_stderr(y);
    std::vector<double> sq;
    for (double v : y) sq.push_back((v - ms.mean) * (v - ms.mean));
    const double var = compensated_sum(sq) / static_cast<double>(y.size() - 1);
    const auto ks_c = ks_test(EmpiricalDist(std::move(y)), arcsine_cdf);
    const bool pass_c = ks_c.pass && std::abs(var - 0.5) <= 0.005;
    info += "(c) D=" + detail::fmt(ks_c.statistic) + " var " + detail::fmt(var);
    return {8, "RAB distribution facts", ks_a.pass && pass_b && pass_c, info};
}

inline CheckResult check_rab_m2_closed_form(const SuiteOptions& o) {
    Rng rng = detail::validation_rng(o, 900);
    const double k = 10.0;
    const auto phi = detail::fixed_phases(2, rng);
    std::vector<double> z(10000);
    for (auto& x : z) x = detail::draw_rab_ratio(2, k, phi, rng);
    const RatioDistParams p{k, 1.0};
    const auto ks = ks_test(EmpiricalDist(std::move(z)), [&](double x) { return rab_m2_cdf(x, p); });
    // relative deviation of the tail probability 1 - F at z = 1e3
    const double exact = rab_m2_survival(1e3, p);
    const double tail = 1.0 - rab_m2_tail_cdf(1e3, p);
    const double rel = detail::rel_diff(tail, exact);
    return {9, "two-pattern closed form", ks.pass && rel <= 0.02,
            "D=" + detail::fmt(ks.statistic) + " thr " + detail::fmt(ks.threshold_1pct) +
                "; tail vs exact 1-F at z=1e3 rel " + detail::fmt(rel) + " (tol 0.02)"};
}

inline CheckResult check_espar_identities(const SuiteOptions& o) {
    double ortho = 0.0, recon = 0.0, parseval = 0.0;
    Rng rng = detail::validation_rng(o, 1000);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int m : {1, 2, 3, 4}) {
        for (int g : {64, 256}) {
            const auto cfg = espar::default_config(m);
            const auto b = espar::build_basis(cfg, g);
            ortho = std::max(ortho, espar::orthonormality_error(b));
            std::vector<double> x;
            for (int i = 1; i < m; ++i) x.push_back(20.0 * normal(rng));
            const auto currents = espar::element_currents(cfg, x);
            Eigen::VectorXcd random(m);
            for (int i = 0; i < m; ++i) random(i) = espar::cd(normal(rng), normal(rng));
            for (const auto& i : {Eigen::VectorXcd(currents / currents.norm()), random}) {
                recon = std::max(recon, espar::reconstruction_error(i, b));
                parseval = std::max(parseval, espar::parseval_error(i, b) / std::max(1.0, i.squaredNorm()));
            }
        }
    }
    const bool pass = ortho <= 1e-8 && recon <= 1e-8 && parseval <= 1e-8;
    return {10, "ESPAR basis identities", pass,
            "orthonormality " + detail::fmt(ortho) + ", reconstruction " + detail::fmt(recon) + ", Parseval " +
                detail::fmt(parseval) + " (tol 1e-8)"};
}

inline CheckResult check_special_functions(const SuiteOptions&) {
    double w_worst = 0.0;
    const double lo = -1.0 / std::numbers::e + 1e-6;
    for (int i = 0; i <= 2000; ++i) {
        // half the points on (-1/e, 0], half log-spaced on [1e-12, 1e6]
        const double x = i <= 1000 ? lo * (1.0 - i / 1000.0) : std::pow(10.0, -12.0 + 18.0 * (i - 1000) / 1000.0);
        const double w = lambert_w0(x);
        w_worst = std::max(w_worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
    }
    double i0_worst = 0.0;
    for (int i = 0; i <= 3000; ++i) {
        const double x = 30.0 * i / 3000.0;
        const double ref = detail::bessel_i0_reference(x);
        i0_worst = std::max(i0_worst, std::abs(bessel_i0(x) - ref) / ref);
    }
    return {11, "special functions", w_worst <= 1e-12 && i0_worst <= 1e-10,
            "Lambert W residual " + detail::fmt(w_worst) + " (tol 1e-12), I0 rel error " + detail::fmt(i0_worst) +
                " (tol 1e-10)"};
}

/// Sweep CSV for a preset at a reduced trial count.
inline std::string preset_csv(const std::string& name, long long trials, std::uint64_t seed, unsigned threads) {
    auto p = make_preset(name);
    p.network.trials = trials;
    p.network.seed = seed;
    std::ostringstream ss;
    write_sweep_csv(ss, sweep(p.network, p.sweep, {threads}));
    return ss.str();
}

inline CheckResult check_determinism(const SuiteOptions& o) {
    const long long trials = o.level == Level::Full ? 1000 : 200;
    bool pass = true;
    std::string info;
    for (const auto& name : preset_names()) {
        const auto a = preset_csv(name, trials, o.seed, 1);
        const auto b = preset_csv(name, trials, o.seed, 4);
        const auto c = preset_csv(name, trials, o.seed, 1);
        const bool same = a == b && a == c;
        pass = pass && same;
        info += name + (same ? " identical; " : " DIFFERS; ");
    }
    return {12, "determinism across thread counts", pass, info + "trials " + std::to_string(trials)};
}

using Check = std::function<CheckResult(const SuiteOptions&)>;

inline std::vector<Check> all_checks() {
    return {check_quantile_identity,      check_ratio_distribution, check_frechet,
            check_effective_users_moderate_k, check_large_k_growth, check_rab_effective_users,
            check_log_n_restoration,      check_rab_distribution_facts, check_rab_m2_closed_form,
            check_espar_identities,       check_special_functions,  check_determinism};
}

/// Runs every check in order; `on_result` sees each result as it completes.
inline std::vector<CheckResult> run_suite(const SuiteOptions& o,
                                          const std::function<void(const CheckResult&)>& on_result = {}) {
    std::vector<CheckResult> results;
    for (const auto& check : all_checks()) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = check(o);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.id == 0) r.id = static_cast<int>(results.size()) + 1;
        if (on_result) on_result(r);
        results.push_back(std::move(r));
    }
    return results;
}

inline std::string format_result(const CheckResult& r) {
    std::ostringstream ss;
    ss << (r.pass ? "PASS" : "FAIL") << "  [" << (r.id < 10 ? " " : "") << r.id << "] " << r.name << ": " << r.detail
       << " (" << detail::fmt(r.seconds) << " s)";
    return ss.str();
}

}  // namespace cogmac::acceptance

#endif  // COGMAC_ACCEPTANCE_HPP
