#ifndef COGMAC_ANALYTIC_HPP
#define COGMAC_ANALYTIC_HPP

// Special functions and closed-form distributions for the cognitive MAC
// channel with Rician secondary-to-primary interference.
//
// Conventions:
//   z      = gamma_s / gamma_sp, the per-user SINR ratio before scaling by Q_p
//   rho    = mean_interference_power / mean_secondary_power
//   K      = Rician K-factor of the interference channel
// All logarithms are natural.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cogmac {

struct RicianSpec {
    double k_factor = 0.0;
    double mean_power = 1.0;

    void validate() const {
        if (!std::isfinite(k_factor) || k_factor < 0.0)
            throw std::domain_error("RicianSpec: k_factor must be finite and >= 0");
        if (!std::isfinite(mean_power) || mean_power <= 0.0)
            throw std::domain_error("RicianSpec: mean_power must be finite and > 0");
    }
    double los_power() const { return k_factor * mean_power / (k_factor + 1.0); }
    double scattered_power() const { return mean_power / (k_factor + 1.0); }
};

struct RatioDistParams {
    double k_factor = 0.0;
    double power_ratio = 1.0;  // rho

    void validate() const {
        if (!std::isfinite(k_factor) || k_factor < 0.0)
            throw std::domain_error("RatioDistParams: k_factor must be finite and >= 0");
        if (!std::isfinite(power_ratio) || power_ratio <= 0.0)
            throw std::domain_error("RatioDistParams: power_ratio must be finite and > 0");
    }
};

struct ScalingLawEval {
    int n_users = 0;
    double k_factor = 0.0;
    double value = 0.0;            // nats
    double effective_users = 0.0;  // exp(value)
};

namespace detail {

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite argument");
}

inline void require_nonnegative(double z, const char* what) {
    if (std::isnan(z) || z < 0.0) throw std::domain_error(std::string(what) + ": argument must be >= 0");
}

inline void require_users(long long n, long long min_n, const char* what) {
    if (n < min_n)
        throw std::domain_error(std::string(what) + ": n_users must be >= " + std::to_string(min_n));
}

// e^{-|x|} I0(x) by power series; accurate for |x| <= 15.
inline double bessel_i0_series_scaled(double ax) {
    const double q = 0.25 * ax * ax;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 500; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-ax);
}

// e^{-x} I0(x) from the large-argument expansion; used for x > 15.
inline double bessel_i0_asymptotic_scaled(double ax) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * ax);
        if (next >= term) break;  // divergent part of the series
        term = next;
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * ax);
}

}  // namespace detail

/// Principal branch of the Lambert W function: the w >= -1 solving w e^w = x.
inline double lambert_w0(double x) {
    detail::require_finite(x, "lambert_w0");
    constexpr double inv_e = 0.36787944117144232;
    if (x < -inv_e) throw std::domain_error("lambert_w0: argument below -1/e");
    if (x == 0.0) return 0.0;
    if (x == -inv_e) return -1.0;

    double w;
    if (x < -0.32) {
        // expansion about the branch point
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
    } else if (x <= 3.0) {
        w = std::log1p(x);
        if (x > 0.0) w *= 0.7;  // pulls the guess toward W on (0, 3]
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    // Halley iteration
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 <= 0.0) {
            w = -1.0 + 1e-12;
            continue;
        }
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0) break;
        const double step = f / denom;
        w -= step;
        if (w < -1.0) w = -1.0;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
    }
    return w;
}

/// W0(exp(log_x)) for arguments whose exponential would overflow.
inline double lambert_w0_of_exp(double log_x) {
    if (std::isnan(log_x)) throw std::domain_error("lambert_w0_of_exp: NaN argument");
    if (log_x < 700.0) return lambert_w0(std::exp(log_x));
    // Newton on w + log(w) = log_x; w is large here so this converges fast.
    double w = log_x - std::log(log_x);
    for (int it = 0; it < 50; ++it) {
        const double step = (w + std::log(w) - log_x) / (1.0 + 1.0 / w);
        w -= step;
        if (std::abs(step) <= 1e-15 * w) break;
    }
    return w;
}

/// e^{-|x|} I0(x). Stays finite for any finite x.
inline double bessel_i0_scaled(double x) {
    detail::require_finite(x, "bessel_i0");
    const double ax = std::abs(x);
    return ax <= 15.0 ? detail::bessel_i0_series_scaled(ax) : detail::bessel_i0_asymptotic_scaled(ax);
}

/// Modified Bessel function of the first kind, order zero.
inline double bessel_i0(double x) {
    detail::require_finite(x, "bessel_i0");
    const double ax = std::abs(x);
    if (ax <= 15.0) {
        const double q = 0.25 * ax * ax;
        double term = 1.0;
        double sum = 1.0;
        for (int m = 1; m < 500; ++m) {
            term *= q / (static_cast<double>(m) * m);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return sum;
    }
    return std::exp(ax) * detail::bessel_i0_asymptotic_scaled(ax);
}

// ---------------------------------------------------------------------------
// Rician interference power |h_sp|^2

/// Density of the Rician channel power (noncentral chi-square, two degrees of freedom).
inline double rician_power_pdf(double gamma, const RicianSpec& spec) {
    spec.validate();
    if (std::isnan(gamma)) throw std::domain_error("rician_power_pdf: NaN argument");
    if (gamma < 0.0) return 0.0;
    const double k = spec.k_factor;
    const double s = (1.0 + k) / spec.mean_power;
    const double arg = 2.0 * std::sqrt(k * (1.0 + k) * gamma / spec.mean_power);
    return s * std::exp(-k - s * gamma + arg) * bessel_i0_scaled(arg);
}

/// Cdf of the Rician channel power as a Poisson mixture of Gamma(j+1) cdfs.
inline double rician_power_cdf(double gamma, const RicianSpec& spec) {
    spec.validate();
    if (std::isnan(gamma)) throw std::domain_error("rician_power_cdf: NaN argument");
    if (gamma <= 0.0) return 0.0;
    if (std::isinf(gamma)) return 1.0;
    const double k = spec.k_factor;
    const double x = (1.0 + k) * gamma / spec.mean_power;
    if (k == 0.0) return -std::expm1(-x);

    // P(j+1, x) = 1 - e^{-x} sum_{i<=j} x^i/i!, updated incrementally in j.
    const double ex = std::exp(-x);
    double partial = ex;  // e^{-x} x^j / j!
    double tail_sum = ex;  // e^{-x} sum_{i<=j} x^i / i!
    double poisson = std::exp(-k);
    double cdf = 0.0;
    const int j_max = static_cast<int>(k + 40.0 * std::sqrt(k + 1.0) + 60.0);
    for (int j = 0; j <= j_max; ++j) {
        if (j > 0) {
            poisson *= k / j;
            partial *= x / j;
            tail_sum += partial;
        }
        const double gamma_cdf = std::max(0.0, 1.0 - tail_sum);
        cdf += poisson * gamma_cdf;
        if (j > k && poisson < 1e-18) break;
    }
    return std::min(1.0, cdf);
}

// ---------------------------------------------------------------------------
// Ratio z = gamma_s / gamma_sp under single-antenna transmission

/// P(z > value); the tail is kept exact rather than computed as 1 - cdf.
inline double ratio_survival(double z, const RatioDistParams& p) {
    detail::require_nonnegative(z, "ratio_survival");
    p.validate();
    if (std::isinf(z)) return 0.0;
    const double k = p.k_factor;
    const double u = p.power_ratio * z + k + 1.0;
    return (1.0 + k) / u * std::exp(-k + k * (1.0 + k) / u);
}

inline double ratio_cdf(double z, const RatioDistParams& p) {
    detail::require_nonnegative(z, "ratio_cdf");
    return 1.0 - ratio_survival(z, p);
}

inline double ratio_pdf(double z, const RatioDistParams& p) {
    detail::require_nonnegative(z, "ratio_pdf");
    p.validate();
    if (std::isinf(z)) return 0.0;
    const double k = p.k_factor;
    const double rho = p.power_ratio;
    const double u = rho * z + k + 1.0;
    return rho * (1.0 + k) * std::exp(-k + k * (1.0 + k) / u) * (u + k * (1.0 + k)) / (u * u * u);
}

namespace detail {

// a_N with the Lambert W evaluator injectable, so a perturbed W can be fed
// through the quantile-identity check.
template <class LambertW0OfExp>
double normalizer_a_n_with(long long n_users, const RatioDistParams& p, LambertW0OfExp&& w_of_exp) {
    require_users(n_users, 2, "normalizer_a_n");
    p.validate();
    const double k = p.k_factor;
    const double rho = p.power_ratio;
    const double n = static_cast<double>(n_users);
    if (k == 0.0) return (n - 1.0) / rho;
    const double w = w_of_exp(std::log(k) + k - std::log(n));
    return (k + 1.0) / rho * (k / w - 1.0);
}

}  // namespace detail

/// Extreme-value normalizing constant: the a with ratio_cdf(a) = 1 - 1/N.
inline double normalizer_a_n(long long n_users, const RatioDistParams& p) {
    return detail::normalizer_a_n_with(n_users, p, [](double lx) { return lambert_w0_of_exp(lx); });
}

/// Capacity growth law log(K(K+1) / W(K e^K / N)); log(N) at K = 0.
inline double theorem1_law(long long n_users, double k) {
    detail::require_users(n_users, 2, "theorem1_law");
    if (!std::isfinite(k) || k < 0.0) throw std::domain_error("theorem1_law: K must be finite and >= 0");
    const double log_n = std::log(static_cast<double>(n_users));
    if (k == 0.0) return log_n;
    const double w = lambert_w0_of_exp(std::log(k) + k - log_n);
    return std::log(k) + std::log1p(k) - std::log(w);
}

inline ScalingLawEval evaluate_scaling_law(long long n_users, double k) {
    const double v = theorem1_law(n_users, k);
    return {static_cast<int>(n_users), k, v, std::exp(v)};
}

/// N(K+1)/e^K: users a Rayleigh-interference system needs to match moderate-K growth.
inline double effective_users_moderate_k(double n_users, double k) {
    if (!std::isfinite(k) || k < 0.0)
        throw std::domain_error("effective_users_moderate_k: K must be finite and >= 0");
    return n_users * (k + 1.0) * std::exp(-k);
}

/// sqrt((K+1)^2 / (2 pi K)) N: effective users under two-pattern random beamforming.
inline double effective_users_rab_m2(double n_users, double k) {
    if (!std::isfinite(k) || k <= 0.0)
        throw std::domain_error("effective_users_rab_m2: K must be finite and > 0");
    return (k + 1.0) / std::sqrt(2.0 * std::numbers::pi * k) * n_users;
}

/// Approximate two-pattern normaliser a_N ~ effective_users_rab_m2(N, K) / rho.
inline double rab_m2_normalizer(long long n_users, const RatioDistParams& p) {
    p.validate();
    return effective_users_rab_m2(static_cast<double>(n_users), p.k_factor) / p.power_ratio;
}

// ---------------------------------------------------------------------------
// Two-pattern random beamforming

/// Density of the random LoS power a~ = (K/(K+1))(1 + cos psi), in units of mean_power.
inline double rab_m2_a_tilde_pdf(double a_tilde, double k, double mean_power = 1.0) {
    if (!std::isfinite(k) || k <= 0.0) throw std::domain_error("rab_m2_a_tilde_pdf: K must be finite and > 0");
    if (!std::isfinite(mean_power) || mean_power <= 0.0)
        throw std::domain_error("rab_m2_a_tilde_pdf: mean_power must be > 0");
    if (std::isnan(a_tilde)) throw std::domain_error("rab_m2_a_tilde_pdf: NaN argument");
    const double x = a_tilde / mean_power;
    const double upper = 2.0 * k / (k + 1.0);
    if (x <= 0.0 || x >= upper) return 0.0;
    const double y = 1.0 - x * (k + 1.0) / k;
    const double s = 1.0 - y * y;
    if (s <= 0.0) return 0.0;
    return (k + 1.0) / (std::numbers::pi * k * std::sqrt(s)) / mean_power;
}

inline double rab_m2_survival(double z, const RatioDistParams& p) {
    detail::require_nonnegative(z, "rab_m2_cdf");
    p.validate();
    if (std::isinf(z)) return 0.0;
    const double k = p.k_factor;
    const double rho = p.power_ratio;
    const double v = 1.0 / (k + 1.0);
    const double pp = 1.0 / v - 1.0 / (rho * z * v * v + v);
    const double arg = pp * k / (k + 1.0);
    return (1.0 / v) / (z * rho + 1.0 / v) * bessel_i0_scaled(arg);
}

inline double rab_m2_cdf(double z, const RatioDistParams& p) { return 1.0 - rab_m2_survival(z, p); }

/// Large-z form of rab_m2_cdf using e^{-K} I0(K) ~ 1/sqrt(2 pi K).
inline double rab_m2_tail_cdf(double z, const RatioDistParams& p) {
    p.validate();
    const double k = p.k_factor;
    if (k <= 0.0) throw std::domain_error("rab_m2_tail_cdf: K must be > 0");
    const double inv_v = k + 1.0;
    return 1.0 - inv_v / (z * p.power_ratio + inv_v) / std::sqrt(2.0 * std::numbers::pi * k);
}

// ---------------------------------------------------------------------------
// Reference distributions used by goodness-of-fit checks

inline double exponential_cdf(double x, double mean) { return x <= 0.0 ? 0.0 : -std::expm1(-x / mean); }

inline double frechet_unit_cdf(double x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); }

}  // namespace cogmac

#endif  // COGMAC_ANALYTIC_HPP
