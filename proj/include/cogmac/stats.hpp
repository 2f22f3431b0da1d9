#ifndef COGMAC_STATS_HPP
#define COGMAC_STATS_HPP

// Empirical distributions and one-sample Kolmogorov-Smirnov checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <span>
#include <stdexcept>
#include <vector>

#include "analytic.hpp"

namespace cogmac {

class EmpiricalDist {
public:
    explicit EmpiricalDist(std::vector<double> samples) : sorted_(std::move(samples)) {
        if (sorted_.empty()) throw std::invalid_argument("EmpiricalDist: no samples");
        for (double x : sorted_)
            if (std::isnan(x)) throw std::invalid_argument("EmpiricalDist: NaN sample");
        std::sort(sorted_.begin(), sorted_.end());
    }
    explicit EmpiricalDist(std::span<const double> samples)
        : EmpiricalDist(std::vector<double>(samples.begin(), samples.end())) {}

    std::span<const double> sorted_samples() const { return sorted_; }
    std::size_t n() const { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

/// Right-continuous: fraction of samples <= x.
inline double empirical_cdf(const EmpiricalDist& dist, double x) {
    const auto s = dist.sorted_samples();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    return static_cast<double>(it - s.begin()) / static_cast<double>(s.size());
}

struct KsReport {
    double statistic = 0.0;
    std::size_t n = 0;
    double threshold_1pct = 0.0;
    bool pass = false;
};

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_threshold_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline KsReport ks_test(const EmpiricalDist& dist, const std::function<double(double)>& analytic_cdf) {
    const auto s = dist.sorted_samples();
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    double prev_f = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = analytic_cdf(s[i]);
        if (std::isnan(f)) throw std::domain_error("ks_test: analytic cdf returned NaN");
        if (f < prev_f - 1e-12) throw std::domain_error("ks_test: analytic cdf is not monotone on the samples");
        prev_f = f;
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    KsReport r;
    r.statistic = d;
    r.n = s.size();
    r.threshold_1pct = ks_threshold_1pct(s.size());
    r.pass = d < r.threshold_1pct;
    return r;
}

/// KS check of max-samples scaled by a_n against the unit Frechet cdf exp(-1/x).
inline KsReport max_normalization_check(std::span<const double> samples_of_max, double a_n) {
    if (!std::isfinite(a_n) || a_n <= 0.0) throw std::domain_error("max_normalization_check: a_n must be > 0");
    std::vector<double> scaled;
    scaled.reserve(samples_of_max.size());
    for (double x : samples_of_max) scaled.push_back(x / a_n);
    return ks_test(EmpiricalDist(std::move(scaled)), frechet_unit_cdf);
}

/// Mean and standard error with Neumaier-compensated sums in index order.
struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    double sum = 0.0;
    double c = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

inline MeanStderr mean_and_stderr(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean_and_stderr: no samples");
    const double n = static_cast<double>(xs.size());
    const double mean = compensated_sum(xs) / n;
    if (xs.size() < 2) return {mean, 0.0};
    std::vector<double> sq;
    sq.reserve(xs.size());
    for (double x : xs) sq.push_back((x - mean) * (x - mean));
    const double var = compensated_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

}  // namespace cogmac

#endif  // COGMAC_STATS_HPP
