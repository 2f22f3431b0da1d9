#ifndef COGMAC_SIMULATOR_HPP
#define COGMAC_SIMULATOR_HPP

// D-TDMA max-SINR scheduling and Monte-Carlo ergodic capacity.
//
// Every trial is one independent slot whose random stream is derived from
// (seed, trial index), so results do not depend on the worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "channels.hpp"
#include "network.hpp"
#include "rab.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace cogmac {

struct SlotOutcome {
    int selected_user = 0;
    double sinr = 0.0;
    double capacity_nats = 0.0;
    double interference_power_at_pu = 0.0;  // P_s * |h_sp,eq|^2 of the selected user
    double transmit_power = 0.0;
    double selected_ratio = 0.0;            // gamma_s / gamma_sp of the selected user
    bool flagged = false;                   // all-zero SINR or an exact interference null
};

/// Per-user SINR for one slot. `weights` must hold one entry per user in Rab mode and be
/// empty in Baseline mode.
inline std::vector<double> slot_sinr(const ChannelRealization& r, const NetworkConfig& config,
                                     std::span<const RabWeights> weights = {}) {
    const int m = config.effective_patterns();
    if (r.n_users != config.n_users || r.m_patterns != m)
        throw std::invalid_argument("slot_sinr: realization dimensions do not match the configuration");
    const bool rab = config.mode == Mode::Rab;
    if (rab && weights.size() != static_cast<std::size_t>(config.n_users))
        throw std::invalid_argument("slot_sinr: Rab mode needs one weight set per user");
    if (!rab && !weights.empty()) throw std::invalid_argument("slot_sinr: Baseline mode takes no weights");

    const double denom = 1.0 + config.primary_power * r.primary_to_secondary_power;
    std::vector<double> sinr(static_cast<std::size_t>(config.n_users));
    for (int n = 0; n < config.n_users; ++n) {
        const auto row = std::span(r.secondary).subspan(r.index(n, 0), static_cast<std::size_t>(m));
        const auto irow = std::span(r.interference).subspan(r.index(n, 0), static_cast<std::size_t>(m));
        double gs, gsp;
        if (rab) {
            const auto& w = weights[static_cast<std::size_t>(n)];
            gs = std::norm(equivalent_secondary(w, row));
            gsp = std::norm(equivalent_secondary(w, irow));
        } else {
            gs = std::norm(row[0]);
            gsp = std::norm(irow[0]);
        }
        double ps = gsp > 0.0 ? config.peak_interference / gsp : std::numeric_limits<double>::infinity();
        if (config.max_power_cap) ps = std::min(ps, *config.max_power_cap);
        sinr[static_cast<std::size_t>(n)] = std::isinf(ps) ? (gs > 0.0 ? ps : 0.0) : gs * ps / denom;
    }
    return sinr;
}

/// Scratch buffers reused across slots by one worker.
struct SlotWorkspace {
    ChannelRealization realization;
    std::vector<RabWeights> weights;
};

template <class Urbg>
SlotOutcome run_slot(const NetworkConfig& config, const LosGeometry& los, Urbg& rng, SlotWorkspace& ws) {
    draw_slot_into(config, los, rng, ws.realization);
    if (config.mode == Mode::Rab) {
        ws.weights.resize(static_cast<std::size_t>(config.n_users));
        for (auto& w : ws.weights) draw_weights_into(config.m_patterns, rng, w);
    } else {
        ws.weights.clear();
    }

    const auto sinr = slot_sinr(ws.realization, config, ws.weights);
    const auto best = std::max_element(sinr.begin(), sinr.end());
    SlotOutcome out;
    out.selected_user = static_cast<int>(best - sinr.begin());
    out.sinr = *best;
    out.capacity_nats = std::log1p(out.sinr);

    const int m = config.effective_patterns();
    const auto& r = ws.realization;
    const auto srow = std::span(r.secondary).subspan(r.index(out.selected_user, 0), static_cast<std::size_t>(m));
    const auto irow = std::span(r.interference).subspan(r.index(out.selected_user, 0), static_cast<std::size_t>(m));
    ComplexGain hs = srow[0], hsp = irow[0];
    if (config.mode == Mode::Rab) {
        const auto& w = ws.weights[static_cast<std::size_t>(out.selected_user)];
        hs = equivalent_secondary(w, srow);
        hsp = equivalent_secondary(w, irow);
    }
    const double gsp = std::norm(hsp);
    out.transmit_power = transmit_power(config.peak_interference, hsp);
    if (config.max_power_cap) out.transmit_power = std::min(out.transmit_power, *config.max_power_cap);
    out.interference_power_at_pu = out.transmit_power * gsp;
    out.selected_ratio = gsp > 0.0 ? std::norm(hs) / gsp : std::numeric_limits<double>::infinity();
    out.flagged = !(out.sinr > 0.0) || gsp == 0.0;
    return out;
}

template <class Urbg>
SlotOutcome run_slot(const NetworkConfig& config, const LosGeometry& los, Urbg& rng) {
    SlotWorkspace ws;
    return run_slot(config, los, rng, ws);
}

struct RunOptions {
    unsigned threads = 1;
};

/// Outcome of every trial, in trial order. Identical for any thread count.
inline std::vector<SlotOutcome> run_trials(const NetworkConfig& config_in, const RunOptions& opts = {}) {
    const NetworkConfig config = config_in.normalized();
    const LosGeometry los = draw_los_geometry(config);
    const auto trials = static_cast<std::size_t>(config.trials);
    std::vector<SlotOutcome> outcomes(trials);

    auto work = [&](std::size_t begin, std::size_t end) {
        SlotWorkspace ws;
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng = make_rng(config.seed, Stream::Trial, t);
            outcomes[t] = run_slot(config, los, rng, ws);
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(opts.threads, 1, std::max<std::size_t>(trials, 1));
    if (workers == 1) {
        work(0, trials);
        return outcomes;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(trials, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
    }
    pool.clear();  // join
    return outcomes;
}

struct CapacityEstimate {
    double mean = 0.0;       // nats
    double std_error = 0.0;  // nats
    long long trials = 0;
    long long flagged_slots = 0;
};

inline constexpr long long kMinCapacityTrials = 100;

/// E[log(1 + max_n SINR_n)] by direct Monte-Carlo averaging, in nats.
inline CapacityEstimate ergodic_capacity(const NetworkConfig& config, const RunOptions& opts = {}) {
    if (config.trials < kMinCapacityTrials)
        throw ConfigError("trials", "ergodic capacity needs at least " + std::to_string(kMinCapacityTrials));
    const auto outcomes = run_trials(config, opts);
    std::vector<double> caps;
    caps.reserve(outcomes.size());
    long long flagged = 0;
    for (const auto& o : outcomes) {
        caps.push_back(o.capacity_nats);
        flagged += o.flagged ? 1 : 0;
    }
    const auto ms = mean_and_stderr(caps);
    return {ms.mean, ms.std_error, config.trials, flagged};
}

inline double to_log_base(double nats, LogBase base) { return base == LogBase::Bits ? nats / std::log(2.0) : nats; }

// ---------------------------------------------------------------------------
// Sweeps

struct SweepGrid {
    std::vector<int> n_list;
    std::vector<double> k_list;
    std::vector<int> m_list;
    std::vector<Mode> modes;

    bool operator==(const SweepGrid&) const = default;
};

struct SweepPoint {
    Mode mode = Mode::Baseline;
    int n_users = 0;
    int m_patterns = 1;
    double k_factor = 0.0;
    std::optional<CapacityEstimate> estimate;
    std::optional<CapacityEstimate> single_user;  // same (mode, M, K) at N = 1
    std::string error;

    bool ok() const { return estimate.has_value(); }
};

struct SweepResult {
    NetworkConfig config_template;
    std::vector<SweepPoint> points;

    std::size_t failed() const {
        return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.ok(); }));
    }
};

using SweepProgress = std::function<void(const SweepPoint&, double seconds)>;

/// One ergodic-capacity evaluation per (mode, K, M, N) point; Baseline ignores m_list.
/// Errors are recorded per point and do not abort the sweep.
inline SweepResult sweep(const NetworkConfig& tmpl, const SweepGrid& grid, const RunOptions& opts = {},
                         const SweepProgress& progress = {}) {
    if (grid.n_list.empty() || grid.k_list.empty() || grid.m_list.empty() || grid.modes.empty())
        throw std::invalid_argument("sweep: every grid list must be nonempty");
    SweepResult result{tmpl, {}};
    for (Mode mode : grid.modes) {
        const std::vector<int> ms = mode == Mode::Baseline ? std::vector<int>{1} : grid.m_list;
        for (double k : grid.k_list) {
            for (int m : ms) {
                std::optional<CapacityEstimate> single;
                std::string single_error;
                NetworkConfig c = tmpl;
                c.mode = mode;
                c.k_factor = k;
                c.m_patterns = m;
                try {
                    NetworkConfig one = c;
                    one.n_users = 1;
                    single = ergodic_capacity(one, opts);
                } catch (const std::exception& e) {
                    single_error = e.what();
                }
                for (int n : grid.n_list) {
                    SweepPoint pt{mode, n, m, k, std::nullopt, single, {}};
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        c.n_users = n;
                        pt.estimate = ergodic_capacity(c, opts);
                    } catch (const std::exception& e) {
                        pt.error = e.what();
                    }
                    const double secs =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    if (progress) progress(pt, secs);
                    result.points.push_back(std::move(pt));
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Growth-law diagnostics

enum class GrowthLaw { None, LogN, LogLogN };

inline double growth_function(double n, GrowthLaw law) {
    switch (law) {
        case GrowthLaw::None: return 1.0;
        case GrowthLaw::LogN: return std::log(n);
        case GrowthLaw::LogLogN: return std::log(std::log(n));
    }
    return 1.0;
}

/// Least-squares slope of value/law(N) against log N over the upper half of the grid
/// (the last ceil(size/2) points). Near zero when `values` grow like the law.
inline double growth_flatness(std::span<const double> n_values, std::span<const double> values, GrowthLaw law) {
    if (n_values.size() != values.size()) throw std::invalid_argument("growth_flatness: size mismatch");
    if (n_values.size() < 4) throw std::invalid_argument("growth_flatness: need at least 4 points");
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (!(n_values[i] > n_values[i - 1])) throw std::invalid_argument("growth_flatness: N must increase");
    if (n_values.back() < 10.0 * n_values.front())
        throw std::invalid_argument("growth_flatness: grid must span at least one decade");
    if (law == GrowthLaw::LogLogN && n_values.front() < 3.0)
        throw std::invalid_argument("growth_flatness: log log N normalisation needs N >= 3");
    if (law == GrowthLaw::LogN && n_values.front() < 2.0)
        throw std::invalid_argument("growth_flatness: log N normalisation needs N >= 2");

    const std::size_t start = n_values.size() / 2;
    const std::size_t count = n_values.size() - start;
    double mx = 0.0, my = 0.0;
    std::vector<double> xs, ys;
    for (std::size_t i = start; i < n_values.size(); ++i) {
        xs.push_back(std::log(n_values[i]));
        ys.push_back(values[i] / growth_function(n_values[i], law));
        mx += xs.back();
        my += ys.back();
    }
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace cogmac

#endif  // COGMAC_SIMULATOR_HPP
