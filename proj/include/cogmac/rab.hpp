#ifndef COGMAC_RAB_HPP
#define COGMAC_RAB_HPP

// Random aerial beamforming: per-slot random phases on M basis patterns, each
// with magnitude 1/sqrt(M), and the equivalent channels they produce.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "channels.hpp"

namespace cogmac {

struct RabWeights {
    std::vector<double> magnitudes;  // sqrt(alpha), all 1/sqrt(M)
    std::vector<double> phases;      // theta in [0, 2 pi)

    std::size_t size() const { return phases.size(); }
    ComplexGain weight(std::size_t i) const { return std::polar(magnitudes[i], phases[i]); }
};

/// Refills `w` in place; avoids reallocating in the per-slot loop.
template <class Urbg>
void draw_weights_into(int m_patterns, Urbg& rng, RabWeights& w) {
    if (m_patterns < 1) throw std::invalid_argument("draw_weights: m_patterns must be >= 1");
    const auto m = static_cast<std::size_t>(m_patterns);
    w.magnitudes.assign(m, 1.0 / std::sqrt(static_cast<double>(m_patterns)));
    w.phases.resize(m);
    for (auto& theta : w.phases) theta = sample_phase(rng);
}

template <class Urbg>
RabWeights draw_weights(int m_patterns, Urbg& rng) {
    RabWeights w;
    draw_weights_into(m_patterns, rng, w);
    return w;
}

struct EquivalentChannels {
    ComplexGain secondary_eq{};
    ComplexGain interference_eq{};
    ComplexGain artificial_los{};  // coherent sum of the phase-shifted LoS terms
    ComplexGain scattered_eq{};    // c ~ CN(0, 1) for unit-variance scattered inputs
};

namespace detail {
inline void require_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) throw std::invalid_argument(std::string(what) + ": length mismatch with weights");
}
}  // namespace detail

/// sum_i (1/sqrt(M)) e^{j theta_i} h_i.
inline ComplexGain equivalent_secondary(const RabWeights& w, std::span<const ComplexGain> gains) {
    detail::require_length(gains.size(), w.size(), "equivalent_secondary");
    ComplexGain acc{};
    for (std::size_t i = 0; i < gains.size(); ++i) acc += w.weight(i) * gains[i];
    return acc;
}

/// Splits the combined SU-to-PU channel into its artificial-fading LoS part and the
/// combined scattered part. `scattered` holds the unit-variance components b_i.
inline EquivalentChannels equivalent_interference(const RabWeights& w, const FadingSpec& spec,
                                                  std::span<const double> los_phases,
                                                  std::span<const ComplexGain> scattered) {
    spec.validate();
    if (spec.kind != FadingKind::Rician) throw std::invalid_argument("equivalent_interference: spec is not Rician");
    detail::require_length(los_phases.size(), w.size(), "equivalent_interference");
    detail::require_length(scattered.size(), w.size(), "equivalent_interference");
    const double k = spec.k_factor;
    const double m = static_cast<double>(w.size());
    EquivalentChannels eq;
    ComplexGain phasor_sum{};
    for (std::size_t i = 0; i < w.size(); ++i) {
        phasor_sum += std::polar(1.0, w.phases[i] + los_phases[i]);
        eq.scattered_eq += w.weight(i) * scattered[i];
    }
    eq.artificial_los = std::sqrt(k * spec.mean_power / (m * (k + 1.0))) * phasor_sum;
    eq.interference_eq = eq.artificial_los + std::sqrt(spec.mean_power / (k + 1.0)) * eq.scattered_eq;
    return eq;
}

/// P_s = Q_p / |h_eq|^2. No clipping: a near-null channel yields a large power and an
/// exact null yields +infinity.
inline double transmit_power(double q_p, ComplexGain interference_eq) {
    if (!std::isfinite(q_p) || q_p <= 0.0) throw std::invalid_argument("transmit_power: q_p must be > 0");
    const double g = std::norm(interference_eq);
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return q_p / g;
}

/// Density of cos(U), U ~ Unif(0, 2 pi).
inline double arcsine_pdf(double y) {
    if (!(y > -1.0 && y < 1.0)) return 0.0;
    return 1.0 / (std::numbers::pi * std::sqrt(1.0 - y * y));
}

inline double arcsine_cdf(double y) {
    if (y <= -1.0) return 0.0;
    if (y >= 1.0) return 1.0;
    return 0.5 + std::asin(y) / std::numbers::pi;
}

}  // namespace cogmac

#endif  // COGMAC_RAB_HPP
