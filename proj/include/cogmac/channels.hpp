#ifndef COGMAC_CHANNELS_HPP
#define COGMAC_CHANNELS_HPP

// Fading samplers for the secondary (SU-to-BS), interference (SU-to-PU) and
// primary (PU-to-BS) links.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "network.hpp"
#include "rng.hpp"

namespace cogmac {

using ComplexGain = std::complex<double>;

enum class FadingKind { Rayleigh, Rician, Deterministic };

struct FadingSpec {
    FadingKind kind = FadingKind::Rayleigh;
    double k_factor = 0.0;
    double mean_power = 1.0;
    double los_phase = 0.0;  // radians

    static FadingSpec rayleigh(double mean_power) { return {FadingKind::Rayleigh, 0.0, mean_power, 0.0}; }
    static FadingSpec rician(double k, double mean_power, double phase) {
        return {FadingKind::Rician, k, mean_power, phase};
    }

    void validate() const {
        if (!std::isfinite(mean_power) || mean_power <= 0.0)
            throw std::invalid_argument("FadingSpec: mean_power must be finite and > 0");
        if (!std::isfinite(k_factor) || k_factor < 0.0)
            throw std::invalid_argument("FadingSpec: k_factor must be finite and >= 0");
        if (kind == FadingKind::Rayleigh && k_factor != 0.0)
            throw std::invalid_argument("FadingSpec: Rayleigh fading requires k_factor = 0");
        if (!std::isfinite(los_phase)) throw std::invalid_argument("FadingSpec: los_phase must be finite");
    }
};

/// Uniform angle on [0, 2 pi).
template <class Urbg>
double sample_phase(Urbg& rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::uniform_real_distribution<double> u(0.0, two_pi);
    const double t = u(rng);
    return t < two_pi ? t : 0.0;
}

/// CN(0, 1).
template <class Urbg>
ComplexGain sample_unit_cn(Urbg& rng) {
    std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

/// CN(0, mean_power).
template <class Urbg>
ComplexGain sample_rayleigh(double mean_power, Urbg& rng) {
    if (!std::isfinite(mean_power) || mean_power <= 0.0)
        throw std::invalid_argument("sample_rayleigh: mean_power must be finite and > 0");
    return std::sqrt(mean_power) * sample_unit_cn(rng);
}

/// sqrt(K g/(K+1)) e^{j phi} + sqrt(g/(K+1)) b with b ~ CN(0, 1), so E|h|^2 = g.
template <class Urbg>
ComplexGain sample_rician(const FadingSpec& spec, Urbg& rng) {
    spec.validate();
    if (spec.kind != FadingKind::Rician) throw std::invalid_argument("sample_rician: spec is not Rician");
    const double k = spec.k_factor;
    const ComplexGain los = std::polar(std::sqrt(k * spec.mean_power / (k + 1.0)), spec.los_phase);
    return los + std::sqrt(spec.mean_power / (k + 1.0)) * sample_unit_cn(rng);
}

template <class Urbg>
ComplexGain sample_fading(const FadingSpec& spec, Urbg& rng) {
    switch (spec.kind) {
        case FadingKind::Rayleigh: return sample_rayleigh(spec.mean_power, rng);
        case FadingKind::Rician: return sample_rician(spec, rng);
        case FadingKind::Deterministic:
            spec.validate();
            return std::polar(std::sqrt(spec.mean_power), spec.los_phase);
    }
    throw std::invalid_argument("sample_fading: unknown fading kind");
}

/// LoS phases phi_{n,m} of every (user, pattern) interference link. Drawn once per
/// experiment from the master seed and held fixed across slots.
struct LosGeometry {
    int n_users = 0;
    int m_patterns = 0;
    std::vector<ComplexGain> phasors;  // e^{j phi}, row-major n * m_patterns + m

    double phase(int n, int m) const { return std::arg(phasors[index(n, m)]); }
    ComplexGain phasor(int n, int m) const { return phasors[index(n, m)]; }
    std::size_t index(int n, int m) const { return static_cast<std::size_t>(n) * m_patterns + m; }
};

inline LosGeometry draw_los_geometry(int n_users, int m_patterns, std::uint64_t seed) {
    LosGeometry g{n_users, m_patterns, {}};
    g.phasors.reserve(static_cast<std::size_t>(n_users) * m_patterns);
    Rng rng = make_rng(seed, Stream::LosGeometry, 0);
    for (int i = 0; i < n_users * m_patterns; ++i) g.phasors.push_back(std::polar(1.0, sample_phase(rng)));
    return g;
}

inline LosGeometry draw_los_geometry(const NetworkConfig& config) {
    return draw_los_geometry(config.n_users, config.effective_patterns(), config.seed);
}

/// One slot's draw of every channel in the network.
struct ChannelRealization {
    int n_users = 0;
    int m_patterns = 0;
    std::vector<ComplexGain> secondary;     // h^m_{s,n}, row-major n * m_patterns + m
    std::vector<ComplexGain> interference;  // h^m_{sp,n}
    double primary_to_secondary_power = 0.0;

    std::size_t index(int n, int m) const { return static_cast<std::size_t>(n) * m_patterns + m; }
    ComplexGain secondary_at(int n, int m) const { return secondary[index(n, m)]; }
    ComplexGain interference_at(int n, int m) const { return interference[index(n, m)]; }
};

/// Fills `out` with a fresh, mutually independent draw for every user and pattern.
template <class Urbg>
void draw_slot_into(const NetworkConfig& config, const LosGeometry& los, Urbg& rng, ChannelRealization& out) {
    const int n_users = config.n_users;
    const int m = config.effective_patterns();
    if (los.n_users != n_users || los.m_patterns != m)
        throw std::invalid_argument("draw_slot: LoS geometry does not match the configuration");
    const std::size_t total = static_cast<std::size_t>(n_users) * m;
    out.n_users = n_users;
    out.m_patterns = m;
    out.secondary.resize(total);
    out.interference.resize(total);

    const double k = config.k_factor;
    const double s_scale = std::sqrt(config.mean_secondary_power);
    const double los_amp = std::sqrt(k * config.mean_interference_power / (k + 1.0));
    const double scatter_amp = std::sqrt(config.mean_interference_power / (k + 1.0));
    for (std::size_t i = 0; i < total; ++i) {
        out.secondary[i] = s_scale * sample_unit_cn(rng);
        out.interference[i] = los_amp * los.phasors[i] + scatter_amp * sample_unit_cn(rng);
    }
    out.primary_to_secondary_power =
        config.mean_ps_power > 0.0 ? std::norm(sample_rayleigh(config.mean_ps_power, rng)) : 0.0;
}

template <class Urbg>
ChannelRealization draw_slot(const NetworkConfig& config, const LosGeometry& los, Urbg& rng) {
    ChannelRealization out;
    draw_slot_into(config, los, rng, out);
    return out;
}

}  // namespace cogmac

#endif  // COGMAC_CHANNELS_HPP
