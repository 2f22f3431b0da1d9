#ifndef COGMAC_NETWORK_HPP
#define COGMAC_NETWORK_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cogmac {

enum class Mode { Baseline, Rab };
enum class LogBase { Nats, Bits };

inline const char* to_string(Mode m) { return m == Mode::Baseline ? "baseline" : "rab"; }
inline const char* to_string(LogBase b) { return b == LogBase::Nats ? "nats" : "bits"; }

/// Invalid configuration value; `key()` names the offending field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct NetworkConfig {
    int n_users = 100;
    int m_patterns = 2;
    double k_factor = 0.0;
    double mean_secondary_power = 1.0;     // gamma_s bar
    double mean_interference_power = 1.0;  // gamma_sp bar
    double primary_power = 0.0;            // gamma_p bar; 0 disables primary interference
    double mean_ps_power = 1.0;            // gamma_ps bar
    double peak_interference = 1.0;        // Q_p
    long long trials = 100000;
    std::uint64_t seed = 42;
    Mode mode = Mode::Rab;
    LogBase log_base = LogBase::Nats;
    std::optional<double> max_power_cap;   // off unless set

    /// Baseline transmission has a single radiation pattern.
    int effective_patterns() const { return mode == Mode::Baseline ? 1 : m_patterns; }

    void validate(const std::string& prefix = "") const {
        auto fail = [&](const char* key, const std::string& msg) { throw ConfigError(prefix + key, msg); };
        auto finite_positive = [&](double v, const char* key) {
            if (!std::isfinite(v) || v <= 0.0) fail(key, "must be finite and > 0");
        };
        auto finite_nonnegative = [&](double v, const char* key) {
            if (!std::isfinite(v) || v < 0.0) fail(key, "must be finite and >= 0");
        };
        if (n_users < 1) fail("n_users", "must be >= 1");
        if (m_patterns < 1) fail("m_patterns", "must be >= 1");
        if (mode == Mode::Baseline && m_patterns != 1) fail("m_patterns", "baseline mode requires m_patterns = 1");
        finite_nonnegative(k_factor, "k_factor");
        finite_positive(mean_secondary_power, "mean_secondary_power");
        finite_positive(mean_interference_power, "mean_interference_power");
        finite_nonnegative(primary_power, "primary_power");
        finite_nonnegative(mean_ps_power, "mean_ps_power");
        finite_positive(peak_interference, "peak_interference");
        if (trials < 1) fail("trials", "must be >= 1");
        if (max_power_cap) finite_positive(*max_power_cap, "max_power_cap");
    }

    /// Validated copy with baseline mode collapsed to one pattern.
    NetworkConfig normalized() const {
        NetworkConfig c = *this;
        if (c.mode == Mode::Baseline) c.m_patterns = 1;
        c.validate();
        return c;
    }

    bool operator==(const NetworkConfig&) const = default;
};

}  // namespace cogmac

#endif  // COGMAC_NETWORK_HPP
