#ifndef COGMAC_CONFIG_HPP
#define COGMAC_CONFIG_HPP

// JSON experiment configuration: network parameters, sweep grid, ESPAR section and
// the built-in figure presets. Parsing is strict: unknown keys are errors, and every
// error names the offending key path.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "espar.hpp"
#include "network.hpp"
#include "simulator.hpp"

namespace cogmac {

using Json = nlohmann::ordered_json;

/// Array geometry, admittance and load settings for the `espar` command.
struct EsparSection {
    int m_elements = 4;
    double radius = 1.0 / 16.0;                  // wavelengths
    std::complex<double> feed_voltage{1.0, 0.0};
    double active_load = 50.0;                   // ohms
    std::optional<Eigen::MatrixXcd> admittance;  // synthetic fixture when absent
    int grid_size = 256;
    std::vector<double> reactances;              // M-1 entries; zeros when empty

    espar::EsparConfig to_config() const {
        espar::EsparConfig cfg;
        cfg.m_elements = m_elements;
        cfg.positions = espar::circular_positions(m_elements, radius);
        cfg.admittance = admittance ? *admittance : espar::synthetic_admittance(cfg.positions);
        cfg.feed_voltage = feed_voltage;
        cfg.active_load = active_load;
        return cfg;
    }

    std::vector<double> effective_reactances() const {
        return reactances.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(m_elements - 1, 0)), 0.0)
                                  : reactances;
    }

    void validate(const std::string& prefix = "espar.") const {
        if (m_elements < 1) throw ConfigError(prefix + "m_elements", "must be >= 1");
        if (!std::isfinite(radius) || radius <= 0.0) throw ConfigError(prefix + "radius", "must be finite and > 0");
        if (!std::isfinite(feed_voltage.real()) || !std::isfinite(feed_voltage.imag()))
            throw ConfigError(prefix + "feed_voltage", "must be finite");
        if (!std::isfinite(active_load) || active_load < 0.0)
            throw ConfigError(prefix + "active_load", "must be finite and >= 0");
        if (grid_size < 4 * m_elements) throw ConfigError(prefix + "grid_size", "must be >= 4 * m_elements");
        if (!reactances.empty() && reactances.size() != static_cast<std::size_t>(m_elements - 1))
            throw ConfigError(prefix + "reactances", "must hold m_elements - 1 values");
        for (double x : reactances)
            if (!std::isfinite(x)) throw ConfigError(prefix + "reactances", "must be finite");
        if (admittance && (admittance->rows() != m_elements || admittance->cols() != m_elements))
            throw ConfigError(prefix + "admittance", "must be m_elements x m_elements");
    }

    bool operator==(const EsparSection& o) const {
        if (admittance.has_value() != o.admittance.has_value()) return false;
        if (admittance && (admittance->rows() != o.admittance->rows() || admittance->cols() != o.admittance->cols() ||
                           *admittance != *o.admittance))
            return false;
        return m_elements == o.m_elements && radius == o.radius && feed_voltage == o.feed_voltage &&
               active_load == o.active_load && grid_size == o.grid_size && reactances == o.reactances;
    }
};

struct ExperimentPreset {
    std::string name = "custom";  // fig5 | fig6 | fig7 | fig8 | custom
    NetworkConfig network;
    SweepGrid sweep;
    std::string output_path;      // empty: standard output
    EsparSection espar;

    void validate() const;
    bool operator==(const ExperimentPreset&) const = default;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig5", "fig6", "fig7", "fig8", "custom"};
    return names;
}

/// N = 8, 16, ..., 512.
inline std::vector<int> log_spaced_users() { return {8, 16, 32, 64, 128, 256, 512}; }

inline SweepGrid singleton_grid(const NetworkConfig& c) {
    return {{c.n_users}, {c.k_factor}, {c.effective_patterns()}, {c.mode}};
}

inline void validate_grid(const SweepGrid& g, const std::string& prefix = "sweep.") {
    if (g.n_list.empty()) throw ConfigError(prefix + "n_list", "must be nonempty");
    if (g.k_list.empty()) throw ConfigError(prefix + "k_list", "must be nonempty");
    if (g.m_list.empty()) throw ConfigError(prefix + "m_list", "must be nonempty");
    if (g.modes.empty()) throw ConfigError(prefix + "modes", "must be nonempty");
    for (int n : g.n_list)
        if (n < 1) throw ConfigError(prefix + "n_list", "entries must be >= 1");
    for (double k : g.k_list)
        if (!std::isfinite(k) || k < 0.0) throw ConfigError(prefix + "k_list", "entries must be finite and >= 0");
    for (int m : g.m_list)
        if (m < 1) throw ConfigError(prefix + "m_list", "entries must be >= 1");
}

inline void ExperimentPreset::validate() const {
    bool known = false;
    for (const auto& n : preset_names()) known = known || n == name;
    if (!known) throw ConfigError("preset", "unknown preset '" + name + "'");
    network.validate("network.");
    validate_grid(sweep);
    espar.validate();
}

/// Figure presets fix gamma_s = gamma_sp = 1, gamma_p = 0 and Q_p = 1; absolute
/// capacity levels can therefore sit at a constant offset from published curves.
inline ExperimentPreset make_preset(const std::string& name) {
    ExperimentPreset p;
    p.name = name;
    NetworkConfig& c = p.network;
    c.mean_secondary_power = 1.0;
    c.mean_interference_power = 1.0;
    c.primary_power = 0.0;
    c.peak_interference = 1.0;
    if (name == "fig5") {
        c.mode = Mode::Baseline;
        c.m_patterns = 1;
        p.sweep = {log_spaced_users(), {0.0, 2.0, 3.0, 10.0}, {1}, {Mode::Baseline}};
    } else if (name == "fig6") {
        c.k_factor = 10.0;
        p.sweep = {log_spaced_users(), {0.0, 10.0}, {2, 3, 4}, {Mode::Baseline, Mode::Rab}};
    } else if (name == "fig7") {
        c.k_factor = 10.0;
        p.sweep = {log_spaced_users(), {0.0, 10.0, 100.0}, {2}, {Mode::Baseline, Mode::Rab}};
    } else if (name == "fig8") {
        c.k_factor = 100.0;
        p.sweep = {log_spaced_users(), {0.0, 100.0}, {2}, {Mode::Baseline, Mode::Rab}};
    } else if (name == "custom") {
        p.sweep = singleton_grid(c);
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "'");
    }
    if (name != "custom") p.output_path = name + ".csv";
    return p;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix.substr(0, prefix.size() - 1),
                                            "must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key)) throw ConfigError(prefix + key, "unknown key");
}

template <class T>
T get_as(const Json& v, const std::string& path) {
    try {
        if constexpr (std::is_same_v<T, int> || std::is_same_v<T, long long>) {
            if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
            const auto x = v.get<long long>();
            if constexpr (std::is_same_v<T, int>)
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                    throw ConfigError(path, "out of range");
            return static_cast<T>(x);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) throw ConfigError(path, "must be a nonnegative integer");
            return v.get<std::uint64_t>();
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError(path, "must be a number");
            return v.get<double>();
        } else {
            if (!v.is_string()) throw ConfigError(path, "must be a string");
            return v.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path, e.what());
    }
}

template <class T>
std::vector<T> get_list(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "must be an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_as<T>(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Mode parse_mode(const std::string& s, const std::string& path) {
    if (s == "baseline") return Mode::Baseline;
    if (s == "rab") return Mode::Rab;
    throw ConfigError(path, "must be 'baseline' or 'rab'");
}

inline LogBase parse_log_base(const std::string& s, const std::string& path) {
    if (s == "nats") return LogBase::Nats;
    if (s == "bits") return LogBase::Bits;
    throw ConfigError(path, "must be 'nats' or 'bits'");
}

inline std::complex<double> parse_complex(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(path, "must be a [re, im] pair");
    return {get_as<double>(v[0], path + "[0]"), get_as<double>(v[1], path + "[1]")};
}

inline void parse_network(const Json& j, NetworkConfig& c) {
    const std::string p = "network.";
    reject_unknown(j, {"n_users", "m_patterns", "k_factor", "mean_secondary_power", "mean_interference_power",
                       "primary_power", "mean_ps_power", "peak_interference", "trials", "seed", "mode", "log_base",
                       "max_power_cap"},
                   p);
    if (j.contains("mode")) {
        c.mode = parse_mode(get_as<std::string>(j["mode"], p + "mode"), p + "mode");
        if (c.mode == Mode::Baseline && !j.contains("m_patterns")) c.m_patterns = 1;
    }
    if (j.contains("n_users")) c.n_users = get_as<int>(j["n_users"], p + "n_users");
    if (j.contains("m_patterns")) c.m_patterns = get_as<int>(j["m_patterns"], p + "m_patterns");
    if (j.contains("k_factor")) c.k_factor = get_as<double>(j["k_factor"], p + "k_factor");
    if (j.contains("mean_secondary_power"))
        c.mean_secondary_power = get_as<double>(j["mean_secondary_power"], p + "mean_secondary_power");
    if (j.contains("mean_interference_power"))
        c.mean_interference_power = get_as<double>(j["mean_interference_power"], p + "mean_interference_power");
    if (j.contains("primary_power")) c.primary_power = get_as<double>(j["primary_power"], p + "primary_power");
    if (j.contains("mean_ps_power")) c.mean_ps_power = get_as<double>(j["mean_ps_power"], p + "mean_ps_power");
    if (j.contains("peak_interference"))
        c.peak_interference = get_as<double>(j["peak_interference"], p + "peak_interference");
    if (j.contains("trials")) c.trials = get_as<long long>(j["trials"], p + "trials");
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], p + "seed");
    if (j.contains("log_base")) c.log_base = parse_log_base(get_as<std::string>(j["log_base"], p + "log_base"), p + "log_base");
    if (j.contains("max_power_cap")) {
        if (j["max_power_cap"].is_null())
            c.max_power_cap.reset();
        else
            c.max_power_cap = get_as<double>(j["max_power_cap"], p + "max_power_cap");
    }
}

inline void parse_sweep(const Json& j, SweepGrid& g) {
    const std::string p = "sweep.";
    reject_unknown(j, {"n_list", "k_list", "m_list", "modes"}, p);
    if (j.contains("n_list")) g.n_list = get_list<int>(j["n_list"], p + "n_list");
    if (j.contains("k_list")) g.k_list = get_list<double>(j["k_list"], p + "k_list");
    if (j.contains("m_list")) g.m_list = get_list<int>(j["m_list"], p + "m_list");
    if (j.contains("modes")) {
        g.modes.clear();
        const auto names = get_list<std::string>(j["modes"], p + "modes");
        for (std::size_t i = 0; i < names.size(); ++i)
            g.modes.push_back(parse_mode(names[i], p + "modes[" + std::to_string(i) + "]"));
    }
}

inline void parse_espar(const Json& j, EsparSection& e) {
    const std::string p = "espar.";
    reject_unknown(j, {"m_elements", "radius", "feed_voltage", "active_load", "admittance", "grid_size", "reactances"},
                   p);
    if (j.contains("m_elements")) e.m_elements = get_as<int>(j["m_elements"], p + "m_elements");
    if (j.contains("radius")) e.radius = get_as<double>(j["radius"], p + "radius");
    if (j.contains("feed_voltage")) e.feed_voltage = parse_complex(j["feed_voltage"], p + "feed_voltage");
    if (j.contains("active_load")) e.active_load = get_as<double>(j["active_load"], p + "active_load");
    if (j.contains("grid_size")) e.grid_size = get_as<int>(j["grid_size"], p + "grid_size");
    if (j.contains("reactances")) e.reactances = get_list<double>(j["reactances"], p + "reactances");
    if (j.contains("admittance")) {
        const auto& a = j["admittance"];
        const std::string ap = p + "admittance";
        if (a.is_null()) {
            e.admittance.reset();
        } else {
            if (!a.is_array() || a.empty()) throw ConfigError(ap, "must be a nonempty array of rows");
            const auto rows = static_cast<Eigen::Index>(a.size());
            Eigen::MatrixXcd y(rows, rows);
            for (Eigen::Index r = 0; r < rows; ++r) {
                const auto& row = a[static_cast<std::size_t>(r)];
                const std::string rp = ap + "[" + std::to_string(r) + "]";
                if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
                    throw ConfigError(rp, "must hold " + std::to_string(rows) + " entries");
                for (Eigen::Index c = 0; c < rows; ++c)
                    y(r, c) = parse_complex(row[static_cast<std::size_t>(c)], rp + "[" + std::to_string(c) + "]");
            }
            e.admittance = y;
        }
    }
}

}  // namespace detail

/// Builds a validated preset from a parsed document. A named preset supplies the
/// defaults; `network`, `sweep`, `espar` and `output` then override field by field.
/// A custom preset without a `sweep` section runs the single network point.
inline ExperimentPreset parse_config(const Json& j) {
    detail::reject_unknown(j, {"preset", "output", "network", "sweep", "espar"}, "");
    const std::string name = j.contains("preset") ? detail::get_as<std::string>(j["preset"], "preset") : "custom";
    ExperimentPreset p = make_preset(name);
    if (j.contains("network")) detail::parse_network(j["network"], p.network);
    if (j.contains("sweep"))
        detail::parse_sweep(j["sweep"], p.sweep);
    else if (name == "custom")
        p.sweep = singleton_grid(p.network);
    if (j.contains("output")) p.output_path = detail::get_as<std::string>(j["output"], "output");
    if (j.contains("espar")) detail::parse_espar(j["espar"], p.espar);
    p.validate();
    return p;
}

inline ExperimentPreset parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<document>", e.what());
    }
    return parse_config(j);
}

inline ExperimentPreset parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Emission

inline Json to_json(const ExperimentPreset& p) {
    Json j;
    j["preset"] = p.name;
    j["output"] = p.output_path;
    const NetworkConfig& c = p.network;
    Json n;
    n["n_users"] = c.n_users;
    n["m_patterns"] = c.m_patterns;
    n["k_factor"] = c.k_factor;
    n["mean_secondary_power"] = c.mean_secondary_power;
    n["mean_interference_power"] = c.mean_interference_power;
    n["primary_power"] = c.primary_power;
    n["mean_ps_power"] = c.mean_ps_power;
    n["peak_interference"] = c.peak_interference;
    n["trials"] = c.trials;
    n["seed"] = c.seed;
    n["mode"] = to_string(c.mode);
    n["log_base"] = to_string(c.log_base);
    n["max_power_cap"] = c.max_power_cap ? Json(*c.max_power_cap) : Json(nullptr);
    j["network"] = n;

    Json s;
    s["n_list"] = p.sweep.n_list;
    s["k_list"] = p.sweep.k_list;
    s["m_list"] = p.sweep.m_list;
    Json modes = Json::array();
    for (Mode m : p.sweep.modes) modes.push_back(to_string(m));
    s["modes"] = modes;
    j["sweep"] = s;

    const EsparSection& e = p.espar;
    Json es;
    es["m_elements"] = e.m_elements;
    es["radius"] = e.radius;
    es["feed_voltage"] = {e.feed_voltage.real(), e.feed_voltage.imag()};
    es["active_load"] = e.active_load;
    if (e.admittance) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < e.admittance->rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index col = 0; col < e.admittance->cols(); ++col)
                row.push_back({(*e.admittance)(r, col).real(), (*e.admittance)(r, col).imag()});
            rows.push_back(row);
        }
        es["admittance"] = rows;
    } else {
        es["admittance"] = nullptr;
    }
    es["grid_size"] = e.grid_size;
    es["reactances"] = e.reactances;
    j["espar"] = es;
    return j;
}

/// Effective configuration as indented JSON; parse_config_text inverts it exactly.
inline std::string emit_config(const ExperimentPreset& p) { return to_json(p).dump(2) + "\n"; }

}  // namespace cogmac

#endif  // COGMAC_CONFIG_HPP
