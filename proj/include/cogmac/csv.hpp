#ifndef COGMAC_CSV_HPP
#define COGMAC_CSV_HPP

// CSV output. Numbers use 17 significant digits via std::to_chars, so files are
// locale-independent and reproduce doubles exactly.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>

#include "espar.hpp"
#include "simulator.hpp"

namespace cogmac {

inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

inline constexpr const char* kSweepCsvHeader =
    "mode,N,M,K,gamma_s,gamma_sp,Qp,mean_capacity,stderr,trials,seed,norm_log_n,norm_loglog_n,multiuser_gain";

/// One row per successful sweep point, capacities in the configured log base.
/// norm_log_n needs N >= 2 and norm_loglog_n needs N >= 3; otherwise the cell is empty.
/// multiuser_gain is C_N / C_1 for the same (mode, M, K). A trailer row
/// "# partial,<failed>,<total>" marks a sweep with failed points.
inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    const NetworkConfig& c = r.config_template;
    out << kSweepCsvHeader << '\n';
    for (const auto& pt : r.points) {
        if (!pt.ok()) continue;
        const double cap = to_log_base(pt.estimate->mean, c.log_base);
        const double se = to_log_base(pt.estimate->std_error, c.log_base);
        const double n = static_cast<double>(pt.n_users);
        out << to_string(pt.mode) << ',' << pt.n_users << ',' << pt.m_patterns << ',' << format_double(pt.k_factor)
            << ',' << format_double(c.mean_secondary_power) << ',' << format_double(c.mean_interference_power) << ','
            << format_double(c.peak_interference) << ',' << format_double(cap) << ',' << format_double(se) << ','
            << pt.estimate->trials << ',' << c.seed << ',';
        if (pt.n_users >= 2) out << format_double(cap / std::log(n));
        out << ',';
        if (pt.n_users >= 3) out << format_double(cap / std::log(std::log(n)));
        out << ',';
        if (pt.single_user && pt.single_user->mean > 0.0) out << format_double(pt.estimate->mean / pt.single_user->mean);
        out << '\n';
    }
    if (const auto failed = r.failed(); failed > 0) out << "# partial," << failed << ',' << r.points.size() << '\n';
}

/// theta, Re P, Im P over the basis grid.
inline void write_pattern_csv(std::ostream& out, const Eigen::VectorXcd& currents, const espar::EsparConfig& cfg,
                              const std::vector<double>& thetas) {
    out << "theta,re_p,im_p\n";
    for (double t : thetas) {
        const auto p = espar::pattern_value(currents, cfg, t);
        out << format_double(t) << ',' << format_double(p.real()) << ',' << format_double(p.imag()) << '\n';
    }
}

}  // namespace cogmac

#endif  // COGMAC_CSV_HPP
