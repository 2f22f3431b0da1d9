#ifndef COGMAC_ESPAR_HPP
#define COGMAC_ESPAR_HPP

// Beamspace model of an electronically steerable parasitic array radiator:
// one active element at the origin, M-1 parasitic elements on a circle.
//
// Inner products of pattern functions use the normalised trapezoidal rule
// <f, g> = (1/G) sum_k f(theta_k) conj(g(theta_k)) on a uniform grid of G angles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cogmac::espar {

using cd = std::complex<double>;

class EsparError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// (Y^-1 + X) too ill-conditioned to solve for the element currents.
class DegenerateLoadError : public EsparError {
public:
    explicit DegenerateLoadError(double condition)
        : EsparError("degenerate load: condition number " + std::to_string(condition) + " exceeds 1e12"),
          condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

struct ElementPosition {
    double radius = 0.0;  // wavelengths
    double angle = 0.0;   // radians
};

struct EsparConfig {
    int m_elements = 1;
    Eigen::MatrixXcd admittance;  // Y, symmetric
    cd feed_voltage{1.0, 0.0};    // v_s
    double active_load = 50.0;    // real load on the active element, ohms
    std::vector<ElementPosition> positions;  // element 0 is the active centre element

    void validate() const {
        if (m_elements < 1) throw EsparError("m_elements must be >= 1");
        if (admittance.rows() != m_elements || admittance.cols() != m_elements)
            throw EsparError("admittance must be " + std::to_string(m_elements) + "x" + std::to_string(m_elements));
        const double scale = admittance.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || !admittance.allFinite()) throw EsparError("admittance must be finite and nonzero");
        if ((admittance - admittance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw EsparError("admittance must be symmetric");
        if (positions.size() != static_cast<std::size_t>(m_elements))
            throw EsparError("positions must list one entry per element");
        for (std::size_t m = 1; m < positions.size(); ++m)
            if (!(positions[m].radius > 0.0)) throw EsparError("parasitic element radius must be > 0");
    }
};

/// Parasitics evenly spaced on a circle of `radius` wavelengths around the active element.
inline std::vector<ElementPosition> circular_positions(int m_elements, double radius = 1.0 / 16.0) {
    std::vector<ElementPosition> pos{{0.0, 0.0}};
    const int parasitics = m_elements - 1;
    for (int m = 0; m < parasitics; ++m)
        pos.push_back({radius, 2.0 * std::numbers::pi * m / parasitics});
    return pos;
}

/// Synthetic admittance fixture: symmetric and diagonally dominant, with mutual terms
/// decaying with element spacing. Not derived from an electromagnetic model.
inline Eigen::MatrixXcd synthetic_admittance(const std::vector<ElementPosition>& pos) {
    const auto m = static_cast<Eigen::Index>(pos.size());
    Eigen::MatrixXcd y(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) {
                y(i, j) = cd(8.0e-3, -4.0e-3);
                continue;
            }
            const double xi = pos[i].radius * std::cos(pos[i].angle), yi = pos[i].radius * std::sin(pos[i].angle);
            const double xj = pos[j].radius * std::cos(pos[j].angle), yj = pos[j].radius * std::sin(pos[j].angle);
            const double d = std::hypot(xi - xj, yi - yj);
            y(i, j) = cd(-1.5e-3, 1.0e-3) / (1.0 + 4.0 * d);
        }
    }
    return y;
}

inline EsparConfig default_config(int m_elements, double radius = 1.0 / 16.0) {
    EsparConfig cfg;
    cfg.m_elements = m_elements;
    cfg.positions = circular_positions(m_elements, radius);
    cfg.admittance = synthetic_admittance(cfg.positions);
    return cfg;
}

/// a_m(theta) = exp(j 2 pi r_m cos(theta - psi_m)).
inline cd steering_entry(const ElementPosition& p, double theta) {
    if (p.radius == 0.0) return {1.0, 0.0};
    const double t = std::fmod(theta, 2.0 * std::numbers::pi);  // P(0) == P(2 pi) bit for bit
    return std::polar(1.0, 2.0 * std::numbers::pi * p.radius * std::cos(t - p.angle));
}

inline Eigen::VectorXcd steering_vector(std::span<const ElementPosition> pos, double theta) {
    Eigen::VectorXcd a(static_cast<Eigen::Index>(pos.size()));
    for (std::size_t m = 0; m < pos.size(); ++m) a(static_cast<Eigen::Index>(m)) = steering_entry(pos[m], theta);
    return a;
}

inline double condition_number(const Eigen::MatrixXcd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

/// i = v_s (Y^-1 + X)^-1 u with X = diag(active_load, j x_1, ..., j x_{M-1}) and u = e_0.
inline Eigen::VectorXcd element_currents(const EsparConfig& cfg, std::span<const double> reactances) {
    cfg.validate();
    const Eigen::Index m = cfg.m_elements;
    if (reactances.size() != static_cast<std::size_t>(m - 1))
        throw EsparError("expected " + std::to_string(m - 1) + " reactances, got " + std::to_string(reactances.size()));
    const double y_cond = condition_number(cfg.admittance);
    if (!(y_cond <= 1e12)) throw DegenerateLoadError(y_cond);

    Eigen::MatrixXcd a = cfg.admittance.inverse();
    a(0, 0) += cfg.active_load;
    for (Eigen::Index k = 1; k < m; ++k) a(k, k) += cd(0.0, reactances[static_cast<std::size_t>(k - 1)]);
    const double cond = condition_number(a);
    if (!(cond <= 1e12)) throw DegenerateLoadError(cond);

    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(m);
    u(0) = cfg.feed_voltage;
    return a.colPivHouseholderQr().solve(u);
}

struct BasisSet {
    std::vector<double> theta_grid;
    Eigen::MatrixXcd basis_values;  // M x G, row l holds Phi_l on the grid
    Eigen::MatrixXcd projections;   // M x M, column l is q_l with q_l[m] = <a_m, Phi_l>
    Eigen::MatrixXcd coefficients;  // Phi_l(theta) = sum_m coefficients(l, m) a_m(theta)
    std::vector<ElementPosition> positions;

    Eigen::Index size() const { return basis_values.rows(); }

    /// Phi_l at an arbitrary angle.
    cd evaluate(Eigen::Index l, double theta) const {
        return (coefficients.row(l) * steering_vector(positions, theta))(0);
    }
};

/// Normalised trapezoidal inner product of two sampled functions.
inline cd grid_inner(const Eigen::Ref<const Eigen::RowVectorXcd>& f, const Eigen::Ref<const Eigen::RowVectorXcd>& g) {
    return (f.array() * g.array().conjugate()).sum() / static_cast<double>(f.size());
}

/// Gram-Schmidt orthonormalisation of the steering entries a_m(theta) on a uniform grid.
inline BasisSet build_basis(const EsparConfig& cfg, int grid_size) {
    cfg.validate();
    const Eigen::Index m = cfg.m_elements;
    if (grid_size < 4 * m) throw EsparError("grid_size must be >= 4 M");
    const Eigen::Index g = grid_size;

    BasisSet b;
    b.positions = cfg.positions;
    b.theta_grid.resize(static_cast<std::size_t>(g));
    Eigen::MatrixXcd steer(m, g);
    for (Eigen::Index k = 0; k < g; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(g);
        b.theta_grid[static_cast<std::size_t>(k)] = theta;
        steer.col(k) = steering_vector(cfg.positions, theta);
    }

    b.basis_values.resize(m, g);
    b.coefficients = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index l = 0; l < m; ++l) {
        Eigen::RowVectorXcd v = steer.row(l);
        Eigen::RowVectorXcd c = Eigen::RowVectorXcd::Zero(m);
        c(l) = 1.0;
        const double original = std::sqrt(grid_inner(v, v).real());
        // two passes of modified Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index j = 0; j < l; ++j) {
                const cd proj = grid_inner(v, b.basis_values.row(j));
                v -= proj * b.basis_values.row(j);
                c -= proj * b.coefficients.row(j);
            }
        }
        const double norm = std::sqrt(grid_inner(v, v).real());
        if (!(norm > 1e-10 * original))
            throw EsparError("rank-deficient steering functions: element " + std::to_string(l) +
                             " is linearly dependent on earlier elements");
        b.basis_values.row(l) = v / norm;
        b.coefficients.row(l) = c / norm;
    }

    b.projections.resize(m, m);
    for (Eigen::Index am = 0; am < m; ++am)
        for (Eigen::Index l = 0; l < m; ++l) b.projections(am, l) = grid_inner(steer.row(am), b.basis_values.row(l));
    return b;
}

/// Gram matrix of the basis under the grid inner product.
inline Eigen::MatrixXcd gram_matrix(const BasisSet& b) {
    const Eigen::Index m = b.size();
    Eigen::MatrixXcd gm(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) gm(i, j) = grid_inner(b.basis_values.row(i), b.basis_values.row(j));
    return gm;
}

/// max |<Phi_i, Phi_j> - delta_ij|.
inline double orthonormality_error(const BasisSet& b) {
    const Eigen::Index m = b.size();
    return (gram_matrix(b) - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
}

/// w_l = i^T q_l.
inline Eigen::VectorXcd pattern_weights(const Eigen::VectorXcd& currents, const BasisSet& b) {
    if (currents.size() != b.projections.rows()) throw EsparError("pattern_weights: dimension mismatch");
    return b.projections.transpose() * currents;
}

/// P(theta) = i^T a(theta).
inline cd pattern_value(const Eigen::VectorXcd& currents, const EsparConfig& cfg, double theta) {
    if (currents.size() != cfg.m_elements) throw EsparError("pattern_value: dimension mismatch");
    return (currents.transpose() * steering_vector(cfg.positions, theta))(0);
}

/// sum_l w_l Phi_l(theta), evaluated off-grid through the Gram-Schmidt coefficients.
inline cd pattern_from_weights(const Eigen::VectorXcd& weights, const BasisSet& b, double theta) {
    if (weights.size() != b.size()) throw EsparError("pattern_from_weights: dimension mismatch");
    const Eigen::VectorXcd phi = b.coefficients * steering_vector(b.positions, theta);
    return (weights.transpose() * phi)(0);
}

/// Largest pointwise |i^T a(theta_k) - sum_l w_l Phi_l(theta_k)| over the grid.
inline double reconstruction_error(const Eigen::VectorXcd& currents, const BasisSet& b) {
    const Eigen::VectorXcd w = pattern_weights(currents, b);
    double worst = 0.0;
    for (std::size_t k = 0; k < b.theta_grid.size(); ++k) {
        const cd direct = (currents.transpose() * steering_vector(b.positions, b.theta_grid[k]))(0);
        const cd expanded = (w.transpose() * b.basis_values.col(static_cast<Eigen::Index>(k)))(0);
        worst = std::max(worst, std::abs(direct - expanded));
    }
    return worst;
}

/// |sum_l |w_l|^2 - <P, P>| for the pattern produced by `currents`.
inline double parseval_error(const Eigen::VectorXcd& currents, const BasisSet& b) {
    const Eigen::VectorXcd w = pattern_weights(currents, b);
    const auto g = static_cast<Eigen::Index>(b.theta_grid.size());
    Eigen::RowVectorXcd p(g);
    for (Eigen::Index k = 0; k < g; ++k)
        p(k) = (currents.transpose() * steering_vector(b.positions, b.theta_grid[static_cast<std::size_t>(k)]))(0);
    return std::abs(w.squaredNorm() - grid_inner(p, p).real());
}

}  // namespace cogmac::espar

#endif  // COGMAC_ESPAR_HPP
