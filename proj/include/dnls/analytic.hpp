// Closed-form thermodynamics of the focusing cubic discrete NLS Gibbs
// ensemble: the coupling function m, the critical coupling theta_c, the
// condensate fraction curve and the free energy density.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

/// Ensemble parameters. theta = beta * B^2 is always derived, never stored.
struct ThermoParams {
    double beta = 0.0;  // inverse temperature, >= 0
    double B = 1.0;     // mass-density cutoff, > 0
    double h = 1.0;     // lattice spacing, > 0
    int n = 1;          // vertex count, >= 1

    double theta() const { return beta * B * B; }

    void validate() const {
        if (beta < 0.0) throw std::invalid_argument("ThermoParams: beta must be >= 0");
        if (B <= 0.0) throw std::invalid_argument("ThermoParams: B must be > 0");
        if (h <= 0.0) throw std::invalid_argument("ThermoParams: h must be > 0");
        if (n < 1) throw std::invalid_argument("ThermoParams: n must be >= 1");
    }
};

enum class Branch { Subcritical, Critical, Supercritical };

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::Subcritical: return "subcritical";
        case Branch::Critical: return "critical";
        default: return "supercritical";
    }
}

/// One point on the free-energy / condensate curves.
struct AnalyticPoint {
    double beta = 0.0;
    double B = 1.0;
    double theta = 0.0;
    double F = 0.0;         // free energy density
    double a = 0.0;         // condensate mass density
    double fraction = 0.0;  // a / B, zero on the subcritical branch
    Branch branch = Branch::Subcritical;
};

namespace detail {

// sqrt(1 - 2/theta) with a floating-point guard at theta = 2, where the
// radicand may land a hair below zero.
inline double root_term(double theta) {
    double rad = 1.0 - 2.0 / theta;
    if (rad < 0.0) {
        if (rad > -1e-14) return 0.0;
        throw std::domain_error("root_term: theta < 2");
    }
    return std::sqrt(rad);
}

}  // namespace detail

/// m(theta) = theta/2 - 1/2 + (theta/2) sqrt(1 - 2/theta)
///          + log(1/2 - (1/2) sqrt(1 - 2/theta)),   theta >= 2.
/// Strictly increasing; its unique zero is the critical coupling.
inline double m_of_theta(double theta) {
    if (!(theta >= 2.0 - 1e-14))
        throw std::domain_error("m_of_theta: theta must be >= 2");
    double s = detail::root_term(theta);
    return theta / 2.0 - 0.5 + theta / 2.0 * s + std::log(0.5 - 0.5 * s);
}

/// Unique root of m on [2, 3] by bisection, to 1e-10 absolute.
/// The bracket is guaranteed: m(2) = 1/2 - log 2 < 0 < m(3).
inline double solve_theta_c() {
    double lo = 2.0, hi = 3.0;
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        (m_of_theta(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Cached critical coupling theta_c ~ 2.455407.
inline double theta_c() {
    static const double tc = solve_theta_c();
    return tc;
}

/// f_theta(x) = theta x^2 + log(1 - x) on [0, 1).
inline double f_theta(double theta, double x) {
    if (theta < 0.0) throw std::domain_error("f_theta: theta must be >= 0");
    if (x < 0.0 || x >= 1.0) throw std::domain_error("f_theta: x must lie in [0, 1)");
    return theta * x * x + std::log1p(-x);
}

/// Maximizer x*(theta) = 1/2 + (1/2) sqrt(1 - 2/theta) of f_theta, in [1/2, 1).
/// Extended to theta = 2 by continuity (value 1/2).
inline double x_star(double theta) {
    return 0.5 + 0.5 * detail::root_term(theta);
}

inline Branch classify(double theta) {
    double tc = theta_c();
    if (theta < tc) return Branch::Subcritical;
    if (theta > tc) return Branch::Supercritical;
    return Branch::Critical;
}

/// Condensate mass density a = B x*(beta B^2). Meaningful above theta_c;
/// below it the value is diagnostic only (see the branch field of
/// free_energy_F).
inline double condensate_a(const ThermoParams& p) {
    p.validate();
    return p.B * x_star(p.theta());
}

/// L(a, b) = beta a^2 + log(b - a) + log pi + 1, defined for 0 <= a < b.
inline double L_of_ab(const ThermoParams& p, double a, double b) {
    if (a < 0.0 || a >= b) throw std::domain_error("L_of_ab: need 0 <= a < b");
    return p.beta * a * a + std::log(b - a) + std::log(M_PI) + 1.0;
}

/// Free energy density: log(B pi e) below theta_c, plus m(theta) above.
inline AnalyticPoint free_energy_F(const ThermoParams& p) {
    p.validate();
    AnalyticPoint pt;
    pt.beta = p.beta;
    pt.B = p.B;
    pt.theta = p.theta();
    pt.branch = classify(pt.theta);
    pt.F = std::log(p.B * M_PI * std::exp(1.0));
    if (pt.branch == Branch::Subcritical) {
        pt.a = 0.0;
        pt.fraction = 0.0;
    } else {
        if (pt.branch == Branch::Supercritical) pt.F += m_of_theta(pt.theta);
        pt.a = condensate_a(p);
        pt.fraction = pt.a / p.B;
    }
    return pt;
}

/// One AnalyticPoint per beta; the source data for the free-energy and
/// condensate-fraction figures.
inline std::vector<AnalyticPoint> emit_curves(double B, const std::vector<double>& beta_grid) {
    std::vector<AnalyticPoint> out;
    out.reserve(beta_grid.size());
    double prev = -1.0;
    for (double beta : beta_grid) {
        if (beta < 0.0) throw std::invalid_argument("emit_curves: negative beta in grid");
        if (beta < prev) throw std::invalid_argument("emit_curves: beta grid not sorted");
        prev = beta;
        out.push_back(free_energy_F({beta, B, 1.0, 1}));
    }
    return out;
}

}  // namespace dnls
