// Exact small-n integrals of the Gibbs measure: the partition function and
// observable expectations at n <= 2 by adaptive quadrature. These anchor
// the Monte Carlo sampler.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "dnls/analytic.hpp"
#include "dnls/graph.hpp"

namespace dnls {

namespace quad {

// Adaptive Simpson on [a, b].
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40) {
    if (b <= a) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol * std::max(1.0, std::abs(whole)),
                       max_depth);
}

// exp(-z) I0(z) and exp(-z) I1(z), stable for large z.
inline double i0_scaled(double z) {
    if (z < 25.0) return std::exp(-z) * std::cyl_bessel_i(0.0, z);
    double iz = 1.0 / z;
    double s = 1.0 + iz * (1.0 / 8.0 + iz * (9.0 / 128.0 + iz * 225.0 / 3072.0));
    return s / std::sqrt(2.0 * M_PI * z);
}

inline double i1_scaled(double z) {
    if (z < 25.0) return std::exp(-z) * std::cyl_bessel_i(1.0, z);
    double iz = 1.0 / z;
    double s = 1.0 - iz * (3.0 / 8.0 + iz * (15.0 / 128.0 + iz * 315.0 / 3072.0));
    return s / std::sqrt(2.0 * M_PI * z);
}

// I1(z)/I0(z)
inline double bessel_ratio(double z) {
    if (z == 0.0) return 0.0;
    return i1_scaled(z) / i0_scaled(z);
}

}  // namespace quad

enum class MomentKind { N, S4, H };

namespace detail {

// n = 1 in polar mass coordinate s = |f|^2: density pi * exp(beta s^2) on
// [0, B] (no edges, so H = -S4 and the kinetic term is absent).
inline double one_site_integral(const ThermoParams& p, int power) {
    return M_PI * quad::integrate(
                      [&](double s) { return std::pow(s, power) * std::exp(p.beta * s * s); },
                      0.0, p.B, 1e-12);
}

// n = 2 integrals in mass coordinates (r1, r2) over the triangle
// r1 + r2 <= 2B. The angular integral of the edge coupling produces the
// Bessel factor I0(2 beta sqrt(r1 r2) / h^2); the h-dependent exponential
// is folded into exp(-beta (sqrt r1 - sqrt r2)^2 / h^2) for stability.
// `weight_extra(r1, r2, z)` multiplies the Gibbs weight pointwise.
inline double two_site_integral(const ThermoParams& p, bool has_edge,
                                const std::function<double(double, double, double)>& g) {
    double inv_h2 = has_edge ? 1.0 / (p.h * p.h) : 0.0;
    auto inner = [&](double r1) {
        return quad::integrate(
            [&](double r2) {
                double z = 2.0 * p.beta * std::sqrt(r1 * r2) * inv_h2;
                double d = std::sqrt(r1) - std::sqrt(r2);
                double log_w = -p.beta * d * d * inv_h2 +
                               0.5 * p.beta * (r1 * r1 + r2 * r2);
                double w = std::exp(log_w) * (has_edge ? quad::i0_scaled(z) : 1.0);
                return w * g(r1, r2, z);
            },
            0.0, 2.0 * p.B - r1, 1e-11);
    };
    return M_PI * M_PI * quad::integrate(inner, 0.0, 2.0 * p.B, 1e-10);
}

inline void check_oracle_domain(const ThermoParams& p, const GraphTopology& g) {
    p.validate();
    if (g.n != p.n) throw std::invalid_argument("oracle: params.n does not match topology");
    if (g.n == 1) {
        if (!g.edges.empty()) throw std::invalid_argument("oracle: n = 1 must have no edges");
    } else if (g.n == 2) {
        if (g.edges.size() > 1) throw std::invalid_argument("oracle: n = 2 supports at most one edge");
    } else {
        throw std::invalid_argument("oracle: only n <= 2 is supported");
    }
}

}  // namespace detail

/// log of the partition function Z = int exp(-beta H) 1{N <= Bn} df for
/// n = 1, or n = 2 with at most one edge.
inline double oracle_quadrature_logZ(const ThermoParams& p, const GraphTopology& g) {
    detail::check_oracle_domain(p, g);
    if (g.n == 1) return std::log(detail::one_site_integral(p, 0));
    return std::log(detail::two_site_integral(p, !g.edges.empty(),
                                              [](double, double, double) { return 1.0; }));
}

/// log of the reduced partition function Z' (kinetic term dropped):
/// Z' = int exp(beta S4 / n) 1{N <= Bn} df. Satisfies Z <= Z'.
inline double oracle_quadrature_logZ_reduced(const ThermoParams& p, const GraphTopology& g) {
    detail::check_oracle_domain(p, g);
    if (g.n == 1) return std::log(detail::one_site_integral(p, 0));
    return std::log(detail::two_site_integral(p, false,
                                              [](double, double, double) { return 1.0; }));
}

/// E[N], E[S4] or E[H] under the Gibbs measure, by ratio of quadratures.
inline double oracle_quadrature_moments(const ThermoParams& p, const GraphTopology& g,
                                        MomentKind kind) {
    detail::check_oracle_domain(p, g);
    if (g.n == 1) {
        double z = detail::one_site_integral(p, 0);
        switch (kind) {
            case MomentKind::N: return detail::one_site_integral(p, 1) / z;
            case MomentKind::S4: return detail::one_site_integral(p, 2) / z;
            case MomentKind::H: return -detail::one_site_integral(p, 2) / z;
        }
    }
    bool edge = !g.edges.empty();
    double inv_h2 = 1.0 / (p.h * p.h);
    std::function<double(double, double, double)> g_fn;
    switch (kind) {
        case MomentKind::N:
            g_fn = [](double r1, double r2, double) { return r1 + r2; };
            break;
        case MomentKind::S4:
            g_fn = [](double r1, double r2, double) { return r1 * r1 + r2 * r2; };
            break;
        case MomentKind::H:
            // H = (r1 + r2 - 2 sqrt(r1 r2) cos phi)/h^2 - (r1^2 + r2^2)/2;
            // the angular average of cos phi under the tilted weight is I1/I0.
            g_fn = [edge, inv_h2](double r1, double r2, double z) {
                double quartic = -0.5 * (r1 * r1 + r2 * r2);
                if (!edge) return quartic;
                return (r1 + r2 - 2.0 * std::sqrt(r1 * r2) * quad::bessel_ratio(z)) * inv_h2 +
                       quartic;
            };
            break;
    }
    double z = detail::two_site_integral(p, edge, [](double, double, double) { return 1.0; });
    return detail::two_site_integral(p, edge, g_fn) / z;
}

/// Exact anchor at beta = 0: Z is the volume of the 2n-ball of radius
/// sqrt(Bn), so log Z = n log(pi B n) - log(n!).
inline double logZ_beta0(double B, int n) {
    return double(n) * std::log(M_PI * B * double(n)) - std::lgamma(double(n) + 1.0);
}

}  // namespace dnls
