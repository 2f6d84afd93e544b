// Functionals of the state: discrete Laplacian, Hamiltonian, power,
// quartic sum, largest components and the discrete H^1 norm.
#pragma once

#include <stdexcept>

#include "dnls/field.hpp"
#include "dnls/graph.hpp"

namespace dnls {

/// Kahan compensated accumulator. Summation order is fixed (vertex-index
/// ascending) so results are reproducible across runs.
class CompensatedSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// All scalar functionals of a field, computed in one pass.
struct ObservableRecord {
    double H = 0.0;
    double N = 0.0;
    double S4 = 0.0;
    double M1 = 0.0;  // largest |f_x|^2
    double M2 = 0.0;  // second largest |f_x|^2
    int mode_vertex = 0;
    double mass_fraction = 0.0;  // M1 / N, zero field -> 0
    double h1_sq = 0.0;          // squared discrete H^1 norm
};

namespace detail {

inline void check_size(const ComplexField& f, const GraphTopology& g) {
    if (int(f.size()) != g.n)
        throw std::invalid_argument("field size does not match topology");
}

}  // namespace detail

/// (Lap f)_x = h^-2 sum_{y~x} (f_y - f_x).
inline ComplexField laplacian(const ComplexField& f, const GraphTopology& g) {
    detail::check_size(f, g);
    ComplexField out(f.size(), Complex{0.0, 0.0});
    double inv_h2 = 1.0 / (g.h * g.h);
    for (int x = 0; x < g.n; ++x) {
        Complex acc{0.0, 0.0};
        for (int y : g.adjacency[x]) acc += f[y] - f[x];
        out[x] = inv_h2 * acc;
    }
    return out;
}

/// Edge gradient sum sum_{(x,y) in E} |f_x - f_y|^2, without h or n factors.
inline double kinetic_edge_sum(const ComplexField& f, const GraphTopology& g) {
    detail::check_size(f, g);
    CompensatedSum k;
    for (auto [u, v] : g.edges) k.add(std::norm(f[u] - f[v]));
    return k.value();
}

inline double power_N(const ComplexField& f) {
    CompensatedSum s;
    for (const auto& z : f) s.add(std::norm(z));
    return s.value();
}

inline double quartic_S4(const ComplexField& f) {
    CompensatedSum s;
    for (const auto& z : f) {
        double r = std::norm(z);
        s.add(r * r);
    }
    return s.value();
}

/// H(f) = (2/n) sum_E |f_x - f_y|^2 / h^2 - (1/n) sum_x |f_x|^4.
inline double hamiltonian(const ComplexField& f, const GraphTopology& g) {
    double K = kinetic_edge_sum(f, g);
    return 2.0 * K / (double(g.n) * g.h * g.h) - quartic_S4(f) / double(g.n);
}

/// ||f||^2_{H^1} = N/n + (1/n) sum_E |f_x - f_y|^2 / h^2.
inline double h1_norm_sq(const ComplexField& f, const GraphTopology& g) {
    double K = kinetic_edge_sum(f, g);
    return power_N(f) / double(g.n) + K / (double(g.n) * g.h * g.h);
}

/// One-pass evaluation of every observable. Ties in the argmax go to the
/// lowest vertex index.
inline ObservableRecord observe(const ComplexField& f, const GraphTopology& g) {
    detail::check_size(f, g);
    ObservableRecord r;
    CompensatedSum n2, n4;
    for (int x = 0; x < g.n; ++x) {
        double m = std::norm(f[x]);
        n2.add(m);
        n4.add(m * m);
        if (m > r.M1) {
            r.M2 = r.M1;
            r.M1 = m;
            r.mode_vertex = x;
        } else if (m > r.M2) {
            r.M2 = m;
        }
    }
    r.N = n2.value();
    r.S4 = n4.value();
    double K = kinetic_edge_sum(f, g);
    double inv_nh2 = 1.0 / (double(g.n) * g.h * g.h);
    r.H = 2.0 * K * inv_nh2 - r.S4 / double(g.n);
    r.h1_sq = r.N / double(g.n) + K * inv_nh2;
    r.mass_fraction = r.N > 0.0 ? r.M1 / r.N : 0.0;
    return r;
}

}  // namespace dnls
