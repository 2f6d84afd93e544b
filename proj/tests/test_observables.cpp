#include <catch_amalgamated.hpp>

#include "dnls/observables.hpp"
#include "dnls/rng.hpp"

using namespace dnls;
using Catch::Approx;

namespace {

ComplexField random_field(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    ComplexField f(n);
    for (auto& z : f) z = Complex{gauss(rng), gauss(rng)};
    return f;
}

}  // namespace

TEST_CASE("Laplacian of a constant field vanishes") {
    auto g = make_torus(4, 2);
    ComplexField f(g.n, Complex{1.3, -0.7});
    for (const auto& z : laplacian(f, g)) CHECK(std::abs(z) < 1e-14);
}

TEST_CASE("Laplacian of a spike on the 4-cycle, h = 1/4") {
    auto g = make_torus(4, 1);
    ComplexField f(g.n, Complex{0.0, 0.0});
    f[0] = 1.0;
    auto lf = laplacian(f, g);
    CHECK(lf[0].real() == Approx(-32.0));  // -2 * 16
    CHECK(lf[1].real() == Approx(16.0));
    CHECK(lf[3].real() == Approx(16.0));
    CHECK(std::abs(lf[2]) < 1e-14);
}

TEST_CASE("Laplacian sums to zero over vertices") {
    auto g = make_torus(3, 3);
    auto rng = make_stream(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        auto lf = laplacian(random_field(g.n, rng), g);
        Complex s{0.0, 0.0};
        for (const auto& z : lf) s += z;
        CHECK(std::abs(s) < 1e-10);
    }
}

TEST_CASE("size mismatch is rejected") {
    auto g = make_torus(4, 1);
    ComplexField f(3);
    CHECK_THROWS_AS(laplacian(f, g), std::invalid_argument);
    CHECK_THROWS_AS(hamiltonian(f, g), std::invalid_argument);
    CHECK_THROWS_AS(observe(f, g), std::invalid_argument);
}

TEST_CASE("Hamiltonian of constant and zero fields") {
    auto g = make_torus(4, 2);
    Complex c{0.6, 0.8};  // |c|^2 = 1
    ComplexField f(g.n, c);
    CHECK(hamiltonian(f, g) == Approx(-1.0).margin(1e-12));
    ComplexField zero(g.n, Complex{0.0, 0.0});
    CHECK(hamiltonian(zero, g) == 0.0);
}

TEST_CASE("Hamiltonian of a spike matches the closed form") {
    int L = 4, d = 3;
    auto g = make_torus(L, d);
    double a = 0.8;
    ComplexField f(g.n, Complex{0.0, 0.0});
    f[0] = std::sqrt(a * g.n);
    double expected = 4.0 * d * a / (g.h * g.h) - a * a * g.n;
    CHECK(hamiltonian(f, g) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("power is permutation invariant under compensated summation") {
    auto rng = make_stream(12, 0);
    ComplexField f = random_field(512, rng, 3.0);
    double n1 = power_N(f);
    ComplexField shuffled = f;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(power_N(shuffled) == Approx(n1).epsilon(1e-12));
    CHECK(power_N(ComplexField{}) == 0.0);
    ComplexField c(10, Complex{0.0, 1.5});
    CHECK(power_N(c) == Approx(10 * 2.25).epsilon(1e-14));
}

TEST_CASE("observe on spike and constant fields") {
    auto g = make_torus(4, 2);
    ComplexField spike(g.n, Complex{0.0, 0.0});
    spike[5] = 3.0;
    auto r = observe(spike, g);
    CHECK(r.M1 == Approx(9.0));
    CHECK(r.M2 == 0.0);
    CHECK(r.mode_vertex == 5);
    CHECK(r.mass_fraction == Approx(1.0));

    ComplexField c(g.n, Complex{1.0, 1.0});
    auto rc = observe(c, g);
    CHECK(rc.M1 == Approx(2.0));
    CHECK(rc.M2 == Approx(2.0));
    CHECK(rc.mode_vertex == 0);  // lowest index on ties
    CHECK(rc.mass_fraction == Approx(1.0 / g.n));
}

TEST_CASE("record invariants on random fields") {
    auto g = make_torus(4, 3);
    auto rng = make_stream(13, 0);
    for (int trial = 0; trial < 100; ++trial) {
        auto f = random_field(g.n, rng, 0.5 + 0.1 * trial);
        auto r = observe(f, g);
        CHECK(r.M1 >= r.M2);
        CHECK(r.M2 >= 0.0);
        CHECK(r.M1 <= r.N + 1e-12);
        CHECK(r.S4 <= r.M1 * r.N * (1.0 + 1e-12));
        // a(f) <= b(f): sqrt(S4)/n <= N/n
        CHECK(std::sqrt(r.S4) <= r.N * (1.0 + 1e-12));
        // max |f|^2 >= S4 / N
        CHECK(r.M1 * r.N >= r.S4 * (1.0 - 1e-12));
        // energy decomposition: H >= -S4/n
        CHECK(r.H >= -r.S4 / double(g.n) - 1e-12);
    }
}

TEST_CASE("kinetic bound under the mass cutoff") {
    // if N <= Bn then sum_E |f_x - f_y|^2 <= 4 B D n
    auto g = make_torus(4, 2);
    auto rng = make_stream(14, 0);
    double B = 1.0;
    for (int trial = 0; trial < 50; ++trial) {
        auto f = random_field(g.n, rng, 0.5);
        double N = power_N(f);
        if (N > B * g.n) continue;
        CHECK(kinetic_edge_sum(f, g) <= 4.0 * B * g.max_degree * g.n);
    }
}

TEST_CASE("H1 norm of constant and zero fields") {
    auto g = make_torus(5, 2);
    Complex c{1.0, -2.0};
    ComplexField f(g.n, c);
    CHECK(h1_norm_sq(f, g) == Approx(std::norm(c)).epsilon(1e-12));
    ComplexField zero(g.n, Complex{0.0, 0.0});
    CHECK(h1_norm_sq(zero, g) == 0.0);
}

TEST_CASE("H1 identity h1_sq = N/n + (H + S4/n)/2") {
    auto g = make_torus(4, 3);
    auto rng = make_stream(15, 0);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = random_field(g.n, rng);
        double lhs = h1_norm_sq(f, g);
        double rhs = power_N(f) / g.n +
                     0.5 * (hamiltonian(f, g) + quartic_S4(f) / g.n);
        CHECK(lhs == Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("observe is equivariant under torus translations") {
    auto g = make_torus(3, 2);
    auto grp = torus_translations(g);
    auto rng = make_stream(16, 0);
    auto f = random_field(g.n, rng);
    auto base = observe(f, g);
    for (const auto& perm : grp.maps) {
        ComplexField moved(g.n);
        for (int v = 0; v < g.n; ++v) moved[perm[v]] = f[v];
        auto r = observe(moved, g);
        CHECK(r.H == Approx(base.H).epsilon(1e-12));
        CHECK(r.N == Approx(base.N).epsilon(1e-12));
        CHECK(r.S4 == Approx(base.S4).epsilon(1e-12));
        CHECK(r.M1 == Approx(base.M1).epsilon(1e-12));
        CHECK(r.mode_vertex == perm[base.mode_vertex]);
    }
}
