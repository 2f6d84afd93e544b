#include <catch_amalgamated.hpp>

#include "dnls/analytic.hpp"
#include "dnls/rng.hpp"

using namespace dnls;
using Catch::Approx;

TEST_CASE("m collapses at theta = 2") {
    CHECK(m_of_theta(2.0) == Approx(0.5 - std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("m(3) is positive with the expected magnitude") {
    double m3 = m_of_theta(3.0);
    CHECK(m3 > 0.0);
    // direct evaluation: 1 + 1.5 sqrt(1/3) + log(1/2 - sqrt(1/3)/2)
    CHECK(m3 == Approx(0.3116667207).margin(1e-9));
}

TEST_CASE("m rejects theta < 2") {
    CHECK_THROWS_AS(m_of_theta(1.9), std::domain_error);
}

TEST_CASE("critical coupling") {
    double tc = solve_theta_c();
    CHECK(tc == Approx(2.455407).margin(1e-5));
    CHECK(tc > 2.0);
    CHECK(tc < 3.0);
    CHECK(std::abs(m_of_theta(tc)) < 1e-9);
}

TEST_CASE("m is strictly increasing") {
    double prev = m_of_theta(2.0);
    for (double t = 2.1; t < 12.0; t += 0.1) {
        double cur = m_of_theta(t);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("f_theta basics") {
    CHECK(f_theta(7.3, 0.0) == 0.0);
    CHECK(f_theta(2.0, 0.5) == Approx(0.5 + std::log(0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(f_theta(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(f_theta(1.0, -0.1), std::domain_error);
}

TEST_CASE("x_star values and monotone approach to 1") {
    CHECK(x_star(2.0) == Approx(0.5).margin(1e-12));
    CHECK(x_star(theta_c()) == Approx(0.7153).margin(5e-4));
    double prev = 0.0;
    for (double t : {3.0, 5.0, 10.0, 100.0, 1e4}) {
        double x = x_star(t);
        CHECK(x > prev);
        CHECK(x < 1.0);
        prev = x;
    }
    CHECK(prev > 0.99);
}

TEST_CASE("f at theta_c attains its maximum 0 at both 0 and x_star") {
    double tc = theta_c();
    CHECK(std::abs(f_theta(tc, x_star(tc))) < 1e-9);
    // dense grid: no value above 0
    double best = 0.0;
    for (int i = 0; i < 100000; ++i) best = std::max(best, f_theta(tc, i * 1e-5));
    CHECK(best <= 1e-9);
}

TEST_CASE("condensate density") {
    CHECK(condensate_a({2.0, 1.0, 1.0, 1}) == Approx(0.5).margin(1e-12));
    CHECK(condensate_a({theta_c(), 1.0, 1.0, 1}) == Approx(0.7153).margin(5e-4));
    for (double beta : {2.6, 3.0, 5.0, 20.0})
        CHECK(condensate_a({beta, 1.0, 1.0, 1}) > 0.5);
    CHECK_THROWS_AS(condensate_a({1.0, 1.0, 1.0, 1}), std::domain_error);
}

TEST_CASE("L identity against f_theta") {
    auto rng = make_stream(7, 0);
    std::uniform_real_distribution<double> ub(0.2, 2.0), ubeta(0.0, 8.0), ux(0.0, 0.999);
    for (int trial = 0; trial < 200; ++trial) {
        double B = ub(rng), beta = ubeta(rng), x = ux(rng);
        ThermoParams p{beta, B, 1.0, 1};
        double lhs = L_of_ab(p, x * B, B);
        double rhs = std::log(B * M_PI * std::exp(1.0)) + f_theta(beta * B * B, x);
        CHECK(lhs == Approx(rhs).margin(1e-12));
    }
    CHECK(L_of_ab({0.7, 1.3, 1.0, 1}, 0.0, 1.3) ==
          Approx(std::log(1.3 * M_PI * std::exp(1.0))).margin(1e-12));
    CHECK_THROWS_AS(L_of_ab({1.0, 1.0, 1.0, 1}, 1.0, 0.5), std::domain_error);
}

TEST_CASE("L is monotone in b: L(a, b) <= L(a, B)") {
    auto rng = make_stream(8, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double B = 0.5 + u(rng);
        double a = u(rng) * 0.4 * B;
        double b = a + (B - a) * (0.05 + 0.95 * u(rng));
        ThermoParams p{3.0 * u(rng), B, 1.0, 1};
        CHECK(L_of_ab(p, a, b) <= L_of_ab(p, a, B) + 1e-12);
    }
}

TEST_CASE("free energy branches") {
    auto sub = free_energy_F({0.0, 1.0, 1.0, 1});
    CHECK(sub.F == Approx(std::log(M_PI * std::exp(1.0))).epsilon(1e-14));
    CHECK(sub.branch == Branch::Subcritical);
    CHECK(sub.fraction == 0.0);

    // continuity at theta_c
    double tc = theta_c();
    double left = free_energy_F({tc - 1e-9, 1.0, 1.0, 1}).F;
    double right = free_energy_F({tc + 1e-9, 1.0, 1.0, 1}).F;
    CHECK(std::abs(left - right) < 1e-8);

    // strictly increasing above the threshold
    double prev = free_energy_F({tc + 0.01, 1.0, 1.0, 1}).F;
    for (double beta = tc + 0.1; beta < 8.0; beta += 0.1) {
        double cur = free_energy_F({beta, 1.0, 1.0, 1}).F;
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("argmax of f_theta jumps at theta_c (first-order)") {
    double tc = theta_c();
    auto grid_argmax = [](double theta) {
        double best = -1e300;
        double arg = 0.0;
        for (int i = 0; i < 200000; ++i) {
            double x = i * 5e-6;
            double v = f_theta(theta, x);
            if (v > best) { best = v; arg = x; }
        }
        return arg;
    };
    CHECK(grid_argmax(tc - 0.05) == Approx(0.0).margin(1e-5));
    CHECK(grid_argmax(tc + 0.05) == Approx(x_star(tc + 0.05)).margin(1e-4));
    // the limit from above is x_star(theta_c) > 1/2, not 0
    CHECK(x_star(tc) > 0.5);
}

TEST_CASE("emit_curves reproduces the figure data") {
    double tc = theta_c();
    auto pts = emit_curves(1.0, {0.0, tc, 5.0});
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].fraction == 0.0);
    CHECK(pts[1].branch == Branch::Critical);
    CHECK(pts[1].fraction == Approx(x_star(tc)).margin(1e-9));  // right limit at the jump
    CHECK(pts[2].fraction == Approx(x_star(5.0)).margin(1e-12));

    // constant F on the subcritical segment; fraction non-decreasing beyond
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.05 * i);
    auto curve = emit_curves(1.0, grid);
    double prev_frac = 0.0;
    for (const auto& p : curve) {
        if (p.theta < tc) CHECK(p.F == Approx(curve[0].F).epsilon(1e-14));
        CHECK(p.fraction >= prev_frac - 1e-12);
        prev_frac = p.fraction;
    }
    CHECK_THROWS_AS(emit_curves(1.0, std::vector<double>{1.0, 0.5}), std::invalid_argument);
}
