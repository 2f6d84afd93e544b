#include <catch_amalgamated.hpp>
#include <sstream>

#include "dnls/experiments.hpp"

using namespace dnls;
using Catch::Approx;

namespace {

GraphTopology pair_with_edge() {
    std::istringstream in("n 2 h 1\n0 1\n");
    return load_edge_list(in);
}

}  // namespace

TEST_CASE("batch means on a constant series") {
    std::vector<double> xs(400, 2.5);
    auto e = batch_means(xs);
    CHECK(e.value == Approx(2.5));
    CHECK(e.std_error == 0.0);
    CHECK(e.n_samples == 400);
}

TEST_CASE("batch means recovers the i.i.d. error rate") {
    auto rng = make_stream(71, 0);
    std::normal_distribution<double> gauss(1.0, 2.0);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = gauss(rng);
    auto e = batch_means(xs);
    CHECK(e.value == Approx(1.0).margin(0.1));
    // sigma / sqrt(n) = 2 / sqrt(20000) ~= 0.0141
    CHECK(e.std_error == Approx(0.0141).margin(0.008));
    // the estimate should cover the truth within ~3 sigma
    CHECK(std::abs(e.value - 1.0) < 4.0 * e.std_error);
}

TEST_CASE("batch means fallback for short series") {
    std::vector<double> xs{1.0, 2.0, 3.0};
    auto e = batch_means(xs);
    CHECK(e.value == Approx(2.0));
    CHECK(e.std_error == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    auto empty = batch_means({});
    CHECK(empty.n_samples == 0);
}

TEST_CASE("beta ladder shape") {
    double B = 1.0;
    auto ladder = make_beta_ladder(B, 4.0);
    REQUIRE(ladder.size() >= 17);
    CHECK(ladder.front() == 0.0);
    CHECK(ladder.back() == Approx(4.0));
    for (std::size_t i = 1; i < ladder.size(); ++i) CHECK(ladder[i] > ladder[i - 1]);
    // rungs are denser around theta_c / B^2
    double bc = theta_c();
    int near = 0, far = 0;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        double mid = 0.5 * (ladder[i] + ladder[i - 1]);
        double gap = ladder[i] - ladder[i - 1];
        if (mid > 0.8 * bc && mid < 1.2 * bc) near = std::max(near, int(std::round(4.0 / gap)));
        else far = std::max(far, int(std::round(4.0 / gap)));
    }
    CHECK(near > far);  // finer spacing near the transition
    CHECK_THROWS_AS(make_beta_ladder(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("logZ at beta = 0 is the exact ball volume, no sampling") {
    auto g = make_torus(4, 2);
    ThermoParams p{0.0, 1.0, g.h, g.n};
    Schedule sched;
    sched.sweeps = 1;  // must not matter
    auto res = estimate_logZ_density(p, g, {}, sched);
    CHECK(res.estimate.value == Approx(logZ_beta0(1.0, g.n) / g.n).margin(1e-14));
    CHECK(res.estimate.std_error == 0.0);
    CHECK(res.estimate.method == "exact_ball_volume");
    CHECK(res.converged);
}

TEST_CASE("thermodynamic integration matches the two-site quadrature") {
    auto g = pair_with_edge();
    ThermoParams p{1.0, 1.0, 1.0, 2};
    Schedule sched;
    sched.sweeps = 60000;
    sched.burn_in = 10000;
    sched.seed = 314;
    std::vector<double> ladder{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    auto res = estimate_logZ_density(p, g, ladder, sched);
    double exact = oracle_quadrature_logZ(p, g) / 2.0;
    // trapezoid bias + MC error at this ladder resolution
    CHECK(res.estimate.value == Approx(exact).margin(0.02));
    CHECK(res.estimate.std_error < 0.02);
    CHECK(res.estimate.method == "thermodynamic_integration");
    REQUIRE(res.energy_per_rung.size() == ladder.size());
    // E[H] decreases with beta on this attractive-energy landscape
    CHECK(res.energy_per_rung.front().value > res.energy_per_rung.back().value);
}

TEST_CASE("ladder validation in the logZ driver") {
    auto g = pair_with_edge();
    ThermoParams p{1.0, 1.0, 1.0, 2};
    Schedule sched;
    sched.sweeps = 10;
    CHECK_THROWS_AS(estimate_logZ_density(p, g, {0.5, 1.0}, sched), std::invalid_argument);
    CHECK_THROWS_AS(estimate_logZ_density(p, g, {0.0, 0.7}, sched), std::invalid_argument);
}

TEST_CASE("KS distance against Exp(1)") {
    // quantile grid of the exponential itself: distance ~ 1/(2n)
    int n = 2000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = -std::log(1.0 - (i + 0.5) / double(n));
    CHECK(ks_distance_exp1(xs) < 1.0 / double(n));
    // uniform[0,1] is far from Exp(1)
    std::vector<double> us(n);
    for (int i = 0; i < n; ++i) us[i] = (i + 0.5) / double(n);
    CHECK(ks_distance_exp1(us) > 0.2);
    CHECK_THROWS_AS(ks_distance_exp1({}), std::invalid_argument);
}

TEST_CASE("free-field coordinates pass the Gaussian test") {
    auto g = make_torus(4, 2);
    ThermoParams p{0.0, 1.0, g.h, g.n};
    auto grp = torus_translations(g);
    Schedule sched;
    sched.sweeps = 6000;
    sched.burn_in = 1000;
    sched.seed = 515;
    auto rep = gaussian_coordinate_test(p, g, grp, sched, 400);
    CHECK_FALSE(rep.supercritical);
    CHECK(rep.scale == 1.0);
    CHECK(rep.pooled >= 400 * g.n);
    CHECK(rep.ks < 0.1);
    CHECK(rep.tail_prob == Approx(std::exp(-1.0)).margin(0.06));
    CHECK(std::abs(rep.distant_pair_corr) < 0.25);
}

TEST_CASE("phase scan rows carry both MC and analytic columns") {
    auto g = make_torus(3, 2);
    Schedule sched;
    sched.sweeps = 2000;
    sched.burn_in = 400;
    sched.seed = 616;
    std::vector<double> grid{0.0, 1.0, 2.0};
    auto rows = phase_scan(1.0, grid, g, sched);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].beta == Approx(grid[i]).margin(1e-9));
        auto ap = free_energy_F({rows[i].beta, 1.0, g.h, g.n});
        CHECK(rows[i].analytic_F == Approx(ap.F).margin(1e-12));
        CHECK(rows[i].analytic_fraction == Approx(ap.fraction).margin(1e-12));
        CHECK(rows[i].N_over_n.value <= 1.0 + 1e-9);
        CHECK(rows[i].mass_fraction.value > 0.0);
        CHECK(rows[i].mass_fraction.value <= 1.0);
    }
    CHECK_THROWS_AS(phase_scan(1.0, {}, g, sched), std::invalid_argument);
}

TEST_CASE("H1 growth fit over a family of cycles") {
    ThermoParams p{0.0, 1.0, 1.0, 1};
    std::vector<GraphTopology> tori{make_torus(4, 1), make_torus(8, 1), make_torus(16, 1)};
    Schedule sched;
    sched.sweeps = 1500;
    sched.burn_in = 300;
    sched.seed = 717;
    auto res = h1_growth(p, tori, sched);
    REQUIRE(res.rows.size() == 3);
    for (const auto& r : res.rows) CHECK(r.median_h1_sq > 0.0);
    CHECK(std::isfinite(res.fitted_exponent));
    // h = 1/L pumps the gradient term: the norm grows with n
    CHECK(res.fitted_exponent > 0.0);
    CHECK_THROWS_AS(h1_growth(p, {make_torus(4, 1)}, sched), std::invalid_argument);
}

TEST_CASE("breather persistence report bookkeeping") {
    std::istringstream in("n 4 h 1\n0 1\n1 2\n2 3\n0 3\n");
    auto g = load_edge_list(in);
    ThermoParams p{0.5, 1.0, g.h, g.n};
    Schedule sched;
    sched.sweeps = 300;
    sched.burn_in = 60;
    sched.seed = 818;
    auto rep = breather_persistence(p, g, sched, 0.5, 0.01, 5);
    CHECK(rep.n_samples == 5);
    CHECK(rep.n_persistent >= 0);
    CHECK(rep.n_persistent <= 5);
    CHECK(rep.fraction_persistent == Approx(rep.n_persistent / 5.0));
    CHECK(rep.max_N_drift < 1e-10);  // the integrator conserves N exactly
    CHECK(rep.analytic_fraction == 0.0);  // beta = 0.5 is subcritical at B = 1
    CHECK_THROWS_AS(breather_persistence(p, g, sched, 0.5, 0.01, 0), std::invalid_argument);
}
