// Experiment drivers: thermodynamic integration of log Z, the phase scan,
// discrete H^1 growth, breather persistence under the flow, and the
// Gaussian coordinate statistics test.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/analytic.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/quadrature.hpp"
#include "dnls/sampler.hpp"

namespace dnls {

/// A Monte Carlo estimate with a batch-means standard error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
    std::string method;
};

/// Batch means with >= 20 batches; autocorrelation within a batch inflates
/// the batch variance, which is what the standard error is computed from.
inline Estimate batch_means(const std::vector<double>& samples, int n_batches = 20,
                            const std::string& method = "batch_means") {
    Estimate e;
    e.method = method;
    e.n_samples = long(samples.size());
    if (samples.empty()) return e;
    if (long(samples.size()) < n_batches) {
        // too few samples for batching; fall back to the naive i.i.d. error
        double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / double(samples.size());
        double var = 0.0;
        for (double x : samples) var += (x - mean) * (x - mean);
        var /= std::max<std::size_t>(1, samples.size() - 1);
        e.value = mean;
        e.std_error = std::sqrt(var / double(samples.size()));
        return e;
    }
    std::size_t bs = samples.size() / n_batches;
    std::vector<double> bm(n_batches);
    for (int b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += samples[i];
        bm[b] = s / double(bs);
    }
    double mean = std::accumulate(bm.begin(), bm.end(), 0.0) / n_batches;
    double var = 0.0;
    for (double x : bm) var += (x - mean) * (x - mean);
    var /= (n_batches - 1);
    e.value = mean;
    e.std_error = std::sqrt(var / n_batches);
    return e;
}

/// Beta ladder for tempering/integration: roughly uniform rungs from 0 to
/// beta_max, with the density doubled in [0.8, 1.2] * theta_c / B^2 where
/// E[-H] varies fastest.
inline std::vector<double> make_beta_ladder(double B, double beta_max, int min_rungs = 16) {
    if (beta_max <= 0.0) throw std::invalid_argument("make_beta_ladder: beta_max must be > 0");
    double bc = theta_c() / (B * B);
    double lo = 0.8 * bc, hi = 1.2 * bc;
    std::vector<double> rungs;
    double step = beta_max / double(min_rungs);
    double b = 0.0;
    while (b < beta_max - 1e-12) {
        rungs.push_back(b);
        b += (b >= lo && b < hi) ? 0.5 * step : step;
    }
    rungs.push_back(beta_max);
    return rungs;
}

struct LogZResult {
    Estimate estimate;  // (log Z)/n at the target beta
    bool converged = true;
    std::vector<double> ladder;
    std::vector<Estimate> energy_per_rung;  // E[H] per rung
    std::vector<double> acceptance_local;   // LocalGaussian rate per rung
};

namespace detail {

inline std::vector<ThermoParams> ladder_params(const std::vector<double>& betas, double B,
                                               const GraphTopology& g) {
    std::vector<ThermoParams> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back({b, B, g.h, g.n});
    return out;
}

}  // namespace detail

/// Thermodynamic integration:
///   (log Z(beta))/n = (log Z(0))/n - (1/n) int_0^beta E_{b}[H] db
/// with the exact ball-volume anchor at beta = 0 and trapezoidal quadrature
/// over the tempered ladder. At beta = 0 no sampling is done at all.
inline LogZResult estimate_logZ_density(const ThermoParams& p, const GraphTopology& g,
                                        std::vector<double> ladder, const Schedule& sched) {
    p.validate();
    LogZResult out;
    double anchor = logZ_beta0(p.B, g.n) / double(g.n);
    if (p.beta == 0.0) {
        out.estimate = {anchor, 0.0, 0, "exact_ball_volume"};
        out.ladder = {0.0};
        return out;
    }
    if (ladder.empty()) ladder = make_beta_ladder(p.B, p.beta);
    if (ladder.front() != 0.0 || std::abs(ladder.back() - p.beta) > 1e-12)
        throw std::invalid_argument("estimate_logZ_density: ladder must run from 0 to beta");
    out.ladder = ladder;

    TemperedRun run = run_tempered(detail::ladder_params(ladder, p.B, g), g, sched);
    for (std::size_t r = 0; r < ladder.size(); ++r) {
        std::vector<double> hs;
        hs.reserve(run.rungs[r].records.size());
        for (const auto& rec : run.rungs[r].records) hs.push_back(rec.H);
        out.energy_per_rung.push_back(batch_means(hs));
        double acc = run.rungs[r].acceptance[int(MoveKind::LocalGaussian)];
        out.acceptance_local.push_back(acc);
        if (acc < 0.1 || acc > 0.6) out.converged = false;  // flagged, not averaged away
    }
    // Trapezoid weight per rung (endpoints get half weight).
    std::vector<double> w(ladder.size(), 0.0);
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
        double half = 0.5 * (ladder[i + 1] - ladder[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    double integral = 0.0;
    for (std::size_t r = 0; r < ladder.size(); ++r)
        integral += w[r] * out.energy_per_rung[r].value;
    // Error propagation: replica exchange correlates the rungs, so the
    // independent-error formula badly underestimates. Instead form the
    // integral per time batch (records are sweep-aligned across rungs) and
    // take batch means of the integral itself.
    const int n_batches = 20;
    std::size_t n_rec = run.rungs[0].records.size();
    double se = 0.0;
    if (long(n_rec) >= n_batches) {
        std::size_t bs = n_rec / n_batches;
        std::vector<double> batch_int(n_batches, 0.0);
        for (int b = 0; b < n_batches; ++b) {
            for (std::size_t r = 0; r < ladder.size(); ++r) {
                double s = 0.0;
                for (std::size_t i = b * bs; i < (b + 1) * bs; ++i)
                    s += run.rungs[r].records[i].H;
                batch_int[b] += w[r] * s / double(bs);
            }
        }
        double mean = std::accumulate(batch_int.begin(), batch_int.end(), 0.0) / n_batches;
        double var = 0.0;
        for (double x : batch_int) var += (x - mean) * (x - mean);
        se = std::sqrt(var / (n_batches - 1) / n_batches);
    }
    out.estimate.value = anchor - integral / double(g.n);
    out.estimate.std_error = se / double(g.n);
    out.estimate.n_samples = long(run.rungs[0].records.size());
    out.estimate.method = "thermodynamic_integration";
    return out;
}

/// One row of the phase-transition scan: MC estimates next to the analytic
/// predictions recomputed at report time.
struct PhaseScanRow {
    double beta = 0.0;
    Estimate mass_fraction, M1_over_n, M2_over_n, H_over_n, N_over_n;
    double analytic_fraction = 0.0;  // a/B above theta_c, 0 below
    double analytic_F = 0.0;
    double acceptance_local = 0.0;
};

/// Tempered scan over a beta grid; the grid points are rungs of one ladder.
inline std::vector<PhaseScanRow> phase_scan(double B, const std::vector<double>& beta_grid,
                                            const GraphTopology& g, const Schedule& sched) {
    if (beta_grid.empty()) throw std::invalid_argument("phase_scan: empty beta grid");
    double beta_max = *std::max_element(beta_grid.begin(), beta_grid.end());
    std::vector<double> ladder = make_beta_ladder(B, beta_max);
    for (double b : beta_grid)
        if (b > 0.0) ladder.push_back(b);
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 ladder.end());

    TemperedRun run = run_tempered(detail::ladder_params(ladder, B, g), g, sched);
    std::vector<PhaseScanRow> rows;
    for (double beta : beta_grid) {
        auto it = std::min_element(ladder.begin(), ladder.end(), [&](double a, double b) {
            return std::abs(a - beta) < std::abs(b - beta);
        });
        std::size_t r = std::size_t(it - ladder.begin());
        const auto& recs = run.rungs[r].records;
        auto col = [&](auto getter) {
            std::vector<double> xs;
            xs.reserve(recs.size());
            for (const auto& rec : recs) xs.push_back(getter(rec));
            return batch_means(xs);
        };
        PhaseScanRow row;
        row.beta = ladder[r];
        double n = double(g.n);
        row.mass_fraction = col([](const ObservableRecord& o) { return o.mass_fraction; });
        row.M1_over_n = col([n](const ObservableRecord& o) { return o.M1 / n; });
        row.M2_over_n = col([n](const ObservableRecord& o) { return o.M2 / n; });
        row.H_over_n = col([n](const ObservableRecord& o) { return o.H / n; });
        row.N_over_n = col([n](const ObservableRecord& o) { return o.N / n; });
        AnalyticPoint ap = free_energy_F({row.beta, B, g.h, g.n});
        row.analytic_fraction = ap.fraction;
        row.analytic_F = ap.F;
        row.acceptance_local = run.rungs[r].acceptance[int(MoveKind::LocalGaussian)];
        rows.push_back(std::move(row));
    }
    return rows;
}

struct H1GrowthRow {
    int n = 0;
    double h = 0.0;
    double median_h1_sq = 0.0;
};

struct H1GrowthResult {
    std::vector<H1GrowthRow> rows;
    double fitted_exponent = 0.0;  // slope of log ||psi||_H1 vs log n
};

/// Median sampled ||psi||^2_H1 on a family of growing tori (h = n^-p), with
/// the growth exponent of the norm from a log-log least-squares fit.
inline H1GrowthResult h1_growth(const ThermoParams& p,
                                const std::vector<GraphTopology>& topologies,
                                const Schedule& sched) {
    if (topologies.size() < 3)
        throw std::invalid_argument("h1_growth: need at least 3 sizes for a fit");
    H1GrowthResult out;
    for (const auto& g : topologies) {
        ThermoParams pg{p.beta, p.B, g.h, g.n};
        Schedule s = sched;
        auto init_rng = make_stream(sched.seed, 977);
        ChainRun run = p.beta == 0.0
                           ? run_chain(init_gibbs_field(pg, g, init_rng), pg, g, s)
                           : [&] {
                                 auto ladder = make_beta_ladder(p.B, p.beta);
                                 return std::move(
                                     run_tempered(detail::ladder_params(ladder, p.B, g), g, s)
                                         .rungs.back());
                             }();
        std::vector<double> h1s;
        for (const auto& rec : run.records) h1s.push_back(rec.h1_sq);
        std::nth_element(h1s.begin(), h1s.begin() + h1s.size() / 2, h1s.end());
        out.rows.push_back({g.n, g.h, h1s[h1s.size() / 2]});
    }
    // least squares on (log n, log ||psi||_H1)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : out.rows) {
        double x = std::log(double(r.n)), y = 0.5 * std::log(r.median_h1_sq);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double k = double(out.rows.size());
    out.fitted_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return out;
}

struct BreatherReport {
    int n_samples = 0;
    int n_persistent = 0;              // mode vertex constant over the horizon
    double fraction_persistent = 0.0;
    double max_mass_fraction_dev = 0.0;  // max |mass_fraction - a/B| over all times
    double max_N_drift = 0.0;            // max relative N drift over all trajectories
    double min_mode_changes = 0.0;       // min over samples of # mode changes
    double analytic_fraction = 0.0;      // a/B at the run's parameters
};

/// Draw K Gibbs samples by tempering, integrate each to horizon T and
/// report localized-mode persistence statistics.
inline BreatherReport breather_persistence(const ThermoParams& p, const GraphTopology& g,
                                           const Schedule& sched, double T, double dt,
                                           int K, int record_every = 0) {
    p.validate();
    if (K < 1) throw std::invalid_argument("breather_persistence: K must be >= 1");
    std::vector<ComplexField> samples;
    auto sink = [&](long, const ChainState& s) {
        if (int(samples.size()) < K) samples.push_back(s.field);
    };
    auto ladder = make_beta_ladder(p.B, std::max(p.beta, 1e-6));
    Schedule s = sched;
    // thin so that exactly K samples span the post-burn-in stretch
    s.thin = std::max<long>(1, (sched.sweeps - sched.burn_in) / K);
    run_tempered(detail::ladder_params(ladder, p.B, g), g, s, sink, int(ladder.size()) - 1);
    if (int(samples.size()) < K)
        throw std::runtime_error("breather_persistence: schedule produced too few samples");

    SpectralData spec = build_spectral(g);
    if (record_every <= 0) record_every = std::max(1, int(std::round(1.0 / dt)));
    BreatherReport rep;
    rep.n_samples = K;
    rep.analytic_fraction = free_energy_F(p).fraction;
    rep.min_mode_changes = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        Trajectory traj = integrate(samples[k], T, dt, spec, g, record_every);
        bool persistent = traj.persistence == long(traj.mode_path.size());
        if (persistent) ++rep.n_persistent;
        long changes = 0;
        for (std::size_t i = 1; i < traj.mode_path.size(); ++i)
            if (traj.mode_path[i] != traj.mode_path[i - 1]) ++changes;
        rep.min_mode_changes = std::min(rep.min_mode_changes, double(changes));
        double N0 = traj.records.front().N;
        for (const auto& rec : traj.records) {
            rep.max_mass_fraction_dev = std::max(
                rep.max_mass_fraction_dev, std::abs(rec.mass_fraction - rep.analytic_fraction));
            rep.max_N_drift = std::max(rep.max_N_drift, std::abs(rec.N / N0 - 1.0));
        }
    }
    rep.fraction_persistent = double(rep.n_persistent) / double(K);
    return rep;
}

/// One-sample Kolmogorov-Smirnov distance of `xs` against the unit-mean
/// exponential law (the squared modulus of a standard complex Gaussian).
inline double ks_distance_exp1(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("ks_distance_exp1: empty sample");
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double cdf = 1.0 - std::exp(-xs[i]);
        d = std::max(d, std::abs(cdf - double(i) / double(xs.size())));
        d = std::max(d, std::abs(cdf - double(i + 1) / double(xs.size())));
    }
    return d;
}

struct GaussianTestReport {
    double ks = 0.0;              // with the phase-appropriate scaling
    double ks_wrong_scale = 0.0;  // supercritical only: naive scaling B
    double tail_prob = 0.0;       // empirical P(|psi_x|^2 > scale), target e^-1
    double distant_pair_corr = 0.0;
    double scale = 0.0;           // B below theta_c, B - a above
    int pooled = 0;
    bool supercritical = false;
};

/// Coordinate-statistics test: pooled |psi_x|^2 / scale against Exp(1), with
/// scale B below the transition and B - a (mode vertex excluded) above it.
inline GaussianTestReport gaussian_coordinate_test(const ThermoParams& p,
                                                  const GraphTopology& g,
                                                  const AutomorphismGroup& group,
                                                  const Schedule& sched, int n_samples) {
    p.validate();
    if (group.maps.empty())
        throw std::invalid_argument("gaussian_coordinate_test: automorphism group required");
    GaussianTestReport rep;
    rep.supercritical = p.theta() > theta_c();
    AnalyticPoint ap = free_energy_F(p);
    rep.scale = rep.supercritical ? p.B - ap.a : p.B;

    std::vector<ComplexField> samples;
    auto sink = [&](long, const ChainState& s) {
        if (int(samples.size()) < n_samples) samples.push_back(s.field);
    };
    Schedule s = sched;
    s.thin = std::max<long>(1, (sched.sweeps - sched.burn_in) / n_samples);
    if (p.beta == 0.0) {
        auto init_rng = make_stream(sched.seed, 977);
        run_chain(init_gibbs_field(p, g, init_rng), p, g, s, false, sink);
    } else {
        auto ladder = make_beta_ladder(p.B, p.beta);
        run_tempered(detail::ladder_params(ladder, p.B, g), g, s, sink, int(ladder.size()) - 1);
    }

    std::vector<double> pooled, pooled_wrong;
    double tail = 0.0;
    // pairwise independence proxy: |psi|^2 at two far-apart vertices
    int far_x = 0, far_y = g.n / 2;
    std::vector<double> px, py;
    for (const auto& f : samples) {
        int mode = int(std::max_element(f.begin(), f.end(),
                                        [](const Complex& a, const Complex& b) {
                                            return std::norm(a) < std::norm(b);
                                        }) -
                       f.begin());
        for (int x = 0; x < g.n; ++x) {
            if (rep.supercritical && x == mode) continue;  // the single macroscopic exception
            double m = std::norm(f[x]);
            pooled.push_back(m / rep.scale);
            pooled_wrong.push_back(m / p.B);
            if (m > rep.scale) tail += 1.0;
        }
        px.push_back(std::norm(f[far_x]));
        py.push_back(std::norm(f[far_y]));
    }
    rep.pooled = int(pooled.size());
    rep.ks = ks_distance_exp1(pooled);
    rep.ks_wrong_scale = rep.supercritical ? ks_distance_exp1(pooled_wrong) : rep.ks;
    rep.tail_prob = tail / double(pooled.size());
    // sample correlation
    double mx = std::accumulate(px.begin(), px.end(), 0.0) / px.size();
    double my = std::accumulate(py.begin(), py.end(), 0.0) / py.size();
    double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < px.size(); ++i) {
        cxy += (px[i] - mx) * (py[i] - my);
        cxx += (px[i] - mx) * (px[i] - mx);
        cyy += (py[i] - my) * (py[i] - my);
    }
    rep.distant_pair_corr = cxx > 0 && cyy > 0 ? cxy / std::sqrt(cxx * cyy) : 0.0;
    return rep;
}

}  // namespace dnls
