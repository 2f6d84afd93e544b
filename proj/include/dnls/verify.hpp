// Self-contained invariant suite behind the `verify` subcommand: algebraic
// identities of the observables, sampler cache and determinism contracts,
// automorphism group axioms and the small-n quadrature anchors.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "dnls/dynamics.hpp"
#include "dnls/experiments.hpp"
#include "dnls/quadrature.hpp"
#include "dnls/sampler.hpp"

namespace dnls {

struct VerifyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline ComplexField random_field(const GraphTopology& g, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> gauss(0.0, scale);
    ComplexField f(g.n);
    for (auto& z : f) z = Complex{gauss(rng), gauss(rng)};
    return f;
}

}  // namespace detail

inline std::vector<VerifyResult> verify_all(std::uint64_t seed = 12345) {
    std::vector<VerifyResult> out;
    auto check = [&](const std::string& name, bool pass, double got, double bound) {
        std::ostringstream os;
        os << "max deviation " << got << " (bound " << bound << ")";
        out.push_back({name, pass, os.str()});
    };
    auto rng = make_stream(seed, 0);
    GraphTopology torus = make_torus(4, 2);

    {  // H = 2K/(n h^2) - S4/n and h1_sq = N/n + (H + S4/n)/2
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            ComplexField f = detail::random_field(torus, rng, 1.0);
            auto rec = observe(f, torus);
            double lhs = h1_norm_sq(f, torus);
            double rhs = rec.N / double(torus.n) + 0.5 * (rec.H + rec.S4 / double(torus.n));
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
            double h_direct = hamiltonian(f, torus);
            worst = std::max(worst, std::abs(h_direct - rec.H) / (1.0 + std::abs(h_direct)));
        }
        check("observable identities (H, S4, H1 decomposition)", worst <= 1e-10, worst, 1e-10);
    }
    {  // sum_x (Lap f)_x = 0 by edge antisymmetry
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            ComplexField f = detail::random_field(torus, rng, 1.0);
            ComplexField lf = laplacian(f, torus);
            Complex s{0.0, 0.0};
            for (const auto& z : lf) s += z;
            worst = std::max(worst, std::abs(s));
        }
        check("Laplacian telescoping sum", worst <= 1e-9, worst, 1e-9);
    }
    {  // incremental caches vs full recompute after a long window
        ThermoParams p{2.0, 1.0, torus.h, torus.n};
        Schedule sched;
        sched.sweeps = 800;
        sched.burn_in = 100;
        sched.seed = seed;
        auto init_rng = make_stream(seed, 1);
        ChainRun run = run_chain(init_gibbs_field(p, torus, init_rng), p, torus, sched);
        double err = cache_consistency_error(run.final_state, torus);
        check("sampler cache consistency", err <= 1e-9, err, 1e-9);
    }
    {  // identical (seed, schedule, params) -> bit-identical streams
        ThermoParams p{1.5, 1.0, torus.h, torus.n};
        Schedule sched;
        sched.sweeps = 200;
        sched.burn_in = 50;
        sched.seed = seed;
        auto mk = [&] {
            auto init_rng = make_stream(seed, 1);
            return run_chain(init_gibbs_field(p, torus, init_rng), p, torus, sched);
        };
        ChainRun a = mk(), b = mk();
        bool same = a.records.size() == b.records.size();
        if (same)
            for (std::size_t i = 0; i < a.records.size(); ++i)
                same = same && a.records[i].H == b.records[i].H &&
                       a.records[i].N == b.records[i].N &&
                       a.records[i].mode_vertex == b.records[i].mode_vertex;
        out.push_back({"seed determinism (bit-identical rerun)", same,
                       same ? "streams identical" : "streams differ"});
    }
    {  // torus translation group: edge preservation, closure, fixed points
        GraphTopology t = make_torus(3, 2);
        AutomorphismGroup grp = torus_translations(t);
        bool ok = int(grp.maps.size()) == t.n;
        for (const auto& perm : grp.maps) ok = ok && preserves_edges(t, perm);
        for (std::size_t i = 1; i < grp.maps.size() && ok; ++i)
            for (int v = 0; v < t.n && ok; ++v) ok = grp.maps[i][v] != v;
        // closure under composition
        auto member = [&](const std::vector<int>& perm) {
            for (const auto& m : grp.maps)
                if (m == perm) return true;
            return false;
        };
        for (std::size_t i = 0; i < grp.maps.size() && ok; ++i)
            for (std::size_t j = 0; j < grp.maps.size() && ok; ++j) {
                std::vector<int> comp(t.n);
                for (int v = 0; v < t.n; ++v) comp[v] = grp.maps[i][grp.maps[j][v]];
                ok = member(comp);
            }
        out.push_back({"torus automorphism group axioms", ok,
                       ok ? "|G| = n, edge-preserving, fixed-point free, closed"
                          : "axiom violated"});
    }
    {  // Z <= Z' (kinetic term dropped) at n = 2 by quadrature
        GraphTopology pair = detail::finalize(2, 1.0, {{0, 1}});
        bool ok = true;
        double worst = 0.0;
        for (double beta : {0.5, 1.0, 2.5}) {
            ThermoParams p{beta, 1.0, 1.0, 2};
            double lz = oracle_quadrature_logZ(p, pair);
            double lzr = oracle_quadrature_logZ_reduced(p, pair);
            ok = ok && lz <= lzr + 1e-10;
            worst = std::max(worst, lz - lzr);
        }
        check("Z <= Z' sandwich at n = 2", ok, worst, 0.0);
    }
    {  // sampler vs quadrature oracle at n = 1
        GraphTopology single = detail::finalize(1, 1.0, {});
        ThermoParams p{1.0, 1.0, 1.0, 1};
        Schedule sched;
        sched.sweeps = 400000;
        sched.burn_in = 40000;
        sched.thin = 10;
        sched.mixture = {1.0, 0.0, 0.0};
        sched.seed = seed;
        auto init_rng = make_stream(seed, 2);
        ChainRun run = run_chain(init_gibbs_field(p, single, init_rng), p, single, sched);
        std::vector<double> s4s;
        for (const auto& rec : run.records) s4s.push_back(rec.S4);
        Estimate est = batch_means(s4s);
        double oracle = oracle_quadrature_moments(p, single, MomentKind::S4);
        double dev = std::abs(est.value - oracle);
        bool ok = dev <= 3.0 * est.std_error;
        std::ostringstream os;
        os << "E[S4] mc " << est.value << " +- " << est.std_error << ", quadrature " << oracle;
        out.push_back({"sampler vs quadrature oracle (n = 1)", ok, os.str()});
    }
    {  // unitarity of the exact linear propagator
        GraphTopology cyc = make_torus(8, 1);
        SpectralData spec = build_spectral(cyc);
        Propagator prop = make_propagator(spec, 0.37);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            ComplexField f = detail::random_field(cyc, rng, 1.0);
            double n0 = power_N(f);
            Eigen::VectorXcd v = prop.matrix * detail::as_vec(f);
            double n1 = v.squaredNorm();
            worst = std::max(worst, std::abs(n1 / n0 - 1.0));
        }
        check("linear propagator unitarity", worst <= 1e-12, worst, 1e-12);
    }
    return out;
}

}  // namespace dnls
