// Metropolis sampling of the invariant Gibbs measure
//   dmu = Z^-1 exp(-beta H(f)) 1{N(f) <= Bn} df
// with O(deg) incremental cache updates, a mass-transfer move able to
// nucleate and dissolve the condensate, and replica exchange across a
// beta ladder.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dnls/analytic.hpp"
#include "dnls/observables.hpp"
#include "dnls/rng.hpp"

namespace dnls {

enum class MoveKind { LocalGaussian, PhaseRotation, SpikeTransfer };

struct MoveMixture {
    double local_gaussian = 0.7;
    double phase_rotation = 0.2;
    double spike_transfer = 0.1;
};

struct Schedule {
    long sweeps = 0;       // total sweeps; one sweep = n proposals
    long burn_in = 0;      // sweeps discarded (and used for scale adaptation)
    long thin = 1;         // record every `thin` post-burn-in sweeps
    MoveMixture mixture;
    std::uint64_t seed = 1;

    void validate() const {
        if (sweeps <= 0) throw std::invalid_argument("schedule: sweeps must be > 0");
        if (thin <= 0) throw std::invalid_argument("schedule: thin must be > 0");
        if (burn_in < 0 || burn_in >= sweeps)
            throw std::invalid_argument("schedule: need 0 <= burn_in < sweeps");
        double w = mixture.local_gaussian + mixture.phase_rotation + mixture.spike_transfer;
        if (w <= 0.0) throw std::invalid_argument("schedule: move mixture has zero weight");
    }
};

struct MoveStats {
    long proposed = 0;
    long accepted = 0;
    double rate() const { return proposed > 0 ? double(accepted) / double(proposed) : 0.0; }
};

/// A Metropolis chain: the field plus incrementally maintained N, S4 and
/// edge-gradient caches, the per-chain RNG stream and adaptation state.
struct ChainState {
    ComplexField field;
    double cached_N = 0.0;
    double cached_S4 = 0.0;
    double cached_K = 0.0;  // sum_E |f_x - f_y|^2, no h or n factors
    long steps = 0;
    MoveStats stats[3];     // indexed by MoveKind
    std::mt19937_64 rng;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    double local_scale = 0.5;   // LocalGaussian proposal std dev
    bool adapting = true;       // frozen after burn-in
    long accepted_since_refresh = 0;
    long adapt_window_proposed = 0;
    long adapt_window_accepted = 0;

    double cached_H(const GraphTopology& g) const {
        return 2.0 * cached_K / (double(g.n) * g.h * g.h) - cached_S4 / double(g.n);
    }
};

inline void refresh_caches(ChainState& s, const GraphTopology& g) {
    s.cached_N = power_N(s.field);
    s.cached_S4 = quartic_S4(s.field);
    s.cached_K = kinetic_edge_sum(s.field, g);
    s.accepted_since_refresh = 0;
}

/// Largest relative disagreement between the caches and a full recompute.
inline double cache_consistency_error(const ChainState& s, const GraphTopology& g) {
    double eN = std::abs(s.cached_N - power_N(s.field)) / (1.0 + std::abs(s.cached_N));
    double eS = std::abs(s.cached_S4 - quartic_S4(s.field)) / (1.0 + std::abs(s.cached_S4));
    double eK = std::abs(s.cached_K - kinetic_edge_sum(s.field, g)) / (1.0 + std::abs(s.cached_K));
    return std::max({eN, eS, eK});
}

inline ChainState make_chain(ComplexField init, const GraphTopology& g,
                             std::uint64_t master_seed, std::uint64_t stream_id,
                             double B) {
    if (int(init.size()) != g.n)
        throw std::invalid_argument("make_chain: field size does not match topology");
    ChainState s;
    s.field = std::move(init);
    s.rng = make_stream(master_seed, stream_id);
    s.master_seed = master_seed;
    s.stream_id = stream_id;
    s.local_scale = 0.5 * std::sqrt(B);
    refresh_caches(s, g);
    return s;
}

/// Initializer: i.i.d. complex Gaussian with per-site variance B/2,
/// resampled until N <= Bn (acceptance is near-certain for large n).
inline ComplexField init_gibbs_field(const ThermoParams& p, const GraphTopology& g,
                                     std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(p.B / 4.0));
    ComplexField f(g.n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (auto& z : f) z = Complex{gauss(rng), gauss(rng)};
        if (power_N(f) <= p.B * double(g.n)) return f;
    }
    throw std::runtime_error("init_gibbs_field: rejection sampling failed to terminate");
}

namespace detail {

// Edge-gradient sum over the edges incident to x (each incident edge once).
inline double incident_kinetic(const ComplexField& f, const GraphTopology& g, int x) {
    double k = 0.0;
    for (int y : g.adjacency[x]) k += std::norm(f[x] - f[y]);
    return k;
}

struct Proposal {
    int site_a = -1, site_b = -1;  // site_b < 0 for single-site moves
    Complex new_a, new_b;
    double log_hastings = 0.0;  // log q(g->f)/q(f->g)
    bool valid = false;
};

inline Proposal propose(ChainState& s, const GraphTopology& g, MoveKind move) {
    Proposal pr;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (move) {
        case MoveKind::LocalGaussian: {
            std::uniform_int_distribution<int> pick(0, g.n - 1);
            std::normal_distribution<double> gauss(0.0, s.local_scale);
            pr.site_a = pick(s.rng);
            pr.new_a = s.field[pr.site_a] + Complex{gauss(s.rng), gauss(s.rng)};
            pr.valid = true;
            break;
        }
        case MoveKind::PhaseRotation: {
            std::uniform_int_distribution<int> pick(0, g.n - 1);
            pr.site_a = pick(s.rng);
            double alpha = 2.0 * M_PI * unif(s.rng);
            pr.new_a = s.field[pr.site_a] * std::polar(1.0, alpha);
            pr.valid = true;
            break;
        }
        case MoveKind::SpikeTransfer: {
            if (g.n < 2) return pr;
            std::uniform_int_distribution<int> pick(0, g.n - 1);
            int x = pick(s.rng);
            int y = pick(s.rng);
            double u = unif(s.rng);
            if (x == y) return pr;
            double rx = std::norm(s.field[x]);
            double ry = std::norm(s.field[y]);
            if (rx <= 0.0) return pr;
            double t = u * rx;
            double rx_new = rx - t, ry_new = ry + t;
            pr.site_a = x;
            pr.site_b = y;
            pr.new_a = s.field[x] * std::sqrt(rx_new / rx);
            pr.new_b = ry > 0.0 ? s.field[y] * std::sqrt(ry_new / ry)
                                : Complex{std::sqrt(ry_new), 0.0};
            // forward picks the transfer amount with density 1/rx on [0, rx];
            // the reverse move transfers t back from y with density 1/ry_new
            pr.log_hastings = std::log(rx) - std::log(ry_new);
            pr.valid = true;
            break;
        }
    }
    return pr;
}

}  // namespace detail

/// One Metropolis proposal/accept step targeting the full Gibbs density
/// (or, with `reduced`, the kinetic-free density exp(beta S4 / n) 1{N <= Bn}).
/// Returns whether the proposal was accepted.
inline bool metropolis_step(ChainState& s, const ThermoParams& p, const GraphTopology& g,
                            MoveKind move, bool reduced = false) {
    auto& st = s.stats[int(move)];
    ++st.proposed;
    ++s.steps;
    auto pr = detail::propose(s, g, move);
    if (!pr.valid) return false;

    // deltas from the touched neighborhoods only
    double k_before = detail::incident_kinetic(s.field, g, pr.site_a);
    double m_a = std::norm(s.field[pr.site_a]);
    double dN = std::norm(pr.new_a) - m_a;
    double dS4 = std::norm(pr.new_a) * std::norm(pr.new_a) - m_a * m_a;
    Complex old_a = s.field[pr.site_a], old_b;
    if (pr.site_b >= 0) {
        bool adj = false;
        for (int y : g.adjacency[pr.site_a])
            if (y == pr.site_b) { adj = true; break; }
        k_before += detail::incident_kinetic(s.field, g, pr.site_b);
        if (adj) k_before -= std::norm(s.field[pr.site_a] - s.field[pr.site_b]);
        double m_b = std::norm(s.field[pr.site_b]);
        dN += std::norm(pr.new_b) - m_b;
        dS4 += std::norm(pr.new_b) * std::norm(pr.new_b) - m_b * m_b;
        old_b = s.field[pr.site_b];
    }

    // hard mass constraint: rejection, never projection
    if (s.cached_N + dN > p.B * double(g.n)) return false;

    // apply tentatively to evaluate the new local gradient sum
    s.field[pr.site_a] = pr.new_a;
    if (pr.site_b >= 0) s.field[pr.site_b] = pr.new_b;
    double k_after = detail::incident_kinetic(s.field, g, pr.site_a);
    if (pr.site_b >= 0) {
        bool adj = false;
        for (int y : g.adjacency[pr.site_a])
            if (y == pr.site_b) { adj = true; break; }
        k_after += detail::incident_kinetic(s.field, g, pr.site_b);
        if (adj) k_after -= std::norm(s.field[pr.site_a] - s.field[pr.site_b]);
    }
    double dK = k_after - k_before;

    double log_accept;
    if (reduced) {
        log_accept = p.beta * dS4 / double(g.n) + pr.log_hastings;
    } else {
        double dH = 2.0 * dK / (double(g.n) * g.h * g.h) - dS4 / double(g.n);
        log_accept = -p.beta * dH + pr.log_hastings;
    }

    bool accept = log_accept >= 0.0;
    if (!accept) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        accept = std::log(unif(s.rng)) < log_accept;
    }
    if (!accept) {
        s.field[pr.site_a] = old_a;
        if (pr.site_b >= 0) s.field[pr.site_b] = old_b;
        return false;
    }
    s.cached_N += dN;
    s.cached_S4 += dS4;
    s.cached_K += dK;
    ++st.accepted;
    // periodic full recompute resets incremental drift
    if (++s.accepted_since_refresh >= 10000) refresh_caches(s, g);
    return true;
}

/// metropolis_step against the reduced (kinetic-free) target; used to probe
/// the Z <= Z' sandwich numerically.
inline bool sample_reduced(ChainState& s, const ThermoParams& p, const GraphTopology& g,
                           MoveKind move) {
    return metropolis_step(s, p, g, move, true);
}

namespace detail {

inline MoveKind draw_move(const MoveMixture& mix, std::mt19937_64& rng) {
    double w = mix.local_gaussian + mix.phase_rotation + mix.spike_transfer;
    std::uniform_real_distribution<double> unif(0.0, w);
    double u = unif(rng);
    if (u < mix.local_gaussian) return MoveKind::LocalGaussian;
    if (u < mix.local_gaussian + mix.phase_rotation) return MoveKind::PhaseRotation;
    return MoveKind::SpikeTransfer;
}

// Robbins-Monro style scale tuning toward 0.3 acceptance; burn-in only.
inline void adapt_scale(ChainState& s, double B) {
    if (s.adapt_window_proposed < 200) return;
    double rate = double(s.adapt_window_accepted) / double(s.adapt_window_proposed);
    s.local_scale *= std::exp(0.3 * (rate - 0.3));
    s.local_scale = std::clamp(s.local_scale, 1e-6 * std::sqrt(B), 1e3 * std::sqrt(B));
    s.adapt_window_proposed = 0;
    s.adapt_window_accepted = 0;
}

}  // namespace detail

/// n proposals drawn from the move mixture.
inline void sweep(ChainState& s, const ThermoParams& p, const GraphTopology& g,
                  const MoveMixture& mix, bool reduced = false) {
    for (int i = 0; i < g.n; ++i) {
        MoveKind mv = detail::draw_move(mix, s.rng);
        bool acc = metropolis_step(s, p, g, mv, reduced);
        if (s.adapting && mv == MoveKind::LocalGaussian) {
            ++s.adapt_window_proposed;
            if (acc) ++s.adapt_window_accepted;
            detail::adapt_scale(s, p.B);
        }
    }
}

/// Output of one chain: the thinned observable stream plus metadata.
struct ChainRun {
    std::vector<long> record_sweeps;
    std::vector<ObservableRecord> records;
    double acceptance[3] = {0.0, 0.0, 0.0};
    double final_scale = 0.0;
    std::uint64_t seed = 0;
    ChainState final_state{};
};

/// Optional per-record sink, e.g. to collect full field samples.
using SampleSink = std::function<void(long sweep, const ChainState&)>;

inline ChainRun run_chain(ComplexField init, const ThermoParams& p, const GraphTopology& g,
                          const Schedule& sched, bool reduced = false,
                          const SampleSink& sink = nullptr) {
    sched.validate();
    p.validate();
    if (power_N(init) > p.B * double(g.n))
        throw std::invalid_argument("run_chain: initial field violates N <= Bn");
    ChainState s = make_chain(std::move(init), g, sched.seed, 0, p.B);
    ChainRun out;
    out.seed = sched.seed;
    for (long sw = 0; sw < sched.sweeps; ++sw) {
        s.adapting = sw < sched.burn_in;
        sweep(s, p, g, sched.mixture, reduced);
        if (sw >= sched.burn_in && (sw - sched.burn_in) % sched.thin == 0) {
            out.record_sweeps.push_back(sw);
            out.records.push_back(observe(s.field, g));
            if (sink) sink(sw, s);
        }
    }
    for (int k = 0; k < 3; ++k) out.acceptance[k] = s.stats[k].rate();
    out.final_scale = s.local_scale;
    out.final_state = std::move(s);
    return out;
}

/// Replica exchange over a beta ladder sharing B and the topology.
/// Swap acceptance between adjacent rungs: min(1, exp((b_i - b_j)(H_i - H_j))).
struct TemperedRun {
    std::vector<ChainRun> rungs;
    std::vector<double> swap_rate;  // per adjacent pair
};

inline TemperedRun run_tempered(const std::vector<ThermoParams>& ladder,
                                const GraphTopology& g, const Schedule& sched,
                                const SampleSink& sink = nullptr, int sink_rung = -1) {
    sched.validate();
    if (ladder.size() < 2) throw std::invalid_argument("run_tempered: ladder needs >= 2 rungs");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        ladder[i].validate();
        if (ladder[i].B != ladder[0].B)
            throw std::invalid_argument("run_tempered: all rungs must share B");
        if (i > 0 && ladder[i].beta < ladder[i - 1].beta)
            throw std::invalid_argument("run_tempered: ladder must be sorted by beta");
    }
    std::size_t R = ladder.size();
    std::vector<ChainState> states;
    states.reserve(R);
    {
        auto init_rng = make_stream(sched.seed, R + 1);
        for (std::size_t r = 0; r < R; ++r)
            states.push_back(make_chain(init_gibbs_field(ladder[r], g, init_rng), g,
                                        sched.seed, r, ladder[r].B));
    }
    auto swap_rng = make_stream(sched.seed, R);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    TemperedRun out;
    out.rungs.resize(R);
    std::vector<long> swap_prop(R - 1, 0), swap_acc(R - 1, 0);
    for (std::size_t r = 0; r < R; ++r) out.rungs[r].seed = sched.seed;

    for (long sw = 0; sw < sched.sweeps; ++sw) {
        for (std::size_t r = 0; r < R; ++r) {
            states[r].adapting = sw < sched.burn_in;
            sweep(states[r], ladder[r], g, sched.mixture);
        }
        // alternate even/odd adjacent pairs for determinism
        for (std::size_t i = sw % 2; i + 1 < R; i += 2) {
            ++swap_prop[i];
            double hi = states[i].cached_H(g), hj = states[i + 1].cached_H(g);
            double log_a = (ladder[i].beta - ladder[i + 1].beta) * (hi - hj);
            if (log_a >= 0.0 || std::log(unif(swap_rng)) < log_a) {
                ++swap_acc[i];
                std::swap(states[i].field, states[i + 1].field);
                std::swap(states[i].cached_N, states[i + 1].cached_N);
                std::swap(states[i].cached_S4, states[i + 1].cached_S4);
                std::swap(states[i].cached_K, states[i + 1].cached_K);
            }
        }
        if (sw >= sched.burn_in && (sw - sched.burn_in) % sched.thin == 0) {
            for (std::size_t r = 0; r < R; ++r) {
                out.rungs[r].record_sweeps.push_back(sw);
                out.rungs[r].records.push_back(observe(states[r].field, g));
                if (sink && (sink_rung < 0 || std::size_t(sink_rung) == r)) sink(sw, states[r]);
            }
        }
    }
    for (std::size_t r = 0; r < R; ++r) {
        for (int k = 0; k < 3; ++k) out.rungs[r].acceptance[k] = states[r].stats[k].rate();
        out.rungs[r].final_scale = states[r].local_scale;
        out.rungs[r].final_state = std::move(states[r]);
    }
    out.swap_rate.resize(R - 1);
    for (std::size_t i = 0; i + 1 < R; ++i)
        out.swap_rate[i] = swap_prop[i] > 0 ? double(swap_acc[i]) / double(swap_prop[i]) : 0.0;
    return out;
}

}  // namespace dnls
