// Output plumbing: CSV tables, JSON reports and config-derived file names.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnls/analytic.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/experiments.hpp"
#include "dnls/sampler.hpp"

namespace dnls {

using json = nlohmann::ordered_json;

/// Six-significant-digit formatting used by the curve tables.
inline std::string fmt6(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

/// Refuse to clobber existing outputs unless forced; long runs are expensive.
inline std::ofstream open_output(const std::filesystem::path& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw std::runtime_error("output exists (use --force to overwrite): " + path.string());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

/// FNV-1a hash of the canonical config string; used to derive file names.
inline std::string config_hash(const std::string& canonical) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str().substr(0, 12);
}

inline void write_curves_csv(const std::vector<AnalyticPoint>& pts, std::ostream& out) {
    out << "beta,B,theta,F,a,fraction,branch\n";
    for (const auto& p : pts)
        out << fmt6(p.beta) << "," << fmt6(p.B) << "," << fmt6(p.theta) << "," << fmt6(p.F)
            << "," << fmt6(p.a) << "," << fmt6(p.fraction) << "," << to_string(p.branch) << "\n";
}

inline void write_observable_csv(const ChainRun& run, std::ostream& out) {
    out << "step,H,N,S4,M1,M2,mode_vertex,mass_fraction,h1_sq\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const auto& r = run.records[i];
        out << run.record_sweeps[i] << "," << r.H << "," << r.N << "," << r.S4 << "," << r.M1
            << "," << r.M2 << "," << r.mode_vertex << "," << r.mass_fraction << "," << r.h1_sq
            << "\n";
    }
}

inline json chain_metadata(const ChainRun& run, const Schedule& sched) {
    return json{{"seed", run.seed},
                {"mixture",
                 {{"local_gaussian", sched.mixture.local_gaussian},
                  {"phase_rotation", sched.mixture.phase_rotation},
                  {"spike_transfer", sched.mixture.spike_transfer}}},
                {"sweeps", sched.sweeps},
                {"burn_in", sched.burn_in},
                {"thin", sched.thin},
                {"acceptance",
                 {{"local_gaussian", run.acceptance[0]},
                  {"phase_rotation", run.acceptance[1]},
                  {"spike_transfer", run.acceptance[2]}}},
                {"final_local_scale", run.final_scale}};
}

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,H,N,S4,M1,M2,mode_vertex,mass_fraction\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
        const auto& r = traj.records[i];
        out << traj.times[i] << "," << r.H << "," << r.N << "," << r.S4 << "," << r.M1 << ","
            << r.M2 << "," << r.mode_vertex << "," << r.mass_fraction << "\n";
    }
}

inline json trajectory_summary(const Trajectory& traj) {
    double n0 = traj.records.front().N;
    double h0 = traj.records.front().H;
    double n_drift = 0.0, h_drift = 0.0;
    for (const auto& r : traj.records) {
        n_drift = std::max(n_drift, std::abs(r.N / n0 - 1.0));
        h_drift = std::max(h_drift, std::abs(r.H - h0));
    }
    return json{{"persistence_records", traj.persistence},
                {"total_records", traj.records.size()},
                {"mode_persistent", traj.persistence == long(traj.records.size())},
                {"max_rel_N_drift", n_drift},
                {"max_abs_H_drift", h_drift}};
}

inline json estimate_json(const Estimate& e) {
    return json{{"value", e.value},
                {"std_error", e.std_error},
                {"n_samples", e.n_samples},
                {"method", e.method}};
}

}  // namespace dnls
