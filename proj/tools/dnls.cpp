// dnls: command-line driver for the discrete NLS Gibbs-measure toolkit.
//
// Subcommands: curves, sample, logz, scan, h1, breather, gauss, verify.
// All runs are deterministic functions of (config, seed); JSON metadata
// carries a timestamp field which is the only output excluded from the
// byte-identity contract.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "dnls/io.hpp"
#include "dnls/verify.hpp"

namespace {

struct CommonOpts {
    double B = 1.0;
    double beta = 0.0;
    double beta_min = 0.0, beta_max = 5.0;
    int steps = 100;
    int torus_L = 0, torus_d = 3;
    std::string edges_path;
    long sweeps = 20000, burn_in = 0, thin = 10;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out_dir = "out";
    bool force = false;
    std::string ladder_csv;
    double T = 100.0, dt = 0.0;
    double p = 1.0 / 3.0;
    int samples = 20;
};

void add_topology_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--torus-L", o.torus_L, "torus side length (h = 1/L)");
    cmd->add_option("--torus-d", o.torus_d, "torus dimension");
    cmd->add_option("--edges", o.edges_path, "edge-list file (header `n <int> h <float>`)");
}

void add_schedule_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--sweeps", o.sweeps, "total MC sweeps (one sweep = n proposals)");
    cmd->add_option("--burn-in", o.burn_in, "burn-in sweeps (default: 20% of sweeps)");
    cmd->add_option("--thin", o.thin, "record every `thin` sweeps");
    cmd->add_option("--seed", o.seed, "master RNG seed");
}

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--force", o.force, "overwrite existing outputs");
    cmd->add_option("--workers", o.workers, "max concurrent chains/trajectories")
        ->envname("DNLS_WORKERS");
}

dnls::GraphTopology build_topology(const CommonOpts& o) {
    if (!o.edges_path.empty()) {
        std::ifstream in(o.edges_path);
        if (!in) throw CLI::ValidationError("--edges", "cannot open " + o.edges_path);
        return dnls::load_edge_list(in);
    }
    if (o.torus_L < 2) throw CLI::ValidationError("--torus-L", "torus requires --torus-L >= 2");
    return dnls::make_torus(o.torus_L, o.torus_d);
}

dnls::Schedule build_schedule(const CommonOpts& o) {
    dnls::Schedule s;
    s.sweeps = o.sweeps;
    s.burn_in = o.burn_in > 0 ? o.burn_in : o.sweeps / 5;
    s.thin = o.thin;
    s.seed = o.seed;
    return s;
}

std::vector<double> parse_ladder(const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::string iso_timestamp() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

dnls::json base_metadata(const std::string& subcommand, const CommonOpts& o,
                         const std::string& hash) {
    return dnls::json{{"subcommand", subcommand},
                      {"config_hash", hash},
                      {"seed", o.seed},
                      {"timestamp", iso_timestamp()}};  // excluded from determinism
}

std::string canonical_config(const std::string& sub, const CommonOpts& o) {
    std::ostringstream os;
    os << sub << " B=" << o.B << " beta=" << o.beta << " bmin=" << o.beta_min
       << " bmax=" << o.beta_max << " steps=" << o.steps << " L=" << o.torus_L
       << " d=" << o.torus_d << " edges=" << o.edges_path << " sweeps=" << o.sweeps
       << " burn=" << o.burn_in << " thin=" << o.thin << " seed=" << o.seed
       << " ladder=" << o.ladder_csv << " T=" << o.T << " dt=" << o.dt << " p=" << o.p
       << " samples=" << o.samples;
    return os.str();
}

int run_curves(const CommonOpts& o) {
    if (o.beta_max < o.beta_min) throw CLI::ValidationError("--beta-max", "must be >= --beta-min");
    if (o.steps < 2) throw CLI::ValidationError("--steps", "need at least 2 grid points");
    std::vector<double> grid(o.steps);
    for (int i = 0; i < o.steps; ++i)
        grid[i] = o.beta_min + (o.beta_max - o.beta_min) * double(i) / double(o.steps - 1);
    auto pts = dnls::emit_curves(o.B, grid);
    std::string hash = dnls::config_hash(canonical_config("curves", o));
    auto out = dnls::open_output(std::filesystem::path(o.out_dir) / ("curves_" + hash + ".csv"),
                                 o.force);
    dnls::write_curves_csv(pts, out);
    std::cout << "wrote " << o.out_dir << "/curves_" << hash << ".csv (" << pts.size()
              << " points)\n";
    return 0;
}

int run_sample(const CommonOpts& o) {
    auto g = build_topology(o);
    dnls::ThermoParams p{o.beta, o.B, g.h, g.n};
    auto sched = build_schedule(o);
    auto init_rng = dnls::make_stream(sched.seed, 977);
    auto run = dnls::run_chain(dnls::init_gibbs_field(p, g, init_rng), p, g, sched);
    std::string hash = dnls::config_hash(canonical_config("sample", o));
    auto dir = std::filesystem::path(o.out_dir);
    {
        auto out = dnls::open_output(dir / ("sample_" + hash + ".csv"), o.force);
        dnls::write_observable_csv(run, out);
    }
    dnls::json meta = base_metadata("sample", o, hash);
    meta["chain"] = dnls::chain_metadata(run, sched);
    auto out = dnls::open_output(dir / ("sample_" + hash + ".json"), o.force);
    out << meta.dump(2) << "\n";
    std::cout << "wrote " << (dir / ("sample_" + hash + ".csv")).string() << " ("
              << run.records.size() << " records)\n";
    return 0;
}

int run_logz(const CommonOpts& o) {
    auto g = build_topology(o);
    dnls::ThermoParams p{o.beta, o.B, g.h, g.n};
    std::vector<double> ladder;
    if (!o.ladder_csv.empty()) ladder = parse_ladder(o.ladder_csv);
    auto res = dnls::estimate_logZ_density(p, g, ladder, build_schedule(o));
    std::string hash = dnls::config_hash(canonical_config("logz", o));
    dnls::json meta = base_metadata("logz", o, hash);
    meta["log_Z_density"] = dnls::estimate_json(res.estimate);
    meta["converged"] = res.converged;
    meta["ladder"] = res.ladder;
    meta["acceptance_local"] = res.acceptance_local;
    auto out = dnls::open_output(std::filesystem::path(o.out_dir) / ("logz_" + hash + ".json"),
                                 o.force);
    out << meta.dump(2) << "\n";
    std::cout << "(log Z)/n = " << res.estimate.value << " +- " << res.estimate.std_error
              << (res.converged ? "" : "  [UNCONVERGED]") << "\n";
    return res.converged ? 0 : 3;
}

int run_scan(const CommonOpts& o) {
    auto g = build_topology(o);
    if (o.steps < 1) throw CLI::ValidationError("--steps", "need at least 1 grid point");
    std::vector<double> grid(o.steps);
    for (int i = 0; i < o.steps; ++i)
        grid[i] = o.steps == 1 ? o.beta_max
                               : o.beta_min + (o.beta_max - o.beta_min) * double(i) /
                                                  double(o.steps - 1);
    auto rows = dnls::phase_scan(o.B, grid, g, build_schedule(o));
    std::string hash = dnls::config_hash(canonical_config("scan", o));
    auto out = dnls::open_output(std::filesystem::path(o.out_dir) / ("scan_" + hash + ".csv"),
                                 o.force);
    out << "beta,mass_fraction,mass_fraction_se,M1_over_n,M2_over_n,H_over_n,N_over_n,"
           "analytic_fraction,analytic_F,acceptance_local\n";
    out << std::setprecision(10);
    bool converged = true;
    for (const auto& r : rows) {
        out << r.beta << "," << r.mass_fraction.value << "," << r.mass_fraction.std_error << ","
            << r.M1_over_n.value << "," << r.M2_over_n.value << "," << r.H_over_n.value << ","
            << r.N_over_n.value << "," << r.analytic_fraction << "," << r.analytic_F << ","
            << r.acceptance_local << "\n";
        if (r.acceptance_local < 0.1 || r.acceptance_local > 0.6) converged = false;
    }
    std::cout << "wrote scan (" << rows.size() << " rows)\n";
    return converged ? 0 : 3;
}

int run_h1(const CommonOpts& o) {
    int d = int(std::round(1.0 / o.p));
    if (d < 3 || std::abs(1.0 / double(d) - o.p) > 1e-9)
        throw CLI::ValidationError("--p", "p must be 1/d for an integer d >= 3");
    int max_L = o.torus_L >= 4 ? o.torus_L : 8;
    std::vector<dnls::GraphTopology> tori;
    for (int L = 4; L <= max_L; L += 2) tori.push_back(dnls::make_torus(L, d));
    dnls::ThermoParams p{o.beta, o.B, 1.0, 1};
    auto res = dnls::h1_growth(p, tori, build_schedule(o));
    std::string hash = dnls::config_hash(canonical_config("h1", o));
    dnls::json meta = base_metadata("h1", o, hash);
    meta["fitted_exponent"] = res.fitted_exponent;
    meta["target_p"] = o.p;
    for (const auto& r : res.rows)
        meta["rows"].push_back({{"n", r.n}, {"h", r.h}, {"median_h1_sq", r.median_h1_sq}});
    auto out = dnls::open_output(std::filesystem::path(o.out_dir) / ("h1_" + hash + ".json"),
                                 o.force);
    out << meta.dump(2) << "\n";
    std::cout << "fitted H1 growth exponent " << res.fitted_exponent << " (p = " << o.p << ")\n";
    return 0;
}

int run_breather(const CommonOpts& o) {
    auto g = build_topology(o);
    dnls::ThermoParams p{o.beta, o.B, g.h, g.n};
    double dt = o.dt > 0.0 ? o.dt : dnls::default_dt(g);
    auto rep = dnls::breather_persistence(p, g, build_schedule(o), o.T, dt, o.samples);
    std::string hash = dnls::config_hash(canonical_config("breather", o));
    dnls::json meta = base_metadata("breather", o, hash);
    meta["report"] = {{"n_samples", rep.n_samples},
                      {"n_persistent", rep.n_persistent},
                      {"fraction_persistent", rep.fraction_persistent},
                      {"max_mass_fraction_dev", rep.max_mass_fraction_dev},
                      {"max_N_drift", rep.max_N_drift},
                      {"min_mode_changes", rep.min_mode_changes},
                      {"analytic_fraction", rep.analytic_fraction},
                      {"T", o.T},
                      {"dt", dt}};
    auto out = dnls::open_output(
        std::filesystem::path(o.out_dir) / ("breather_" + hash + ".json"), o.force);
    out << meta.dump(2) << "\n";
    std::cout << "persistent fraction " << rep.fraction_persistent << " over T = " << o.T << "\n";
    return 0;
}

int run_gauss(const CommonOpts& o) {
    auto g = build_topology(o);
    if (!g.is_torus)
        throw CLI::ValidationError("--edges", "gauss requires a translatable graph (torus)");
    auto group = dnls::torus_translations(g);
    dnls::ThermoParams p{o.beta, o.B, g.h, g.n};
    auto rep = dnls::gaussian_coordinate_test(p, g, group, build_schedule(o), o.samples);
    std::string hash = dnls::config_hash(canonical_config("gauss", o));
    dnls::json meta = base_metadata("gauss", o, hash);
    meta["report"] = {{"ks", rep.ks},
                      {"ks_wrong_scale", rep.ks_wrong_scale},
                      {"tail_prob", rep.tail_prob},
                      {"distant_pair_corr", rep.distant_pair_corr},
                      {"scale", rep.scale},
                      {"pooled", rep.pooled},
                      {"supercritical", rep.supercritical}};
    auto out = dnls::open_output(std::filesystem::path(o.out_dir) / ("gauss_" + hash + ".json"),
                                 o.force);
    out << meta.dump(2) << "\n";
    std::cout << "KS distance " << rep.ks << " (scale " << rep.scale << ")\n";
    return 0;
}

int run_verify() {
    auto results = dnls::verify_all();
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail << "]\n";
        all = all && r.pass;
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermodynamics and dynamics of the focusing discrete NLS on graphs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file (flags win over file values)");

    CommonOpts o;
    auto* curves = app.add_subcommand("curves", "emit the analytic free-energy/condensate curves");
    curves->add_option("--B", o.B, "mass-density cutoff");
    curves->add_option("--beta-min", o.beta_min, "grid start");
    curves->add_option("--beta-max", o.beta_max, "grid end");
    curves->add_option("--steps", o.steps, "grid size");
    add_output_opts(curves, o);

    auto* sample = app.add_subcommand("sample", "run one Metropolis chain, stream observables");
    sample->add_option("--B", o.B, "mass-density cutoff")->required();
    sample->add_option("--beta", o.beta, "inverse temperature")->required();
    add_topology_opts(sample, o);
    add_schedule_opts(sample, o);
    add_output_opts(sample, o);

    auto* logz = app.add_subcommand("logz", "estimate (log Z)/n by thermodynamic integration");
    logz->add_option("--B", o.B)->required();
    logz->add_option("--beta", o.beta)->required();
    logz->add_option("--ladder", o.ladder_csv, "comma-separated beta ladder (0 .. beta)");
    add_topology_opts(logz, o);
    add_schedule_opts(logz, o);
    add_output_opts(logz, o);

    auto* scan = app.add_subcommand("scan", "phase-transition scan over a beta grid");
    scan->add_option("--B", o.B)->required();
    scan->add_option("--beta-min", o.beta_min);
    scan->add_option("--beta-max", o.beta_max)->required();
    scan->add_option("--steps", o.steps);
    add_topology_opts(scan, o);
    add_schedule_opts(scan, o);
    add_output_opts(scan, o);

    auto* h1 = app.add_subcommand("h1", "discrete H1 growth exponent across torus sizes");
    h1->add_option("--B", o.B)->required();
    h1->add_option("--beta", o.beta)->required();
    h1->add_option("--p", o.p, "spacing exponent h = n^-p, p = 1/d");
    h1->add_option("--torus-L", o.torus_L, "largest torus side (sizes 4, 6, ..., L)");
    add_schedule_opts(h1, o);
    add_output_opts(h1, o);

    auto* breather = app.add_subcommand("breather", "integrate Gibbs samples, track the mode");
    breather->add_option("--B", o.B)->required();
    breather->add_option("--beta", o.beta)->required();
    breather->add_option("--T", o.T, "integration horizon");
    breather->add_option("--dt", o.dt, "time step (default 0.1 h^2)");
    breather->add_option("--samples", o.samples, "number of Gibbs samples");
    add_topology_opts(breather, o);
    add_schedule_opts(breather, o);
    add_output_opts(breather, o);

    auto* gauss = app.add_subcommand("gauss", "Gaussian coordinate statistics test");
    gauss->add_option("--B", o.B)->required();
    gauss->add_option("--beta", o.beta)->required();
    gauss->add_option("--samples", o.samples, "number of Gibbs samples");
    add_topology_opts(gauss, o);
    add_schedule_opts(gauss, o);
    add_output_opts(gauss, o);

    auto* verify = app.add_subcommand("verify", "run the invariant suites, exit 0 iff all pass");
    (void)verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // validation failures map to exit 1
    }

    try {
        if (app.got_subcommand(curves)) return run_curves(o);
        if (app.got_subcommand(sample)) return run_sample(o);
        if (app.got_subcommand(logz)) return run_logz(o);
        if (app.got_subcommand(scan)) return run_scan(o);
        if (app.got_subcommand(h1)) return run_h1(o);
        if (app.got_subcommand(breather)) return run_breather(o);
        if (app.got_subcommand(gauss)) return run_gauss(o);
        if (app.got_subcommand(verify)) return run_verify();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
