// Command-line front end: one binary, one subcommand per experiment.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "cbf/attractor.hpp"
#include "cbf/io.hpp"
#include "cbf/suite.hpp"

namespace {

using namespace cbf;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed_omega = 0;
    std::uint64_t seed_init = 0;
    int threads = -1;
    bool has_seed_omega = false, has_seed_init = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "configuration file (key = value lines)");
        app->add_option("--out", out_dir, "output directory (overrides output.dir)");
        app->add_option("--seed-omega", seed_omega, "noise realization seed")
            ->each([this](const std::string&) { has_seed_omega = true; });
        app->add_option("--seed-init", seed_init, "initial-data seed")
            ->each([this](const std::string&) { has_seed_init = true; });
        app->add_option("--threads", threads, "worker threads (0 = hardware)");
    }

    RunConfig load() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (config_path.empty()) cfg.config_hash = hash_hex("");
        if (has_seed_omega) cfg.seed_omega = seed_omega;
        if (has_seed_init) cfg.seed_init = seed_init;
        if (threads >= 0) cfg.threads = threads;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        std::filesystem::create_directories(cfg.out_dir);
        for (const auto& f : cfg.flags) std::cerr << "flag: " << f << "\n";
        return cfg;
    }
};

std::string path_in(const RunConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

int cmd_simulate(const RunConfig& cfg) {
    CbfParams params = cfg.make_params();
    SpectralField x0 = random_divfree_field(params.grid, cfg.seed_init, rng::Tag::init_field, 0,
                                            params.grid.n / 3, params.grid.n / 6.0, 1.0);
    Trajectory traj = integrate(x0, cfg.T, cfg.dt, params);
    write_ledger_csv(path_in(cfg, "ledger.csv"), traj.ledger, cfg.config_hash);

    Snapshot snap;
    snap.grid = params.grid;
    snap.r = cfg.r;
    snap.t = cfg.T;
    snap.fields.push_back(traj.final_state());
    write_snapshot(path_in(cfg, "final_state.cbf"), snap);

    AbsorbingRadii radii = absorbing_radii(params, cfg.M0_margin);
    DiscretizationAllowance allow = calibrate_allowance(params, cfg.dt, std::min(cfg.T, 2.0),
                                                        cfg.seed_init + 1);
    auto envelope = gronwall_envelope_check(traj, params, radii, allow);
    double energy_res = energy_equality_residual(traj, params);

    CsvWriter csv(path_in(cfg, "probe_report.csv"), {"name", "lhs", "rhs", "gap", "passed"},
                  cfg.config_hash);
    auto put = [&](const OperatorProbeReport& p) {
        csv.row({p.name, CsvWriter::num(p.lhs), CsvWriter::num(p.rhs), CsvWriter::num(p.gap),
                 p.passed ? "1" : "0"});
    };
    put(envelope.envelope);
    put(OperatorProbeReport::identity("energy_equality", energy_res, 0.0, 1e-5));
    std::cout << "simulate: T=" << cfg.T << " dt=" << cfg.dt
              << " final ||u||_H=" << std::sqrt(traj.ledger.h2.back())
              << " energy_residual=" << energy_res << "\n"
              << "wrote " << path_in(cfg, "ledger.csv") << ", final_state.cbf, probe_report.csv\n";
    return 0;
}

int cmd_ou_path(const RunConfig& cfg) {
    NoiseModel model = cfg.make_noise_model();
    const double mu = cfg.mu;
    OuPath path(model, mu, cfg.alpha_ou, cfg.dt, -cfg.T, 0.0, cfg.seed_omega);

    {
        CsvWriter csv(path_in(cfg, "ou_mode_variance.csv"),
                      {"k1", "k2", "k3", "pol", "lambda", "q", "sigma2", "empirical"},
                      cfg.config_hash);
        const int samples = 10000;
        std::vector<double> acc(2 * model.modes.size(), 0.0);
        for (int s = 0; s < samples; ++s) {
            auto amps = ou_stationary_amplitudes(model, mu, cfg.alpha_ou, cfg.seed_omega, s);
            for (std::size_t m = 0; m < amps.size(); ++m) acc[m] += std::norm(amps[m]);
        }
        for (std::size_t m = 0; m < model.modes.size(); ++m)
            for (int pol = 0; pol < 2; ++pol)
                csv.row({std::to_string(model.modes[m].k[0]), std::to_string(model.modes[m].k[1]),
                         std::to_string(model.modes[m].k[2]), std::to_string(pol),
                         CsvWriter::num(model.modes[m].lambda), CsvWriter::num(model.modes[m].q),
                         CsvWriter::num(model.stationary_variance(m, mu, cfg.alpha_ou)),
                         CsvWriter::num(acc[2 * m + pol] / samples)});
    }
    {
        CsvWriter csv(path_in(cfg, "ou_path_stats.csv"), {"t", "H2", "V2", "DA2", "X"},
                      cfg.config_hash);
        for (std::int64_t j = path.j_min(); j <= path.j_max(); ++j) {
            auto n = path.norms_at(j);
            csv.row({CsvWriter::num(j * path.dt()), CsvWriter::num(n.h2), CsvWriter::num(n.v2),
                     CsvWriter::num(n.da2), CsvWriter::num(n.x())});
        }
    }
    Snapshot snap;
    snap.grid = model.grid;
    snap.r = cfg.r;
    snap.t = 0.0;
    snap.fields.push_back(path.field_at(0));
    write_snapshot(path_in(cfg, "ou_state_t0.cbf"), snap);

    double onset = moment_bound_onset(path);
    std::cout << "ou-path: modes=" << model.retained_count() << " window=[" << path.t_min() << ", "
              << path.t_max() << "] moment-bound onset t0(omega)=" << onset << "\n"
              << "wrote ou_mode_variance.csv, ou_path_stats.csv, ou_state_t0.cbf\n";
    return 0;
}

int cmd_pullback(const RunConfig& cfg) {
    CbfParams params = cfg.make_params();
    NoiseModel model = cfg.make_noise_model();
    AbsorbingRadii radii = absorbing_radii(params, cfg.M0_margin);
    OuPath path(model, cfg.mu, cfg.alpha_ou, cfg.dt, -cfg.t0, 0.0, cfg.seed_omega);
    if (path.snapped()) std::cerr << "note: pullback window snapped to the dt grid\n";
    PointCloud init = ball_cloud(params, radii.M0, 6, cfg.seed_init);
    PointCloud snap = pullback_snapshot(init, path, cfg.epsilon, cfg.t0, params, cfg.dt,
                                        cfg.effective_threads());
    CsvWriter csv(path_in(cfg, "pullback.csv"), {"point", "H", "V"}, cfg.config_hash);
    for (std::size_t i = 0; i < snap.size(); ++i)
        csv.row({std::to_string(i), CsvWriter::num(norm(snap.states[i], NormKind::H)),
                 CsvWriter::num(norm(snap.states[i], NormKind::V))});
    Snapshot out;
    out.grid = params.grid;
    out.r = cfg.r;
    out.t = 0.0;
    out.fields = snap.states;
    write_snapshot(path_in(cfg, "pullback_cloud.cbf"), out);
    std::cout << "pullback: eps=" << cfg.epsilon << " t0=" << cfg.t0 << " points=" << snap.size()
              << "\nwrote pullback.csv, pullback_cloud.cbf\n";
    return 0;
}

int cmd_usc(const RunConfig& cfg) {
    CbfParams params = cfg.make_params();
    NoiseModel model = cfg.make_noise_model();
    UscOptions opts;
    opts.dt = cfg.dt;
    opts.threads = cfg.effective_threads();
    opts.attractor.dt = cfg.dt;
    std::vector<double> eps_grid = {0.4, 0.2, 0.1, 0.05};
    if (cfg.epsilon > 0.0 && cfg.epsilon < 0.4) eps_grid.push_back(cfg.epsilon);
    std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
    eps_grid.erase(std::unique(eps_grid.begin(), eps_grid.end()), eps_grid.end());
    auto rep = usc_experiment(eps_grid, cfg.seed_omega, cfg.seed_init, cfg.t0, params, model,
                              cfg.alpha_ou, opts);
    CsvWriter csv(path_in(cfg, "usc.csv"), {"epsilon", "distance"}, cfg.config_hash);
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        csv.row({CsvWriter::num(rep.epsilons[i]), CsvWriter::num(rep.distances[i])});
    std::cout << "usc-experiment: t0=" << rep.t0 << " seed=" << rep.seed_omega << "\n";
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        std::cout << "  eps=" << rep.epsilons[i] << "  d(A_eps,A)=" << rep.distances[i] << "\n";
    std::cout << "  V radii: deterministic=" << rep.deterministic_v_radius
              << " stochastic=" << rep.stochastic_v_radius << "\n"
              << "  trend: " << (rep.nonincreasing_ok ? "nonincreasing" : "NOT nonincreasing")
              << ", final/first=" << rep.final_over_first << " => verdict "
              << (rep.verdict ? "PASS" : "FAIL") << "\nwrote usc.csv\n";
    return rep.verdict ? 0 : 1;
}

int cmd_cocycle(const RunConfig& cfg) {
    CbfParams params = cfg.make_params();
    NoiseModel model = cfg.make_noise_model();
    SpectralField x = random_divfree_field(params.grid, cfg.seed_init, rng::Tag::init_field, 0,
                                           params.grid.n / 3, params.grid.n / 6.0, 1.0);
    CsvWriter csv(path_in(cfg, "cocycle.csv"), {"t", "s", "residual"}, cfg.config_hash);
    double worst = 0.0;
    for (auto [t, s] : std::vector<std::pair<double, double>>{{1, 1}, {2, 1}, {1, 3}}) {
        double res = cocycle_residual(x, t, s, cfg.seed_omega, cfg.epsilon, params, model,
                                      cfg.alpha_ou, cfg.dt);
        worst = std::max(worst, res);
        csv.row({CsvWriter::num(t), CsvWriter::num(s), CsvWriter::num(res)});
        std::cout << "cocycle residual t=" << t << " s=" << s << ": " << res << "\n";
    }
    std::cout << "wrote cocycle.csv\n";
    return 0;
}

int cmd_continuity(const RunConfig& cfg, const std::string& mode) {
    CbfParams params = cfg.make_params();
    NoiseModel model = cfg.make_noise_model();
    SpectralField x = random_divfree_field(params.grid, cfg.seed_init, rng::Tag::init_field, 0,
                                           params.grid.n / 3, params.grid.n / 6.0, 1.0);
    if (mode == "rds" || mode == "both") {
        auto rows = rds_continuity_experiment(x, {1e-1, 1e-2, 1e-3}, cfg.seed_omega,
                                              std::min(cfg.T, 2.0), cfg.epsilon, params, model,
                                              cfg.alpha_ou, cfg.dt);
        CsvWriter csv(path_in(cfg, "continuity_rds.csv"),
                      {"delta", "sup_h", "int_v2", "int_lr1", "env_sup2", "env_intv2", "below"},
                      cfg.config_hash);
        for (const auto& row : rows) {
            csv.row({CsvWriter::num(row.delta), CsvWriter::num(row.sup_h),
                     CsvWriter::num(row.int_v2), CsvWriter::num(row.int_lr1),
                     CsvWriter::num(row.env_sup2), CsvWriter::num(row.env_intv2),
                     row.below_envelope ? "1" : "0"});
            std::cout << "delta=" << row.delta << " sup||y||_H=" << row.sup_h
                      << (row.below_envelope ? " (below envelope)" : " (ABOVE envelope)") << "\n";
        }
        std::cout << "wrote continuity_rds.csv\n";
    }
    if (mode == "epsilon" || mode == "both") {
        double eps0 = cfg.epsilon > 0.0 ? cfg.epsilon : 0.1;
        auto rows = epsilon_continuity_experiment(eps0, {0.2 * eps0, 0.05 * eps0, 0.01 * eps0},
                                                  cfg.seed_omega, std::min(cfg.t0, 5.0), params, x,
                                                  model, cfg.alpha_ou, cfg.dt);
        CsvWriter csv(path_in(cfg, "continuity_epsilon.csv"), {"delta", "distance", "envelope"},
                      cfg.config_hash);
        for (const auto& row : rows) {
            csv.row({CsvWriter::num(row.delta), CsvWriter::num(row.distance),
                     CsvWriter::num(row.envelope)});
            std::cout << "delta=" << row.delta << " ||phi_(e0+d)x - phi_e0 x||_H=" << row.distance
                      << " envelope=" << row.envelope << "\n";
        }
        std::cout << "wrote continuity_epsilon.csv\n";
    }
    return 0;
}

int cmd_kappa(const RunConfig& cfg) {
    CbfParams params = cfg.make_params();
    NoiseModel model = cfg.make_noise_model();
    double Tmax = std::max(cfg.T, 4.0 * cfg.dt);
    OuPath path(model, cfg.mu, cfg.alpha_ou, cfg.dt, -Tmax, 0.0, cfg.seed_omega);
    std::vector<double> horizons = {0.25 * Tmax, 0.5 * Tmax, Tmax};
    auto rep = kappa_report(path, params, horizons);
    CsvWriter csv(path_in(cfg, "kappa.csv"),
                  {"T", "kappa1", "kappa2", "kappa3", "kappa4", "kappa5", "kappa6"},
                  cfg.config_hash);
    for (std::size_t i = 0; i < rep.horizons.size(); ++i)
        csv.row({CsvWriter::num(rep.horizons[i]), CsvWriter::num(rep.kappa[0][i]),
                 CsvWriter::num(rep.kappa[1][i]), CsvWriter::num(rep.kappa[2][i]),
                 CsvWriter::num(rep.kappa[3][i]), CsvWriter::num(rep.kappa[4][i]),
                 CsvWriter::num(rep.kappa[5][i])});
    std::cout << "kappa: horizons";
    for (double T : rep.horizons) std::cout << " " << T;
    std::cout << "\nrelative change between the largest horizons:";
    for (int i = 0; i < 6; ++i) std::cout << " k" << i + 1 << "=" << rep.rel_change[i];
    std::cout << "\nwrote kappa.csv\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    SuiteResult res = run_suite(cfg, cfg.out_dir);
    int passed = 0;
    for (const auto& c : res.checks) {
        std::cout << (c.ok() ? "PASS " : (c.status == "skipped" ? "SKIP " : "FAIL ")) << c.name;
        if (!c.note.empty()) std::cout << "  [" << c.note << "]";
        std::cout << "\n";
        passed += c.ok();
    }
    std::cout << passed << "/" << res.checks.size() << " checks passed; reports in " << cfg.out_dir
              << "\n";
    return res.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral simulator and experiment harness for the damped "
                 "Navier-Stokes system on the periodic torus"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string continuity_mode = "both";

    auto* simulate = app.add_subcommand("simulate", "integrate the deterministic system");
    auto* ou = app.add_subcommand("ou-path", "noise path statistics");
    auto* pullback = app.add_subcommand("pullback", "pullback snapshot of an initial cloud");
    auto* usc = app.add_subcommand("usc-experiment", "attractor distance vs noise amplitude");
    auto* cocycle = app.add_subcommand("cocycle", "cocycle composition residuals");
    auto* continuity = app.add_subcommand("continuity", "solution-continuity experiments");
    continuity->add_option("--mode", continuity_mode, "rds | epsilon | both");
    auto* kappa = app.add_subcommand("kappa", "finite-horizon radius functions");
    auto* verify = app.add_subcommand("verify", "run the full verification battery");
    for (auto* sub : {simulate, ou, pullback, usc, cocycle, continuity, kappa, verify})
        common.attach(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = common.load();
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (ou->parsed()) return cmd_ou_path(cfg);
        if (pullback->parsed()) return cmd_pullback(cfg);
        if (usc->parsed()) return cmd_usc(cfg);
        if (cocycle->parsed()) return cmd_cocycle(cfg);
        if (continuity->parsed()) return cmd_continuity(cfg, continuity_mode);
        if (kappa->parsed()) return cmd_kappa(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
