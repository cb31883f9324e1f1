#include "bardina/config.hpp"
#include "bardina/harness.hpp"
#include "bardina/nudging.hpp"
#include "bardina/report_io.hpp"
#include "bardina/snapshot_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace bardina;

namespace {

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    return parse_config(path, overrides);
}

RecordedObservations stream_from_dump(const fs::path& dir, int cap) {
    TruthTrajectory traj = load_trajectory(dir);
    if (traj.times.size() < 2) throw std::runtime_error("truth dump has fewer than two snapshots");
    RecordedObservations obs(traj.grid, cap, traj.times[1] - traj.times[0], traj.times[0]);
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        obs.append(traj.states[i], traj.derivatives[i]);
    return obs;
}

int cmd_truth(const ExperimentConfig& cfg, int every) {
    const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
    const SpectralField u0 = build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);
    SimulateOptions opt;
    opt.snapshot_stride = std::max(1, every);
    const TruthTrajectory traj =
        simulate_truth(u0, cfg.schedule.t_final, cfg.dt, sys, opt);
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    write_resolved_config(cfg, dir / "resolved.cfg");
    dump_trajectory(traj, dir);
    std::printf("wrote %zu snapshots to %s\n", traj.states.size(), dir.string().c_str());
    return 0;
}

int cmd_assimilate(const ExperimentConfig& cfg, const std::string& truth_dir) {
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    write_resolved_config(cfg, dir / "resolved.cfg");

    const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
    const SpectralField u0 = build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);

    NudgedState state;
    state.w = cfg.observer_starts_at_truth ? u0 : SpectralField::zero(cfg.grid);
    state.w.set_divergence_free(true);
    state.beta_sq = cfg.schedule.beta1_sq;
    state.eta = cfg.schedule.eta;
    state.obs_cutoff = cfg.schedule.n_obs;
    state.validate(cfg.grid);

    std::ofstream csv(dir / "sync_error.csv");
    csv << "t,g_norm_sq,beta_sq_grad_g_sq,lyapunov\n";
    csv.precision(17);

    const long steps = std::lround(cfg.schedule.t_final / cfg.dt);
    if (!truth_dir.empty()) {
        RecordedObservations obs = stream_from_dump(truth_dir, cfg.schedule.n_obs);
        TruthTrajectory traj = load_trajectory(truth_dir);
        for (long k = 0; k <= steps; ++k) {
            const double t = k * cfg.dt;
            if (t > obs.t_end() + 1e-9) break;
            // error diagnostics only where dumped states exist
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                if (std::abs(traj.times[i] - t) < 1e-9) {
                    const auto [gsq, bgsq] = sync_error(state.w, traj.states[i], state.beta_sq);
                    csv << t << ',' << gsq << ',' << bgsq << ',' << gsq + bgsq << '\n';
                    break;
                }
            }
            if (k == steps) break;
            const SpectralField obs_now = obs.velocity(t, state.obs_cutoff);
            const SpectralField obs_next = obs.velocity(t + cfg.dt, state.obs_cutoff);
            state = step_nudged(std::move(state), cfg.dt, obs_now, obs_next, sys.forcing,
                                cfg.physics.nu);
        }
    } else {
        LiveTruthObservations obs(sys, u0, cfg.schedule.n_obs, cfg.dt);
        obs.set_horizon(cfg.schedule.t_final);
        SpectralField u = u0; // truth replica for the error diagnostics
        for (long k = 0; k <= steps; ++k) {
            const double t = k * cfg.dt;
            const auto [gsq, bgsq] = sync_error(state.w, u, state.beta_sq);
            csv << t << ',' << gsq << ',' << bgsq << ',' << gsq + bgsq << '\n';
            if (k == steps) break;
            const SpectralField obs_now = obs.velocity(t, state.obs_cutoff);
            const SpectralField obs_next = obs.velocity(t + cfg.dt, state.obs_cutoff);
            state = step_nudged(std::move(state), cfg.dt, obs_now, obs_next, sys.forcing,
                                cfg.physics.nu);
            u = step_truth(u, cfg.dt, sys);
            obs.release_before(t);
        }
    }
    save_snapshot(state.w, dir / "w_final.brdf");
    std::printf("wrote %s and %s\n", (dir / "sync_error.csv").string().c_str(),
                (dir / "w_final.brdf").string().c_str());
    return 0;
}

int finish_recover(const RunReport& report, const ExperimentConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    write_resolved_config(cfg, dir / "resolved.cfg");
    write_iterations_csv(report, dir / "iterations.csv");
    write_report_json(report, dir / "report.json");
    write_plots(report, dir);
    std::printf("halt: %s after %zu iterations; beta_final_sq = %.17g\n",
                to_string(report.halt).c_str(), report.iterations.size(), report.beta_final_sq);
    switch (report.halt) {
    case LoopHalt::FinalTime:
        return 0;
    case LoopHalt::Degenerate:
        std::printf("stopped: u_t - nu*Lap(u) vanishes on the observed modes, so the filter "
                    "scale no longer influences the observed dynamics\n");
        return 2;
    case LoopHalt::StrictInfeasible:
        std::fprintf(stderr, "strict mode found no admissible (eta, N) pair\n");
        return 1;
    case LoopHalt::PositivityBreach:
        std::fprintf(stderr, "updated beta^2 lost positivity (condition-regime breach)\n");
        return 1;
    }
    return 1;
}

int cmd_recover(const ExperimentConfig& cfg, const std::string& truth_dir) {
    if (cfg.schedule.mode == RecoveryMode::strict)
        std::fprintf(stderr,
                     "note: strict mode enforces the full admissibility system; with the "
                     "configured c_gn=%g this is typically infeasible at desk scale\n",
                     cfg.schedule.c_gn);
    if (truth_dir.empty()) {
        const RunReport report = run_twin_experiment(cfg);
        return finish_recover(report, cfg);
    }
    // recovery against a pre-dumped truth: only the low-mode stream is read
    const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
    RecordedObservations obs =
        stream_from_dump(truth_dir, std::max(cfg.schedule.n_obs, cfg.schedule.effective_n_tilde()));
    SpectralField w0 = SpectralField::zero(cfg.grid);
    w0.set_divergence_free(true);
    const SpectralField u0 = build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);
    const BoundsEnvelope env =
        make_envelope(u0, cfg.schedule.alpha0, cfg.schedule.alpha1, cfg.schedule.c_gn,
                      sys.forcing.sup_norm, cfg.physics.nu, cfg.grid.lambda1());
    RecoveryResult loop =
        recovery_loop(obs, cfg.schedule, env, sys.forcing, cfg.physics.nu, w0, cfg.dt);
    RunReport report;
    report.iterations = std::move(loop.iterations);
    report.halt = loop.halt;
    report.alpha_true_sq = cfg.physics.alpha * cfg.physics.alpha;
    report.beta_final_sq = loop.beta_final_sq;
    for (const auto& r : report.iterations)
        report.beta_sq_errors.push_back(std::abs(r.beta_n_sq - report.alpha_true_sq));
    return finish_recover(report, cfg);
}

int cmd_check_conditions(const ExperimentConfig& cfg) {
    const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
    const SpectralField u0 = build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);
    const BoundsEnvelope env =
        make_envelope(u0, cfg.schedule.alpha0, cfg.schedule.alpha1, cfg.schedule.c_gn,
                      sys.forcing.sup_norm, cfg.physics.nu, cfg.grid.lambda1());

    const double t_hat = cfg.schedule.effective_settle();
    const double t_next = t_hat + cfg.schedule.window;
    LiveTruthObservations obs(sys, u0,
                              std::max(cfg.schedule.n_obs, cfg.schedule.effective_n_tilde()),
                              cfg.dt);
    const double zeta =
        zeta_n(obs, cfg.schedule.effective_n_tilde(), t_hat, t_next, cfg.physics.nu);

    const auto choice = select_parameters(1, cfg.schedule, env, 0.0, t_hat, t_next, zeta,
                                          cfg.schedule.beta1_sq, 0.0, 0.0);
    std::printf("zeta_1 = %.17g over [%g, %g]\n", zeta, t_hat, t_next);
    if (cfg.schedule.mode == RecoveryMode::strict && !choice.feasible) {
        std::printf("strict search: infeasible on the configured ladders\n");
        return 0;
    }
    std::printf("eta_1 = %.17g, N_1 = %d (%s mode)\n", choice.eta, choice.n_obs,
                to_string(cfg.schedule.mode).c_str());
    std::printf("%-16s %6s %14s %14s %14s\n", "condition", "pass", "lhs", "rhs", "margin");
    for (std::size_t i = 0; i < choice.report.checks.size(); ++i) {
        const auto& c = choice.report.checks[i];
        std::printf("%-16s %6s %14.6g %14.6g %14.6g\n", ConditionReport::names()[i],
                    c.satisfied ? "yes" : "NO", c.lhs, c.rhs, c.margin);
    }
    std::printf("conditions_passed = %s\n", choice.report.passed_string().c_str());
    return 0;
}

int cmd_report(const ExperimentConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    write_plots_from_csv(dir / "iterations.csv", dir);
    std::printf("regenerated plots under %s\n", (dir / "plots").string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic-box spectral solver and filter-scale recovery toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string truth_dir;
    int every = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "configuration file")->required();
        cmd->add_option("--set", overrides, "override 'key=value' (repeatable)");
    };

    CLI::App* truth = app.add_subcommand("truth", "simulate the truth system and dump snapshots");
    add_common(truth);
    truth->add_option("--every", every, "snapshot stride in steps (default 1)");

    CLI::App* assim = app.add_subcommand("assimilate", "fixed-parameter nudged observer run");
    add_common(assim);
    assim->add_option("--truth-dir", truth_dir, "consume a dumped trajectory instead of a live run");

    CLI::App* recover = app.add_subcommand("recover", "run the full parameter-recovery loop");
    add_common(recover);
    recover->add_option("--truth-dir", truth_dir, "consume a dumped trajectory instead of a live run");

    CLI::App* check = app.add_subcommand("check-conditions",
                                         "evaluate the admissibility inequalities for a config");
    add_common(check);

    CLI::App* report = app.add_subcommand("report", "regenerate plots from emitted CSVs");
    add_common(report);

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = load_config(config_path, overrides);
        if (truth->parsed()) return cmd_truth(cfg, every);
        if (assim->parsed()) return cmd_assimilate(cfg, truth_dir);
        if (recover->parsed()) return cmd_recover(cfg, truth_dir);
        if (check->parsed()) return cmd_check_conditions(cfg);
        if (report->parsed()) return cmd_report(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
