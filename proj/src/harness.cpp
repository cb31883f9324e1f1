#include "bardina/harness.hpp"

#include "bardina/operators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bardina {

// ---------------------------------------------------------------------------
// initial conditions

SpectralField build_initial(const InitialCondition& ic, const GridSpec& grid,
                            const ForcingSpec& forcing, std::uint64_t seed) {
    switch (ic.kind) {
    case InitialCondition::Kind::zero: {
        SpectralField u(grid);
        u.set_divergence_free(true);
        u.set_dealiased(true);
        return u;
    }
    case InitialCondition::Kind::single_shear: {
        // a * (0, sin(2 pi x / L), 0): one conjugate mode pair, (u.grad)u = 0
        SpectralField u(grid);
        u.at_wave(1, 1, 0, 0) = Complex{0.0, -0.5 * ic.amplitude};
        u.at_wave(1, -1, 0, 0) = Complex{0.0, 0.5 * ic.amplitude};
        u.set_divergence_free(true);
        u.set_dealiased(true);
        return u;
    }
    case InitialCondition::Kind::random_lowmode: {
        SpectrumProfile profile;
        profile.kind = SpectrumProfile::Kind::gaussian;
        profile.peak_wave = 2.0;
        profile.max_wave = std::min(grid.dealias_max_wave(), ic.noise_max_wave);
        profile.target_norm = ic.amplitude;
        return random_divfree_field(grid, profile, seed);
    }
    case InitialCondition::Kind::manufactured_plus_noise: {
        ForcingSpec spec = forcing;
        spec.amplitude = ic.amplitude;
        SpectralField u = manufactured_target(spec, grid);
        if (ic.noise > 0) {
            // broadband perturbation: slow radial decay keeps energy out past
            // the observed band so the recovery has something to infer
            SpectrumProfile profile;
            profile.kind = SpectrumProfile::Kind::power_law;
            profile.exponent = 1.0;
            profile.max_wave = std::min(grid.dealias_max_wave(), ic.noise_max_wave);
            profile.target_norm = ic.noise * std::sqrt(sobolev_norm_sq(u, 0.0));
            u += random_divfree_field(grid, profile, seed);
        }
        return u;
    }
    }
    throw std::logic_error("build_initial: unreachable");
}

InitialCondition default_initial(const ForcingSpec& forcing) {
    InitialCondition ic;
    ic.amplitude = forcing.amplitude > 0 ? forcing.amplitude : 0.1;
    switch (forcing.kind) {
    case ForcingSpec::Kind::manufactured_steady:
        ic.kind = InitialCondition::Kind::manufactured_plus_noise;
        ic.noise = 0.1;
        break;
    case ForcingSpec::Kind::steady_lowmode:
        ic.kind = InitialCondition::Kind::random_lowmode;
        break;
    case ForcingSpec::Kind::none:
        ic.kind = InitialCondition::Kind::single_shear;
        break;
    }
    return ic;
}

void ExperimentConfig::validate() const {
    grid.validate();
    physics.validate();
    schedule.validate();
    if (!(dt > 0)) throw std::invalid_argument("time.dt must be positive");
    if (schedule.n_obs > grid.n_grid / 2)
        throw std::invalid_argument("recovery.N_obs must stay below the grid Nyquist range");
    if (schedule.eta * dt > 0.5 + 1e-12)
        throw std::invalid_argument("recovery.eta * time.dt must not exceed 1/2");
    if (output_dir.empty()) throw std::invalid_argument("output.dir must not be empty");
}

ExperimentConfig reference_config() {
    ExperimentConfig cfg;
    cfg.grid = GridSpec{};
    cfg.physics = PhysicalParams{};
    cfg.schedule = RecoverySchedule{};
    cfg.dt = 0.02;
    cfg.seed = 1;
    cfg.output_dir = "out";
    cfg.initial = default_initial(cfg.physics.forcing);
    return cfg;
}

// ---------------------------------------------------------------------------
// fits

GeometricFit fit_geometric(std::span<const double> values) {
    GeometricFit fit;
    std::vector<double> logs;
    logs.reserve(values.size());
    for (double v : values) {
        if (v > 0)
            logs.push_back(std::log(v));
        else
            ++fit.excluded;
    }
    fit.used = static_cast<int>(logs.size());
    if (fit.used < 3)
        throw std::invalid_argument("fit_geometric: need at least 3 positive values");
    // least squares of log v against the index
    const double m = static_cast<double>(logs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += logs[i];
        sxx += x * x;
        sxy += x * logs[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.ratio = std::exp(slope);
    return fit;
}

double fit_log_linear_rate(std::span<const double> times, std::span<const double> values,
                           double t_begin, double t_end) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_log_linear_rate: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_begin || times[i] > t_end || !(values[i] > 0)) continue;
        const double x = times[i];
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) throw std::invalid_argument("fit_log_linear_rate: fewer than 3 usable samples");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// envelope audits

long EnvelopeAudit::total() const {
    long t = 0;
    for (const auto& [k, v] : violations) t += v;
    return t;
}

namespace {

constexpr double kAuditSlack = 1e-10; // absorbs roundoff on genuine inequalities

bool holds(double lhs, double rhs) { return lhs <= rhs * (1.0 + kAuditSlack) + 1e-300; }

} // namespace

EnvelopeAudit verify_truth_envelopes(const std::vector<TrajectoryScalars>& series,
                                     const BoundsEnvelope& env, double alpha) {
    EnvelopeAudit audit;
    audit.violations["energy_envelope"] = 0;
    audit.violations["gradient_envelope"] = 0;
    audit.violations["rate_envelope"] = 0;
    const double a2 = alpha * alpha;
    for (const auto& s : series) {
        const double energy = s.norm_u * s.norm_u + a2 * s.norm_grad_u * s.norm_grad_u;
        if (!holds(energy, env.energy_bound_sq(s.t))) ++audit.violations["energy_envelope"];
        const double grad = s.norm_grad_u * s.norm_grad_u + a2 * s.norm_Au * s.norm_Au;
        if (!holds(grad, env.gradient_bound_sq(s.t))) ++audit.violations["gradient_envelope"];
        if (!holds(s.norm_ut, env.rate_bound(s.t))) ++audit.violations["rate_envelope"];
    }
    return audit;
}

EnvelopeAudit verify_observer_envelope(const std::vector<ObserverNodeNorms>& series,
                                       const std::vector<IterationRecord>& iters,
                                       const BoundsEnvelope& env, double f_sup) {
    EnvelopeAudit audit;
    audit.violations["observer_envelope"] = 0;
    std::map<int, const IterationRecord*> by_n;
    for (const auto& r : iters) by_n[r.n] = &r;
    std::map<int, std::pair<double, double>> norms_at_start; // iter -> (||w||^2, ||grad w||^2)
    for (const auto& s : series) {
        auto it = by_n.find(s.iter);
        if (it == by_n.end()) continue;
        const IterationRecord& rec = *it->second;
        if (!norms_at_start.count(s.iter))
            norms_at_start[s.iter] = {s.w_norm_sq, s.w_grad_norm_sq};
        const auto& start = norms_at_start[s.iter];
        const double bound =
            eval_M4_sq(s.t - rec.t_n, rec.eta_n, rec.beta_n_sq, start.first, start.second, f_sup,
                       env.energy_bound_sq(rec.t_n), env.alpha0);
        const double lhs = s.w_norm_sq + rec.beta_n_sq * s.w_grad_norm_sq;
        if (!holds(lhs, bound)) ++audit.violations["observer_envelope"];
    }
    return audit;
}

// ---------------------------------------------------------------------------
// twin experiment

namespace {

/// Truth-side probe: replays the hidden truth in lockstep with the observer
/// (bit-identical to the stream's internal integration) and derives twin-only
/// diagnostics from it.
class TwinMonitor final : public RecoveryMonitor {
public:
    TwinMonitor(const TruthSystem& sys, SpectralField u0, double dt)
        : sys_(sys), u_(std::move(u0)), dt_(dt) {}

    void on_node(int iter, double t, const SpectralField& w, double beta_sq) override {
        advance_to(t);
        record_norms(iter, t, w);
        (void)beta_sq;
    }

    void on_window_node(int iter, double t, const SpectralField& w, double beta_sq) override {
        advance_to(t);
        record_norms(iter, t, w);
        SpectralField g = w;
        g -= u_;
        const double prod = (std::sqrt(sobolev_norm_sq(w, 1.0)) +
                             std::sqrt(sobolev_norm_sq(u_, 1.0))) *
                            std::sqrt(sobolev_norm_sq(g, 1.0));
        auto& sup = window_sup_[iter];
        sup = std::max(sup, prod);
        (void)beta_sq;
    }

    std::optional<double> g_norm_combo(double t, const SpectralField& w,
                                       double beta_sq) override {
        advance_to(t);
        SpectralField g = w;
        g -= u_;
        return std::sqrt(sobolev_norm_sq(g, 0.0)) +
               std::sqrt(beta_sq) * std::sqrt(sobolev_norm_sq(g, 1.0));
    }

    double window_sup(int iter) const {
        auto it = window_sup_.find(iter);
        return it == window_sup_.end() ? 0.0 : it->second;
    }

    const std::vector<ObserverNodeNorms>& observer_norms() const { return observer_norms_; }

private:
    void advance_to(double t) {
        const long node = std::lround(t / dt_);
        while (reached_ < node) {
            u_ = imex_step(u_, dt_, sys_.dynamics(), nullptr, nullptr);
            ++reached_;
        }
    }

    void record_norms(int iter, double t, const SpectralField& w) {
        if (!observer_norms_.empty() && observer_norms_.back().t == t &&
            observer_norms_.back().iter == iter)
            return;
        ObserverNodeNorms n;
        n.iter = iter;
        n.t = t;
        n.w_norm_sq = sobolev_norm_sq(w, 0.0);
        n.w_grad_norm_sq = sobolev_norm_sq(w, 1.0);
        observer_norms_.push_back(n);
    }

    const TruthSystem& sys_;
    SpectralField u_;
    double dt_;
    long reached_ = 0;
    std::map<int, double> window_sup_;
    std::vector<ObserverNodeNorms> observer_norms_;
};

bool applied_update(const IterationRecord& r) {
    return r.status != IterationStatus::HaltedDegenerate && !r.positivity_breach;
}

} // namespace

RunReport run_twin_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
    const SpectralField u0 = build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);
    SpectralField w0 = cfg.observer_starts_at_truth ? u0 : SpectralField::zero(cfg.grid);
    w0.set_divergence_free(true);
    w0.set_dealiased(true);

    const BoundsEnvelope env =
        make_envelope(u0, cfg.schedule.alpha0, cfg.schedule.alpha1, cfg.schedule.c_gn,
                      sys.forcing.sup_norm, cfg.physics.nu, cfg.grid.lambda1());

    const int cap = std::max(cfg.schedule.n_obs, cfg.schedule.effective_n_tilde());
    LiveTruthObservations stream(sys, u0, cap, cfg.dt);
    stream.set_horizon(cfg.schedule.t_final);
    TwinMonitor monitor(sys, u0, cfg.dt);

    RecoveryResult loop = recovery_loop(stream, cfg.schedule, env, sys.forcing, cfg.physics.nu,
                                        w0, cfg.dt, &monitor);

    RunReport report;
    report.iterations = std::move(loop.iterations);
    report.halt = loop.halt;
    report.alpha_true_sq = cfg.physics.alpha * cfg.physics.alpha;
    report.beta_final_sq = loop.beta_final_sq;

    // twin-only error sequences and fits
    std::vector<double> g_combo_times;
    for (const auto& r : report.iterations) {
        report.beta_sq_errors.push_back(std::abs(r.beta_n_sq - report.alpha_true_sq));
        if (std::isfinite(r.g_norm_combo)) {
            report.g_combos.push_back(r.g_norm_combo);
            g_combo_times.push_back(r.t_n);
        }
    }
    if (!report.iterations.empty() && applied_update(report.iterations.back()))
        report.beta_sq_errors.push_back(
            std::abs(report.iterations.back().beta_np1_sq - report.alpha_true_sq));

    std::vector<double> fit_errors;
    for (std::size_t i = 0; i < report.iterations.size(); ++i)
        if (applied_update(report.iterations[i]))
            fit_errors.push_back(report.beta_sq_errors[i]);
    if (!report.iterations.empty() && applied_update(report.iterations.back()))
        fit_errors.push_back(report.beta_sq_errors.back());
    if (fit_errors.size() >= 3) {
        try {
            report.fitted_contraction_ratio = fit_geometric(fit_errors).ratio;
        } catch (const std::invalid_argument&) {
            // all entries at the floor; leave the fit unset
        }
    }
    if (report.g_combos.size() >= 3) {
        try {
            report.fitted_sync_rate = fit_log_linear_rate(g_combo_times, report.g_combos, 0.0,
                                                          cfg.schedule.t_final);
        } catch (const std::invalid_argument&) {
        }
    }

    // envelope audits
    EnvelopeAudit truth_audit =
        verify_truth_envelopes(stream.truth_scalars(), env, cfg.physics.alpha);
    EnvelopeAudit obs_audit = verify_observer_envelope(monitor.observer_norms(),
                                                       report.iterations, env, sys.forcing.sup_norm);
    report.envelope_violations = truth_audit.violations;
    for (const auto& [k, v] : obs_audit.violations) report.envelope_violations[k] = v;

    // per-iteration bound on the updated parameter error
    long bound_violations = 0;
    for (const auto& r : report.iterations) {
        if (!applied_update(r)) {
            report.update_error_bound.push_back(std::numeric_limits<double>::quiet_NaN());
            report.bound_violations_per_iter.push_back(0);
            continue;
        }
        const double dtilde = r.delta_n / (r.t_np1 - r.t_hat_n);
        const double bound = 4.0 * env.c_gn * env.c_gn * std::pow(env.lambda1, -0.25) /
                             (std::sqrt(dtilde) * std::sqrt(double(r.N_n))) *
                             monitor.window_sup(r.n);
        report.update_error_bound.push_back(bound);
        const double err = std::abs(report.alpha_true_sq - r.beta_np1_sq);
        const bool violated = err > bound * (1.0 + 1e-10) + 1e-300;
        report.bound_violations_per_iter.push_back(violated ? 1 : 0);
        bound_violations += violated ? 1 : 0;
    }
    report.envelope_violations["update_error_bound"] = bound_violations;

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace bardina
