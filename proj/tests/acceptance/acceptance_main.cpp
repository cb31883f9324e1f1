// Acceptance suite: one self-contained check per shipped guarantee, each
// printing a single PASS/FAIL line. Run `acceptance --all` or
// `acceptance --criterion <k>`.

#include "bardina/bilinear.hpp"
#include "bardina/config.hpp"
#include "bardina/harness.hpp"
#include "bardina/nudging.hpp"
#include "bardina/operators.hpp"
#include "bardina/random_field.hpp"
#include "bardina/recovery.hpp"
#include "bardina/report_io.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace bardina;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

GridSpec grid_of(int n, double L = 2.0 * kPi) {
    GridSpec g;
    g.n_grid = n;
    g.box_length = L;
    return g;
}

SpectralField random_full_band(const GridSpec& g, std::uint64_t seed, bool dealiased_band) {
    SpectrumProfile p;
    p.kind = SpectrumProfile::Kind::power_law;
    p.exponent = 1.5;
    p.max_wave = dealiased_band ? g.dealias_max_wave() : g.max_wave();
    p.target_norm = 1.0;
    return random_divfree_field(g, p, seed);
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.raw().size(); ++i)
        m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
    return m;
}

// The reference twin configuration used by the long-running criteria.
ExperimentConfig acceptance_reference() {
    ExperimentConfig cfg = reference_config(); // L=2pi, n=32, nu=0.1, alpha=0.25
    cfg.schedule.beta1_sq = 0.04;
    cfg.schedule.eta = 20.0;
    cfg.schedule.n_obs = 8;
    cfg.schedule.n_tilde = 8;
    cfg.schedule.settle = 0.1;
    cfg.schedule.window = 0.2;
    cfg.schedule.max_iters = 6;
    cfg.schedule.t_final = 20.0;
    cfg.dt = 0.02;
    cfg.seed = 1;
    cfg.initial = default_initial(cfg.physics.forcing);
    return cfg;
}

// ---------------------------------------------------------------------------
// 1. operator identities

Outcome criterion_operator_identities() {
    Outcome out;
    const GridSpec g = grid_of(16);
    const double tol = 1e-12;
    const double alpha_sq = 0.29;
    const double L2 = g.box_length * g.box_length;
    double worst = 0;

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SpectralField u = random_full_band(g, seed, false);
        if (seed % 2 == 1) {
            // pollute with a gradient part so the projection has work to do
            u.at_wave(0, 1, 2, 0) += Complex{0.4, -0.2};
            u.at_wave(0, -1, -2, 0) += Complex{0.4, 0.2};
            u.set_divergence_free(false);
        }
        const double scale = std::max(u.max_abs_coefficient(), 1e-300);

        // projection: idempotent
        const SpectralField p1 = leray_project(u);
        worst = std::max(worst, max_diff(leray_project(p1), p1) / scale);

        // projection: self-adjoint against an independent partner
        const SpectralField v = random_full_band(g, seed + 5000, false);
        worst = std::max(worst, rel_err(inner_product(p1, v, 0.0),
                                        inner_product(u, leray_project(v), 0.0)));

        // A and the Helmholtz inverse act per mode with the stated factors
        const SpectralField Au = apply_A(u);
        const SpectralField Hu = helmholtz_inverse(u, alpha_sq);
        for (int kx = -3; kx <= 3; kx += 2)
            for (int ky = -2; ky <= 3; ky += 2)
                for (int kz = 1; kz <= 5; kz += 2) {
                    const double kk = double(kx) * kx + double(ky) * ky + double(kz) * kz;
                    const double lam = 4.0 * kPi * kPi * kk / L2;
                    const double h = L2 / (L2 + 4.0 * alpha_sq * kPi * kPi * kk);
                    for (int c = 0; c < 3; ++c) {
                        const Complex base = u.at_wave(c, kx, ky, kz);
                        worst = std::max(worst, std::abs(Au.at_wave(c, kx, ky, kz) - lam * base) /
                                                    std::max(std::abs(lam * base), 1e-300));
                        worst = std::max(worst, std::abs(Hu.at_wave(c, kx, ky, kz) - h * base) /
                                                    std::max(std::abs(h * base), 1e-300));
                    }
                }

        // pairwise commutation, including with the projection
        const int N = 5;
        worst = std::max(worst, max_diff(apply_A(Hu), helmholtz_inverse(Au, alpha_sq)) / scale);
        worst = std::max(worst, max_diff(apply_A(low_mode_project(u, N)),
                                         low_mode_project(Au, N)) / scale);
        worst = std::max(worst, max_diff(helmholtz_inverse(low_mode_project(u, N), alpha_sq),
                                         low_mode_project(Hu, N)) / scale);
        worst = std::max(worst, max_diff(apply_A(p1), leray_project(apply_A(u))) / scale);
        worst = std::max(worst, max_diff(helmholtz_inverse(p1, alpha_sq),
                                         leray_project(Hu)) / scale);
        worst = std::max(worst, max_diff(low_mode_project(p1, N),
                                         leray_project(low_mode_project(u, N))) / scale);
    }
    out.note("worst relative defect " + fmt(worst) + " over 100 fields");
    if (worst > tol) out.fail("exceeds 1e-12");
    return out;
}

// ---------------------------------------------------------------------------
// 2. bilinear form

SpectralField convolution_oracle(const SpectralField& u, const SpectralField& v) {
    const GridSpec& g = u.grid();
    const int km = g.max_wave();
    const int kd = g.dealias_max_wave();
    const double two_pi_over_L = 2.0 * kPi / g.box_length;
    SpectralField out(g);
    for (int kx = -kd; kx <= kd; ++kx)
        for (int ky = -kd; ky <= kd; ++ky)
            for (int kz = -kd; kz <= kd; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                Complex sum[3] = {};
                for (int px = -km; px <= km; ++px)
                    for (int py = -km; py <= km; ++py)
                        for (int pz = -km; pz <= km; ++pz) {
                            const int qx = kx - px, qy = ky - py, qz = kz - pz;
                            if (std::abs(qx) > km || std::abs(qy) > km || std::abs(qz) > km)
                                continue;
                            const Complex dot = u.at_wave(0, px, py, pz) * double(qx) +
                                                u.at_wave(1, px, py, pz) * double(qy) +
                                                u.at_wave(2, px, py, pz) * double(qz);
                            for (int j = 0; j < 3; ++j)
                                sum[j] += Complex{0, two_pi_over_L} * dot *
                                          v.at_wave(j, qx, qy, qz);
                        }
                for (int j = 0; j < 3; ++j) out.at_wave(j, kx, ky, kz) = sum[j];
            }
    out.set_dealiased(true);
    return leray_project(out);
}

Outcome criterion_bilinear() {
    Outcome out;
    const GridSpec g = grid_of(16);
    double worst_pairing = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SpectralField u = random_full_band(g, 17 * seed + 1, true);
        const SpectralField v = random_full_band(g, 17 * seed + 9, true);
        const SpectralField b = bilinear_B(u, v);
        const double scale =
            std::sqrt(sobolev_norm_sq(b, 0.0)) * std::sqrt(sobolev_norm_sq(v, 0.0));
        worst_pairing = std::max(worst_pairing, std::abs(inner_product(b, v, 0.0)) / scale);
    }
    out.note("worst pairing defect " + fmt(worst_pairing));
    if (worst_pairing > 1e-10) out.fail("advected-energy pairing exceeds 1e-10");

    const GridSpec g8 = grid_of(8);
    double worst_conv = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SpectralField u = random_full_band(g8, 31 * seed + 2, true);
        const SpectralField v = random_full_band(g8, 31 * seed + 11, true);
        const SpectralField fast = bilinear_B(u, v);
        const SpectralField slow = convolution_oracle(u, v);
        worst_conv = std::max(worst_conv, max_diff(fast, slow) /
                                              std::max(slow.max_abs_coefficient(), 1e-300));
    }
    out.note("worst oracle mismatch " + fmt(worst_conv));
    if (worst_conv > 1e-12) out.fail("convolution oracle mismatch exceeds 1e-12");
    return out;
}

// ---------------------------------------------------------------------------
// 3. inequality suite

Outcome criterion_inequalities() {
    Outcome out;
    const GridSpec g = grid_of(32);
    long violations = 0;
    const double slack = 1e-12;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SpectralField u = random_full_band(g, seed + 300, false);
        const double n0 = sobolev_norm_sq(u, 0.0);
        const double n1 = sobolev_norm_sq(u, 1.0);
        const double n2 = sobolev_norm_sq(u, 2.0);
        if (n0 > n1 / g.lambda1() * (1 + slack)) ++violations;
        if (n1 > n2 / g.lambda1() * (1 + slack)) ++violations;
        for (int N : {2, 4, 8}) {
            SpectralField tail = low_mode_project(u, N);
            tail -= u;
            if (sobolev_norm_sq(tail, 0.0) > n1 / (g.lambda1() * N * N) * (1 + slack))
                ++violations;
        }
        for (double alpha_sq : {0.04, 0.31, 2.0}) {
            const SpectralField h = helmholtz_inverse(u, alpha_sq);
            const double hn = sobolev_norm_sq(h, 0.0);
            if (hn > n0 * (1 + slack)) ++violations;
            const double dual = sobolev_norm_sq(u, -2.0);
            if (hn > dual / (alpha_sq * alpha_sq) * (1 + slack)) ++violations;
        }
    }
    out.note("0 expected violations; counted " + std::to_string(violations));
    if (violations != 0) out.fail("inequality violations detected");
    return out;
}

// ---------------------------------------------------------------------------
// 4. energy envelopes over five forced runs

Outcome criterion_envelopes() {
    Outcome out;
    long violations = 0;
    const double T = 20.0, dt = 0.025;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg = acceptance_reference();
        cfg.seed = seed;
        cfg.dt = dt;
        const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
        const SpectralField u0 =
            build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);
        const BoundsEnvelope env =
            make_envelope(u0, cfg.schedule.alpha0, cfg.schedule.alpha1, cfg.schedule.c_gn,
                          sys.forcing.sup_norm, cfg.physics.nu, cfg.grid.lambda1());

        NudgedState obs_state;
        obs_state.w = SpectralField::zero(cfg.grid);
        obs_state.w.set_divergence_free(true);
        obs_state.beta_sq = cfg.schedule.beta1_sq;
        obs_state.eta = cfg.schedule.eta;
        obs_state.obs_cutoff = cfg.schedule.n_obs;

        const double alpha = cfg.physics.alpha;
        const double w0n = sobolev_norm_sq(obs_state.w, 0.0);
        const double w0g = sobolev_norm_sq(obs_state.w, 1.0);
        SpectralField u = u0;
        const long steps = std::lround(T / dt);
        for (long k = 0; k <= steps; ++k) {
            const double t = k * dt;
            StepWithRhs sr;
            if (k < steps)
                sr = imex_step_with_rhs(u, dt, sys.dynamics(), nullptr, nullptr);
            else
                sr.rhs = rhs_truth(u, sys);
            const SpectralField& ut = sr.rhs;
            const double nu0 = sobolev_norm_sq(u, 0.0);
            const double nu1 = sobolev_norm_sq(u, 1.0);
            const double nu2 = sobolev_norm_sq(u, 2.0);
            const double nut = std::sqrt(sobolev_norm_sq(ut, 0.0));
            const double a2 = alpha * alpha;
            if (nu0 + a2 * nu1 > env.energy_bound_sq(t) * (1 + 1e-10)) ++violations;
            if (nu1 + a2 * nu2 > env.gradient_bound_sq(t) * (1 + 1e-10)) ++violations;
            if (nut > env.rate_bound(t) * (1 + 1e-10)) ++violations;
            const double wn = sobolev_norm_sq(obs_state.w, 0.0);
            const double wg = sobolev_norm_sq(obs_state.w, 1.0);
            const double m4 = eval_M4_sq(t, obs_state.eta, obs_state.beta_sq, w0n, w0g,
                                         sys.forcing.sup_norm, env.energy_bound_sq(0.0),
                                         cfg.schedule.alpha0);
            if (wn + obs_state.beta_sq * wg > m4 * (1 + 1e-10)) ++violations;
            if (k == steps) break;
            const SpectralField obs_now = low_mode_project(u, obs_state.obs_cutoff);
            const SpectralField obs_next = low_mode_project(sr.next, obs_state.obs_cutoff);
            obs_state = step_nudged(std::move(obs_state), dt, obs_now, obs_next, sys.forcing,
                                    cfg.physics.nu);
            u = std::move(sr.next);
        }
    }
    out.note("5 runs, horizon 20, all four envelope families; violations " +
             std::to_string(violations));
    if (violations != 0) out.fail("envelope violations detected");
    return out;
}

// ---------------------------------------------------------------------------
// 5. synchronization with the true parameter

Outcome criterion_synchronization() {
    Outcome out;
    ExperimentConfig cfg = acceptance_reference();
    const double eta = 20.0;
    const int N = 8;
    const double dt = 0.02, T = 4.0;
    const TruthSystem sys = TruthSystem::make(cfg.grid, cfg.physics);
    const SpectralField u0 = build_initial(cfg.initial, cfg.grid, cfg.physics.forcing, cfg.seed);

    NudgedState st;
    st.w = SpectralField::zero(cfg.grid);
    st.w.set_divergence_free(true);
    st.beta_sq = cfg.physics.alpha * cfg.physics.alpha; // beta = alpha
    st.eta = eta;
    st.obs_cutoff = N;

    SpectralField u = u0;
    std::vector<double> ts, lyap;
    const long steps = std::lround(T / dt);
    for (long k = 0; k <= steps; ++k) {
        const double t = k * dt;
        const auto [a, b] = sync_error(st.w, u, st.beta_sq);
        ts.push_back(t);
        lyap.push_back(a + b);
        if (k == steps) break;
        const SpectralField obs_now = low_mode_project(u, N);
        const SpectralField u_next = step_truth(u, dt, sys);
        const SpectralField obs_next = low_mode_project(u_next, N);
        st = step_nudged(std::move(st), dt, obs_now, obs_next, sys.forcing, cfg.physics.nu);
        u = u_next;
    }

    const double init = lyap.front();
    const double floor_target = 1e-10 * init;
    long floor_idx = -1;
    for (std::size_t k = 0; k < lyap.size(); ++k)
        if (lyap[k] <= floor_target) {
            floor_idx = static_cast<long>(k);
            break;
        }
    if (floor_idx < 0) {
        out.fail("floor 1e-10 x initial never reached");
        return out;
    }
    out.note("floor reached at t=" + fmt(ts[floor_idx]));

    // monotone decay after the transient, until the floor
    const double t_transient = 0.2;
    long breaks = 0;
    for (long k = 1; k <= floor_idx; ++k)
        if (ts[k] > t_transient && lyap[k] > lyap[k - 1] * (1 + 1e-9)) ++breaks;
    if (breaks != 0) out.fail(std::to_string(breaks) + " monotonicity breaks before the floor");

    const double rate = fit_log_linear_rate(ts, lyap, t_transient, ts[floor_idx]);
    out.note("fitted rate " + fmt(rate) + " vs bound " + fmt(-eta / 4.0));
    if (!(rate <= -eta / 4.0)) out.fail("decay slower than -eta/4");
    return out;
}

// ---------------------------------------------------------------------------
// 6. parameter recovery (headline)

Outcome criterion_recovery() {
    Outcome out;
    ExperimentConfig cfg = acceptance_reference();
    const RunReport r = run_twin_experiment(cfg);
    const double a2 = r.alpha_true_sq;

    if (r.iterations.size() < 6) {
        out.fail("fewer than 6 iterations completed");
        return out;
    }
    std::vector<double> errors;
    for (const auto& it : r.iterations) errors.push_back(std::abs(it.beta_n_sq - a2));
    errors.push_back(std::abs(r.beta_final_sq - a2));

    bool mono = true;
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > errors[i - 1]) mono = false;
    if (!mono) out.fail("parameter error not non-increasing");

    const double ratio = fit_geometric(errors).ratio;
    out.note("contraction ratio " + fmt(ratio));
    if (!(ratio <= 0.75)) out.fail("contraction ratio exceeds 0.75");

    const double final_rel = errors.back() / a2;
    out.note("final relative error " + fmt(final_rel));
    if (!(final_rel <= 1e-3)) out.fail("final relative error exceeds 1e-3");

    std::vector<double> combos;
    for (const auto& it : r.iterations)
        if (std::isfinite(it.g_norm_combo)) combos.push_back(it.g_norm_combo);
    const double sync_ratio = fit_geometric(combos).ratio;
    out.note("observer-error ratio " + fmt(sync_ratio));
    if (!(sync_ratio <= 0.75)) out.fail("observer-error ratio exceeds 0.75");
    return out;
}

// ---------------------------------------------------------------------------
// 7. fixed point

Outcome criterion_fixed_point() {
    Outcome out;
    ExperimentConfig cfg = acceptance_reference();
    cfg.schedule.beta1_sq = cfg.physics.alpha * cfg.physics.alpha;
    cfg.schedule.max_iters = 5;
    cfg.observer_starts_at_truth = true;
    const RunReport r = run_twin_experiment(cfg);
    if (r.iterations.size() != 5) {
        out.fail("expected 5 iterations, got " + std::to_string(r.iterations.size()));
        return out;
    }
    double worst = 0;
    for (const auto& it : r.iterations)
        worst = std::max(worst, std::abs(it.beta_np1_sq - cfg.schedule.beta1_sq));
    out.note("largest |update| " + fmt(worst));
    if (worst > 1e-10) out.fail("update exceeds 1e-10");
    return out;
}

// ---------------------------------------------------------------------------
// 8. degenerate halt (library + CLI exit code)

Outcome criterion_degenerate_halt() {
    Outcome out;
    ExperimentConfig cfg;
    cfg.grid = grid_of(16);
    cfg.physics.nu = 0.1;
    cfg.physics.alpha = 0.25;
    cfg.physics.forcing.kind = ForcingSpec::Kind::none;
    cfg.physics.forcing.amplitude = 0.5;
    cfg.schedule.eta = 10.0;
    cfg.schedule.n_obs = 6;
    cfg.schedule.n_tilde = 6;
    cfg.schedule.settle = 0.2;
    cfg.schedule.window = 0.4;
    cfg.schedule.max_iters = 4;
    cfg.schedule.t_final = 20.0;
    cfg.dt = 0.02;
    cfg.initial = default_initial(cfg.physics.forcing);

    const RunReport r = run_twin_experiment(cfg);
    if (r.halt != LoopHalt::Degenerate) out.fail("halt is " + to_string(r.halt));
    if (r.iterations.size() != 1) out.fail("expected exactly one iteration record");
    if (!r.iterations.empty()) {
        const auto& it = r.iterations.front();
        if (it.status != IterationStatus::HaltedDegenerate)
            out.fail("record status is " + to_string(it.status));
        out.note("delta_1 = " + fmt(it.delta_n));
        if (it.delta_n > 1e-20) out.fail("delta_1 above threshold");
        if (it.beta_np1_sq != cfg.schedule.beta1_sq) out.fail("beta changed on a degenerate halt");
    }

    // CLI contract: exit code 2
    const char* cli = std::getenv("BARDINA_CLI");
    if (!cli) {
        out.fail("BARDINA_CLI not set; cannot exercise the CLI exit code");
        return out;
    }
    const fs::path tmp =
        fs::temp_directory_path() / ("bardina_acc8_" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    const fs::path cfg_path = tmp / "degenerate.cfg";
    {
        std::ofstream os(cfg_path);
        os << "grid.n_grid = 16\n"
           << "forcing.kind = none\n"
           << "forcing.amplitude = 0.5\n"
           << "recovery.eta = 10\n"
           << "recovery.N_obs = 6\n"
           << "recovery.N_tilde = 6\n"
           << "time.settle = 0.2\n"
           << "time.window = 0.4\n"
           << "time.dt = 0.02\n"
           << "time.max_iters = 4\n"
           << "output.dir = " << (tmp / "out").string() << "\n";
    }
    const std::string cmd = std::string("\"") + cli + "\" recover \"" + cfg_path.string() +
                            "\" > \"" + (tmp / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    out.note("cli exit code " + std::to_string(code));
    if (code != 2) out.fail("expected exit code 2");
    std::error_code ec;
    fs::remove_all(tmp, ec);
    return out;
}

// ---------------------------------------------------------------------------
// 9. condition checker vs an independently coded evaluation

struct FrozenInstance {
    double nu = 0.07, lambda1 = 1.3, c = 1.2;
    double alpha0 = 0.12, alpha1 = 0.55, eps = 0.009;
    double M_A = 0.9, M_B = 1.7, M_C = 3.1, f_sup = 0.45;
    double beta_sq = 0.05, eta = 18.5, zeta = 0.0375;
    int N = 8, N_tilde = 6;
    double t_n = 0.4, t_hat = 0.85, t_next = 1.45;
    double w_n_sq = 0.8, w_g_sq = 2.3;
};

// Longhand evaluation, written independently of the library formulas.
std::array<double, 8> independent_margins(const FrozenInstance& in, int n) {
    auto sq = [](double v) { return v * v; };
    const double decay_tn = std::exp(-in.nu * in.lambda1 * in.t_n);
    const double decay_that = std::exp(-in.nu * in.lambda1 * in.t_hat);
    const double f2 = sq(in.f_sup);
    const double M1sq_tn = decay_tn * (sq(in.M_A) + sq(in.alpha1) * sq(in.M_B)) +
                           f2 / (sq(in.lambda1) * sq(in.nu));
    const double M1sq_that = decay_that * (sq(in.M_A) + sq(in.alpha1) * sq(in.M_B)) +
                             f2 / (sq(in.lambda1) * sq(in.nu));
    const double c4 = sq(sq(in.c));
    const double a0_5 = std::pow(in.alpha0, 5.0);
    const double init2 = sq(in.M_A) + sq(in.alpha1) * sq(in.M_B);
    const double M2sq_tn =
        decay_tn * (sq(in.M_B) + sq(in.alpha1) * sq(in.M_C)) +
        2.0 * c4 / (a0_5 * sq(in.nu) * in.lambda1) * decay_tn * sq(init2) +
        f2 / (sq(in.nu) * in.lambda1) +
        2.0 * c4 * sq(f2) / (a0_5 * std::pow(in.nu, 6.0) * std::pow(in.lambda1, 5.0));
    const double M2_tn = std::sqrt(M2sq_tn);
    const double M3_tn =
        in.nu / in.alpha0 * M2_tn +
        sq(in.c) / (std::pow(in.alpha0, 4.0) * std::pow(in.lambda1, 0.75)) * M1sq_tn + in.f_sup;
    auto M4sq = [&](double t) {
        return std::exp(-in.eta / 2.0 * (t - in.t_n)) * (in.w_n_sq + in.beta_sq * in.w_g_sq) +
               4.0 / sq(in.eta) * f2 + 2.0 * (2.0 + in.beta_sq / sq(in.alpha0)) * M1sq_tn;
    };
    const double beta = std::sqrt(in.beta_sq);
    const double bracket = std::sqrt(M1sq_that) / in.alpha0 + std::sqrt(M4sq(in.t_hat)) / beta;
    const double maxfac = std::max(1.0, (std::sqrt(in.eps) + in.alpha1) / beta);
    const double chi = n == 1 ? 1.0 : 0.0;

    std::array<double, 8> m{};
    m[0] = double(in.N) - double(in.N_tilde);
    m[1] = in.nu * in.lambda1 / 2.0 - in.eta / sq(double(in.N));
    m[2] = in.eta -
           27.0 * c4 * sq(M1sq_tn) / (8.0 * std::pow(in.nu, 3.0) * std::pow(in.alpha0, 4.0));
    m[3] = std::sqrt(in.eta) * in.nu * std::pow(in.lambda1, 0.75) -
           maxfac * (M3_tn / std::sqrt(in.nu) + std::sqrt(in.nu) / in.alpha0 * M2_tn) * 16.0 / beta;
    m[4] = in.eps / (4.0 * std::abs(sq(in.alpha1) - sq(in.alpha0)) * chi + 4.0 * in.eps) -
           8.0 * sq(in.c) / (std::pow(in.lambda1, 0.25) * std::sqrt(in.eta) * in.beta_sq *
                             std::sqrt(in.zeta) * std::sqrt(double(in.N))) *
               bracket * (std::sqrt(in.nu) * M2_tn / in.alpha0 + M3_tn / std::sqrt(in.nu));
    m[5] = 0.125 - maxfac * std::exp(-in.eta / 4.0 * (in.t_next - in.t_n));
    m[6] = 1.0 / (4.0 * in.nu * std::sqrt(in.lambda1)) -
           4.0 * sq(in.c) / (std::sqrt(in.zeta) * std::sqrt(double(in.N)) * beta) * bracket *
               std::exp(-in.eta / 4.0 * (in.t_hat - in.t_n));
    m[7] = in.eps / 2.0 -
           8.0 * sq(in.c) / (std::pow(in.lambda1, 0.25) * beta * std::sqrt(in.zeta) *
                             std::sqrt(double(in.N))) *
               bracket * std::exp(-in.eta / 4.0 * (in.t_hat - in.t_n)) *
               ((1.0 + beta / in.alpha0) * std::sqrt(M1sq_tn) + std::sqrt(M4sq(in.t_n)));
    return m;
}

Outcome criterion_condition_checker() {
    Outcome out;
    const FrozenInstance in;
    BoundsEnvelope env;
    env.M_A = in.M_A;
    env.M_B = in.M_B;
    env.M_C = in.M_C;
    env.alpha0 = in.alpha0;
    env.alpha1 = in.alpha1;
    env.c_gn = in.c;
    env.f_sup = in.f_sup;
    env.nu = in.nu;
    env.lambda1 = in.lambda1;
    RecoverySchedule sched;
    sched.alpha0 = in.alpha0;
    sched.alpha1 = in.alpha1;
    sched.beta1_sq = in.beta_sq;
    sched.epsilon = in.eps;

    double worst = 0;
    for (int n : {1, 2, 5}) {
        const ConditionReport rep =
            check_conditions(n, in.eta, in.N, in.N_tilde, env, sched, in.t_n, in.t_hat,
                             in.t_next, in.zeta, in.beta_sq, in.w_n_sq, in.w_g_sq);
        const auto expect = independent_margins(in, n);
        for (int i = 0; i < 8; ++i)
            worst = std::max(worst, rel_err(rep.checks[i].margin, expect[i]));
    }
    out.note("worst margin mismatch " + fmt(worst));
    if (worst > 1e-12) out.fail("margins disagree with the independent evaluation");

    // monotonicity spot checks
    const ConditionReport base =
        check_conditions(1, in.eta, in.N, in.N_tilde, env, sched, in.t_n, in.t_hat, in.t_next,
                         in.zeta, in.beta_sq, in.w_n_sq, in.w_g_sq);
    const ConditionReport up_eta =
        check_conditions(1, 2.0 * in.eta, in.N, in.N_tilde, env, sched, in.t_n, in.t_hat,
                         in.t_next, in.zeta, in.beta_sq, in.w_n_sq, in.w_g_sq);
    const ConditionReport up_n =
        check_conditions(1, in.eta, 2 * in.N, in.N_tilde, env, sched, in.t_n, in.t_hat,
                         in.t_next, in.zeta, in.beta_sq, in.w_n_sq, in.w_g_sq);
    const bool mono_ok = up_eta.checks[2].margin > base.checks[2].margin &&
                         up_eta.checks[3].margin > base.checks[3].margin &&
                         up_eta.checks[5].margin > base.checks[5].margin &&
                         up_n.checks[1].margin > base.checks[1].margin &&
                         up_n.checks[4].margin > base.checks[4].margin &&
                         up_n.checks[6].margin > base.checks[6].margin &&
                         up_n.checks[7].margin > base.checks[7].margin;
    if (!mono_ok)
        out.fail("monotone response to eta or N violated");
    else
        out.note("monotone responses hold");
    return out;
}

// ---------------------------------------------------------------------------
// 10. quadrature and scheme consistency of the update

Outcome criterion_quadrature_consistency() {
    Outcome out;
    auto first_update = [&](double dt) {
        ExperimentConfig cfg = acceptance_reference();
        cfg.schedule.max_iters = 1;
        cfg.dt = dt;
        const RunReport r = run_twin_experiment(cfg);
        return r.iterations.at(0).beta_np1_sq;
    };
    const double b1 = first_update(0.02);
    const double b2 = first_update(0.01);
    const double b3 = first_update(0.005);
    const double order = std::log2(std::abs(b1 - b2) / std::abs(b2 - b3));
    out.note("observed order " + fmt(order) + " over dt = 0.02, 0.01, 0.005");
    if (!(order >= 1.8)) out.fail("observed order below 1.8");
    return out;
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "operator identities", 10, criterion_operator_identities},
        {2, "bilinear form", 30, criterion_bilinear},
        {3, "inequality suite", 120, criterion_inequalities},
        {4, "energy envelopes", 300, criterion_envelopes},
        {5, "synchronization decay", 120, criterion_synchronization},
        {6, "parameter recovery", 600, criterion_recovery},
        {7, "fixed point", 300, criterion_fixed_point},
        {8, "degenerate halt", 120, criterion_degenerate_halt},
        {9, "condition checker", 60, criterion_condition_checker},
        {10, "quadrature consistency", 600, criterion_quadrature_consistency},
    };
    return all;
}

bool run_one(const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = c.run();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) out.fail("runtime " + fmt(secs) + "s exceeds budget");
    std::printf("[%s] criterion %d: %s (%.1fs) %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                secs, out.detail.c_str());
    std::fflush(stdout);
    return out.pass;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (arg == "--all")
            only = 0;
        else {
            std::fprintf(stderr, "usage: %s [--all | --criterion K]\n", argv[0]);
            return 1;
        }
    }
    bool all_pass = true;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        all_pass = run_one(c) && all_pass;
    }
    return all_pass ? 0 : 1;
}
