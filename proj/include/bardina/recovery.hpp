#pragma once

#include "bardina/bardina_model.hpp"
#include "bardina/nudging.hpp"
#include "bardina/observation.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bardina {

enum class RecoveryMode { strict, practical };
RecoveryMode recovery_mode_from_string(const std::string& s);
std::string to_string(RecoveryMode m);

/// Per-iteration policy for the parameter-recovery loop.
struct RecoverySchedule {
    double alpha0 = 0.1;  // prior lower bound on alpha
    double alpha1 = 0.5;  // prior upper bound on alpha
    double beta1_sq = 0.04;
    double epsilon = 0.005; // target gap, 0 < epsilon < alpha0^2
    RecoveryMode mode = RecoveryMode::practical;

    double eta = 20.0; // gain (practical mode; reference value for window policy)
    int n_obs = 8;     // N_n (practical mode)
    int n_tilde = 0;   // window-search cutoff; 0 means "same as n_obs"
    double c_gn = 1.0;

    double settle = 0.0; // t_hat_n - t_n; <= 0 selects the 5/eta policy
    double window = 0.5; // t_{n+1} - t_hat_n
    double t_final = 20.0;
    int max_iters = 8;

    // Degenerate-window policy: the window is extended by doubling up to this
    // many times before the iteration is declared degenerate.
    int window_extension_rounds = 3;
    double degeneracy_rel = 1e-12;

    // Strict-mode search ladders.
    double strict_eta_min = 1.0;
    int strict_eta_doublings = 60;
    long strict_n_max = 1L << 24;

    int effective_n_tilde() const { return n_tilde > 0 ? n_tilde : n_obs; }
    double effective_settle() const { return settle > 0 ? settle : 5.0 / eta; }
    void validate() const;
};

/// One inequality of the admissibility system; margin = rhs - lhs as written,
/// satisfied iff margin >= 0.
struct ConditionMargin {
    bool satisfied = false;
    double margin = 0;
    double lhs = 0, rhs = 0;
};

/// The eight admissibility inequalities, in checking order:
///   [0] cutoff_order      : N_tilde_n <= N_n
///   [1] gain_resolution   : eta_n / N_n^2 <= nu lambda1 / 2
///   [2] gain_floor        : 27 c^4 M1^4(t_n) / (8 nu^3 alpha0^4) <= eta_n
///   [3] gain_sync         : transient-kill lower bound on sqrt(eta_n)
///   [4] update_budget     : quadratic-remainder budget vs eps/(4|a1^2-a0^2|chi+4eps)
///   [5] window_decay      : max{1,(sqrt(eps)+alpha1)/beta_n} e^{-eta(t_{n+1}-t_n)/4} <= 1/8
///   [6] settle_decay      : settled-transient budget vs 1/(4 nu lambda1^{1/2})
///   [7] settle_budget     : settled-transient error vs eps/2
struct ConditionReport {
    std::array<ConditionMargin, 8> checks{};

    bool all_satisfied() const;
    std::string passed_string() const; // "01..." in checking order
    static const std::array<const char*, 8>& names();
};

enum class IterationStatus { Updated, HaltedDegenerate, HaltedFinalTime };
std::string to_string(IterationStatus s);

/// Audit record for one recovery iteration.
struct IterationRecord {
    int n = 0;
    double t_n = 0, t_hat_n = 0, t_np1 = 0;
    double eta_n = 0;
    int N_n = 0, N_tilde_n = 0;
    double beta_n_sq = 0, beta_np1_sq = 0;
    double delta_n = 0, zeta_n = 0;
    double g_norm_combo = std::numeric_limits<double>::quiet_NaN(); // ||g(t_n)|| + beta ||grad g(t_n)||, twin mode
    ConditionReport conditions;
    IterationStatus status = IterationStatus::Updated;
    bool positivity_breach = false; // updated beta^2 <= 0 (condition-regime breach; never clamped)
};

/// Window integral delta_n = integral_{t_hat}^{t_next} ||grad P_N(u_t + nu A u)||^2 ds
/// by composite trapezoid on the stream's node grid (u_t - nu Lap u = u_t + nu A u).
double delta_n(const ObservationStream& obs, int cutoff, double t_hat, double t_next, double nu);

/// Same integral with the window-search cutoff, divided by the window length.
double zeta_n(const ObservationStream& obs, int cutoff, double t_hat, double t_next, double nu);

/// One quadrature node of the update window.
struct WindowSample {
    double t = 0;
    SpectralField w;      // full observer state
    SpectralField w_t;    // analytic d/dt w
    SpectralField obs_u;  // P_N u
    SpectralField obs_ut; // P_N u_t
};

/// The update integrand at one instant: with g = P_N w - P_N u,
/// gdot = P_N w_t - P_N u_t and psi = P_N(u_t + nu A u),
///
///   I = (gdot, psi) + beta^2 (grad gdot, grad psi)
///     + nu (grad g, grad psi) + nu beta^2 (grad A g, grad psi)
///     + (B(w,g) + B(g,w) - B(g,g), psi)          [cancellation-free split]
///     + eta (g, psi) + beta^2 eta (grad g, grad psi).
double beta_update_integrand(const WindowSample& s, double beta_sq, double eta, int cutoff,
                             double nu);

/// beta_{n+1}^2 = beta_n^2 + (trapezoid of the integrand over the window)/delta.
/// Requires delta above the degeneracy threshold.
double update_beta(double beta_n_sq, std::span<const WindowSample> window, double eta, int cutoff,
                   double nu, double delta);

struct EnvelopeGains {
    double M1_sq_tn = 0, M2_tn = 0, M3_tn = 0, M1_sq_that = 0;
    double M4_sq_that = 0, M4_sq_tn = 0;
};

/// Evaluates all eight inequalities verbatim (chi(1)=1, chi(n>=2)=0); reports
/// margins, never throws.
ConditionReport check_conditions(int n, double eta, int N, int N_tilde,
                                 const BoundsEnvelope& env, const RecoverySchedule& sched,
                                 double t_n, double t_hat, double t_next, double zeta,
                                 double beta_sq, double w_norm_sq_at_tn,
                                 double w_grad_norm_sq_at_tn);

struct ParameterChoice {
    bool feasible = false;
    double eta = 0;
    int n_obs = 0;
    ConditionReport report;
};

/// Practical mode returns the configured pair with its audit report; strict
/// mode scans geometric ladders (N outer, eta inner, both ascending) and
/// returns the first pair satisfying every condition, else infeasible.
ParameterChoice select_parameters(int n, const RecoverySchedule& sched, const BoundsEnvelope& env,
                                  double t_n, double t_hat, double t_next, double zeta,
                                  double beta_sq, double w_norm_sq_at_tn,
                                  double w_grad_norm_sq_at_tn);

/// Truth-side diagnostic hooks. The loop itself never sees full truth fields;
/// a monitor may compute twin-only quantities from the observer states handed
/// to it and merge them into reports afterwards.
class RecoveryMonitor {
public:
    virtual ~RecoveryMonitor() = default;
    /// Called at every solver node with the observer state.
    virtual void on_node(int iter, double t, const SpectralField& w, double beta_sq) {
        (void)iter, (void)t, (void)w, (void)beta_sq;
    }
    /// Called at update-window nodes (instead of on_node).
    virtual void on_window_node(int iter, double t, const SpectralField& w, double beta_sq) {
        on_node(iter, t, w, beta_sq);
    }
    /// ||g(t)|| + beta ||grad g(t)|| when the truth is known; nullopt otherwise.
    virtual std::optional<double> g_norm_combo(double t, const SpectralField& w, double beta_sq) {
        (void)t, (void)w, (void)beta_sq;
        return std::nullopt;
    }
};

enum class LoopHalt { FinalTime, Degenerate, StrictInfeasible, PositivityBreach };
std::string to_string(LoopHalt h);

struct RecoveryResult {
    std::vector<IterationRecord> iterations;
    LoopHalt halt = LoopHalt::FinalTime;
    double beta_final_sq = 0;
};

/// The full recursion: per iteration locate an admissible window, choose
/// (eta_n, N_n), integrate the observer over [t_n, t_{n+1}] with
/// w_n(t_n) = w_{n-1}(t_n), accumulate the update integrand over
/// [t_hat_n, t_{n+1}] and apply the beta update. Halts when no admissible
/// window exists (degenerate), at t_final, or after max_iters.
RecoveryResult recovery_loop(ObservationStream& obs, const RecoverySchedule& sched,
                             const BoundsEnvelope& env, const Forcing& f, double nu,
                             const SpectralField& w0, double dt,
                             RecoveryMonitor* monitor = nullptr);

} // namespace bardina
