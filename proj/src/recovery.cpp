#include "bardina/recovery.hpp"

#include "bardina/bilinear.hpp"
#include "bardina/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bardina {

RecoveryMode recovery_mode_from_string(const std::string& s) {
    if (s == "strict") return RecoveryMode::strict;
    if (s == "practical") return RecoveryMode::practical;
    throw std::invalid_argument("recovery.mode: unknown value '" + s + "'");
}

std::string to_string(RecoveryMode m) {
    return m == RecoveryMode::strict ? "strict" : "practical";
}

std::string to_string(IterationStatus s) {
    switch (s) {
    case IterationStatus::Updated: return "Updated";
    case IterationStatus::HaltedDegenerate: return "HaltedDegenerate";
    case IterationStatus::HaltedFinalTime: return "HaltedFinalTime";
    }
    return "?";
}

std::string to_string(LoopHalt h) {
    switch (h) {
    case LoopHalt::FinalTime: return "FinalTime";
    case LoopHalt::Degenerate: return "Degenerate";
    case LoopHalt::StrictInfeasible: return "StrictInfeasible";
    case LoopHalt::PositivityBreach: return "PositivityBreach";
    }
    return "?";
}

void RecoverySchedule::validate() const {
    if (!(alpha0 > 0)) throw std::invalid_argument("recovery.alpha0 must be positive");
    if (!(alpha1 >= alpha0))
        throw std::invalid_argument("recovery.alpha1 must satisfy alpha1 >= alpha0");
    if (!(beta1_sq >= alpha0 * alpha0 && beta1_sq <= alpha1 * alpha1))
        throw std::invalid_argument("recovery.beta1_sq must lie in [alpha0^2, alpha1^2]");
    if (!(epsilon > 0 && epsilon < alpha0 * alpha0))
        throw std::invalid_argument("recovery.epsilon must satisfy 0 < epsilon < alpha0^2");
    if (!(eta > 0)) throw std::invalid_argument("recovery.eta must be positive");
    if (n_obs < 1) throw std::invalid_argument("recovery.N_obs must be >= 1");
    if (n_tilde > n_obs)
        throw std::invalid_argument("recovery.N_tilde must satisfy N_tilde <= N_obs");
    if (!(c_gn > 0)) throw std::invalid_argument("recovery.c_gn must be positive");
    if (!(window > 0)) throw std::invalid_argument("time.window must be positive");
    if (settle < 0) throw std::invalid_argument("time.settle must be non-negative");
    if (!(t_final > 0)) throw std::invalid_argument("time.T_final must be positive");
    if (max_iters < 1) throw std::invalid_argument("time.max_iters must be >= 1");
}

bool ConditionReport::all_satisfied() const {
    for (const auto& c : checks)
        if (!c.satisfied) return false;
    return true;
}

std::string ConditionReport::passed_string() const {
    std::string s(checks.size(), '0');
    for (std::size_t i = 0; i < checks.size(); ++i)
        if (checks[i].satisfied) s[i] = '1';
    return s;
}

const std::array<const char*, 8>& ConditionReport::names() {
    static const std::array<const char*, 8> names = {
        "cutoff_order",   "gain_resolution", "gain_floor",   "gain_sync",
        "update_budget",  "window_decay",    "settle_decay", "settle_budget",
    };
    return names;
}

// ---------------------------------------------------------------------------
// window quadratures

namespace {

struct WindowQuadrature {
    double integral = 0;
    double max_node = 0;
    double length = 0;
    long nodes = 0;
};

long stream_node(const ObservationStream& obs, double t, const char* who) {
    const double x = (t - obs.t_begin()) / obs.dt();
    const long node = std::lround(x);
    if (std::abs(x - static_cast<double>(node)) > 1e-6)
        throw std::invalid_argument(std::string(who) +
                                    ": window endpoints must lie on the observation grid");
    return node;
}

double trapezoid(std::span<const double> t, std::span<const double> v) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        s += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
    return s;
}

// integral of ||grad P_N(u_t + nu A u)||^2 over [t_hat, t_next] on the stream grid
WindowQuadrature grad_rate_quadrature(const ObservationStream& obs, int cutoff, double t_hat,
                                      double t_next, double nu) {
    if (!(t_next > t_hat))
        throw std::invalid_argument("window quadrature: empty window");
    const long k0 = stream_node(obs, t_hat, "window quadrature");
    const long k1 = stream_node(obs, t_next, "window quadrature");
    if (k1 <= k0) throw std::invalid_argument("window quadrature: window shorter than one node");

    WindowQuadrature q;
    q.length = t_next - t_hat;
    q.nodes = k1 - k0 + 1;
    std::vector<double> ts, vs;
    ts.reserve(q.nodes);
    vs.reserve(q.nodes);
    for (long k = k0; k <= k1; ++k) {
        const double t = obs.t_begin() + static_cast<double>(k) * obs.dt();
        SpectralField field = obs.velocity_rate(t, cutoff);
        field.axpy(nu, apply_A(obs.velocity(t, cutoff)));
        const double v = sobolev_norm_sq(field, 1.0);
        ts.push_back(t);
        vs.push_back(v);
        q.max_node = std::max(q.max_node, v);
    }
    q.integral = trapezoid(ts, vs);
    return q;
}

double degeneracy_threshold(const WindowQuadrature& q, double rel) {
    return rel * q.length * std::max(1.0, q.max_node);
}

} // namespace

double delta_n(const ObservationStream& obs, int cutoff, double t_hat, double t_next, double nu) {
    return grad_rate_quadrature(obs, cutoff, t_hat, t_next, nu).integral;
}

double zeta_n(const ObservationStream& obs, int cutoff, double t_hat, double t_next, double nu) {
    const auto q = grad_rate_quadrature(obs, cutoff, t_hat, t_next, nu);
    return q.integral / q.length;
}

// ---------------------------------------------------------------------------
// beta update

double beta_update_integrand(const WindowSample& s, double beta_sq, double eta, int cutoff,
                             double nu) {
    // g = P_N w - P_N u and its analytic rate; observations are already low-mode
    SpectralField g = low_mode_project(s.w, cutoff);
    g -= s.obs_u;
    SpectralField gdot = low_mode_project(s.w_t, cutoff);
    gdot -= s.obs_ut;

    // psi = P_N(u_t + nu A u); note u_t - nu Lap u = u_t + nu A u
    SpectralField psi = s.obs_ut;
    psi.axpy(nu, apply_A(s.obs_u));

    double value = inner_product(gdot, psi, 0.0);
    value += beta_sq * inner_product(gdot, psi, 1.0);
    value += nu * inner_product(g, psi, 1.0);
    value += nu * beta_sq * inner_product(g, psi, 2.0); // (grad A g, grad psi)
    value += eta * inner_product(g, psi, 0.0);
    value += beta_sq * eta * inner_product(g, psi, 1.0);

    // nonlinear difference in the cancellation-free split
    //   B(w,w) - B(w - g, w - g) = B(w,g) + B(g,w) - B(g,g)
    SpectralField bsum = bilinear_B(s.w, g);
    bsum += bilinear_B(g, s.w);
    bsum -= bilinear_B(g, g);
    value += inner_product(bsum, psi, 0.0);
    return value;
}

double update_beta(double beta_n_sq, std::span<const WindowSample> window, double eta, int cutoff,
                   double nu, double delta) {
    if (window.size() < 2)
        throw std::invalid_argument("update_beta: need at least two quadrature nodes");
    if (!(delta > 0)) throw std::invalid_argument("update_beta: degenerate delta");
    std::vector<double> ts, vs;
    ts.reserve(window.size());
    vs.reserve(window.size());
    for (const auto& s : window) {
        ts.push_back(s.t);
        vs.push_back(beta_update_integrand(s, beta_n_sq, eta, cutoff, nu));
    }
    return beta_n_sq + trapezoid(ts, vs) / delta;
}

// ---------------------------------------------------------------------------
// admissibility conditions

ConditionReport check_conditions(int n, double eta, int N, int N_tilde,
                                 const BoundsEnvelope& env, const RecoverySchedule& sched,
                                 double t_n, double t_hat, double t_next, double zeta,
                                 double beta_sq, double w_norm_sq_at_tn,
                                 double w_grad_norm_sq_at_tn) {
    ConditionReport rep;
    const double eps = sched.epsilon;
    const double nu = env.nu;
    const double lam = env.lambda1;
    const double c2 = env.c_gn * env.c_gn;
    const double a0 = env.alpha0;
    const double a1 = env.alpha1;
    const double beta = std::sqrt(beta_sq);
    const double chi = n == 1 ? 1.0 : 0.0;

    const double M1_tn = env.M1(t_n);
    const double M2_tn = env.M2(t_n);
    const double M3_tn = env.M3(t_n);
    const double M1_that = env.M1(t_hat);
    const double M4_that = std::sqrt(eval_M4_sq(t_hat - t_n, eta, beta_sq, w_norm_sq_at_tn,
                                                w_grad_norm_sq_at_tn, env.f_sup,
                                                env.energy_bound_sq(t_n), a0));
    const double M4_tn = std::sqrt(eval_M4_sq(0.0, eta, beta_sq, w_norm_sq_at_tn,
                                              w_grad_norm_sq_at_tn, env.f_sup,
                                              env.energy_bound_sq(t_n), a0));

    const double bracket = M1_that / a0 + M4_that / beta;
    const double maxfac = std::max(1.0, (std::sqrt(eps) + a1) / beta);
    const double sqrt_zeta_N = std::sqrt(zeta) * std::sqrt(double(N));

    auto set = [&](int i, double lhs, double rhs) {
        rep.checks[i].lhs = lhs;
        rep.checks[i].rhs = rhs;
        rep.checks[i].margin = rhs - lhs;
        rep.checks[i].satisfied = std::isfinite(lhs) && rep.checks[i].margin >= 0;
    };

    // N_tilde <= N
    set(0, double(N_tilde), double(N));
    // eta / N^2 <= nu lambda1 / 2
    set(1, eta / (double(N) * N), 0.5 * nu * lam);
    // 27 c^4 M1^4(t_n) / (8 nu^3 alpha0^4) <= eta
    set(2, 27.0 * c2 * c2 * std::pow(M1_tn, 4) / (8.0 * std::pow(nu, 3) * std::pow(a0, 4)), eta);
    // maxfac ((1/sqrt(nu)) M3 + (sqrt(nu)/alpha0) M2) 16/beta <= sqrt(eta) nu lambda1^{3/4}
    set(3,
        maxfac * (M3_tn / std::sqrt(nu) + std::sqrt(nu) / a0 * M2_tn) * 16.0 / beta,
        std::sqrt(eta) * nu * std::pow(lam, 0.75));
    // quadratic-remainder budget
    set(4,
        8.0 * c2 * std::pow(lam, -0.25) / (std::sqrt(eta) * beta_sq * sqrt_zeta_N) * bracket *
            (std::sqrt(nu) * M2_tn / a0 + M3_tn / std::sqrt(nu)),
        eps / (4.0 * std::abs(a1 * a1 - a0 * a0) * chi + 4.0 * eps));
    // maxfac e^{-eta (t_next - t_n)/4} <= 1/8
    set(5, maxfac * std::exp(-0.25 * eta * (t_next - t_n)), 0.125);
    // settled-transient coefficient <= 1/(4 nu lambda1^{1/2})
    set(6,
        4.0 * c2 / (sqrt_zeta_N * beta) * bracket * std::exp(-0.25 * eta * (t_hat - t_n)),
        1.0 / (4.0 * nu * std::sqrt(lam)));
    // settled-transient error <= eps/2
    set(7,
        8.0 * c2 * std::pow(lam, -0.25) / (beta * sqrt_zeta_N) * bracket *
            std::exp(-0.25 * eta * (t_hat - t_n)) * ((1.0 + beta / a0) * M1_tn + M4_tn),
        0.5 * eps);
    return rep;
}

ParameterChoice select_parameters(int n, const RecoverySchedule& sched, const BoundsEnvelope& env,
                                  double t_n, double t_hat, double t_next, double zeta,
                                  double beta_sq, double w_norm_sq_at_tn,
                                  double w_grad_norm_sq_at_tn) {
    ParameterChoice choice;
    if (sched.mode == RecoveryMode::practical) {
        choice.feasible = true;
        choice.eta = sched.eta;
        choice.n_obs = sched.n_obs;
        choice.report = check_conditions(n, choice.eta, choice.n_obs, sched.effective_n_tilde(),
                                         env, sched, t_n, t_hat, t_next, zeta, beta_sq,
                                         w_norm_sq_at_tn, w_grad_norm_sq_at_tn);
        return choice;
    }
    // strict: ascending ladders, N outer (observation cost first), eta inner
    const int n_tilde = sched.effective_n_tilde();
    for (long N = std::max(1, n_tilde); N <= sched.strict_n_max; N *= 2) {
        double eta = sched.strict_eta_min;
        for (int k = 0; k <= sched.strict_eta_doublings; ++k, eta *= 2) {
            if (eta / (double(N) * N) > 0.5 * env.nu * env.lambda1) break; // resolution bound
            ConditionReport rep =
                check_conditions(n, eta, static_cast<int>(N), n_tilde, env, sched, t_n, t_hat,
                                 t_next, zeta, beta_sq, w_norm_sq_at_tn, w_grad_norm_sq_at_tn);
            if (rep.all_satisfied()) {
                choice.feasible = true;
                choice.eta = eta;
                choice.n_obs = static_cast<int>(N);
                choice.report = rep;
                return choice;
            }
        }
    }
    choice.feasible = false;
    return choice;
}

// ---------------------------------------------------------------------------
// recovery loop

namespace {

[[noreturn]] void rethrow_with_iteration(int n, const std::exception& e) {
    std::ostringstream msg;
    msg << "recovery iteration " << n << ": " << e.what();
    if (dynamic_cast<const BlowUpError*>(&e)) throw BlowUpError(msg.str());
    if (dynamic_cast<const CflError*>(&e)) throw CflError(msg.str());
    throw std::runtime_error(msg.str());
}

} // namespace

RecoveryResult recovery_loop(ObservationStream& obs, const RecoverySchedule& sched,
                             const BoundsEnvelope& env, const Forcing& f, double nu,
                             const SpectralField& w0, double dt, RecoveryMonitor* monitor) {
    sched.validate();
    if (!(dt > 0)) throw std::invalid_argument("recovery_loop: dt must be positive");
    if (!w0.divergence_free())
        throw std::invalid_argument("recovery_loop: w0 must be divergence-free");
    if (sched.n_obs > obs.mode_cap())
        throw std::invalid_argument("recovery_loop: N_obs exceeds the stream's mode cap");

    // settle and window snap to the solver grid; recorded times are node-exact
    const long settle_nodes = std::max(0L, std::lround(sched.effective_settle() / dt));
    const long window_nodes = std::max(1L, std::lround(sched.window / dt));
    const long t_final_node = static_cast<long>(std::floor(sched.t_final / dt + 1e-9));

    RecoveryResult result;
    result.halt = LoopHalt::FinalTime;

    SpectralField w = w0;
    double beta_sq = sched.beta1_sq;
    long node_n = 0;

    for (int n = 1; n <= sched.max_iters; ++n) {
        try {
            const long hat_node = node_n + settle_nodes;
            long next_node = hat_node + window_nodes;
            if (next_node > t_final_node) {
                if (result.iterations.empty())
                    throw std::invalid_argument(
                        "recovery_loop: T_final leaves no room for a single window");
                break;
            }
            const double t_n = node_n * dt;
            const double t_hat = hat_node * dt;

            // locate an admissible window: extend by doubling when degenerate
            const int n_tilde = sched.effective_n_tilde();
            WindowQuadrature zq;
            bool admissible = false;
            for (int round = 0; round <= sched.window_extension_rounds; ++round) {
                const long cand =
                    std::min(hat_node + window_nodes * (1L << round), t_final_node);
                if (cand <= hat_node) break;
                zq = grad_rate_quadrature(obs, n_tilde, t_hat, cand * dt, nu);
                if (zq.integral > degeneracy_threshold(zq, sched.degeneracy_rel)) {
                    next_node = cand;
                    admissible = true;
                    break;
                }
                if (cand == t_final_node) break;
            }

            IterationRecord rec;
            rec.n = n;
            rec.t_n = t_n;
            rec.t_hat_n = t_hat;
            rec.beta_n_sq = beta_sq;
            rec.N_tilde_n = n_tilde;
            if (monitor) {
                if (auto combo = monitor->g_norm_combo(t_n, w, beta_sq)) rec.g_norm_combo = *combo;
            }

            if (!admissible) {
                // the observed dynamics carry no usable signal on this cutoff
                rec.t_np1 = next_node * dt;
                rec.eta_n = sched.eta;
                rec.N_n = sched.n_obs;
                const auto dq =
                    grad_rate_quadrature(obs, sched.n_obs, t_hat, next_node * dt, nu);
                rec.delta_n = dq.integral;
                rec.zeta_n = zq.integral / zq.length;
                rec.beta_np1_sq = beta_sq;
                rec.status = IterationStatus::HaltedDegenerate;
                rec.conditions = check_conditions(
                    n, rec.eta_n, rec.N_n, n_tilde, env, sched, t_n, t_hat, rec.t_np1,
                    rec.zeta_n, beta_sq, sobolev_norm_sq(w, 0.0), sobolev_norm_sq(w, 1.0));
                result.iterations.push_back(std::move(rec));
                result.halt = LoopHalt::Degenerate;
                break;
            }

            const double t_next = next_node * dt;
            const double zeta = zq.integral / zq.length;
            rec.t_np1 = t_next;
            rec.zeta_n = zeta;

            const double w_nsq = sobolev_norm_sq(w, 0.0);
            const double w_gsq = sobolev_norm_sq(w, 1.0);
            const ParameterChoice choice = select_parameters(
                n, sched, env, t_n, t_hat, t_next, zeta, beta_sq, w_nsq, w_gsq);
            if (!choice.feasible) {
                result.halt = LoopHalt::StrictInfeasible;
                break;
            }
            const double eta_n = choice.eta;
            const int N_n = choice.n_obs;
            rec.eta_n = eta_n;
            rec.N_n = N_n;
            rec.conditions = choice.report;
            if (eta_n * dt > 0.5 + 1e-12)
                throw CflError("selected eta violates the explicit feedback bound eta*dt <= 1/2");

            const auto dq = grad_rate_quadrature(obs, N_n, t_hat, t_next, nu);
            rec.delta_n = dq.integral;
            if (dq.integral <= degeneracy_threshold(dq, sched.degeneracy_rel)) {
                rec.beta_np1_sq = beta_sq;
                rec.status = IterationStatus::HaltedDegenerate;
                result.iterations.push_back(std::move(rec));
                result.halt = LoopHalt::Degenerate;
                break;
            }

            DynamicsSpec dyn;
            dyn.nu = nu;
            dyn.alpha_sq = beta_sq;
            dyn.forcing = &f.field;
            dyn.eta = eta_n;
            dyn.obs_cutoff = N_n;

            // settle segment [t_n, t_hat]
            for (long k = node_n; k < hat_node; ++k) {
                const double t = k * dt;
                if (monitor) monitor->on_node(n, t, w, beta_sq);
                const SpectralField obs_now = obs.velocity(t, N_n);
                const SpectralField obs_next = obs.velocity(t + dt, N_n);
                w = imex_step(w, dt, dyn, &obs_now, &obs_next);
            }

            // update window [t_hat, t_next]: accumulate the integrand on the fly
            std::vector<double> ts, vs;
            ts.reserve(next_node - hat_node + 1);
            vs.reserve(next_node - hat_node + 1);
            for (long k = hat_node; k <= next_node; ++k) {
                const double t = k * dt;
                if (monitor) monitor->on_window_node(n, t, w, beta_sq);
                WindowSample sample;
                sample.t = t;
                sample.obs_u = obs.velocity(t, N_n);
                sample.obs_ut = obs.velocity_rate(t, N_n);
                if (k < next_node) {
                    const SpectralField obs_next = obs.velocity(t + dt, N_n);
                    auto step = imex_step_with_rhs(w, dt, dyn, &sample.obs_u, &obs_next);
                    sample.w = std::move(w);
                    sample.w_t = std::move(step.rhs);
                    w = std::move(step.next);
                } else {
                    sample.w_t = evaluate_rhs(w, dyn, &sample.obs_u);
                    sample.w = w;
                }
                ts.push_back(t);
                vs.push_back(beta_update_integrand(sample, beta_sq, eta_n, N_n, nu));
            }

            const double beta_next = beta_sq + trapezoid(ts, vs) / rec.delta_n;
            rec.beta_np1_sq = beta_next;
            rec.status = IterationStatus::Updated;
            rec.positivity_breach = !(beta_next > 0);
            result.iterations.push_back(rec);

            if (rec.positivity_breach) {
                result.halt = LoopHalt::PositivityBreach;
                break;
            }

            beta_sq = beta_next;
            node_n = next_node;
            obs.release_before(t_next);
        } catch (const std::exception& e) {
            rethrow_with_iteration(n, e);
        }
    }

    if (result.halt == LoopHalt::FinalTime && !result.iterations.empty() &&
        result.iterations.back().status == IterationStatus::Updated)
        result.iterations.back().status = IterationStatus::HaltedFinalTime;

    result.beta_final_sq = beta_sq;
    return result;
}

} // namespace bardina
