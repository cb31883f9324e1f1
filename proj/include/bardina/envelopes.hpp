#pragma once

#include <cmath>

namespace bardina {

/// A-priori bound data shared by the solver diagnostics and the recovery
/// condition checker. M_A, M_B, M_C bound ||u(0)||, ||grad u(0)||, ||Lap u(0)||;
/// alpha0 <= alpha <= alpha1 are the prior parameter bounds; c_gn is the
/// Gagliardo-Nirenberg constant (no sharp value is assumed, see README).
struct BoundsEnvelope {
    double M_A = 0, M_B = 0, M_C = 0;
    double alpha0 = 0, alpha1 = 0;
    double c_gn = 1.0;
    bool c_gn_explicit = false; // set when the user pinned c_gn rather than the default
    double f_sup = 0;           // sup_t ||f(t)||
    double nu = 0;
    double lambda1 = 0;

    /// Energy envelope: e^{-nu lambda1 t} (M_A^2 + alpha1^2 M_B^2) + f_sup^2/(lambda1^2 nu^2).
    /// Bounds ||u(t)||^2 + alpha^2 ||grad u(t)||^2.
    double energy_bound_sq(double t) const;

    /// Gradient envelope bounding ||grad u(t)||^2 + alpha^2 ||A u(t)||^2.
    double gradient_bound_sq(double t) const;

    /// Rate envelope bounding ||u_t(t)||: nu/alpha0 * M2(t) + c^2/(alpha0^4 lambda1^{3/4}) M1^2(t) + f_sup.
    double rate_bound(double t) const;

    double M1(double t) const { return std::sqrt(energy_bound_sq(t)); }
    double M2(double t) const { return std::sqrt(gradient_bound_sq(t)); }
    double M3(double t) const { return rate_bound(t); }
};

// Spec-facing wrappers.
double eval_M1_sq(const BoundsEnvelope& env, double t);
double eval_M2_sq(const BoundsEnvelope& env, double t);
double eval_M3(const BoundsEnvelope& env, double t);

/// Observer energy envelope bounding ||w(t)||^2 + beta^2 ||grad w(t)||^2 on the
/// iteration window: e^{-eta/2 (t - t_n)} (||w(t_n)||^2 + beta^2 ||grad w(t_n)||^2)
/// + 4 f_sup^2 / eta^2 + 2 (2 + beta^2/alpha0^2) M1^2(t_n).
double eval_M4_sq(double t_minus_tn, double eta, double beta_sq, double w_norm_sq_at_tn,
                  double w_grad_norm_sq_at_tn, double f_sup, double M1_sq_at_tn, double alpha0);

} // namespace bardina
