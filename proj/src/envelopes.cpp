#include "bardina/envelopes.hpp"

namespace bardina {

double BoundsEnvelope::energy_bound_sq(double t) const {
    const double decay = std::exp(-nu * lambda1 * t);
    const double forced = f_sup * f_sup / (lambda1 * lambda1 * nu * nu);
    return decay * (M_A * M_A + alpha1 * alpha1 * M_B * M_B) + forced;
}

double BoundsEnvelope::gradient_bound_sq(double t) const {
    const double decay = std::exp(-nu * lambda1 * t);
    const double c4 = c_gn * c_gn * c_gn * c_gn;
    const double a5 = alpha0 * alpha0 * alpha0 * alpha0 * alpha0;
    const double ic = M_A * M_A + alpha1 * alpha1 * M_B * M_B; // initial energy combination
    const double f2 = f_sup * f_sup;
    return decay * (M_B * M_B + alpha1 * alpha1 * M_C * M_C) +
           (2.0 * c4 / (a5 * nu * nu * lambda1)) * decay * ic * ic +
           f2 / (nu * nu * lambda1) +
           2.0 * c4 * f2 * f2 / (a5 * std::pow(nu, 6) * std::pow(lambda1, 5));
}

double BoundsEnvelope::rate_bound(double t) const {
    const double a4 = alpha0 * alpha0 * alpha0 * alpha0;
    return (nu / alpha0) * M2(t) + (c_gn * c_gn / (a4 * std::pow(lambda1, 0.75))) * energy_bound_sq(t) +
           f_sup;
}

double eval_M1_sq(const BoundsEnvelope& env, double t) { return env.energy_bound_sq(t); }
double eval_M2_sq(const BoundsEnvelope& env, double t) { return env.gradient_bound_sq(t); }
double eval_M3(const BoundsEnvelope& env, double t) { return env.rate_bound(t); }

double eval_M4_sq(double t_minus_tn, double eta, double beta_sq, double w_norm_sq_at_tn,
                  double w_grad_norm_sq_at_tn, double f_sup, double M1_sq_at_tn, double alpha0) {
    const double decay = std::exp(-0.5 * eta * t_minus_tn);
    return decay * (w_norm_sq_at_tn + beta_sq * w_grad_norm_sq_at_tn) +
           4.0 * f_sup * f_sup / (eta * eta) +
           2.0 * (2.0 + beta_sq / (alpha0 * alpha0)) * M1_sq_at_tn;
}

} // namespace bardina
