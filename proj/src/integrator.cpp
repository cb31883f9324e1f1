#include "bardina/integrator.hpp"

#include "bardina/bilinear.hpp"
#include "bardina/operators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bardina {

namespace {

constexpr double kBlowupMagnitude = 1e12;

// Non-stiff explicit part: -(I+a^2 A)^{-1} B(psi,psi) - eta (P_N psi - obs).
// The steady forcing response and -nu A psi are handled exactly in the step.
SpectralField explicit_part(const SpectralField& state, const DynamicsSpec& dyn,
                            const SpectralField* obs) {
    SpectralField out = helmholtz_inverse(bilinear_B(state, state), dyn.alpha_sq);
    out *= -1.0;
    if (dyn.eta > 0) {
        if (!obs) throw std::invalid_argument("nudged dynamics require an observation field");
        SpectralField feedback = low_mode_project(state, dyn.obs_cutoff);
        feedback -= *obs;
        out.axpy(-dyn.eta, feedback);
    }
    return out;
}

// Per-mode multipliers for one step: decay e^{-nu lambda_K dt} and the
// variation-of-constants weight dt*phi1 = (1 - e^{-z})/(nu lambda_K).
struct StepWeights {
    std::vector<double> decay;
    std::vector<double> forcing;
};

StepWeights step_weights(const GridSpec& g, double nu, double dt) {
    StepWeights w;
    w.decay.resize(g.points());
    w.forcing.resize(g.points());
    const double fac = g.lambda1(); // 4 pi^2 / L^2, eigenvalue of |K| = 1
    const int n = g.n_grid;
    std::size_t idx = 0;
    for (int ix = 0; ix < n; ++ix) {
        const double kx = wave_of_index(ix, n);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = wave_of_index(iy, n);
            for (int iz = 0; iz < n; ++iz, ++idx) {
                const double kz = wave_of_index(iz, n);
                const double lam = fac * (kx * kx + ky * ky + kz * kz);
                const double z = nu * lam * dt;
                const double e = std::exp(-z);
                w.decay[idx] = e;
                if (lam == 0) {
                    w.forcing[idx] = dt;
                } else if (z < 1e-7) {
                    w.forcing[idx] = dt * (1.0 - 0.5 * z + z * z / 6.0);
                } else {
                    w.forcing[idx] = (1.0 - e) / (nu * lam);
                }
            }
        }
    }
    return w;
}

void scale_per_mode(SpectralField& f, const std::vector<double>& mult) {
    for (int c = 0; c < 3; ++c) {
        auto comp = f.component(c);
        for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= mult[i];
    }
}

void add_scaled_per_mode(SpectralField& f, const SpectralField& src,
                         const std::vector<double>& mult, double extra = 1.0) {
    for (int c = 0; c < 3; ++c) {
        auto fc = f.component(c);
        auto sc = src.component(c);
        for (std::size_t i = 0; i < fc.size(); ++i) fc[i] += extra * mult[i] * sc[i];
    }
}

} // namespace

SpectralField evaluate_rhs(const SpectralField& state, const DynamicsSpec& dyn,
                           const SpectralField* obs) {
    SpectralField out = explicit_part(state, dyn, obs);
    out.axpy(-dyn.nu, apply_A(state));
    if (dyn.forcing) out += helmholtz_inverse(*dyn.forcing, dyn.alpha_sq);
    return out;
}

namespace {

SpectralField step_impl(const SpectralField& state, double dt, const DynamicsSpec& dyn,
                        const SpectralField* obs_now, const SpectralField* obs_next,
                        const SpectralField& k1) {
    const GridSpec& g = state.grid();
    const StepWeights w = step_weights(g, dyn.nu, dt);

    // steady forcing response, integrated exactly
    SpectralField base = state;
    scale_per_mode(base, w.decay);
    if (dyn.forcing) {
        SpectralField fr = helmholtz_inverse(*dyn.forcing, dyn.alpha_sq);
        add_scaled_per_mode(base, fr, w.forcing);
    }

    // two-stage explicit update of the remaining terms
    SpectralField k1_decayed = k1;
    scale_per_mode(k1_decayed, w.decay);

    SpectralField predictor = base;
    predictor.axpy(dt, k1_decayed);

    SpectralField k2 = explicit_part(predictor, dyn, obs_next ? obs_next : obs_now);

    SpectralField next = base;
    next.axpy(0.5 * dt, k1_decayed);
    next.axpy(0.5 * dt, k2);

    next.enforce_hermitian();
    next.set_divergence_free(true);
    check_blowup(next, "imex_step");
    return next;
}

void check_step_args(double dt, const DynamicsSpec& dyn) {
    if (dt < 0) throw std::invalid_argument("imex_step: negative dt");
    if (dyn.eta > 0 && dyn.eta * dt > 0.5 + 1e-12)
        throw CflError("imex_step: explicit feedback requires eta*dt <= 1/2");
}

} // namespace

SpectralField imex_step(const SpectralField& state, double dt, const DynamicsSpec& dyn,
                        const SpectralField* obs_now, const SpectralField* obs_next) {
    check_step_args(dt, dyn);
    if (dt == 0) return state;
    const SpectralField k1 = explicit_part(state, dyn, obs_now);
    return step_impl(state, dt, dyn, obs_now, obs_next, k1);
}

StepWithRhs imex_step_with_rhs(const SpectralField& state, double dt, const DynamicsSpec& dyn,
                               const SpectralField* obs_now, const SpectralField* obs_next) {
    check_step_args(dt, dyn);
    const SpectralField k1 = explicit_part(state, dyn, obs_now);

    StepWithRhs out;
    out.rhs = k1;
    out.rhs.axpy(-dyn.nu, apply_A(state));
    if (dyn.forcing) out.rhs += helmholtz_inverse(*dyn.forcing, dyn.alpha_sq);
    out.next = dt == 0 ? state : step_impl(state, dt, dyn, obs_now, obs_next, k1);
    return out;
}

double advective_dt_bound(const SpectralField& state, double safety) {
    const double speed = max_pointwise_speed(state);
    if (speed <= 0) return std::numeric_limits<double>::infinity();
    const GridSpec& g = state.grid();
    return safety * (g.box_length / g.n_grid) / speed;
}

double suggest_dt(const SpectralField& state, double user_dt, double safety) {
    return std::min(user_dt, advective_dt_bound(state, safety));
}

void check_blowup(const SpectralField& state, const char* context) {
    if (!state.all_finite()) {
        std::ostringstream msg;
        msg << context << ": non-finite coefficient detected (blow-up)";
        throw BlowUpError(msg.str());
    }
    const double m = state.max_abs_coefficient();
    if (m > kBlowupMagnitude) {
        std::ostringstream msg;
        msg << context << ": coefficient magnitude " << m << " exceeds " << kBlowupMagnitude
            << " (blow-up)";
        throw BlowUpError(msg.str());
    }
}

} // namespace bardina
