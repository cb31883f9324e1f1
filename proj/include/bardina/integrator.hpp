#pragma once

#include "bardina/forcing.hpp"
#include "bardina/spectral_field.hpp"

#include <stdexcept>

namespace bardina {

struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CflError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dynamics shared by the truth and observer systems, in filtered-velocity
/// variables:
///
///   psi_t = -nu A psi - (I+a^2 A)^{-1} B(psi,psi) + (I+a^2 A)^{-1} P f
///           - eta (P_N psi - obs)
///
/// with a^2 the filter parameter (alpha^2 or beta^2) and eta = 0 for the truth
/// system. The feedback is applied without any operator inversion: the
/// (I+a^2 A)^{-1}(I+a^2 A) cancellation on that term is exact per mode.
struct DynamicsSpec {
    double nu = 0;
    double alpha_sq = 0;                   // filter parameter squared
    const SpectralField* forcing = nullptr; // P f (already projected), may be null
    double eta = 0;
    int obs_cutoff = 0;                    // N in P_N; used only when eta > 0
};

/// Full right-hand side at one instant. obs may be null when eta == 0.
SpectralField evaluate_rhs(const SpectralField& state, const DynamicsSpec& dyn,
                           const SpectralField* obs);

/// One step of the integrating-factor Heun scheme: the -nu A term is advanced
/// exactly per mode by exp(-nu lambda_K dt), the steady forcing response by the
/// exact variation-of-constants weight (1 - e^{-z})/z, and the remaining terms
/// (nonlinearity, feedback) by the explicit two-stage update. Observations are
/// consumed at the step's two quadrature nodes t and t+dt. Hermitian symmetry
/// is re-enforced on the result. Throws BlowUpError when a coefficient exceeds
/// 1e12 in magnitude or turns non-finite.
SpectralField imex_step(const SpectralField& state, double dt, const DynamicsSpec& dyn,
                        const SpectralField* obs_now, const SpectralField* obs_next);

/// Step and right-hand side at the departure node in one evaluation (the
/// nonlinear term is shared between them).
struct StepWithRhs {
    SpectralField next;
    SpectralField rhs; // d/dt state at the departure node
};
StepWithRhs imex_step_with_rhs(const SpectralField& state, double dt, const DynamicsSpec& dyn,
                               const SpectralField* obs_now, const SpectralField* obs_next);

/// Advective CFL bound safety * (L/n) / max|u|; +inf for a quiescent field.
double advective_dt_bound(const SpectralField& state, double safety = 0.5);

/// min(user_dt, CFL bound computed from the given state).
double suggest_dt(const SpectralField& state, double user_dt, double safety = 0.5);

void check_blowup(const SpectralField& state, const char* context);

} // namespace bardina
