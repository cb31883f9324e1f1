#pragma once

#include "bardina/forcing.hpp"
#include "bardina/integrator.hpp"
#include "bardina/observation.hpp"
#include "bardina/spectral_field.hpp"

#include <utility>

namespace bardina {

/// Observer state for the feedback-controlled system. z = w + beta^2 A w is
/// never stored; all dynamics live in w-variables via exact per-mode inversion.
struct NudgedState {
    SpectralField w;
    double beta_sq = 0; // > 0
    double eta = 0;     // nudging gain, > 0
    int obs_cutoff = 0; // observed-mode cutoff N

    void validate(const GridSpec& grid) const;
    DynamicsSpec dynamics(const Forcing& f, double nu) const;
};

/// w_t = -nu A w - (I+beta^2 A)^{-1} B(w,w) + (I+beta^2 A)^{-1} P f
///       - eta P(P_N w - P_N u).
SpectralField rhs_nudged(const NudgedState& state, const SpectralField& obs_u_now,
                         const Forcing& f, double nu);

/// One integrating-factor Heun step with the feedback treated explicitly;
/// requires eta*dt <= 1/2.
NudgedState step_nudged(NudgedState state, double dt, const SpectralField& obs_now,
                        const SpectralField& obs_next, const Forcing& f, double nu);

/// (||g||^2, beta^2 ||grad g||^2) with g = w - u.
std::pair<double, double> sync_error(const SpectralField& w, const SpectralField& u,
                                     double beta_sq);

} // namespace bardina
