#include "bardina/nudging.hpp"

#include "bardina/operators.hpp"

#include <stdexcept>

namespace bardina {

void NudgedState::validate(const GridSpec& grid) const {
    if (!(beta_sq > 0)) throw std::invalid_argument("NudgedState: beta_sq must be positive");
    // eta == 0 is the feedback-off limit (observer reduces to the plain dynamics)
    if (eta < 0) throw std::invalid_argument("NudgedState: eta must be non-negative");
    if (obs_cutoff < 1) throw std::invalid_argument("NudgedState: obs_cutoff must be >= 1");
    if (obs_cutoff > grid.n_grid / 2)
        throw std::invalid_argument("NudgedState: obs_cutoff exceeds the grid Nyquist range");
}

DynamicsSpec NudgedState::dynamics(const Forcing& f, double nu) const {
    DynamicsSpec dyn;
    dyn.nu = nu;
    dyn.alpha_sq = beta_sq;
    dyn.forcing = &f.field;
    dyn.eta = eta;
    dyn.obs_cutoff = obs_cutoff;
    return dyn;
}

SpectralField rhs_nudged(const NudgedState& state, const SpectralField& obs_u_now,
                         const Forcing& f, double nu) {
    state.validate(state.w.grid());
    return evaluate_rhs(state.w, state.dynamics(f, nu), &obs_u_now);
}

NudgedState step_nudged(NudgedState state, double dt, const SpectralField& obs_now,
                        const SpectralField& obs_next, const Forcing& f, double nu) {
    state.validate(state.w.grid());
    state.w = imex_step(state.w, dt, state.dynamics(f, nu), &obs_now, &obs_next);
    return state;
}

std::pair<double, double> sync_error(const SpectralField& w, const SpectralField& u,
                                     double beta_sq) {
    require_same_grid(w, u, "sync_error");
    SpectralField g = w;
    g -= u;
    return {sobolev_norm_sq(g, 0.0), beta_sq * sobolev_norm_sq(g, 1.0)};
}

} // namespace bardina
