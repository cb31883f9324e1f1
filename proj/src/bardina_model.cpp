#include "bardina/bardina_model.hpp"

#include "bardina/bilinear.hpp"
#include "bardina/operators.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bardina {

void PhysicalParams::validate() const {
    if (!(nu > 0)) throw std::invalid_argument("physics.nu must be positive");
    if (!(alpha > 0)) throw std::invalid_argument("physics.alpha_true must be positive");
}

TruthSystem TruthSystem::make(const GridSpec& grid, const PhysicalParams& params) {
    grid.validate();
    params.validate();
    TruthSystem sys;
    sys.grid = grid;
    sys.params = params;
    sys.forcing = build_forcing(params.forcing, grid, params.nu, params.alpha);
    return sys;
}

DynamicsSpec TruthSystem::dynamics() const {
    DynamicsSpec dyn;
    dyn.nu = params.nu;
    dyn.alpha_sq = params.alpha * params.alpha;
    dyn.forcing = &forcing.field;
    dyn.eta = 0;
    return dyn;
}

SpectralField rhs_truth(const SpectralField& u, const TruthSystem& sys) {
    return evaluate_rhs(u, sys.dynamics(), nullptr);
}

SpectralField step_truth(const SpectralField& u, double dt, const TruthSystem& sys) {
    return imex_step(u, dt, sys.dynamics(), nullptr, nullptr);
}

namespace {

TrajectoryScalars measure(double t, const SpectralField& u, const SpectralField& ut) {
    TrajectoryScalars s;
    s.t = t;
    s.norm_u = std::sqrt(sobolev_norm_sq(u, 0.0));
    s.norm_grad_u = std::sqrt(sobolev_norm_sq(u, 1.0));
    s.norm_Au = std::sqrt(sobolev_norm_sq(u, 2.0));
    s.norm_ut = std::sqrt(sobolev_norm_sq(ut, 0.0));
    return s;
}

} // namespace

TruthTrajectory simulate_truth(const SpectralField& u0, double horizon, double dt,
                               const TruthSystem& sys, const SimulateOptions& opt) {
    if (!(dt > 0)) throw std::invalid_argument("simulate_truth: dt must be positive");
    if (horizon < 0) throw std::invalid_argument("simulate_truth: negative horizon");
    if (!u0.divergence_free())
        throw std::invalid_argument("simulate_truth: initial state must be divergence-free");
    if (!std::isfinite(sobolev_norm_sq(u0, 2.0)))
        throw std::invalid_argument("simulate_truth: ||A u0|| is not finite on this grid");

    TruthTrajectory traj;
    traj.grid = sys.grid;
    traj.dt = dt;
    traj.snapshot_stride = std::max(1, opt.snapshot_stride);

    const long steps = std::lround(horizon / dt);
    if (std::abs(steps * dt - horizon) > 1e-9 * std::max(1.0, horizon))
        throw std::invalid_argument("simulate_truth: horizon must be a multiple of dt");

    double cfl_bound = opt.enforce_cfl ? advective_dt_bound(u0, opt.cfl_safety)
                                       : std::numeric_limits<double>::infinity();
    if (dt > cfl_bound) {
        std::ostringstream msg;
        msg << "simulate_truth: dt " << dt << " violates the advective CFL bound " << cfl_bound;
        throw CflError(msg.str());
    }

    SpectralField u = u0;
    for (long k = 0; k <= steps; ++k) {
        const double t = k * dt;
        // the rate shares the nonlinear evaluation with the upcoming step
        StepWithRhs sr;
        if (k < steps) {
            sr = imex_step_with_rhs(u, dt, sys.dynamics(), nullptr, nullptr);
        } else {
            sr.rhs = rhs_truth(u, sys);
        }
        SpectralField ut = std::move(sr.rhs);
        traj.scalars.push_back(measure(t, u, ut));
        if (k % traj.snapshot_stride == 0) {
            traj.times.push_back(t);
            traj.states.push_back(u);
            traj.derivatives.push_back(std::move(ut));
        }
        if (k == steps) break;

#ifdef NDEBUG
        const bool verify = (k % 100) == 0;
#else
        const bool verify = true;
#endif
        if (verify) {
            if (u.hermitian_defect() > 1e-10)
                throw std::runtime_error("simulate_truth: Hermitian symmetry lost");
            if (u.divergence_defect() > 1e-10)
                throw std::runtime_error("simulate_truth: divergence-free invariant lost");
        }
        if (opt.enforce_cfl && opt.cfl_recheck_every > 0 && k > 0 &&
            k % opt.cfl_recheck_every == 0) {
            cfl_bound = advective_dt_bound(u, opt.cfl_safety);
            if (dt > cfl_bound) {
                std::ostringstream msg;
                msg << "simulate_truth: CFL bound dropped to " << cfl_bound << " at t=" << t;
                throw CflError(msg.str());
            }
        }
        u = std::move(sr.next);
    }
    return traj;
}

BoundsEnvelope make_envelope(const SpectralField& u0, double alpha0, double alpha1, double c_gn,
                             double f_sup, double nu, double lambda1) {
    BoundsEnvelope env;
    env.M_A = std::sqrt(sobolev_norm_sq(u0, 0.0));
    env.M_B = std::sqrt(sobolev_norm_sq(u0, 1.0));
    env.M_C = std::sqrt(sobolev_norm_sq(u0, 2.0));
    env.alpha0 = alpha0;
    env.alpha1 = alpha1;
    env.c_gn = c_gn;
    env.f_sup = f_sup;
    env.nu = nu;
    env.lambda1 = lambda1;
    return env;
}

} // namespace bardina
