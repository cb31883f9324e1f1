#pragma once

#include "bardina/envelopes.hpp"
#include "bardina/forcing.hpp"
#include "bardina/integrator.hpp"
#include "bardina/spectral_field.hpp"

#include <vector>

namespace bardina {

struct PhysicalParams {
    double nu = 0.1;     // kinematic viscosity, > 0
    double alpha = 0.25; // true filter length scale, > 0
    ForcingSpec forcing;

    void validate() const;
};

/// Truth system with its forcing realized on a grid.
struct TruthSystem {
    GridSpec grid;
    PhysicalParams params;
    Forcing forcing;

    static TruthSystem make(const GridSpec& grid, const PhysicalParams& params);
    DynamicsSpec dynamics() const;
};

/// u_t = -nu A u - (I+alpha^2 A)^{-1} B(u,u) + (I+alpha^2 A)^{-1} P f.
SpectralField rhs_truth(const SpectralField& u, const TruthSystem& sys);

/// One integrating-factor Heun step of the truth dynamics.
SpectralField step_truth(const SpectralField& u, double dt, const TruthSystem& sys);

struct TrajectoryScalars {
    double t = 0;
    double norm_u = 0;
    double norm_grad_u = 0;
    double norm_Au = 0;
    double norm_ut = 0;
};

/// Uniform-step trajectory. Norm scalars are kept at every step; full state
/// and rate snapshots are stored every snapshot_stride steps (aligned times).
struct TruthTrajectory {
    GridSpec grid;
    double dt = 0;
    int snapshot_stride = 1;
    std::vector<TrajectoryScalars> scalars;
    std::vector<double> times;
    std::vector<SpectralField> states;       // u at stored times
    std::vector<SpectralField> derivatives;  // u_t (from the analytic right-hand side)
};

struct SimulateOptions {
    int snapshot_stride = 1;
    double cfl_safety = 0.5;
    int cfl_recheck_every = 50;
    bool enforce_cfl = true;
};

/// Integrates the truth system over [0, horizon]. Rates u_t are evaluated from
/// the analytic right-hand side at each stored state, never by differencing.
/// Aborts with BlowUpError / CflError on the respective guard.
TruthTrajectory simulate_truth(const SpectralField& u0, double horizon, double dt,
                               const TruthSystem& sys, const SimulateOptions& opt = {});

/// Prior-bound envelope seeded from measured data norms (the twin-experiment
/// stand-in for externally known constants).
BoundsEnvelope make_envelope(const SpectralField& u0, double alpha0, double alpha1, double c_gn,
                             double f_sup, double nu, double lambda1);

} // namespace bardina
