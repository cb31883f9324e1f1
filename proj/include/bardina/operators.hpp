#pragma once

#include "bardina/spectral_field.hpp"

#include <vector>

namespace bardina {

/// Helmholtz-Leray projection: per mode u_hat -> u_hat - K (u_hat.K)/|K|^2.
/// Idempotent and self-adjoint; annihilates gradient fields.
SpectralField leray_project(const SpectralField& field);

/// Stokes operator A = -Laplacian on divergence-free fields: multiplication by
/// 4 pi^2 |K|^2 / L^2 per mode.
SpectralField apply_A(const SpectralField& field);

/// (I + alpha^2 A)^{-1}: multiplication by L^2 / (L^2 + 4 alpha^2 pi^2 |K|^2).
/// Norm non-increasing for alpha_sq >= 0; throws on negative alpha_sq.
SpectralField helmholtz_inverse(const SpectralField& field, double alpha_sq);

/// Projection onto low Fourier modes 0 < |K| < N (Euclidean norm, strict).
/// With inclusive=true the cutoff becomes 0 < |K| <= N (non-default variant).
SpectralField low_mode_project(const SpectralField& field, int cutoff, bool inclusive = false);

/// Squared Sobolev norm L^3 sum (2 pi |K| / L)^{2s} |u_hat(K)|^2.
/// s=0 is ||u||^2, s=1 is ||grad u||^2, s=2 is ||A u||^2; negative s allowed
/// because the zero mode is always absent.
double sobolev_norm_sq(const SpectralField& field, double s);

/// Pairing L^3 sum (2 pi |K| / L)^{2s} u_hat(K) . conj(v_hat(K)); real-valued
/// for Hermitian-symmetric fields, and inner_product(a,a,s) == sobolev_norm_sq(a,s).
double inner_product(const SpectralField& a, const SpectralField& b, double s);

/// Zeroes every mode with some |k_i| >= dealias_fraction * n/2 (per-axis rule).
/// Throws when the rule leaves no usable mode at this resolution.
SpectralField dealias(const SpectralField& field);

/// Physical-space samples of one component on the collocation lattice.
std::vector<Complex> to_physical_component(const SpectralField& field, int c);

/// Field from physical samples (3 blocks of n^3); enforces Hermitian symmetry.
SpectralField from_physical(const GridSpec& grid, const std::vector<double>& ux,
                            const std::vector<double>& uy, const std::vector<double>& uz);

/// Max pointwise speed max_x |u(x)| over the collocation lattice.
double max_pointwise_speed(const SpectralField& field);

/// Collocation-quadrature value of integral |u|^2 dx, (L/n)^3 sum_j |u(x_j)|^2.
/// Cross-validates the Parseval-based sobolev_norm_sq(u, 0).
double physical_l2_norm_sq(const SpectralField& field);

} // namespace bardina
