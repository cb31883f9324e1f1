#pragma once

#include "bardina/spectral_field.hpp"

namespace bardina {

/// B(u, v) = P[(u.grad) v], computed pseudo-spectrally: u and grad v are
/// synthesized on the collocation lattice, multiplied pointwise, transformed
/// back, dealiased with the per-axis rule and Leray-projected. The first
/// argument must be divergence-free; v may be any field.
SpectralField bilinear_B(const SpectralField& u, const SpectralField& v);

} // namespace bardina
