#pragma once

#include "bardina/spectral_field.hpp"

#include <cstdint>

namespace bardina {

/// Radial decay profile for synthetic fields.
struct SpectrumProfile {
    enum class Kind { gaussian, power_law };
    Kind kind = Kind::gaussian;
    double peak_wave = 2.0;   // gaussian: amplitude ~ exp(-(|K|/peak_wave)^2)
    double exponent = 2.0;    // power_law: amplitude ~ |K|^{-exponent}
    int max_wave = 0;         // 0 = fill every retained mode
    double target_norm = 0.0; // if > 0, rescale so ||u||_{L^2} equals this
};

/// Reproducible Hermitian, zero-mean, divergence-free field whose coefficient
/// magnitudes follow the given radial profile. Identical seed => identical bits.
SpectralField random_divfree_field(const GridSpec& grid, const SpectrumProfile& profile,
                                   std::uint64_t seed);

} // namespace bardina
