#pragma once

#include "bardina/spectral_field.hpp"

#include <array>
#include <string>
#include <vector>

namespace bardina {

/// Steady, divergence-free, zero-mean body force.
struct ForcingSpec {
    enum class Kind { none, steady_lowmode, manufactured_steady };
    Kind kind = Kind::manufactured_steady;
    double amplitude = 0.1;
    /// Optional explicit wavevectors; defaults are filled per kind.
    std::vector<std::array<int, 3>> mode_set;
};

ForcingSpec::Kind forcing_kind_from_string(const std::string& s);
std::string to_string(ForcingSpec::Kind k);

struct Forcing {
    SpectralField field;  // P f, time-independent
    double sup_norm = 0;  // sup_{s>=0} ||f(s)|| = ||f|| for steady forcing
};

/// Shear-type steady target state with (u.grad)u identically zero, used by the
/// manufactured_steady forcing: amplitude * (0, sin(2 pi x/L), cos(2 pi x/L)).
SpectralField manufactured_target(const ForcingSpec& spec, const GridSpec& grid);

/// Builds the forcing field. manufactured_steady produces
/// f = nu (I + alpha^2 A) A u_target so that u_target is a steady state.
Forcing build_forcing(const ForcingSpec& spec, const GridSpec& grid, double nu, double alpha);

} // namespace bardina
