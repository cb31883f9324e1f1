#include "bardina/forcing.hpp"

#include "bardina/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace bardina {

ForcingSpec::Kind forcing_kind_from_string(const std::string& s) {
    if (s == "none") return ForcingSpec::Kind::none;
    if (s == "steady_lowmode") return ForcingSpec::Kind::steady_lowmode;
    if (s == "manufactured_steady") return ForcingSpec::Kind::manufactured_steady;
    throw std::invalid_argument("forcing.kind: unknown value '" + s + "'");
}

std::string to_string(ForcingSpec::Kind k) {
    switch (k) {
    case ForcingSpec::Kind::none: return "none";
    case ForcingSpec::Kind::steady_lowmode: return "steady_lowmode";
    case ForcingSpec::Kind::manufactured_steady: return "manufactured_steady";
    }
    return "?";
}

namespace {

// a * (0, sin(2 pi x/L), cos(2 pi x/L)) as coefficients on K = (+-1, 0, 0):
// sin -> -i a/2 at +K, +i a/2 at -K; cos -> a/2 at both.
void add_circular_shear(SpectralField& f, int axis, double a) {
    int K[3] = {0, 0, 0};
    K[axis] = 1;
    const int cy = (axis + 1) % 3;
    const int cz = (axis + 2) % 3;
    f.at_wave(cy, K[0], K[1], K[2]) += Complex{0.0, -0.5 * a};
    f.at_wave(cy, -K[0], -K[1], -K[2]) += Complex{0.0, 0.5 * a};
    f.at_wave(cz, K[0], K[1], K[2]) += Complex{0.5 * a, 0.0};
    f.at_wave(cz, -K[0], -K[1], -K[2]) += Complex{0.5 * a, 0.0};
}

} // namespace

SpectralField manufactured_target(const ForcingSpec& spec, const GridSpec& grid) {
    SpectralField target(grid);
    // equal-weight ABC flow: a Beltrami field, so (u.grad)u is a pure gradient
    // and the Leray-projected advection vanishes; all three axes carry |K|=1 modes
    for (int axis = 0; axis < 3; ++axis) add_circular_shear(target, axis, spec.amplitude);
    target.set_divergence_free(true);
    target.set_dealiased(true);
    return target;
}

Forcing build_forcing(const ForcingSpec& spec, const GridSpec& grid, double nu, double alpha) {
    Forcing out;
    switch (spec.kind) {
    case ForcingSpec::Kind::none:
        out.field = SpectralField::zero(grid);
        out.field.set_divergence_free(true);
        out.field.set_dealiased(true);
        break;
    case ForcingSpec::Kind::steady_lowmode: {
        SpectralField f(grid);
        if (spec.mode_set.empty()) {
            for (int axis = 0; axis < 3; ++axis) add_circular_shear(f, axis, spec.amplitude);
        } else {
            for (const auto& K : spec.mode_set) {
                int axis = -1;
                for (int a = 0; a < 3; ++a)
                    if (K[a] != 0) axis = a;
                int nonzero = 0;
                for (int a = 0; a < 3; ++a) nonzero += K[a] != 0;
                if (nonzero != 1 || std::abs(K[axis]) != 1)
                    throw std::invalid_argument(
                        "forcing.mode_set: steady_lowmode supports unit axis-aligned modes");
                add_circular_shear(f, axis, spec.amplitude);
            }
        }
        f.set_divergence_free(true);
        f.set_dealiased(true);
        out.field = f;
        break;
    }
    case ForcingSpec::Kind::manufactured_steady: {
        // f = nu (I + alpha^2 A) A u_target, so u_target is an exact steady state
        const SpectralField target = manufactured_target(spec, grid);
        SpectralField a1 = apply_A(target);
        SpectralField f = a1;
        f.axpy(alpha * alpha, apply_A(a1));
        f *= nu;
        out.field = f;
        break;
    }
    }
    out.sup_norm = std::sqrt(sobolev_norm_sq(out.field, 0.0));
    return out;
}

} // namespace bardina
