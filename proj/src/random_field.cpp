#include "bardina/random_field.hpp"

#include "bardina/operators.hpp"

#include <cmath>
#include <random>

namespace bardina {

SpectralField random_divfree_field(const GridSpec& grid, const SpectrumProfile& profile,
                                   std::uint64_t seed) {
    grid.validate();
    SpectralField out(grid);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int n = grid.n_grid;
    const int kcap = profile.max_wave > 0 ? std::min(profile.max_wave, grid.max_wave())
                                          : grid.max_wave();
    const long kcap_sq = static_cast<long>(kcap) * kcap;

    for (int kx = -kcap; kx <= kcap; ++kx) {
        for (int ky = -kcap; ky <= kcap; ++ky) {
            for (int kz = -kcap; kz <= kcap; ++kz) {
                const long kk = long(kx) * kx + long(ky) * ky + long(kz) * kz;
                if (kk == 0 || kk > kcap_sq) continue;
                // canonical half-space: draw once per conjugate pair
                if (!(kz > 0 || (kz == 0 && ky > 0) || (kz == 0 && ky == 0 && kx > 0))) continue;

                Complex a[3];
                for (auto& c : a) c = Complex{gauss(rng), gauss(rng)};
                // project out the longitudinal part
                const Complex dot = a[0] * double(kx) + a[1] * double(ky) + a[2] * double(kz);
                const Complex s = dot / double(kk);
                a[0] -= s * double(kx);
                a[1] -= s * double(ky);
                a[2] -= s * double(kz);

                const double r = std::sqrt(double(kk));
                double amp = 1.0;
                switch (profile.kind) {
                case SpectrumProfile::Kind::gaussian:
                    amp = std::exp(-(r / profile.peak_wave) * (r / profile.peak_wave));
                    break;
                case SpectrumProfile::Kind::power_law:
                    amp = std::pow(r, -profile.exponent);
                    break;
                }
                for (int c = 0; c < 3; ++c) {
                    out.at_wave(c, kx, ky, kz) = amp * a[c];
                    out.at_wave(c, -kx, -ky, -kz) = std::conj(amp * a[c]);
                }
            }
        }
    }

    out.set_divergence_free(true);
    out.set_dealiased(kcap <= grid.dealias_max_wave());
    if (profile.target_norm > 0) {
        const double norm = std::sqrt(sobolev_norm_sq(out, 0.0));
        if (norm > 0) out *= profile.target_norm / norm;
    }
    (void)n;
    return out;
}

} // namespace bardina
