#include "bardina/bilinear.hpp"

#include "bardina/fft.hpp"
#include "bardina/operators.hpp"

#include <numbers>
#include <stdexcept>
#include <vector>

namespace bardina {

SpectralField bilinear_B(const SpectralField& u, const SpectralField& v) {
    require_same_grid(u, v, "bilinear_B");
    if (!u.divergence_free())
        throw std::invalid_argument("bilinear_B: advecting field must be divergence-free");
    const GridSpec& g = u.grid();
    if (g.dealias_max_wave() < 1)
        throw std::invalid_argument(
            "bilinear_B: resolution too small for the requested dealias_fraction");

    const int n = g.n_grid;
    const std::size_t size = g.points();
    const double two_pi_over_L = 2.0 * std::numbers::pi / g.box_length;

    // advecting velocity on the collocation lattice (real by Hermitian symmetry)
    std::vector<double> uphys[3];
    for (int c = 0; c < 3; ++c) {
        auto phys = to_physical_component(u, c);
        uphys[c].resize(size);
        for (std::size_t i = 0; i < size; ++i) uphys[c][i] = phys[i].real();
    }

    SpectralField out(g);
    std::vector<Complex> deriv_coef(size), deriv_phys(size), buf(size);
    std::vector<double> w(size);

    for (int j = 0; j < 3; ++j) { // component of v being advected
        for (std::size_t i = 0; i < size; ++i) w[i] = 0.0;
        auto vj = v.component(j);
        for (int axis = 0; axis < 3; ++axis) {
            // d v_j / d x_axis in Fourier space: multiply by i * 2 pi k_axis / L
            std::size_t idx = 0;
            for (int ix = 0; ix < n; ++ix) {
                const int kx = wave_of_index(ix, n);
                for (int iy = 0; iy < n; ++iy) {
                    const int ky = wave_of_index(iy, n);
                    for (int iz = 0; iz < n; ++iz, ++idx) {
                        const int kz = wave_of_index(iz, n);
                        const int k = axis == 0 ? kx : (axis == 1 ? ky : kz);
                        deriv_coef[idx] = vj[idx] * Complex{0.0, two_pi_over_L * k};
                    }
                }
            }
            fft::backward(deriv_coef.data(), deriv_phys.data(), n);
            const auto& ua = uphys[axis];
            for (std::size_t i = 0; i < size; ++i) w[i] += ua[i] * deriv_phys[i].real();
        }
        for (std::size_t i = 0; i < size; ++i) buf[i] = Complex{w[i], 0.0};
        fft::forward(buf.data(), out.component(j).data(), n);
    }

    out.enforce_hermitian();
    out = dealias(out);
    out = leray_project(out);
    return out;
}

} // namespace bardina
