#include "bardina/operators.hpp"

#include "bardina/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bardina {

namespace {

constexpr double kPi = std::numbers::pi;

// Applies fn(kx, ky, kz, lattice index) over the full lattice.
template <typename Fn>
void for_each_mode(const GridSpec& grid, Fn&& fn) {
    const int n = grid.n_grid;
    std::size_t idx = 0;
    for (int ix = 0; ix < n; ++ix) {
        const int kx = wave_of_index(ix, n);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = wave_of_index(iy, n);
            for (int iz = 0; iz < n; ++iz, ++idx) {
                const int kz = wave_of_index(iz, n);
                fn(kx, ky, kz, idx);
            }
        }
    }
}

double weight_pow(double base, double s) {
    if (s == 0.0) return 1.0;
    if (s == 1.0) return base;
    if (s == 2.0) return base * base;
    if (s == -1.0) return 1.0 / base;
    if (s == -2.0) return 1.0 / (base * base);
    return std::pow(base, s);
}

} // namespace

SpectralField leray_project(const SpectralField& field) {
    SpectralField out = field;
    const std::size_t size = out.lattice_size();
    auto x = out.component(0);
    auto y = out.component(1);
    auto z = out.component(2);
    for_each_mode(field.grid(), [&](int kx, int ky, int kz, std::size_t idx) {
        const double kk = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (kk == 0) return;
        const Complex dot = x[idx] * double(kx) + y[idx] * double(ky) + z[idx] * double(kz);
        const Complex s = dot / kk;
        x[idx] -= s * double(kx);
        y[idx] -= s * double(ky);
        z[idx] -= s * double(kz);
    });
    (void)size;
    out.set_divergence_free(true);
    return out;
}

SpectralField apply_A(const SpectralField& field) {
    SpectralField out = field;
    const GridSpec& g = field.grid();
    const double fac = 4.0 * kPi * kPi / (g.box_length * g.box_length);
    for (int c = 0; c < 3; ++c) {
        auto comp = out.component(c);
        for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
            const double kk = double(kx) * kx + double(ky) * ky + double(kz) * kz;
            comp[idx] *= fac * kk;
        });
    }
    return out;
}

SpectralField helmholtz_inverse(const SpectralField& field, double alpha_sq) {
    if (alpha_sq < 0)
        throw std::invalid_argument("helmholtz_inverse: alpha_sq must be non-negative");
    SpectralField out = field;
    const GridSpec& g = field.grid();
    const double L2 = g.box_length * g.box_length;
    for (int c = 0; c < 3; ++c) {
        auto comp = out.component(c);
        for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
            const double kk = double(kx) * kx + double(ky) * ky + double(kz) * kz;
            comp[idx] *= L2 / (L2 + 4.0 * alpha_sq * kPi * kPi * kk);
        });
    }
    return out;
}

SpectralField low_mode_project(const SpectralField& field, int cutoff, bool inclusive) {
    if (cutoff < 1) throw std::invalid_argument("low_mode_project: cutoff must be >= 1");
    SpectralField out = field;
    const long nn = static_cast<long>(cutoff) * cutoff;
    for (int c = 0; c < 3; ++c) {
        auto comp = out.component(c);
        for_each_mode(field.grid(), [&](int kx, int ky, int kz, std::size_t idx) {
            const long kk = long(kx) * kx + long(ky) * ky + long(kz) * kz;
            const bool keep = kk > 0 && (inclusive ? kk <= nn : kk < nn);
            if (!keep) comp[idx] = Complex{0, 0};
        });
    }
    return out;
}

double sobolev_norm_sq(const SpectralField& field, double s) {
    const GridSpec& g = field.grid();
    const double L3 = g.box_length * g.box_length * g.box_length;
    const double fac = 4.0 * kPi * kPi / (g.box_length * g.box_length); // (2 pi/L)^2
    auto x = field.component(0);
    auto y = field.component(1);
    auto z = field.component(2);
    double sum = 0;
    for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
        const double kk = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (kk == 0) return;
        const double w = weight_pow(fac * kk, s);
        sum += w * (std::norm(x[idx]) + std::norm(y[idx]) + std::norm(z[idx]));
    });
    return L3 * sum;
}

double inner_product(const SpectralField& a, const SpectralField& b, double s) {
    require_same_grid(a, b, "inner_product");
    const GridSpec& g = a.grid();
    const double L3 = g.box_length * g.box_length * g.box_length;
    const double fac = 4.0 * kPi * kPi / (g.box_length * g.box_length);
    double sum = 0;
    for (int c = 0; c < 3; ++c) {
        auto ac = a.component(c);
        auto bc = b.component(c);
        for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
            const double kk = double(kx) * kx + double(ky) * ky + double(kz) * kz;
            if (kk == 0) return;
            const double w = weight_pow(fac * kk, s);
            // real part only: the imaginary parts cancel in conjugate pairs
            sum += w * (ac[idx].real() * bc[idx].real() + ac[idx].imag() * bc[idx].imag());
        });
    }
    return L3 * sum;
}

SpectralField dealias(const SpectralField& field) {
    const GridSpec& g = field.grid();
    const int kmax = g.dealias_max_wave();
    if (kmax < 1)
        throw std::invalid_argument(
            "dealias: resolution too small for the requested dealias_fraction");
    SpectralField out = field;
    for (int c = 0; c < 3; ++c) {
        auto comp = out.component(c);
        for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
            if (std::abs(kx) > kmax || std::abs(ky) > kmax || std::abs(kz) > kmax)
                comp[idx] = Complex{0, 0};
        });
    }
    out.set_dealiased(true);
    return out;
}

std::vector<Complex> to_physical_component(const SpectralField& field, int c) {
    std::vector<Complex> phys(field.lattice_size());
    fft::backward(field.component(c).data(), phys.data(), field.n());
    return phys;
}

SpectralField from_physical(const GridSpec& grid, const std::vector<double>& ux,
                            const std::vector<double>& uy, const std::vector<double>& uz) {
    SpectralField out(grid);
    const std::size_t size = grid.points();
    if (ux.size() != size || uy.size() != size || uz.size() != size)
        throw std::invalid_argument("from_physical: sample count does not match the grid");
    std::vector<Complex> buf(size);
    const std::vector<double>* comps[3] = {&ux, &uy, &uz};
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < size; ++i) buf[i] = Complex{(*comps[c])[i], 0.0};
        fft::forward(buf.data(), out.component(c).data(), grid.n_grid);
    }
    out.enforce_hermitian();
    return out;
}

double max_pointwise_speed(const SpectralField& field) {
    const std::size_t size = field.lattice_size();
    std::vector<double> speed_sq(size, 0.0);
    for (int c = 0; c < 3; ++c) {
        auto phys = to_physical_component(field, c);
        for (std::size_t i = 0; i < size; ++i) {
            const double v = phys[i].real();
            speed_sq[i] += v * v;
        }
    }
    double m = 0;
    for (double v : speed_sq) m = std::max(m, v);
    return std::sqrt(m);
}

double physical_l2_norm_sq(const SpectralField& field) {
    const GridSpec& g = field.grid();
    const double cell = std::pow(g.box_length / g.n_grid, 3);
    double sum = 0;
    for (int c = 0; c < 3; ++c) {
        auto phys = to_physical_component(field, c);
        for (const auto& v : phys) sum += v.real() * v.real();
    }
    return cell * sum;
}

} // namespace bardina
