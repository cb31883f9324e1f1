#pragma once

#include <cstddef>
#include <numbers>

namespace bardina {

/// Periodic box [0,L]^3 sampled with n_grid collocation points per axis.
/// Fourier modes K with |K_i| < n_grid/2 are retained; the Nyquist plane is
/// always zero so every retained mode has its conjugate partner on the lattice.
struct GridSpec {
    double box_length = 2.0 * std::numbers::pi;
    int n_grid = 32;
    double dealias_fraction = 2.0 / 3.0;

    /// Smallest eigenvalue of the Stokes operator, 4*pi^2/L^2.
    double lambda1() const {
        const double pi = std::numbers::pi;
        return 4.0 * pi * pi / (box_length * box_length);
    }

    /// Largest retained wavenumber component.
    int max_wave() const { return n_grid / 2 - 1; }

    /// Largest |k_i| surviving the dealias mask (strict |k_i| < fraction*n/2).
    int dealias_max_wave() const;

    std::size_t points() const {
        const auto n = static_cast<std::size_t>(n_grid);
        return n * n * n;
    }

    /// Throws std::invalid_argument on malformed parameters.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Signed wavenumber for FFT index i on an n-point axis (Nyquist maps to -n/2).
inline int wave_of_index(int i, int n) { return i <= n / 2 - 1 ? i : i - n; }

/// FFT index holding wavenumber k.
inline int index_of_wave(int k, int n) { return k >= 0 ? k : k + n; }

} // namespace bardina
