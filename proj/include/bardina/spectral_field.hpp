#pragma once

#include "bardina/grid.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace bardina {

using Complex = std::complex<double>;

/// Divergence-free-capable vector field stored as Fourier coefficients on the
/// full n^3 lattice, one contiguous block per component (x, then y, then z),
/// row-major within a block (z fastest). The K=0 mode and the Nyquist planes
/// are kept identically zero; Hermitian symmetry u_hat(-K) = conj(u_hat(K))
/// makes the field real in physical space.
///
/// Values are immutable from the caller's perspective: every operator returns
/// a new field, so fields can be shared across threads freely.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const GridSpec& grid);

    static SpectralField zero(const GridSpec& grid) { return SpectralField(grid); }

    const GridSpec& grid() const { return grid_; }
    int n() const { return grid_.n_grid; }

    bool divergence_free() const { return divergence_free_; }
    bool dealiased() const { return dealiased_; }
    void set_divergence_free(bool v) { divergence_free_ = v; }
    void set_dealiased(bool v) { dealiased_ = v; }

    std::size_t lattice_size() const { return grid_.points(); }

    /// Coefficient of component c at FFT lattice index (ix, iy, iz).
    Complex& at(int c, int ix, int iy, int iz) { return coeffs_[offset(c, ix, iy, iz)]; }
    const Complex& at(int c, int ix, int iy, int iz) const { return coeffs_[offset(c, ix, iy, iz)]; }

    /// Coefficient addressed by signed wavenumber.
    Complex& at_wave(int c, int kx, int ky, int kz) {
        const int n = grid_.n_grid;
        return at(c, index_of_wave(kx, n), index_of_wave(ky, n), index_of_wave(kz, n));
    }
    const Complex& at_wave(int c, int kx, int ky, int kz) const {
        const int n = grid_.n_grid;
        return at(c, index_of_wave(kx, n), index_of_wave(ky, n), index_of_wave(kz, n));
    }

    std::span<Complex> component(int c) {
        return {coeffs_.data() + static_cast<std::size_t>(c) * lattice_size(), lattice_size()};
    }
    std::span<const Complex> component(int c) const {
        return {coeffs_.data() + static_cast<std::size_t>(c) * lattice_size(), lattice_size()};
    }

    std::span<Complex> raw() { return coeffs_; }
    std::span<const Complex> raw() const { return coeffs_; }

    // In-place linear algebra. Binary ops require matching grids.
    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);
    SpectralField& axpy(double a, const SpectralField& x); // this += a*x

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField f) { return f *= s; }

    /// Projects onto the Hermitian-symmetric part and zeroes the K=0 mode and
    /// Nyquist planes. Applied after every forward transform rather than assumed.
    void enforce_hermitian();

    /// Zeroes the K=0 mode and all Nyquist planes only.
    void zero_mean_and_nyquist();

    double max_abs_coefficient() const;
    bool all_finite() const;

    /// Largest relative Hermitian-symmetry defect max |u(K) - conj(u(-K))| / scale.
    double hermitian_defect() const;

    /// Largest relative divergence defect max |u_hat(K).K| / (|u_hat(K)||K|).
    double divergence_defect() const;

    bool same_grid(const SpectralField& other) const { return grid_ == other.grid_; }

private:
    std::size_t offset(int c, int ix, int iy, int iz) const {
        const auto n = static_cast<std::size_t>(grid_.n_grid);
        return (static_cast<std::size_t>(c) * n * n * n) +
               (static_cast<std::size_t>(ix) * n + static_cast<std::size_t>(iy)) * n +
               static_cast<std::size_t>(iz);
    }

    GridSpec grid_;
    std::vector<Complex> coeffs_;
    bool divergence_free_ = false;
    bool dealiased_ = false;
};

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* who);

} // namespace bardina
