#include "bardina/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace bardina {

void GridSpec::validate() const {
    if (n_grid < 4 || n_grid % 2 != 0)
        throw std::invalid_argument("grid.n_grid must be an even integer >= 4");
    if (!(box_length > 0))
        throw std::invalid_argument("domain.L must be positive");
    if (!(dealias_fraction > 0) || dealias_fraction > 1.0)
        throw std::invalid_argument("grid.dealias_fraction must lie in (0, 1]");
    if (!(lambda1() > 0))
        throw std::invalid_argument("domain.L yields a non-positive lambda1");
}

int GridSpec::dealias_max_wave() const {
    const double cut = dealias_fraction * (n_grid / 2.0);
    // strict |k_i| < cut
    int k = static_cast<int>(std::ceil(cut)) - 1;
    if (std::abs(cut - std::round(cut)) < 1e-12) k = static_cast<int>(std::round(cut)) - 1;
    return std::min(k, max_wave());
}

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coeffs_(3 * grid.points(), Complex{0.0, 0.0}) {
    grid_.validate();
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* who) {
    if (!a.same_grid(b))
        throw std::invalid_argument(std::string(who) + ": mismatched grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(*this, other, "operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    dealiased_ = dealiased_ && other.dealiased_;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(*this, other, "operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    dealiased_ = dealiased_ && other.dealiased_;
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
    require_same_grid(*this, x, "axpy");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    divergence_free_ = divergence_free_ && x.divergence_free_;
    dealiased_ = dealiased_ && x.dealiased_;
    return *this;
}

void SpectralField::zero_mean_and_nyquist() {
    const int n = grid_.n_grid;
    const int nyq = n / 2;
    for (int c = 0; c < 3; ++c) {
        at(c, 0, 0, 0) = Complex{0, 0};
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                at(c, ix, iy, nyq) = Complex{0, 0};
                at(c, ix, nyq, iy) = Complex{0, 0};
                at(c, nyq, ix, iy) = Complex{0, 0};
            }
    }
}

void SpectralField::enforce_hermitian() {
    zero_mean_and_nyquist();
    const int n = grid_.n_grid;
    for (int c = 0; c < 3; ++c) {
        for (int ix = 0; ix < n; ++ix) {
            const int jx = (n - ix) % n;
            for (int iy = 0; iy < n; ++iy) {
                const int jy = (n - iy) % n;
                for (int iz = 0; iz < n; ++iz) {
                    const int jz = (n - iz) % n;
                    // visit each {K, -K} pair once: canonical member has the
                    // lexicographically smaller index triple
                    if (std::tie(ix, iy, iz) > std::tie(jx, jy, jz)) continue;
                    Complex& a = at(c, ix, iy, iz);
                    Complex& b = at(c, jx, jy, jz);
                    if (&a == &b) { // self-conjugate site: force real
                        a = Complex{a.real(), 0.0};
                        continue;
                    }
                    const Complex half = 0.5 * (a + std::conj(b));
                    a = half;
                    b = std::conj(half);
                }
            }
        }
    }
}

double SpectralField::max_abs_coefficient() const {
    double m = 0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

bool SpectralField::all_finite() const {
    for (const auto& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double SpectralField::hermitian_defect() const {
    const int n = grid_.n_grid;
    const double scale = std::max(max_abs_coefficient(), 1e-300);
    double worst = 0;
    for (int c = 0; c < 3; ++c)
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    const Complex a = at(c, ix, iy, iz);
                    const Complex b = at(c, (n - ix) % n, (n - iy) % n, (n - iz) % n);
                    worst = std::max(worst, std::abs(a - std::conj(b)));
                }
    return worst / scale;
}

double SpectralField::divergence_defect() const {
    const int n = grid_.n_grid;
    // coefficients at the round-off floor carry no meaningful direction
    const double floor = 1e-13 * max_abs_coefficient();
    double worst = 0;
    for (int ix = 0; ix < n; ++ix) {
        const double kx = wave_of_index(ix, n);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = wave_of_index(iy, n);
            for (int iz = 0; iz < n; ++iz) {
                const double kz = wave_of_index(iz, n);
                const double kk = kx * kx + ky * ky + kz * kz;
                if (kk == 0) continue;
                const Complex d = at(0, ix, iy, iz) * kx + at(1, ix, iy, iz) * ky +
                                  at(2, ix, iy, iz) * kz;
                const double mag = std::abs(at(0, ix, iy, iz)) + std::abs(at(1, ix, iy, iz)) +
                                   std::abs(at(2, ix, iy, iz));
                if (mag <= floor) continue;
                worst = std::max(worst, std::abs(d) / (mag * std::sqrt(kk)));
            }
        }
    }
    return worst;
}

} // namespace bardina
