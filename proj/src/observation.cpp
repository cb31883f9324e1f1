#include "bardina/observation.hpp"

#include "bardina/operators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bardina {

// ---------------------------------------------------------------------------
// CompactModes

CompactModes::CompactModes(const GridSpec& grid, int cap) : grid_(grid), cap_(cap) {
    if (cap < 1) throw std::invalid_argument("CompactModes: cutoff must be >= 1");
    if (cap > grid.n_grid / 2)
        throw std::invalid_argument("CompactModes: cutoff exceeds the grid Nyquist range");
    auto index = std::make_shared<std::vector<Entry>>();
    const int n = grid.n_grid;
    const long cap_sq = static_cast<long>(cap) * cap;
    for (int ix = 0; ix < n; ++ix) {
        const int kx = wave_of_index(ix, n);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = wave_of_index(iy, n);
            for (int iz = 0; iz < n; ++iz) {
                const int kz = wave_of_index(iz, n);
                const long kk = long(kx) * kx + long(ky) * ky + long(kz) * kz;
                if (kk > 0 && kk < cap_sq)
                    index->push_back(Entry{ix, iy, iz, static_cast<int>(kk)});
            }
        }
    }
    index_ = std::move(index);
}

void CompactModes::store(const SpectralField& full) {
    if (!(full.grid() == grid_)) throw std::invalid_argument("CompactModes: mismatched grid");
    data_.resize(3 * index_->size());
    std::size_t j = 0;
    for (int c = 0; c < 3; ++c)
        for (const auto& e : *index_) data_[j++] = full.at(c, e.ix, e.iy, e.iz);
}

SpectralField CompactModes::unpack(int cutoff) const {
    if (cutoff > cap_)
        throw std::invalid_argument("CompactModes: requested cutoff exceeds the stored cap");
    SpectralField out(grid_);
    const long cut_sq = static_cast<long>(cutoff) * cutoff;
    std::size_t j = 0;
    for (int c = 0; c < 3; ++c)
        for (const auto& e : *index_) {
            if (e.k_sq < cut_sq) out.at(c, e.ix, e.iy, e.iz) = data_[j];
            ++j;
        }
    out.set_divergence_free(true);
    out.set_dealiased(true);
    return out;
}

// ---------------------------------------------------------------------------
// RecordedObservations

RecordedObservations::RecordedObservations(const GridSpec& grid, int cap, double dt,
                                           double t_begin)
    : grid_(grid), cap_(cap), dt_(dt), t_begin_(t_begin), layout_(grid, cap) {
    if (!(dt > 0)) throw std::invalid_argument("RecordedObservations: dt must be positive");
}

void RecordedObservations::append(const SpectralField& u, const SpectralField& u_t) {
    CompactModes cu = layout_;
    cu.store(u);
    CompactModes ct = layout_;
    ct.store(u_t);
    obs_u_.push_back(std::move(cu));
    obs_ut_.push_back(std::move(ct));
}

double RecordedObservations::t_end() const {
    return obs_u_.empty() ? t_begin_ : t_begin_ + dt_ * static_cast<double>(obs_u_.size() - 1);
}

SpectralField RecordedObservations::interpolate(const std::vector<CompactModes>& seq, double t,
                                                int cutoff) const {
    if (seq.empty()) throw std::out_of_range("observation stream is empty");
    const double x = (t - t_begin_) / dt_;
    const long lo = static_cast<long>(std::floor(x + 1e-9));
    if (lo < 0 || lo >= static_cast<long>(seq.size()))
        throw std::out_of_range("observation request outside the recorded window");
    const double frac = x - static_cast<double>(lo);
    if (frac < 1e-9 || lo + 1 >= static_cast<long>(seq.size()))
        return seq[static_cast<std::size_t>(lo)].unpack(cutoff);
    SpectralField a = seq[static_cast<std::size_t>(lo)].unpack(cutoff);
    SpectralField b = seq[static_cast<std::size_t>(lo + 1)].unpack(cutoff);
    a *= 1.0 - frac;
    a.axpy(frac, b);
    return a;
}

SpectralField RecordedObservations::velocity(double t, int cutoff) const {
    return interpolate(obs_u_, t, cutoff);
}

SpectralField RecordedObservations::velocity_rate(double t, int cutoff) const {
    return interpolate(obs_ut_, t, cutoff);
}

// ---------------------------------------------------------------------------
// LiveTruthObservations

LiveTruthObservations::LiveTruthObservations(TruthSystem sys, SpectralField u0, int cap,
                                             double dt, const SimulateOptions& opt)
    : sys_(std::move(sys)), cap_(cap), dt_(dt), opt_(opt), u_(std::move(u0)),
      layout_(sys_.grid, cap) {
    if (!(dt > 0)) throw std::invalid_argument("LiveTruthObservations: dt must be positive");
    if (!u_.divergence_free())
        throw std::invalid_argument("LiveTruthObservations: initial state must be divergence-free");
    if (opt_.enforce_cfl) {
        cfl_bound_ = advective_dt_bound(u_, opt_.cfl_safety);
        if (dt_ > cfl_bound_) {
            std::ostringstream msg;
            msg << "LiveTruthObservations: dt " << dt_ << " violates the CFL bound " << cfl_bound_;
            throw CflError(msg.str());
        }
    }
    // node 0
    SpectralField ut = rhs_truth(u_, sys_);
    CompactModes cu = layout_;
    cu.store(u_);
    CompactModes ct = layout_;
    ct.store(ut);
    cache_u_.push_back(std::move(cu));
    cache_ut_.push_back(std::move(ct));
    TrajectoryScalars s;
    s.t = 0;
    s.norm_u = std::sqrt(sobolev_norm_sq(u_, 0.0));
    s.norm_grad_u = std::sqrt(sobolev_norm_sq(u_, 1.0));
    s.norm_Au = std::sqrt(sobolev_norm_sq(u_, 2.0));
    s.norm_ut = std::sqrt(sobolev_norm_sq(ut, 0.0));
    scalars_.push_back(s);
}

double LiveTruthObservations::t_end() const { return horizon_; }

long LiveTruthObservations::node_of(double t, const char* who) const {
    const double x = t / dt_;
    const long node = std::lround(x);
    if (std::abs(x - static_cast<double>(node)) > 1e-6)
        throw std::invalid_argument(std::string(who) +
                                    ": live streams serve solver-grid nodes only");
    if (node < 0) throw std::out_of_range(std::string(who) + ": negative time");
    return node;
}

void LiveTruthObservations::advance_to(double t) const {
    const long node = node_of(t, "LiveTruthObservations::advance_to");
    while (reached_ < node) {
        u_ = imex_step(u_, dt_, sys_.dynamics(), nullptr, nullptr);
        ++reached_;
        SpectralField ut = rhs_truth(u_, sys_);
        CompactModes cu = layout_;
        cu.store(u_);
        CompactModes ct = layout_;
        ct.store(ut);
        cache_u_.push_back(std::move(cu));
        cache_ut_.push_back(std::move(ct));
        TrajectoryScalars s;
        s.t = static_cast<double>(reached_) * dt_;
        s.norm_u = std::sqrt(sobolev_norm_sq(u_, 0.0));
        s.norm_grad_u = std::sqrt(sobolev_norm_sq(u_, 1.0));
        s.norm_Au = std::sqrt(sobolev_norm_sq(u_, 2.0));
        s.norm_ut = std::sqrt(sobolev_norm_sq(ut, 0.0));
        scalars_.push_back(s);
        if (opt_.enforce_cfl && opt_.cfl_recheck_every > 0 &&
            reached_ % opt_.cfl_recheck_every == 0) {
            cfl_bound_ = advective_dt_bound(u_, opt_.cfl_safety);
            if (dt_ > cfl_bound_)
                throw CflError("LiveTruthObservations: CFL bound violated while advancing");
        }
    }
}

const CompactModes& LiveTruthObservations::cached_u(double t) const {
    const long node = node_of(t, "LiveTruthObservations::velocity");
    advance_to(t);
    if (node < base_)
        throw std::out_of_range("LiveTruthObservations: node released already");
    return cache_u_[static_cast<std::size_t>(node - base_)];
}

const CompactModes& LiveTruthObservations::cached_ut(double t) const {
    const long node = node_of(t, "LiveTruthObservations::velocity_rate");
    advance_to(t);
    if (node < base_)
        throw std::out_of_range("LiveTruthObservations: node released already");
    return cache_ut_[static_cast<std::size_t>(node - base_)];
}

SpectralField LiveTruthObservations::velocity(double t, int cutoff) const {
    return cached_u(t).unpack(cutoff);
}

SpectralField LiveTruthObservations::velocity_rate(double t, int cutoff) const {
    return cached_ut(t).unpack(cutoff);
}

void LiveTruthObservations::release_before(double t) {
    const long node = node_of(t, "LiveTruthObservations::release_before");
    while (base_ < node && !cache_u_.empty()) {
        cache_u_.pop_front();
        cache_ut_.pop_front();
        ++base_;
    }
}

} // namespace bardina
