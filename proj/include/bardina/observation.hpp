#pragma once

#include "bardina/bardina_model.hpp"
#include "bardina/spectral_field.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

namespace bardina {

/// The only truth information that crosses into the assimilation side:
/// low-mode projections P_N u and P_N u_t on a uniform time grid. Requests
/// between nodes are interpolated linearly in time.
class ObservationStream {
public:
    virtual ~ObservationStream() = default;

    virtual const GridSpec& grid() const = 0;
    virtual int mode_cap() const = 0;  // largest cutoff N this stream can serve
    virtual double dt() const = 0;
    virtual double t_begin() const { return 0.0; }
    virtual double t_end() const = 0;

    virtual SpectralField velocity(double t, int cutoff) const = 0;
    virtual SpectralField velocity_rate(double t, int cutoff) const = 0;

    /// Hint that nodes strictly before t are no longer needed.
    virtual void release_before(double /*t*/) {}
};

/// Low-mode coefficients packed densely for the lattice points 0 < |K| < cap.
class CompactModes {
public:
    CompactModes() = default;
    CompactModes(const GridSpec& grid, int cap); // builds the index list

    void store(const SpectralField& full);
    SpectralField unpack(int cutoff) const; // modes 0 < |K| < cutoff <= cap

    int cap() const { return cap_; }

private:
    struct Entry {
        int ix, iy, iz;
        int k_sq;
    };
    GridSpec grid_;
    int cap_ = 0;
    std::shared_ptr<const std::vector<Entry>> index_; // shared across snapshots
    std::vector<Complex> data_;                       // 3 values per entry
};

/// Dense in-memory observation record (twin experiments, dump loading, tests).
class RecordedObservations final : public ObservationStream {
public:
    RecordedObservations(const GridSpec& grid, int cap, double dt, double t_begin = 0.0);

    void append(const SpectralField& u, const SpectralField& u_t);
    std::size_t size() const { return obs_u_.size(); }

    const GridSpec& grid() const override { return grid_; }
    int mode_cap() const override { return cap_; }
    double dt() const override { return dt_; }
    double t_begin() const override { return t_begin_; }
    double t_end() const override;

    SpectralField velocity(double t, int cutoff) const override;
    SpectralField velocity_rate(double t, int cutoff) const override;

private:
    SpectralField interpolate(const std::vector<CompactModes>& seq, double t, int cutoff) const;

    GridSpec grid_;
    int cap_ = 0;
    double dt_ = 0;
    double t_begin_ = 0;
    CompactModes layout_;
    std::vector<CompactModes> obs_u_, obs_ut_;
};

/// Streams observations straight out of a truth integration running in
/// lockstep, caching only the nodes between the consumer's release watermark
/// and the farthest requested time. Full truth states never leave this class.
class LiveTruthObservations final : public ObservationStream {
public:
    LiveTruthObservations(TruthSystem sys, SpectralField u0, int cap, double dt,
                          const SimulateOptions& opt = {});

    const GridSpec& grid() const override { return sys_.grid; }
    int mode_cap() const override { return cap_; }
    double dt() const override { return dt_; }
    double t_end() const override;

    SpectralField velocity(double t, int cutoff) const override;
    SpectralField velocity_rate(double t, int cutoff) const override;
    void release_before(double t) override;

    /// Norm history of the hidden truth, one entry per node reached so far.
    /// Consumed by truth-side audits only.
    const std::vector<TrajectoryScalars>& truth_scalars() const { return scalars_; }

    void set_horizon(double t_final) { horizon_ = t_final; }

private:
    void advance_to(double t) const;
    const CompactModes& cached_u(double t) const;
    const CompactModes& cached_ut(double t) const;
    long node_of(double t, const char* who) const;

    TruthSystem sys_;
    int cap_;
    double dt_;
    SimulateOptions opt_;
    double horizon_ = std::numeric_limits<double>::infinity();

    mutable SpectralField u_;       // truth state at node `reached_`
    mutable long reached_ = 0;      // last simulated node index
    mutable long base_ = 0;         // node index of cache_u_.front()
    mutable std::deque<CompactModes> cache_u_, cache_ut_;
    mutable std::vector<TrajectoryScalars> scalars_;
    mutable double cfl_bound_ = std::numeric_limits<double>::infinity();
    CompactModes layout_;
};

} // namespace bardina
