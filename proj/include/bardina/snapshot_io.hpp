#pragma once

#include "bardina/bardina_model.hpp"
#include "bardina/spectral_field.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bardina {

/// Binary snapshot container:
///   magic "BRDF1" | L: float64 | n_grid: uint32 | flags: uint32 |
///   little-endian interleaved complex float64 coefficients in row-major
///   lattice order, x-component block then y then z.
/// flags: bit 0 divergence_free, bit 1 dealiased.
void save_snapshot(const SpectralField& field, const std::filesystem::path& path);
SpectralField load_snapshot(const std::filesystem::path& path);

struct TrajectoryIndexEntry {
    double t = 0;
    std::string filename;
    double norm_u = 0, norm_grad_u = 0, norm_Au = 0, norm_ut = 0;
};

/// Writes snapshot files u_NNNNNN.brdf (+ rate files ut_NNNNNN.brdf) and the
/// text index: one line per snapshot with
///   time filename ||u|| ||grad u|| ||A u|| ||u_t||
void dump_trajectory(const TruthTrajectory& traj, const std::filesystem::path& dir);

std::vector<TrajectoryIndexEntry> read_trajectory_index(const std::filesystem::path& dir);

/// Loads a dumped trajectory back (states + rates; rate files are required by
/// observation replay and are located by the ut_ prefix convention).
TruthTrajectory load_trajectory(const std::filesystem::path& dir);

} // namespace bardina
