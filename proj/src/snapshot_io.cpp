#include "bardina/snapshot_io.hpp"

#include "bardina/operators.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bardina {

namespace {

constexpr char kMagic[5] = {'B', 'R', 'D', 'F', '1'};
constexpr std::uint32_t kFlagDivergenceFree = 1u << 0;
constexpr std::uint32_t kFlagDealiased = 1u << 1;

void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw std::runtime_error("snapshot: truncated file");
}

} // namespace

void save_snapshot(const SpectralField& field, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
    write_bytes(os, kMagic, sizeof(kMagic));
    const double L = field.grid().box_length;
    write_bytes(os, &L, sizeof(L));
    const std::uint32_t n = static_cast<std::uint32_t>(field.grid().n_grid);
    write_bytes(os, &n, sizeof(n));
    std::uint32_t flags = 0;
    if (field.divergence_free()) flags |= kFlagDivergenceFree;
    if (field.dealiased()) flags |= kFlagDealiased;
    write_bytes(os, &flags, sizeof(flags));
    const auto raw = field.raw();
    write_bytes(os, raw.data(), raw.size() * sizeof(Complex));
    if (!os) throw std::runtime_error("snapshot: write failed for " + path.string());
}

SpectralField load_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
    char magic[5];
    read_bytes(is, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path.string());
    double L = 0;
    read_bytes(is, &L, sizeof(L));
    std::uint32_t n = 0, flags = 0;
    read_bytes(is, &n, sizeof(n));
    read_bytes(is, &flags, sizeof(flags));
    GridSpec grid;
    grid.box_length = L;
    grid.n_grid = static_cast<int>(n);
    grid.validate();
    SpectralField field(grid);
    auto raw = field.raw();
    read_bytes(is, raw.data(), raw.size() * sizeof(Complex));
    field.set_divergence_free(flags & kFlagDivergenceFree);
    field.set_dealiased(flags & kFlagDealiased);
    return field;
}

namespace {

std::string snapshot_name(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%06zu.brdf", prefix, i);
    return buf;
}

} // namespace

void dump_trajectory(const TruthTrajectory& traj, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream index(dir / "index.txt");
    if (!index) throw std::runtime_error("trajectory dump: cannot open index in " + dir.string());
    index.precision(17);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const std::string uname = snapshot_name("u", i);
        save_snapshot(traj.states[i], dir / uname);
        save_snapshot(traj.derivatives[i], dir / snapshot_name("ut", i));
        const SpectralField& u = traj.states[i];
        const SpectralField& ut = traj.derivatives[i];
        index << traj.times[i] << ' ' << uname << ' ' << std::sqrt(sobolev_norm_sq(u, 0.0)) << ' '
              << std::sqrt(sobolev_norm_sq(u, 1.0)) << ' ' << std::sqrt(sobolev_norm_sq(u, 2.0))
              << ' ' << std::sqrt(sobolev_norm_sq(ut, 0.0)) << '\n';
    }
}

std::vector<TrajectoryIndexEntry> read_trajectory_index(const std::filesystem::path& dir) {
    std::ifstream index(dir / "index.txt");
    if (!index) throw std::runtime_error("trajectory index missing in " + dir.string());
    std::vector<TrajectoryIndexEntry> out;
    std::string line;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        TrajectoryIndexEntry e;
        if (!(ss >> e.t >> e.filename >> e.norm_u >> e.norm_grad_u >> e.norm_Au >> e.norm_ut))
            throw std::runtime_error("trajectory index: malformed line '" + line + "'");
        out.push_back(std::move(e));
    }
    return out;
}

TruthTrajectory load_trajectory(const std::filesystem::path& dir) {
    const auto entries = read_trajectory_index(dir);
    if (entries.empty()) throw std::runtime_error("trajectory dump is empty in " + dir.string());
    TruthTrajectory traj;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        SpectralField u = load_snapshot(dir / e.filename);
        std::string rate_name = e.filename;
        if (rate_name.rfind("u_", 0) == 0) rate_name = "ut_" + rate_name.substr(2);
        SpectralField ut = load_snapshot(dir / rate_name);
        if (i == 0) traj.grid = u.grid();
        traj.times.push_back(e.t);
        traj.scalars.push_back(
            TrajectoryScalars{e.t, e.norm_u, e.norm_grad_u, e.norm_Au, e.norm_ut});
        traj.states.push_back(std::move(u));
        traj.derivatives.push_back(std::move(ut));
    }
    if (traj.times.size() >= 2) traj.dt = traj.times[1] - traj.times[0];
    return traj;
}

} // namespace bardina
