#include "bardina/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bardina {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "domain.L",          "grid.n_grid",       "grid.dealias_fraction",
        "physics.nu",        "physics.alpha_true", "forcing.kind",
        "forcing.amplitude", "recovery.alpha0",   "recovery.alpha1",
        "recovery.beta1_sq", "recovery.epsilon",  "recovery.mode",
        "recovery.eta",      "recovery.N_obs",    "recovery.N_tilde",
        "recovery.c_gn",     "time.dt",           "time.settle",
        "time.window",       "time.T_final",      "time.max_iters",
        "seed",              "output.dir",
    };
    return keys;
}

struct KeyValues {
    std::map<std::string, std::string> values;

    void set(const std::string& key, const std::string& value, const std::string& origin) {
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(origin + ": unknown key '" + key + "'");
        values[key] = value;
    }

    bool has(const std::string& key) const { return values.count(key) > 0; }

    double number(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected a number, got '" + it->second + "'");
        }
    }

    long integer(const std::string& key, long fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            std::size_t pos = 0;
            const long v = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected an integer, got '" + it->second + "'");
        }
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected an unsigned integer, got '" +
                              it->second + "'");
        }
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
};

void parse_line(KeyValues& kv, const std::string& raw, const std::string& origin) {
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
        throw ConfigError(origin + ": expected 'key = value', got '" + trim(raw) + "'");
    kv.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin);
}

ExperimentConfig config_from(const KeyValues& kv) {
    ExperimentConfig cfg = reference_config();

    cfg.grid.box_length = kv.number("domain.L", cfg.grid.box_length);
    cfg.grid.n_grid = static_cast<int>(kv.integer("grid.n_grid", cfg.grid.n_grid));
    cfg.grid.dealias_fraction = kv.number("grid.dealias_fraction", cfg.grid.dealias_fraction);

    cfg.physics.nu = kv.number("physics.nu", cfg.physics.nu);
    cfg.physics.alpha = kv.number("physics.alpha_true", cfg.physics.alpha);
    cfg.physics.forcing.kind =
        forcing_kind_from_string(kv.text("forcing.kind", to_string(cfg.physics.forcing.kind)));
    cfg.physics.forcing.amplitude = kv.number("forcing.amplitude", cfg.physics.forcing.amplitude);

    cfg.schedule.alpha0 = kv.number("recovery.alpha0", cfg.schedule.alpha0);
    cfg.schedule.alpha1 = kv.number("recovery.alpha1", cfg.schedule.alpha1);
    cfg.schedule.beta1_sq = kv.number("recovery.beta1_sq", cfg.schedule.beta1_sq);
    cfg.schedule.epsilon = kv.number("recovery.epsilon", cfg.schedule.epsilon);
    cfg.schedule.mode = recovery_mode_from_string(kv.text("recovery.mode", to_string(cfg.schedule.mode)));
    cfg.schedule.eta = kv.number("recovery.eta", cfg.schedule.eta);
    cfg.schedule.n_obs = static_cast<int>(kv.integer("recovery.N_obs", cfg.schedule.n_obs));
    cfg.schedule.n_tilde = static_cast<int>(kv.integer("recovery.N_tilde", cfg.schedule.n_tilde));
    cfg.schedule.c_gn = kv.number("recovery.c_gn", cfg.schedule.c_gn);

    cfg.dt = kv.number("time.dt", cfg.dt);
    cfg.schedule.settle = kv.number("time.settle", cfg.schedule.settle);
    cfg.schedule.window = kv.number("time.window", cfg.schedule.window);
    cfg.schedule.t_final = kv.number("time.T_final", cfg.schedule.t_final);
    cfg.schedule.max_iters = static_cast<int>(kv.integer("time.max_iters", cfg.schedule.max_iters));

    cfg.seed = kv.unsigned_integer("seed", cfg.seed);
    cfg.output_dir = kv.text("output.dir", cfg.output_dir);

    // strict mode pins the Gagliardo-Nirenberg constant explicitly
    if (cfg.schedule.mode == RecoveryMode::strict && !kv.has("recovery.c_gn"))
        throw ConfigError("recovery.c_gn: required in strict mode (no sharp default exists)");

    cfg.initial = default_initial(cfg.physics.forcing);

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides,
                                   const std::string& origin) {
    KeyValues kv;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        parse_line(kv, line, origin + ":" + std::to_string(lineno));
    }
    for (const auto& ov : overrides) parse_line(kv, ov, "override '" + ov + "'");
    return config_from(kv);
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config file not found: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), overrides, path.string());
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string render_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "domain.L = " << fmt17(cfg.grid.box_length) << '\n';
    os << "grid.n_grid = " << cfg.grid.n_grid << '\n';
    os << "grid.dealias_fraction = " << fmt17(cfg.grid.dealias_fraction) << '\n';
    os << "physics.nu = " << fmt17(cfg.physics.nu) << '\n';
    os << "physics.alpha_true = " << fmt17(cfg.physics.alpha) << '\n';
    os << "forcing.kind = " << to_string(cfg.physics.forcing.kind) << '\n';
    os << "forcing.amplitude = " << fmt17(cfg.physics.forcing.amplitude) << '\n';
    os << "recovery.alpha0 = " << fmt17(cfg.schedule.alpha0) << '\n';
    os << "recovery.alpha1 = " << fmt17(cfg.schedule.alpha1) << '\n';
    os << "recovery.beta1_sq = " << fmt17(cfg.schedule.beta1_sq) << '\n';
    os << "recovery.epsilon = " << fmt17(cfg.schedule.epsilon) << '\n';
    os << "recovery.mode = " << to_string(cfg.schedule.mode) << '\n';
    os << "recovery.eta = " << fmt17(cfg.schedule.eta) << '\n';
    os << "recovery.N_obs = " << cfg.schedule.n_obs << '\n';
    os << "recovery.N_tilde = " << cfg.schedule.n_tilde << '\n';
    os << "recovery.c_gn = " << fmt17(cfg.schedule.c_gn) << '\n';
    os << "time.dt = " << fmt17(cfg.dt) << '\n';
    os << "time.settle = " << fmt17(cfg.schedule.settle) << '\n';
    os << "time.window = " << fmt17(cfg.schedule.window) << '\n';
    os << "time.T_final = " << fmt17(cfg.schedule.t_final) << '\n';
    os << "time.max_iters = " << cfg.schedule.max_iters << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "output.dir = " << cfg.output_dir << '\n';
    return os.str();
}

void write_resolved_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << render_config(cfg);
}

} // namespace bardina
