#pragma once

#include "bardina/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bardina {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the flat `key = value` format (one pair per line, `#` comments,
/// dotted section prefixes). Recognized keys:
///   domain.L grid.n_grid grid.dealias_fraction physics.nu physics.alpha_true
///   forcing.kind forcing.amplitude recovery.alpha0 recovery.alpha1
///   recovery.beta1_sq recovery.epsilon recovery.mode recovery.eta
///   recovery.N_obs recovery.N_tilde recovery.c_gn time.dt time.settle
///   time.window time.T_final time.max_iters seed output.dir
/// Unknown keys are rejected by name; overrides ("key=value") win over file
/// values; every value is validated with the offending key named on failure.
ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});

/// Same, from an already-loaded text blob (used by tests and by resolved-file
/// round trips).
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {},
                                   const std::string& origin = "<string>");

/// Canonical echo of a resolved config; re-parsing it reproduces the config
/// exactly (floating-point values use 17 significant digits).
std::string render_config(const ExperimentConfig& cfg);
void write_resolved_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

} // namespace bardina
