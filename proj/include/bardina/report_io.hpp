#pragma once

#include "bardina/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bardina {

/// iterations.csv schema (one row per iteration):
///   n,t_n,t_hat_n,t_np1,eta_n,N_n,N_tilde_n,beta_n_sq,beta_np1_sq,
///   abs_beta_sq_err,delta_n,zeta_n,g_norm_combo,conditions_passed,status
/// Floating-point cells carry 17 significant digits; twin-only cells are "nan"
/// outside twin mode; conditions_passed is the 8-character 0/1 string in
/// checking order.
void write_iterations_csv(const RunReport& report, const std::filesystem::path& path);

struct IterationCsvRow {
    int n = 0;
    double t_n = 0, t_hat_n = 0, t_np1 = 0;
    double eta_n = 0;
    int N_n = 0, N_tilde_n = 0;
    double beta_n_sq = 0, beta_np1_sq = 0;
    double abs_beta_sq_err = 0, delta_n = 0, zeta_n = 0, g_norm_combo = 0;
    std::string conditions_passed;
    std::string status;
};
std::vector<IterationCsvRow> read_iterations_csv(const std::filesystem::path& path);

void write_report_json(const RunReport& report, const std::filesystem::path& path);

/// Self-contained SVG line chart (log-scale y), no external tooling involved.
void write_svg_line_chart(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<double>& x, const std::vector<double>& y);

/// Emits plots/beta_error.svg and plots/sync_error.svg from the report data.
void write_plots(const RunReport& report, const std::filesystem::path& out_dir);

/// Regenerates the plots from a previously written iterations.csv.
void write_plots_from_csv(const std::filesystem::path& csv,
                          const std::filesystem::path& out_dir);

} // namespace bardina
