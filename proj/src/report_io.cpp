#include "bardina/report_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bardina {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double json_safe(double v) {
    // JSON has no inf/nan literals; clamp diagnostics into representable values
    if (std::isnan(v)) return v; // nlohmann serializes NaN as null
    if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
    return v;
}

} // namespace

void write_iterations_csv(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "n,t_n,t_hat_n,t_np1,eta_n,N_n,N_tilde_n,beta_n_sq,beta_np1_sq,abs_beta_sq_err,"
          "delta_n,zeta_n,g_norm_combo,conditions_passed,status\n";
    for (const auto& r : report.iterations) {
        const double err = report.alpha_true_sq > 0
                               ? std::abs(r.beta_n_sq - report.alpha_true_sq)
                               : std::numeric_limits<double>::quiet_NaN();
        os << r.n << ',' << fmt17(r.t_n) << ',' << fmt17(r.t_hat_n) << ',' << fmt17(r.t_np1)
           << ',' << fmt17(r.eta_n) << ',' << r.N_n << ',' << r.N_tilde_n << ','
           << fmt17(r.beta_n_sq) << ',' << fmt17(r.beta_np1_sq) << ',' << fmt17(err) << ','
           << fmt17(r.delta_n) << ',' << fmt17(r.zeta_n) << ',' << fmt17(r.g_norm_combo) << ','
           << r.conditions.passed_string() << ',' << to_string(r.status) << '\n';
    }
}

std::vector<IterationCsvRow> read_iterations_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty csv " + path.string());
    std::vector<IterationCsvRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 15)
            throw std::runtime_error("iterations.csv: expected 15 columns, got " +
                                     std::to_string(cells.size()));
        IterationCsvRow r;
        r.n = std::stoi(cells[0]);
        r.t_n = std::stod(cells[1]);
        r.t_hat_n = std::stod(cells[2]);
        r.t_np1 = std::stod(cells[3]);
        r.eta_n = std::stod(cells[4]);
        r.N_n = std::stoi(cells[5]);
        r.N_tilde_n = std::stoi(cells[6]);
        r.beta_n_sq = std::stod(cells[7]);
        r.beta_np1_sq = std::stod(cells[8]);
        r.abs_beta_sq_err = std::stod(cells[9]);
        r.delta_n = std::stod(cells[10]);
        r.zeta_n = std::stod(cells[11]);
        r.g_norm_combo = std::stod(cells[12]);
        r.conditions_passed = cells[13];
        r.status = cells[14];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_report_json(const RunReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["halt"] = to_string(report.halt);
    j["alpha_true_sq"] = report.alpha_true_sq;
    j["beta_final_sq"] = report.beta_final_sq;
    j["fitted_contraction_ratio"] = json_safe(report.fitted_contraction_ratio);
    j["fitted_sync_rate"] = json_safe(report.fitted_sync_rate);
    j["wall_time_seconds"] = report.wall_time_seconds;
    j["envelope_violations"] = report.envelope_violations;
    j["beta_sq_errors"] = report.beta_sq_errors;
    nlohmann::json combos = nlohmann::json::array();
    for (double v : report.g_combos) combos.push_back(json_safe(v));
    j["g_combos"] = combos;
    nlohmann::json bounds = nlohmann::json::array();
    for (double v : report.update_error_bound) bounds.push_back(json_safe(v));
    j["update_error_bound"] = bounds;
    j["bound_violations_per_iter"] = report.bound_violations_per_iter;

    nlohmann::json iters = nlohmann::json::array();
    for (const auto& r : report.iterations) {
        nlohmann::json ji;
        ji["n"] = r.n;
        ji["t_n"] = r.t_n;
        ji["t_hat_n"] = r.t_hat_n;
        ji["t_np1"] = r.t_np1;
        ji["eta_n"] = r.eta_n;
        ji["N_n"] = r.N_n;
        ji["N_tilde_n"] = r.N_tilde_n;
        ji["beta_n_sq"] = r.beta_n_sq;
        ji["beta_np1_sq"] = r.beta_np1_sq;
        ji["delta_n"] = r.delta_n;
        ji["zeta_n"] = r.zeta_n;
        ji["g_norm_combo"] = json_safe(r.g_norm_combo);
        ji["status"] = to_string(r.status);
        ji["positivity_breach"] = r.positivity_breach;
        ji["conditions_passed"] = r.conditions.passed_string();
        nlohmann::json margins = nlohmann::json::object();
        for (std::size_t i = 0; i < r.conditions.checks.size(); ++i)
            margins[ConditionReport::names()[i]] = json_safe(r.conditions.checks[i].margin);
        ji["condition_margins"] = margins;
        iters.push_back(std::move(ji));
    }
    j["iterations"] = iters;

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

void write_svg_line_chart(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("svg chart: size mismatch");
    const int W = 640, H = 420, ML = 70, MR = 20, MT = 40, MB = 50;

    double xmin = 0, xmax = 1, ymin_log = 0, ymax_log = 1;
    std::vector<std::pair<double, double>> pts; // (x, log10 y) for positives
    for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] > 0) pts.emplace_back(x[i], std::log10(y[i]));
    if (!pts.empty()) {
        xmin = xmax = pts[0].first;
        ymin_log = ymax_log = pts[0].second;
        for (const auto& [px, py] : pts) {
            xmin = std::min(xmin, px);
            xmax = std::max(xmax, px);
            ymin_log = std::min(ymin_log, py);
            ymax_log = std::max(ymax_log, py);
        }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax_log == ymin_log) ymax_log = ymin_log + 1;
    }
    const auto X = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
    const auto Y = [&](double v) {
        return H - MB - (v - ymin_log) / (ymax_log - ymin_log) * (H - MT - MB);
    };

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << H / 2 << ")\">" << y_label << " (log10)</text>\n";
    // axes
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
       << H - MB << "\" stroke=\"black\"/>\n";
    // y ticks at integer log10 values
    for (int e = static_cast<int>(std::ceil(ymin_log)); e <= static_cast<int>(std::floor(ymax_log));
         ++e) {
        const double yy = Y(e);
        os << "<line x1=\"" << ML - 4 << "\" y1=\"" << yy << "\" x2=\"" << ML << "\" y2=\"" << yy
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ML - 8 << "\" y=\"" << yy + 4
           << "\" text-anchor=\"end\" font-size=\"10\">1e" << e << "</text>\n";
    }
    if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (const auto& [px, py] : pts) os << X(px) << ',' << Y(py) << ' ';
        os << "\"/>\n";
        for (const auto& [px, py] : pts)
            os << "<circle cx=\"" << X(px) << "\" cy=\"" << Y(py)
               << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    } else {
        os << "<text x=\"" << W / 2 << "\" y=\"" << H / 2
           << "\" text-anchor=\"middle\" font-size=\"12\">no positive data</text>\n";
    }
    os << "</svg>\n";
}

namespace {

void emit_plots(const std::vector<double>& iter_idx, const std::vector<double>& beta_err,
                const std::vector<double>& combo_t, const std::vector<double>& combos,
                const std::filesystem::path& out_dir) {
    const auto plots = out_dir / "plots";
    std::filesystem::create_directories(plots);
    write_svg_line_chart(plots / "beta_error.svg", "parameter error |beta_n^2 - alpha^2|",
                         "iteration n", "error", iter_idx, beta_err);
    write_svg_line_chart(plots / "sync_error.svg", "observer error ||g|| + beta ||grad g||",
                         "t", "error", combo_t, combos);
}

} // namespace

void write_plots(const RunReport& report, const std::filesystem::path& out_dir) {
    std::vector<double> idx, err, ts, combos;
    for (const auto& r : report.iterations) {
        idx.push_back(r.n);
        err.push_back(std::abs(r.beta_n_sq - report.alpha_true_sq));
        if (std::isfinite(r.g_norm_combo)) {
            ts.push_back(r.t_n);
            combos.push_back(r.g_norm_combo);
        }
    }
    emit_plots(idx, err, ts, combos, out_dir);
}

void write_plots_from_csv(const std::filesystem::path& csv, const std::filesystem::path& out_dir) {
    const auto rows = read_iterations_csv(csv);
    std::vector<double> idx, err, ts, combos;
    for (const auto& r : rows) {
        idx.push_back(r.n);
        err.push_back(r.abs_beta_sq_err);
        if (std::isfinite(r.g_norm_combo)) {
            ts.push_back(r.t_n);
            combos.push_back(r.g_norm_combo);
        }
    }
    emit_plots(idx, err, ts, combos, out_dir);
}

} // namespace bardina
