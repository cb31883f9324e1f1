#include "bardina/bilinear.hpp"
#include "bardina/config.hpp"
#include "bardina/harness.hpp"
#include "bardina/nudging.hpp"
#include "bardina/operators.hpp"
#include "bardina/random_field.hpp"
#include "bardina/recovery.hpp"
#include "bardina/report_io.hpp"
#include "bardina/snapshot_io.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace bardina;

namespace {

py::array_t<std::complex<double>> coefficients(const SpectralField& f) {
    const int n = f.n();
    py::array_t<std::complex<double>> out({3, n, n, n});
    std::memcpy(out.mutable_data(), f.raw().data(), f.raw().size() * sizeof(Complex));
    return out;
}

SpectralField field_from_coefficients(const GridSpec& grid,
                                      py::array_t<std::complex<double>, py::array::c_style> arr,
                                      bool enforce_symmetry) {
    const int n = grid.n_grid;
    if (arr.ndim() != 4 || arr.shape(0) != 3 || arr.shape(1) != n || arr.shape(2) != n ||
        arr.shape(3) != n)
        throw std::invalid_argument("expected a (3, n, n, n) complex array matching the grid");
    SpectralField f(grid);
    std::memcpy(f.raw().data(), arr.data(), f.raw().size() * sizeof(Complex));
    if (enforce_symmetry) f.enforce_hermitian();
    return f;
}

py::dict report_to_dict(const RunReport& r) {
    py::dict d;
    d["halt"] = to_string(r.halt);
    d["alpha_true_sq"] = r.alpha_true_sq;
    d["beta_final_sq"] = r.beta_final_sq;
    d["fitted_contraction_ratio"] = r.fitted_contraction_ratio;
    d["fitted_sync_rate"] = r.fitted_sync_rate;
    d["envelope_violations"] = r.envelope_violations;
    d["beta_sq_errors"] = r.beta_sq_errors;
    d["g_combos"] = r.g_combos;
    d["update_error_bound"] = r.update_error_bound;
    d["wall_time_seconds"] = r.wall_time_seconds;
    py::list iters;
    for (const auto& it : r.iterations) {
        py::dict ji;
        ji["n"] = it.n;
        ji["t_n"] = it.t_n;
        ji["t_hat_n"] = it.t_hat_n;
        ji["t_np1"] = it.t_np1;
        ji["eta_n"] = it.eta_n;
        ji["N_n"] = it.N_n;
        ji["N_tilde_n"] = it.N_tilde_n;
        ji["beta_n_sq"] = it.beta_n_sq;
        ji["beta_np1_sq"] = it.beta_np1_sq;
        ji["delta_n"] = it.delta_n;
        ji["zeta_n"] = it.zeta_n;
        ji["g_norm_combo"] = it.g_norm_combo;
        ji["conditions_passed"] = it.conditions.passed_string();
        ji["status"] = to_string(it.status);
        iters.append(ji);
    }
    d["iterations"] = iters;
    return d;
}

} // namespace

PYBIND11_MODULE(_bardina, m) {
    m.doc() = "periodic-box spectral solver and filter-scale recovery toolkit";

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double L, int n_grid, double dealias_fraction) {
                 GridSpec g;
                 g.box_length = L;
                 g.n_grid = n_grid;
                 g.dealias_fraction = dealias_fraction;
                 g.validate();
                 return g;
             }),
             py::arg("box_length") = 2.0 * 3.14159265358979323846, py::arg("n_grid") = 32,
             py::arg("dealias_fraction") = 2.0 / 3.0)
        .def_readonly("box_length", &GridSpec::box_length)
        .def_readonly("n_grid", &GridSpec::n_grid)
        .def_readonly("dealias_fraction", &GridSpec::dealias_fraction)
        .def("lambda1", &GridSpec::lambda1)
        .def("max_wave", &GridSpec::max_wave)
        .def("dealias_max_wave", &GridSpec::dealias_max_wave)
        .def("__repr__", [](const GridSpec& g) {
            return "GridSpec(L=" + std::to_string(g.box_length) +
                   ", n=" + std::to_string(g.n_grid) + ")";
        });

    py::class_<SpectralField>(m, "SpectralField")
        .def(py::init([](const GridSpec& g) { return SpectralField::zero(g); }), py::arg("grid"))
        .def_property_readonly("grid", &SpectralField::grid)
        .def_property_readonly("divergence_free", &SpectralField::divergence_free)
        .def_property_readonly("dealiased", &SpectralField::dealiased)
        .def("coefficients", &coefficients,
             "Fourier coefficients as a (3, n, n, n) complex array (FFT index order)")
        .def("hermitian_defect", &SpectralField::hermitian_defect)
        .def("divergence_defect", &SpectralField::divergence_defect)
        .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
        .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
        .def("__rmul__", [](const SpectralField& f, double s) { return s * f; });

    m.def("field_from_coefficients", &field_from_coefficients, py::arg("grid"),
          py::arg("coefficients"), py::arg("enforce_symmetry") = true,
          "Build a field from a (3, n, n, n) complex coefficient array");

    // spectral operators
    m.def("leray_project", &leray_project, py::arg("field"));
    m.def("apply_A", &apply_A, py::arg("field"));
    m.def("helmholtz_inverse", &helmholtz_inverse, py::arg("field"), py::arg("alpha_sq"));
    m.def("low_mode_project", &low_mode_project, py::arg("field"), py::arg("cutoff"),
          py::arg("inclusive") = false);
    m.def("sobolev_norm_sq", &sobolev_norm_sq, py::arg("field"), py::arg("s"));
    m.def("inner_product", &inner_product, py::arg("a"), py::arg("b"), py::arg("s"));
    m.def("dealias", &dealias, py::arg("field"));
    m.def("bilinear_B", &bilinear_B, py::arg("u"), py::arg("v"));
    m.def("max_pointwise_speed", &max_pointwise_speed, py::arg("field"));
    m.def("physical_l2_norm_sq", &physical_l2_norm_sq, py::arg("field"));

    py::class_<SpectrumProfile>(m, "SpectrumProfile")
        .def(py::init([](const std::string& kind, double peak_wave, double exponent, int max_wave,
                         double target_norm) {
                 SpectrumProfile p;
                 if (kind == "gaussian")
                     p.kind = SpectrumProfile::Kind::gaussian;
                 else if (kind == "power_law")
                     p.kind = SpectrumProfile::Kind::power_law;
                 else
                     throw std::invalid_argument("kind must be 'gaussian' or 'power_law'");
                 p.peak_wave = peak_wave;
                 p.exponent = exponent;
                 p.max_wave = max_wave;
                 p.target_norm = target_norm;
                 return p;
             }),
             py::arg("kind") = "gaussian", py::arg("peak_wave") = 2.0, py::arg("exponent") = 2.0,
             py::arg("max_wave") = 0, py::arg("target_norm") = 0.0);
    m.def("random_divfree_field", &random_divfree_field, py::arg("grid"), py::arg("profile"),
          py::arg("seed"));

    // model
    py::class_<ForcingSpec>(m, "ForcingSpec")
        .def(py::init([](const std::string& kind, double amplitude) {
                 ForcingSpec f;
                 f.kind = forcing_kind_from_string(kind);
                 f.amplitude = amplitude;
                 return f;
             }),
             py::arg("kind") = "manufactured_steady", py::arg("amplitude") = 0.1)
        .def_property_readonly("kind", [](const ForcingSpec& f) { return to_string(f.kind); })
        .def_readonly("amplitude", &ForcingSpec::amplitude);
    m.def("manufactured_target", &manufactured_target, py::arg("forcing"), py::arg("grid"));

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double nu, double alpha, const ForcingSpec& forcing) {
                 PhysicalParams p;
                 p.nu = nu;
                 p.alpha = alpha;
                 p.forcing = forcing;
                 p.validate();
                 return p;
             }),
             py::arg("nu") = 0.1, py::arg("alpha") = 0.25, py::arg("forcing") = ForcingSpec{})
        .def_readonly("nu", &PhysicalParams::nu)
        .def_readonly("alpha", &PhysicalParams::alpha)
        .def_readonly("forcing", &PhysicalParams::forcing);

    py::class_<TruthSystem>(m, "TruthSystem")
        .def_static("make", &TruthSystem::make, py::arg("grid"), py::arg("params"))
        .def_readonly("grid", &TruthSystem::grid)
        .def_readonly("params", &TruthSystem::params)
        .def_property_readonly("forcing_field",
                               [](const TruthSystem& s) { return s.forcing.field; })
        .def_property_readonly("forcing_sup_norm",
                               [](const TruthSystem& s) { return s.forcing.sup_norm; });
    m.def("rhs_truth", &rhs_truth, py::arg("u"), py::arg("system"));
    m.def("step_truth", &step_truth, py::arg("u"), py::arg("dt"), py::arg("system"));

    py::class_<TrajectoryScalars>(m, "TrajectoryScalars")
        .def_readonly("t", &TrajectoryScalars::t)
        .def_readonly("norm_u", &TrajectoryScalars::norm_u)
        .def_readonly("norm_grad_u", &TrajectoryScalars::norm_grad_u)
        .def_readonly("norm_Au", &TrajectoryScalars::norm_Au)
        .def_readonly("norm_ut", &TrajectoryScalars::norm_ut);
    py::class_<TruthTrajectory>(m, "TruthTrajectory")
        .def_readonly("dt", &TruthTrajectory::dt)
        .def_readonly("times", &TruthTrajectory::times)
        .def_readonly("scalars", &TruthTrajectory::scalars)
        .def_readonly("states", &TruthTrajectory::states)
        .def_readonly("derivatives", &TruthTrajectory::derivatives);
    m.def(
        "simulate_truth",
        [](const SpectralField& u0, double horizon, double dt, const TruthSystem& sys,
           int snapshot_stride) {
            SimulateOptions opt;
            opt.snapshot_stride = snapshot_stride;
            return simulate_truth(u0, horizon, dt, sys, opt);
        },
        py::arg("u0"), py::arg("horizon"), py::arg("dt"), py::arg("system"),
        py::arg("snapshot_stride") = 1);

    // nudging
    py::class_<NudgedState>(m, "NudgedState")
        .def(py::init([](SpectralField w, double beta_sq, double eta, int obs_cutoff) {
                 NudgedState s;
                 s.w = std::move(w);
                 s.beta_sq = beta_sq;
                 s.eta = eta;
                 s.obs_cutoff = obs_cutoff;
                 s.validate(s.w.grid());
                 return s;
             }),
             py::arg("w"), py::arg("beta_sq"), py::arg("eta"), py::arg("obs_cutoff"))
        .def_readonly("w", &NudgedState::w)
        .def_readonly("beta_sq", &NudgedState::beta_sq)
        .def_readonly("eta", &NudgedState::eta)
        .def_readonly("obs_cutoff", &NudgedState::obs_cutoff);
    m.def(
        "rhs_nudged",
        [](const NudgedState& s, const SpectralField& obs, const TruthSystem& sys) {
            return rhs_nudged(s, obs, sys.forcing, sys.params.nu);
        },
        py::arg("state"), py::arg("obs_u_now"), py::arg("system"));
    m.def(
        "step_nudged",
        [](NudgedState s, double dt, const SpectralField& obs_now, const SpectralField& obs_next,
           const TruthSystem& sys) {
            return step_nudged(std::move(s), dt, obs_now, obs_next, sys.forcing, sys.params.nu);
        },
        py::arg("state"), py::arg("dt"), py::arg("obs_now"), py::arg("obs_next"),
        py::arg("system"));
    m.def("sync_error", &sync_error, py::arg("w"), py::arg("u"), py::arg("beta_sq"));

    // recovery / harness
    py::class_<RecoverySchedule>(m, "RecoverySchedule")
        .def(py::init<>())
        .def_readwrite("alpha0", &RecoverySchedule::alpha0)
        .def_readwrite("alpha1", &RecoverySchedule::alpha1)
        .def_readwrite("beta1_sq", &RecoverySchedule::beta1_sq)
        .def_readwrite("epsilon", &RecoverySchedule::epsilon)
        .def_readwrite("eta", &RecoverySchedule::eta)
        .def_readwrite("n_obs", &RecoverySchedule::n_obs)
        .def_readwrite("n_tilde", &RecoverySchedule::n_tilde)
        .def_readwrite("c_gn", &RecoverySchedule::c_gn)
        .def_readwrite("settle", &RecoverySchedule::settle)
        .def_readwrite("window", &RecoverySchedule::window)
        .def_readwrite("t_final", &RecoverySchedule::t_final)
        .def_readwrite("max_iters", &RecoverySchedule::max_iters)
        .def_property(
            "mode", [](const RecoverySchedule& s) { return to_string(s.mode); },
            [](RecoverySchedule& s, const std::string& v) { s.mode = recovery_mode_from_string(v); });

    py::class_<InitialCondition>(m, "InitialCondition")
        .def(py::init<>())
        .def_readwrite("amplitude", &InitialCondition::amplitude)
        .def_readwrite("noise", &InitialCondition::noise)
        .def_readwrite("noise_max_wave", &InitialCondition::noise_max_wave);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("grid", &ExperimentConfig::grid)
        .def_readwrite("physics", &ExperimentConfig::physics)
        .def_readwrite("schedule", &ExperimentConfig::schedule)
        .def_readwrite("dt", &ExperimentConfig::dt)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_readwrite("initial", &ExperimentConfig::initial)
        .def_readwrite("observer_starts_at_truth", &ExperimentConfig::observer_starts_at_truth);
    m.def("reference_config", &reference_config);
    m.def("default_initial", &default_initial, py::arg("forcing"));
    m.def("build_initial", &build_initial, py::arg("initial"), py::arg("grid"), py::arg("forcing"),
          py::arg("seed"));

    m.def(
        "run_twin_experiment",
        [](const ExperimentConfig& cfg) { return report_to_dict(run_twin_experiment(cfg)); },
        py::arg("config"),
        "Run the full twin experiment; returns the report as a dictionary");

    m.def(
        "fit_geometric",
        [](const std::vector<double>& v) { return fit_geometric(v).ratio; },
        py::arg("values"));
    m.def(
        "fit_log_linear_rate",
        [](const std::vector<double>& t, const std::vector<double>& v, double t0, double t1) {
            return fit_log_linear_rate(t, v, t0, t1);
        },
        py::arg("times"), py::arg("values"), py::arg("t_begin"), py::arg("t_end"));

    m.def(
        "parse_config",
        [](const std::filesystem::path& p, const std::vector<std::string>& overrides) {
            return parse_config(p, overrides);
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
    m.def("render_config", &render_config, py::arg("config"));

    m.def("save_snapshot", &save_snapshot, py::arg("field"), py::arg("path"));
    m.def("load_snapshot", &load_snapshot, py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
