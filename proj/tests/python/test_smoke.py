"""Smoke tests for the python bindings: a thin pass over the main operations."""

import math

import numpy as np
import pytest

import bardina


@pytest.fixture(scope="module")
def grid():
    return bardina.GridSpec(n_grid=16)


@pytest.fixture(scope="module")
def field(grid):
    profile = bardina.SpectrumProfile(max_wave=5, target_norm=1.0)
    return bardina.random_divfree_field(grid, profile, 42)


def test_grid_basics(grid):
    assert grid.n_grid == 16
    assert grid.lambda1() == pytest.approx(1.0)
    assert grid.max_wave() == 7


def test_random_field_invariants(field):
    assert field.divergence_free
    assert field.hermitian_defect() < 1e-13
    assert bardina.sobolev_norm_sq(field, 0.0) == pytest.approx(1.0, rel=1e-12)


def test_coefficients_round_trip(grid, field):
    coeffs = field.coefficients()
    assert coeffs.shape == (3, 16, 16, 16)
    back = bardina.field_from_coefficients(grid, coeffs)
    assert np.allclose(back.coefficients(), coeffs)


def test_leray_idempotent(field):
    once = bardina.leray_project(field)
    twice = bardina.leray_project(once)
    assert np.allclose(once.coefficients(), twice.coefficients(), atol=1e-15)


def test_helmholtz_inverse_identity(grid, field):
    forward = field + 0.3 * bardina.apply_A(field)
    back = bardina.helmholtz_inverse(forward, 0.3)
    assert np.allclose(back.coefficients(), field.coefficients(), atol=1e-13)


def test_poincare(field, grid):
    n0 = bardina.sobolev_norm_sq(field, 0.0)
    n1 = bardina.sobolev_norm_sq(field, 1.0)
    assert n0 <= n1 / grid.lambda1() * (1 + 1e-12)


def test_bilinear_pairing(grid):
    profile = bardina.SpectrumProfile(max_wave=grid.dealias_max_wave(), target_norm=1.0)
    u = bardina.random_divfree_field(grid, profile, 1)
    v = bardina.random_divfree_field(grid, profile, 2)
    b = bardina.bilinear_B(u, v)
    pairing = bardina.inner_product(b, v, 0.0)
    scale = math.sqrt(bardina.sobolev_norm_sq(b, 0.0) * bardina.sobolev_norm_sq(v, 0.0))
    assert abs(pairing) / scale < 1e-10


def test_truth_step_decays_single_mode(grid):
    params = bardina.PhysicalParams(nu=0.1, alpha=0.25, forcing=bardina.ForcingSpec("none", 0.0))
    system = bardina.TruthSystem.make(grid, params)
    ic = bardina.default_initial(params.forcing)
    u = bardina.build_initial(ic, grid, params.forcing, 1)
    n0 = math.sqrt(bardina.sobolev_norm_sq(u, 0.0))
    for _ in range(10):
        u = bardina.step_truth(u, 0.05, system)
    n1 = math.sqrt(bardina.sobolev_norm_sq(u, 0.0))
    assert n1 == pytest.approx(n0 * math.exp(-0.1 * grid.lambda1() * 0.5), rel=1e-10)


def test_sync_error():
    grid = bardina.GridSpec(n_grid=8)
    profile = bardina.SpectrumProfile(max_wave=3, target_norm=0.5)
    w = bardina.random_divfree_field(grid, profile, 5)
    g0, g1 = bardina.sync_error(w, bardina.SpectralField(grid), 0.04)
    assert g0 == pytest.approx(bardina.sobolev_norm_sq(w, 0.0), rel=1e-12)
    assert g1 == pytest.approx(0.04 * bardina.sobolev_norm_sq(w, 1.0), rel=1e-12)


def test_fit_geometric():
    assert bardina.fit_geometric([1.0, 0.5, 0.25, 0.125]) == pytest.approx(0.5, rel=1e-10)


def test_tiny_twin_experiment():
    cfg = bardina.reference_config()
    cfg.grid = bardina.GridSpec(n_grid=16)
    cfg.schedule.eta = 10.0
    cfg.schedule.n_obs = 6
    cfg.schedule.n_tilde = 6
    cfg.schedule.settle = 0.2
    cfg.schedule.window = 0.2
    cfg.schedule.max_iters = 2
    cfg.dt = 0.02
    report = bardina.run_twin_experiment(cfg)
    assert report["halt"] == "FinalTime"
    assert len(report["iterations"]) == 2
    errs = [abs(it["beta_n_sq"] - report["alpha_true_sq"]) for it in report["iterations"]]
    errs.append(abs(report["beta_final_sq"] - report["alpha_true_sq"]))
    assert errs[-1] < errs[0]
    assert sum(report["envelope_violations"].values()) == 0


def test_config_render_parse(tmp_path):
    cfg = bardina.reference_config()
    text = bardina.render_config(cfg)
    path = tmp_path / "ref.cfg"
    path.write_text(text)
    back = bardina.parse_config(path)
    assert bardina.render_config(back) == text
    over = bardina.parse_config(path, ["physics.nu=0.2"])
    assert over.physics.nu == 0.2
