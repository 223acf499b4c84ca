"""Distribution solver: stencil correctness, stability guards, run bookkeeping."""
import math

import numpy as np
import pytest

from oscenv import (
    CflError,
    ConfigError,
    EnvConfig,
    Field2D,
    Grid2D,
    MassError,
    StabilityError,
    cfl_check,
    cfl_report,
    fp_step,
    init_gaussian,
    normalize,
    run_fp,
)
from oscenv.fp import delta_surrogate
from oscenv.model import omega0

from conftest import gaussian_on


def reference_step(v, grid, cfg, t, dt):
    """Independent dense restatement of the explicit update, roll-based."""
    u1 = grid.u1[None, :]
    u2 = grid.u2[:, None]
    om = omega0(t, cfg)
    k1 = u1 * u1 - u2 * u2 + om * om
    vp1 = np.roll(v, -1, axis=1)
    vm1 = np.roll(v, 1, axis=1)
    vp2 = np.roll(v, -1, axis=0)
    vm2 = np.roll(v, 1, axis=0)
    out = (
        v
        + cfg.eps_r * dt / grid.du1 ** 2 * (vp1 - 2.0 * v + vm1)
        + cfg.eps_i * dt / grid.du2 ** 2 * (vp2 - 2.0 * v + vm2)
        + dt / (2.0 * grid.du1) * k1 * (vp1 - vm1)
        + dt / grid.du2 * (u1 * u2) * (vp2 - vm2)
        + 4.0 * dt * u1 * v
    )
    out[0, :] = 0.0
    out[-1, :] = 0.0
    out[:, 0] = 0.0
    out[:, -1] = 0.0
    return out


def test_init_gaussian_mass_peak_and_ring(weak_cfg):
    g = Grid2D.centered(M=201, L=201, du1=0.02, du2=0.02)
    f = init_gaussian(g, center=(0.0, 0.0))
    from oscenv.fields import trapezoid_mass

    assert trapezoid_mass(g, f.values) == pytest.approx(1.0, abs=1e-5)
    assert f.values[g.u2_zero_index, g.u1_zero_index] == 500.0
    assert np.all(f.values[0, :] == 0.0)
    assert np.all(f.values[:, 0] == 0.0)


def test_init_gaussian_rejects_edge_center():
    g = Grid2D.centered(M=101, L=101, du1=0.02, du2=0.02)
    with pytest.raises(ConfigError):
        init_gaussian(g, center=(0.0, 0.96))
    with pytest.raises(ConfigError):
        init_gaussian(g, sigma=-1.0)


def test_delta_surrogate_sits_at_switch_on_point(weak_cfg):
    g = Grid2D.centered(M=101, L=401, du1=0.05, du2=0.02)
    f = delta_surrogate(g, weak_cfg)
    k, j = np.unravel_index(np.argmax(f.values), f.values.shape)
    assert g.u1[j] == 0.0
    assert g.u2[k] == 2.5
    assert f.values[k, j] == 500.0
    assert f.t == weak_cfg.t0


def test_cfl_report_hand_values(weak_cfg):
    # 11x11 grid, du=0.1, corners at |u1|=|u2|=0.5, omega_sup=3:
    # k1_max = |0.25 - 0.25 + 9| = 9, k2_max = 2*0.25 = 0.5
    g = Grid2D.centered(M=11, L=11, du1=0.1, du2=0.1)
    rep = cfl_report(g, weak_cfg, dt=0.01)
    assert rep.r1 == pytest.approx(0.01)
    assert rep.r2 == pytest.approx(0.01)
    assert rep.courant == pytest.approx(0.01 * 9.0 / 0.2 + 0.01 * 0.5 / 0.1)
    assert rep.max_dt_diffusive == pytest.approx(0.25)
    assert rep.max_dt_advective == pytest.approx(1.0 / 50.0)
    assert rep.max_dt == pytest.approx(0.02)
    assert rep.ok
    assert cfl_check(g, weak_cfg, 0.01)
    assert not cfl_check(g, weak_cfg, 0.03)


def test_fp_step_matches_reference(weak_cfg, small_grid):
    rng = np.random.default_rng(11)
    v = rng.standard_normal(small_grid.shape)
    v[0, :] = v[-1, :] = 0.0
    v[:, 0] = v[:, -1] = 0.0
    dt = 2e-5
    stepped = fp_step(Field2D(small_grid, v, t=0.3), weak_cfg, dt)
    expect = reference_step(v, small_grid, weak_cfg, 0.3, dt)
    scale = np.max(np.abs(expect))
    assert np.max(np.abs(stepped.values - expect)) < 1e-13 * scale
    assert stepped.t == pytest.approx(0.3 + dt)


def test_fp_step_is_linear(weak_cfg, small_grid):
    rng = np.random.default_rng(12)
    a = rng.standard_normal(small_grid.shape)
    b = rng.standard_normal(small_grid.shape)
    dt = 2e-5
    fa = Field2D(small_grid, a, t=0.0)
    fb = Field2D(small_grid, b, t=0.0)
    fab = Field2D(small_grid, 2.0 * a - 3.0 * b, t=0.0)
    lhs = fp_step(fab, weak_cfg, dt).values
    rhs = 2.0 * fp_step(fa, weak_cfg, dt).values - 3.0 * fp_step(fb, weak_cfg, dt).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(rhs))


def test_fp_step_is_local(weak_cfg, small_grid):
    v = np.zeros(small_grid.shape)
    k, j = 8, 10
    v[k, j] = 1.0
    out = fp_step(Field2D(small_grid, v, t=0.0), weak_cfg, 1e-5).values
    touched = np.argwhere(out != 0.0)
    for kk, jj in touched:
        assert abs(kk - k) + abs(jj - j) <= 1


def test_fp_step_keeps_boundary_ring_zero(weak_cfg, small_grid):
    f = Field2D(small_grid, gaussian_on(small_grid, (0.0, 0.0), 0.3), t=0.0)
    for _ in range(20):
        f = fp_step(f, weak_cfg, 1e-5)
    assert np.all(f.values[0, :] == 0.0)
    assert np.all(f.values[-1, :] == 0.0)
    assert np.all(f.values[:, 0] == 0.0)
    assert np.all(f.values[:, -1] == 0.0)


def test_fp_step_preserves_u2_parity(weak_cfg, square_grid):
    # even initial data stays even: k1 and the u2-advection are parity-clean
    from oscenv.fields import reflect_u2

    f = Field2D(square_grid, gaussian_on(square_grid, (0.5, 0.0), 0.4), t=0.0)
    for _ in range(50):
        f = fp_step(f, weak_cfg, 1e-5)
    asym = np.max(np.abs(f.values - reflect_u2(square_grid, f.values)))
    assert asym < 1e-12 * np.max(np.abs(f.values))


def test_fp_step_enforces_cfl(weak_cfg, small_grid):
    f = Field2D(small_grid, np.zeros(small_grid.shape), t=0.0)
    with pytest.raises(CflError) as exc:
        fp_step(f, weak_cfg, 1.0)
    assert exc.value.max_dt is not None
    assert exc.value.max_dt < 1.0


def test_fp_step_flags_nonfinite(weak_cfg, small_grid):
    v = np.zeros(small_grid.shape)
    v[5, 5] = np.nan
    with pytest.raises(StabilityError):
        fp_step(Field2D(small_grid, v, t=0.0), weak_cfg, 1e-5)


def test_normalize_returns_mass(weak_cfg, small_grid):
    v = gaussian_on(small_grid, (0.0, 0.0), 0.3, height=7.0)
    f, alpha = normalize(Field2D(small_grid, v, t=1.0))
    from oscenv.fields import trapezoid_mass

    assert alpha == pytest.approx(trapezoid_mass(small_grid, v))
    assert trapezoid_mass(small_grid, f.values) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(MassError):
        normalize(Field2D(small_grid, np.zeros(small_grid.shape), t=0.0))


def test_run_fp_bookkeeping(weak_cfg):
    g = Grid2D.centered(M=49, L=65, du1=0.1, du2=0.1)
    dt = 5e-4
    run = run_fp(weak_cfg, g, dt=dt, t_end=0.1, snapshot_times=(0.05, 0.1),
                 alpha_every=50)
    assert [s.t for s in run.snapshots] == pytest.approx([0.05, 0.1])
    assert len(run.snapshot_alphas) == 2
    # mass series: t0, every 50 steps, final step
    assert run.alpha_times[0] == 0.0
    assert run.alpha_times[-1] == pytest.approx(0.1)
    assert np.all(np.isfinite(run.alpha_values))
    from oscenv.fields import trapezoid_mass

    for s in run.snapshots:
        assert trapezoid_mass(g, s.values) == pytest.approx(1.0, abs=1e-9)


def test_run_fp_rejects_bad_inputs(weak_cfg, small_grid):
    other = Grid2D.centered(M=21, L=17, du1=0.1, du2=0.1)
    init = Field2D(other, np.zeros(other.shape), t=0.0)
    with pytest.raises(ConfigError):
        run_fp(weak_cfg, small_grid, dt=1e-5, t_end=0.01, init=init)
    with pytest.raises(ConfigError):
        run_fp(weak_cfg, small_grid, dt=1e-5, t_end=-1.0)
