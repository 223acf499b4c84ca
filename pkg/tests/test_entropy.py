"""Entropy diagnostics: closed-form checks and the clipping contract."""
import math

import numpy as np
import pytest

from oscenv import ComplexField, ConfigError, EnvConfig, Field2D, Grid2D, MassError
from oscenv.entropy import (
    NEG_REL,
    NEG_TOL,
    EntropySeries,
    entropy_production,
    entropy_series,
    generalized_entropy,
    partial_entropy,
    shannon,
)
from oscenv.fields import trapezoid_mass


def normalized_gaussian(grid, sigma, center=(0.0, 0.0)):
    u1 = grid.u1[None, :]
    u2 = grid.u2[:, None]
    v = np.exp(-(((u1 - center[0]) ** 2 + (u2 - center[1]) ** 2) / (2.0 * sigma ** 2)))
    return v / trapezoid_mass(grid, v)


def test_shannon_matches_gaussian_closed_form():
    # isotropic unit-mass gaussian: S = 1 + ln(2 pi sigma^2)
    g = Grid2D.centered(M=161, L=161, du1=0.1, du2=0.1)
    for sigma in (0.5, 1.0):
        f = Field2D(g, normalized_gaussian(g, sigma), t=0.0)
        assert shannon(f) == pytest.approx(1.0 + math.log(2.0 * math.pi * sigma ** 2),
                                           abs=1e-6)


def test_shannon_can_go_negative_for_sharp_peaks():
    g = Grid2D.centered(M=161, L=161, du1=0.01, du2=0.01)
    f = Field2D(g, normalized_gaussian(g, 0.05), t=0.0)
    # 1 + ln(2 pi 0.0025) = -3.15...
    assert shannon(f) < 0.0


def test_shannon_requires_unit_mass():
    g = Grid2D.centered(M=21, L=21, du1=0.1, du2=0.1)
    with pytest.raises(MassError):
        shannon(Field2D(g, 2.0 * normalized_gaussian(g, 0.3), t=0.0))


def test_negative_clipping_tolerance():
    g = Grid2D.centered(M=41, L=41, du1=0.1, du2=0.1)
    v = normalized_gaussian(g, 0.4)
    ok = v.copy()
    ok[1, 1] = -0.5 * NEG_TOL  # deep-tail node, inside the clip band
    s_ref = shannon(Field2D(g, v, t=0.0))
    s_clip = shannon(Field2D(g, ok, t=0.0))
    assert math.isfinite(s_clip)
    assert s_clip == pytest.approx(s_ref, abs=1e-8)
    # Scheme undershoot scales with the field peak: a dip within the relative
    # band is debris and is clipped without visibly moving the entropy.
    debris = v.copy()
    debris[1, 1] = -0.5 * NEG_REL * float(v.max())
    s_debris = shannon(Field2D(g, debris, t=0.0))
    assert s_debris == pytest.approx(s_ref, abs=1e-4)
    # A dip at field scale is not debris; it must abort.
    bad = v.copy()
    bad[1, 1] = -1e-2 * float(v.max())
    with pytest.raises(MassError):
        shannon(Field2D(g, bad, t=0.0))


def test_partial_entropy_needs_no_mass():
    g = Grid2D.centered(M=41, L=41, du1=0.1, du2=0.1)
    assert partial_entropy(Field2D(g, np.zeros(g.shape), t=0.0)) == 0.0
    half = 0.5 * normalized_gaussian(g, 0.7)
    s = partial_entropy(Field2D(g, half, t=0.0))
    assert math.isfinite(s)


def test_generalized_entropy_of_split_density():
    # splitting one density over both components and renormalizing by their
    # shared mass reproduces the plain entropy
    g = Grid2D.centered(M=161, L=161, du1=0.1, du2=0.1)
    dens = normalized_gaussian(g, 1.0)
    q = ComplexField(g, 0.6 * dens, 0.4 * dens, t=0.0)
    s = generalized_entropy(q, beta=1.0)
    assert s == pytest.approx(1.0 + math.log(2.0 * math.pi), abs=1e-6)
    with pytest.raises(MassError):
        generalized_entropy(q, beta=0.0)
    with pytest.raises(MassError):
        generalized_entropy(q, beta=2.0)  # sum mass would be 1/2


def test_entropy_series_columns_and_nan_policy():
    g = Grid2D.centered(M=81, L=81, du1=0.1, du2=0.1)
    dens = normalized_gaussian(g, 0.7)
    p = [Field2D(g, dens, t=0.0), Field2D(g, dens, t=1.0)]
    qs = [ComplexField(g, 0.5 * dens, 0.5 * dens, t=0.0),
          ComplexField(g, dens, -dens, t=1.0)]  # beta 0: this entry stays NaN
    series = entropy_series(p, qs)
    assert np.array_equal(series.times, [0.0, 1.0])
    assert np.all(np.isfinite(series.s_plain))
    assert math.isfinite(series.s_gen[0])
    assert math.isnan(series.s_gen[1])
    assert math.isnan(series.s_partial_r[1])

    p_only = entropy_series(p_snapshots=p)
    assert np.all(np.isnan(p_only.s_gen))
    with pytest.raises(ConfigError):
        entropy_series()
    with pytest.raises(ConfigError):
        entropy_series(p, [ComplexField(g, dens, dens, t=5.0),
                           ComplexField(g, dens, dens, t=6.0)])


def test_entropy_production_lookup():
    series = EntropySeries(
        times=np.array([0.0, 1.0, 2.0]),
        s_plain=np.array([1.0, 1.5, 1.8]),
        s_partial_r=np.array([0.1, 0.2, 0.3]),
        s_partial_i=np.array([0.0, 0.0, 0.0]),
        s_gen=np.array([2.0, 1.0, -0.5]),
    )
    assert entropy_production(series, 0.0, 2.0) == pytest.approx(0.8)
    assert entropy_production(series, 1.0, 2.0, kind="gen") == pytest.approx(-1.5)
    with pytest.raises(ConfigError):
        entropy_production(series, 0.0, 2.0, kind="bogus")
    with pytest.raises(ConfigError):
        entropy_production(series, 0.0, 3.0)
