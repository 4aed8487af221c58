import math

import numpy as np
import pytest

from cwikel.stepfn import StepFunction, dilation, disjoint_sum, from_atoms, indicator
from cwikel.fields import torus_function, decreasing_rearrangement


def test_indicator_roundtrip(tmp_path):
    g = indicator(0.5, height=2.0, total_support=1.0)
    assert g(0.25) == 2.0
    assert g(0.75) == 0.0
    assert g.integral() == 1.0
    path = tmp_path / "g.csv"
    g.to_csv(path)
    h = StepFunction.from_csv(path, total_support=1.0)
    assert np.array_equal(h.breakpoints, g.breakpoints)
    assert np.array_equal(h.values, g.values)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        StepFunction(np.array([1.0, 0.5]), np.array([1.0, 0.5]))  # not increasing
    with pytest.raises(ValueError):
        StepFunction(np.array([0.5, 1.0]), np.array([0.5, 1.0]))  # not nonincreasing
    with pytest.raises(ValueError):
        StepFunction(np.array([0.5]), np.array([-1.0]))


def test_prefix_integral_closed_form():
    g = StepFunction(np.array([1.0, 2.0, 4.0]), np.array([3.0, 2.0, 0.5]))
    # integral over (0, t): piecewise linear with slopes 3, 2, 0.5
    assert g.integral(0.5) == pytest.approx(1.5)
    assert g.integral(1.5) == pytest.approx(3.0 + 1.0)
    assert g.integral(10.0) == pytest.approx(3.0 + 2.0 + 1.0)


def test_rearrangement_sorting_case():
    # four cells of measure 1/4 -> sorted step values
    f = torus_function(1, 4, np.array([0.125, 0.375, 0.625, 0.875]))
    mu = decreasing_rearrangement(f)
    assert np.array_equal(mu.values, [0.875, 0.625, 0.375, 0.125])
    assert np.allclose(mu.breakpoints, [0.25, 0.5, 0.75, 1.0])


def test_rearrangement_indicator_on_torus():
    f = torus_function(1, 64, lambda x: (np.abs(x) <= np.pi / 2).astype(float))
    mu = decreasing_rearrangement(f)
    assert mu.values.tolist() == [1.0]
    assert mu.breakpoints[0] == pytest.approx(0.5)


def test_equimeasurability_exact():
    # level measures of the rearrangement match cell counting bit for bit
    rng = np.random.default_rng(123)
    for d, res in ((1, 64), (2, 16)):
        f = torus_function(d, res, rng.integers(0, 6, size=(res,) * d).astype(float))
        mu = decreasing_rearrangement(f)
        for s in np.unique(np.abs(f.values)):
            count = int(np.count_nonzero(np.abs(f.values) > s))
            assert mu.level_measure(s) == count * f.cell_measure


def test_rearrangement_power_singularity_oracle():
    # mu(t) for |x|^{-1/2} on the normalized torus is (pi t)^{-1/2}; oracle is
    # level-set counting m({|f| > s}) = s^{-2}/pi
    f = torus_function(1, 8192, lambda x: np.abs(x) ** -0.5)
    mu = decreasing_rearrangement(f)
    for t in (0.05, 0.2, 0.5, 0.9):
        assert mu(t) == pytest.approx((math.pi * t) ** -0.5, rel=5e-3)


def test_dilation_identity_and_stretch():
    g = indicator(1.0)
    assert np.array_equal(dilation(g, 1.0).breakpoints, g.breakpoints)
    g2 = dilation(g, 2.0)
    assert g2.breakpoints[0] == 2.0
    assert g2(1.5) == 1.0


def test_dilation_change_of_variables():
    rng = np.random.default_rng(7)
    vals = np.sort(rng.uniform(0, 3, 5))[::-1]
    g = StepFunction(np.cumsum(rng.uniform(0.1, 1.0, 5)), vals)
    for u in (0.3, 1.7, 4.0):
        assert dilation(g, u).integral() == pytest.approx(u * g.integral())


def test_disjoint_sum_is_pooled_rearrangement():
    g1 = indicator(0.5, 3.0)
    g2 = StepFunction(np.array([0.25, 0.75]), np.array([2.0, 1.0]))
    s = disjoint_sum([g1, g2])
    assert np.array_equal(s.values, [3.0, 2.0, 1.0])
    assert np.allclose(s.breakpoints, [0.5, 0.75, 1.25])
    assert s.integral() == pytest.approx(g1.integral() + g2.integral())


def test_truncate():
    g = StepFunction(np.array([1.0, 2.0]), np.array([2.0, 1.0]))
    t = g.truncate(1.5)
    assert t.integral() == pytest.approx(2.0 + 0.5)
    assert t(1.8) == 0.0
