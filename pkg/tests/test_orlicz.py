import math

import numpy as np
import pytest
from scipy.optimize import brentq

from cwikel.errors import NonIntegrable
from cwikel.fields import decreasing_rearrangement, torus_function
from cwikel.geometry import TorusCube
from cwikel.orlicz import (EXPL2, LLOGL, OrliczGauge, continuity_modulus,
                           exp_l2_norm, j_functional, lambda1_norm,
                           marcinkiewicz_psi_norm, orlicz_norm)
from cwikel.stepfn import StepFunction, dilation, disjoint_sum, indicator


# -- independent scalar oracles ------------------------------------------------

def llogl_gauge_of_indicator(measure: float, height: float = 1.0) -> float:
    """Root of measure * M(height/lam) = 1 via brentq, independent of the
    package's bisection."""
    fn = lambda lam: measure * (height / lam) * math.log(math.e + height / lam) - 1.0
    return brentq(fn, 1e-9 * height, 1e9 * height, xtol=1e-15, rtol=8.9e-16)


LAMBDA_STAR = llogl_gauge_of_indicator(1.0)  # 1.2567506185377673


def random_stepfn(rng, max_pieces=6, total=1.0):
    k = rng.integers(1, max_pieces + 1)
    vals = np.sort(rng.uniform(0.05, 4.0, k))[::-1]
    bp = np.sort(rng.uniform(0.01, total, k))
    return StepFunction(bp, vals, total_support=total)


# -- orlicz_norm ----------------------------------------------------------------

def test_llogl_indicator_matches_rootfind_oracle():
    assert orlicz_norm(indicator(1.0)) == pytest.approx(LAMBDA_STAR, abs=1e-12)


def test_llogl_zero():
    assert orlicz_norm(StepFunction(np.zeros(0), np.zeros(0))) == 0.0
    assert orlicz_norm(indicator(1.0, 0.0)) == 0.0


def test_llogl_positive_homogeneity():
    # ||c chi_(0,1)|| = c lambda*, cross-checked against the per-height oracle
    for c in (2.0, 3.0, 0.25):
        got = orlicz_norm(indicator(1.0, c))
        assert got == pytest.approx(c * LAMBDA_STAR, rel=1e-11)
        assert got == pytest.approx(llogl_gauge_of_indicator(1.0, c), rel=1e-11)


def test_llogl_scaling_vs_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_stepfn(rng)
        c = rng.uniform(0.1, 5.0)
        assert orlicz_norm(g.scale(c)) == pytest.approx(c * orlicz_norm(g), rel=1e-10)


def test_exp_l2_indicator_closed_form():
    # e^{1/lam^2} - 1 = 1  =>  lam = 1/sqrt(ln 2)
    assert exp_l2_norm(indicator(1.0)) == pytest.approx(1.0 / math.sqrt(math.log(2)), abs=1e-12)
    assert exp_l2_norm(indicator(1.0, 0.0)) == 0.0
    g = indicator(0.7, 1.3)
    assert exp_l2_norm(g.scale(2.0)) == pytest.approx(2 * exp_l2_norm(g), rel=1e-10)


def test_non_integrable_infinite_support():
    g = StepFunction(np.array([math.inf]), np.array([1.0]))
    with pytest.raises(NonIntegrable):
        orlicz_norm(g)


def test_monotonicity_of_gauge():
    rng = np.random.default_rng(11)
    for _ in range(50):
        g2 = random_stepfn(rng)
        shrink = rng.uniform(0.2, 1.0)
        g1 = g2.scale(shrink)
        assert orlicz_norm(g1) <= orlicz_norm(g2) + 1e-12


def test_gauge_validation():
    with pytest.raises(ValueError):
        OrliczGauge("bad", lambda t: t - 1.0)  # M(0) != 0
    with pytest.raises(ValueError):
        OrliczGauge("bad", lambda t: np.sqrt(t))  # concave


# -- j_functional -----------------------------------------------------------------

def test_j_whole_torus_is_norm():
    f = torus_function(1, 128, lambda x: 1.0 + 0.5 * np.sin(x))
    norm = orlicz_norm(decreasing_rearrangement(f))
    assert j_functional(f) == pytest.approx(norm, rel=1e-10)
    assert j_functional(f, TorusCube((0.0,), 1.0, 1)) == pytest.approx(norm, rel=1e-10)


def test_j_constant_closed_form():
    # f = c on a set of measure t: J = t * c * lambda*
    c = 2.5
    f = torus_function(2, 32, lambda x, y: np.full_like(x, c))
    for side in (0.25, 0.5, 0.75):
        cube = TorusCube((0.3, -0.7), side, 2)
        t = side ** 2
        assert j_functional(f, cube) == pytest.approx(t * c * LAMBDA_STAR, rel=1e-6)


def test_j_empty_region():
    f = torus_function(1, 64, lambda x: np.ones_like(x))
    assert j_functional(f, np.zeros(64, dtype=bool)) == 0.0


def test_j_monotone_inclusion_nested_cubes():
    f = torus_function(1, 256, lambda x: 1.0 + np.cos(x) ** 2)
    sides = np.linspace(0.05, 1.0, 24)
    js = [j_functional(f, TorusCube((0.5,), s, 1)) for s in sides]
    assert all(a <= b + 1e-12 for a, b in zip(js, js[1:]))


def test_j_subadditivity_random_partitions():
    # sum over a measurable partition is at most 4 ||f||, with no slack
    rng = np.random.default_rng(17)
    f = torus_function(2, 24, lambda x, y: np.exp(np.sin(x) + np.cos(y)))
    norm = orlicz_norm(decreasing_rearrangement(f))
    for _ in range(100):
        k = rng.integers(2, 9)
        labels = rng.integers(0, k, size=f.values.shape)
        total = sum(j_functional(f, labels == i) for i in range(k))
        assert total <= 4.0 * norm


def test_disjoint_sum_inequality_random():
    # 4 || oplus sigma_{lam_k} f_k || >= sum lam_k ||f_k||, exactly
    rng = np.random.default_rng(23)
    for _ in range(100):
        m = rng.integers(2, 6)
        fs = [random_stepfn(rng) for _ in range(m)]
        lam = rng.dirichlet(np.ones(m))
        merged = disjoint_sum([dilation(g, l) for g, l in zip(fs, lam)])
        lhs = 4.0 * orlicz_norm(merged)
        rhs = sum(l * orlicz_norm(g) for g, l in zip(fs, lam))
        assert lhs >= rhs


def test_j_continuity_modulus_on_nested_cubes():
    f = torus_function(1, 256, lambda x: np.exp(np.cos(2 * x)))
    for s1, s2 in ((0.2, 0.25), (0.5, 0.52), (0.05, 0.3), (0.9, 1.0)):
        c1 = TorusCube((1.0,), s1, 1)
        c2 = TorusCube((1.0,), s2, 1)
        gap = abs(j_functional(f, c2) - j_functional(f, c1))
        dist = s2 - s1  # nested cubes: measure of the symmetric difference
        assert gap <= continuity_modulus(f, dist) + 1e-10


def test_holder_with_exp_l2():
    # integral F G^2 <= c ||F||_M ||G||^2_{expL2}: ratio below a fixed constant
    rng = np.random.default_rng(31)
    ratios = []
    for _ in range(20):
        res = 64
        F = torus_function(1, res, rng.uniform(0, 3, res))
        G = torus_function(1, res, rng.normal(0, 1, res))
        lhs = float(np.sum(np.abs(F.values) * G.values ** 2) * F.cell_measure)
        nf = orlicz_norm(decreasing_rearrangement(F))
        ng = exp_l2_norm(decreasing_rearrangement(G))
        ratios.append(lhs / (nf * ng * ng))
    # constant frozen from a verified run of this seeded family (max 0.8106)
    assert max(ratios) <= 1.0


# -- Marcinkiewicz and Lorentz ----------------------------------------------------

@pytest.mark.parametrize("u", [0.25, 1.0 / 16.0, 1.0 / 256.0])
def test_marcinkiewicz_indicator_anchor(u):
    want = u * (1.0 + math.log(1.0 / u))
    assert marcinkiewicz_psi_norm(indicator(u)) == pytest.approx(want, abs=1e-9)


def test_marcinkiewicz_grid_sup_oracle():
    # independent sup over a dense grid
    g = StepFunction(np.array([0.1, 0.4, 0.9]), np.array([3.0, 1.0, 0.2]))
    ts = np.linspace(1e-6, 2.0, 200001)
    pref = np.array([g.integral(t) for t in ts])
    recip = np.where(ts < 1, np.log(np.e / np.minimum(ts, 1)), 1 / np.maximum(ts, 1))
    want = float(np.max(recip * pref))
    assert marcinkiewicz_psi_norm(g) == pytest.approx(want, rel=1e-6)


def test_marcinkiewicz_zero_and_homogeneity():
    assert marcinkiewicz_psi_norm(indicator(1.0, 0.0)) == 0.0
    g = StepFunction(np.array([0.2, 0.7]), np.array([2.0, 0.5]))
    assert marcinkiewicz_psi_norm(g.scale(3.0)) == pytest.approx(
        3.0 * marcinkiewicz_psi_norm(g), rel=1e-9)


def test_lambda1_indicator_quadrature_oracle():
    # integral_0^1 (1 + log(1/t)) dt = 2, cross-checked by quadrature
    ts = np.linspace(1e-12, 1.0, 2000001)
    quad = float(np.trapezoid(1.0 + np.log(1.0 / ts), ts))
    assert abs(quad - 2.0) < 1e-3
    assert lambda1_norm(indicator(1.0)) == pytest.approx(2.0, abs=1e-12)
    assert lambda1_norm(indicator(1.0, 0.0)) == 0.0


def test_lambda1_vs_llogl_equivalence_family():
    # the two norms are equivalent; record that the ratio sits in a fixed
    # interval on a seeded 10-function family (empirical, not asserted a priori)
    rng = np.random.default_rng(41)
    ratios = []
    for _ in range(10):
        g = random_stepfn(rng)
        ratios.append(lambda1_norm(g) / orlicz_norm(g))
    lo, hi = min(ratios), max(ratios)
    assert 0 < lo <= hi
    # interval frozen from the verified run: [1.07, 1.65]
    assert lo >= 0.5 and hi <= 3.0
