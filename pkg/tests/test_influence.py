import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pitcheck import (
    PitSample, ecdf_plot_data, influence_report, influential_region, potc_pointwise,
    pietc_pointwise, pritc_pointwise, shapley_values, uniform_partition,
)
from pitcheck.errors import EmptySample, GammaOutOfRange, IndexMismatch, NonFiniteInput
from pitcheck.influence import auto_gamma, harmonic_number, shapley_brute_force


def exact_shapley(t):
    """Rational-arithmetic enumeration of v(S) = mean over S."""
    n = len(t)
    t = [Fraction(x) for x in t]
    phi = [Fraction(0)] * n
    perms = list(permutations(range(n)))
    for perm in perms:
        total = Fraction(0)
        prev = Fraction(0)
        for k, i in enumerate(perm, start=1):
            total += t[i]
            cur = total / k
            phi[i] += cur - prev
            prev = cur
    return [float(p / len(perms)) for p in phi]


def test_examples():
    assert shapley_values([7.3]).tolist() == [7.3]
    assert np.allclose(shapley_values([2.0, 0.0]), [1.5, -0.5], atol=1e-15)
    assert np.allclose(shapley_values([1.0, 1.0, 1.0]), [1 / 3] * 3, atol=1e-15)


def test_closed_form_against_rational_enumeration():
    rng = np.random.default_rng(3)
    for n in range(1, 7):
        for _ in range(5):
            t = rng.normal(size=n) * 10
            assert np.allclose(shapley_values(t), exact_shapley(t), atol=1e-12)
            assert np.allclose(shapley_brute_force(t), exact_shapley(t), atol=1e-12)


def test_harmonic_number():
    assert harmonic_number(1) == 1.0
    assert harmonic_number(4) == pytest.approx(25 / 12, abs=1e-15)
    assert harmonic_number(10_000) == pytest.approx(
        math.log(10_000) + 0.5772156649015329 + 1 / 20_000, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_efficiency(t):
    phi = shapley_values(t)
    scale = max(1.0, float(np.mean(np.abs(t))))
    assert abs(phi.sum() - np.mean(t)) <= 1e-9 * scale


def test_non_finite_and_empty():
    with pytest.raises(NonFiniteInput):
        shapley_values([np.inf, 1.0])
    with pytest.raises(EmptySample):
        shapley_values([])


def test_influential_region_examples():
    assert influential_region([1.5, -0.5], 0.0) == {0}
    assert influential_region([1 / 3] * 3, 1 / 3) == frozenset()
    assert influential_region([0.9, 0.2, -0.1], 0.45) == {0}
    with pytest.raises(GammaOutOfRange):
        influential_region([0.9, 0.2], 1.0)
    with pytest.raises(GammaOutOfRange):
        influential_region([0.9, 0.2], -0.1)


def test_auto_gamma():
    assert auto_gamma(np.array([0.9, 0.2]), 0.01, 0.05) == 0.0
    assert auto_gamma(np.array([0.9, 0.2]), 0.5, 0.05) == 0.45


def test_ecdf_plot_examples():
    s = PitSample.continuous([0.75, 0.25])
    pts = ecdf_plot_data(s, potc_pointwise(s), frozenset())
    assert [tuple(p) for p in pts] == [(0.25, 0.5, 0.25, False), (0.75, 1.0, 0.25, False)]
    s = PitSample.continuous([0.4])
    pts = ecdf_plot_data(s, potc_pointwise(s), frozenset({0}))
    assert tuple(pts[0]) == pytest.approx((0.4, 1.0, 0.6, True))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-9, 1 - 1e-9), min_size=1, max_size=60))
def test_tilted_bounds(u):
    s = PitSample.continuous(u)
    for p in ecdf_plot_data(s, potc_pointwise(s), frozenset()):
        assert -1.0 <= p.tilted <= 1.0


def test_index_mismatch():
    a = PitSample.continuous([0.2, 0.4])
    b = PitSample.continuous([0.2, 0.4, 0.6])
    with pytest.raises(IndexMismatch):
        ecdf_plot_data(b, potc_pointwise(a), frozenset())


def test_highlight_follows_indexing():
    u = [0.9, 0.01, 0.5]
    s = PitSample.continuous(u)
    # PIET-C indexes inputs: input 1 (value 0.01) is the first sorted point
    pts = ecdf_plot_data(s, pietc_pointwise(s), frozenset({1}))
    assert [p.highlighted for p in pts] == [True, False, False]
    # POT-C indexes order statistics
    pts = ecdf_plot_data(s, potc_pointwise(s), frozenset({2}))
    assert [p.highlighted for p in pts] == [False, False, True]
    # PRIT-C: value 0.5 falls to partition point 0.5 (index 1 of 0.25, 0.5, 0.75)
    pw = pritc_pointwise(s, [0.25, 0.5, 0.75])
    pts = ecdf_plot_data(s, pw, frozenset({1}))
    assert [p.highlighted for p in pts] == [False, True, False]


def test_influence_report_tcct_sums_to_statistic():
    rng = np.random.default_rng(8)
    u = np.concatenate([rng.random(40), rng.random(10) * 0.02])
    s = PitSample.continuous(u)
    pw = potc_pointwise(s)
    rep = influence_report(s, pw, "tcct")
    assert rep.phi.sum() == pytest.approx(rep.grand_value, rel=1e-9)
    assert rep.global_p <= 0.05 and rep.gamma == 0.0
    assert len(rep.influential) == int(np.sum(rep.phi > 0))
    assert sum(p.highlighted for p in rep.ecdf_points) == len(rep.influential)


def test_uniform_grid_no_highlight_for_positive_gamma():
    n = 20
    s = PitSample.continuous(uniform_partition(n))
    pw = potc_pointwise(s)
    rep = influence_report(s, pw, "cct", gamma="auto")
    assert rep.gamma > 0
    big = influence_report(s, pw, "cct", gamma=float(max(rep.phi.max(), 0.0)))
    assert big.influential == frozenset()
    assert not any(p.highlighted for p in big.ecdf_points)
