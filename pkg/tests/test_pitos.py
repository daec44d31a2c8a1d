import math

import numpy as np
import pytest

from pitcheck import PitSample, cct, conditional_p, pair_grid, pitos_test, potc_pointwise
from pitcheck.errors import PitError, TieError
from pitcheck.pitlab import LowRankCopulaSpec, copula_dependent_uniforms
from pitcheck.pitos import CORRECTION, _conditional_cdf, halton


def test_conditional_examples():
    u = np.array([0.2, 0.6])
    assert conditional_p(u, 1, 2) == pytest.approx(1.0, abs=1e-15)
    assert conditional_p(u, 2, 1) == pytest.approx(2 / 3, abs=1e-14)
    with pytest.raises(TieError):
        conditional_p(np.array([0.3, 0.3]), 1, 2)


def test_halton_first_points():
    h = halton(4)
    assert np.allclose(h[:, 0], [0.5, 0.25, 0.75, 0.125])
    assert np.allclose(h[:, 1], [1 / 3, 2 / 3, 1 / 9, 4 / 9])


def test_pair_grid_properties():
    g = pair_grid(2, 2)
    assert set(g.pairs) == {(1, 2), (2, 1)}
    for n in (3, 10, 57):
        g = pair_grid(n)
        assert len(g) == min(2 * n, n * (n - 1))
        assert len(set(g.pairs)) == len(g)
        assert all(i != j and 1 <= i <= n and 1 <= j <= n for i, j in g.pairs)
    assert pair_grid(30) == pair_grid(30)


def test_n2_composes_from_pieces():
    u = np.array([0.3, 0.7])
    s = PitSample.continuous(u)
    rep = pitos_test(s, pair_budget=2)
    marg = potc_pointwise(s).p_values
    cond = [conditional_p(u, 1, 2), conditional_p(u, 2, 1)]
    _, raw = cct(np.concatenate([marg, cond]))
    assert rep.extra["raw_p"] == pytest.approx(raw, rel=1e-13)
    assert rep.global_p == pytest.approx(min(1.0, CORRECTION * raw), rel=1e-13)
    assert rep.extra["pairs_used"] == 2


def test_ties_are_dropped_and_counted():
    rep = pitos_test(PitSample.continuous([0.2, 0.2, 0.5, 0.8]))
    assert rep.extra["dropped_ties"] > 0
    assert rep.extra["pairs_used"] + rep.extra["dropped_ties"] + rep.extra["dropped_degenerate"] \
        == rep.extra["pairs_requested"]


def test_refuses_rank_input():
    with pytest.raises(PitError):
        pitos_test(PitSample.rank_based([0.25, 0.5], draws=4))


def test_conditional_cdf_monte_carlo():
    # condition on u_(i) in a narrow bin and compare with the beta law
    rng = np.random.default_rng(5)
    for n, i, j in ((5, 2, 4), (5, 4, 2), (10, 3, 7)):
        U = np.sort(rng.random((400_000, n)), axis=1)
        v = np.median(U[:, i - 1])
        sel = U[np.abs(U[:, i - 1] - v) < 0.004]
        for x in np.quantile(sel[:, j - 1], [0.2, 0.5, 0.8]):
            u = np.zeros(n)
            u[i - 1], u[j - 1] = v, x
            F = _conditional_cdf(u, i, j)[0]
            emp = np.mean(sel[:, j - 1] <= x)
            se = math.sqrt(F * (1 - F) / sel.shape[0])
            assert abs(emp - F) <= 3 * se + 2e-3  # bin width bias allowance


def test_null_calibration_n200():
    rng = np.random.default_rng(21)
    S = 5000
    rej = np.mean([pitos_test(PitSample.continuous(rng.random(200))).global_p <= 0.05
                   for _ in range(S)])
    assert 0.02 <= rej <= 0.07


def test_more_conservative_than_potc_under_dependence():
    spec = LowRankCopulaSpec(n=100, p=2, loading_scale=0.8, seed=3)
    rng = np.random.default_rng(4)
    pit = pot = 0
    for _ in range(400):
        s = copula_dependent_uniforms(spec, rng)
        pit += pitos_test(s).global_p <= 0.05
        _, p = cct(potc_pointwise(s).p_values)
        pot += p <= 0.05
    assert pit < pot
