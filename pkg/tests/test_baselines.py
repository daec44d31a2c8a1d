import math

import numpy as np
import pytest
from scipy import stats

from pitcheck import PitSample, ad_test, ks_test
from pitcheck.baselines import ad_pvalue, ad_statistic, kolmogorov_sf, ks_pvalue, ks_statistic
from pitcheck.errors import BoundaryValue

C = PitSample.continuous


def test_ks_examples():
    assert ks_statistic(np.array([0.5])) == 0.5
    n = 10
    u = (2 * np.arange(1, n + 1) - 1) / (2 * n)
    assert ks_statistic(u) == pytest.approx(0.05, abs=1e-15)


def test_ks_statistic_matches_scipy():
    u = np.random.default_rng(1).random(77)
    assert ks_statistic(np.sort(u)) == pytest.approx(stats.kstest(u, "uniform").statistic, abs=1e-15)


def test_ks_bounds_and_permutation():
    rng = np.random.default_rng(2)
    for n in (1, 5, 50):
        u = rng.random(n)
        D = ks_test(C(u)).statistic
        assert 1 / (2 * n) - 1e-15 <= D <= 1.0
        assert ks_test(C(u[::-1])).statistic == D


def test_kolmogorov_sf_against_scipy():
    x = np.linspace(0.2, 3.0, 57)
    got = np.array([kolmogorov_sf(v) for v in x])
    assert np.max(np.abs(got - stats.kstwobign.sf(x))) < 1e-10


def test_ks_pvalue_close_to_exact():
    for n in (20, 50, 200):
        for D in (0.05, 0.1, 0.2):
            if D * math.sqrt(n) < 0.5:
                continue
            assert ks_pvalue(D, n) == pytest.approx(stats.kstwo.sf(D, n), abs=2e-3)


def test_ad_examples():
    assert ad_statistic(np.array([0.5])) == pytest.approx(2 * math.log(2) - 1, abs=1e-15)
    for n in (20, 50):
        u = np.arange(1, n + 1) / (10 * n)
        assert ad_test(C(u)).global_p < 0.01


def test_ad_statistic_matches_scipy():
    u = np.random.default_rng(3).random(40)
    s = np.sort(u)
    i = np.arange(1, 41)
    A2 = -40 - np.mean((2 * i - 1) * (np.log(s) + np.log1p(-s[::-1])))
    assert ad_statistic(s) == pytest.approx(A2, rel=1e-13)


def test_ad_pvalue_known_points():
    # classical asymptotic critical values 2.492 (5%) and 3.857 (1%)
    assert ad_pvalue(2.492, 1000) == pytest.approx(0.05, abs=5e-4)
    assert ad_pvalue(3.857, 1000) == pytest.approx(0.01, abs=5e-4)


def test_ad_boundary():
    with pytest.raises(BoundaryValue):
        ad_test(C([0.0, 0.5]))


def test_reports_flagged_and_rank_warning():
    r = ks_test(C([0.2, 0.4]))
    assert r.combiner == "none" and "independence-assuming" in r.flags
    s = PitSample.rank_based([0.25, 0.5], draws=4)
    assert ks_test(s).warnings


@pytest.mark.parametrize("test", [ks_test, ad_test])
def test_null_calibration(test):
    rng = np.random.default_rng(11)
    S, n = 4000, 500
    rej = np.mean([test(C(rng.random(n))).global_p <= 0.05 for _ in range(S)])
    se = math.sqrt(0.05 * 0.95 / S)
    assert abs(rej - 0.05) <= 3 * se
