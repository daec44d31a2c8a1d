import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from pitcheck import TestReport, cct, combine_p, tcct, tippett_min_p
from pitcheck.errors import DegenerateP, EmptySample, PitError

pvals = st.lists(st.floats(1e-12, 1 - 1e-12), min_size=1, max_size=50)


def _mp_cct(p):
    mp.mp.dps = 50
    T = sum(mp.tan((mp.mpf("0.5") - mp.mpf(x)) * mp.pi) for x in p) / len(p)
    return T, mp.mpf("0.5") - mp.atan(T) / mp.pi


def test_cct_all_half():
    T, p = cct([0.5, 0.5, 0.5])
    assert abs(T) < 1e-15
    assert p == pytest.approx(0.5, abs=1e-15)


def test_cct_two_values_against_high_precision():
    T, p = cct([0.01, 0.5])
    T_ref, p_ref = _mp_cct(["0.01", "0.5"])
    assert T == pytest.approx(float(T_ref), rel=1e-12)
    # the quoted 15.9106 is a rounding slip; the exact mean is 15.91026
    assert T == pytest.approx(15.91026, abs=1e-5)
    assert p == pytest.approx(0.0200, abs=5e-5)
    assert p == pytest.approx(float(p_ref), rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-12, 1 - 1e-12))
def test_cct_single_value_round_trips(p):
    assert cct([p])[1] == pytest.approx(p, rel=1e-9, abs=1e-15)


def test_tcct_examples():
    assert tcct([0.5, 0.5]) == (0.0, 0.5)
    T, p = tcct([0.01, 0.9])
    assert T == pytest.approx(math.tan(0.49 * math.pi) / 2, rel=1e-12)
    assert T == pytest.approx(15.9103, abs=1e-4)
    assert p == pytest.approx(0.0200, abs=5e-5)
    assert tcct([0.6, 0.7, 0.8]) == (0.0, 0.5)


def test_tcct_allows_one_but_not_zero():
    assert tcct([1.0, 0.2])[0] > 0
    with pytest.raises(DegenerateP):
        tcct([0.0, 0.3])


def test_cct_rejects_boundary():
    with pytest.raises(DegenerateP):
        cct([0.0, 0.5])
    with pytest.raises(DegenerateP):
        cct([1.0, 0.5])


def test_tippett_examples():
    assert tippett_min_p([0.03])[1] == pytest.approx(0.03, abs=1e-15)
    assert tippett_min_p([0.5, 0.5])[1] == pytest.approx(0.75, abs=1e-15)
    # (1 - min p)^n = 0 when min p = 1, so p* = 1 - 0 = 1
    assert tippett_min_p([1.0] * 10)[1] == 1.0


def test_tippett_small_p_accuracy():
    assert tippett_min_p([1e-18] * 3)[1] == pytest.approx(3e-18, rel=1e-12)


def test_empty_and_unknown():
    with pytest.raises(EmptySample):
        cct([])
    with pytest.raises(PitError):
        combine_p([0.2], "fisher")


@settings(max_examples=200, deadline=None)
@given(pvals, st.randoms())
def test_permutation_invariance(p, r):
    q = list(p)
    r.shuffle(q)
    for fn in (cct, tcct):
        assert fn(p)[1] == pytest.approx(fn(q)[1], rel=1e-9, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(pvals)
def test_tcct_bounds(p):
    T, ps = tcct(p)
    assert T >= 0.0
    assert ps <= 0.5


@settings(max_examples=200, deadline=None)
@given(pvals, st.integers(0, 49), st.floats(0.01, 0.99))
def test_monotone_in_each_p(p, k, shrink):
    k %= len(p)
    q = list(p)
    q[k] = p[k] * shrink
    assert cct(q)[1] <= cct(p)[1] + 1e-12
    if p[k] < 0.5:
        assert tcct(q)[1] <= tcct(p)[1] + 1e-12


def test_report_reject_rule():
    r = TestReport("potc", "cct", 1.0, 0.05, 0.05, 10)
    assert r.reject
    assert not TestReport("potc", "cct", 1.0, 0.0500001, 0.05, 10).reject
    with pytest.raises(PitError):
        TestReport("potc", "cct", 1.0, 0.5, 1.0, 10)
    d = r.to_dict()
    assert d["reject"] is True and d["n"] == 10
