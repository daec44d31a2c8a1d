import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from pitcheck import (
    PitSample, custom_reference, exp_reference, normal_reference, parse_reference,
    pietc_pointwise, potc_pointwise, pritc_pointwise, rank_pit, uniform_partition,
)
from pitcheck.errors import BoundaryValue, EmptySample, InvalidPartition, PitError
from pitcheck.pointwise import auto_partition

C = PitSample.continuous


def test_potc_examples():
    assert potc_pointwise(C([0.5])).p_values[0] == pytest.approx(1.0, abs=1e-15)
    assert potc_pointwise(C([0.975])).p_values[0] == pytest.approx(0.05, abs=1e-14)
    r = potc_pointwise(C([0.9, 0.1]))
    assert np.allclose(r.p_values, [0.38, 0.38], atol=1e-14)
    assert r.indexing == "sorted"
    assert list(r.index_map) == [1, 0]


def test_potc_against_scipy_beta():
    rng = np.random.default_rng(0)
    u = rng.random(40)
    r = potc_pointwise(C(u))
    i = np.arange(1, 41)
    F = stats.beta.cdf(np.sort(u), i, 41 - i)
    assert np.allclose(r.p_values, np.minimum(1, 2 * np.minimum(F, 1 - F)), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-6, 1 - 1e-6), min_size=1, max_size=30), st.randoms())
def test_potc_permutation_invariant(u, r):
    v = list(u)
    r.shuffle(v)
    assert np.array_equal(potc_pointwise(C(u)).p_values, potc_pointwise(C(v)).p_values)


def test_potc_boundary():
    with pytest.raises(BoundaryValue):
        potc_pointwise(C([0.0, 0.4]))


def test_pritc_examples():
    r = pritc_pointwise(C([0.1, 0.2, 0.8, 0.9]), [0.5])
    assert r.tested_quantity[0] == 2
    assert r.p_values[0] == 1.0
    r = pritc_pointwise(C([0.05] * 10), [0.5])
    assert r.p_values[0] == pytest.approx(2 / 1024, rel=1e-12)
    assert pritc_pointwise(C([0.3]), [0.5]).p_values[0] == 1.0


def test_pritc_against_scipy_binom():
    rng = np.random.default_rng(4)
    u = rng.random(60)
    z = uniform_partition(60)
    r = pritc_pointwise(C(u), z)
    c = np.array([(u <= x).sum() for x in z])
    lo = stats.binom.cdf(c, 60, z)
    up = stats.binom.sf(c - 1, 60, z)
    assert np.allclose(r.p_values, np.minimum(1, 2 * np.minimum(lo, up)), atol=1e-12)


def test_pritc_partition_rules():
    with pytest.raises(InvalidPartition):
        pritc_pointwise(C([0.2, 0.3]))  # continuous needs explicit partition
    with pytest.raises(InvalidPartition):
        pritc_pointwise(C([0.2]), [0.5, 0.4])
    with pytest.raises(InvalidPartition):
        pritc_pointwise(C([0.2]), [0.0, 0.5])


def test_rank_sample_and_auto_partition():
    s = PitSample.rank_based([0.0, 0.25, 0.5, 1.0], draws=4)
    assert np.allclose(auto_partition(s), [0.25, 0.5, 0.75])
    r = pritc_pointwise(s)
    assert r.warnings == ()
    big = PitSample.rank_based(np.arange(5) / 100, draws=100)
    z = auto_partition(big)
    assert z.size == 5 and z[0] == 0.01 and z[-1] == 0.99
    with pytest.raises(PitError):
        PitSample.rank_based([0.33], draws=4)


def test_kind_mismatch_warns():
    s = PitSample.rank_based([0.25, 0.5, 0.75], draws=4)
    assert pritc_pointwise(C([0.2, 0.7]), [0.5]).warnings
    assert potc_pointwise(s).warnings


def test_rank_pit():
    # shape (draws, n): column i holds the predictive draws for y[i]
    draws = np.array([[0.1, 0.5, 0.9, 1.3], [2.0, 3.0, 4.0, 5.0]]).T
    s = rank_pit(draws, [1.0, 1.0])
    assert s.kind == "rank" and s.draws == 4
    assert np.allclose(s.values, [0.75, 0.0])


def test_pietc_examples():
    e = exp_reference(1.0)
    assert pietc_pointwise(C([0.5]), e).p_values[0] == pytest.approx(1.0, abs=1e-15)
    assert pietc_pointwise(C([0.975]), e).p_values[0] == pytest.approx(0.05, abs=1e-14)
    r = pietc_pointwise(C([0.975]), normal_reference())
    assert r.p_values[0] == pytest.approx(0.05, abs=1e-12)
    assert r.indexing == "input"


def test_pietc_default_is_exp1_and_rate_irrelevant():
    u = np.random.default_rng(9).random(25)
    a = pietc_pointwise(C(u)).p_values
    b = pietc_pointwise(C(u), exp_reference(3.0)).p_values
    assert np.allclose(a, b, atol=1e-12)
    assert np.allclose(a, np.minimum(1, 2 * np.minimum(u, 1 - u)), atol=1e-12)


def test_pietc_custom_symmetric_reference():
    ref = custom_reference(stats.logistic.ppf, stats.logistic.sf, symmetric=True)
    r = pietc_pointwise(C([0.1, 0.6]), ref)
    assert np.allclose(r.p_values, [0.2, 0.8], atol=1e-12)


def test_parse_reference():
    assert parse_reference("normal").symmetric
    assert not parse_reference("exp:2").symmetric
    with pytest.raises(PitError):
        parse_reference("gamma:2")
    with pytest.raises(PitError):
        parse_reference("exp:-1")


def test_sample_validation():
    with pytest.raises(EmptySample):
        C([])
    with pytest.raises(PitError):
        C([1.5])
    s = C([0.2, 0.1, 0.2])
    assert list(s.order()) == [1, 0, 2]
    with pytest.raises(ValueError):
        s.values[0] = 0.3
