"""POT-C extended with conditional order-statistic tests (PITOS).

Given the i-th order statistic, the j-th one of n uniforms is a rescaled
beta variable: above u_(i) (j > i) the ratio (u_(j) - u_(i)) / (1 - u_(i))
is Beta(j - i, n + 1 - j); below it (j < i) the ratio u_(j) / u_(i) is
Beta(j, i - j). Conditional p-values for a spread-out set of index pairs
are pooled with the marginal POT-C p-values by the Cauchy combination.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .combine import TestReport, cct
from .errors import BoundaryValue, EmptySample, PitError, TieError
from .pointwise import PitSample, potc_pointwise

__all__ = ["PairSet", "halton", "pair_grid", "conditional_p", "pitos_test",
           "CORRECTION"]

CORRECTION = 1.15


@dataclass(frozen=True)
class PairSet:
    """Distinct (i, j) order-statistic index pairs, 1-based, i != j."""

    pairs: tuple
    target_count: int

    def __len__(self):
        return len(self.pairs)

    def index_arrays(self):
        """The pairs as two integer arrays (i, j)."""
        a = np.array(self.pairs, dtype=np.intp).reshape(-1, 2)
        return a[:, 0], a[:, 1]


def _radical_inverse(k, base):
    out = np.zeros(k.shape)
    f = 1.0 / base
    k = k.copy()
    while np.any(k > 0):
        out += f * (k % base)
        k //= base
        f /= base
    return out


def halton(count, start=1):
    """First ``count`` points of the 2-D Halton sequence (bases 2 and 3)."""
    k = np.arange(start, start + count)
    return np.column_stack([_radical_inverse(k, 2), _radical_inverse(k, 3)])


def pair_grid(n, budget=None):
    """Deterministic, duplicate-free index pairs covering the unit square.

    Halton points (h1, h2) map to indices (floor(h1 n) + 1, floor(h2 n) + 1);
    diagonal points and repeats are skipped until ``budget`` pairs are
    collected. The budget defaults to 2n and is capped at n (n - 1).
    """
    return _pair_grid(int(n), None if budget is None else int(budget))


@lru_cache(maxsize=64)
def _pair_grid(n, budget):
    if n < 2:
        raise PitError("pair selection needs n >= 2")
    if budget is None:
        budget = 2 * n
    if budget < 1:
        raise PitError("pair budget must be positive")
    target = min(int(budget), n * (n - 1))
    seen = set()
    pairs = []
    start = 1
    chunk = max(64, 2 * target)
    while len(pairs) < target:
        pts = halton(chunk, start)
        start += chunk
        idx = np.minimum(np.floor(pts * n).astype(int), n - 1) + 1
        for i, j in idx:
            if i == j or (i, j) in seen:
                continue
            seen.add((i, j))
            pairs.append((int(i), int(j)))
            if len(pairs) == target:
                break
        if start > 1000 * (target + n) + 10**6:
            raise PitError("pair grid failed to fill its budget")
    return PairSet(tuple(pairs), target)


def _conditional_cdf(u_sorted, i, j):
    n = u_sorted.size
    ui, uj = u_sorted[i - 1], u_sorted[j - 1]
    if ui == uj:
        raise TieError(f"tied order statistics at indices {i} and {j}")
    if i < j:
        den = 1.0 - ui
        if den <= 0.0:
            raise TieError("conditioning value equals 1")
        return specfun.beta_tails((uj - ui) / den, j - i, n + 1 - j)
    if ui <= 0.0:
        raise TieError("conditioning value equals 0")
    return specfun.beta_tails(uj / ui, j, i - j)


def _conditional_tails(u, ij):
    """Vectorized conditional beta tails over index arrays (i, j).

    Returns (lower, upper, tied); tied pairs (equal values, or a
    conditioning value at the edge) get NaN tails.
    """
    i, j = ij
    n = u.size
    ui, uj = u[i - 1], u[j - 1]
    up_pair = i < j
    den = np.where(up_pair, 1.0 - ui, ui)
    tied = (ui == uj) | (den <= 0.0)
    ok = ~tied
    x = np.where(up_pair, uj - ui, uj) / np.where(ok, den, 1.0)
    a = np.where(up_pair, j - i, j).astype(float)
    b = np.where(up_pair, n + 1 - j, i - j).astype(float)
    lo = np.full(i.shape, np.nan)
    hi = np.full(i.shape, np.nan)
    if ok.any():
        lo[ok], hi[ok] = specfun.beta_tails(np.clip(x[ok], 0.0, 1.0), a[ok], b[ok])
    return lo, hi, tied


def conditional_p(u_sorted, i, j):
    """Two-sided p-value of u_(j) given u_(i), 1-based indices.

    Returns min(1, 2 min(q, 1 - q)) with q the conditional beta CDF.
    """
    u = np.asarray(u_sorted, dtype=float)
    n = u.size
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise PitError(f"invalid index pair ({i}, {j}) for n={n}")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise BoundaryValue()
    if np.any(np.diff(u) < 0.0):
        raise PitError("conditional_p expects sorted values")
    lo, up = _conditional_cdf(u, i, j)
    return min(1.0, 2.0 * min(lo, up))


def pitos_test(sample, pair_budget=None, alpha=0.05):
    """PITOS: marginal plus conditional order-statistic tests, CCT-pooled.

    The combined p-value is multiplied by 1.15 and clamped to 1; the
    uncorrected value is kept in ``extra["raw_p"]``. Pairs with tied or
    degenerate conditioning values, and conditional p-values of exactly
    0 or 1 (which have no finite Cauchy transform), are dropped and
    counted in ``extra``.
    """
    if not isinstance(sample, PitSample):
        sample = PitSample.continuous(sample)
    if sample.kind != "continuous":
        raise PitError(
            "PITOS is restricted to continuous PIT values; rank-based values "
            "make the conditioning events unreliable"
        )
    if sample.n < 2:
        raise EmptySample("PITOS needs at least two PIT values")
    marg = potc_pointwise(sample)
    u = marg.tested_quantity
    grid = pair_grid(sample.n, pair_budget)
    lo, up, tied = _conditional_tails(u, grid.index_arrays())
    p = np.minimum(1.0, 2.0 * np.minimum(lo, up))
    edge = ~tied & ~((p > 0.0) & (p < 1.0))
    cond = p[~tied & ~edge]
    dropped_tie = int(tied.sum())
    dropped_edge = int(edge.sum())
    pm = marg.p_values
    keep = (pm > 0.0) & (pm < 1.0)
    pooled = np.concatenate([pm[keep], np.asarray(cond, dtype=float)])
    if pooled.size == 0:
        raise PitError("PITOS: no usable p-values after dropping degenerate ones")
    T, raw = cct(pooled)
    return TestReport(
        method="pitos",
        combiner="cct",
        statistic=T,
        global_p=min(1.0, CORRECTION * raw),
        alpha=alpha,
        n=sample.n,
        extra={
            "raw_p": raw,
            "pairs_requested": len(grid),
            "pairs_used": len(cond),
            "dropped_ties": dropped_tie,
            "dropped_degenerate": dropped_edge,
            "dropped_marginal": int((~keep).sum()),
        },
    )
