"""Shapley-value attribution of the Cauchy statistic and ECDF highlighting.

The game has players 1..n with value v(S) = mean of t_i over S and
v(empty) = 0, so v(N) is the Cauchy statistic T. Its Shapley values have
the closed form

    phi_i = t_i / n + (H_n - 1) / n * (t_i - mean_{j != i} t_j)

with H_n the n-th harmonic number, which makes attribution O(n).
"""

from dataclasses import dataclass, field
from collections import namedtuple
from functools import lru_cache
from itertools import permutations

import numpy as np

from .combine import cct, tcct
from .errors import EmptySample, GammaOutOfRange, IndexMismatch, NonFiniteInput, PitError

__all__ = [
    "EcdfPoint",
    "InfluenceReport",
    "harmonic_number",
    "shapley_values",
    "shapley_brute_force",
    "influential_region",
    "auto_gamma",
    "ecdf_plot_data",
    "influence_report",
]

EcdfPoint = namedtuple("EcdfPoint", "x ecdf tilted highlighted")


def harmonic_number(n):
    """H_n = 1 + 1/2 + ... + 1/n (summed from the small end)."""
    if n < 1:
        raise PitError("harmonic number needs n >= 1")
    return float(np.sum(1.0 / np.arange(n, 0, -1, dtype=float)))


def shapley_values(cauchy_t):
    """Closed-form Shapley values of the mean-of-subset game.

    Parameters
    ----------
    cauchy_t : array_like
        Finite Cauchy transforms t_1..t_n.

    Returns
    -------
    ndarray
        phi, with ``phi.sum() == t.mean()`` up to rounding.
    """
    t = np.asarray(cauchy_t, dtype=float).ravel()
    if t.size == 0:
        raise EmptySample("no Cauchy values to attribute")
    if not np.all(np.isfinite(t)):
        raise NonFiniteInput(
            "Shapley attribution needs finite Cauchy values (p-values strictly "
            "inside (0, 1))"
        )
    n = t.size
    if n == 1:
        return t.copy()
    h = harmonic_number(n)
    others = (t.sum() - t) / (n - 1)
    return t / n + (h - 1.0) / n * (t - others)


@lru_cache(maxsize=10)
def _permutations(n):
    perms = np.array(list(permutations(range(n))), dtype=np.intp).reshape(-1, n)
    perms.setflags(write=False)
    return perms


def shapley_brute_force(cauchy_t):
    """Shapley values by enumerating every joining order (n <= 9).

    Used as an independent check of the closed form. All n! permutations
    are materialized, so cost grows factorially.
    """
    t = np.asarray(cauchy_t, dtype=float).ravel()
    n = t.size
    if n > 9:
        raise PitError("brute-force enumeration is limited to n <= 9")
    perms = _permutations(n)
    vals = t[perms]
    prefix = np.cumsum(vals, axis=1) / np.arange(1, n + 1)
    gains = np.diff(prefix, axis=1, prepend=0.0)
    phi = np.bincount(perms.ravel(), weights=gains.ravel(), minlength=n)
    return phi / perms.shape[0]


def influential_region(phi, gamma=0.0):
    """Indices whose Shapley value strictly exceeds ``gamma``.

    ``gamma`` must lie in [0, max(0, max phi)].
    """
    phi = np.asarray(phi, dtype=float).ravel()
    top = max(0.0, float(phi.max())) if phi.size else 0.0
    if not (0.0 <= gamma <= top):
        raise GammaOutOfRange(f"gamma={gamma!r} outside [0, {top!r}]")
    return frozenset(int(i) for i in np.flatnonzero(phi > gamma))


def auto_gamma(phi, p_star, alpha):
    """0 when the global test rejects, otherwise half the largest phi."""
    if p_star <= alpha:
        return 0.0
    return max(0.0, float(np.max(phi))) / 2.0


def _highlight_mask(pointwise, sample_sorted, influential):
    n = sample_sorted.size
    if pointwise.indexing == "sorted":
        pos = np.arange(n)
    elif pointwise.indexing == "input":
        pos = np.asarray(pointwise.index_map)
    elif pointwise.indexing == "partition":
        # each observation belongs to the first partition point at or above it
        pos = np.searchsorted(pointwise.partition, sample_sorted, side="left")
    else:
        raise PitError(f"unknown indexing {pointwise.indexing!r}")
    chosen = np.fromiter(influential, dtype=int, count=len(influential))
    return np.isin(pos, chosen)


def ecdf_plot_data(sample, pointwise, influential):
    """ECDF and tilted-ECDF coordinates with influence highlighting.

    One point per observation in sorted order: ``x`` is the value, ``ecdf``
    its rank over n and ``tilted = ecdf - x``. The highlighted entity
    follows the test's indexing: order statistic for POT-C, original
    observation for PIET-C, and for PRIT-C the first partition point at or
    above the value.
    """
    index_map = np.asarray(pointwise.index_map)
    if index_map.size != sample.n:
        raise IndexMismatch(
            f"index_map has {index_map.size} entries for a sample of {sample.n}"
        )
    x = np.asarray(sample.values)[index_map]
    n = x.size
    ecdf = np.arange(1, n + 1) / n
    tilted = ecdf - x
    hl = _highlight_mask(pointwise, x, influential)
    return [
        EcdfPoint(float(a), float(b), float(c), bool(d))
        for a, b, c, d in zip(x, ecdf, tilted, hl)
    ]


@dataclass
class InfluenceReport:
    phi: np.ndarray
    gamma: float
    influential: frozenset
    harmonic_n: float
    grand_value: float
    ecdf_points: list = field(default_factory=list)
    global_p: float = float("nan")


def influence_report(sample, pointwise, combiner="cct", gamma="auto", alpha=0.05):
    """Shapley attribution for one pointwise result.

    With ``combiner="tcct"`` the game is played on the truncated terms
    t_i * 1(p_i < 0.5), so the Shapley values add up to the TCCT statistic.
    ``gamma="auto"`` picks 0 on rejection and max(phi)/2 otherwise.
    """
    p = np.asarray(pointwise.p_values)
    if combiner == "tcct":
        T, p_star = tcct(p)
        t = np.where(p < 0.5, pointwise.cauchy_t, 0.0)
    elif combiner == "cct":
        T, p_star = cct(p)
        t = pointwise.cauchy_t
    else:
        raise PitError(f"Shapley attribution needs cct or tcct, not {combiner!r}")
    phi = shapley_values(t)
    if isinstance(gamma, str):
        if gamma != "auto":
            raise GammaOutOfRange(f"unknown gamma policy {gamma!r}")
        g = auto_gamma(phi, p_star, alpha)
    else:
        g = float(gamma)
    ir = influential_region(phi, g)
    return InfluenceReport(
        phi=phi,
        gamma=g,
        influential=ir,
        harmonic_n=harmonic_number(phi.size),
        grand_value=T,
        ecdf_points=ecdf_plot_data(sample, pointwise, ir),
        global_p=p_star,
    )
