"""Monte Carlo harness for Type-I error and power studies.

Replicate r draws from its own PCG64 stream, seeded by
``SeedSequence(entropy=seed, spawn_key=(r,))``, so results depend only on
the master seed and the replicate index. Workers may finish in any order;
results are put back in replicate order before anything is reduced, which
makes the outcome identical for every degree of parallelism.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import csv
import io
import math

import numpy as np

from ..errors import ConfigError, ExperimentAborted, PitError
from ..io import dumps, fmt_float
from ..pointwise import parse_reference, uniform_partition
from ..uniformity import ALL_METHODS, uniformity_test
from .conjugate import ConjugateHierSpec, compute_pit, simulate_data
from .copula import LowRankCopulaSpec, copula_dependent_uniforms

__all__ = ["SimOutcome", "run_experiment", "replicate_rng", "run_replicate"]


def replicate_rng(seed, rep):
    """Independent generator for replicate ``rep`` of a run seeded ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(rep),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class SimOutcome:
    """Per-replicate global p-values and rejection rates.

    ``p_values[method][r]`` is NaN when that test failed on replicate r;
    ``n_valid[method]`` counts the finite entries and
    ``rejection_rate[method][alpha]`` is #{p <= alpha} / n_valid.
    """

    spec: dict
    methods: list
    alphas: list
    S: int
    p_values: dict
    rejection_rate: dict
    n_valid: dict
    mean_pairwise_corr: float
    mean_within_group_corr: float | None = None
    settings: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    def to_dict(self):
        return {
            "spec": self.spec,
            "settings": self.settings,
            "methods": list(self.methods),
            "alphas": list(self.alphas),
            "S": self.S,
            "n_valid": self.n_valid,
            "rejection_rate": {m: {_akey(a): r for a, r in rates.items()}
                               for m, rates in self.rejection_rate.items()},
            "mean_pairwise_corr": self.mean_pairwise_corr,
            "mean_within_group_corr": self.mean_within_group_corr,
            "p_values": {m: [None if math.isnan(p) else p for p in ps]
                         for m, ps in self.p_values.items()},
            "errors": [list(e) for e in self.errors],
        }

    def to_json(self):
        return dumps(self.to_dict())

    def rates_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "alpha", "rejection_rate", "n_valid"])
        for m in self.methods:
            for a in self.alphas:
                w.writerow([m, fmt_float(a), fmt_float(self.rejection_rate[m][a]),
                            self.n_valid[m]])
        return buf.getvalue()

    def summary(self):
        head = "method    " + "".join(f"  a={_akey(a):<8}" for a in self.alphas)
        lines = [head]
        for m in self.methods:
            cells = "".join(f"  {self.rejection_rate[m][a]:<10.4f}" for a in self.alphas)
            lines.append(f"{m:<10}{cells}")
        lines.append(f"replicates: {self.S}  errors: {len(self.errors)}")
        return "\n".join(lines)


def _akey(a):
    return fmt_float(a)


def _draw_pits(spec, rng):
    if isinstance(spec, ConjugateHierSpec):
        data = simulate_data(spec, rng)
        return compute_pit(spec, data, rng)
    return copula_dependent_uniforms(spec, rng)


def run_replicate(spec, rep, methods, settings):
    """PIT values and per-method global p-values for one replicate."""
    rng = replicate_rng(settings["seed"], rep)
    sample = _draw_pits(spec, rng)
    reference = parse_reference(settings["reference"])
    partition = uniform_partition(sample.n)
    out = {}
    errs = []
    for m in methods:
        try:
            rep_ = uniformity_test(
                sample, m, settings["combiner"], 0.5,
                partition=partition, reference=reference,
                pair_budget=settings.get("pair_budget"),
            )
            out[m] = rep_.global_p
        except (PitError, ArithmeticError) as exc:
            out[m] = math.nan
            errs.append((rep, f"{m}: {type(exc).__name__}: {exc}"))
    return rep, sample.values, out, errs


def _run_chunk(args):
    spec, reps, methods, settings = args
    return [run_replicate(spec, r, methods, settings) for r in reps]


def run_experiment(spec, methods=("potc", "pritc", "pietc", "ks"), S=1000,
                   alphas=(0.05,), parallelism=1, *, seed=None, combiner="tcct",
                   reference="exp:1", pair_budget=None, error_budget=0):
    """Run S replicates of ``spec`` and tally rejections.

    Parameters
    ----------
    spec : ConjugateHierSpec or LowRankCopulaSpec
    methods : sequence of str
        Any of potc, pritc, pietc, ks, ad, pitos.
    S : int
        Number of replicates.
    alphas : sequence of float
    parallelism : int
        Worker processes; does not affect the result.
    seed : int, optional
        Master seed; defaults to ``spec.seed``.
    combiner : str
        Combiner for the pointwise methods (cct, tcct or tippett).
    reference : str
        PIET-C reference, ``exp:<rate>`` or ``normal``.
    error_budget : int
        Number of failed (replicate, method) evaluations tolerated before
        the run aborts with :class:`ExperimentAborted`.

    Returns
    -------
    SimOutcome
    """
    if not isinstance(spec, (ConjugateHierSpec, LowRankCopulaSpec)):
        raise ConfigError("spec must be a ConjugateHierSpec or LowRankCopulaSpec")
    methods = list(dict.fromkeys(methods))
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad or not methods:
        raise ConfigError(f"unknown or empty method list: {bad or methods}")
    if int(S) != S or S < 1:
        raise ConfigError("S must be a positive integer")
    alphas = sorted(float(a) for a in alphas)
    if not alphas or any(not 0.0 < a < 1.0 for a in alphas):
        raise ConfigError("alphas must lie in (0, 1)")
    if int(parallelism) != parallelism or parallelism < 1:
        raise ConfigError("parallelism must be a positive integer")
    parse_reference(reference)
    settings = {
        "seed": int(spec.seed if seed is None else seed),
        "combiner": combiner,
        "reference": reference,
        "pair_budget": pair_budget,
        "error_budget": int(error_budget),
    }

    reps = list(range(int(S)))
    if parallelism == 1:
        results = _run_chunk((spec, reps, methods, settings))
    else:
        nchunk = min(len(reps), 4 * parallelism)
        chunks = [reps[k::nchunk] for k in range(nchunk)]
        results = []
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for part in pool.map(_run_chunk, [(spec, c, methods, settings) for c in chunks]):
                results.extend(part)
    results.sort(key=lambda r: r[0])

    errors = [e for r in results for e in r[3]]
    if len(errors) > settings["error_budget"]:
        raise ExperimentAborted(errors)

    pv = {m: np.array([r[2][m] for r in results]) for m in methods}
    n_valid = {m: int(np.isfinite(pv[m]).sum()) for m in methods}
    rates = {}
    for m in methods:
        ok = pv[m][np.isfinite(pv[m])]
        rates[m] = {a: (float(np.sum(ok <= a)) / ok.size if ok.size else math.nan)
                    for a in alphas}
    U = np.vstack([r[1] for r in results])
    mean_corr, within = _pit_correlations(U, spec)
    spec_dict = spec.to_dict()
    spec_dict["kind"] = "conjugate" if isinstance(spec, ConjugateHierSpec) else "copula"
    return SimOutcome(
        spec=spec_dict,
        methods=methods,
        alphas=alphas,
        S=int(S),
        p_values={m: [float(x) for x in pv[m]] for m in methods},
        rejection_rate=rates,
        n_valid=n_valid,
        mean_pairwise_corr=mean_corr,
        mean_within_group_corr=within,
        settings=settings,
        errors=errors,
    )


def _pit_correlations(U, spec):
    """Mean off-diagonal PIT correlation across replicates (and within
    groups for the hierarchical model)."""
    S, n = U.shape
    if S < 3 or n < 2:
        return math.nan, None
    Z = U - U.mean(axis=0)
    sd = np.sqrt(np.sum(Z * Z, axis=0))
    sd[sd == 0.0] = np.nan
    R = (Z.T @ Z) / np.outer(sd, sd)
    off = ~np.eye(n, dtype=bool)
    mean_corr = float(np.nanmean(R[off]))
    within = None
    if isinstance(spec, ConjugateHierSpec) and spec.m > 1:
        g = np.repeat(np.arange(spec.G), spec.m)
        same = (g[:, None] == g[None, :]) & off
        within = float(np.nanmean(R[same]))
    return mean_corr, within
