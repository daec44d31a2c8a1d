"""Flat key-value simulation configs.

A config file holds ``key = value`` lines (``#`` starts a comment) or a
flat JSON object. It names the model (``conjugate`` or ``copula``), its
parameters and the test battery. Unknown keys are rejected.

Example::

    model = conjugate
    dgp = student_t
    nu = 3
    G = 50
    m = 5
    replicates = 1000
    methods = potc, pietc, ks
    alphas = 0.01, 0.05
    seed = 7
"""

from dataclasses import dataclass, field
import json
import os

from ..errors import ConfigError
from .conjugate import (
    BetaBinomial, ConjugateHierSpec, GeneralizedNormal, LogNormal, NegBinomial,
    Normal, StudentT,
)
from .copula import LowRankCopulaSpec, calibrate_loading_scale

__all__ = ["SimConfig", "parse_config", "load_config", "SCENARIO_DEFAULTS"]

# hyperparameters used for each DGP family when the config does not set them
SCENARIO_DEFAULTS = {
    "normal": {"sigma": 1.0, "tau": 1.0, "mu0": 0.0},
    "student_t": {"sigma": 0.06, "tau": 1.96, "mu0": 0.0},
    "lognormal": {"sigma": 1.0, "tau": 0.96, "mu0": 1.0},
    "gennormal": {"sigma": 1.0, "tau": 1.96, "mu0": 0.0, "alpha": 0.31},
    "betabinomial": {"sigma": 1.0, "tau": 1.5, "mu0": 0.4},
    "negbinomial": {"sigma": 1.0, "tau": 1.5, "mu0": 2.0794415416798357},
}

_DGP_KEYS = {
    "normal": (),
    "student_t": ("nu",),
    "lognormal": ("sigma_log",),
    "gennormal": ("alpha", "beta"),
    "betabinomial": ("N", "phi"),
    "negbinomial": ("phi",),
}

_COMMON = {"model", "seed", "replicates", "methods", "alphas", "combiner",
           "reference", "pair_budget", "error_budget"}
_CONJ = {"G", "m", "sigma", "tau", "mu0", "dgp", "fit", "pit",
         "nu", "sigma_log", "alpha", "beta", "N", "phi"}
_COPULA = {"n", "p", "loading_scale", "target_corr", "mode"}

_INT_KEYS = {"seed", "replicates", "pair_budget", "error_budget", "G", "m", "N", "n", "p"}
_LIST_KEYS = {"methods", "alphas"}
_STR_KEYS = {"model", "combiner", "reference", "dgp", "fit", "pit", "mode"}


@dataclass
class SimConfig:
    spec: object
    replicates: int = 1000
    methods: list = field(default_factory=lambda: ["potc", "pritc", "pietc", "ks"])
    alphas: list = field(default_factory=lambda: [0.05])
    combiner: str = "tcct"
    reference: str = "exp:1"
    pair_budget: int | None = None
    error_budget: int = 0
    raw: dict = field(default_factory=dict)

    def resolved(self):
        """Every setting after defaults, for provenance records."""
        return {
            "spec": self.spec.to_dict(),
            "model": "conjugate" if isinstance(self.spec, ConjugateHierSpec) else "copula",
            "replicates": self.replicates,
            "methods": list(self.methods),
            "alphas": list(self.alphas),
            "combiner": self.combiner,
            "reference": self.reference,
            "pair_budget": self.pair_budget,
            "error_budget": self.error_budget,
        }


def _convert(key, value, where):
    try:
        if key in _LIST_KEYS:
            items = value if isinstance(value, list) else [
                s.strip() for s in str(value).split(",") if s.strip()]
            if key == "alphas":
                return [float(a) for a in items]
            return [str(m).strip().lower() for m in items]
        if key in _STR_KEYS:
            return str(value).strip().lower()
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: bad value {value!r} for {key!r}") from None


def _parse_lines(text):
    out = {}
    where = {}
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"line {k}: expected 'key = value'")
        key, value = (t.strip() for t in s.split("=", 1))
        if key in out:
            raise ConfigError(f"line {k}: duplicate key {key!r}")
        out[key] = value
        where[key] = f"line {k}"
    return out, where


def parse_config(text, fmt="kv"):
    """Build a :class:`SimConfig` from config text (``kv`` or ``json``)."""
    if fmt == "json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(raw, dict) or any(isinstance(v, dict) for v in raw.values()):
            raise ConfigError("JSON config must be a flat object")
        where = {k: f"key {k!r}" for k in raw}
    else:
        raw, where = _parse_lines(text)

    model = str(raw.get("model", "conjugate")).strip().lower()
    if model not in ("conjugate", "copula"):
        raise ConfigError(f"model must be conjugate or copula, not {model!r}")
    allowed = _COMMON | (_CONJ if model == "conjugate" else _COPULA)
    unknown = sorted(set(raw) - allowed)
    if unknown:
        k = unknown[0]
        raise ConfigError(f"{where[k]}: unknown key {k!r} for model {model!r}")
    vals = {k: _convert(k, v, where[k]) for k, v in raw.items()}
    seed = vals.get("seed", 0)

    if model == "conjugate":
        dgp_name = vals.get("dgp", "normal")
        if dgp_name not in _DGP_KEYS:
            raise ConfigError(f"unknown dgp {dgp_name!r}; choose from {', '.join(_DGP_KEYS)}")
        for k in ("nu", "sigma_log", "alpha", "beta", "N", "phi"):
            if k in vals and k not in _DGP_KEYS[dgp_name]:
                raise ConfigError(f"{where[k]}: key {k!r} does not apply to dgp {dgp_name!r}")
        base = dict(SCENARIO_DEFAULTS[dgp_name])
        base.update({k: v for k, v in vals.items() if k in base})
        try:
            if dgp_name == "normal":
                dgp = Normal()
            elif dgp_name == "student_t":
                dgp = StudentT(vals.get("nu", 3.0))
            elif dgp_name == "lognormal":
                dgp = LogNormal(vals.get("sigma_log", 0.5))
            elif dgp_name == "gennormal":
                dgp = GeneralizedNormal(base["alpha"], vals.get("beta", 2.0))
            elif dgp_name == "betabinomial":
                dgp = BetaBinomial(vals.get("N", 20), vals.get("phi", 10.0))
            else:
                dgp = NegBinomial(vals.get("phi", 10.0))
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        if "G" not in vals or "m" not in vals:
            raise ConfigError("conjugate model needs G and m")
        spec = ConjugateHierSpec(
            G=vals["G"], m=vals["m"], sigma=base["sigma"], tau=base["tau"],
            mu0=base["mu0"], dgp=dgp, seed=seed, fit=vals.get("fit", "moments"),
            pit=vals.get("pit", "loo"),
        )
    else:
        if "n" not in vals:
            raise ConfigError("copula model needs n")
        mode = vals.get("mode", "shared")
        p = vals.get("p", 1)
        if "target_corr" in vals and "loading_scale" in vals:
            raise ConfigError("give either loading_scale or target_corr, not both")
        if "target_corr" in vals:
            ell = calibrate_loading_scale(vals["n"], p, vals["target_corr"], seed, mode)
        else:
            ell = vals.get("loading_scale", 0.5)
        spec = LowRankCopulaSpec(n=vals["n"], p=p, loading_scale=ell, seed=seed, mode=mode)

    cfg = SimConfig(spec=spec, raw=dict(raw))
    for k in ("replicates", "methods", "alphas", "combiner", "reference",
              "pair_budget", "error_budget"):
        if k in vals:
            setattr(cfg, k, vals[k])
    if cfg.replicates < 1:
        raise ConfigError("replicates must be at least 1")
    if cfg.combiner not in ("cct", "tcct", "tippett"):
        raise ConfigError(f"unknown combiner {cfg.combiner!r}")
    return cfg


def load_config(path):
    """Read a config file; ``.json`` files are parsed as JSON."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    fmt = "json" if os.path.splitext(str(path))[1].lower() == ".json" else "kv"
    return parse_config(text, fmt)
