"""Command-line interface: ``pitcheck test|plot|simulate``.

Exit status is 0 on success, 2 when any selected test rejects at the
chosen level (``test`` and ``plot``), and 1 on any error.
"""

import argparse
import math
import os
import sys
from xml.sax.saxutils import escape

from . import __version__
from .errors import PitError, ExperimentAborted
from .influence import influence_report
from .io import dumps, fmt_float, read_sample
from .pitlab.config import load_config
from .pitlab.harness import run_experiment
from .pointwise import parse_reference, uniform_partition
from .uniformity import ALL_METHODS, POINTWISE_METHODS, pointwise_test, uniformity_test

OUT_ENV = "PITCHECK_OUT"

__all__ = ["main", "main_entry", "build_parser", "cmd_test", "cmd_plot", "cmd_simulate",
           "render_svg", "highlight_marks"]


def _alpha(text):
    a = float(text)
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return a


def _gamma(text):
    if text == "auto":
        return text
    g = float(text)
    if not (math.isfinite(g) and g >= 0.0):
        raise argparse.ArgumentTypeError("gamma must be 'auto' or a nonnegative number")
    return g


def _jobs(text):
    j = int(text)
    if j < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return j


def _partition(text):
    if text == "auto" or text == "uniform":
        return text
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "partition must be auto, uniform or comma-separated numbers") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=_alpha, default=0.05)
    common.add_argument("--combiner", choices=("cct", "tcct", "tippett"), default="tcct")
    common.add_argument("--reference", default="exp:1",
                        help="PIET-C reference: exp:<rate> or normal")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=_jobs, default=1)
    common.add_argument("--out", default=None,
                        help=f"output directory (default ${OUT_ENV} or the current directory)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    sample_opts = argparse.ArgumentParser(add_help=False)
    sample_opts.add_argument("input", help="PIT file (text, .csv or .json)")
    sample_opts.add_argument("--input-format", choices=("text", "csv", "json"), default=None)
    sample_opts.add_argument("--column", default=None, help="CSV column name or index")
    sample_opts.add_argument("--kind", choices=("continuous", "rank"), default=None)
    sample_opts.add_argument("--draws", type=int, default=None,
                             help="number of predictive draws for rank-based PITs")
    sample_opts.add_argument("--partition", type=_partition, default="auto",
                             help="PRIT-C partition: auto, uniform or z1,z2,...")
    sample_opts.add_argument("--pair-budget", type=int, default=None)

    p = argparse.ArgumentParser(prog="pitcheck", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pitcheck {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", parents=[common, sample_opts],
                       help="run uniformity tests on a PIT file")
    t.add_argument("--method", action="append", choices=ALL_METHODS, default=None)

    pl = sub.add_parser("plot", parents=[common, sample_opts],
                        help="Shapley-highlighted ECDF plot data and SVG")
    pl.add_argument("--method", action="append", choices=POINTWISE_METHODS, default=None)
    pl.add_argument("--gamma", type=_gamma, default="auto")

    s = sub.add_parser("simulate", parents=[common], help="run a simulation config")
    s.add_argument("config", help="key = value or flat JSON config file")
    return p


def _outdir(args):
    d = args.out or os.environ.get(OUT_ENV) or "."
    os.makedirs(d, exist_ok=True)
    return d


def _resolved(args):
    cfg = {k: v for k, v in sorted(vars(args).items())}
    cfg["out"] = _outdir(args) if args.out or os.environ.get(OUT_ENV) else None
    return cfg


def _load(args):
    return read_sample(args.input, args.input_format, args.column, args.kind, args.draws)


def _partition_arg(args, sample):
    # continuous samples have no rank grid, so "auto" falls back to i/(n+1)
    if args.partition == "uniform" or (args.partition == "auto" and sample.is_continuous):
        return uniform_partition(sample.n)
    return args.partition


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _reports_csv(reports):
    head = "method,combiner,statistic,global_p,alpha,reject,n"
    rows = [head]
    for r in reports:
        rows.append(",".join([r["method"], r["combiner"], fmt_float(r["statistic"]),
                              fmt_float(r["global_p"]), fmt_float(r["alpha"]),
                              str(r["reject"]).lower(), str(r["n"])]))
    return "\n".join(rows) + "\n"


def cmd_test(args, stdout=sys.stdout):
    """Run the selected tests; returns the exit code."""
    sample = _load(args)
    reference = parse_reference(args.reference)
    methods = args.method or ["potc"]
    reports = []
    for m in dict.fromkeys(methods):
        rep = uniformity_test(sample, m, args.combiner, args.alpha,
                              partition=_partition_arg(args, sample),
                              reference=reference, pair_budget=args.pair_budget)
        reports.append(rep.to_dict())
    doc = {"version": __version__, "config": _resolved(args), "reports": reports}
    text = dumps(doc) if args.format == "json" else _reports_csv(reports)
    if args.out or os.environ.get(OUT_ENV):
        _write(os.path.join(_outdir(args), f"test_report.{args.format}"), text)
    stdout.write(text)
    return 2 if any(r["reject"] for r in reports) else 0


def cmd_plot(args, stdout=sys.stdout):
    """Write plot_data.json, plot_report.json and plot.svg; returns exit code."""
    sample = _load(args)
    method = (args.method or ["potc"])[0]
    if args.combiner == "tippett":
        raise PitError("plotting needs the cct or tcct combiner")
    report, pw = pointwise_test(sample, method, args.combiner, args.alpha,
                                partition=_partition_arg(args, sample),
                                reference=parse_reference(args.reference))
    inf = influence_report(sample, pw, args.combiner, args.gamma, args.alpha)
    points = [p._asdict() for p in inf.ecdf_points]
    marks = highlight_marks(pw, inf)
    out = _outdir(args)
    _write(os.path.join(out, "plot_data.json"), dumps(points))
    meta = {
        "version": __version__,
        "config": _resolved(args),
        "report": report.to_dict(),
        "phi": inf.phi.tolist(),
        "gamma": inf.gamma,
        "influential": sorted(inf.influential),
        "harmonic_n": inf.harmonic_n,
        "grand_value": inf.grand_value,
    }
    _write(os.path.join(out, "plot_report.json"), dumps(meta))
    _write(os.path.join(out, "plot.svg"),
           render_svg(points, marks, title=f"{method} / {args.combiner}: "
                      f"p* = {report.global_p:.4g}, gamma = {inf.gamma:.4g}"))
    stdout.write(f"p* = {fmt_float(report.global_p)}; highlighted {len(marks)} "
                 f"of {len(inf.phi)} tests; wrote {out}\n")
    return 2 if report.reject else 0


def highlight_marks(pw, inf):
    """(x, tilted) positions of the highlighted tests."""
    pts = inf.ecdf_points
    xs = [p.x for p in pts]
    n = len(pts)
    out = []
    for k in sorted(inf.influential):
        if pw.indexing == "sorted":
            p = pts[k]
            out.append((p.x, p.tilted))
        elif pw.indexing == "input":
            pos = int(list(pw.index_map).index(k))
            out.append((pts[pos].x, pts[pos].tilted))
        else:
            z = float(pw.partition[k])
            ecdf = sum(1 for x in xs if x <= z) / n
            out.append((z, ecdf - z))
    return out


def render_svg(points, marks, title="", width=640, height=520):
    """Standalone SVG: ECDF with the diagonal (top) and the tilted ECDF
    with its zero line (bottom); highlighted tests are drawn in red on the
    tilted panel, one marker each."""
    m = 48
    ph = (height - 3 * m) / 2.0
    pw_ = width - 2 * m
    lim = max([0.05] + [abs(p["tilted"]) for p in points] + [abs(t) for _, t in marks]) * 1.1

    def top(x, y):
        return m + x * pw_, m + (1.0 - y) * ph

    def bot(x, y):
        return m + x * pw_, 2 * m + ph + (0.5 - y / (2 * lim)) * ph

    def f(v):
        return f"{v:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{m}" y="{m / 2 + 4}" font-family="sans-serif" font-size="13">'
        f'{escape(title)}</text>',
    ]
    for y0 in (m, 2 * m + ph):
        out.append(f'<rect x="{m}" y="{f(y0)}" width="{f(pw_)}" height="{f(ph)}" '
                   'fill="none" stroke="#444"/>')
    x0, y0 = top(0, 0)
    x1, y1 = top(1, 1)
    out.append(f'<line class="diagonal" x1="{f(x0)}" y1="{f(y0)}" x2="{f(x1)}" y2="{f(y1)}" '
               'stroke="#888" stroke-dasharray="4 3"/>')
    x0, y0 = bot(0, 0)
    x1, _ = bot(1, 0)
    out.append(f'<line class="zero" x1="{f(x0)}" y1="{f(y0)}" x2="{f(x1)}" y2="{f(y0)}" '
               'stroke="#888" stroke-dasharray="4 3"/>')

    step_top = []
    step_bot = []
    prev = 0.0
    for p in points:
        step_top += [top(p["x"], prev), top(p["x"], p["ecdf"])]
        step_bot += [bot(p["x"], prev - p["x"]), bot(p["x"], p["ecdf"] - p["x"])]
        prev = p["ecdf"]
    step_top.append(top(1.0, prev))
    step_bot.append(bot(1.0, prev - 1.0))
    for pts in (step_top, step_bot):
        path = " ".join(f"{f(a)},{f(b)}" for a, b in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="#1f4e9c" stroke-width="1.2"/>')
    for p in points:
        cx, cy = bot(p["x"], p["tilted"])
        out.append(f'<circle class="obs" cx="{f(cx)}" cy="{f(cy)}" r="1.6" fill="#1f4e9c"/>')
    for x, t in marks:
        cx, cy = bot(x, t)
        out.append(f'<circle class="highlight" cx="{f(cx)}" cy="{f(cy)}" r="3.5" '
                   'fill="#d62728" fill-opacity="0.85"/>')
    lab = 'font-family="sans-serif" font-size="11"'
    out.append(f'<text x="{m}" y="{f(m + ph + 14)}" {lab}>ECDF</text>')
    out.append(f'<text x="{m}" y="{f(2 * m + 2 * ph + 14)}" {lab}>ECDF - x '
               f'(range +/-{lim:.3g})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_simulate(args, stdout=sys.stdout):
    """Run a config file; writes sim_outcome.json and rejection_rates.csv."""
    cfg = load_config(args.config)
    outcome = run_experiment(
        cfg.spec, cfg.methods, cfg.replicates, cfg.alphas, args.jobs,
        seed=args.seed, combiner=cfg.combiner, reference=cfg.reference,
        pair_budget=cfg.pair_budget, error_budget=cfg.error_budget,
    )
    out = _outdir(args)
    doc = outcome.to_dict()
    doc["version"] = __version__
    resolved = cfg.resolved()
    resolved["seed"] = outcome.settings["seed"]
    doc["config"] = resolved
    _write(os.path.join(out, "sim_outcome.json"), dumps(doc))
    _write(os.path.join(out, "rejection_rates.csv"), outcome.rates_csv())
    stdout.write(outcome.summary() + "\n")
    return 0


_COMMANDS = {"test": cmd_test, "plot": cmd_plot, "simulate": cmd_simulate}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return _COMMANDS[args.command](args, stdout=stdout)
    except (PitError, ArithmeticError, ExperimentAborted, OSError) as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
