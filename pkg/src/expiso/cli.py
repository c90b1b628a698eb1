"""Command-line front end.

Exit status: 0 when every verdict is ``pass``, 1 when any is ``fail``,
3 when some are ``inconclusive`` and none fail, 2 on usage errors.

Settings may also come from a ``--config`` file of ``key = value`` lines
whose keys are the long flag names without dashes (``h`` may be given as a
comma-separated list).  A flag on the command line beats the file, which
beats the built-in default.
"""
from __future__ import annotations

import argparse
import io as _io
import sys
from pathlib import Path

import numpy as np

from . import grid as g
from . import io as fio
from .explore import ScanConfig, conjecture_scan, profile_curve
from .profile import profile_of, symmetrize
from .verify import (
    FAIL, INCONCLUSIVE, PASS, counterexample_check, sample_component_pairs, verify_component_lemma,
    verify_isoperimetry, verify_neighborhood_form, verify_poisson_median, verify_reduction,
    verify_symmetrisation, verify_trapezoid_lemma,
)

SUITES = ("trapezoid", "component", "poisson", "neighborhood", "symmetrisation", "reduction",
          "isoperimetry", "all")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

DEFAULTS = {
    "n": 2,
    "delta": None,
    "xmax": None,
    "seed": 0,
    "trials": None,
    "h": None,
    "out": None,
    "format": None,
    "points": 99,
    "suite": "all",
    "input": None,
    "ball": None,
}
_TYPES = {"n": int, "delta": float, "xmax": float, "seed": int, "trials": int, "points": int}


class UsageError(Exception):
    pass


def _parse_fraction(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def read_config(path) -> dict:
    out: dict = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"--config: line {lineno} is not key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lstrip("_")
        if key not in DEFAULTS:
            raise UsageError(f"--config: unknown key {key!r} on line {lineno}")
        if key in ("h", "ball"):
            out.setdefault(key, []).extend(v for v in value.split(";" if key == "ball" else ",") if v.strip())
        else:
            out[key] = value
    return out


def _convert(key, value):
    if value is None:
        return None
    try:
        if key == "h":
            return [_parse_fraction(v) for v in value]
        if key == "delta":
            return _parse_fraction(value) if isinstance(value, str) else float(value)
        if key in _TYPES:
            return _TYPES[key](value)
    except ValueError:
        raise UsageError(f"--{key}: invalid value {value!r}") from None
    return value


def _settings(args) -> dict:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = _convert(key, flag)
        elif key in cfg:
            merged[key] = _convert(key, cfg[key])
        else:
            merged[key] = default
    return merged


def _grid(s) -> g.GridSpec:
    n = s["n"]
    if n not in (2, 3):
        raise UsageError(f"--n: grid computations need n = 2 or 3, got {n}")
    base = g.GridSpec.default(n)
    delta = s["delta"] if s["delta"] is not None else base.delta
    xmax = s["xmax"] if s["xmax"] is not None else base.x_max
    try:
        return g.GridSpec(n, delta, xmax)
    except ValueError as exc:
        raise UsageError(f"--delta/--xmax: {exc}") from None


def _ladder(s, spec, factors=(2, 4, 8)):
    hs = s["h"] or [k * spec.delta for k in factors]
    for h in hs:
        try:
            spec.steps(h)
        except ValueError as exc:
            raise UsageError(f"--h: {exc}") from None
    return hs


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _exit_code(verdicts) -> int:
    verdicts = list(verdicts)
    if any(v == FAIL for v in verdicts):
        return EXIT_FAIL
    if any(v == INCONCLUSIVE for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _parse_balls(specs, n):
    centers, radii = [], []
    for text in specs:
        parts = [float(v) for v in text.replace(":", ",").split(",")]
        if len(parts) != n + 1:
            raise UsageError(f"--ball: expected {n} coordinates and a radius, got {text!r}")
        centers.append(parts[:n])
        radii.append(parts[n])
    return np.array(centers), np.array(radii)


def _load_set(s, spec=None) -> g.GridSet:
    if s["input"]:
        try:
            return fio.read_gridset(s["input"])
        except (OSError, ValueError) as exc:
            raise UsageError(f"--input: {exc}") from None
    if s["ball"]:
        spec = spec or _grid(s)
        centers, radii = _parse_balls(s["ball"], spec.n)
        try:
            return g.from_ball_union(spec, centers, radii)
        except ValueError as exc:
            raise UsageError(f"--ball: {exc}") from None
    raise UsageError("--input or --ball is required")


# subcommands ---------------------------------------------------------------

def cmd_profile(s) -> int:
    points = s["points"]
    if points < 1:
        raise UsageError("--points must be positive")
    if not 1 <= s["n"] <= 20:
        raise UsageError(f"--n: dimension must lie in 1..20, got {s['n']}")
    p = np.arange(1, points + 1) / (points + 1)
    rows = profile_curve(s["n"], p)
    fmt = s["format"] or "csv"
    if fmt == "csv":
        buf = _io.StringIO()
        fio.write_csv_stream(rows, buf, ["p", "radius", "kind", "boundary"])
        _emit(buf.getvalue(), s["out"])
    else:
        _emit(fio.dumps_json(rows), s["out"])
    return EXIT_OK


def cmd_measure(s) -> int:
    A = _load_set(s)
    est = g.measure(A)
    out = {"n": A.n, "delta": A.spec.delta, "x_max": A.spec.x_max, "measure": est.value,
           "error_bound": est.error_bound}
    value, err = g.boundary_estimate(A)
    out["boundary_l1"] = {"value": value, "error_bound": err}
    if A.n == 2:
        value, err = g.boundary_estimate(A, g.T)
        out["boundary_T"] = {"value": value, "error_bound": err}
    fmt = s["format"] or "json"
    if fmt == "csv":
        rows = [{"quantity": "measure", "value": est.value, "error_bound": est.error_bound}]
        for key in ("boundary_l1", "boundary_T"):
            if key in out:
                rows.append({"quantity": key, **out[key]})
        buf = _io.StringIO()
        fio.write_csv_stream(rows, buf, ["quantity", "value", "error_bound"])
        _emit(buf.getvalue(), s["out"])
    else:
        _emit(fio.dumps_json(out), s["out"])
    return EXIT_OK


def cmd_symmetrize(s) -> int:
    A = _load_set(s)
    if A.n != 2:
        raise UsageError("--input: symmetrisation needs a planar set")
    if not s["out"]:
        raise UsageError("--out is required (path of the output raster)")
    C = symmetrize(A)
    fio.write_gridset(C, s["out"])
    fmt = s["format"] or "json"
    if fmt == "csv":
        buf = _io.StringIO()
        fio.write_csv_stream(fio.profile_rows(profile_of(C)), buf, ["t", "f"])
        sys.stdout.write(buf.getvalue())
    else:
        ea, ec = g.measure(A), g.measure(C)
        sys.stdout.write(fio.dumps_json({"measure_in": ea.value, "measure_out": ec.value,
                                          "error_bound": ea.error_bound + ec.error_bound,
                                          "output": str(s["out"])}))
    return EXIT_OK


def _suite_reports(s, suite):
    n = s["n"]
    reports = []
    want = (lambda name: suite in (name, "all"))
    if want("trapezoid"):
        reports.append(verify_trapezoid_lemma(n))
    if want("component"):
        per_case = s["trials"] or 1000
        reports.append(verify_component_lemma(n, sample_component_pairs(n, per_case, s["seed"])))
    if want("poisson"):
        reports.append(verify_poisson_median(200))
    grid_suites = ("neighborhood", "symmetrisation", "reduction", "isoperimetry")
    if not any(want(name) for name in grid_suites):
        return reports
    if n not in (2, 3):
        if suite == "all":
            return reports
        raise UsageError(f"--n: suite {suite} needs n = 2 or 3")
    spec = _grid(s)
    hs = _ladder(s, spec)
    planar = n == 2
    if not planar and suite in ("neighborhood", "symmetrisation", "reduction"):
        raise UsageError(f"--n: suite {suite} is planar only")
    if want("neighborhood") and planar:
        for B in (g.simplex(spec, 2.0), g.from_ball_union(spec, [[0.5, 0.5]], [2.5]), g.simplex(spec, 1.0)):
            for h in hs:
                reports.append(verify_neighborhood_form(B, h))
    if want("symmetrisation") and planar:
        from .explore import random_ball_union
        sets = [g.from_ball_union(spec, [[1.0, 2.0]], [1.0])]
        cfg = ScanConfig(n=2, grid=spec, seed=s["seed"], h_ladder=tuple(hs), trials=1)
        sets += [random_ball_union(cfg, t) for t in range(s["trials"] or 3)]
        for A in sets:
            reports.append(verify_symmetrisation(A, hs))
    if want("reduction") and planar:
        for A in (g.simplex(spec, 1.5), g.from_ball_union(spec, [[1.0, 1.0]], [1.5]),
                  g.from_ball_union(spec, [[2.0, 2.0]], [1.0])):
            reports.append(verify_reduction(A, hs)[1])
    if want("isoperimetry"):
        ones = np.ones(n)
        sets = [g.simplex(spec, 2.0), g.from_ball_union(spec, [ones], [1.5]),
                g.from_ball_union(spec, [0.5 * ones, 4.0 * ones], [1.5, 1.5])]
        for A in sets:
            reports.append(verify_isoperimetry(A, hs))
    return reports


def _summary_table(reports) -> str:
    lines = [f"{'check':<20} {'verdict':<13} {'margin':>14} {'tolerance':>11}"]
    for r in reports:
        lines.append(f"{r.check_name:<20} {r.verdict:<13} {r.margin:>14.6e} {r.tolerance:>11.1e}")
    counts = {v: sum(r.verdict == v for r in reports) for v in (PASS, INCONCLUSIVE, FAIL)}
    lines.append(f"{len(reports)} checks: {counts[PASS]} pass, {counts[INCONCLUSIVE]} inconclusive, "
                 f"{counts[FAIL]} fail")
    return "\n".join(lines) + "\n"


def cmd_verify(s) -> int:
    suite = s["suite"]
    if suite not in SUITES:
        raise UsageError(f"--suite: choose from {', '.join(SUITES)}")
    if not 1 <= s["n"] <= 20:
        raise UsageError(f"--n: dimension must lie in 1..20, got {s['n']}")
    try:
        reports = _suite_reports(s, suite)
    except ValueError as exc:
        # suite instances are fixed, so a rejected set means the grid is too coarse
        raise UsageError(f"--delta/--xmax: {exc}") from None
    fmt = s["format"] or "json"
    if fmt == "csv":
        rows = [{"check_name": r.check_name, "verdict": r.verdict, "margin": r.margin,
                 "tolerance": r.tolerance} for r in reports]
        buf = _io.StringIO()
        fio.write_csv_stream(rows, buf, ["check_name", "verdict", "margin", "tolerance"])
        _emit(buf.getvalue(), s["out"])
    else:
        _emit(fio.dumps_json([r.to_dict() for r in reports]), s["out"])
    sys.stderr.write(_summary_table(reports))
    return _exit_code(r.verdict for r in reports)


def cmd_counterexample(s) -> int:
    report = counterexample_check()
    _emit(fio.dumps_json(report.to_dict()), s["out"])
    return _exit_code([report.verdict])


def cmd_scan(s) -> int:
    spec = _grid(s)
    kwargs = {"n": spec.n, "grid": spec, "seed": s["seed"], "trials": s["trials"] or 100}
    if s["h"]:
        kwargs["h_ladder"] = tuple(_ladder(s, spec))
    try:
        cfg = ScanConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(f"--trials/--h: {exc}") from None
    result = conjecture_scan(cfg)
    fmt = s["format"] or "json"
    if fmt == "csv":
        rows = [{"trial": r["trial"], "verdict": r["verdict"], "margin": r["margin"], "delta": r["delta"]}
                for r in result.records]
        buf = _io.StringIO()
        fio.write_csv_stream(rows, buf, ["trial", "verdict", "margin", "delta"])
        _emit(buf.getvalue(), s["out"])
    else:
        _emit(fio.dumps_json(result.to_dict()), s["out"])
    if s["out"] and result.flagged:
        base = Path(s["out"])
        for item in result.flagged:
            ws = g.GridSpec(cfg.n, item["delta"], spec.x_max)
            A = g.from_ball_union(ws, item["centers"], item["radii"])
            fio.write_gridset(A, base.with_name(f"{base.stem}_trial{item['trial']}.expg"))
    h = result.histogram
    sys.stderr.write(f"{cfg.trials} trials: {h[PASS]} pass, {h[INCONCLUSIVE]} inconclusive, {h[FAIL]} fail; "
                     f"min margin {result.min_margin:.6e}\n")
    if cfg.n == 3:
        # the inequality is open in dimension 3: findings are reported, not judged
        return EXIT_OK if h[PASS] else EXIT_INCONCLUSIVE
    return _exit_code(r["verdict"] for r in result.records)


COMMANDS = {
    "profile": cmd_profile,
    "measure": cmd_measure,
    "symmetrize": cmd_symmetrize,
    "verify": cmd_verify,
    "counterexample": cmd_counterexample,
    "scan": cmd_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="dimension (default 2)")
    common.add_argument("--delta", help="grid spacing, e.g. 1/512")
    common.add_argument("--xmax", help="truncation bound per axis")
    common.add_argument("--seed", help="random seed (default 0)")
    common.add_argument("--trials", help="number of random instances")
    common.add_argument("--h", action="append", help="dilation radius; repeat for a ladder")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--config", help="key=value settings file")
    parser = argparse.ArgumentParser(prog="expiso", description="Isoperimetry of the exponential measure on the orthant.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("profile", parents=[common], help="isoperimetric profile table")
    p.add_argument("--points", help="number of interior p values (default 99)")
    for name, text in (("measure", "measure and boundary of a grid set"),
                       ("symmetrize", "anchored rearrangement of a planar grid set")):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("--input", help="GridSet raster")
        q.add_argument("--ball", action="append", help="ball 'x,y[,z],r' (repeatable) instead of --input")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", help=f"one of {', '.join(SUITES)} (default all)")
    sub.add_parser("counterexample", parents=[common], help="symmetric-measure half-plane check")
    sub.add_parser("scan", parents=[common], help="randomized search over ball unions")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        settings = _settings(args)
        if settings["format"] not in (None, "json", "csv"):
            raise UsageError("--format: choose json or csv")
        if settings["trials"] is not None and settings["trials"] < 1:
            raise UsageError("--trials must be positive")
        return COMMANDS[args.command](settings)
    except UsageError as exc:
        sys.stderr.write(f"expiso {args.command}: error: {exc}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
