"""Randomized search over finite unions of l1 balls."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grid as g
from .extremal import profile_table
from .verify import DEFAULT_L, FAIL, INCONCLUSIVE, PASS, VerificationReport, _jsonable, verify_isoperimetry

DEFAULT_WINDOW_BUDGET = 60_000_000


def _default_ladder(spec: g.GridSpec) -> tuple[float, ...]:
    factors = (4, 8, 16) if spec.n == 2 else (1, 2, 4)
    return tuple(k * spec.delta for k in factors)


_DEFAULT_RADII = {2: (0.2, 1.5), 3: (1.2, 3.0)}


@dataclass(frozen=True)
class ScanConfig:
    n: int = 2
    trials: int = 100
    balls_per_set: tuple[int, int] = (1, 3)
    radius_range: tuple[float, float] | None = None
    seed: int = 0
    grid: g.GridSpec | None = None
    h_ladder: tuple[float, ...] | None = None
    refinements: int = 2
    L: float = DEFAULT_L
    window_budget: int = DEFAULT_WINDOW_BUDGET

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError("scans run in dimension 2 or 3")
        grid = self.grid or g.GridSpec.default(self.n)
        if grid.n != self.n:
            raise ValueError("grid dimension differs from n")
        object.__setattr__(self, "grid", grid)
        if self.radius_range is None:
            object.__setattr__(self, "radius_range", _DEFAULT_RADII[self.n])
        if self.h_ladder is None:
            object.__setattr__(self, "h_ladder", _default_ladder(grid))
        object.__setattr__(self, "h_ladder", tuple(float(h) for h in self.h_ladder))
        if self.trials < 1:
            raise ValueError("need at least one trial")
        lo, hi = self.balls_per_set
        if not 1 <= lo <= hi:
            raise ValueError("balls_per_set must be a nonempty range of positive counts")
        rlo, rhi = self.radius_range
        if not 0 < rlo <= rhi:
            raise ValueError("radius_range must be a nonempty range of positive radii")
        if not self.h_ladder:
            raise ValueError("empty h ladder")
        for h in self.h_ladder:
            grid.steps(h)
        if self.refinements < 0:
            raise ValueError("refinements must be non-negative")


def draw_balls(cfg: ScanConfig, trial: int) -> tuple[np.ndarray, np.ndarray]:
    """Centres and radii for ``trial``; a pure function of ``(cfg.seed, trial)``."""
    rng = np.random.default_rng([cfg.seed, trial])
    lo, hi = cfg.balls_per_set
    count = int(rng.integers(lo, hi + 1))
    centers = np.clip(rng.exponential(size=(count, cfg.n)), 0.0, cfg.grid.x_max)
    radii = rng.uniform(cfg.radius_range[0], cfg.radius_range[1], size=count)
    return centers, radii


def random_ball_union(cfg: ScanConfig, trial: int, spec: g.GridSpec | None = None) -> g.GridSet:
    centers, radii = draw_balls(cfg, trial)
    return g.from_ball_union(spec or cfg.grid, centers, radii)


def _window_cells(spec, centers, radii, reach):
    lo = np.clip(np.min(centers - radii[:, None], axis=0), 0, spec.x_max)
    hi = np.clip(np.max(centers + radii[:, None], axis=0), 0, spec.x_max)
    return math.prod(int((b - a) / spec.delta) + 2 * reach + 2 for a, b in zip(lo, hi))


@dataclass
class ScanResult:
    n: int
    min_margin: float
    min_margin_witness: dict | None
    histogram: dict
    records: list = field(default_factory=list)
    flagged: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable({
            "n": self.n,
            "min_margin": self.min_margin,
            "min_margin_witness": self.min_margin_witness,
            "histogram": self.histogram,
            "flagged": self.flagged,
            "records": self.records,
        })


def _run_trial(cfg: ScanConfig, trial: int) -> dict:
    centers, radii = draw_balls(cfg, trial)
    spec = cfg.grid
    history = []
    report: VerificationReport | None = None
    for level in range(cfg.refinements + 1):
        A = g.from_ball_union(spec, centers, radii)
        try:
            report = verify_isoperimetry(A, cfg.h_ladder, L=cfg.L)
            entry = {"delta": spec.delta, "verdict": report.verdict, "margin": report.margin,
                     "margin_upper": report.margin_upper, "L_needed": report.details["L_needed"]}
        except ValueError as exc:
            report = None
            entry = {"delta": spec.delta, "verdict": INCONCLUSIVE, "margin": None, "note": str(exc)}
        history.append(entry)
        if entry["verdict"] == PASS or level == cfg.refinements:
            break
        finer = spec.refined()
        reach = max(finer.steps(h) for h in cfg.h_ladder) + cfg.n
        if _window_cells(finer, centers, radii, reach) > cfg.window_budget:
            history.append({"delta": finer.delta, "note": "refinement skipped: window exceeds budget"})
            break
        spec = finer
    final = [h for h in history if "verdict" in h][-1]
    return {
        "trial": trial,
        "centers": centers.tolist(),
        "radii": radii.tolist(),
        "verdict": final["verdict"],
        "margin": final["margin"],
        "delta": final["delta"],
        "history": history,
        "anomaly": bool(report is not None and report.details["anomaly"]),
    }


def conjecture_scan(cfg: ScanConfig) -> ScanResult:
    """Run the isoperimetry check on ``cfg.trials`` random ball unions.

    Trials that do not pass are rebuilt on grids with half the spacing, up
    to ``cfg.refinements`` times.  A fail that survives refinement is flagged:
    in the plane, where the inequality is a theorem, as a discretization
    defect; in dimension 3 as a candidate against the conjectured inequality.
    """
    records = [_run_trial(cfg, t) for t in range(cfg.trials)]
    histogram = {PASS: 0, INCONCLUSIVE: 0, FAIL: 0}
    for r in records:
        histogram[r["verdict"]] += 1
    scored = [r for r in records if r["margin"] is not None]
    witness = min(scored, key=lambda r: (r["margin"], r["trial"])) if scored else None
    kind = "discretization_defect" if cfg.n == 2 else "conjecture_candidate"
    flagged = [{"trial": r["trial"], "kind": kind, "margin": r["margin"], "centers": r["centers"],
                "radii": r["radii"], "delta": r["delta"]} for r in records if r["verdict"] == FAIL]
    return ScanResult(
        n=cfg.n,
        min_margin=witness["margin"] if witness else math.nan,
        min_margin_witness=None if witness is None else {
            k: witness[k] for k in ("trial", "centers", "radii", "delta", "margin")},
        histogram=histogram,
        records=records,
        flagged=flagged,
    )


def profile_curve(n: int, p_grid) -> list[dict]:
    """Rows ``(p, kind, radius, boundary)`` of the isoperimetric profile.

    Radii must increase with ``p`` on the simplex side and decrease on the
    complement side; a violation means the inversion is broken.
    """
    rows = sorted(profile_table(n, p_grid), key=lambda r: r["p"])
    for kind, sign in (("simplex", 1), ("complement", -1)):
        radii = np.array([r["radius"] for r in rows if r["kind"] == kind])
        if radii.size > 1 and np.any(sign * np.diff(radii) < 0):
            raise ArithmeticError(f"{kind} radii are not monotone in p")
    return [{"p": r["p"], "kind": r["kind"], "radius": r["radius"], "boundary": r["boundary"]} for r in rows]
