"""Sweep tau and gap threshold, score magic sets against reference data."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .compare import ComparisonReport, compare
from .datasets import ReferenceDataset
from .shells import DEFAULT_THRESHOLD, MagicSet, ShellTable, build_shell_table
from .spectrum import Model, SpectrumError, enumerate_levels

PAPER_TAU = 0.038
# lies between (13,3) at 22.560 and (13,1) at 22.957 for tau = 0.038,
# so the enumerated table ends on the same level as the published one
TABLE_E_CUT = 22.6
# occupancy covered by the published table; scans keep at least this many
# particles in range so truncation does not look like a shell closure
MIN_PARTICLES = 1516

Range = tuple[float, float, int]


class ScanError(ValueError):
    pass


def grid_values(rng: Range) -> list[float]:
    lo, hi, steps = rng
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValueError(f"bad range {lo}:{hi}")
    if not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if steps == 1:
        if lo != hi:
            raise ValueError("a single-step range needs lo == hi")
        return [float(lo)]
    # rounding keeps e.g. 0.038 from printing as 0.038000000000000006
    return [round(lo + i * (hi - lo) / (steps - 1), 12) for i in range(steps)]


def auto_e_cut(tau: float, min_particles: int = MIN_PARTICLES) -> float:
    """Smallest cut whose levels hold at least `min_particles` particles."""
    e_cut = 8.0
    while True:
        levels = sorted(enumerate_levels(Model.Q_EXACT, e_cut, tau=tau), key=lambda lv: lv.energy)
        total = 0
        for lv in levels:
            total += lv.degeneracy
            if total >= min_particles:
                # enumerate_levels needs a positive cut
                return max(lv.energy, 1e-9)
        e_cut *= 2
        if e_cut > 1e6:
            raise SpectrumError(f"tau={tau}: cannot reach {min_particles} particles")


def q_shell_table(
    tau: float = PAPER_TAU,
    threshold: float = DEFAULT_THRESHOLD,
    e_cut: float | None = TABLE_E_CUT,
    min_particles: int = 0,
) -> ShellTable:
    """Enumerate the deformed oscillator and build its shell table.

    With ``e_cut=None`` the cut is chosen to hold `min_particles`
    (default 1516); otherwise it is raised to that level if lower.
    """
    if e_cut is None:
        e_cut = auto_e_cut(tau, min_particles or MIN_PARTICLES)
    elif min_particles:
        e_cut = max(e_cut, auto_e_cut(tau, min_particles))
    return build_shell_table(enumerate_levels(Model.Q_EXACT, e_cut, tau=tau), threshold)


def default_objective(report: ComparisonReport, spurious_weight: float = 1.0) -> float:
    return len(report.matches) - spurious_weight * len(report.spurious)


@dataclass(frozen=True)
class ScanGrid:
    tau_range: Range
    threshold_range: Range
    e_cut: float | None = None
    min_particles: int = MIN_PARTICLES
    mode: str = "row"
    spurious_weight: float = 1.0
    objective: str = "matches - w*spurious"

    def __post_init__(self):
        self.taus()
        self.thresholds()
        if self.e_cut is not None and not self.e_cut > 0:
            raise ValueError(f"e_cut must be positive, got {self.e_cut}")

    def taus(self) -> list[float]:
        return grid_values(self.tau_range)

    def thresholds(self) -> list[float]:
        return grid_values(self.threshold_range)


@dataclass(frozen=True)
class ScanPoint:
    i: int
    j: int
    tau: float
    threshold: float
    magic: MagicSet
    score: float


@dataclass(frozen=True)
class ScanResult:
    grid: ScanGrid
    points: tuple[ScanPoint, ...]
    best: tuple[ScanPoint, ...] = field(default=())
    skipped: tuple[float, ...] = field(default=())

    def at(self, tau: float, threshold: float) -> ScanPoint:
        for p in self.points:
            if math.isclose(p.tau, tau, abs_tol=1e-12) and math.isclose(p.threshold, threshold, abs_tol=1e-12):
                return p
        raise LookupError(f"no grid point at tau={tau}, threshold={threshold}")


def _eval_tau(args) -> list[tuple[MagicSet, float]] | None:
    grid, i, tau, references, objective = args
    try:
        if grid.e_cut is None and not grid.min_particles:
            raise ValueError("scan needs e_cut or min_particles")
        base = q_shell_table(tau, grid.thresholds()[0], grid.e_cut, grid.min_particles)
    except SpectrumError:
        return None
    out = []
    for thr in grid.thresholds():
        table = build_shell_table((r.level for r in base.rows), thr)
        if table.magic.values:
            report = compare(table.magic, references, mode=grid.mode)
            score = objective(report) if objective else default_objective(report, grid.spurious_weight)
        else:
            score = -math.inf
        out.append((table.magic, score))
    return out


def run_scan(
    grid: ScanGrid,
    references: Sequence[ReferenceDataset],
    objective: Callable[[ComparisonReport], float] | None = None,
    workers: int | None = None,
) -> ScanResult:
    """Evaluate enumerate -> shell table -> compare at every grid point.

    Levels are enumerated once per tau; thresholds only re-read the gaps.
    With ``workers > 1`` the tau rows run in separate processes and are
    merged back in grid order (a custom `objective` must then be picklable).
    """
    if not references:
        raise ValueError("run_scan needs at least one reference dataset")
    taus = grid.taus()
    jobs = [(grid, i, tau, list(references), objective) for i, tau in enumerate(taus)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_tau, jobs))
    else:
        rows = [_eval_tau(job) for job in jobs]

    points = []
    skipped = []
    for i, (tau, row) in enumerate(zip(taus, rows)):
        if row is None:
            skipped.append(tau)
            continue
        for j, (thr, (magic, score)) in enumerate(zip(grid.thresholds(), row)):
            points.append(ScanPoint(i, j, tau, thr, magic, score))
    if not points:
        raise ScanError("no grid point produced a valid spectrum")
    top = max(p.score for p in points)
    best = tuple(p for p in points if p.score == top)
    return ScanResult(grid, tuple(points), best, tuple(skipped))


@dataclass(frozen=True)
class BoundaryPoint:
    tau: float
    threshold: float
    added: tuple[int, ...]
    removed: tuple[int, ...]


@dataclass(frozen=True)
class StabilityRegion:
    target: tuple[int, ...]
    region: tuple[tuple[float, float], ...]
    components: int
    boundary: tuple[BoundaryPoint, ...]

    def contains(self, tau: float, threshold: float) -> bool:
        return any(math.isclose(t, tau, abs_tol=1e-12) and math.isclose(h, threshold, abs_tol=1e-12)
                   for t, h in self.region)

    @property
    def empty(self) -> bool:
        return not self.region


def stability_report(
    result: ScanResult,
    target: MagicSet | Sequence[int],
    anchor: tuple[float, float] | None = None,
) -> StabilityRegion:
    """Connected (4-neighbour) grid region whose magic set equals `target`.

    When several components exist, the one containing the grid point
    nearest to `anchor` is returned if it matches, else the largest one
    (first in grid order on ties). Boundary points are neighbours of the
    region whose magic set differs from the target by exactly one number.
    """
    if not result.points:
        raise ValueError("empty scan result")
    target = tuple(target.values if isinstance(target, MagicSet) else target)
    by_ij = {(p.i, p.j): p for p in result.points}
    hits = {ij for ij, p in by_ij.items() if p.magic.values == target}

    comps = []
    left = set(hits)
    for ij in sorted(hits):
        if ij not in left:
            continue
        comp, stack = [], [ij]
        left.discard(ij)
        while stack:
            cur = stack.pop()
            comp.append(cur)
            for nb in _neighbours(cur):
                if nb in left:
                    left.discard(nb)
                    stack.append(nb)
        comps.append(sorted(comp))

    if not comps:
        return StabilityRegion(target, (), 0, ())
    chosen = max(comps, key=len)
    if anchor is not None:
        near = min(by_ij.values(), key=lambda p: (abs(p.tau - anchor[0]), abs(p.threshold - anchor[1])))
        for comp in comps:
            if (near.i, near.j) in comp:
                chosen = comp

    members = set(chosen)
    tset = set(target)
    boundary = []
    seen = set()
    for ij in chosen:
        for nb in _neighbours(ij):
            if nb in members or nb in seen or nb not in by_ij:
                continue
            seen.add(nb)
            p = by_ij[nb]
            added = tuple(sorted(set(p.magic.values) - tset))
            removed = tuple(sorted(tset - set(p.magic.values)))
            if len(added) + len(removed) == 1:
                boundary.append(BoundaryPoint(p.tau, p.threshold, added, removed))
    boundary.sort(key=lambda b: (b.tau, b.threshold))
    region = tuple((by_ij[ij].tau, by_ij[ij].threshold) for ij in chosen)
    return StabilityRegion(target, region, len(comps), tuple(boundary))


def _neighbours(ij):
    i, j = ij
    return ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))


def _score_str(score: float) -> str:
    return repr(float(score))


def result_to_csv(result: ScanResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "threshold", "score", "magic"])
    for p in result.points:
        w.writerow([repr(p.tau), repr(p.threshold), _score_str(p.score), " ".join(map(str, p.magic.values))])
    return buf.getvalue()


def result_to_json(result: ScanResult) -> str:
    g = result.grid
    payload = {
        "grid": {
            "tau_range": list(g.tau_range),
            "threshold_range": list(g.threshold_range),
            "e_cut": g.e_cut,
            "min_particles": g.min_particles,
            "mode": g.mode,
            "spurious_weight": g.spurious_weight,
            "objective": g.objective,
        },
        "points": [
            {"tau": p.tau, "threshold": p.threshold, "score": None if math.isinf(p.score) else p.score,
             "magic": list(p.magic.values)}
            for p in result.points
        ],
        "best": [{"tau": p.tau, "threshold": p.threshold} for p in result.best],
        "skipped_tau": list(result.skipped),
    }
    return json.dumps(payload, indent=2) + "\n"


def stability_to_dict(region: StabilityRegion) -> dict:
    return {
        "target": list(region.target),
        "components": region.components,
        "region": [list(x) for x in region.region],
        "boundary": [
            {"tau": b.tau, "threshold": b.threshold, "added": list(b.added), "removed": list(b.removed)}
            for b in region.boundary
        ],
    }
