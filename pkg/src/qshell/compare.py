"""Align predicted magic numbers with reference datasets.

Two matching rules are offered:

strict
    Per dataset, a greedy one-to-one pass over the predictions in
    increasing order. A prediction p takes the nearest still-unmatched
    observed value o with |p - o| <= sigma(o) + slack, where sigma is the
    printed uncertainty (0 when none was printed). Equidistant candidates
    go to the smaller observed value.

row
    Mimics how comparison tables put observations on the row of a
    prediction. Every observed value o is attached to its nearest
    prediction p (equidistant: the smaller p) and counts as a match if
    |p - o| <= max(sigma(o), row_window * o). Several observations of one
    dataset may share a row, e.g. 90 and 92 both supporting 92.

A prediction is *supported* if it matches in at least one dataset and
*spurious* otherwise.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .datasets import ReferenceDataset
from .shells import MagicSet

MODES = ("strict", "row")
DEFAULT_ROW_WINDOW = 0.05


@dataclass(frozen=True, order=True)
class Match:
    predicted: int
    observed: int
    dataset: str
    sigma: int | None = None


@dataclass(frozen=True, order=True)
class Miss:
    observed: int
    dataset: str
    sigma: int | None = None


@dataclass(frozen=True)
class ComparisonReport:
    predicted: tuple[int, ...]
    datasets: tuple[str, ...]
    matches: tuple[Match, ...]
    misses: tuple[Miss, ...]
    spurious: tuple[int, ...]
    mode: str
    tolerance_rule: str
    weak: frozenset = field(default=frozenset(), compare=False)

    @property
    def supported(self) -> tuple[int, ...]:
        hit = {m.predicted for m in self.matches}
        return tuple(p for p in self.predicted if p in hit)

    def matches_for(self, predicted: int) -> list[Match]:
        return [m for m in self.matches if m.predicted == predicted]


def _strict(pred: Sequence[int], ds: ReferenceDataset, slack: float):
    free = list(ds.entries)
    matches = []
    for p in pred:
        cands = [e for e in free if abs(p - e.value) <= (e.sigma or 0) + slack]
        if not cands:
            continue
        best = min(cands, key=lambda e: (abs(p - e.value), e.value))
        free.remove(best)
        matches.append(Match(p, best.value, ds.id, best.sigma))
    misses = [Miss(e.value, ds.id, e.sigma) for e in free]
    return matches, misses


def _row(pred: Sequence[int], ds: ReferenceDataset, row_window: float):
    matches, misses = [], []
    for e in ds.entries:
        p = min(pred, key=lambda x: (abs(x - e.value), x))
        if abs(p - e.value) <= max(e.sigma or 0, row_window * e.value):
            matches.append(Match(p, e.value, ds.id, e.sigma))
        else:
            misses.append(Miss(e.value, ds.id, e.sigma))
    return matches, misses


def compare(
    predicted: MagicSet | Sequence[int],
    references: Sequence[ReferenceDataset],
    mode: str = "strict",
    slack: float = 0.0,
    row_window: float = DEFAULT_ROW_WINDOW,
) -> ComparisonReport:
    pred = tuple(predicted.values if isinstance(predicted, MagicSet) else MagicSet(tuple(predicted)).values)
    if not pred:
        raise ValueError("nothing to compare: predicted set is empty")
    if not references:
        raise ValueError("nothing to compare against: no reference datasets")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    if slack < 0 or row_window < 0:
        raise ValueError("slack and row_window must be non-negative")

    matches, misses = [], []
    for ds in references:
        m, x = _strict(pred, ds, slack) if mode == "strict" else _row(pred, ds, row_window)
        matches += m
        misses += x
    hit = {m.predicted for m in matches}
    if mode == "strict":
        rule = f"strict: |p - o| <= sigma(o) + {slack:g}, one-to-one per dataset"
    else:
        rule = f"row: o joins nearest p if |p - o| <= max(sigma(o), {row_window:g}*o)"
    weak = frozenset((ds.id, e.value) for ds in references for e in ds.entries if e.weak)
    return ComparisonReport(
        predicted=pred,
        datasets=tuple(ds.id for ds in references),
        matches=tuple(sorted(matches)),
        misses=tuple(sorted(misses)),
        spurious=tuple(p for p in pred if p not in hit),
        mode=mode,
        tolerance_rule=rule,
        weak=weak,
    )


def _cell(obs: int, sigma: int | None, weak: bool) -> str:
    s = f"{obs}±{sigma}" if sigma else str(obs)
    return f"({s})" if weak else s


def report_rows(report: ComparisonReport) -> list[tuple[int | None, dict[str, list[str]]]]:
    """Table layout: one row per prediction, plus one row per distinct
    missed observed value, ordered by value."""
    rows: dict[tuple[int, int], tuple[int | None, dict[str, list[str]]]] = {}
    for p in report.predicted:
        rows[(p, 0)] = (p, {})
    for m in report.matches:
        cell = _cell(m.observed, m.sigma, (m.dataset, m.observed) in report.weak)
        rows[(m.predicted, 0)][1].setdefault(m.dataset, []).append(cell)
    for x in report.misses:
        key = (x.observed, 1)
        rows.setdefault(key, (None, {}))
        rows[key][1].setdefault(x.dataset, []).append(_cell(x.observed, x.sigma, (x.dataset, x.observed) in report.weak))
    return [rows[k] for k in sorted(rows)]


def render_report(report: ComparisonReport, fmt: str = "markdown") -> str:
    if fmt == "json":
        payload = {
            "mode": report.mode,
            "tolerance_rule": report.tolerance_rule,
            "datasets": list(report.datasets),
            "predicted": list(report.predicted),
            "matches": [vars(m) for m in report.matches],
            "misses": [vars(x) for x in report.misses],
            "spurious": list(report.spurious),
        }
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["status", "predicted", "observed", "sigma", "dataset"])
        for m in report.matches:
            w.writerow(["match", m.predicted, m.observed, "" if m.sigma is None else m.sigma, m.dataset])
        for x in report.misses:
            w.writerow(["miss", "", x.observed, "" if x.sigma is None else x.sigma, x.dataset])
        for p in report.spurious:
            w.writerow(["spurious", p, "", "", ""])
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")

    head = ["predicted", *report.datasets]
    lines = ["| " + " | ".join(head) + " |", "|" + "---:|" * len(head)]
    for p, cells in report_rows(report):
        first = "" if p is None else (f"{p} !" if p in report.spurious else str(p))
        lines.append("| " + " | ".join([first] + [",".join(cells.get(d, [])) for d in report.datasets]) + " |")
    lines.append("")
    lines.append(f"rule: {report.tolerance_rule}")
    lines.append(f"supported {len(report.supported)}/{len(report.predicted)}, "
                 f"spurious: {' '.join(map(str, report.spurious)) or 'none'}")
    return "\n".join(lines) + "\n"
