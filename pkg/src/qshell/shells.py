"""Shell structure: sort levels, accumulate occupancy, read magic numbers off gaps."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable

from .spectrum import Level

DEFAULT_THRESHOLD = 0.39

FORMATS = ("markdown", "csv", "json")
CSV_COLUMNS = ("n", "l", "energy", "degeneracy", "cumulative", "gap_after", "is_magic")


@dataclass(frozen=True)
class MagicSet:
    """Strictly increasing magic numbers, optionally with a +- per entry."""

    values: tuple[int, ...]
    uncertainties: tuple[int | None, ...] | None = None

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if any(v <= 0 for v in values):
            raise ValueError("magic numbers must be positive")
        if any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError(f"magic numbers must be strictly increasing: {values}")
        if self.uncertainties is not None:
            unc = tuple(self.uncertainties)
            object.__setattr__(self, "uncertainties", unc)
            if len(unc) != len(values):
                raise ValueError("uncertainties must align with values")
            if any(u is not None and u < 0 for u in unc):
                raise ValueError("uncertainties must be non-negative")

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __contains__(self, value):
        return value in self.values

    def sigma(self, value: int) -> int:
        """Printed uncertainty of `value`, 0 if none."""
        if self.uncertainties is None:
            return 0
        return self.uncertainties[self.values.index(value)] or 0


@dataclass(frozen=True)
class ShellRow:
    level: Level
    cumulative: int
    gap_after: float  # math.inf on the last row

    @property
    def n(self) -> int:
        return self.level.n

    @property
    def l(self) -> int:
        return self.level.l

    @property
    def energy(self) -> float:
        return self.level.energy

    @property
    def degeneracy(self) -> int:
        return self.level.degeneracy


@dataclass(frozen=True)
class ShellTable:
    rows: tuple[ShellRow, ...]
    threshold: float
    magic: MagicSet

    def is_magic(self, row: ShellRow) -> bool:
        return math.isfinite(row.gap_after) and row.gap_after > self.threshold

    @property
    def total(self) -> int:
        return self.rows[-1].cumulative


def build_shell_table(levels: Iterable[Level], threshold: float = DEFAULT_THRESHOLD) -> ShellTable:
    """Sort `levels` by energy and mark a magic number wherever the gap to
    the next level exceeds `threshold`.

    Equal energies are ordered by n, then l. The last level has no
    successor inside the enumerated range, so it never closes a shell.
    """
    levels = sorted(levels, key=lambda lv: (lv.energy, lv.n, lv.l))
    if not levels:
        raise ValueError("cannot build a shell table from an empty level list")
    if not (math.isfinite(threshold) and threshold > 0):
        raise ValueError(f"threshold must be positive, got {threshold!r}")

    rows = []
    total = 0
    for i, lv in enumerate(levels):
        total += lv.degeneracy
        gap = levels[i + 1].energy - lv.energy if i + 1 < len(levels) else math.inf
        rows.append(ShellRow(lv, total, gap))
    magic = MagicSet(tuple(r.cumulative for r in rows if math.isfinite(r.gap_after) and r.gap_after > threshold))
    return ShellTable(tuple(rows), float(threshold), magic)


def gap_at(table: ShellTable, cumulative: int) -> float:
    for row in table.rows:
        if row.cumulative == cumulative:
            return row.gap_after
    raise LookupError(f"no level closes at cumulative occupancy {cumulative}")


def fmt3(x: float) -> str:
    """Fixed 3-decimal string, rounding half away from zero."""
    d = Decimal(repr(float(x))).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP)
    if d == 0:
        d = abs(d)
    return f"{d:.3f}"


def _row_record(table: ShellTable, row: ShellRow, precise: bool) -> dict:
    gap = row.gap_after if math.isfinite(row.gap_after) else None
    return {
        "n": row.n,
        "l": row.l,
        "energy": row.energy if precise else fmt3(row.energy),
        "degeneracy": row.degeneracy,
        "cumulative": row.cumulative,
        "gap_after": gap if precise or gap is None else fmt3(gap),
        "is_magic": table.is_magic(row),
    }


def render_table(table: ShellTable, fmt: str = "markdown") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    if fmt == "json":
        payload = {
            "threshold": table.threshold,
            "magic": list(table.magic.values),
            "rows": [_row_record(table, r, precise=True) for r in table.rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in table.rows:
            rec = _row_record(table, r, precise=False)
            rec["gap_after"] = "" if rec["gap_after"] is None else rec["gap_after"]
            rec["is_magic"] = int(rec["is_magic"])
            w.writerow(rec)
        return buf.getvalue()

    # markdown, laid out like the printed level scheme: gaps above the
    # threshold get their own row and magic totals are bold
    lines = ["| n | l | E(n,l) | 2(2l+1) | total |", "|---:|---:|---:|---:|---:|"]
    for r in table.rows:
        total = f"**{r.cumulative}**" if table.is_magic(r) else str(r.cumulative)
        lines.append(f"| {r.n} | {r.l} | {fmt3(r.energy)} | {r.degeneracy} | {total} |")
        if table.is_magic(r):
            lines.append(f"| | | {fmt3(r.gap_after)} | | |")
    return "\n".join(lines) + "\n"


def parse_table_csv(text: str) -> list[dict]:
    """Inverse of the CSV rendering, with numeric fields converted."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append({
            "n": int(rec["n"]),
            "l": int(rec["l"]),
            "energy": float(rec["energy"]),
            "degeneracy": int(rec["degeneracy"]),
            "cumulative": int(rec["cumulative"]),
            "gap_after": float(rec["gap_after"]) if rec["gap_after"] else math.inf,
            "is_magic": bool(int(rec["is_magic"])),
        })
    return out

