"""Reference magic numbers from experiment and from other shell models.

Entries printed in parentheses in the source tables carry ``weak=True``;
an alternative value printed next to another (e.g. ``338(356)``) is stored
as its own weak entry with ``variant_of`` pointing at the main value.

Extra datasets are picked up from ``*.json`` files in the directory named
by the ``QSHELL_DATA_DIR`` environment variable, using the same per-dataset
schema as the bundled file::

    {"id": "...", "kind": "experiment" | "model", "source": "...",
     "values": [{"n": 92}, {"n": 198, "sigma": 2}, {"n": 20, "weak": true}]}
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .shells import MagicSet

DATA_DIR_ENV = "QSHELL_DATA_DIR"
KINDS = ("experiment", "model")


class DatasetNotFound(LookupError):
    pass


@dataclass(frozen=True)
class Entry:
    value: int
    sigma: int | None = None
    weak: bool = False
    variant_of: int | None = None


@dataclass(frozen=True)
class ReferenceDataset:
    id: str
    kind: str
    source: str
    entries: tuple[Entry, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"{self.id}: kind must be one of {KINDS}, got {self.kind!r}")
        if not self.entries:
            raise ValueError(f"{self.id}: dataset has no values")
        # MagicSet validates ordering and positivity
        self.magic

    @property
    def magic(self) -> MagicSet:
        return MagicSet(
            tuple(e.value for e in self.entries),
            tuple(e.sigma for e in self.entries),
        )

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(e.value for e in self.entries)

    def entry(self, value: int) -> Entry:
        for e in self.entries:
            if e.value == value:
                return e
        raise DatasetNotFound(f"{self.id} has no entry {value}")

    def to_dict(self) -> dict:
        vals = []
        for e in self.entries:
            rec: dict = {"n": e.value}
            if e.sigma is not None:
                rec["sigma"] = e.sigma
            if e.weak:
                rec["weak"] = True
            if e.variant_of is not None:
                rec["variant_of"] = e.variant_of
            vals.append(rec)
        return {"id": self.id, "kind": self.kind, "source": self.source, "values": vals}


def dataset_from_dict(obj: dict) -> ReferenceDataset:
    try:
        entries = tuple(
            Entry(
                int(v["n"]),
                None if v.get("sigma") is None else int(v["sigma"]),
                bool(v.get("weak", False)),
                None if v.get("variant_of") is None else int(v["variant_of"]),
            )
            for v in obj["values"]
        )
        return ReferenceDataset(str(obj["id"]), str(obj["kind"]), str(obj.get("source", "")), entries)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed dataset record: {exc}") from exc


def load_dataset(path: str | Path) -> ReferenceDataset:
    return dataset_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _bundled() -> list[ReferenceDataset]:
    text = resources.files("qshell").joinpath("data/reference_magic.json").read_text(encoding="utf-8")
    return [dataset_from_dict(d) for d in json.loads(text)["datasets"]]


def registry(extra: list[ReferenceDataset] | None = None) -> list[ReferenceDataset]:
    """Bundled datasets, then any from QSHELL_DATA_DIR, then `extra`."""
    out = _bundled()
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        out.extend(load_dataset(p) for p in sorted(Path(data_dir).glob("*.json")))
    out.extend(extra or [])
    seen = set()
    for ds in out:
        if ds.id in seen:
            raise ValueError(f"duplicate dataset id {ds.id!r}")
        seen.add(ds.id)
    return out


def get_dataset(dataset_id: str, datasets: list[ReferenceDataset] | None = None) -> ReferenceDataset:
    for ds in registry() if datasets is None else datasets:
        if ds.id == dataset_id:
            return ds
    raise DatasetNotFound(f"unknown dataset id {dataset_id!r}")


def experiments(datasets: list[ReferenceDataset] | None = None) -> list[ReferenceDataset]:
    return [ds for ds in (registry() if datasets is None else datasets) if ds.kind == "experiment"]
