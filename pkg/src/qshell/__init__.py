"""Shell structure and magic numbers of the 3-d q-deformed harmonic oscillator."""
from __future__ import annotations

__version__ = "0.1.0"

from .compare import ComparisonReport, compare
from .datasets import ReferenceDataset, get_dataset, registry
from .qmath import DeformationParameter, q_number
from .scan import ScanGrid, q_shell_table, run_scan, stability_report
from .shells import MagicSet, ShellTable, build_shell_table, gap_at, render_table
from .spectrum import (
    Level,
    Model,
    energy_nilsson,
    energy_plain_ho,
    energy_q_exact,
    energy_q_taylor,
    enumerate_levels,
    pseudo_3nl_fill,
)

__all__ = [
    "ComparisonReport", "DeformationParameter", "Level", "MagicSet", "Model",
    "ReferenceDataset", "ScanGrid", "ShellTable", "build_shell_table", "compare",
    "energy_nilsson", "energy_plain_ho", "energy_q_exact", "energy_q_taylor",
    "enumerate_levels", "gap_at", "get_dataset", "pseudo_3nl_fill", "q_number",
    "q_shell_table", "registry", "render_table", "run_scan", "stability_report",
]
