"""CSV discovery and schema-checked loading.

The benchmark CLI writes four kinds of delimited files: per-run trajectory
CSVs (Trotter and hybrid variants), merged summary.csv tables, and spectrum
level curves.  Files are recognized by name pattern, then validated against
the expected column set; a missing column is reported by name.
"""

from __future__ import annotations

import csv
from pathlib import Path

TROTTER_SUMMARY = ["protocol", "n", "T", "seed", "r_final", "cnot_total"]
HYBRID_SUMMARY = [
    "method", "n", "T", "seed", "r_final", "energy_final", "cnot_total",
    "ansatz_size", "max_filter_energy_increase", "degraded",
]
TROTTER_TRAJ = [
    "protocol", "n", "T", "dt", "seed", "step", "s", "energy", "ratio",
    "cnot_cumulative",
]
HYBRID_TRAJ = [
    "method", "n", "T", "dt", "seed", "step", "t", "s", "energy", "variance",
    "ratio", "ansatz_size", "cnot_total", "imag_steps",
]
SPECTRUM = ["n", "seed", "s", "E0", "E1", "E2", "E3", "E4"]


class SchemaError(ValueError):
    """A CSV is missing columns required for a figure."""


class MissingInputError(FileNotFoundError):
    """No CSV of the kind a figure needs was found."""


def read_rows(path: Path, required: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing columns: {', '.join(missing)}"
            )
        return list(reader)


def _summaries(csv_dir: Path, key_column: str, required: list[str]) -> list[dict]:
    rows = []
    for path in sorted(Path(csv_dir).rglob("summary.csv")):
        with open(path, newline="") as fh:
            header = csv.DictReader(fh).fieldnames or []
        if key_column in header:
            rows.extend(read_rows(path, required))
    return rows


def load_trotter_summaries(csv_dir: Path) -> list[dict]:
    return _summaries(csv_dir, "protocol", TROTTER_SUMMARY)


def load_hybrid_summaries(csv_dir: Path) -> list[dict]:
    return _summaries(csv_dir, "method", HYBRID_SUMMARY)


def _trajectories(csv_dir: Path, key_column: str, required: list[str]):
    rows = []
    for path in sorted(Path(csv_dir).rglob("traj_*.csv")):
        with open(path, newline="") as fh:
            header = csv.DictReader(fh).fieldnames or []
        if key_column in header:
            rows.extend(read_rows(path, required))
    return rows


def load_trotter_trajectories(csv_dir: Path) -> list[dict]:
    return _trajectories(csv_dir, "protocol", TROTTER_TRAJ)


def load_hybrid_trajectories(csv_dir: Path) -> list[dict]:
    return _trajectories(csv_dir, "method", HYBRID_TRAJ)


def load_spectra(csv_dir: Path) -> list[dict]:
    rows = []
    for path in sorted(Path(csv_dir).rglob("levels_n*.csv")):
        rows.extend(read_rows(path, SPECTRUM))
    return rows
