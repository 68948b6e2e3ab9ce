import csv
from pathlib import Path

import pytest

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


def write_csv(path: Path, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _schedule(step, steps):
    return step / steps


def build_corpus(root: Path, seeds=(0, 1, 2)):
    """Synthetic CSV tree with the shapes the benchmark CLI writes."""
    steps = 10
    trotter = root / "trotter"
    summary = []
    for protocol, quality in (("AD", 0.6), ("CD", 0.8)):
        for total_time in (1.0, 10.0):
            for seed in seeds:
                r_final = min(quality + 0.03 * total_time + 0.01 * seed, 0.999)
                cnots = int(100 * total_time) * 56 * (3 if protocol == "CD" else 1)
                summary.append((protocol, 8, total_time, seed, r_final, cnots))
                traj = [
                    (protocol, 8, total_time, 0.01, seed, k, _schedule(k, steps),
                     -2.0 - 0.1 * k, 0.5 + 0.04 * k + 0.005 * seed,
                     56 * k * (3 if protocol == "CD" else 1))
                    for k in range(steps + 1)
                ]
                write_csv(
                    trotter / f"traj_{protocol}_n8_T{total_time:g}_seed{seed}.csv",
                    TROTTER_TRAJ, traj,
                )
    write_csv(trotter / "summary.csv", TROTTER_SUMMARY, summary)

    hybrid = root / "havqds"
    summary = []
    for method, quality in (("havqds", 0.95), ("avqds", 0.9)):
        for n in (6, 8, 10):
            for total_time in (1.0, 5.0):
                for seed in seeds:
                    r_final = min(quality + 0.002 * seed, 0.9999)
                    cnots = 5 * n * n - 17 * n + seed
                    summary.append(
                        (method, n, total_time, seed, r_final, -0.7 * n,
                         cnots, cnots // 2, 0.0, 0)
                    )
                    traj = [
                        (method, n, total_time, 0.01, seed, k,
                         k * total_time / steps, _schedule(k, steps),
                         -0.5 * n - 0.02 * k, 0.1 / (k + 1),
                         0.9 + 0.009 * k + 0.001 * seed, 2 * k,
                         int(cnots * k / steps), k % 3)
                        for k in range(steps + 1)
                    ]
                    write_csv(
                        hybrid / f"traj_{method}_n{n}_T{total_time:g}_seed{seed}.csv",
                        HYBRID_TRAJ, traj,
                    )
    write_csv(hybrid / "summary.csv", HYBRID_SUMMARY, summary)

    spectrum_rows = [
        (8, seed, k / steps,
         -8 + 7 * k / steps + 0.05 * seed, -6.5 + 6 * k / steps,
         -6.3 + 5.8 * k / steps, -6.1 + 5.6 * k / steps,
         -5.9 + 5.4 * k / steps)
        for seed in seeds
        for k in range(steps + 1)
    ]
    write_csv(root / "spectrum" / "levels_n8.csv", SPECTRUM, spectrum_rows)
    return root


@pytest.fixture
def corpus(tmp_path):
    return build_corpus(tmp_path / "results")
