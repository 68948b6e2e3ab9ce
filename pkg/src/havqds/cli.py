"""Benchmark harness CLI.

Subcommands:
  instance  sample SK instances and save them as JSON
  trotter   Trotterized AD/CD sweeps over (n, T, seed) grids
  havqds    hybrid (or ablated real-time-only) variational sweeps
  spectrum  low-lying levels E0..E4 of H_AD(s) on an s-grid
  report    aggregate run summaries into mean/std tables

Every run directory gets a JSON manifest with the full configuration, the
seeds, the package version, and wall time.  Output files are named
deterministically from (experiment, n, T, seed) and float cells are written
with repr precision, so reruns produce byte-identical CSVs.

Exit codes: 0 ok, 2 configuration error, 3 partial failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .driver import RunConfig, dump_statevector, run_avqds_only, run_havqds
from .exact import low_spectrum
from .models import build_h_ad, sample_sk, schedule_s
from .trotter import run_trotter

ENV_OUT = "HAVQDS_OUT"

TROTTER_TRAJ_COLUMNS = [
    "protocol", "n", "T", "dt", "seed", "step", "s", "energy", "ratio",
    "cnot_cumulative",
]
TROTTER_SUMMARY_COLUMNS = ["protocol", "n", "T", "seed", "r_final", "cnot_total"]
HAVQDS_TRAJ_COLUMNS = [
    "method", "n", "T", "dt", "seed", "step", "t", "s", "energy", "variance",
    "ratio", "ansatz_size", "cnot_total", "imag_steps",
]
HAVQDS_SUMMARY_COLUMNS = [
    "method", "n", "T", "seed", "r_final", "energy_final", "cnot_total",
    "ansatz_size", "max_filter_energy_increase", "degraded",
]
SPECTRUM_COLUMNS = ["n", "seed", "s", "E0", "E1", "E2", "E3", "E4"]


class ConfigError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    os.replace(tmp, path)


def _parse_int_list(text: str) -> list[int]:
    """Accept '10' (single value), '0..9' (inclusive range), or '1,2,4'."""
    if ".." in text:
        parts = text.split("..")
        if len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
            return list(range(lo, hi + 1))
        if len(parts) == 3:
            lo, hi, stride = map(int, parts)
            return list(range(lo, hi + 1, stride))
        raise ConfigError(f"bad range: {text}")
    if "," in text:
        return [int(v) for v in text.split(",")]
    return [int(text)]


def _parse_seeds(text: str) -> list[int]:
    """A bare count k means seeds 0..k-1; ranges and lists are explicit."""
    if ".." in text or "," in text:
        return _parse_int_list(text)
    return list(range(int(text)))


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get(ENV_OUT)
    if env:
        return Path(env)
    return Path("results")


def _write_manifest(out_dir: Path, name: str, config: dict, outputs, failures,
                    wall_time: float):
    manifest = {
        "experiment": name,
        "config": config,
        "version": __version__,
        "wall_time_s": wall_time,
        "outputs": sorted(map(str, outputs)),
        "failures": failures,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_parallel(jobs, worker, parallelism: int):
    """Run independent jobs, collecting (job, output_paths) and failures."""
    outputs, failures = [], []
    if parallelism <= 1:
        for job in jobs:
            try:
                outputs.extend(worker(job))
            except Exception as exc:
                failures.append({"job": repr(job), "error": str(exc)})
    else:
        with concurrent.futures.ProcessPoolExecutor(parallelism) as pool:
            futures = {pool.submit(worker, job): job for job in jobs}
            for fut in concurrent.futures.as_completed(futures):
                job = futures[fut]
                try:
                    outputs.extend(fut.result())
                except Exception as exc:
                    failures.append({"job": repr(job), "error": str(exc)})
    return outputs, failures


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_instance(args) -> int:
    out_dir = _out_root(args) / "instances"
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.time()
    outputs = []
    for n in _parse_int_list(args.n):
        if n < 2:
            raise ConfigError("n must be >= 2")
        for seed in _parse_seeds(args.seeds):
            instance = sample_sk(n, seed)
            path = out_dir / f"sk_n{n}_seed{seed}.json"
            path.write_text(instance.to_json() + "\n")
            outputs.append(path)
    _write_manifest(out_dir, "instance",
                    {"n": args.n, "seeds": args.seeds},
                    outputs, [], time.time() - start)
    return 0


def _trotter_job(job):
    n, total_time, seed, protocol, dt, out_dir = job
    instance = sample_sk(n, seed)
    result = run_trotter(instance, protocol, total_time, dt)
    traj_path = Path(out_dir) / f"traj_{protocol}_n{n}_T{total_time:g}_seed{seed}.csv"
    _write_csv(
        traj_path,
        TROTTER_TRAJ_COLUMNS,
        [
            (protocol, n, total_time, dt, seed, rec.step, rec.s, rec.energy,
             rec.ratio, rec.cnot_cumulative)
            for rec in result.records
        ],
    )
    summary = (protocol, n, total_time, seed, result.records[-1].ratio,
               result.tally.cnot_count)
    summary_path = Path(out_dir) / (
        f"summaryrow_{protocol}_n{n}_T{total_time:g}_seed{seed}.csv"
    )
    _write_csv(summary_path, TROTTER_SUMMARY_COLUMNS, [summary])
    return [traj_path, summary_path]


def cmd_trotter(args) -> int:
    out_dir = _out_root(args) / "trotter"
    start = time.time()
    protocols = [p.strip().upper() for p in args.protocol.split(",")]
    for p in protocols:
        if p not in ("AD", "CD"):
            raise ConfigError(f"unknown protocol {p}")
    t_grid = _parse_float_list(args.T)
    if any(t <= 0 for t in t_grid):
        raise ConfigError("T must be positive")
    if args.dt <= 0:
        raise ConfigError("dt must be positive")
    jobs = [
        (n, total_time, seed, protocol, args.dt, str(out_dir))
        for n in _parse_int_list(args.n)
        for total_time in t_grid
        for seed in _parse_seeds(args.seeds)
        for protocol in protocols
    ]
    for n, *_ in jobs:
        if n < 2:
            raise ConfigError("n must be >= 2")
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs, failures = _run_parallel(jobs, _trotter_job, args.parallelism)
    _collect_summary(out_dir, TROTTER_SUMMARY_COLUMNS)
    _write_manifest(
        out_dir, "trotter",
        {"n": args.n, "T": args.T, "dt": args.dt, "seeds": args.seeds,
         "protocol": args.protocol, "trotter_order": 1,
         "cd_coefficient_time": "left-endpoint"},
        outputs, failures, time.time() - start,
    )
    return 3 if failures else 0


def _havqds_job(job):
    (n, total_time, seed, method, dt, dtau, delta_cut, eps_var, k_max, lam,
     cap, dump_state, out_dir) = job
    instance = sample_sk(n, seed)
    config = RunConfig(
        n_qubits=n, total_time=total_time, dt=dt, dtau=dtau,
        delta_cut=delta_cut, eps_var=eps_var, k_max=k_max, lam=lam,
        seed=seed, ansatz_cap=cap,
    )
    runner = run_havqds if method == "havqds" else run_avqds_only
    result = runner(instance, config)
    stem = f"{method}_n{n}_T{total_time:g}_seed{seed}"
    traj_path = Path(out_dir) / f"traj_{stem}.csv"
    _write_csv(
        traj_path,
        HAVQDS_TRAJ_COLUMNS,
        [
            (method, n, total_time, dt, seed, rec.step, rec.t, rec.s,
             rec.energy, rec.variance, rec.ratio, rec.ansatz_size,
             rec.cnot_total, rec.imag_steps)
            for rec in result.records
        ],
    )
    final = result.records[-1]
    summary_path = Path(out_dir) / f"summaryrow_{stem}.csv"
    _write_csv(
        summary_path,
        HAVQDS_SUMMARY_COLUMNS,
        [(method, n, total_time, seed, final.ratio, final.energy,
          final.cnot_total, final.ansatz_size,
          result.max_filter_energy_increase, int(result.degraded))],
    )
    paths = [traj_path, summary_path]
    ansatz_path = Path(out_dir) / f"ansatz_{stem}.json"
    ansatz_path.write_text(result.ansatz.to_json() + "\n")
    paths.append(ansatz_path)
    if dump_state:
        state_path = Path(out_dir) / f"state_{stem}.bin"
        dump_statevector(state_path, result.ansatz.prepare(), n)
        paths.append(state_path)
    return paths


def cmd_havqds(args) -> int:
    out_dir = _out_root(args) / "havqds"
    start = time.time()
    methods = [m.strip().lower() for m in args.method.split(",")]
    for m in methods:
        if m not in ("havqds", "avqds"):
            raise ConfigError(f"unknown method {m}")
    t_grid = _parse_float_list(args.T)
    if any(t <= 0 for t in t_grid) or args.dt <= 0 or args.dtau <= 0:
        raise ConfigError("times must be positive")
    if args.delta_cut <= 0 or args.eps_var <= 0 or args.lam <= 0:
        raise ConfigError("thresholds must be positive")
    ns = _parse_int_list(args.n)
    if any(n < 2 for n in ns):
        raise ConfigError("n must be >= 2")
    jobs = [
        (n, total_time, seed, method, args.dt, args.dtau, args.delta_cut,
         args.eps_var, args.k_max, args.lam, args.cap, args.dump_state,
         str(out_dir))
        for n in ns
        for total_time in t_grid
        for seed in _parse_seeds(args.seeds)
        for method in methods
    ]
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs, failures = _run_parallel(jobs, _havqds_job, args.parallelism)
    _collect_summary(out_dir, HAVQDS_SUMMARY_COLUMNS)
    _write_manifest(
        out_dir, "havqds",
        {"n": args.n, "T": args.T, "dt": args.dt, "dtau": args.dtau,
         "delta_cut": args.delta_cut, "eps_var": args.eps_var,
         "k_max": args.k_max, "lambda": args.lam, "seeds": args.seeds,
         "method": args.method, "schedule": "sin^2(pi t / 2T)"},
        outputs, failures, time.time() - start,
    )
    return 3 if failures else 0


def cmd_spectrum(args) -> int:
    out_dir = _out_root(args) / "spectrum"
    start = time.time()
    ns = _parse_int_list(args.n)
    if any(not 2 <= n <= 8 for n in ns):
        raise ConfigError("spectrum uses the dense path: 2 <= n <= 8")
    if args.grid < 2:
        raise ConfigError("grid must have at least 2 points")
    outputs = []
    for n in ns:
        rows = []
        for seed in _parse_seeds(args.seeds):
            instance = sample_sk(n, seed)
            for k in range(args.grid + 1):
                s = k / args.grid
                levels = low_spectrum(build_h_ad(instance, s), k=5)
                rows.append((n, seed, s, *map(float, levels)))
        path = out_dir / f"levels_n{n}.csv"
        _write_csv(path, SPECTRUM_COLUMNS, rows)
        outputs.append(path)
    _write_manifest(
        out_dir, "spectrum",
        {"n": args.n, "seeds": args.seeds, "grid": args.grid,
         "hamiltonian": "H_AD(s) without CD term"},
        outputs, [], time.time() - start,
    )
    return 0


def _collect_summary(out_dir: Path, columns):
    """Merge per-run summary rows into one summary.csv, sorted by filename."""
    rows = []
    for path in sorted(out_dir.glob("summaryrow_*.csv")):
        with open(path) as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != columns:
                raise ValueError(f"unexpected summary schema in {path}")
            rows.extend(tuple(r) for r in reader)
    if rows:
        _write_csv(out_dir / "summary.csv", columns, rows)


def cmd_report(args) -> int:
    in_dir = Path(args.input)
    start = time.time()
    summaries = sorted(in_dir.rglob("summary.csv"))
    if not summaries:
        print(f"error: no summary.csv files under {in_dir}", file=sys.stderr)
        return 2
    out_dir = _out_root(args) / "report"
    outputs = []
    for summary in summaries:
        with open(summary) as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
        if not rows:
            continue
        key_fields = [f for f in ("protocol", "method", "n", "T") if f in rows[0]]
        groups: dict[tuple, list[dict]] = {}
        for row in rows:
            groups.setdefault(tuple(row[f] for f in key_fields), []).append(row)
        table = []
        for key in sorted(groups):
            group = groups[key]
            r = np.array([float(g["r_final"]) for g in group])
            cnots = np.array([float(g["cnot_total"]) for g in group])
            table.append(
                (*key, len(group), float(np.mean(r)), float(np.std(r)),
                 float(np.mean(cnots)), float(np.std(cnots)))
            )
        name = summary.parent.name
        path = out_dir / f"report_{name}.csv"
        _write_csv(
            path,
            [*key_fields, "count", "r_mean", "r_std", "cnot_mean", "cnot_std"],
            table,
        )
        outputs.append(path)
    if not outputs:
        print(f"error: summaries under {in_dir} contain no rows", file=sys.stderr)
        return 2
    _write_manifest(out_dir, "report", {"input": str(in_dir)}, outputs, [],
                    time.time() - start)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="havqds", description="SK spin-glass annealing benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, times=True):
        p.add_argument("--n", required=True,
                       help="qubit counts: value, a..b range, or comma list")
        p.add_argument("--seeds", default="10",
                       help="count k (seeds 0..k-1), a..b range, or comma list")
        p.add_argument("--out", default=None,
                       help=f"output root (default $" + ENV_OUT + " or ./results)")
        if times:
            p.add_argument("--T", required=True,
                           help="total times, comma separated")
            p.add_argument("--dt", type=float, default=0.01)
            p.add_argument("--parallelism", type=int, default=1)

    p = sub.add_parser("instance", help="sample and save SK instances")
    common(p, times=False)

    p = sub.add_parser("trotter", help="Trotterized AD/CD sweeps")
    common(p)
    p.add_argument("--protocol", default="AD,CD")

    p = sub.add_parser("havqds", help="hybrid variational sweeps")
    common(p)
    p.add_argument("--method", default="havqds", help="havqds, avqds, or both")
    p.add_argument("--dtau", type=float, default=0.05)
    p.add_argument("--delta-cut", dest="delta_cut", type=float, default=0.05)
    p.add_argument("--eps-var", dest="eps_var", type=float, default=0.05)
    p.add_argument("--k-max", dest="k_max", type=int, default=11)
    p.add_argument("--lambda", dest="lam", type=float, default=1e-6)
    p.add_argument("--cap", type=int, default=500)
    p.add_argument("--dump-state", action="store_true")

    p = sub.add_parser("spectrum", help="E0..E4 level curves of H_AD(s)")
    common(p, times=False)
    p.add_argument("--grid", type=int, default=200)

    p = sub.add_parser("report", help="aggregate summaries into mean/std tables")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)

    return parser


_COMMANDS = {
    "instance": cmd_instance,
    "trotter": cmd_trotter,
    "havqds": cmd_havqds,
    "spectrum": cmd_spectrum,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
