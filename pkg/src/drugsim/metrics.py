"""CSV emission and seed × protocol batteries.

All three summary files share the columns ``protocol, seed, time_s, value``
and are sorted by ``(protocol, seed, time_s)``.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

from .config import RunConfig
from .engine import LogRecord, RunResult, delivery_ratio, first_death_time, run

FIRST_DEATH = "first_death.csv"
DELIVERY_RATIO = "delivery_ratio.csv"
RESIDUAL_ENERGY = "residual_energy.csv"
TRACE = "trace.csv"
COLUMNS = ("protocol", "seed", "time_s", "value")


class BatteryError(RuntimeError):
    def __init__(self, seed, protocol, cause):
        super().__init__(f"run failed for seed={seed} protocol={protocol}: {cause}")
        self.seed = seed
        self.protocol = protocol


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def summary_rows(result: RunResult) -> Dict[str, List[tuple]]:
    m = result.metrics
    proto, seed = m.protocol, m.seed
    t_death = first_death_time(result)
    who = m.deaths[0][1] if m.deaths else None
    delivery = [(proto, seed, s.time_s, delivery_ratio(result, s.time_s)) for s in m.snapshots]
    residual = [(proto, seed, s.time_s, s.residual_j) for s in m.snapshots]
    return {
        FIRST_DEATH: [(proto, seed, t_death, who)],
        DELIVERY_RATIO: delivery,
        RESIDUAL_ENERGY: residual,
    }


def _sort_key(row):
    t = row[2]
    return (row[0], row[1], -1.0 if t is None else t)


def write_table(path, rows: Iterable[tuple]) -> None:
    rows = sorted(rows, key=_sort_key)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_table(path) -> List[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_trace(log: Sequence[LogRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LogRecord.CSV_FIELDS)
        for rec in log:
            w.writerow([_fmt(v) for v in rec.row()])


def write_summaries(tables: Dict[str, List[tuple]], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in (FIRST_DEATH, DELIVERY_RATIO, RESIDUAL_ENERGY):
        write_table(out / name, tables.get(name, []))


def _run_for_battery(config: RunConfig):
    try:
        return summary_rows(run(config)), None
    except Exception as exc:  # reported with the offending (seed, protocol)
        return None, repr(exc)


def thread_cap() -> int:
    raw = os.environ.get("DRUGSIM_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"DRUGSIM_THREADS must be an integer, got {raw!r}") from None


def run_battery(config: RunConfig, seeds: Sequence[int], protocols: Sequence[str],
                out_dir=None, workers: int = None) -> Dict[str, List[tuple]]:
    """Run every (seed, protocol) pair and collect the summary tables.

    Runs are independent and may execute in parallel (``DRUGSIM_THREADS``);
    files are written only after all of them have finished.
    """
    if not seeds or not protocols:
        raise ValueError("seeds and protocols must be non-empty")
    jobs = [(s, p, config.replace(seed=s, protocol=p)) for s in seeds for p in protocols]
    workers = thread_cap() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_for_battery, [c for _, _, c in jobs]))
    else:
        outcomes = [_run_for_battery(c) for _, _, c in jobs]

    tables: Dict[str, List[tuple]] = {FIRST_DEATH: [], DELIVERY_RATIO: [], RESIDUAL_ENERGY: []}
    for (seed, proto, _), (rows, err) in zip(jobs, outcomes):
        if err is not None:
            raise BatteryError(seed, proto, err)
        for name, part in rows.items():
            tables[name].extend(part)
    if out_dir is not None:
        write_summaries(tables, out_dir)
    return tables
