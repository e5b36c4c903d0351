"""Static SVG comparison charts built from battery CSVs."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from statistics import mean

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import DELIVERY_RATIO, FIRST_DEATH, RESIDUAL_ENERGY, read_table  # noqa: E402

PLOT_FILES = ("first_death.svg", "delivery_ratio.svg", "residual_energy.svg")


class PlotError(RuntimeError):
    pass


def _load(in_dir: Path, name: str):
    path = in_dir / name
    if not path.exists():
        raise PlotError(f"missing {path}")
    rows = read_table(path)
    if not rows:
        raise PlotError(f"{path} has no data rows")
    return rows


def _seed_average(rows):
    """protocol -> sorted [(time, mean value over seeds)]"""
    acc = defaultdict(lambda: defaultdict(list))
    for r in rows:
        acc[r["protocol"]][float(r["time_s"])].append(float(r["value"]))
    return {p: sorted((t, mean(v)) for t, v in series.items()) for p, series in sorted(acc.items())}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_plots(in_dir, out_dir=None):
    """Write the three charts; returns their paths."""
    in_dir = Path(in_dir)
    out_dir = in_dir if out_dir is None else Path(out_dir)
    deaths = _load(in_dir, FIRST_DEATH)
    delivery = _load(in_dir, DELIVERY_RATIO)
    residual = _load(in_dir, RESIDUAL_ENERGY)
    out_dir.mkdir(parents=True, exist_ok=True)
    plt.rcParams["svg.hashsalt"] = "drugsim"

    horizon = max(float(r["time_s"]) for r in residual)
    per_proto = defaultdict(list)
    censored = defaultdict(int)
    for r in deaths:
        if r["time_s"]:
            per_proto[r["protocol"]].append(float(r["time_s"]))
        else:
            # no death within the run: count it at the horizon
            per_proto[r["protocol"]].append(horizon)
            censored[r["protocol"]] += 1
    protos = sorted(per_proto)
    paths = [out_dir / f for f in PLOT_FILES]

    fig, ax = plt.subplots(figsize=(5, 4))
    heights = [mean(per_proto[p]) for p in protos]
    bars = ax.bar(protos, heights)
    for bar, p in zip(bars, protos):
        if censored[p]:
            ax.annotate(f"{censored[p]} run(s) without deaths", (bar.get_x(), bar.get_height()),
                        fontsize=7, va="bottom")
    ax.set_ylabel("first node death (s)")
    ax.set_title("First node dies in the network")
    _save(fig, paths[0])

    for rows, path, ylabel, title, scale in (
            (delivery, paths[1], "delivery ratio (%)", "Delivery ratio vs time", 100.0),
            (residual, paths[2], "residual energy (J)", "Residual energy vs time", 1.0)):
        fig, ax = plt.subplots(figsize=(6, 4))
        for proto, series in _seed_average(rows).items():
            ax.plot([t for t, _ in series], [v * scale for _, v in series], label=proto)
        ax.set_xlabel("time (s)")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend()
        _save(fig, path)
    return paths
