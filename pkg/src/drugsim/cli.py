"""``drugsim`` command line: run, battery, plot."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import PROTOCOLS, parse_config
from .engine import run
from .metrics import TRACE, BatteryError, run_battery, summary_rows, write_summaries, write_trace
from .plots import PlotError, render_plots
from .topology import ConfigError

log = logging.getLogger("drugsim")


def parse_seeds(text: str):
    """``"0..9"`` (inclusive) or ``"1,4,7"`` or a mix: ``"0..2,9"``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise argparse.ArgumentTypeError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds given")
    return seeds


def parse_protocols(text: str):
    protos = [p.strip().lower() for p in text.split(",") if p.strip()]
    bad = [p for p in protos if p not in PROTOCOLS]
    if bad or not protos:
        raise argparse.ArgumentTypeError(f"protocols must be drawn from {','.join(PROTOCOLS)}")
    return protos


def build_parser():
    ap = argparse.ArgumentParser(prog="drugsim", description="WSN routing simulator (DRUG, SPIN, FLOODING)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one protocol on one seed")
    r.add_argument("--config", type=Path)
    r.add_argument("--protocol", choices=PROTOCOLS)
    r.add_argument("--seed", type=int)
    r.add_argument("--trace", action="store_true", default=None, help="also write trace.csv")
    r.add_argument("--out", type=Path, required=True)

    b = sub.add_parser("battery", help="simulate every seed x protocol pair")
    b.add_argument("--config", type=Path)
    b.add_argument("--seeds", type=parse_seeds, default=list(range(10)))
    b.add_argument("--protocols", type=parse_protocols, default=list(PROTOCOLS))
    b.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("plot", help="render SVG charts from battery CSVs")
    p.add_argument("--in", dest="in_dir", type=Path, required=True)
    p.add_argument("--out", type=Path)
    return ap


def _cmd_run(args):
    cfg = parse_config(args.config, {"protocol": args.protocol, "seed": args.seed,
                                     "trace": args.trace})
    result = run(cfg)
    write_summaries(summary_rows(result), args.out)
    if cfg.trace:
        write_trace(result.log, args.out / TRACE)
    m = result.metrics
    log.info("%s seed=%d: %d/%d events delivered, %d nodes dead",
             cfg.protocol, cfg.seed, len(m.delivered), len(m.generated), len(m.deaths))


def _cmd_battery(args):
    cfg = parse_config(args.config)
    run_battery(cfg, args.seeds, args.protocols, args.out)
    log.info("battery of %d runs written to %s", len(args.seeds) * len(args.protocols), args.out)


def _cmd_plot(args):
    for path in render_plots(args.in_dir, args.out):
        log.info("wrote %s", path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    handler = {"run": _cmd_run, "battery": _cmd_battery, "plot": _cmd_plot}[args.command]
    try:
        handler(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"drugsim: config error: {exc}", file=sys.stderr)
        return 2
    except (BatteryError, PlotError) as exc:
        print(f"drugsim: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
