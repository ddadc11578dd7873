"""Command-line interface: track, eval, and synth subcommands.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal error.
"""
from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .errors import ConfigError, DataError, InvariantError, TrackingError
from .metrics import evaluate
from .reports import emit_reports, read_results_csv, write_metrics_csv
from .sequences import MotionScript, load_sequence, synth_sequence, write_sequence
from .tracker import RunConfig, run_tracker


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trackpool",
        description="Ensemble correlation-filter tracker with roulette-selected "
                    "feature-subset experts.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("track", help="track a sequence and write reports")
    t.add_argument("--seq", required=True, help="sequence directory")
    t.add_argument("--config", help="key=value config file")
    t.add_argument("--out-dir", help="report directory (default runs/<name>)")
    t.add_argument("--seed", type=int, help="override config seed")
    t.add_argument("--mode", choices=("adaptive", "all-experts"),
                   help="override config mode")
    t.add_argument("--features",
                   help="'synthetic' or a channel-map file (overrides config)")
    t.add_argument("--executives", type=int,
                   help="override executive count (1..63)")
    t.add_argument("--no-figures", action="store_true",
                   help="skip figure rendering")

    e = sub.add_parser("eval", help="score a results file against ground truth")
    e.add_argument("--results", required=True, help="results.csv from a run")
    e.add_argument("--seq", required=True, help="sequence directory with truth")
    e.add_argument("--out-dir", help="where to write metrics.csv (default: "
                                     "alongside the results file)")

    s = sub.add_parser("synth", help="render a synthetic sequence to disk")
    s.add_argument("--script", required=True, help="key=value motion script")
    s.add_argument("--out-dir", required=True, help="sequence directory to create")
    return p


def _cmd_track(args) -> int:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    config = config.with_overrides(seed=args.seed, mode=args.mode,
                                   features=args.features,
                                   executive_count=args.executives)
    seq = load_sequence(args.seq)
    record = run_tracker(config, seq)
    out_dir = Path(args.out_dir) if args.out_dir else Path("runs") / seq.name
    paths = emit_reports(record, out_dir, gt=seq.boxes,
                         figures=not args.no_figures)
    curves = evaluate(record.boxes, seq.boxes)
    total_ms = sum(f.wall_ms for f in record.frames)
    print(f"tracked {len(record.frames)} frames of '{seq.name}' "
          f"({1e3 * len(record.frames) / max(total_ms, 1e-9):.1f} fps)")
    print(f"precision(20px)={curves.precision_at_20:.4f} auc={curves.auc:.4f}")
    print(f"reports in {out_dir}")
    for name in sorted(paths):
        print(f"  {paths[name].name}")
    return 0


def _cmd_eval(args) -> int:
    boxes, _, _ = read_results_csv(args.results)
    seq = load_sequence(args.seq)
    gt = seq.boxes
    if len(gt) != len(boxes):
        raise DataError(f"{len(boxes)} results rows vs {len(gt)} ground-truth "
                        f"boxes in {seq.name}")
    curves = evaluate(boxes, gt)
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.results).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(curves, out_dir / "metrics.csv")
    print(f"precision(20px)={curves.precision_at_20:.4f} auc={curves.auc:.4f}")
    print(f"metrics in {out_dir / 'metrics.csv'}")
    return 0


def _cmd_synth(args) -> int:
    script = MotionScript.load(args.script)
    seq = synth_sequence(script)
    root = write_sequence(seq, args.out_dir)
    print(f"wrote {len(seq)} frames to {root}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"track": _cmd_track, "eval": _cmd_eval, "synth": _cmd_synth}
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3
    except (InvariantError, TrackingError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 4
    except Exception:
        traceback.print_exc()
        return 4


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
