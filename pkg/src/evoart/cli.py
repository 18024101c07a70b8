"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from .classifier import (CentroidModel, ClassifierError, classify_batch, generate_noise_corpus,
                         label_from_score, score, train)
from .canvas import load_image
from .evolve import EvolutionConfig, run_evolution
from .experiment import (ExperimentPlan, aggregate, masks_from_text, run_experiment,
                         sweep_statistics, write_sweeps)
from .genome import ConfigurationError, GenomeError, default_registry
from .report import collage, format_report, render_genome
from .techniques import time_techniques, write_timing_csv

log = logging.getLogger("evoart")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_size(text: str) -> tuple[int, int]:
    try:
        if "x" in text.lower():
            w, h = text.lower().split("x")
            size = int(w), int(h)
        else:
            size = int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH or N, got {text!r}") from None
    if min(size) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return size


def _default_jobs() -> int:
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="evoart", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    ev = sub.add_parser("evolve", help="run one evolutionary run")
    ev.add_argument("--config", required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--jobs", type=int, default=None)

    ex = sub.add_parser("experiment", help="run a leave-x-out sweep")
    ex.add_argument("--config", required=True)
    ex.add_argument("--masks", default="all",
                    help="'all', or masks separated by ';' (e.g. 'ut,ac;ns' or '3;63')")
    ex.add_argument("--replicates", type=int, default=15)
    ex.add_argument("--out", required=True)
    ex.add_argument("--resume", action="store_true")
    ex.add_argument("--jobs", type=int, default=None)

    ag = sub.add_parser("aggregate", help="normalised heatmap CSV from a results tree")
    ag.add_argument("--results", required=True)
    ag.add_argument("--out", default="heatmap.csv")

    sw = sub.add_parser("sweeps", help="technique sweep statistics of one run")
    sw.add_argument("--run", required=True)
    sw.add_argument("--out", default=None)

    tm = sub.add_parser("timing", help="time each technique")
    tm.add_argument("--invocations", type=int, default=100)
    tm.add_argument("--size", type=parse_size, default=(500, 500))
    tm.add_argument("--seed", type=int, default=0)
    tm.add_argument("--out", default="timing.csv")

    cl = sub.add_parser("classifier", help="train and apply the art classifier")
    csub = cl.add_subparsers(dest="action", parser_class=_Parser, required=True)
    tr = csub.add_parser("train")
    tr.add_argument("--art", required=True)
    tr.add_argument("--not-art", dest="not_art", required=True)
    tr.add_argument("--out", required=True)
    sc = csub.add_parser("score")
    sc.add_argument("--model", required=True)
    sc.add_argument("images", nargs="+")
    ba = csub.add_parser("batch")
    ba.add_argument("--model", required=True)
    ba.add_argument("--dir", required=True)
    ba.add_argument("--out", default=None, help="CSV report path (default: stdout)")
    gn = csub.add_parser("gen-noise")
    gn.add_argument("--count", type=int, required=True)
    gn.add_argument("--size", type=parse_size, default=(128, 128))
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--out", required=True)

    rd = sub.add_parser("render", help="render a genome file ('-' for stdin)")
    rd.add_argument("--genome", required=True)
    rd.add_argument("--size", type=parse_size, default=(500, 500))
    rd.add_argument("--seed", type=int, default=0)
    rd.add_argument("--budget-ms", type=float, default=math.inf)
    rd.add_argument("--out", required=True)

    co = sub.add_parser("collage", help="tile a directory of images")
    co.add_argument("--dir", required=True)
    co.add_argument("--columns", type=int, default=10)
    co.add_argument("--cell-size", type=parse_size, default=(64, 64))
    co.add_argument("--out", required=True)
    return p


def _load_config(args) -> EvolutionConfig:
    cfg = EvolutionConfig.load(args.config)
    cfg.jobs = args.jobs if args.jobs else _default_jobs()
    return cfg


def _cmd_evolve(args):
    run_evolution(_load_config(args), out_dir=args.out)
    print(f"run written to {args.out}")


def _cmd_experiment(args):
    plan = ExperimentPlan(_load_config(args), masks_from_text(args.masks), args.replicates)
    res = run_experiment(plan, args.out, resume=args.resume)
    print(f"completed {len(res.completed)}, skipped {len(res.skipped)}, failed {len(res.failed)}")
    if res.failed:
        raise RuntimeError(f"{len(res.failed)} cell(s) failed; see {Path(args.out) / 'failures.log'}")


def _cmd_aggregate(args):
    table = aggregate(args.results, args.out)
    print(f"{len(table)} configurations written to {args.out}")


def _cmd_sweeps(args):
    sweeps = sweep_statistics(args.run)
    out = args.out or str(Path(args.run) / "sweeps.csv")
    write_sweeps(sweeps, out)
    for s in sweeps:
        print(f"generation {s.generation}: dominance {s.dominance:.3f}")


def _cmd_timing(args):
    if args.invocations < 1:
        raise UsageError("--invocations must be >= 1")
    rows = time_techniques(default_registry(), args.invocations, args.size, args.seed)
    write_timing_csv(rows, args.out)
    for r in rows:
        print(f"{r.technique:16s} total {r.total_ms:10.1f} ms  mean {r.mean_ms:8.2f} ms")


def _cmd_classifier(args):
    if args.action == "train":
        model = train(args.art, args.not_art)
        model.save(args.out)
        print(f"model written to {args.out}")
    elif args.action == "score":
        model = CentroidModel.load(args.model)
        for path in args.images:
            s = score(load_image(path), model)
            print(f"{path},{s!r},{label_from_score(s)}")
    elif args.action == "batch":
        model = CentroidModel.load(args.model)
        report = classify_batch(args.dir, model)
        if args.out:
            report.write_csv(args.out)
        else:
            print("path,score,label")
            for p, s, lab in report.rows:
                print(f"{p},{s!r},{lab}")
        art, notart = report.counts
        print(f"art={art} not-art={notart} failed={len(report.failures)}", file=sys.stderr)
    elif args.action == "gen-noise":
        if args.count < 1:
            raise UsageError("--count must be >= 1")
        paths = generate_noise_corpus(args.count, args.size, args.seed, args.out)
        print(f"{len(paths)} images written to {args.out}")


def _cmd_render(args):
    text = sys.stdin.read() if args.genome == "-" else Path(args.genome).read_text()
    budget = args.budget_ms / 1000.0
    report = render_genome(text, args.size, args.seed, budget, args.out)
    print(format_report(report))


def _cmd_collage(args):
    w, h = collage(args.dir, args.columns, args.cell_size, args.out)
    print(f"{w}x{h} collage written to {args.out}")


COMMANDS = {
    "evolve": _cmd_evolve, "experiment": _cmd_experiment, "aggregate": _cmd_aggregate,
    "sweeps": _cmd_sweeps, "timing": _cmd_timing, "classifier": _cmd_classifier,
    "render": _cmd_render, "collage": _cmd_collage,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigurationError, GenomeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ClassifierError, OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
