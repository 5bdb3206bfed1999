"""Command-line front end tying the scan, theory, and fit pieces together.

Batch-style: every command reads files and flags, writes files and tables,
and exits.  Exit codes: 0 success, 2 usage, 3 data/format, 4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import fit as fitmod
from . import scanstats, sieve, theory
from .errors import (
    BoundTooLargeError,
    ConsistencyError,
    DegenerateRegimeError,
    InsufficientDataError,
    SchemaError,
    SequencingError,
    TwingapsError,
)
from .scanstats import Checkpoint, ScanState

DEFAULT_CHECKPOINT_START = 2**22
DEFAULT_CHECKPOINT_RATIO = 4
RESUME_FILENAME = "resume.json"

SENSITIVITY_SKIPS = (10, 15, 20)
SENSITIVITY_KEEPS = (0.5, 0.6, 0.7)


class UsageError(TwingapsError):
    """Bad invocation that argparse cannot catch itself."""


def parse_bound(text: str) -> int:
    """Integer flag values, with 2^k and 10^k literals accepted."""
    m = re.fullmatch(r"(2|10)\^(\d+)", text.strip())
    if m:
        return int(m.group(1)) ** int(m.group(2))
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{text!r} is not an integer (plain, 2^k, or 10^k)"
        ) from None


@dataclass
class RunConfig:
    n_max: int
    checkpoint_start: int = DEFAULT_CHECKPOINT_START
    checkpoint_ratio: int = DEFAULT_CHECKPOINT_RATIO
    segment_bits: int = sieve.DEFAULT_SEGMENT_BITS
    threads: int = 0  # 0 -> available parallelism
    output_dir: Path = Path(".")
    resume_from: Path | None = None
    c2_mode: str = "computed"


def checkpoint_schedule(n_max: int, start: int, ratio: int) -> list[int]:
    """Geometric progression start, start*ratio, ... capped at n_max, which is
    always included so every scan ends on a checkpoint."""
    if ratio < 2:
        raise UsageError(f"checkpoint ratio must be >= 2, got {ratio}")
    sched = {n_max}
    value = start
    while value <= n_max:
        sched.add(value)
        value *= ratio
    return sorted(sched)


def run_scan(config: RunConfig) -> list[Checkpoint]:
    """Scan [2, n_max], writing checkpoint files and an atomically-updated
    resume file into output_dir.  Returns the checkpoints written."""
    if config.n_max > sieve.MAX_N:
        raise BoundTooLargeError(f"n_max {config.n_max} exceeds 2^44")
    if config.n_max < 5:
        raise UsageError("scan requires n_max >= 5")

    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".twingaps_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc}") from exc

    resume_path = Path(config.resume_from) if config.resume_from else out / RESUME_FILENAME
    if config.resume_from and resume_path.exists():
        state = ScanState.load(resume_path)
    else:
        if config.resume_from:
            print(f"resume file {resume_path} not found; starting fresh", file=sys.stderr)
        state = ScanState()

    consumed = state.next_lo - 1
    if consumed > config.n_max:
        raise SchemaError(
            f"resume state has already consumed up to {consumed} > n_max {config.n_max}"
        )

    schedule = [
        n for n in checkpoint_schedule(config.n_max, config.checkpoint_start, config.checkpoint_ratio)
        if n >= consumed
    ]
    written: list[Checkpoint] = []

    def emit(n: int) -> None:
        cp = state.take_checkpoint(n)
        cp.write(out / scanstats.checkpoint_filename(n))
        written.append(cp)
        print(f"checkpoint N={n}: pi={cp.pi} pi2={cp.pi2}", file=sys.stderr)

    while schedule and schedule[0] == consumed:
        emit(schedule.pop(0))

    if state.next_lo <= config.n_max:
        threads = config.threads if config.threads > 0 else (os.cpu_count() or 1)
        base = sieve.base_primes(math.isqrt(config.n_max))
        bounds = sieve.plan_segments(
            state.next_lo,
            config.n_max + 1,
            1 << config.segment_bits,
            cuts=[n + 1 for n in schedule],
        )
        for seg in sieve.generate_segments(bounds, base, threads=threads):
            state.consume_segment(seg)
            while schedule and state.next_lo == schedule[0] + 1:
                emit(schedule.pop(0))
            state.save(resume_path)
    return written


def _format_n(n: int) -> str:
    if n >= 4 and n & (n - 1) == 0:
        return f"2^{n.bit_length() - 1}"
    return str(n)


def _c2_value(mode: str) -> float:
    if mode == "literature":
        return theory.C2_LITERATURE
    return theory.default_c2().value


def _checkpoint_key(path: Path) -> int:
    m = re.fullmatch(r"checkpoint_(\d+)\.json", path.name)
    return int(m.group(1)) if m else 0


def load_checkpoints(paths: Sequence[str]) -> list[Checkpoint]:
    """Expand directories via the checkpoint_*.json glob; order rows by N."""
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.glob("checkpoint_*.json"), key=_checkpoint_key))
        else:
            files.append(path)
    if not files:
        raise UsageError("no checkpoint files given or discovered")
    checkpoints = [Checkpoint.read(f) for f in files]
    return sorted(checkpoints, key=lambda cp: cp.n)


def _print_rows(header: list[str], rows: list[list[str]], fmt: str, out) -> None:
    if fmt == "csv":
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")
        return
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for row in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def cmd_scan(args: argparse.Namespace) -> int:
    config = RunConfig(
        n_max=args.n_max,
        checkpoint_start=args.checkpoint_start,
        checkpoint_ratio=args.checkpoint_ratio,
        segment_bits=args.segment_bits,
        threads=args.threads,
        output_dir=Path(args.out),
        resume_from=Path(args.resume) if args.resume else None,
    )
    written = run_scan(config)
    header = ["N", "pi", "pi2", "d_max", "s_max", "tail", "overlap"]
    rows = [
        [_format_n(cp.n), str(cp.pi), str(cp.pi2), str(cp.d_max), str(cp.s_max),
         str(cp.tail_primes), str(cp.overlap)]
        for cp in written
    ]
    _print_rows(header, rows, "text", sys.stdout)
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    checkpoints = load_checkpoints(args.checkpoints)
    c2 = _c2_value(args.c2)
    header = ["N", "A_exp/A_theor", "B_exp/B_theor", "A_exp/A_asympt", "B_exp/B_asympt"]
    rows = []
    reports = []
    for cp in checkpoints:
        label = _format_n(cp.n) if args.format == "text" else str(cp.n)
        try:
            pred = theory.predict(cp.n, cp.pi, cp.pi2, c2)
            fres = fitmod.fit_exponential(
                cp.sep_hist, args.skip_head, args.keep_fraction, args.weighted
            )
        except DegenerateRegimeError:
            rows.append([label, "degenerate regime", "", "", ""])
            continue
        except InsufficientDataError:
            rows.append([label, "insufficient data", "", "", ""])
            continue
        row = fitmod.comparison_row(cp, fres, pred)
        reports.append(fitmod.fit_report_obj(cp.n, fres))
        rows.append([
            label,
            f"{row.a_ratio_theor:.6f}",
            f"{row.b_ratio_theor:.6f}",
            f"{row.a_ratio_asympt:.6f}",
            f"{row.b_ratio_asympt:.6f}",
        ])
    _print_rows(header, rows, args.format, sys.stdout)
    if args.format == "text":
        print(f"note: {theory.ASYMPT_INTERCEPT_NOTE}")
    if args.fit_json:
        Path(args.fit_json).write_text(json.dumps(reports, indent=2) + "\n")
    if args.sensitivity:
        _print_sensitivity(checkpoints, sys.stdout)
    return 0


def _print_sensitivity(checkpoints: list[Checkpoint], out) -> None:
    out.write("\nprotocol sensitivity (b_exp by skip_head x tail_kept_fraction)\n")
    for cp in checkpoints:
        out.write(f"N={_format_n(cp.n)}\n")
        for skip in SENSITIVITY_SKIPS:
            cells = []
            for keep in SENSITIVITY_KEEPS:
                try:
                    f = fitmod.fit_exponential(cp.sep_hist, skip, keep)
                    cells.append(f"b={f.b_exp:.6f}")
                except InsufficientDataError:
                    cells.append("b=insufficient")
            out.write(f"  skip={skip:>2}  " + "  ".join(cells) + "\n")


def cmd_smax(args: argparse.Namespace) -> int:
    checkpoints = load_checkpoints(args.checkpoints)
    c2 = _c2_value(args.c2)
    header = ["N", "s_max_empirical", "s_max_paper", "s_max_derived", "s_max_asympt"]
    rows = []
    for cp in checkpoints:
        label = _format_n(cp.n) if args.format == "text" else str(cp.n)
        asympt = theory.smax_asympt(cp.n, c2)
        try:
            s_paper, s_derived = theory.predict_smax(cp.pi, cp.pi2, c2)
            rows.append([label, str(cp.s_max), f"{s_paper:.3f}", f"{s_derived:.3f}",
                         f"{asympt:.3f}"])
        except DegenerateRegimeError:
            rows.append([label, str(cp.s_max), "degenerate regime", "degenerate regime",
                         f"{asympt:.3f}"])
    _print_rows(header, rows, args.format, sys.stdout)
    return 0


def cmd_champions(args: argparse.Namespace) -> int:
    checkpoints = load_checkpoints(args.checkpoints)
    header = ["N", "champion", "top5(d:count)", "d6", "d12", "d30", "d210"]
    rows = []
    for cp in checkpoints:
        label = _format_n(cp.n) if args.format == "text" else str(cp.n)
        if not cp.gap_hist:
            rows.append([label, "-", "-", "0", "0", "0", "0"])
            continue
        top5 = sorted(cp.gap_hist.bins.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        top_str = " ".join(f"{d}:{m}" for d, m in top5)
        rows.append([
            label,
            str(cp.gap_hist.champion()),
            top_str,
            *(str(cp.gap_hist.bins.get(d, 0)) for d in (6, 12, 30, 210)),
        ])
    _print_rows(header, rows, args.format, sys.stdout)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    cp = Checkpoint.read(Path(args.checkpoint))
    hist, head = (
        (cp.gap_hist, "d,m") if args.which == "gap" else (cp.sep_hist, "s,mu")
    )
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            scanstats.write_histogram_csv(hist, head, fh)
    else:
        scanstats.write_histogram_csv(hist, head, sys.stdout)
    return 0


def cmd_constants(args: argparse.Namespace) -> int:
    est = theory.twin_prime_constant(args.cutoff)
    print(f"c2 = {est.value:.10f}  (Euler product over odd primes <= {est.cutoff})")
    print(f"truncation bound <= {est.bound:.3e}")
    print(f"literature value   {theory.C2_LITERATURE}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twingaps",
        description="Twin-prime gap statistics: scan, fit, and compare against "
        "closed-form predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="sieve to n-max, writing checkpoints")
    scan.add_argument("--n-max", type=parse_bound, required=True)
    scan.add_argument("--checkpoint-start", type=parse_bound, default=DEFAULT_CHECKPOINT_START)
    scan.add_argument("--checkpoint-ratio", type=int, default=DEFAULT_CHECKPOINT_RATIO)
    scan.add_argument("--segment-bits", type=int, default=sieve.DEFAULT_SEGMENT_BITS)
    scan.add_argument("--threads", type=int, default=0,
                      help="sieve workers; 0 means available parallelism")
    scan.add_argument("--out", default=".", help="output directory")
    scan.add_argument("--resume", default=None, help="resume-state JSON path")
    scan.set_defaults(func=cmd_scan)

    def add_common(p, with_fit=False):
        p.add_argument("checkpoints", nargs="+",
                       help="checkpoint files or directories to glob")
        p.add_argument("--c2", choices=("computed", "literature"), default="computed")
        p.add_argument("--format", choices=("text", "csv"), default="text")
        if with_fit:
            p.add_argument("--skip-head", type=int, default=fitmod.DEFAULT_SKIP_HEAD)
            p.add_argument("--keep-fraction", type=float,
                           default=fitmod.DEFAULT_TAIL_KEPT_FRACTION)
            p.add_argument("--weighted", action="store_true",
                           help="weight bins by their counts")

    table = sub.add_parser("table", help="measured-vs-predicted ratio table")
    add_common(table, with_fit=True)
    table.add_argument("--sensitivity", action="store_true",
                       help="print fits over a grid of trimming parameters")
    table.add_argument("--fit-json", default=None,
                       help="write per-checkpoint fit reports to this JSON file")
    table.set_defaults(func=cmd_table)

    smax = sub.add_parser("smax", help="largest separations vs predictions")
    add_common(smax)
    smax.set_defaults(func=cmd_smax)

    champs = sub.add_parser("champions", help="most frequent gaps per checkpoint")
    champs.add_argument("checkpoints", nargs="+")
    champs.add_argument("--format", choices=("text", "csv"), default="text")
    champs.set_defaults(func=cmd_champions)

    export = sub.add_parser("export", help="histogram CSV from one checkpoint")
    export.add_argument("checkpoint")
    export.add_argument("--which", choices=("gap", "sep"), required=True)
    export.add_argument("--out", default=None, help="file instead of stdout")
    export.set_defaults(func=cmd_export)

    consts = sub.add_parser("constants", help="twin-prime constant with bound")
    consts.add_argument("--cutoff", type=parse_bound, default=theory.DEFAULT_C2_CUTOFF)
    consts.set_defaults(func=cmd_constants)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BoundTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (SchemaError, ConsistencyError, SequencingError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
