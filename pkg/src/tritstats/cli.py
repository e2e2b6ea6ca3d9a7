"""Command line interface.

Exit codes: 0 success, 1 domain failure (corrupt checkpoint, failed
certification), 2 configuration error (argparse usage errors land on 2 as
well).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from fractions import Fraction

from . import aggregate, audit, reports, stats, sweep, theory
from . import alpha as alpha_mod
from .aggregate import AggregateState, CheckpointCorrupt, CheckpointMismatch
from .stats import per_exponent_record
from .trit_core import from_exponent

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_CONFIG = 2

CONFIG_VERSION = 1
DEFAULT_OUT_DIR = "tritstats_out"


class ConfigError(Exception):
    """Bad run configuration (exit 2)."""


class DomainError(Exception):
    """The computation itself refused or failed (exit 1)."""


# -- argparse plumbing ---------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _block_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad block list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("block list is empty")
    if any(not 1 <= k <= stats.MAX_BLOCK_LENGTH for k in values):
        raise argparse.ArgumentTypeError(
            f"block lengths must be in 1..{stats.MAX_BLOCK_LENGTH}"
        )
    if len(set(values)) != len(values):
        raise argparse.ArgumentTypeError("duplicate block length")
    return values


def _depth_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad depth list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("depth list is empty")
    if any(not 0 <= h <= theory.MAX_LIMIT_DEPTH for h in values):
        raise argparse.ArgumentTypeError(
            f"leading depths must be in 0..{theory.MAX_LIMIT_DEPTH}"
        )
    if len(set(values)) != len(values):
        raise argparse.ArgumentTypeError("duplicate leading depth")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritstats",
        description="Exact ternary-digit statistics of powers of two and of log3(2).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="aggregate digit statistics for n = 1..max_n")
    p.add_argument("--max-n", type=_positive_int, required=True)
    p.add_argument("--blocks", type=_block_list, default=(2, 3),
                   help="comma-separated block lengths (default 2,3)")
    p.add_argument("--leading-h", type=_depth_list, default=(0, 1, 2, 3),
                   help="comma-separated leading depths (default 0,1,2,3)")
    p.add_argument("--shards", type=_positive_int, default=1,
                   help="contiguous shard count (deterministic merge)")
    p.add_argument("--checkpoint-every", type=_positive_int, default=None,
                   metavar="M", help="snapshot every M exponents")
    p.add_argument("--checkpoint-file", default=None, metavar="P")
    p.add_argument("--stop-after", type=_positive_int, default=None, metavar="N",
                   help="abandon the scan after exponent N without flushing "
                        "(crash simulation; requires checkpointing)")
    p.add_argument("--out", default=DEFAULT_OUT_DIR, metavar="DIR")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("single", help="digit statistics of one power of two")
    p.add_argument("--n", type=_nonnegative_int, required=True)
    p.add_argument("--out", default=None, metavar="DIR",
                   help="also write single.<fmt> to this directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_single)

    p = sub.add_parser("theory", help="closed-form reference tables")
    p.add_argument("--max-h", type=_nonnegative_int, default=8)
    p.add_argument("--sigma-n", type=_block_list_free, default=(), metavar="N[,N...]",
                   help="exponent counts to benchmark sigmas for")
    p.add_argument("--out", default=DEFAULT_OUT_DIR, metavar="DIR")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("alpha", help="certified ternary expansion of log3(2)")
    p.add_argument("--digits", type=_positive_int, required=True, metavar="D")
    p.add_argument("--guard", type=_positive_int, default=alpha_mod.DEFAULT_GUARD)
    p.add_argument("--blocks", type=_block_list, default=(2, 3))
    p.add_argument("--verify-max", type=_nonnegative_int, default=10,
                   help="check prefixes up to this length against the exact oracle")
    p.add_argument("--out", default=None, metavar="FILE",
                   help="write the digit file here")
    p.set_defaults(func=_cmd_alpha)

    p = sub.add_parser("audit", help="structural audit of leading digits and zero runs")
    p.add_argument("--max-n", type=_positive_int, required=True)
    p.add_argument("--out", default=DEFAULT_OUT_DIR, metavar="DIR")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("resume", help="continue a checkpointed sweep")
    p.add_argument("--checkpoint", required=True, metavar="P")
    p.set_defaults(func=_cmd_resume)

    return parser


def _block_list_free(text: str) -> tuple[int, ...]:
    """Comma-separated positive integers without the block-length cap."""
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("entries must be at least 1")
    return values


# -- sweep -----------------------------------------------------------------------


def _sweep_config(max_n, blocks, depths, fmt, checkpoint_every, out_dir) -> dict:
    return {
        "format_version": CONFIG_VERSION,
        "command": "sweep",
        "max_n": max_n,
        "block_lengths": list(blocks),
        "leading_depths": list(depths),
        "fmt": fmt,
        "checkpoint_every": checkpoint_every,
        "out_dir": out_dir,
    }


def _finish_sweep(out_dir, fmt, config, state) -> None:
    paths = reports.write_aggregate_reports(out_dir, state, fmt)
    paths.append(reports.write_run_summary(
        out_dir, "sweep", config, aggregate.config_fingerprint(config), state))
    print(f"exponents 1..{state.n_hi}: {state.total_digits} digits total")
    for d in (0, 1, 2):
        freq = state.digit_frequency(d)
        print(f"digit {d}: count {state.digit_counts[d]}, "
              f"frequency {reports.format_percent(freq)}%")
    for path in paths:
        print(f"wrote {path}")


def _cmd_sweep(args) -> int:
    if args.shards > args.max_n:
        raise ConfigError("more shards than exponents")
    if (args.checkpoint_every is None) != (args.checkpoint_file is None):
        raise ConfigError("--checkpoint-every and --checkpoint-file go together")
    checkpointing = args.checkpoint_every is not None
    if checkpointing and args.shards != 1:
        raise ConfigError("checkpointing requires --shards 1")
    if args.stop_after is not None and not checkpointing:
        raise ConfigError("--stop-after only makes sense with checkpointing")
    os.makedirs(args.out, exist_ok=True)
    config = _sweep_config(args.max_n, args.blocks, args.leading_h, args.format,
                           args.checkpoint_every, args.out)
    writer = reports.PerExponentWriter(
        os.path.join(args.out, reports.PerExponentWriter.filename(args.format)),
        args.format,
    )
    started = time.monotonic()
    try:
        if checkpointing:
            outcome = sweep.run_checkpointed_sweep(
                args.max_n, args.checkpoint_every, args.checkpoint_file, config,
                args.blocks, args.leading_h, sink=writer,
                stop_after=args.stop_after,
            )
            if not outcome.completed:
                writer.close(discard_pending=True)
                print(f"stopped after n={outcome.n_completed} (crash simulation); "
                      f"resume with --checkpoint {args.checkpoint_file}")
                return EXIT_OK
            state = outcome.state
        else:
            state = sweep.run_sweep(args.max_n, args.blocks, args.leading_h,
                                    shards=args.shards, sink=writer)
    finally:
        if not writer.closed:
            writer.close()
    log.info("sweep finished in %.2f s", time.monotonic() - started)
    _finish_sweep(args.out, args.format, config, state)
    print(f"wrote {writer.path}")
    return EXIT_OK


def _cmd_resume(args) -> int:
    try:
        payload = aggregate.read_checkpoint(args.checkpoint)
    except CheckpointMismatch as exc:
        raise ConfigError(str(exc)) from exc
    except CheckpointCorrupt as exc:
        raise DomainError(str(exc)) from exc
    config = payload["config"]
    try:
        max_n = int(config["max_n"])
        blocks = tuple(int(k) for k in config["block_lengths"])
        depths = tuple(int(h) for h in config["leading_depths"])
        fmt = config["fmt"]
        every = int(config["checkpoint_every"])
        out_dir = config["out_dir"]
        if fmt not in ("csv", "json"):
            raise ValueError(f"bad fmt {fmt!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"checkpoint config is not a sweep config: {exc}") from exc
    try:
        state = AggregateState.from_payload(payload["state"])
    except CheckpointCorrupt as exc:
        raise DomainError(str(exc)) from exc
    n_done = int(payload["n_completed"])
    if state.is_empty or state.n_lo != 1 or state.n_hi != n_done:
        raise DomainError("checkpoint state does not match its n_completed")
    if n_done > max_n:
        raise DomainError("checkpoint claims more progress than the run length")
    os.makedirs(out_dir, exist_ok=True)
    writer = reports.PerExponentWriter(
        os.path.join(out_dir, reports.PerExponentWriter.filename(fmt)),
        fmt, resume_upto=n_done,
    )
    try:
        outcome = sweep.run_checkpointed_sweep(
            max_n, every, args.checkpoint, config, blocks, depths,
            sink=writer, state=state, start_n=n_done + 1,
        )
    finally:
        if not writer.closed:
            writer.close()
    print(f"resumed at n={n_done + 1}")
    _finish_sweep(out_dir, fmt, config, outcome.state)
    print(f"wrote {writer.path}")
    return EXIT_OK


# -- single ------------------------------------------------------------------------


def _cmd_single(args) -> int:
    record = per_exponent_record(args.n, from_exponent(args.n))
    print(f"2**{args.n} has {record.length} ternary digits")
    for d in (0, 1, 2):
        freq = Fraction(record.digits.counts[d], record.length)
        print(f"digit {d}: count {record.digits.counts[d]}, "
              f"frequency {reports.format_percent(freq)}%")
    print(f"leading digit: {record.leading_digit}")
    print(f"zero run after leading digit: {record.zero_run}")
    print(f"iid sigma benchmark: {reports.format_sigma(theory.sigma_single(args.n))}")
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        header = ["n", "length", "digit", "count", "frequency_pct", "sigma_iid"]
        sigma = reports.format_sigma(theory.sigma_single(args.n))
        rows = [
            [str(args.n), str(record.length), str(d),
             str(record.digits.counts[d]),
             reports.format_percent(Fraction(record.digits.counts[d], record.length)),
             sigma]
            for d in (0, 1, 2)
        ]
        path = reports.write_table(args.out, "single", header, rows, args.format)
        print(f"wrote {path}")
    return EXIT_OK


# -- theory ------------------------------------------------------------------------


def _cmd_theory(args) -> int:
    if args.max_h > theory.MAX_LIMIT_DEPTH:
        raise ConfigError(f"--max-h above {theory.MAX_LIMIT_DEPTH} "
                          "exceeds the enumeration budget")
    os.makedirs(args.out, exist_ok=True)
    table = theory.build_theory_table(args.max_h, sigma_exponents=args.sigma_n)
    paths = reports.write_theory_reports(args.out, table, args.format)
    for d in (0, 1, 2):
        value = table.limits[(args.max_h, d)]
        print(f"limit average count of digit {d} at depth {args.max_h}: "
              f"{reports.format_mpf(value, 12)}")
    for bench in table.sigma:
        block2 = (reports.format_sigma(bench.sigma_block2)
                  if bench.sigma_block2 is not None else "n/a")
        block3 = (reports.format_sigma(bench.sigma_block3)
                  if bench.sigma_block3 is not None else "n/a")
        print(f"sigma benchmarks for max_n={bench.max_n}: "
              f"digit {reports.format_sigma(bench.sigma_digit)}, "
              f"block-2 {block2}, block-3 {block3}, "
              f"iid approx {reports.format_sigma(bench.sigma_digit_approx)}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


# -- alpha -------------------------------------------------------------------------


def _cmd_alpha(args) -> int:
    if args.guard < alpha_mod.GUARD_MIN:
        raise ConfigError(f"--guard must be at least {alpha_mod.GUARD_MIN}")
    if args.verify_max > alpha_mod.ORACLE_MAX_DIGITS:
        raise ConfigError(
            f"--verify-max above {alpha_mod.ORACLE_MAX_DIGITS} "
            "exceeds the exact-oracle budget"
        )
    expansion = alpha_mod.expand(args.digits, args.guard)
    print(f"alpha = log3(2) to {expansion.digit_count} ternary digits "
          f"(guard {expansion.guard}, certified: "
          f"{'yes' if expansion.certified else 'NO'})")
    if not expansion.certified:
        raise DomainError("guard runs disagree; raise --guard")
    to_check = min(args.verify_max, args.digits)
    failures = []
    for j in range(1, to_check + 1):
        if not alpha_mod.verify_prefix(expansion, j):
            failures.append(j)
    if to_check:
        print(f"exact-oracle verification of prefixes 1..{to_check}: "
              f"{'all passed' if not failures else f'FAILED at {failures}'}")
    if failures:
        raise DomainError("expansion disagrees with the exact oracle")
    head = expansion.digit_string()[:60]
    print(f"digits: 0.{head}{'...' if expansion.digit_count > 60 else ''} (base 3)")
    digit_tally, block_tallies = alpha_mod.digit_statistics(expansion, args.blocks)
    for d in (0, 1, 2):
        freq = Fraction(digit_tally.counts[d], expansion.digit_count)
        print(f"digit {d}: count {digit_tally.counts[d]}, "
              f"frequency {reports.format_percent(freq)}%")
    for k in args.blocks:
        tally = block_tallies[k]
        if tally.blocks_total == 0:
            print(f"blocks of length {k}: none (expansion shorter than k)")
            continue
        for row in reports.alpha_block_table(expansion.digit_count, k, tally):
            print(f"block {row[2]}: count {row[3]}, frequency {row[4]}%")
    if args.out is not None:
        alpha_mod.save_expansion(args.out, expansion)
        print(f"wrote {args.out}")
    return EXIT_OK


# -- audit -------------------------------------------------------------------------


def _cmd_audit(args) -> int:
    if args.max_n < audit.MIN_AUDIT_RANGE:
        raise ConfigError(f"--max-n must be at least {audit.MIN_AUDIT_RANGE}")
    os.makedirs(args.out, exist_ok=True)
    collector = reports.AuditRowCollector()
    summary = audit.run_audit(args.max_n, sink=collector)
    paths = reports.write_audit_reports(args.out, summary, collector, args.format)
    print(f"audited n = 1..{summary.max_n}")
    print(f"exponents whose digits avoid 2: {list(summary.no_two_exponents)}")
    mismatches = len(summary.prediction_mismatches)
    print(f"leading-digit prediction mismatches: {mismatches}")
    print(f"halving-relation violations: {len(summary.relation_violations)}")
    print(f"longest zero run after the leading digit: {summary.max_zero_run} "
          f"(at n={summary.max_zero_run_at}; ln(max_n) = "
          f"{math.log(summary.max_n):.6f})")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


# -- entry -------------------------------------------------------------------------


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
