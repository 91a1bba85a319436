"""Command-line interface: fuzzing, trace replay, and the churn benchmark.

Exit codes: 0 success, 1 differential or benchmark assertion failure,
2 usage/parse error. Output is deterministic: two invocations with
identical arguments produce byte-identical artifacts.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .compact import CompactTable
from .errors import CompactHashError, TableFullError, TraceParseError
from .harness import (GENERATOR_ID, SplitMix64, WorkloadSpec, format_trace,
                      generate_workload, parse_trace, run_differential)
from .introspect import probe_stats
from .probing import TableParams, validate_params
from .tombstone import TombstoneTable

CSV_COLUMNS = ("round", "table_kind", "mean_success", "mean_miss", "max_probe",
               "load_factor", "tombstone_count", "relocations_this_round")
CSV_SCHEMA_LINE = "# schema=1"


class _UsageError(Exception):
    pass


@dataclass(frozen=True)
class BenchRow:
    """One benchmark measurement: one table kind after one churn round."""

    round: int
    table_kind: str
    mean_success: float
    mean_miss: float
    max_probe: int
    load_factor: float
    tombstone_count: int
    relocations_this_round: int

    def to_csv(self) -> str:
        return ",".join(str(getattr(self, name)) for name in CSV_COLUMNS)

    def to_json_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_COLUMNS}


def _bench_row(table, round_no: int, relocations: int) -> BenchRow:
    stats = probe_stats(table)
    return BenchRow(
        round=round_no,
        table_kind="compact" if isinstance(table, CompactTable) else "tombstone",
        mean_success=stats.mean_success,
        mean_miss=stats.mean_miss,
        max_probe=stats.max_probe,
        load_factor=stats.load_factor,
        tombstone_count=stats.tombstone_count,
        relocations_this_round=relocations,
    )


def _parse_universe(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        return int(lo), int(hi)
    except ValueError:
        raise _UsageError(f"--universe expects 'lo:hi', got {text!r}") from None


def cmd_fuzz(args) -> int:
    params = validate_params(TableParams(args.capacity, args.step))
    # keys must outnumber slots or key % capacity never collides and the
    # fuzz exercises no probe chains at all
    universe = _parse_universe(args.universe) if args.universe else (0, 2 * args.capacity)
    out_dir = Path(args.out_dir)
    for seed in range(args.seed_start, args.seed_start + args.seed_count):
        spec = WorkloadSpec(seed=seed, op_count=args.ops, key_universe=universe)
        ops = generate_workload(spec)
        verdict = run_differential(ops, params, check_every=args.check_every,
                                   compress_enabled=not args.no_compress)
        if not verdict.passed:
            out_dir.mkdir(parents=True, exist_ok=True)
            meta = {"capacity": params.capacity, "step": params.step, "seed": seed,
                    "generator": GENERATOR_ID}
            trace_path = out_dir / f"seed{seed}.trace"
            verdict_path = out_dir / f"seed{seed}.verdict.json"
            trace_path.write_text(format_trace(ops, meta))
            verdict_path.write_text(json.dumps(verdict.to_json_dict(), indent=2) + "\n")
            print(f"seed {seed}: FAIL (trace: {trace_path}, verdict: {verdict_path})")
            return 1
        print(f"seed {seed}: ok ({len(ops)} ops)")
    return 0


def cmd_trace(args) -> int:
    try:
        text = Path(args.trace_file).read_text()
    except OSError as e:
        raise _UsageError(f"cannot read trace file: {e}") from None
    ops, meta = parse_trace(text)
    capacity = args.capacity if args.capacity is not None else int(meta.get("capacity", 0))
    if capacity < 1:
        raise _UsageError("capacity not given and not present in trace headers")
    step = args.step if args.step is not None else int(meta.get("step", 1))
    params = validate_params(TableParams(capacity, step))
    table = CompactTable(params) if args.table == "compact" else TombstoneTable(params)
    results = []
    apply_op = {"add": table.insert, "contains": table.contains, "remove": table.remove}
    try:
        for op in ops:
            results.append(apply_op[op.kind](op.key))
    except TableFullError as e:
        print(f"error: table full during replay: {e}", file=sys.stderr)
        return 1
    for result in results:
        print("+" if result else "-")
    print(json.dumps(probe_stats(table).to_json_dict()))
    return 0


def _signed(u: int) -> int:
    return u - (1 << 63)


def cmd_bench(args) -> int:
    params = validate_params(TableParams(args.capacity, args.step))
    if args.adversarial:
        return _bench_adversarial(args, params)
    if not 0 < args.live_target < args.capacity - 1:
        raise _UsageError(f"--live-target must lie in (0, capacity - 1), got {args.live_target}")

    compact = CompactTable(params)
    tombstone = TombstoneTable(params)
    next_u64 = SplitMix64(args.seed).next_u64
    live_list: list[int] = []
    live_index: dict[int, int] = {}

    def fresh_key() -> int:
        for _ in range(4096):
            key = _signed(next_u64())
            if key not in live_index:
                return key
        raise _UsageError("could not draw a fresh 64-bit key")  # practically unreachable

    def track_add(key: int) -> None:
        live_index[key] = len(live_list)
        live_list.append(key)

    def pick_remove() -> int:
        at = next_u64() % len(live_list)
        key = live_list[at]
        last = live_list.pop()
        del live_index[key]
        if at < len(live_list):
            live_list[at] = last
            live_index[last] = at
        return key

    for _ in range(args.live_target):
        key = fresh_key()
        compact.insert(key)
        tombstone.insert(key)
        track_add(key)

    rows = [_bench_row(compact, 0, 0), _bench_row(tombstone, 0, 0)]
    insert_slots = insert_ops = compress_slots = compress_ops = 0
    tombstone_insert_failures = 0
    for round_no in range(1, args.rounds + 1):
        relocations = 0
        for _ in range(min(args.batch, len(live_list))):
            key = pick_remove()
            _, _find, scan, moved = compact.remove_counted(key)
            relocations += moved
            compress_slots += scan
            compress_ops += 1
            tombstone.remove(key)
        for _ in range(args.batch):
            if len(compact) >= args.capacity - 1:
                break
            key = fresh_key()
            _, n = compact.insert_counted(key)
            insert_slots += n
            insert_ops += 1
            try:
                tombstone.insert(key)
            except TableFullError:
                tombstone_insert_failures += 1
            track_add(key)
        rows.append(_bench_row(compact, round_no, relocations))
        rows.append(_bench_row(tombstone, round_no, 0))

    parity = {
        "mean_insert_slots": insert_slots / insert_ops if insert_ops else 0.0,
        "mean_compress_scan_slots": compress_slots / compress_ops if compress_ops else 0.0,
        "insert_samples": insert_ops,
        "compress_samples": compress_ops,
        "tombstone_insert_failures": tombstone_insert_failures,
    }
    _emit_bench(args, rows, parity)

    # Directional claim: sustained churn must leave tombstone misses at
    # least as expensive as compact misses. Absolute values are seed
    # dependent, the direction is not.
    if args.rounds >= 10:
        miss = {(r.round, r.table_kind): r.mean_miss for r in rows}
        for round_no in range(10, args.rounds + 1):
            if miss[(round_no, "tombstone")] < miss[(round_no, "compact")]:
                print(f"benchmark assertion failed: tombstone mean_miss below compact at round {round_no}",
                      file=sys.stderr)
                return 1
    return 0


def _bench_adversarial(args, params: TableParams) -> int:
    """Same-hash worst case: batch keys sharing one home, inserted then all deleted."""
    n = args.batch
    if args.capacity <= n + 1:
        raise _UsageError(f"adversarial mode needs capacity > batch + 1, got {args.capacity} <= {n + 1}")
    compact = CompactTable(params)
    tombstone = TombstoneTable(params)
    keys = [i * args.capacity for i in range(n)]
    for key in keys:
        compact.insert(key)
        tombstone.insert(key)
    rows = [_bench_row(compact, 0, 0), _bench_row(tombstone, 0, 0)]
    relocations = 0
    for key in keys:
        _, _find, _scan, moved = compact.remove_counted(key)
        relocations += moved
        tombstone.remove(key)
    rows.append(_bench_row(compact, 1, relocations))
    rows.append(_bench_row(tombstone, 1, 0))

    probe_key = n * args.capacity  # fresh key with the same home slot
    _, compact_cost = compact.contains_counted(probe_key)
    tombstone_cost = tombstone.probe_cost(probe_key)
    summary = {
        "mode": "adversarial",
        "batch": n,
        "home_miss_cost_compact": compact_cost,
        "home_miss_cost_tombstone": tombstone_cost,
    }
    _emit_bench(args, rows, summary)
    if tombstone_cost != n + 1 or compact_cost != 1:
        print(f"benchmark assertion failed: expected miss costs ({n + 1}, 1), "
              f"got ({tombstone_cost}, {compact_cost})", file=sys.stderr)
        return 1
    return 0


def _emit_bench(args, rows: list[BenchRow], summary: dict) -> None:
    if args.format == "csv":
        lines = [CSV_SCHEMA_LINE, ",".join(CSV_COLUMNS)]
        lines.extend(row.to_csv() for row in rows)
        lines.extend(f"# {name}={value}" for name, value in summary.items())
        text = "\n".join(lines) + "\n"
        filename = "bench.csv"
    else:
        payload = {"schema": 1, "rows": [row.to_json_dict() for row in rows], "summary": summary}
        text = json.dumps(payload, indent=2) + "\n"
        filename = "bench.json"
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compacthash",
                                     description="Open-addressing hash tables with compaction-based deletion")
    sub = parser.add_subparsers(dest="command", required=True)

    fuzz = sub.add_parser("fuzz", help="differential-fuzz both tables against a set oracle")
    fuzz.add_argument("--seed-start", type=int, default=0)
    fuzz.add_argument("--seed-count", type=int, default=100)
    fuzz.add_argument("--capacity", type=int, default=65536)
    fuzz.add_argument("--step", type=int, default=1)
    fuzz.add_argument("--ops", type=int, default=100_000)
    fuzz.add_argument("--check-every", type=int, default=1000,
                      help="run the invariant checker every N ops (1 = after every op)")
    fuzz.add_argument("--universe", default=None, help="key universe 'lo:hi' (default 0:2*capacity)")
    fuzz.add_argument("--out-dir", default="fuzz-out")
    fuzz.add_argument("--no-compress", action="store_true", help=argparse.SUPPRESS)
    fuzz.set_defaults(func=cmd_fuzz)

    trace = sub.add_parser("trace", help="replay a trace file against one table kind")
    trace.add_argument("trace_file")
    trace.add_argument("--table", choices=("compact", "tombstone"), default="compact")
    trace.add_argument("--capacity", type=int, default=None, help="override trace header capacity")
    trace.add_argument("--step", type=int, default=None, help="override trace header step")
    trace.set_defaults(func=cmd_trace)

    bench = sub.add_parser("bench", help="insert/delete churn benchmark of both tables")
    bench.add_argument("--capacity", type=int, default=65536)
    bench.add_argument("--step", type=int, default=1)
    bench.add_argument("--live-target", type=int, default=32768)
    bench.add_argument("--rounds", type=int, default=50)
    bench.add_argument("--batch", type=int, default=16384)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--out-dir", default=None)
    bench.add_argument("--adversarial", action="store_true",
                       help="same-hash worst case: insert batch colliding keys, delete all")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.func(args)
    except (TraceParseError, _UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CompactHashError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
