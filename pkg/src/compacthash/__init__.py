"""Open-addressing hash tables with compaction-based deletion.

CompactTable deletes by relocating entries backward along their probe
chains, so churn never degrades probe lengths; TombstoneTable is the
classical mark-deleted baseline for comparison. The harness module
differentially tests both against a plain set, and the CLI exposes
fuzzing, trace replay, and a churn benchmark.
"""

from .compact import CompactTable, Slot
from .errors import (CapacityTooSmallError, CompactHashError, EmptyKeyUniverseError,
                     StepNotCoprimeError, StepOutOfRangeError, TableFullError,
                     TraceParseError, ZeroCapacityError)
from .harness import (ADD, CONTAINS, GENERATOR_ID, REMOVE, Divergence, InvariantFailure,
                      OpRecord, SplitMix64, Verdict, WorkloadSpec, format_trace,
                      generate_workload, model_apply, parse_trace, run_differential)
from .introspect import (COUNT_MISMATCH, DUPLICATE_KEY, REACHABILITY_GAP,
                         SLOT_INCONSISTENT, OpCost, ProbeStats, Violation,
                         ViolationReport, check_invariants, measure_op_cost,
                         probe_stats)
from .probing import TableParams, hash_index, probe_slot, validate_params
from .tombstone import BUSY, DELETED, FREE, TombstoneSlot, TombstoneTable

__version__ = "0.1.0"

__all__ = [
    "ADD", "BUSY", "CONTAINS", "COUNT_MISMATCH", "DELETED", "DUPLICATE_KEY", "FREE",
    "GENERATOR_ID", "REACHABILITY_GAP", "REMOVE", "SLOT_INCONSISTENT",
    "CapacityTooSmallError", "CompactHashError", "CompactTable", "Divergence",
    "EmptyKeyUniverseError", "InvariantFailure", "OpCost", "OpRecord", "ProbeStats",
    "Slot", "SplitMix64", "StepNotCoprimeError", "StepOutOfRangeError",
    "TableFullError", "TableParams", "TombstoneSlot", "TombstoneTable",
    "TraceParseError", "Verdict", "Violation", "ViolationReport", "WorkloadSpec",
    "ZeroCapacityError", "check_invariants", "format_trace", "generate_workload",
    "hash_index", "measure_op_cost", "model_apply", "parse_trace", "probe_slot",
    "probe_stats", "run_differential", "validate_params",
]
