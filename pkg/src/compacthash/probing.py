"""Hashing and probe-sequence arithmetic shared by both table variants.

All functions here are pure; a :class:`TableParams` instance is immutable
and safe to share between threads and tables.
"""

from dataclasses import dataclass
from math import gcd

from .errors import StepNotCoprimeError, StepOutOfRangeError, ZeroCapacityError

DEFAULT_CAPACITY = 1_000_000


@dataclass(frozen=True)
class TableParams:
    """Sizing and probing parameters for an open-addressing table.

    capacity is the number of slots, step the constant probe increment.
    step must be coprime with capacity so that a probe sequence visits
    every slot exactly once per cycle; otherwise insertion could fail on
    a table that still has room.
    """

    capacity: int = DEFAULT_CAPACITY
    step: int = 1
    growth_enabled: bool = False
    growth_load_factor: float = 0.7
    growth_multiplier: int = 2


def validate_params(params: TableParams) -> TableParams:
    """Return params unchanged, or raise if any invariant fails.

    Raises ZeroCapacityError, StepOutOfRangeError or StepNotCoprimeError.
    """
    m, c = params.capacity, params.step
    if m < 1:
        raise ZeroCapacityError(f"capacity must be >= 1, got {m}")
    if c < 1 or (m > 1 and c >= m):
        raise StepOutOfRangeError(f"step must satisfy 1 <= step < capacity, got step={c} capacity={m}")
    if gcd(c, m) != 1:
        raise StepNotCoprimeError(f"gcd(step={c}, capacity={m}) = {gcd(c, m)}; some slots would be unreachable")
    if params.growth_multiplier < 2:
        raise StepOutOfRangeError(f"growth_multiplier must be >= 2, got {params.growth_multiplier}")
    if not 0.0 < params.growth_load_factor < 1.0:
        raise StepOutOfRangeError(f"growth_load_factor must lie in (0, 1), got {params.growth_load_factor}")
    return params


def hash_index(key: int, capacity: int) -> int:
    """Home slot of key: the nonnegative remainder of key modulo capacity.

    Python's % already returns a result in [0, capacity) for positive
    divisors, so this is total over the full signed 64-bit range (taking
    abs() first would overflow on the minimum value in fixed-width
    languages and is avoided on purpose).
    """
    return key % capacity


def probe_slot(key: int, j: int, params: TableParams) -> int:
    """Slot examined on the j-th probe for key (j = 0 is the home slot)."""
    return (key % params.capacity + params.step * j) % params.capacity
