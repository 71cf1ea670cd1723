"""Exact integer-sequence generation and storage.

Tables keep every term as a Python int (arbitrary precision) together with
the recurrence or generator that produced them, so later analyses can verify
residuals exactly and read growth metadata.  Tables are immutable once
materialized.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "RecurrenceSpec",
    "SequenceTable",
    "generate_recurrent",
    "generate_ulam",
    "generate_factorial_sums",
    "generate_power_base",
    "narayana_spec",
    "fibonacci_spec",
    "generalized_narayana_spec",
    "sqrt13_spec",
    "sqrt6_spec",
    "write_csv",
    "write_cache",
    "read_cache",
    "ulam_representation_counts",
]


@dataclass(frozen=True)
class RecurrenceSpec:
    """a_n = c_1 a_{n-1} + ... + c_L a_{n-L} with the given seed terms."""

    name: str
    order: int
    coefficients: tuple[int, ...]
    initial_terms: tuple[int, ...]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if len(self.coefficients) != self.order:
            raise ValueError("need exactly `order` coefficients")
        if len(self.initial_terms) != self.order:
            raise ValueError("need exactly `order` initial terms")

    def char_poly(self) -> tuple[int, ...]:
        """Monic characteristic polynomial, low-to-high coefficients:
        x^L - c_1 x^{L-1} - ... - c_L."""
        return tuple(-c for c in reversed(self.coefficients)) + (1,)


class SequenceTable:
    """Materialized 1-indexed prefix of an integer sequence."""

    def __init__(self, name: str, terms: Sequence[int], kind: str = "custom",
                 spec: RecurrenceSpec | None = None, increasing: bool = False):
        self.name = name
        self.kind = kind
        self.spec = spec
        self._terms = list(int(t) for t in terms)
        self.increasing = increasing
        if increasing:
            for i in range(1, len(self._terms)):
                if self._terms[i] <= self._terms[i - 1]:
                    raise ValueError(f"{name}: not strictly increasing at index {i + 1}")

    def __len__(self) -> int:
        return len(self._terms)

    def term(self, i: int) -> int:
        """1-indexed access."""
        if i < 1:
            raise IndexError(f"{self.name}: index {i} < 1")
        if i > len(self._terms):
            raise IndexError(
                f"{self.name}: index {i} beyond materialized length {len(self._terms)}")
        return self._terms[i - 1]

    @property
    def terms(self) -> list[int]:
        return list(self._terms)

    def values_array(self) -> np.ndarray:
        """int64 view; raises if any term does not fit a machine word."""
        if self._terms and (max(self._terms) >= 2 ** 63 or min(self._terms) < -(2 ** 63)):
            raise OverflowError(f"{self.name}: terms exceed int64")
        return np.asarray(self._terms, dtype=np.int64)

    def verify_recurrence(self) -> None:
        """Exact residual check for every index past the order."""
        if self.spec is None:
            raise ValueError(f"{self.name} is not recurrence-backed")
        c = self.spec.coefficients
        L = self.spec.order
        t = self._terms
        for n in range(L, len(t)):
            pred = sum(c[j] * t[n - 1 - j] for j in range(L))
            if t[n] != pred:
                raise AssertionError(f"{self.name}: recurrence residual at index {n + 1}")

    def growth_window(self) -> tuple[Fraction, Fraction]:
        """(min, max) of consecutive-term ratios over the materialized range."""
        t = self._terms
        ratios = [Fraction(t[i + 1], t[i]) for i in range(len(t) - 1) if t[i] > 0]
        return min(ratios), max(ratios)


# --- named specs -----------------------------------------------------------


def narayana_spec() -> RecurrenceSpec:
    return RecurrenceSpec("narayana", 3, (1, 0, 1), (1, 2, 3))


def fibonacci_spec() -> RecurrenceSpec:
    # seeds 1, 2 so the value 1 appears exactly once (Zeckendorf convention)
    return RecurrenceSpec("fibonacci", 2, (1, 1), (1, 2))


def generalized_narayana_spec(d: int) -> RecurrenceSpec:
    """a_i = i for i <= d, then a_i = a_{i-1} + a_{i-d}."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return RecurrenceSpec("gen_narayana_1", 1, (2,), (1,))  # powers of two
    coeffs = (1,) + (0,) * (d - 2) + (1,)
    return RecurrenceSpec(f"gen_narayana_{d}", d, coeffs, tuple(range(1, d + 1)))


def sqrt13_spec() -> RecurrenceSpec:
    return RecurrenceSpec("sqrt13_rec", 6, (3, 6, -4, -5, 1, 1), (0, 0, 0, 0, 0, 1))


def sqrt6_spec() -> RecurrenceSpec:
    return RecurrenceSpec("sqrt6_rec", 4, (0, 10, 0, -1), (1, 2, 3, 4))


# --- generators ------------------------------------------------------------


def generate_recurrent(spec: RecurrenceSpec, count: int, increasing: bool = False) -> SequenceTable:
    if count < spec.order:
        raise ValueError(f"count {count} below order {spec.order}")
    t = list(spec.initial_terms)
    c = spec.coefficients
    L = spec.order
    while len(t) < count:
        t.append(sum(c[j] * t[-1 - j] for j in range(L)))
    return SequenceTable(spec.name, t, kind="recurrence", spec=spec, increasing=increasing)


def generate_power_base(b: int, count: int) -> SequenceTable:
    if b < 2:
        raise ValueError("power base needs b >= 2")
    spec = RecurrenceSpec(f"powers_{b}", 1, (b,), (1,))
    return generate_recurrent(spec, count, increasing=True)


def generate_ulam(count: int, _chunk_growth: float = 13.6) -> SequenceTable:
    """1, 2, then always the least integer with exactly one representation
    as a sum of two distinct earlier terms.

    Representation counts are maintained incrementally: appending a term t
    bumps the count of t + u for every earlier u.  The O(n^2) verification
    pass lives in the test suite only.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    cap = max(64, int(count * _chunk_growth))
    while True:
        counts = np.zeros(cap + 1, dtype=np.int32)
        terms = [1, 2]
        counts[3] = 1
        last = 2
        overflow = False
        while len(terms) < count:
            t = last + 1
            while t <= cap and counts[t] != 1:
                t += 1
            if t > cap:
                overflow = True
                break
            sums = np.asarray(terms, dtype=np.int64) + t
            sums = sums[sums <= cap]
            np.add.at(counts, sums, 1)
            terms.append(t)
            last = t
        if not overflow:
            return SequenceTable("ulam", terms[:count], kind="ulam", increasing=True)
        cap *= 2


def ulam_representation_counts(terms: Sequence[int]) -> np.ndarray:
    """Counts of representations m = u_i + u_j (i < j) for all m up to the
    last term, by full pairwise enumeration.  Independent of the generator."""
    arr = np.asarray(terms, dtype=np.int64)
    mx = int(arr[-1])
    counts = np.zeros(mx + 1, dtype=np.int64)
    for i in range(len(arr) - 1):
        s = arr[i] + arr[i + 1:]
        s = s[s <= mx]
        np.add.at(counts, s, 1)
    return counts


def generate_factorial_sums(count: int) -> SequenceTable:
    """Increasing enumeration of sums of distinct factorials (one copy of 1).

    The n-th value reads the binary digits of n in the factorial scale:
    bit i (value 2^i) contributes (i+1)!.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    nbits = count.bit_length() + 1
    fact = [1]
    for i in range(2, nbits + 2):
        fact.append(fact[-1] * i)
    out = []
    for n in range(1, count + 1):
        v = 0
        m, i = n, 0
        while m:
            if m & 1:
                v += fact[i]
            m >>= 1
            i += 1
        out.append(v)
    return SequenceTable("factorial_sums", out, kind="factorial_sum", increasing=True)


# --- persistence -----------------------------------------------------------

_CACHE_MAGIC = b"MSQ1"


def write_csv(table: SequenceTable | Iterable[tuple[int, int]], path: str | Path,
              header: tuple[str, str] = ("index", "value")) -> None:
    rows = (
        enumerate(table.terms, start=1) if isinstance(table, SequenceTable) else table
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{header[0]},{header[1]}\n")
        for i, v in rows:
            fh.write(f"{i},{v}\n")


def write_cache(table: SequenceTable, path: str | Path) -> None:
    """Compact binary cache: magic, u64 count, then per term a u32 byte
    length and the little-endian signed integer bytes."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<Q", len(table)))
        for v in table.terms:
            b = v.to_bytes((v.bit_length() + 8) // 8, "little", signed=True)
            fh.write(struct.pack("<I", len(b)))
            fh.write(b)


def read_cache(path: str | Path, name: str = "cached") -> SequenceTable:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a sequence cache")
        (count,) = struct.unpack("<Q", fh.read(8))
        terms = []
        for _ in range(count):
            (ln,) = struct.unpack("<I", fh.read(4))
            terms.append(int.from_bytes(fh.read(ln), "little", signed=True))
    return SequenceTable(name, terms, kind="custom")
