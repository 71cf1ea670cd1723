"""Greedy numeration: encode integers over an increasing base sequence,
shift digits, and build replacement sequences.

A base is any increasing SequenceTable with first term 1.  The greedy digit
expansion repeatedly subtracts the largest base term that still fits, with
multiplicities (base b needs digits up to b-1).  Replacement reads the same
digits against a second sequence.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .seqcore import (
    RecurrenceSpec,
    SequenceTable,
    fibonacci_spec,
    generalized_narayana_spec,
    generate_power_base,
    generate_recurrent,
    narayana_spec,
)

__all__ = [
    "GreedyRepresentation",
    "SignatureProfile",
    "SignatureViolation",
    "ReplacementMap",
    "encode_greedy",
    "decode",
    "right_shift",
    "replace",
    "digit_sum",
    "verify_signature",
    "shifted_table",
    "factorial_table",
    "bulk_replace",
    "bulk_digit_sums",
    "bulk_phases",
    "load_registry",
    "registry_map",
    "registry_base",
]


@dataclass(frozen=True)
class GreedyRepresentation:
    """Digits as (index, multiplicity) pairs, indices strictly decreasing.

    Index 0 is the virtual position produced by a right shift; it always
    carries the value 1 (= the base's first term).
    """

    digits: tuple[tuple[int, int], ...]
    value: int

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.digits)


class SignatureViolation(ValueError):
    def __init__(self, msg: str, index: int):
        super().__init__(msg)
        self.index = index


@dataclass(frozen=True)
class SignatureProfile:
    """Bounded-lookback witness for a base over an index window."""

    lookback: int
    growth_r: Fraction
    growth_s: Fraction
    verified_range: tuple[int, int]


@dataclass(frozen=True)
class ReplacementMap:
    source: SequenceTable  # increasing, first term 1
    target: SequenceTable  # arbitrary integers
    name: str = "replacement"

    def __post_init__(self):
        if self.source.term(1) != 1:
            raise ValueError("source base must start at 1")
        if len(self.target) < len(self.source):
            raise ValueError("target shorter than source")


def _check_base(base: SequenceTable, n: int) -> None:
    if base.term(1) != 1:
        raise ValueError(f"{base.name}: base must have first term 1")
    if base.term(len(base)) < n:
        raise IndexError(
            f"{base.name}: materialized to {base.term(len(base))}, cannot encode {n}")


def encode_greedy(n: int, base: SequenceTable) -> GreedyRepresentation:
    """Greedy expansion of n >= 1 over the base."""
    n = int(n)
    if n < 1:
        raise ValueError("can only encode integers >= 1")
    _check_base(base, n)
    terms = base._terms  # list access, hot path
    digits = []
    rem = n
    i = bisect_right(terms, rem)  # terms[i-1] <= rem
    while rem > 0:
        while terms[i - 1] > rem:
            i -= 1
        q, rem = divmod(rem, terms[i - 1])
        digits.append((i, q))
        if rem == 0:
            break
    return GreedyRepresentation(tuple(digits), n)


def decode(rep: GreedyRepresentation, base: SequenceTable) -> int:
    """Sum multiplicity * base value; index 0 decodes to 1."""
    total = 0
    for i, mult in rep.digits:
        total += mult * (1 if i == 0 else base.term(i))
    return total


def right_shift(rep: GreedyRepresentation, base: SequenceTable | None = None) -> GreedyRepresentation:
    """Decrement every digit index by one (index 1 becomes virtual index 0).

    The result is a digit vector, not necessarily a greedy expansion of its
    decoded value; decode handles index 0.
    """
    digits = tuple((i - 1, m) for i, m in rep.digits)
    if base is not None:
        value = decode(GreedyRepresentation(digits, 0), base)
        return GreedyRepresentation(digits, value)
    return GreedyRepresentation(digits, rep.value)


def replace(n: int, rmap: ReplacementMap) -> int:
    """Write n over the source base, then read the digits in the target."""
    rep = encode_greedy(n, rmap.source)
    return sum(m * rmap.target.term(i) for i, m in rep.digits)


def digit_sum(n: int, base: SequenceTable) -> int:
    return sum(m for _, m in encode_greedy(n, base).digits)


def shifted_table(base: SequenceTable) -> SequenceTable:
    """Target table for the index right shift: b_1 = 1, b_i = a_{i-1}."""
    return SequenceTable(
        f"{base.name}_shifted", [1] + base.terms[:-1], kind="custom")


def factorial_table(count: int) -> SequenceTable:
    t = [1]
    for i in range(2, count + 1):
        t.append(t[-1] * i)
    return SequenceTable("factorials", t, kind="custom", increasing=True)


def verify_signature(
    base: SequenceTable,
    index_range: tuple[int, int] | None = None,
    max_lookback: int = 12,
    growth_cap: Fraction | float = 16,
) -> SignatureProfile:
    """Greedy self-expansion check: every a_n must decompose using only
    a_{n-1} ... a_{n-max_lookback}, and consecutive ratios must stay below
    growth_cap (finite windows cannot prove unboundedness, so the cap is
    how runaway growth like factorials gets flagged).
    """
    n_terms = len(base)
    if index_range is None:
        index_range = (2, n_terms)
    lo, hi = index_range
    if not (2 <= lo <= hi <= n_terms):
        raise ValueError(f"index range {index_range} outside 2..{n_terms}")
    growth_cap = Fraction(growth_cap)

    terms = base._terms
    worst = 1
    for n in range(lo, hi + 1):
        rem = terms[n - 1]
        i = n - 1
        min_used = n
        while rem > 0:
            while i >= 1 and terms[i - 1] > rem:
                i -= 1
            if i < 1:
                raise SignatureViolation(
                    f"{base.name}: self-expansion of index {n} ran out of terms", n)
            q, rem = divmod(rem, terms[i - 1])
            min_used = i
            i -= 1
        worst = max(worst, n - min_used)
        if n - min_used > max_lookback:
            raise SignatureViolation(
                f"{base.name}: self-expansion of index {n} reaches back "
                f"{n - min_used} > {max_lookback}", n)

    ratios = {n: Fraction(terms[n - 1], terms[n - 2])
              for n in range(lo, hi + 1) if terms[n - 2] > 0}
    r = min(ratios.values())
    s = max(ratios.values())
    if s >= growth_cap:
        k_bad = next(n for n, q in ratios.items() if q >= growth_cap)
        raise SignatureViolation(
            f"{base.name}: growth ratio {float(s):.3g} at index {k_bad} exceeds "
            f"cap {float(growth_cap):.3g}; no finite growth bound evident", k_bad)
    if r <= 1:
        raise SignatureViolation(f"{base.name}: growth ratio at or below 1", lo)
    return SignatureProfile(worst, r, s, (lo, hi))


# ---------------------------------------------------------------------------
# bulk (vectorized) digit machinery
#
# For gap bases (all paper bases except powers of b >= 3) every greedy digit
# has multiplicity <= 1 when a_{i+1} - a_i <= a_i, so one descending pass of
# conditional subtraction reproduces the greedy algorithm. The general path
# uses vectorized divmod per index.


def _bulk_digit_pass(ns: np.ndarray, source_vals: list[int], per_index):
    """Run greedy digit extraction over all of ns, calling
    per_index(idx, mult_array) for every base index from high to low."""
    rem = ns.astype(np.int64).copy()
    if rem.min() < 1:
        raise ValueError("bulk encode needs values >= 1")
    for idx in range(len(source_vals), 0, -1):
        a = source_vals[idx - 1]
        if a > int(rem.max()):
            continue
        if idx == 1:
            mult = rem.copy()  # a_1 = 1 absorbs the rest
            rem = np.zeros_like(rem)
        else:
            # multiplicity via divmod keeps the general (base-b) case exact
            mult = rem // a
            rem = rem - mult * a
        per_index(idx, mult)
    if int(rem.max()) != 0:
        raise AssertionError("bulk greedy pass left a remainder")


def bulk_replace(ns: np.ndarray, rmap: ReplacementMap) -> np.ndarray:
    """Vectorized A(n) for an int64-safe target."""
    src = rmap.source._terms
    tgt = rmap.target._terms
    out = np.zeros(len(ns), dtype=np.int64)

    def acc(idx, mult):
        out_add = mult * tgt[idx - 1]
        np.add(out, out_add, out=out)

    _bulk_digit_pass(np.asarray(ns), src, acc)
    return out


def bulk_digit_sums(ns: np.ndarray, base: SequenceTable) -> np.ndarray:
    out = np.zeros(len(ns), dtype=np.int64)

    def acc(idx, mult):
        np.add(out, mult, out=out)

    _bulk_digit_pass(np.asarray(ns), base._terms, acc)
    return out


def bulk_phases(ns: np.ndarray, rmap: ReplacementMap, target_fracs: list[float]) -> np.ndarray:
    """{beta * A(n)} computed digit-wise: sum of multiplicity * {beta*b_i}
    mod 1.  target_fracs[i-1] must be {beta * target[i]} (exactly reduced);
    works even when the target values themselves are astronomically large.
    """
    out = np.zeros(len(ns), dtype=np.float64)
    fr = target_fracs

    def acc(idx, mult):
        out_add = mult.astype(np.float64) * fr[idx - 1]
        np.add(out, out_add, out=out)

    _bulk_digit_pass(np.asarray(ns), rmap.source._terms, acc)
    return np.mod(out, 1.0)


# ---------------------------------------------------------------------------
# named registry


_DEFAULT_REGISTRY = "registry.json"


def _base_from_entry(name: str, entry: dict, count: int) -> SequenceTable:
    kind = entry["kind"]
    if kind == "power":
        return generate_power_base(int(entry["b"]), count)
    if kind == "recurrence":
        spec = RecurrenceSpec(name, int(entry["order"]),
                              tuple(entry["coefficients"]), tuple(entry["initial_terms"]))
        return generate_recurrent(spec, count, increasing=bool(entry.get("increasing", True)))
    if kind == "narayana":
        return generate_recurrent(narayana_spec(), count, increasing=True)
    if kind == "fibonacci":
        return generate_recurrent(fibonacci_spec(), count, increasing=True)
    if kind == "gen_narayana":
        return generate_recurrent(generalized_narayana_spec(int(entry["d"])), count, increasing=True)
    raise ValueError(f"unknown base kind {kind!r} for {name!r}")


def load_registry(path: str | Path | None = None) -> dict:
    if path is None:
        with resources.files("modsig").joinpath(_DEFAULT_REGISTRY).open("r") as fh:
            return json.load(fh)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def registry_base(name: str, count: int, registry: dict | None = None) -> SequenceTable:
    reg = registry if registry is not None else load_registry()
    entry = reg["bases"].get(name)
    if entry is None:
        raise KeyError(f"base {name!r} not in registry")
    return _base_from_entry(name, entry, count)


def registry_map(name: str, count: int, registry: dict | None = None) -> ReplacementMap:
    reg = registry if registry is not None else load_registry()
    entry = reg["maps"].get(name)
    if entry is None:
        raise KeyError(f"map {name!r} not in registry")
    source = registry_base(entry["source"], count, reg)
    tname = entry["target"]
    if tname == "shift":
        target = shifted_table(source)
    elif tname == "factorial":
        target = factorial_table(len(source))
    elif tname in reg["bases"]:
        target = registry_base(tname, count, reg)
    else:
        raise KeyError(f"target {tname!r} not in registry")
    return ReplacementMap(source, target, name=name)
