"""Extended-precision real arithmetic and distance-to-integer analysis.

The central quantity everywhere is ``||beta * a||`` for a real number beta
and a (possibly huge) integer a.  Floating point cannot do this once a
outgrows the mantissa, so reals are handled as exact dyadic enclosures:
a rational midpoint whose denominator is a power of two, plus a rigorous
absolute error radius.  All arithmetic propagates radii conservatively and
comparisons that the enclosure cannot decide raise instead of guessing.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

__all__ = [
    "ExtReal",
    "IndeterminateError",
    "RealValue",
    "ExactReal",
    "AlgebraicReal",
    "SeriesConstant",
    "DerivedReal",
    "scaled",
    "shifted",
    "product",
    "poly_in",
    "CONSTANTS",
    "named_constant",
    "alpha_root",
    "dist_to_int",
    "DecayReport",
    "classify_decay",
    "recover_coefficients",
    "recover_quadratic",
    "NearestIntegerSequence",
    "nearest_integer_sequence",
    "find_multiplier",
]


class IndeterminateError(ArithmeticError):
    """An enclosure is too wide to decide the requested question."""


def _round_fraction(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Round x to a dyadic with 2^-bits quantum; returns (value, error)."""
    q = 1 << bits
    n = x.numerator * q
    d = x.denominator
    m = n // d
    if 2 * (n - m * d) >= d:
        m += 1
    v = Fraction(m, q)
    return v, abs(v - x)


class ExtReal:
    """Dyadic midpoint plus rigorous absolute error radius."""

    __slots__ = ("value", "error")

    def __init__(self, value: Fraction | int, error: Fraction | int = 0):
        self.value = Fraction(value)
        self.error = Fraction(error)
        if self.error < 0:
            raise ValueError("error radius must be nonnegative")

    @classmethod
    def exact(cls, x) -> "ExtReal":
        return cls(Fraction(x), Fraction(0))

    @classmethod
    def from_fraction(cls, x: Fraction, bits: int) -> "ExtReal":
        v, e = _round_fraction(x, bits)
        return cls(v, e)

    def round_to(self, bits: int) -> "ExtReal":
        """Quantize the midpoint to 2^-bits, folding the quantum into error."""
        v, e = _round_fraction(self.value, bits)
        return ExtReal(v, self.error + e)

    # interval endpoints
    @property
    def lo(self) -> Fraction:
        return self.value - self.error

    @property
    def hi(self) -> Fraction:
        return self.value + self.error

    def __add__(self, other) -> "ExtReal":
        o = other if isinstance(other, ExtReal) else ExtReal.exact(other)
        return ExtReal(self.value + o.value, self.error + o.error)

    __radd__ = __add__

    def __neg__(self) -> "ExtReal":
        return ExtReal(-self.value, self.error)

    def __sub__(self, other) -> "ExtReal":
        return self + (-(other if isinstance(other, ExtReal) else ExtReal.exact(other)))

    def __rsub__(self, other) -> "ExtReal":
        return (-self) + other

    def __mul__(self, other) -> "ExtReal":
        o = other if isinstance(other, ExtReal) else ExtReal.exact(other)
        err = abs(self.value) * o.error + abs(o.value) * self.error + self.error * o.error
        return ExtReal(self.value * o.value, err)

    __rmul__ = __mul__

    def abs_(self) -> "ExtReal":
        if abs(self.value) >= self.error:
            return ExtReal(abs(self.value), self.error)
        # interval straddles zero
        hi = abs(self.value) + self.error
        return ExtReal(hi / 2, hi / 2)

    def compare(self, other) -> int | None:
        """-1 / +1 when certain, None when the enclosures overlap."""
        o = other if isinstance(other, ExtReal) else ExtReal.exact(other)
        if self.hi < o.lo:
            return -1
        if self.lo > o.hi:
            return 1
        if self.error == 0 and o.error == 0 and self.value == o.value:
            return 0
        return None

    def definitely_lt(self, other) -> bool:
        c = self.compare(other)
        if c is None:
            raise IndeterminateError(f"cannot order {self} against {other}")
        return c < 0

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"ExtReal({float(self.value):.17g} ± {float(self.error):.3g})"

    def decimal_str(self, digits: int = 20) -> str:
        """Decimal rendering with an explicit error exponent, for reports."""
        v = float(self.value)
        if self.error == 0:
            return f"{v:.{digits}g} (exact)"
        eexp = math.floor(math.log10(float(self.error))) if self.error else 0
        return f"{v:.{digits}g} (±1e{eexp:+d})"


# ---------------------------------------------------------------------------
# real-number providers


class RealValue:
    """A real number that can produce enclosures at any requested accuracy.

    Subclasses implement enclosure(bits) returning an ExtReal whose error
    is at most 2^-bits.
    """

    name: str = "real"

    def enclosure(self, bits: int) -> ExtReal:  # pragma: no cover - interface
        raise NotImplementedError

    def __float__(self) -> float:
        return float(self.enclosure(64).value)


class ExactReal(RealValue):
    def __init__(self, x, name: str | None = None):
        self.x = Fraction(x)
        self.name = name if name is not None else f"rat:{self.x}"

    def enclosure(self, bits: int) -> ExtReal:
        # keep it exact; dyadic rounding happens where a caller needs it
        return ExtReal.exact(self.x)

    @property
    def is_rational(self) -> bool:
        return True


class AlgebraicReal(RealValue):
    """Real algebraic number given by an integer polynomial and an isolating
    interval with a sign change.  Refinement is bisection with Newton
    acceleration; every accepted interval is certified by exact sign change.
    """

    def __init__(self, coeffs: Sequence[int], lo, hi, name: str = "algebraic"):
        self.coeffs = tuple(int(c) for c in coeffs)
        self.name = name
        lo, hi = Fraction(lo), Fraction(hi)
        flo, fhi = self._eval(lo), self._eval(hi)
        if flo == 0 or fhi == 0:
            raise ValueError("isolating interval endpoints must not be roots")
        if (flo < 0) == (fhi < 0):
            raise ValueError(f"no sign change on the isolating interval of {name}")
        self._lo, self._hi = lo, hi
        self._neg_left = flo < 0
        self._lock = threading.Lock()

    def _eval(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _deriv_eval(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for i in range(len(self.coeffs) - 1, 0, -1):
            acc = acc * x + i * self.coeffs[i]
        return acc

    def _try_adopt(self, lo: Fraction, hi: Fraction) -> bool:
        if not (self._lo <= lo < hi <= self._hi):
            return False
        flo, fhi = self._eval(lo), self._eval(hi)
        if flo == 0 or fhi == 0 or (flo < 0) == (fhi < 0):
            return False
        self._lo, self._hi = lo, hi
        self._neg_left = flo < 0
        return True

    def refine(self, bits: int) -> None:
        """Shrink the isolating interval below 2^-bits width."""
        target = Fraction(1, 1 << bits)
        with self._lock:
            while self._hi - self._lo > target:
                width = self._hi - self._lo
                mid = (self._lo + self._hi) / 2
                # Newton step from the midpoint; adopt only if the candidate
                # interval still carries an exact sign change.
                d = self._deriv_eval(mid)
                if d != 0:
                    x1 = mid - self._eval(mid) / d
                    r = width * width
                    if r > 0 and self._try_adopt(x1 - r, x1 + r):
                        continue
                fm = self._eval(mid)
                if fm == 0:
                    # exact hit: nudge to keep an open interval
                    eps = width / 4
                    self._lo, self._hi = mid - eps, mid + eps
                    return
                if (fm < 0) == self._neg_left:
                    self._lo = mid
                else:
                    self._hi = mid

    def enclosure(self, bits: int) -> ExtReal:
        self.refine(bits + 1)
        with self._lock:
            lo, hi = self._lo, self._hi
        return ExtReal((lo + hi) / 2, (hi - lo) / 2)

    @property
    def is_rational(self) -> bool:
        return False


class SeriesConstant(RealValue):
    """Real constant defined by a partial-sum rule with a rigorous tail bound.

    fn(k) must return (partial_sum: Fraction, tail_bound: Fraction) after k
    terms, with tail bound eventually below any 2^-bits.
    """

    def __init__(self, fn: Callable[[int], tuple[Fraction, Fraction]], name: str):
        self.fn = fn
        self.name = name

    def enclosure(self, bits: int) -> ExtReal:
        target = Fraction(1, 1 << (bits + 1))
        k = 8
        while True:
            s, tail = self.fn(k)
            if tail <= target:
                return ExtReal(s + tail / 2, tail / 2).round_to(bits + 2)
            k *= 2


class DerivedReal(RealValue):
    """Real defined by combining other reals; enclosure asks children for
    extra guard bits and combines with interval arithmetic."""

    def __init__(self, fn: Callable[[int], ExtReal], name: str):
        self.fn = fn
        self.name = name

    def enclosure(self, bits: int) -> ExtReal:
        return self.fn(bits)


def scaled(beta: RealValue, k: int | Fraction, name: str | None = None) -> RealValue:
    k = Fraction(k)
    nm = name or f"{beta.name}*{k}"

    def fn(bits: int) -> ExtReal:
        guard = max(0, (abs(k.numerator) // k.denominator).bit_length() + 1)
        return beta.enclosure(bits + guard) * ExtReal.exact(k)

    return DerivedReal(fn, nm)


def shifted(beta: RealValue, c: int | Fraction, name: str | None = None) -> RealValue:
    c = Fraction(c)

    def fn(bits: int) -> ExtReal:
        return beta.enclosure(bits + 1) + ExtReal.exact(c)

    return DerivedReal(fn, name or f"{beta.name}+{c}")


def product(a: RealValue, b: RealValue, name: str | None = None) -> RealValue:
    def fn(bits: int) -> ExtReal:
        ea = a.enclosure(bits + 8)
        eb = b.enclosure(bits + 8)
        g = max(abs(ea.value), abs(eb.value), 1)
        extra = int(g).bit_length() + 4
        return (a.enclosure(bits + extra) * b.enclosure(bits + extra)).round_to(bits + 4)

    return DerivedReal(fn, name or f"{a.name}*{b.name}")


def poly_in(alpha: RealValue, ints: Sequence[int], name: str | None = None) -> RealValue:
    """a0 + a1*alpha + a2*alpha^2 + ... with integer coefficients."""
    ints = tuple(int(c) for c in ints)

    def fn(bits: int) -> ExtReal:
        guard = sum(abs(c) for c in ints).bit_length() + len(ints) + 4
        x = alpha.enclosure(bits + guard)
        acc = ExtReal.exact(0)
        for c in reversed(ints):
            acc = acc * x + ExtReal.exact(c)
        return acc.round_to(bits + 2)

    return DerivedReal(fn, name or f"{alpha.name}-poly{ints}")


# --- named constants -------------------------------------------------------


def alpha_root(d: int) -> RealValue:
    """The root in (0,1) of x^d + x - 1 (for d=1 this is the rational 1/2)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return ExactReal(Fraction(1, 2), name="alpha1")
    coeffs = [-1, 1] + [0] * (d - 2) + [1]
    return AlgebraicReal(coeffs, Fraction(1, 2), Fraction(9, 10), name=f"alpha{d}")


def _e_series(k: int) -> tuple[Fraction, Fraction]:
    s = Fraction(1)
    t = Fraction(1)
    for i in range(1, k + 1):
        t /= i
        s += t
    return s, 2 * t / (k + 1)


def _inv_e_series(k: int) -> tuple[Fraction, Fraction]:
    if k % 2 == 0:
        k += 1  # stop after a negative term so the sum is a lower bound
    s = Fraction(1)
    t = Fraction(1)
    for i in range(1, k + 1):
        t /= i
        s += -t if i % 2 else t
    return s, t / (k + 1)


def _make_constants() -> dict[str, RealValue]:
    c: dict[str, RealValue] = {}
    for d in range(1, 8):
        c[f"alpha{d}"] = alpha_root(d)
    c["phi"] = AlgebraicReal([-1, -1, 1], 1, 2, name="phi")
    c["inv_phi"] = AlgebraicReal([-1, 1, 1], 0, 1, name="inv_phi")
    c["sqrt2"] = AlgebraicReal([-2, 0, 1], 1, 2, name="sqrt2")
    c["sqrt3"] = AlgebraicReal([-3, 0, 1], 1, 2, name="sqrt3")
    c["sqrt6"] = AlgebraicReal([-6, 0, 1], 2, 3, name="sqrt6")
    c["sqrt13_half"] = AlgebraicReal([-3, -1, 1], 2, 3, name="sqrt13_half")  # (1+sqrt13)/2
    c["one_plus_sqrt6"] = AlgebraicReal([-5, -2, 1], 3, 4, name="one_plus_sqrt6")
    c["e"] = SeriesConstant(_e_series, "e")
    c["inv_e"] = SeriesConstant(_inv_e_series, "inv_e")
    return c


CONSTANTS = _make_constants()


def named_constant(tag: str) -> RealValue:
    try:
        return CONSTANTS[tag]
    except KeyError:
        raise KeyError(f"unknown constant tag {tag!r}; known: {sorted(CONSTANTS)}") from None


# ---------------------------------------------------------------------------
# distance to the nearest integer


def dist_to_int(beta: RealValue | Fraction | int, a: int, bits: int | None = None) -> ExtReal:
    """Rigorous enclosure of ||beta * a||.

    Precision auto-escalates to bits(a) + 64 guard bits unless overridden.
    Raises IndeterminateError only if the enclosure straddles 1/2 so wide
    that the distance is meaningless (cannot happen at default precision
    unless beta*a is badly conditioned against the half-integer grid).
    """
    a = int(a)
    if isinstance(beta, (int, Fraction)):
        prod_ = ExtReal.exact(Fraction(beta) * a)
    else:
        p = (bits if bits is not None else 64) + abs(a).bit_length() + 2
        enc = beta.enclosure(p)
        prod_ = enc * ExtReal.exact(a)
    v = prod_.value
    n = v.__floor__()
    fr = v - n  # in [0,1)
    if fr > Fraction(1, 2):
        d = 1 - fr
    else:
        d = fr
    err = prod_.error
    if d - err < Fraction(1, 4) < d + err:
        # enclosure covers both sides of the quarter band: fine, keep it
        pass
    lo = max(Fraction(0), d - err)
    hi = min(Fraction(1, 2), d + err)
    if lo > hi:
        lo, hi = hi, lo
    return ExtReal((lo + hi) / 2, (hi - lo) / 2)


# ---------------------------------------------------------------------------
# decay classification


@dataclass
class DecayReport:
    frequency: str
    sequence: str
    k_range: tuple[int, int]
    samples: list[tuple[int, ExtReal]]
    classification: str  # decays_geometric | non_decaying | indeterminate
    fitted_rate: float | None = None
    tail_max: float | None = None
    tail_above_ratio: float | None = None
    indeterminate_count: int = 0

    def to_json(self) -> str:
        payload = {
            "frequency": self.frequency,
            "sequence": self.sequence,
            "k_range": list(self.k_range),
            "classification": self.classification,
            "fitted_rate": self.fitted_rate,
            "tail_max": self.tail_max,
            "tail_above_ratio": self.tail_above_ratio,
            "indeterminate_count": self.indeterminate_count,
            "samples": [[k, s.decimal_str(12)] for k, s in self.samples],
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def classify_decay(
    beta: RealValue | Fraction,
    seq,
    k_range: tuple[int, int] | None = None,
    *,
    slope_threshold: float = 0.05,
    tail_eps: float = 1e-3,
    nondecay_level: float = 0.05,
    nondecay_ratio: float = 0.20,
    tail_fraction: float = 0.25,
) -> DecayReport:
    """Classify the behavior of ||beta * a_k|| over an index window.

    decays_geometric: least-squares slope of log dist below -slope_threshold
    and every tail sample below tail_eps.  non_decaying: at least
    nondecay_ratio of the tail samples above nondecay_level.  Anything else
    is indeterminate.  The classification is about the window only.
    """
    if isinstance(beta, (int, Fraction)):
        beta = ExactReal(beta)
    n_terms = len(seq)
    if k_range is None:
        k_range = (min(20, max(2, n_terms // 4)), min(150, n_terms))
    k_lo, k_hi = k_range
    if not (1 <= k_lo < k_hi <= n_terms):
        raise ValueError(f"window {k_range} outside materialized range 1..{n_terms}")

    samples: list[tuple[int, ExtReal]] = []
    indeterminate = 0
    for k in range(k_lo, k_hi + 1):
        s = dist_to_int(beta, seq.term(k))
        if s.value > 0 and s.error > s.value / 10:
            indeterminate += 1
        samples.append((k, s))

    floats = [(k, float(s.value)) for k, s in samples]
    tail_n = max(3, int(math.ceil(tail_fraction * len(floats))))
    tail = [v for _, v in floats[-tail_n:]]
    tail_max = max(tail)
    above = sum(1 for v in tail if v > nondecay_level) / len(tail)

    xs = [k for k, _ in floats]
    ys = [math.log(max(v, 1e-320)) for _, v in floats]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    denom = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom if denom else 0.0

    if slope < -slope_threshold and tail_max < tail_eps and indeterminate == 0:
        cls = "decays_geometric"
    elif above >= nondecay_ratio:
        cls = "non_decaying"
    else:
        cls = "indeterminate"
    return DecayReport(
        frequency=beta.name,
        sequence=getattr(seq, "name", "sequence"),
        k_range=(k_lo, k_hi),
        samples=samples,
        classification=cls,
        fitted_rate=slope,
        tail_max=tail_max,
        tail_above_ratio=above,
        indeterminate_count=indeterminate,
    )


# ---------------------------------------------------------------------------
# nearest-integer sequences and coefficient recovery


def _nearest_int(beta: RealValue, a: int, bits: int = 64) -> int:
    enc = beta.enclosure(bits + abs(int(a)).bit_length() + 2) * ExtReal.exact(int(a))
    v = enc.value
    n = (v + Fraction(1, 2)).__floor__()
    # reject an ambiguous tie: the enclosure may not straddle a half-integer
    if not (abs(v - n) + enc.error < Fraction(1, 2)):
        raise IndeterminateError(f"nearest integer to {beta.name}*{a} is ambiguous")
    return int(n)


@dataclass
class NearestIntegerSequence:
    frequency: str
    sequence: str
    terms: list[int]
    residual_recurrence_index: int | None  # first index from which the
    # source recurrence holds exactly through the end; None if never

    def satisfies_from(self) -> int | None:
        return self.residual_recurrence_index


def nearest_integer_sequence(beta: RealValue | Fraction, seq, upto: int | None = None) -> NearestIntegerSequence:
    """b_n = nearest integer to beta*a_n, plus where b starts obeying the
    recurrence of a exactly."""
    if isinstance(beta, (int, Fraction)):
        beta = ExactReal(beta)
    n = upto if upto is not None else len(seq)
    b = [_nearest_int(beta, seq.term(k)) for k in range(1, n + 1)]
    spec = getattr(seq, "spec", None)
    first = None
    if spec is not None:
        order, coeffs = spec.order, spec.coefficients
        ok_from = None
        for i in range(order + 1, n + 1):
            pred = sum(c * b[i - 1 - j - 1] for j, c in enumerate(coeffs))
            if b[i - 1] == pred:
                if ok_from is None:
                    ok_from = i
            else:
                ok_from = None
        first = ok_from
    return NearestIntegerSequence(beta.name, getattr(seq, "name", "sequence"), b, first)


def recover_coefficients(
    beta: RealValue,
    base_alg: AlgebraicReal,
    seq,
    k: int | None = None,
) -> tuple[int, int, int] | None:
    """Recover (a0, a1, a2) with beta = a0 + a1*alpha + a2*alpha^2 from the
    nearest-integer images of three consecutive large terms.

    Returns None (rejection) when the linear system is non-integral, the
    recovered combination does not reproduce beta, or the decay check fails.
    """
    n = len(seq)
    if k is None:
        k = min(n - 2, 60)
    if k < 3:
        raise ValueError("sequence too short for recovery")
    rows = []
    rhs = []
    try:
        for t in (k, k + 1, k + 2):
            rows.append((seq.term(t), seq.term(t - 1), seq.term(t - 2)))
            rhs.append(_nearest_int(beta, seq.term(t)))
    except IndeterminateError:
        return None
    det = _det3(rows)
    if det == 0:
        return None
    sol = []
    for col in range(3):
        mod = [list(r) for r in rows]
        for i in range(3):
            mod[i][col] = rhs[i]
        d = Fraction(_det3(mod), det)
        if d.denominator != 1:
            return None
        sol.append(int(d))
    a0, a1, a2 = sol
    # confirm the reconstruction and the decay behavior
    recon = poly_in(base_alg, (a0, a1, a2))
    diff = (beta.enclosure(80) - recon.enclosure(80)).abs_()
    if not diff.hi < Fraction(1, 1 << 40):
        return None
    window = (max(10, min(20, len(seq) // 3)), min(90, len(seq)))
    rep = classify_decay(beta, seq, window)
    if rep.classification != "decays_geometric":
        return None
    return (a0, a1, a2)


def recover_quadratic(beta: RealValue, gamma: RealValue, seq, k: int | None = None) -> tuple[int, int] | None:
    """Degree-2 variant: beta = a0 + a1*gamma recovered from a_n and the
    nearest integers to gamma*a_n."""
    n = len(seq)
    if k is None:
        k = min(n - 1, 60)
    try:
        rows = [(seq.term(t), _nearest_int(gamma, seq.term(t))) for t in (k, k + 1)]
        rhs = [_nearest_int(beta, seq.term(t)) for t in (k, k + 1)]
    except IndeterminateError:
        return None
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if det == 0:
        return None
    d0 = Fraction(rhs[0] * rows[1][1] - rows[0][1] * rhs[1], det)
    d1 = Fraction(rows[0][0] * rhs[1] - rhs[0] * rows[1][0], det)
    if d0.denominator != 1 or d1.denominator != 1:
        return None
    a0, a1 = int(d0), int(d1)
    recon = DerivedReal(
        lambda bits: gamma.enclosure(bits + abs(a1).bit_length() + 4) * ExtReal.exact(a1) + ExtReal.exact(a0),
        name=f"{a0}+{a1}*{gamma.name}",
    )
    diff = (beta.enclosure(80) - recon.enclosure(80)).abs_()
    if not diff.hi < Fraction(1, 1 << 40):
        return None
    window = (max(10, min(20, len(seq) // 3)), min(90, len(seq)))
    if classify_decay(beta, seq, window).classification != "decays_geometric":
        return None
    return (a0, a1)


def _det3(rows) -> int:
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def find_multiplier(beta: RealValue, seq, d_max: int = 64, k_range=None) -> int | None:
    """Smallest positive integer d such that ||d*beta*a_k|| decays
    geometrically on the window; None if no d <= d_max works."""
    for d in range(1, d_max + 1):
        rep = classify_decay(scaled(beta, d), seq, k_range)
        if rep.classification == "decays_geometric":
            return d
    return None
