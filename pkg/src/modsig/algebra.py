"""Polynomial root toolkit: certified isolation of all complex roots,
unit-circle location counting, Pisot detection, and closed forms for
linear recurrences.

Roots are approximated by float simultaneous iteration (Aberth) and then
certified with exact rational arithmetic: around approximations z_1..z_n of
a squarefree monic p, the disks of radius n*|p(z_i)| / prod_{j!=i}|z_i-z_j|
cover all roots, and pairwise-disjoint disks contain exactly one root each.
Cyclotomic factors (all roots exactly on the unit circle) are stripped by
exact division before any counting, so on-circle roots never poison the
in/out certification.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

import numpy as np

from .precision import ExtReal
from .seqcore import SequenceTable

__all__ = [
    "PolynomialSpec",
    "RootEnclosure",
    "RootSet",
    "CertificationError",
    "isolate_roots",
    "count_outside_unit",
    "count_unit_circle",
    "is_pisot",
    "closed_form",
    "ClosedFormDecomposition",
    "trinomial",
    "strip_cyclotomic_factors",
    "CBall",
]


class CertificationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# exact integer/rational polynomial helpers (coefficients low -> high)


def _norm(p: Sequence[int]) -> tuple[int, ...]:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _deg(p) -> int:
    return len(p) - 1


def _deriv(p):
    return _norm([i * p[i] for i in range(1, len(p))]) if len(p) > 1 else (0,)


def _eval_frac(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _content(p) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, abs(c))
    return g or 1


def _primitive(p):
    g = _content(p)
    return tuple(c // g for c in p)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _norm(out)


def _poly_divmod_q(a, b):
    """Quotient/remainder over the rationals."""
    a = [Fraction(c) for c in a]
    b = [Fraction(c) for c in b]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] = factor
        for i in range(len(b)):
            a[shift + i] -= factor * b[i]
        a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _poly_divide_exact(a, b):
    """a // b over Z when the division is exact, else None."""
    q, r = _poly_divmod_q(a, b)
    if any(r):
        return None
    if any(c.denominator != 1 for c in q):
        return None
    return _norm([int(c) for c in q])


def poly_gcd(a, b):
    """Exact primitive gcd over Z via rational Euclid."""
    fa = [Fraction(c) for c in _norm(a)]
    fb = [Fraction(c) for c in _norm(b)]
    if fa == [0]:
        fa, fb = fb, fa
    while not (len(fb) == 1 and fb[0] == 0):
        _, r = _poly_divmod_q(fa, fb)
        fa, fb = fb, r
    den = 1
    for c in fa:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = _norm([int(c * den) for c in fa])
    g = _primitive(ints)
    if g[-1] < 0:
        g = tuple(-c for c in g)
    return g


def squarefree_decomposition(p) -> list[tuple[tuple[int, ...], int]]:
    """Yun's algorithm: [(factor, multiplicity)], factors squarefree and
    pairwise coprime, p ~ prod factor^mult up to content and sign."""
    p = _primitive(_norm(p))
    if _deg(p) < 1:
        return []
    g = poly_gcd(p, _deriv(p))
    if _deg(g) == 0:
        return [(p, 1)]
    w = _poly_divide_exact(p, g)
    out = []
    mult = 1
    while _deg(w) > 0:
        y = poly_gcd(w, g)
        f = _poly_divide_exact(w, y)
        if f is not None and _deg(f) > 0:
            out.append((_primitive(f), mult))
        w = y
        nxt = _poly_divide_exact(g, y)
        g = nxt if nxt is not None else (1,)
        mult += 1
    return out


def _phi(n: int) -> int:
    out, m, q = n, n, 2
    while q * q <= m:
        if m % q == 0:
            while m % q == 0:
                m //= q
            out -= out // q
        q += 1
    if m > 1:
        out -= out // m
    return out


_cyclo_cache: dict[int, tuple[int, ...]] = {}


def cyclotomic(n: int) -> tuple[int, ...]:
    if n in _cyclo_cache:
        return _cyclo_cache[n]
    p = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            p = _poly_divide_exact(p, cyclotomic(d))
    _cyclo_cache[n] = _norm(p)
    return _cyclo_cache[n]


def strip_cyclotomic_factors(p, limit: int = 120) -> tuple[tuple[int, ...], list[tuple[int, int]]]:
    """Divide out every cyclotomic factor (exactly); returns the remaining
    polynomial and [(n, multiplicity)] of removed factors."""
    p = _norm(p)
    removed = []
    for n in range(1, limit + 1):
        if _phi(n) > _deg(p):
            continue
        count = 0
        while _deg(p) >= _phi(n):
            q = _poly_divide_exact(p, cyclotomic(n))
            if q is None:
                break
            p = q
            count += 1
        if count:
            removed.append((n, count))
    return p, removed


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialSpec:
    coefficients: tuple[int, ...]  # low -> high
    name: str = "p"

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _norm(self.coefficients))
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    @property
    def degree(self) -> int:
        return _deg(self.coefficients)

    @property
    def monic(self) -> bool:
        return self.coefficients[-1] == 1


def trinomial(d: int) -> PolynomialSpec:
    """x^d - x^{d-1} - 1."""
    if d < 2:
        raise ValueError("trinomial needs d >= 2")
    return PolynomialSpec((-1,) + (0,) * (d - 2) + (-1, 1), name=f"trinomial_{d}")


@dataclass(frozen=True)
class RootEnclosure:
    center: tuple[Fraction, Fraction]
    radius: Fraction
    multiplicity: int
    location: str  # inside | outside | on_unit | ambiguous

    def center_complex(self) -> complex:
        return complex(float(self.center[0]), float(self.center[1]))

    def modulus(self) -> float:
        return abs(self.center_complex())


@dataclass
class RootSet:
    enclosures: list[RootEnclosure]
    degree: int

    def count(self, location: str) -> int:
        return sum(e.multiplicity for e in self.enclosures if e.location == location)

    @property
    def count_outside_unit(self) -> int:
        return self.count("outside")

    @property
    def count_ambiguous(self) -> int:
        return self.count("ambiguous")

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "re": float(e.center[0]),
                "im": float(e.center[1]),
                "radius": float(e.radius),
                "multiplicity": e.multiplicity,
                "location": e.location,
            }
            for e in self.enclosures
        ]


def _sqrt_upper(x: Fraction) -> Fraction:
    if x < 0:
        raise ValueError("negative")
    if x == 0:
        return Fraction(0)
    s = 1 << 64
    a = isqrt(x.numerator * x.denominator * s * s)
    return Fraction(a + 1, x.denominator * s)


def _sqrt_lower(x: Fraction) -> Fraction:
    if x <= 0:
        return Fraction(0)
    s = 1 << 64
    a = isqrt(x.numerator * x.denominator * s * s)
    return Fraction(a, x.denominator * s)


def _aberth(coeffs, iters: int = 400) -> np.ndarray:
    n = _deg(coeffs)
    c = np.array(coeffs, dtype=np.float64)
    lead = abs(coeffs[-1])
    radius = (1 + max(abs(x) for x in coeffs[:-1]) / lead) ** (1.0 / n)
    z = radius * np.exp(2j * np.pi * (np.arange(n) + 0.376) / n)
    pp = np.polynomial.polynomial
    der = pp.polyder(c)
    for _ in range(iters):
        pv = pp.polyval(z, c)
        dv = pp.polyval(z, der)
        dv = np.where(dv == 0, 1e-300, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = (1.0 / diff).sum(axis=1)
        dz = w / (1 - w * s)
        z = z - dz
        if np.max(np.abs(dz)) < 1e-15:
            break
    return z


def _to_dyadic_complex(z: complex, bits: int) -> tuple[Fraction, Fraction]:
    q = 1 << bits
    return Fraction(round(z.real * q), q), Fraction(round(z.imag * q), q)


def _eval_complex_frac(p, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    re, im = Fraction(0), Fraction(0)
    for c in reversed(p):
        re, im = re * a - im * b + c, re * b + im * a
    return re, im


def _newton_refine(p, dp, z: tuple[Fraction, Fraction], steps: int, bits: int) -> tuple[Fraction, Fraction]:
    a, b = z
    q = 1 << bits
    for _ in range(steps):
        pre, pim = _eval_complex_frac(p, a, b)
        dre, dim = _eval_complex_frac(dp, a, b)
        den = dre * dre + dim * dim
        if den == 0:
            break
        sa = (pre * dre + pim * dim) / den
        sb = (pim * dre - pre * dim) / den
        a, b = a - sa, b - sb
        a = Fraction(round(a * q), q)
        b = Fraction(round(b * q), q)
    return a, b


def _certify_factor(factor, approx: list[tuple[Fraction, Fraction]]) -> list[Fraction] | None:
    """Disjoint Smith disks -> list of certified radius upper bounds."""
    n = _deg(factor)
    lead = factor[-1]
    rads: list[Fraction] = []
    for i, (a, b) in enumerate(approx):
        pre, pim = _eval_complex_frac(factor, a, b)
        num2 = Fraction(pre * pre + pim * pim, lead * lead)
        den2 = Fraction(1)
        for j, (a2, b2) in enumerate(approx):
            if j == i:
                continue
            den2 *= (a - a2) ** 2 + (b - b2) ** 2
        if den2 == 0:
            return None
        r = Fraction(n) * _sqrt_upper(num2) / _sqrt_lower(den2)
        rads.append(r)
    for i in range(len(approx)):
        for j in range(i + 1, len(approx)):
            d2 = (approx[i][0] - approx[j][0]) ** 2 + (approx[i][1] - approx[j][1]) ** 2
            if d2 <= (rads[i] + rads[j]) ** 2:
                return None
    return rads


def _locate(center: tuple[Fraction, Fraction], radius: Fraction) -> str:
    m2 = center[0] ** 2 + center[1] ** 2
    if m2 > (1 + radius) ** 2:
        return "outside"
    if m2 < (1 - radius) ** 2:
        return "inside"
    return "ambiguous"


def isolate_roots(p: PolynomialSpec | Sequence[int], bits: int = 64,
                  max_bits: int = 4096) -> RootSet:
    """Certified enclosures of all complex roots (multiplicities from exact
    squarefree decomposition).  Escalates working precision until the radii
    drop below 2^-bits and the disks are pairwise disjoint."""
    coeffs = p.coefficients if isinstance(p, PolynomialSpec) else _norm(p)
    if _deg(coeffs) < 1:
        raise ValueError("constant polynomial")
    if coeffs[0] == 0:
        raise ValueError("zero constant term; factor out x first")
    enclosures: list[RootEnclosure] = []
    for factor, mult in squarefree_decomposition(coeffs):
        if _deg(factor) == 0:
            continue
        dp = _deriv(factor)
        floats = _aberth(factor)
        work = max(64, bits)
        while True:
            approx = [_to_dyadic_complex(complex(z), work) for z in floats]
            approx = [_newton_refine(factor, dp, z, steps=6, bits=work) for z in approx]
            rads = _certify_factor(factor, approx)
            if rads is not None and max(rads) < Fraction(1, 1 << bits):
                break
            work *= 2
            if work > max_bits:
                raise CertificationError(
                    f"cannot certify roots of {factor} below 2^-{bits} within "
                    f"{max_bits} working bits")
        for z, r in zip(approx, rads):
            enclosures.append(RootEnclosure(z, r, mult, _locate(z, r)))
    return RootSet(enclosures, _deg(coeffs))


def count_unit_circle(p: PolynomialSpec | Sequence[int]) -> int:
    """Number of roots exactly on |z| = 1 coming from cyclotomic factors."""
    coeffs = p.coefficients if isinstance(p, PolynomialSpec) else _norm(p)
    _, removed = strip_cyclotomic_factors(coeffs)
    return sum(_phi(n) * m for n, m in removed)


def count_outside_unit(p: PolynomialSpec | Sequence[int], bits: int = 64,
                       max_bits: int = 4096) -> int:
    """Certified number of roots with |z| > 1 (with multiplicity).

    Cyclotomic factors sit exactly on the circle and are divided out
    beforehand; remaining ambiguity escalates precision and finally raises.
    """
    coeffs = p.coefficients if isinstance(p, PolynomialSpec) else _norm(p)
    stripped, _removed = strip_cyclotomic_factors(coeffs)
    if _deg(stripped) == 0:
        return 0
    work = bits
    while True:
        rs = isolate_roots(stripped, bits=work, max_bits=max_bits)
        if rs.count_ambiguous == 0:
            return rs.count_outside_unit
        work *= 2
        if work > max_bits:
            raise CertificationError(
                "a non-cyclotomic root cannot be separated from the unit circle")


def is_pisot(p: PolynomialSpec | Sequence[int], bits: int = 64) -> bool:
    """One real root > 1 and everything else strictly inside the unit disk.

    Cyclotomic factors are stripped first: their roots lie exactly on the
    circle (they are not conjugates of the dominant root in the
    minimal-polynomial sense) and would otherwise block certification.
    """
    coeffs = p.coefficients if isinstance(p, PolynomialSpec) else _norm(p)
    stripped, _ = strip_cyclotomic_factors(coeffs)
    if _deg(stripped) < 1:
        return False
    work = bits
    while True:
        rs = isolate_roots(stripped, bits=work)
        if rs.count_ambiguous == 0:
            break
        work *= 2
        if work > 4096:
            raise CertificationError("cannot resolve root moduli against the unit circle")
    outside = [e for e in rs.enclosures if e.location == "outside"]
    if len(outside) != 1 or outside[0].multiplicity != 1:
        return False
    e = outside[0]
    if rs.count("inside") + 1 != sum(enc.multiplicity for enc in rs.enclosures):
        return False
    # certify the outside root is real and > 1 by exact sign change
    a = e.center[0] - e.radius
    b = e.center[0] + e.radius
    if not a > 1:
        return False
    fa, fb = _eval_frac(stripped, a), _eval_frac(stripped, b)
    return fa == 0 or fb == 0 or (fa < 0) != (fb < 0)


# ---------------------------------------------------------------------------
# closed forms


class CBall:
    """Complex interval: two ExtReal components."""

    __slots__ = ("re", "im")

    def __init__(self, re: ExtReal, im: ExtReal):
        self.re, self.im = re, im

    @classmethod
    def from_fractions(cls, a: Fraction, b: Fraction, err: Fraction = Fraction(0)) -> "CBall":
        return cls(ExtReal(a, err), ExtReal(b, err))

    def __add__(self, o: "CBall") -> "CBall":
        return CBall(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "CBall") -> "CBall":
        return CBall(self.re - o.re, self.im - o.im)

    def __mul__(self, o: "CBall") -> "CBall":
        return CBall(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def round_to(self, bits: int) -> "CBall":
        return CBall(self.re.round_to(bits), self.im.round_to(bits))

    def abs_upper(self) -> Fraction:
        m2 = (abs(self.re.value) + self.re.error) ** 2 + (abs(self.im.value) + self.im.error) ** 2
        return _sqrt_upper(m2)

    def complex_mid(self) -> complex:
        return complex(float(self.re.value), float(self.im.value))


@dataclass
class ClosedFormDecomposition:
    roots: RootSet
    coefficients: list[complex]  # paired with roots.enclosures
    growth_orientation: str  # "powers": a_n = sum c_i root_i^n
    validated_up_to: int
    max_residual: float


def closed_form(seq: SequenceTable, check_terms: int | None = None,
                tolerance_bits: int = 32) -> ClosedFormDecomposition:
    """Solve for c_i in a_n = sum_i c_i r_i^n from the seed terms, where r_i
    are the characteristic roots, then validate the reconstruction against
    every materialized term at interval precision."""
    if seq.spec is None:
        raise ValueError("closed form needs a recurrence-backed table")
    char = list(seq.spec.char_poly())
    g = poly_gcd(char, _deriv(char))
    if _deg(g) > 0:
        raise ValueError("characteristic polynomial is not squarefree")
    L = seq.spec.order
    n_check = min(len(seq), check_terms) if check_terms else len(seq)
    need_bits = max(abs(seq.term(n_check)).bit_length(), 8) + 64 + n_check.bit_length() * 4

    rs = isolate_roots(char, bits=need_bits)
    dp = _deriv(char)
    refined = [
        _newton_refine(char, dp, e.center, steps=10, bits=need_bits + 32)
        for e in rs.enclosures
    ]

    # exact rational-complex Gaussian elimination on V c = a, rows n = 1..L
    rows: list[list[tuple[Fraction, Fraction]]] = []
    for n in range(1, L + 1):
        row = []
        for (a, b) in refined:
            pa, pb = _cpow(a, b, n)
            row.append((pa, pb))
        rows.append(row)
    rhs = [(Fraction(seq.term(n)), Fraction(0)) for n in range(1, L + 1)]
    coeffs_exact = _solve_complex(rows, rhs)

    # interval validation of the reconstruction
    err0 = Fraction(1, 1 << (need_bits + 16))
    balls = [CBall.from_fractions(a, b, err0) for a, b in refined]
    cs = [CBall.from_fractions(a, b) for a, b in coeffs_exact]
    acc = [c * b for c, b in zip(cs, balls)]  # c_i * r_i^1
    tol = Fraction(1, 1 << tolerance_bits)
    validated = 0
    max_resid = 0.0
    for n in range(1, n_check + 1):
        s = acc[0]
        for t in acc[1:]:
            s = s + t
        resid_re = s.re - ExtReal.exact(seq.term(n))
        bound = (abs(resid_re.value) + resid_re.error) + (abs(s.im.value) + s.im.error)
        if bound < tol:
            validated = n
            max_resid = max(max_resid, float(abs(resid_re.value) + abs(s.im.value)))
        else:
            break
        acc = [(t * b).round_to(need_bits + 16) for t, b in zip(acc, balls)]
    if validated < min(n_check, L + 2):
        raise CertificationError(
            f"closed form failed to reconstruct terms past index {validated}")
    return ClosedFormDecomposition(
        roots=rs,
        coefficients=[complex(float(a), float(b)) for a, b in coeffs_exact],
        growth_orientation="powers",
        validated_up_to=validated,
        max_residual=max_resid,
    )


def _cpow(a: Fraction, b: Fraction, n: int) -> tuple[Fraction, Fraction]:
    ra, rb = Fraction(1), Fraction(0)
    for _ in range(n):
        ra, rb = ra * a - rb * b, ra * b + rb * a
    return ra, rb


def _cdiv(x: tuple[Fraction, Fraction], y: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    a, b = x
    c, d = y
    den = c * c + d * d
    return ((a * c + b * d) / den, (b * c - a * d) / den)


def _solve_complex(rows, rhs):
    """Gaussian elimination over exact complex rationals."""
    n = len(rows)
    m = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: float(m[r][col][0] ** 2 + m[r][col][1] ** 2))
        if m[piv][col] == (Fraction(0), Fraction(0)):
            raise CertificationError("singular closed-form system")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col]
        for r in range(n):
            if r == col:
                continue
            f = _cdiv(m[r][col], inv)
            if f == (0, 0):
                continue
            for c in range(col, n + 1):
                fa, fb = f
                xa, xb = m[col][c]
                ya, yb = m[r][c]
                m[r][c] = (ya - (fa * xa - fb * xb), yb - (fa * xb + fb * xa))
    return [_cdiv(m[i][n], m[i][i]) for i in range(n)]
