"""Weyl sums, FFT spectral scans, and circle histograms.

The phase {beta * v} is never accumulated as a running float: beta is
reduced to a fixed-point integer A ~ beta * 2^S with S >= bits(max v) + 72,
and A*v mod 2^S is computed exactly (vectorized 16-bit limb arithmetic in
uint64 for machine-size values, Python big ints otherwise).  Binning uses
the same integer word, so histograms are bit-for-bit deterministic.
"""

from __future__ import annotations

import cmath
import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .numeration import ReplacementMap, verify_signature
from .precision import ExactReal, RealValue
from .seqcore import SequenceTable

__all__ = [
    "WeylSeries",
    "FourierSpectrum",
    "CircleHistogram",
    "beta_fixed_point",
    "phase_fracs",
    "bin_indices",
    "frac_of_product",
    "weyl_direct",
    "weyl_recurrence",
    "fft_scan",
    "histogram",
    "histogram_from_fracs",
    "fourier_coeffs",
    "star_discrepancy",
    "geometric_checkpoints",
    "FFT_GRID_CAP",
]

FFT_GRID_CAP = 1 << 26
_CHUNK = 1 << 20


def _as_real(beta) -> RealValue:
    if isinstance(beta, RealValue):
        return beta
    return ExactReal(Fraction(beta))


def beta_fixed_point(beta, bits: int) -> tuple[int, int]:
    """(A, S): integer A with |beta - A/2^S| <= 2^(1-S), S >= bits, S % 16 == 0."""
    S = ((max(bits, 80) + 15) // 16) * 16
    enc = _as_real(beta).enclosure(S)
    A = round(enc.value * (1 << S))
    return A, S


def frac_of_product(beta, v: int, guard_bits: int = 64) -> float:
    """{beta * v} for a single (possibly huge) integer v, exactly reduced."""
    v = int(v)
    A, S = beta_fixed_point(beta, abs(v).bit_length() + guard_bits)
    r = (A * v) % (1 << S)
    return r / float(1 << S)


def _fixed_point_words(A: int, S: int, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(hi, lo) words of A*v mod 2^S, S <= 128: value = (hi<<64 | lo) mod 2^S.

    16-bit limbs of A times v stay below 2^63 for v < 2^47.
    """
    if S > 128:
        raise ValueError("fixed-point kernel supports S <= 128")
    v = vals.astype(np.uint64)
    w_lo = np.zeros(len(v), dtype=np.uint64)
    w_hi = np.zeros(len(v), dtype=np.uint64)
    Amod = A % (1 << S)
    for i in range(S // 16):
        piece = np.uint64((Amod >> (16 * i)) & 0xFFFF)
        if piece == 0:
            continue
        prod = piece * v
        shift = 16 * i
        if shift < 64:
            addlo = (prod << np.uint64(shift)) if shift else prod
            new_lo = w_lo + addlo
            carry = (new_lo < addlo).astype(np.uint64)
            w_lo = new_lo
            spill = (prod >> np.uint64(64 - shift)) if shift else np.uint64(0)
            w_hi = w_hi + carry + spill
        else:
            w_hi = w_hi + (prod << np.uint64(shift - 64))
    if S > 64:
        w_hi &= np.uint64((1 << (S - 64)) - 1)
    else:
        w_hi = np.zeros_like(w_hi)
        w_lo &= np.uint64((1 << S) - 1)
    return w_hi, w_lo


def _kernel_ready(vals: np.ndarray) -> bool:
    return vals.dtype.kind in "iu" and len(vals) > 0 and int(vals.min()) >= 0 \
        and int(vals.max()) < (1 << 47)


def phase_fracs(beta, values) -> np.ndarray:
    """{beta * v} as float64 for every v; exact integer reduction underneath."""
    vals = np.asarray(values)
    if _kernel_ready(vals):
        A, S = beta_fixed_point(beta, int(vals.max()).bit_length() + 72)
        out = np.empty(len(vals), dtype=np.float64)
        for start in range(0, len(vals), _CHUNK):
            hi, lo = _fixed_point_words(A, S, vals[start:start + _CHUNK])
            out[start:start + _CHUNK] = (
                hi.astype(np.float64) * (2.0 ** (64 - S))
                + lo.astype(np.float64) * (2.0 ** -S)
            )
        return out
    # big-int fallback
    mx = max(abs(int(v)) for v in vals) if len(vals) else 1
    A, S = beta_fixed_point(beta, mx.bit_length() + 72)
    mod = 1 << S
    scale = 1.0 / mod
    return np.asarray([((A * int(v)) % mod) * scale for v in vals], dtype=np.float64)


def bin_indices(beta, values, B: int) -> np.ndarray:
    """floor({beta*v} * B) with pure integer arithmetic (B a power of two)."""
    if B & (B - 1):
        raise ValueError("bin count must be a power of two")
    logb = B.bit_length() - 1
    vals = np.asarray(values)
    if _kernel_ready(vals):
        A, S = beta_fixed_point(beta, int(vals.max()).bit_length() + 72)
        out = np.empty(len(vals), dtype=np.int64)
        for start in range(0, len(vals), _CHUNK):
            hi, _ = _fixed_point_words(A, S, vals[start:start + _CHUNK])
            out[start:start + _CHUNK] = (hi >> np.uint64(S - 64 - logb)).astype(np.int64)
        return out
    mx = max(abs(int(v)) for v in vals) if len(vals) else 1
    A, S = beta_fixed_point(beta, mx.bit_length() + 72)
    mod = 1 << S
    return np.asarray([(((A * int(v)) % mod) << logb) >> S for v in vals], dtype=np.int64)


# ---------------------------------------------------------------------------


@dataclass
class WeylSeries:
    frequency: str
    checkpoints: list[tuple[int, complex]]
    final_n: int

    @property
    def final_value(self) -> complex:
        return self.checkpoints[-1][1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "frequency": self.frequency,
                "final_n": self.final_n,
                "checkpoints": [
                    {"n": n, "re": z.real, "im": z.imag, "abs": abs(z)}
                    for n, z in self.checkpoints
                ],
            },
            sort_keys=True,
            indent=2,
        )


@dataclass
class FourierSpectrum:
    grid_size: int
    magnitudes: np.ndarray  # normalized |f(j/M)|/T for j = 0..M//2
    term_count: int
    source: str

    def magnitude(self, j: int) -> float:
        j %= self.grid_size
        half = self.grid_size // 2
        return float(self.magnitudes[j if j <= half else self.grid_size - j])

    def top_peaks(self, k: int = 5, exclude_dc: bool = True) -> list[tuple[float, float]]:
        """Largest magnitudes as (x, magnitude), x in (0, 1/2] half-grid.

        The spectrum of an integer sequence is symmetric, |f(1-x)| = |f(x)|,
        so each listed x stands for the mirror pair {x, 1-x}.
        """
        mags = self.magnitudes.copy()
        if exclude_dc:
            mags[0] = 0.0
        order = np.argsort(mags)[::-1][:k]
        return [(j / self.grid_size, float(mags[j])) for j in order]


@dataclass
class CircleHistogram:
    bin_count: int
    counts: np.ndarray
    total: int
    frequency: str
    source: str

    def densities(self) -> np.ndarray:
        return self.counts * (self.bin_count / self.total)

    def max_uniform_deviation(self) -> float:
        return float(np.abs(self.densities() - 1.0).max())

    def to_csv_rows(self) -> Iterable[tuple[int, int]]:
        return enumerate(self.counts.tolist())


def geometric_checkpoints(n: int, ratio: int = 2, start: int = 1) -> list[int]:
    out = []
    v = start
    while v < n:
        out.append(v)
        v *= ratio
    out.append(n)
    return out


def _exp_phases(fr: np.ndarray) -> np.ndarray:
    return np.exp((2j * np.pi) * fr)


def weyl_direct(values, beta, checkpoints: Sequence[int] | None = None,
                name: str | None = None) -> WeylSeries:
    """x_N = (1/N) sum_{i<N} e(beta * values[i]) at each checkpoint N.

    Values are consumed positionally (index 0 is the first entry).  Chunked
    pairwise summation keeps the accumulation error near machine epsilon.
    """
    vals = np.asarray(values) if not isinstance(values, np.ndarray) else values
    n_total = len(vals)
    cps = sorted(set(checkpoints)) if checkpoints else geometric_checkpoints(n_total)
    if cps[-1] > n_total:
        raise ValueError(f"checkpoint {cps[-1]} beyond stream length {n_total}")
    fr = phase_fracs(beta, vals[:cps[-1]])
    out: list[tuple[int, complex]] = []
    acc = 0 + 0j
    prev = 0
    for n in cps:
        block = fr[prev:n]
        # chunked pairwise sums, then one fsum across chunk results
        sums = [np.sum(_exp_phases(block[s:s + _CHUNK]))
                for s in range(0, len(block), _CHUNK)]
        acc += complex(math.fsum(s.real for s in sums), math.fsum(s.imag for s in sums))
        prev = n
        out.append((n, acc / n))
    bname = _as_real(beta).name if not isinstance(beta, RealValue) else beta.name
    return WeylSeries(name or bname, out, cps[-1])


def weyl_recurrence(rmap: ReplacementMap, beta, upto_index: int,
                    check_signature: bool = True) -> list[tuple[int, int, complex]]:
    """x at the base checkpoints n = a_k for k <= upto_index, computed by
    unraveling S(n) = S(a_j) + e(beta*b_j) * S(n - a_j) (a_j the largest
    base term below n) instead of enumerating every n.

    Returns [(k, a_k, x_{a_k})].
    """
    source, target = rmap.source, rmap.target
    if upto_index > len(source):
        raise ValueError("upto_index beyond materialized base")
    if check_signature:
        verify_signature(source, (2, min(len(source), max(upto_index, 3))))

    beta = _as_real(beta)
    efactor: dict[int, complex] = {}

    def e_target(idx: int) -> complex:
        if idx not in efactor:
            t = frac_of_product(beta, target.term(idx))
            efactor[idx] = cmath.exp(2j * math.pi * t)
        return efactor[idx]

    terms = source._terms
    memo: dict[int, complex] = {0: 0j, 1: 1 + 0j}

    def unnormalized(n: int) -> complex:
        stack = [n]
        while stack:
            m = stack[-1]
            if m in memo:
                stack.pop()
                continue
            # largest base term strictly below m is terms[j-1], 1-indexed j
            j = bisect_left(terms, m)
            rest = m - terms[j - 1]
            if rest in memo and terms[j - 1] in memo:
                memo[m] = memo[terms[j - 1]] + e_target(j) * memo[rest]
                stack.pop()
            else:
                if terms[j - 1] not in memo:
                    stack.append(terms[j - 1])
                if rest not in memo:
                    stack.append(rest)
        return memo[n]

    out = []
    for k in range(1, upto_index + 1):
        ak = source.term(k)
        out.append((k, ak, unnormalized(ak) / ak))
    return out


def fft_scan(seq: SequenceTable | np.ndarray, T: int | None = None,
             M: int | None = None, name: str | None = None) -> FourierSpectrum:
    """Normalized magnitudes of f(j/M) = sum_{n<=T} e(a_n j/M) on the grid.

    Builds the multiplicity vector c[v] = #{n <= T : a_n = v} and runs one
    real FFT; the grid auto-selects the next power of two above the largest
    value (capped at 2^26).
    """
    if isinstance(seq, SequenceTable):
        vals = seq.values_array()
        src = seq.name
    else:
        vals = np.asarray(seq, dtype=np.int64)
        src = name or "values"
    if T is not None:
        vals = vals[:T]
    T = len(vals)
    if T == 0:
        raise ValueError("empty value stream")
    if vals.min() < 0:
        raise ValueError("fft_scan needs nonnegative values")
    mx = int(vals.max())
    if M is None:
        M = 1 << (mx + 1).bit_length()
        if M > FFT_GRID_CAP:
            raise ValueError(
                f"required grid {M} exceeds cap {FFT_GRID_CAP}; "
                "scan a shorter prefix or rescale the sequence")
    elif M & (M - 1):
        raise ValueError("grid size must be a power of two")
    if mx >= M:
        raise ValueError(f"grid {M} too small for max value {mx}")
    counts = np.bincount(vals, minlength=M).astype(np.float64)
    mags = np.abs(np.fft.rfft(counts)) / T
    return FourierSpectrum(M, mags, T, src)


def histogram(values, beta, bins: int = 512, N: int | None = None,
              name: str | None = None, source: str = "values") -> CircleHistogram:
    vals = np.asarray(values) if not isinstance(values, np.ndarray) else values
    if N is not None:
        vals = vals[:N]
    idx = bin_indices(beta, vals, bins)
    counts = np.bincount(idx, minlength=bins)
    bname = name or (_as_real(beta).name if not isinstance(beta, RealValue) else beta.name)
    return CircleHistogram(bins, counts, len(vals), bname, source)


def histogram_from_fracs(fr: np.ndarray, bins: int, frequency: str = "fracs",
                         source: str = "values") -> CircleHistogram:
    idx = np.minimum((fr * bins).astype(np.int64), bins - 1)
    return CircleHistogram(bins, np.bincount(idx, minlength=bins), len(fr), frequency, source)


def fourier_coeffs(values, beta, d_max: int, N: int | None = None) -> np.ndarray:
    """mu_hat_N(d) for d = 1..d_max in a single pass over the value stream:
    the phase is computed once and powered up chunk-wise."""
    vals = np.asarray(values) if not isinstance(values, np.ndarray) else values
    if N is not None:
        vals = vals[:N]
    n = len(vals)
    acc = np.zeros(d_max, dtype=np.complex128)
    for start in range(0, n, _CHUNK):
        fr = phase_fracs(beta, vals[start:start + _CHUNK])
        z = _exp_phases(fr)
        w = z.copy()
        for d in range(d_max):
            acc[d] += w.sum()
            if d + 1 < d_max:
                w *= z
    return acc / n


def star_discrepancy(fr: np.ndarray) -> float:
    """sup_x |#{v <= x}/N - x| over the sorted circle values (exact for the
    empirical measure against the uniform one)."""
    srt = np.sort(np.asarray(fr, dtype=np.float64))
    n = len(srt)
    k = np.arange(1, n + 1, dtype=np.float64)
    d_plus = float(np.max(k / n - srt))
    d_minus = float(np.max(srt - (k - 1) / n))
    return max(d_plus, d_minus)
