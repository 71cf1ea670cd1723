"""Limit-distribution analytics: infinite-product Fourier coefficients for
the factorial-sum sequence, density bounds, valley/hill geometry of the
signal histogram, and preimage-split decompositions.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .weyl import CircleHistogram, histogram_from_fracs

__all__ = [
    "frac_factorial_over_e",
    "frac_factorial_times_e",
    "InfiniteProductCoeff",
    "factorial_product_coeff",
    "coeff_decay_bound_check",
    "HypothesisError",
    "density_bound_check",
    "ValleyHillReport",
    "valley_hill_analysis",
    "preimage_split",
    "scaled_copies_residual",
    "golden_step_levels",
]


# ---------------------------------------------------------------------------
# exact fractional parts of n! * e^{+-1}
#
# n!/e = A_n + (-1)^{n+1} T_n with integer A_n and the alternating tail
# T_n = 1/(n+1) - 1/((n+1)(n+2)) + ...; n!*e has the all-positive tail.
# Both tails converge factorially fast and stay exact as Fractions, so the
# fractional part of d * n! * e^{+-1} costs a handful of small-denominator
# operations no matter how large n! is.


def _tail_alternating(n: int, tol: Fraction) -> Fraction:
    term = Fraction(1, n + 1)
    total = Fraction(0)
    j = 1
    sign = 1
    while term > tol:
        total += sign * term
        j += 1
        sign = -sign
        term = term / (n + j)
    return total


def _tail_positive(n: int, tol: Fraction) -> Fraction:
    term = Fraction(1, n + 1)
    total = Fraction(0)
    j = 1
    while term > tol:
        total += term
        j += 1
        term = term / (n + j)
    return total


def frac_factorial_over_e(n: int, tol: Fraction = Fraction(1, 10 ** 30)) -> Fraction:
    """{n!/e}, exactly (up to tol, far below float resolution)."""
    t = _tail_alternating(n, tol)
    return (1 - t) if n % 2 == 0 else t


def frac_factorial_times_e(n: int, tol: Fraction = Fraction(1, 10 ** 30)) -> Fraction:
    """{n! * e} = the positive tail (it is already in (0,1) for n >= 2)."""
    t = _tail_positive(n, tol)
    return t - t.__floor__() if t >= 1 else t


@dataclass
class InfiniteProductCoeff:
    d: int
    beta_tag: str
    truncation: int
    partial_products: list[tuple[int, complex]]
    status: str  # converged | divergent_argument | undecided
    tail_bound: float | None
    cumulative_argument: float

    @property
    def value(self) -> complex:
        return self.partial_products[-1][1]

    def to_json_obj(self) -> dict:
        return {
            "d": self.d,
            "beta": self.beta_tag,
            "truncation": self.truncation,
            "status": self.status,
            "value_abs": abs(self.value),
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "tail_bound": self.tail_bound,
            "cumulative_argument": self.cumulative_argument,
        }


def factorial_product_coeff(d: int, beta_tag: str, truncation: int = 10_000) -> InfiniteProductCoeff:
    """prod_{n<=truncation} (1 + e(d * beta * n!)) / 2 for beta = 1/e or e.

    Convergence is judged from the factor arguments: strictly alternating
    signs with pair sums summable mean a convergent product; a cumulative
    argument beyond 4*pi with same-sign factors means the partial products
    spiral without settling.  The tail bound for the convergent case pairs
    consecutive factors and bounds the remainder by the first omitted pair
    plus the quadratic magnitude deficit (engineering constants, stated in
    code).
    """
    if beta_tag not in ("inv_e", "e"):
        raise ValueError("beta_tag must be 'inv_e' or 'e'")
    if d == 0:
        return InfiniteProductCoeff(0, beta_tag, truncation,
                                    [(truncation, 1 + 0j)], "converged", 0.0, 0.0)
    frac_fn = frac_factorial_over_e if beta_tag == "inv_e" else frac_factorial_times_e
    tol = Fraction(1, 10 ** 25 * max(1, abs(d)))

    prod_val = 1 + 0j
    cum_arg = 0.0
    args: list[float] = []
    checkpoints: list[tuple[int, complex]] = []
    cp_next = 1
    for n in range(1, truncation + 1):
        t = frac_fn(n, tol)
        x = float((Fraction(d) * t) % 1)
        factor = (1 + cmath.exp(2j * math.pi * x)) / 2
        prod_val *= factor
        a = cmath.phase(factor)
        args.append(a)
        cum_arg += a
        if n == cp_next or n == truncation:
            checkpoints.append((n, prod_val))
            cp_next *= 2

    tail_n = max(8, len(args) // 4)
    tail = args[-tail_n:]
    flips = sum(1 for i in range(1, len(tail)) if tail[i] * tail[i - 1] < 0)
    alternating = flips >= 0.9 * (len(tail) - 1)

    status = "undecided"
    tail_bound = None
    if alternating and abs(tail[-1]) < 0.1:
        status = "converged"
        # first omitted pair ~ pi*d*(1/T - 1/(T+1)); magnitude deficit tail
        # ~ (pi*d)^2/(2T). constants 1.5 cover the low-order corrections.
        T = truncation
        tail_bound = abs(prod_val) * 1.5 * (
            math.pi * abs(d) / (T * T) + (math.pi * d) ** 2 / (2 * T))
    elif abs(cum_arg) > 4 * math.pi and not alternating:
        status = "divergent_argument"
    return InfiniteProductCoeff(d, beta_tag, truncation, checkpoints, status,
                                tail_bound, cum_arg)


def coeff_decay_bound_check(mags, d_max: int, base: float = 0.98) -> list[tuple[int, float, float, bool]]:
    """Assert |mu_hat(d)| <= base^d; returns (d, value, bound, ok) rows."""
    rows = []
    for d in range(1, d_max + 1):
        v = float(mags[d - 1])
        bound = base ** d
        rows.append((d, v, bound, v <= bound))
    return rows


# ---------------------------------------------------------------------------
# density bound


class HypothesisError(ValueError):
    pass


def density_bound_check(hist: CircleHistogram, values: np.ndarray,
                        linear_bound: float, max_multiplicity: int) -> tuple[float, float, bool]:
    """Check a_n <= B*n and per-value multiplicity <= C exactly, then assert
    every bin density is at most 4*B*C.  Returns (max_density, bound, ok)."""
    vals = np.asarray(values)
    n_idx = np.arange(1, len(vals) + 1, dtype=np.float64)
    if np.any(vals > linear_bound * n_idx):
        k = int(np.argmax(vals > linear_bound * n_idx)) + 1
        raise HypothesisError(f"linear growth bound fails at index {k}")
    counts = np.bincount(vals.astype(np.int64))
    if counts.max() > max_multiplicity:
        v = int(np.argmax(counts))
        raise HypothesisError(
            f"value {v} appears {int(counts.max())} times > C={max_multiplicity}")
    bound = 4.0 * linear_bound * max_multiplicity
    max_density = float(hist.densities().max())
    return max_density, bound, max_density <= bound


# ---------------------------------------------------------------------------
# valley / hill geometry


@dataclass
class ValleyHillReport:
    valley_interval: tuple[int, int]  # (start_bin, length), circular
    hill_interval: tuple[int, int]
    valley_height: float
    hill_height: float
    offset_circle: float  # (valley_center - hill_center) mod 1
    offset_bins: float
    fit_residual: float  # sup |mu(x) + mu(x - offset) - 3*valley| / hill
    status: str  # ok | undecided

    def to_json_obj(self) -> dict:
        return {
            "valley_start": self.valley_interval[0],
            "valley_len": self.valley_interval[1],
            "hill_start": self.hill_interval[0],
            "hill_len": self.hill_interval[1],
            "valley_height": self.valley_height,
            "hill_height": self.hill_height,
            "offset_circle": self.offset_circle,
            "offset_bins": self.offset_bins,
            "fit_residual": self.fit_residual,
            "status": self.status,
        }


def _longest_circular_run(mask: np.ndarray) -> tuple[int, int]:
    """(start, length) of the longest circular run of True."""
    B = len(mask)
    if mask.all():
        return 0, B
    doubled = np.concatenate([mask, mask])
    best_len = 0
    best_start = 0
    run = 0
    for j in range(2 * B):
        if doubled[j]:
            run += 1
            if run > best_len and run <= B and j - run + 1 < B:
                best_len = run
                best_start = (j - run + 1) % B
        else:
            run = 0
    return best_start, best_len


def valley_hill_analysis(hist: CircleHistogram, flat_tol: float = 0.02,
                         min_run: int = 8) -> ValleyHillReport:
    """Locate the flat minimum and flat maximum runs of the histogram and
    measure their height ratio, circular offset, and the overlay residual
    of the vertically reflected hill against the valley."""
    dens = hist.densities()
    B = hist.bin_count
    dmin, dmax = float(dens.min()), float(dens.max())
    if dmax <= 0 or dmin / dmax > 0.8:
        return ValleyHillReport((0, 0), (0, 0), dmin, dmax, 0.0, 0.0,
                                float("nan"), "undecided")
    v_start, v_len = _longest_circular_run(dens <= dmin * (1 + flat_tol))
    h_start, h_len = _longest_circular_run(dens >= dmax * (1 - flat_tol))
    if v_len < min_run or h_len < min_run:
        return ValleyHillReport((v_start, v_len), (h_start, h_len), dmin, dmax,
                                0.0, 0.0, float("nan"), "undecided")
    v_idx = (v_start + np.arange(v_len)) % B
    h_idx = (h_start + np.arange(h_len)) % B
    v_height = float(dens[v_idx].mean())
    h_height = float(dens[h_idx].mean())
    v_center = (v_start + (v_len - 1) / 2.0) % B
    h_center = (h_start + (h_len - 1) / 2.0) % B
    offset_bins = (v_center - h_center) % B
    offset = offset_bins / B

    # overlay: the reflected hill shifted onto the valley should satisfy
    # mu(y) + mu(y + offset) ~ 3 * valley_height on the hill's flat run
    shift = int(round(offset_bins))
    resid = 0.0
    for j in h_idx:
        pair = dens[(j + shift) % B]
        resid = max(resid, abs(float(dens[j]) + float(pair) - 3.0 * v_height))
    return ValleyHillReport(
        (v_start, v_len), (h_start, h_len), v_height, h_height,
        offset, offset_bins, resid / h_height, "ok")


# ---------------------------------------------------------------------------
# preimage split


@dataclass
class PreimageSplit:
    total: CircleHistogram
    naturals: CircleHistogram
    eta1: CircleHistogram  # values hit twice
    eta2: CircleHistogram  # values hit once
    identity_exact: bool


def preimage_split(values: np.ndarray, beta, bins: int, N: int) -> PreimageSplit:
    """Split the value stream by preimage count: every value up to the max
    is hit once or twice; the doubly-hit ones form eta1 and the identity
    hist(stream) = hist(naturals) + eta1 must hold exactly on counts."""
    from .weyl import histogram

    vals = np.asarray(values)[:N]
    counts = np.bincount(vals.astype(np.int64))
    mx = len(counts) - 1
    twice = np.nonzero(counts == 2)[0]
    once = np.nonzero(counts == 1)[0]
    naturals = np.arange(0, mx + 1, dtype=np.int64)

    h_total = histogram(vals, beta, bins, source="stream")
    h_nat = histogram(naturals, beta, bins, source="naturals")
    h_eta1 = histogram(twice, beta, bins, source="eta1")
    h_eta2 = histogram(once, beta, bins, source="eta2")
    identity = bool(np.array_equal(h_total.counts, h_nat.counts + h_eta1.counts))
    return PreimageSplit(h_total, h_nat, h_eta1, h_eta2, identity)


# ---------------------------------------------------------------------------
# scaled copies and the golden step function


def scaled_copies_residual(hist_fine: CircleHistogram, hist_base: CircleHistogram,
                           copies: int) -> float:
    """Fold a (copies * B)-bin histogram of {(beta/copies) a_n} into `copies`
    segments and compare each against the B-bin histogram of {beta a_n}.
    Returns sup segment density deviation relative to the base maximum."""
    B = hist_base.bin_count
    if hist_fine.bin_count != copies * B:
        raise ValueError("fine histogram must have copies * B bins")
    base_d = hist_base.densities()
    segs = hist_fine.counts.reshape(copies, B)
    worst = 0.0
    for s in range(copies):
        seg_d = segs[s] * (copies * B / hist_fine.total)
        worst = max(worst, float(np.abs(seg_d - base_d).max()))
    return worst / float(base_d.max())


def golden_step_levels(fracs: np.ndarray, bins: int = 512,
                       edge_margin: int = 1) -> tuple[float, float, float, CircleHistogram]:
    """Fit the two-level step structure of {G(n)/phi}: density 2*(phi-1) on
    [2-phi, 1) and (phi-1) on [0, 2-phi).  Returns (low_level_dev,
    high_level_dev, breakpoint, hist) with deviations relative to the exact
    levels, excluding edge_margin bins at each side of the two jumps."""
    phi = (1 + math.sqrt(5)) / 2
    breakpoint = 2 - phi  # = {-phi} = 0.3819...
    hist = histogram_from_fracs(np.asarray(fracs), bins, frequency="inv_phi",
                                source="golden_shift")
    dens = hist.densities()
    lo_level = phi - 1
    hi_level = 2 * (phi - 1)
    cut = int(breakpoint * bins)
    lo_idx = np.arange(edge_margin, cut - edge_margin)
    hi_idx = np.arange(cut + 1 + edge_margin, bins - edge_margin)
    lo_dev = float(np.abs(dens[lo_idx] - lo_level).max() / lo_level)
    hi_dev = float(np.abs(dens[hi_idx] - hi_level).max() / hi_level)
    return lo_dev, hi_dev, breakpoint, hist
