"""The full verification suite: every headline behavior of the library as a
pass/fail check, shared between the test suite and the CLI `report` command.

Checks are numbered C01..C16.  Three sub-checks are expected to fail at
desk-scale sample sizes (the measured quantities demonstrably sit outside
the stated targets); they are reported with status "expected_fail" and the
measured numbers rather than being silently loosened:

* C09a - the infinite-product coefficient at truncation 1e4 differs from the
  2^20-term empirical Weyl sum by ~0.021 (> 0.01): the empirical sum at
  N = 2^20 equals the 20-factor partial product, and the remaining factors
  21..1e4 shrink the magnitude by ~20%.  Matching within 0.01 would need
  N ~ 2^40.
* C10b - digit sums take ~12 distinct values below 1e6, so their scaled
  circle distribution is atomic at this scale (uniformity is asymptotic).
* C11b - the d=4 signal magnitude converges to ~0.015 (not above 0.05), and
  the d=5 attached recurrence has characteristic roots exactly on the unit
  circle (x^2-x+1 factor), so no harmonic of alpha_5 decays; |mu_hat(1)|
  is ~1e-5 at 1e6.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import algebra, hofstadter, limits, numeration, precision, seqcore, weyl

__all__ = ["CheckResult", "SuiteContext", "ALL_CHECKS", "run_all", "EXPECTED_FAIL_IDS"]

EXPECTED_FAIL_IDS = {"C09a", "C10b", "C11b"}


@dataclass
class CheckResult:
    cid: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    expected_fail: bool = False

    @property
    def status(self) -> str:
        if self.passed:
            return "PASS"
        return "EXPECTED-FAIL" if self.expected_fail else "FAIL"

    def line(self) -> str:
        return f"[{self.status:>13s}] {self.cid} {self.name}: {self.detail} ({self.seconds:.1f}s)"

    def to_json_obj(self) -> dict:
        return {
            "id": self.cid,
            "name": self.name,
            "status": self.status,
            "detail": self.detail,
            "seconds": round(self.seconds, 2),
        }


class SuiteContext:
    """Caches the expensive shared artifacts (tables, phases, coefficient
    scans) across checks."""

    def __init__(self, n_large: int = 10 ** 7, n_med: int = 10 ** 6):
        self.n_large = n_large
        self.n_med = n_med
        self._cache: dict = {}

    def get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    # -- shared artifacts

    def h_table(self, d: int, upto: int) -> np.ndarray:
        # reuse a longer table when present
        for key in [k for k in self._cache if isinstance(k, tuple) and k[0] == "H"]:
            _, dd, uu = key
            if dd == d and uu >= upto:
                return self._cache[key][: upto + 1]
        return self.get(("H", d, upto), lambda: hofstadter.eval_direct(d, upto))

    def alpha(self, d: int = 3) -> precision.RealValue:
        return precision.named_constant(f"alpha{d}")

    def narayana(self, count: int = 400) -> seqcore.SequenceTable:
        return self.get(("narayana", count),
                        lambda: seqcore.generate_recurrent(seqcore.narayana_spec(), count,
                                                           increasing=True))

    def h_hist(self, bins: int = 512) -> weyl.CircleHistogram:
        n = self.n_large
        return self.get(("hist_alpha", n, bins),
                        lambda: weyl.histogram(self.h_table(3, n)[: n], self.alpha(),
                                               bins, source="hofstadter3"))

    def fourier_alpha(self, d_max: int = 200) -> np.ndarray:
        n = self.n_large
        return self.get(("fourier_alpha", n, d_max),
                        lambda: weyl.fourier_coeffs(self.h_table(3, n)[: n],
                                                    self.alpha(), d_max))


def _timed(fn):
    t0 = time.time()
    out = fn()
    return out, time.time() - t0


# ---------------------------------------------------------------------------
# individual criteria


def check_c01_shift_equivalence(ctx: SuiteContext, n: int = 10 ** 5) -> CheckResult:
    def run():
        bad = []
        for d in range(1, 8):
            direct = hofstadter.eval_direct(d, n)
            shift = hofstadter.eval_shift_bulk(d, n)
            if not np.array_equal(direct, shift):
                bad.append(d)
            # the literal encode/shift/decode route on a sample, plus full
            # equality of the vectorized route above
            base = hofstadter.hofstadter_base(d, n)
            for m in range(1, 2000):
                v = numeration.decode(
                    numeration.right_shift(numeration.encode_greedy(m, base)), base)
                if v != direct[m]:
                    bad.append((d, m))
                    break
        return bad

    bad, dt = _timed(run)
    return CheckResult("C01", "digit-shift closed form equals direct evaluation",
                       not bad, f"d=1..7, N={n}, mismatches: {bad or 'none'}", dt)


def check_c02_first_terms(ctx: SuiteContext) -> CheckResult:
    def run():
        t = hofstadter.eval_direct(3, 16)
        first15 = list(t[1:16])
        want = [1, 1, 2, 3, 4, 4, 5, 5, 6, 7, 7, 8, 9, 10, 10]
        return first15 == want and t[16] == 11, first15, int(t[16])

    (ok, first15, h16), dt = _timed(run)
    return CheckResult("C02", "first 15 values and the worked value at 16",
                       ok, f"first15={first15}, H(16)={h16}", dt)


def check_c03_decay_slope(ctx: SuiteContext) -> CheckResult:
    def run():
        nar = ctx.narayana()
        rep = precision.classify_decay(ctx.alpha(), nar, (10, 120))
        alpha_enc = ctx.alpha().enclosure(80)
        target = -0.5 * math.log(1 / float(alpha_enc.value))
        rel = abs(rep.fitted_rate - target) / abs(target)
        return rep, target, rel

    (rep, target, rel), dt = _timed(run)
    ok = rel <= 0.02 and rep.classification == "decays_geometric"
    return CheckResult("C03", "geometric decay rate of ||alpha h_k||", ok,
                       f"slope={rep.fitted_rate:.5f} target={target:.5f} rel={rel:.3%}", dt)


def check_c04_dichotomy(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_large
        vals = ctx.h_table(3, n)[: n]
        details = []
        ok = True
        for tag in ("sqrt2", "sqrt3", "e"):
            beta = precision.named_constant(tag)
            hist = weyl.histogram(vals, beta, 512)
            dev = hist.max_uniform_deviation()
            mu = np.abs(weyl.fourier_coeffs(vals, beta, 5))
            cond = dev <= 0.03 and mu.max() < 0.02
            ok &= cond
            details.append(f"{tag}: dev={dev:.3%} max|mu|={mu.max():.4f}")
        hist_a = ctx.h_hist()
        dev_a = hist_a.max_uniform_deviation()
        mu1 = abs(ctx.fourier_alpha()[0])
        cond_a = dev_a > 0.25 and mu1 > 0.05
        ok &= cond_a
        details.append(f"alpha: dev={dev_a:.3%} |mu(1)|={mu1:.4f}")
        return ok, "; ".join(details)

    (ok, detail), dt = _timed(run)
    return CheckResult("C04", "uniform off the signal, non-uniform on it", ok, detail, dt)


def check_c05_mod_m(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_large
        vals = ctx.h_table(3, n)[1: n + 1]
        worst = 0.0
        for m in (2, 3, 5, 7):
            freqs = np.bincount(vals % m, minlength=m) / n
            worst = max(worst, float(np.abs(freqs - 1 / m).max() * m))
        return worst

    worst, dt = _timed(run)
    return CheckResult("C05", "residues equidistributed mod 2,3,5,7",
                       worst <= 0.01, f"worst relative deviation {worst:.4%}", dt)


def check_c06_scaled_copies(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_large
        vals = ctx.h_table(3, n)[: n]
        base = ctx.h_hist()
        third = precision.scaled(ctx.alpha(), Fraction(1, 3), name="alpha3_third")
        fine = weyl.histogram(vals, third, 3 * 512, source="hofstadter3")
        return limits.scaled_copies_residual(fine, base, 3)

    resid, dt = _timed(run)
    return CheckResult("C06", "third-of-signal histogram folds into three copies",
                       resid <= 0.03, f"worst folded deviation {resid:.3%} of max density", dt)


def check_c07_valley_hill(ctx: SuiteContext) -> CheckResult:
    def run():
        rep = limits.valley_hill_analysis(ctx.h_hist())
        alpha_enc = ctx.alpha().enclosure(80)
        two_alpha = float((2 * alpha_enc.value) % 1)
        off_err_bins = abs(rep.offset_bins - two_alpha * 512)
        off_err_bins = min(off_err_bins, 512 - off_err_bins)
        ratio = rep.hill_height / rep.valley_height
        ok = (rep.status == "ok" and 1.9 <= ratio <= 2.1
              and off_err_bins <= 2.0 and rep.fit_residual < 0.05)
        return ok, rep, ratio, off_err_bins

    (ok, rep, ratio, off_err), dt = _timed(run)
    return CheckResult(
        "C07", "valley/hill heights, offset, and reflected overlay", ok,
        f"ratio={ratio:.3f} offset={rep.offset_bins:.1f}bins (err {off_err:.2f}) "
        f"overlay={rep.fit_residual:.3%}", dt)


def check_c08_density_bound(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_large
        vals = ctx.h_table(3, n)[1: n + 1]
        return limits.density_bound_check(ctx.h_hist(), vals, 1.0, 2)

    (max_d, bound, ok), dt = _timed(run)
    return CheckResult("C08", "bin densities below the absolute-continuity bound",
                       ok, f"max density {max_d:.3f} <= {bound}", dt)


def _factorial_phase_table(d_count: int) -> list[float]:
    return [float(limits.frac_factorial_over_e(i)) for i in range(1, d_count + 1)]


def check_c09a_product_vs_empirical(ctx: SuiteContext) -> CheckResult:
    def run():
        prod = limits.factorial_product_coeff(1, "inv_e", truncation=10_000)
        n = 1 << 20
        rmap = numeration.registry_map("binary_to_factorial", 24)
        fr = numeration.bulk_phases(np.arange(1, n + 1, dtype=np.int64), rmap,
                                    _factorial_phase_table(len(rmap.source)))
        emp = np.exp(2j * np.pi * fr).mean()
        gap = abs(abs(prod.value) - abs(emp))
        return abs(prod.value), abs(emp), gap

    (pv, ev, gap), dt = _timed(run)
    return CheckResult(
        "C09a", "factorial product vs 2^20-term empirical sum within 0.01",
        gap <= 0.01,
        f"|product@1e4|={pv:.4f} |empirical@2^20|={ev:.4f} gap={gap:.4f} "
        "(the empirical sum equals the 20-factor partial product; the "
        "remaining factors change the magnitude by ~0.02)",
        dt, expected_fail=True)


def check_c09b_bound_and_divergence(ctx: SuiteContext) -> CheckResult:
    def run():
        mags = []
        statuses = []
        for d in range(1, 51):
            c = limits.factorial_product_coeff(d, "inv_e", truncation=3000)
            mags.append(abs(c.value))
            statuses.append(c.status)
        rows = limits.coeff_decay_bound_check(mags, 50)
        bound_ok = all(r[3] for r in rows)
        conv_ok = all(s == "converged" for s in statuses)
        div = limits.factorial_product_coeff(1, "e", truncation=2000)
        return bound_ok, conv_ok, div.status, max(m / 0.98 ** (i + 1) for i, m in enumerate(mags))

    (bound_ok, conv_ok, div_status, worst), dt = _timed(run)
    ok = bound_ok and conv_ok and div_status == "divergent_argument"
    return CheckResult(
        "C09b", "0.98^d coefficient bound and the divergent frequency", ok,
        f"bound ok={bound_ok} (worst ratio {worst:.3f}), all converged={conv_ok}, "
        f"e-product status={div_status}", dt)


_C10_MAPS = ("binary_to_ternary", "binary_to_quaternary", "fibonacci_to_binary")


def check_c10a_replacement_uniformity(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_med
        ns = np.arange(1, n + 1, dtype=np.int64)
        worst = 0.0
        details = []
        for name in _C10_MAPS:
            rmap = numeration.registry_map(name, 64)
            vals = numeration.bulk_replace(ns, rmap)
            for tag in ("sqrt2", "inv_e"):
                beta = precision.named_constant(tag)
                fr = weyl.phase_fracs(beta, vals)
                d = weyl.star_discrepancy(fr)
                worst = max(worst, d)
                details.append(f"{name}/{tag}={d:.4f}")
        return worst, "; ".join(details)

    (worst, detail), dt = _timed(run)
    return CheckResult("C10a", "replacement sequences uniform (discrepancy <= 3%)",
                       worst <= 0.03, detail, dt)


def check_c10b_digit_sum_uniformity(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_med
        ns = np.arange(1, n + 1, dtype=np.int64)
        worst = 0.0
        details = []
        for bname in ("narayana", "fibonacci"):
            base = numeration.registry_base(bname, 64)
            sums = numeration.bulk_digit_sums(ns, base)
            for tag in ("sqrt2", "inv_e"):
                beta = precision.named_constant(tag)
                fr = weyl.phase_fracs(beta, sums)
                d = weyl.star_discrepancy(fr)
                worst = max(worst, d)
                details.append(f"{bname}/{tag}={d:.3f}")
        return worst, "; ".join(details)

    (worst, detail), dt = _timed(run)
    return CheckResult(
        "C10b", "digit-sum distributions uniform (discrepancy <= 3%)",
        worst <= 0.03,
        detail + " (digit sums take ~12 distinct values at this range: the "
        "distribution is atomic; uniformity only emerges at astronomically "
        "larger N)", dt, expected_fail=True)


def check_c11a_family_signals(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_med
        out = {}
        for d in (2, 3, 6, 7):
            vals = ctx.h_table(d, n)[: n]
            mu1 = abs(weyl.fourier_coeffs(vals, precision.named_constant(f"alpha{d}"), 1)[0])
            out[d] = mu1
        ok = out[2] > 0.05 and out[3] > 0.05 and out[6] < 0.02 and out[7] < 0.02
        return ok, out

    (ok, out), dt = _timed(run)
    detail = " ".join(f"d={d}:|mu(1)|={v:.5f}" for d, v in out.items())
    return CheckResult("C11a", "signal present for depth 2,3; absent for 6,7",
                       ok, detail, dt)


def check_c11b_family_signals_d45(ctx: SuiteContext) -> CheckResult:
    def run():
        n = ctx.n_med
        out = {}
        for d in (4, 5):
            vals = ctx.h_table(d, n)[: n]
            mu1 = abs(weyl.fourier_coeffs(vals, precision.named_constant(f"alpha{d}"), 1)[0])
            out[d] = mu1
        return out

    out, dt = _timed(run)
    ok = out[4] > 0.05 and out[5] > 0.05
    return CheckResult(
        "C11b", "signal above 0.05 for depth 4, 5", ok,
        f"d=4:|mu(1)|={out[4]:.5f} d=5:|mu(1)|={out[5]:.5f} "
        "(the d=4 limit is ~0.015; the d=5 recurrence has unit-circle "
        "characteristic roots so no harmonic decays and the sums vanish)",
        dt, expected_fail=True)


def check_c12_root_counts(ctx: SuiteContext) -> CheckResult:
    def run():
        bad = []
        for d in range(2, 6):
            c = algebra.count_outside_unit(algebra.trinomial(d))
            if c != 1:
                bad.append((d, c))
        for d in range(6, 13):
            c = algebra.count_outside_unit(algebra.trinomial(d))
            if c < 2:
                bad.append((d, c))
        c60 = algebra.count_outside_unit(algebra.trinomial(60))
        if abs(c60 - 20) > 3:
            bad.append((60, c60))
        return bad, c60

    (bad, c60), dt = _timed(run)
    return CheckResult("C12", "certified root counts outside the unit disk",
                       not bad, f"d=60 count {c60}; violations: {bad or 'none'}", dt)


def check_c13_fixture_decay(ctx: SuiteContext) -> CheckResult:
    def run():
        s13 = seqcore.generate_recurrent(seqcore.sqrt13_spec(), 160)
        s6 = seqcore.generate_recurrent(seqcore.sqrt6_spec(), 160)
        cases = [
            (precision.named_constant("sqrt13_half"), s13, "decays_geometric"),
            (precision.named_constant("sqrt6"), s6, "decays_geometric"),
            (precision.named_constant("one_plus_sqrt6"), s6, "decays_geometric"),
            (precision.named_constant("phi"), s13, "non_decaying"),
            (precision.named_constant("sqrt2"), s13, "non_decaying"),
            (precision.named_constant("phi"), s6, "non_decaying"),
            (precision.named_constant("sqrt2"), s6, "non_decaying"),
        ]
        bad = []
        for beta, seq, want in cases:
            got = precision.classify_decay(beta, seq, (20, 150)).classification
            if got != want:
                bad.append((beta.name, seq.name, got, want))
        return bad

    bad, dt = _timed(run)
    return CheckResult("C13", "quadratic-field fixtures decay, controls do not",
                       not bad, f"violations: {bad or 'none'}", dt)


def check_c14_multiset_recurrence(ctx: SuiteContext) -> CheckResult:
    def run():
        limit = min(ctx.n_large, 10 ** 6)
        H = ctx.h_table(3, limit)
        hs = ctx.narayana(60).terms
        checked = 0
        for i in range(3, len(hs)):
            hn = hs[i]
            if hn > limit:
                break
            hn1, hn2, hn3 = hs[i - 1], hs[i - 2], hs[i - 3]
            size = hn2 + hn + 1
            left = np.bincount(H[:hn], minlength=size)
            right = np.bincount(H[:hn1], minlength=size)
            add = np.bincount(hn2 + H[:hn3], minlength=size)
            if not np.array_equal(left, right + add):
                return checked, hn
            checked += 1
        return checked, None

    (checked, bad_at), dt = _timed(run)
    return CheckResult("C14", "exact decomposition of value counts at base checkpoints",
                       bad_at is None, f"{checked} checkpoints exact"
                       + ("" if bad_at is None else f"; first failure at {bad_at}"), dt)


def check_c15_engines_agree(ctx: SuiteContext) -> CheckResult:
    def run():
        limit = min(ctx.n_large, 10 ** 6)
        H = ctx.h_table(3, limit)
        nar = ctx.narayana(60)
        k_max = max(i for i in range(1, len(nar) + 1) if nar.term(i) <= limit)
        rmap = numeration.ReplacementMap(
            seqcore.SequenceTable("narayana", nar.terms[:k_max + 2], increasing=True),
            numeration.shifted_table(
                seqcore.SequenceTable("narayana", nar.terms[:k_max + 2], increasing=True)),
            name="narayana_shift")
        rec = weyl.weyl_recurrence(rmap, ctx.alpha(), k_max)
        cps = [ak for _, ak, _ in rec]
        direct = weyl.weyl_direct(H[:limit], ctx.alpha(), cps)
        dmap = dict(direct.checkpoints)
        worst = max(abs(x - dmap[ak]) for _, ak, x in rec)
        return worst, k_max

    (worst, k_max), dt = _timed(run)
    return CheckResult("C15", "recurrence-unraveled sums match direct summation",
                       worst <= 1e-9, f"max |diff| {worst:.2e} over k<= {k_max}", dt)


def check_c16_fourier_exponent(ctx: SuiteContext) -> CheckResult:
    def run():
        mags = np.abs(ctx.fourier_alpha(200))
        ds = np.arange(1, 201)
        sel = ds >= 4
        slope = np.polyfit(np.log(ds[sel]), np.log(mags[sel]), 1)[0]
        return float(slope)

    slope, dt = _timed(run)
    return CheckResult("C16", "empirical Fourier-coefficient decay exponent",
                       -1.8 <= slope <= -1.1, f"fitted exponent {slope:.3f} in [-1.8,-1.1]", dt)


ALL_CHECKS = [
    check_c01_shift_equivalence,
    check_c02_first_terms,
    check_c03_decay_slope,
    check_c04_dichotomy,
    check_c05_mod_m,
    check_c06_scaled_copies,
    check_c07_valley_hill,
    check_c08_density_bound,
    check_c09a_product_vs_empirical,
    check_c09b_bound_and_divergence,
    check_c10a_replacement_uniformity,
    check_c10b_digit_sum_uniformity,
    check_c11a_family_signals,
    check_c11b_family_signals_d45,
    check_c12_root_counts,
    check_c13_fixture_decay,
    check_c14_multiset_recurrence,
    check_c15_engines_agree,
    check_c16_fourier_exponent,
]


def run_all(n_large: int = 10 ** 7, n_med: int = 10 ** 6,
            echo: bool = True) -> list[CheckResult]:
    ctx = SuiteContext(n_large=n_large, n_med=n_med)
    results = []
    for check in ALL_CHECKS:
        res = check(ctx)
        results.append(res)
        if echo:
            print(res.line(), flush=True)
    return results
