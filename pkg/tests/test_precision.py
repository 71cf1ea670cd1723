"""Dyadic enclosures, algebraic constants, and decay classification."""

import math
import random
from fractions import Fraction

import pytest

from modsig import precision as prec
from modsig import seqcore


# --- ExtReal interval arithmetic --------------------------------------------


def test_extreal_contains_exact_results():
    rng = random.Random(7)
    for _ in range(300):
        a = Fraction(rng.randint(-999, 999), rng.randint(1, 99))
        b = Fraction(rng.randint(-999, 999), rng.randint(1, 99))
        ea = prec.ExtReal.from_fraction(a, 40)
        eb = prec.ExtReal.from_fraction(b, 40)
        s = ea + eb
        assert s.lo <= a + b <= s.hi
        p = ea * eb
        assert p.lo <= a * b <= p.hi
        d = ea - eb
        assert d.lo <= a - b <= d.hi


def test_extreal_round_grows_error():
    x = prec.ExtReal.exact(Fraction(1, 3))
    r = x.round_to(20)
    assert r.error > 0
    assert r.lo <= Fraction(1, 3) <= r.hi


def test_indeterminate_comparison():
    a = prec.ExtReal(Fraction(1), Fraction(1, 4))
    b = prec.ExtReal(Fraction(11, 10), Fraction(1, 4))
    assert a.compare(b) is None
    with pytest.raises(prec.IndeterminateError):
        a.definitely_lt(b)
    assert prec.ExtReal.exact(1).compare(prec.ExtReal.exact(2)) == -1


def test_abs_straddling_zero():
    x = prec.ExtReal(Fraction(1, 100), Fraction(1, 10))
    a = x.abs_()
    assert a.lo >= 0
    assert a.hi >= Fraction(11, 100)


# --- algebraic reals ---------------------------------------------------------


def test_alpha3_digits(alpha3):
    enc = alpha3.enclosure(120)
    # 30 decimal digits, computed independently by interval bisection when
    # this test was frozen
    want = Fraction(682327803828019327369483739711, 10 ** 30)
    assert abs(enc.value - want) < Fraction(1, 10 ** 28)
    assert enc.error <= Fraction(1, 2 ** 120)


def test_refinement_tightens(alpha3):
    wide = alpha3.enclosure(20)
    tight = alpha3.enclosure(200)
    assert tight.error < wide.error
    assert wide.lo <= tight.value <= wide.hi


def test_bad_isolating_interval_rejected():
    with pytest.raises(ValueError):
        prec.AlgebraicReal([-1, 0, 1], 2, 3, name="nope")  # x^2-1 has no root there


def test_named_constants_evaluate():
    approx = {
        "phi": 1.618033988749895,
        "inv_phi": 0.618033988749895,
        "sqrt2": 1.4142135623730951,
        "sqrt3": 1.7320508075688772,
        "sqrt6": 2.449489742783178,
        "sqrt13_half": 2.302775637731995,
        "one_plus_sqrt6": 3.449489742783178,
        "e": 2.718281828459045,
        "inv_e": 0.36787944117144233,
        "alpha2": 0.6180339887498949,
        "alpha4": 0.7244919590005157,
    }
    for tag, want in approx.items():
        got = float(prec.named_constant(tag).enclosure(80).value)
        assert abs(got - want) < 1e-13, tag
    with pytest.raises(KeyError):
        prec.named_constant("zeta")


def test_alpha1_is_half():
    a1 = prec.alpha_root(1)
    assert a1.enclosure(10).value == Fraction(1, 2)


# --- dist_to_int -------------------------------------------------------------


def test_dist_rational_exact():
    d = prec.dist_to_int(Fraction(1, 2), 3)
    assert d.value == Fraction(1, 2) and d.error == 0


def test_dist_integer_beta():
    for a in (1, 17, 10 ** 30):
        assert prec.dist_to_int(7, a).value == 0


def test_dist_alpha_41(alpha3):
    d = prec.dist_to_int(alpha3, 41)
    assert abs(float(d.value) - 0.0245600430512) < 1e-10
    assert d.error < Fraction(1, 2 ** 50)


def test_dist_huge_term(alpha3, narayana400):
    # h_400 has ~220 bits; the enclosure must stay meaningful
    d = prec.dist_to_int(alpha3, narayana400.term(400))
    assert d.error < Fraction(1, 2 ** 40)
    assert d.value < Fraction(1, 10 ** 30)  # decayed far below float noise


# --- decay classification ----------------------------------------------------


def test_decay_alpha_narayana(alpha3, narayana400):
    rep = prec.classify_decay(alpha3, narayana400, (10, 120))
    assert rep.classification == "decays_geometric"
    target = -0.5 * math.log(1 / 0.6823278038280193)
    assert abs(rep.fitted_rate - target) / abs(target) < 0.02


def test_decay_sqrt2_narayana(narayana400):
    rep = prec.classify_decay(prec.named_constant("sqrt2"), narayana400, (10, 120))
    assert rep.classification == "non_decaying"


def test_decay_rational_narayana(narayana400):
    # p/q with q > 1 cannot decay: 1 = h_1 is not a multiple of q
    for q in (2, 3, 7):
        rep = prec.classify_decay(Fraction(1, q), narayana400, (10, 120))
        assert rep.classification == "non_decaying", q


def test_shift_identity(alpha3, narayana400):
    # the nearest integer to alpha*h_k is h_{k-1}
    for k in range(10, 121):
        d = prec.dist_to_int(alpha3, narayana400.term(k))
        enc = alpha3.enclosure(300) * prec.ExtReal.exact(narayana400.term(k))
        diff = (enc - prec.ExtReal.exact(narayana400.term(k - 1))).abs_()
        assert abs(diff.value - d.value) < Fraction(1, 2 ** 60), k


def test_ring_closure(alpha3, narayana400):
    # products of decaying frequencies still decay
    alpha_sq = prec.product(alpha3, alpha3, name="alpha^2")
    one_plus = prec.shifted(alpha3, 1, name="1+alpha")
    combos = [
        prec.product(alpha3, alpha_sq),
        prec.product(alpha_sq, alpha_sq),
        prec.product(one_plus, alpha3),
        prec.product(one_plus, alpha_sq),
    ]
    for beta in combos:
        rep = prec.classify_decay(beta, narayana400, (10, 120))
        assert rep.classification == "decays_geometric", beta.name


def test_decay_report_json(alpha3, narayana400):
    rep = prec.classify_decay(alpha3, narayana400, (10, 30))
    text = rep.to_json()
    assert '"classification": "decays_geometric"' in text


# --- nearest-integer sequences ----------------------------------------------


def test_nearest_integer_sequence_alpha(alpha3, narayana400):
    nis = prec.nearest_integer_sequence(alpha3, narayana400, upto=120)
    assert nis.residual_recurrence_index is not None
    assert nis.residual_recurrence_index <= 5
    # b_k = h_{k-1} for k >= 2
    assert nis.terms[9] == narayana400.term(9)


def test_nearest_integer_sequence_zero(narayana400):
    nis = prec.nearest_integer_sequence(Fraction(0), narayana400, upto=50)
    assert all(t == 0 for t in nis.terms)
    assert nis.residual_recurrence_index == 4  # order 3 + 1


def test_nearest_integer_tie_rejected():
    t = seqcore.SequenceTable("odds", [1, 3, 5], increasing=True,
                              spec=None)
    with pytest.raises(prec.IndeterminateError):
        prec.nearest_integer_sequence(Fraction(1, 2), t)


def test_nearest_integer_sqrt6():
    s6 = seqcore.generate_recurrent(seqcore.sqrt6_spec(), 80)
    nis = prec.nearest_integer_sequence(prec.named_constant("sqrt6"), s6, upto=80)
    assert nis.residual_recurrence_index is not None
    assert nis.residual_recurrence_index <= 8


# --- coefficient recovery ----------------------------------------------------


def test_recover_basis_elements(alpha3, narayana400):
    assert prec.recover_coefficients(alpha3, alpha3, narayana400) == (0, 1, 0)
    one_plus_sq = prec.poly_in(alpha3, (1, 0, 1), name="1+a^2")
    assert prec.recover_coefficients(one_plus_sq, alpha3, narayana400) == (1, 0, 1)


def test_recover_rejects_sqrt2(alpha3, narayana400):
    assert prec.recover_coefficients(prec.named_constant("sqrt2"), alpha3,
                                     narayana400) is None


def test_recover_roundtrip_sweep(alpha3, narayana400):
    rng = random.Random(11)
    triples = [(a0, a1, a2) for a0 in range(-5, 6) for a1 in range(-5, 6)
               for a2 in range(-5, 6)]
    rng.shuffle(triples)
    for a0, a1, a2 in triples[:120] + [(5, 5, 5), (-5, -5, -5), (0, 0, 1)]:
        if (a0, a1, a2) == (0, 0, 0):
            continue
        beta = prec.poly_in(alpha3, (a0, a1, a2))
        got = prec.recover_coefficients(beta, alpha3, narayana400)
        assert got == (a0, a1, a2), (a0, a1, a2, got)


def test_recover_quadratic_fixture():
    s13 = seqcore.generate_recurrent(seqcore.sqrt13_spec(), 160)
    gamma = prec.named_constant("sqrt13_half")
    beta = prec.DerivedReal(
        lambda bits: gamma.enclosure(bits + 4) * prec.ExtReal.exact(2)
        + prec.ExtReal.exact(3),
        name="3+2g")
    assert prec.recover_quadratic(beta, gamma, s13, k=80) == (3, 2)


def test_find_multiplier():
    s13 = seqcore.generate_recurrent(seqcore.sqrt13_spec(), 160)
    gamma = prec.named_constant("sqrt13_half")
    assert prec.find_multiplier(gamma, s13, d_max=4, k_range=(20, 150)) == 1
    half_gamma = prec.scaled(gamma, Fraction(1, 2), name="g/2")
    assert prec.find_multiplier(half_gamma, s13, d_max=4, k_range=(20, 150)) == 2
    assert prec.find_multiplier(prec.named_constant("sqrt2"), s13, d_max=3,
                                k_range=(20, 150)) is None
