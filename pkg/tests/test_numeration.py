"""Greedy codec, digit shift, replacement sequences, signature analysis."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from modsig import numeration as num
from modsig import seqcore


@pytest.fixture(scope="module")
def bases():
    return {
        "narayana": num.registry_base("narayana", 64),
        "fibonacci": num.registry_base("fibonacci", 64),
        "binary": num.registry_base("binary", 48),
        "ternary": num.registry_base("ternary", 40),
    }


def greedy_oracle(n, terms):
    """Literal restatement of the greedy rule."""
    digits = []
    rem = n
    while rem > 0:
        a = max(t for t in terms if t <= rem)
        idx = terms.index(a) + 1
        mult = 0
        while rem >= a:
            rem -= a
            mult += 1
        digits.append((idx, mult))
    return tuple(digits)


def test_encode_worked_example(bases):
    rep = num.encode_greedy(16, bases["narayana"])
    assert rep.indices() == (7, 3)  # 13 + 3
    assert num.decode(rep, bases["narayana"]) == 16


def test_encode_one(bases):
    for b in bases.values():
        assert num.encode_greedy(1, b).digits == ((1, 1),)


def test_encode_100_narayana(bases):
    rep = num.encode_greedy(100, bases["narayana"])
    assert rep.indices() == (12, 6, 3)  # 88 + 9 + 3


def test_encode_matches_oracle(bases):
    for name, base in bases.items():
        terms = base.terms
        for n in list(range(1, 200)) + [977, 5000]:
            assert num.encode_greedy(n, base).digits == greedy_oracle(n, terms), (name, n)


def test_roundtrip_all_bases(bases):
    for name, base in bases.items():
        for n in range(1, 20001):
            rep = num.encode_greedy(n, base)
            assert num.decode(rep, base) == n, (name, n)


def test_narayana_gap_property(bases):
    base = bases["narayana"]
    for n in range(1, 20001):
        idx = num.encode_greedy(n, base).indices()
        assert all(a - b >= 3 for a, b in zip(idx, idx[1:])), n
        assert all(m == 1 for _, m in num.encode_greedy(n, base).digits)


def test_range_error(bases):
    small = seqcore.SequenceTable("small", [1, 2, 3], increasing=True)
    with pytest.raises(IndexError):
        num.encode_greedy(100, small)


def test_right_shift_examples(bases):
    nar = bases["narayana"]
    rep16 = num.encode_greedy(16, nar)
    assert num.decode(num.right_shift(rep16), nar) == 11  # 9 + 2
    rep1 = num.encode_greedy(1, nar)
    assert num.decode(num.right_shift(rep1), nar) == 1  # index 0 keeps value 1
    rep100 = num.encode_greedy(100, nar)
    assert num.decode(num.right_shift(rep100), nar) == 68  # 60 + 6 + 2


def test_replace_binary_to_ternary():
    rmap = num.registry_map("binary_to_ternary", 40)
    assert num.replace(5, rmap) == 10  # 101 -> 9 + 1
    got = [num.replace(n, rmap) for n in range(1, 9)]
    assert got == [1, 3, 4, 9, 10, 12, 13, 27]


def test_replace_binary_to_quaternary():
    rmap = num.registry_map("binary_to_quaternary", 40)
    assert num.replace(3, rmap) == 5
    got = [num.replace(n, rmap) for n in range(1, 9)]
    assert got == [1, 4, 5, 16, 17, 20, 21, 64]


def test_replace_binary_to_factorial_matches_fsequence():
    rmap = num.registry_map("binary_to_factorial", 24)
    f = seqcore.generate_factorial_sums(64)
    assert num.replace(4, rmap) == 6
    for n in range(1, 65):
        assert num.replace(n, rmap) == f.term(n)


def test_replace_fibonacci_to_binary():
    rmap = num.registry_map("fibonacci_to_binary", 40)
    got = [num.replace(n, rmap) for n in range(1, 9)]
    assert got == [1, 2, 4, 5, 8, 9, 10, 16]  # no consecutive binary ones


def test_digit_sums(bases):
    assert num.digit_sum(16, bases["narayana"]) == 2
    assert num.digit_sum(1, bases["binary"]) == 1
    assert num.digit_sum(100, bases["binary"]) == 3  # 1100100
    assert num.digit_sum(8, bases["ternary"]) == 4  # 22 in base 3


def test_signature_narayana(bases):
    prof = num.verify_signature(bases["narayana"])
    assert prof.lookback == 3
    assert 1 < prof.growth_r < prof.growth_s <= 2  # the seed ratio 2/1 is real
    past_seed = num.verify_signature(bases["narayana"], (3, len(bases["narayana"])))
    assert past_seed.growth_s < Fraction(16, 10)


def test_signature_binary(bases):
    prof = num.verify_signature(bases["binary"])
    assert prof.lookback == 1
    assert prof.growth_s == 2


def test_signature_ternary_multiplicity(bases):
    # 3^k = 3 * 3^{k-1}: lookback 1 even though each digit repeats
    prof = num.verify_signature(bases["ternary"])
    assert prof.lookback == 1


def test_signature_factorials_violation():
    fac = num.factorial_table(20)
    with pytest.raises(num.SignatureViolation):
        num.verify_signature(fac)


def test_signature_respects_lookback_cap():
    # primes have no bounded-lookback signature
    primes = seqcore.SequenceTable(
        "oneplus", [1] + [2 ** k + 1 for k in range(1, 30)], increasing=True)
    with pytest.raises(num.SignatureViolation):
        num.verify_signature(primes, max_lookback=3)


def test_bulk_replace_matches_scalar():
    for name in ("binary_to_ternary", "fibonacci_to_binary", "narayana_shift"):
        rmap = num.registry_map(name, 48)
        ns = np.arange(1, 3001, dtype=np.int64)
        bulk = num.bulk_replace(ns, rmap)
        for n in range(1, 3001, 97):
            assert bulk[n - 1] == num.replace(n, rmap), (name, n)


def test_bulk_digit_sums_matches_scalar(bases):
    ns = np.arange(1, 2001, dtype=np.int64)
    bulk = num.bulk_digit_sums(ns, bases["narayana"])
    for n in range(1, 2001, 53):
        assert bulk[n - 1] == num.digit_sum(n, bases["narayana"])


def test_bulk_phases_match_bigint_reduction():
    from modsig.limits import frac_factorial_over_e
    from modsig.precision import named_constant

    rmap = num.registry_map("binary_to_factorial", 24)
    fracs = [float(frac_factorial_over_e(i)) for i in range(1, len(rmap.source) + 1)]
    ns = np.arange(1, 513, dtype=np.int64)
    ph = num.bulk_phases(ns, rmap, fracs)
    # independent route: materialize the exact value, then reduce against a
    # high-precision rational enclosure of 1/e
    inv_e = named_constant("inv_e").enclosure(160).value
    for n in range(1, 513, 37):
        v = num.replace(n, rmap)
        expect = float((inv_e * v) % 1)
        assert abs(ph[n - 1] - expect) < 1e-9, n


def test_preimage_counts_shift_map(h3_1e6):
    """Every value is hit once or twice; twice exactly when some preimage
    ends in the lowest digit."""
    counts = np.bincount(h3_1e6[: 10 ** 6])
    top = h3_1e6[10 ** 6 - 1]
    assert counts[1:top - 2].min() >= 1
    assert counts.max() <= 2
    nar = num.registry_base("narayana", 64)
    doubly = np.nonzero(counts == 2)[0]
    for m in doubly[:200]:
        pre = [n for n in range(max(1, int(m)), min(10 ** 6, 3 * int(m) + 4))
               if h3_1e6[n] == m]
        assert len(pre) == 2
        assert any(num.encode_greedy(n, nar).indices()[-1] == 1 for n in pre)


def test_multiset_recurrence_small(h3_1e6):
    H = h3_1e6
    hs = [1, 2, 3]
    while hs[-1] <= 10 ** 5:
        hs.append(hs[-1] + hs[-3])
    for i in range(3, len(hs)):
        hn = hs[i]
        if hn > 10 ** 5:
            break
        hn1, hn2, hn3 = hs[i - 1], hs[i - 2], hs[i - 3]
        size = hn2 + hn + 1
        left = np.bincount(H[:hn], minlength=size)
        right = np.bincount(H[:hn1], minlength=size) + np.bincount(hn2 + H[:hn3], minlength=size)
        assert np.array_equal(left, right), hn


def test_registry_contents():
    reg = num.load_registry()
    assert set(reg["maps"]) >= {
        "narayana_shift", "binary_to_ternary", "binary_to_factorial",
        "binary_to_quaternary", "fibonacci_to_binary"}
    rmap = num.registry_map("narayana_shift", 32)
    assert rmap.target.terms[:4] == [1, 1, 2, 3]
