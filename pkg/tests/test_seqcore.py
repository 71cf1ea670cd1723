"""Generators against independent brute-force oracles."""

import itertools

import numpy as np
import pytest

from modsig import seqcore


def brute_ulam(count):
    """Re-derive the sequence by scanning candidates and counting pairs."""
    terms = [1, 2]
    while len(terms) < count:
        m = terms[-1] + 1
        while True:
            reps = sum(1 for i, j in itertools.combinations(terms, 2) if i + j == m)
            if reps == 1:
                break
            m += 1
        terms.append(m)
    return terms


def brute_factorial_sums(count):
    """Enumerate subset sums of {1!, 2!, ..., k!} in increasing order."""
    fact = [1, 2, 6, 24, 120, 720, 5040, 40320]
    sums = set()
    for r in range(1, len(fact) + 1):
        for combo in itertools.combinations(fact, r):
            sums.add(sum(combo))
    return sorted(sums)[:count]


def test_narayana_terms(narayana400):
    assert narayana400.terms[:11] == [1, 2, 3, 4, 6, 9, 13, 19, 28, 41, 60]
    narayana400.verify_recurrence()


def test_fibonacci_terms():
    fib = seqcore.generate_recurrent(seqcore.fibonacci_spec(), 8)
    assert fib.terms == [1, 2, 3, 5, 8, 13, 21, 34]


def test_sqrt13_fixture_terms():
    s = seqcore.generate_recurrent(seqcore.sqrt13_spec(), 8)
    assert s.terms == [0, 0, 0, 0, 0, 1, 3, 15]
    s.verify_recurrence()


def test_sqrt6_fixture_terms():
    s = seqcore.generate_recurrent(seqcore.sqrt6_spec(), 8)
    assert s.terms == [1, 2, 3, 4, 29, 38, 287, 376]


def test_count_below_order_rejected():
    with pytest.raises(ValueError):
        seqcore.generate_recurrent(seqcore.narayana_spec(), 2)


def test_ulam_first_terms(ulam_1e4):
    assert ulam_1e4.terms[:10] == [1, 2, 3, 4, 6, 8, 11, 13, 16, 18]
    assert ulam_1e4.terms[:8] == brute_ulam(8)


def test_ulam_seed_only():
    assert seqcore.generate_ulam(2).terms == [1, 2]


def test_ulam_full_verification(ulam_1e4):
    """Independent pairwise pass: every term has exactly one representation
    and every skipped integer does not."""
    terms = ulam_1e4.terms
    counts = seqcore.ulam_representation_counts(terms)
    assert all(counts[v] == 1 for v in terms[2:])
    in_seq = np.zeros(len(counts), dtype=bool)
    in_seq[np.asarray(terms)] = True
    for m in range(terms[1] + 1, terms[-1]):
        if not in_seq[m]:
            assert counts[m] != 1, f"skipped integer {m} had a unique representation"
    assert all(b > a for a, b in zip(terms, terms[1:]))


def test_factorial_sums_first_terms():
    t = seqcore.generate_factorial_sums(6)
    assert t.terms == [1, 2, 3, 6, 7, 8]
    assert seqcore.generate_factorial_sums(1).terms == [1]
    assert seqcore.generate_factorial_sums(40).terms == brute_factorial_sums(40)


def test_factorial_sums_power_index():
    t = seqcore.generate_factorial_sums(2 ** 6 + 1)
    fact = [1, 2, 6, 24, 120, 720, 5040]
    for k in range(0, 7):
        assert t.term(2 ** k) == fact[k], f"term at 2^{k}"


def test_narayana_growth_window(narayana400):
    t = narayana400.terms
    for k in range(1, len(t) - 1):  # ratio at k=0 is exactly 2
        assert 13 * t[k] < 10 * t[k + 1], f"lower growth bound at {k + 1}"
        assert 10 * t[k + 1] < 16 * t[k], f"upper growth bound at {k + 1}"


def test_csv_and_cache_roundtrip(tmp_path, narayana400):
    csv_path = tmp_path / "n.csv"
    seqcore.write_csv(narayana400, csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "index,value"
    assert lines[1] == "1,1"
    assert lines[11] == "11,60"

    cache_path = tmp_path / "n.msq"
    seqcore.write_cache(narayana400, cache_path)
    back = seqcore.read_cache(cache_path, name="narayana")
    assert back.terms == narayana400.terms


def test_cache_handles_negative_and_huge(tmp_path):
    t = seqcore.SequenceTable("mixed", [-(10 ** 40), 0, 3, 10 ** 100])
    p = tmp_path / "m.msq"
    seqcore.write_cache(t, p)
    assert seqcore.read_cache(p).terms == t.terms


def test_values_array_overflow_guard():
    t = seqcore.SequenceTable("big", [1, 2 ** 70])
    with pytest.raises(OverflowError):
        t.values_array()
