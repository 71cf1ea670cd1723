"""Direct evaluation against closed forms and the digit-shift route."""

from math import isqrt

import numpy as np
import pytest

from modsig import hofstadter as hof
from modsig import precision


def test_first_fifteen():
    t = hof.eval_direct(3, 15)
    assert list(t[1:16]) == [1, 1, 2, 3, 4, 4, 5, 5, 6, 7, 7, 8, 9, 10, 10]


def test_sixteen():
    assert hof.eval_direct(3, 16)[16] == 11


def test_halves_closed_form():
    t = hof.eval_direct(1, 10 ** 4)
    for n in range(1, 10 ** 4 + 1):
        assert t[n] == hof.closed_form_halves(n)


def test_golden_closed_form():
    # G(n) = floor((n+1)/phi); the textbook-looking ceil(n/phi) disagrees on
    # ~38% of inputs (first at n=2, where the recursion forces G(2)=1)
    t = hof.eval_direct(2, 10 ** 4)
    for n in range(1, 10 ** 4 + 1):
        assert t[n] == hof.closed_form_golden(n)
    assert t[2] == 1
    assert t[10] == 6


def test_golden_ceil_variant_is_wrong():
    # documents why the oracle is the floor form: ceil(n/phi) already
    # disagrees with the recursion at n=2 (and on a positive fraction of n)
    phi = (1 + 5 ** 0.5) / 2
    t = hof.eval_direct(2, 2000)
    mismatch = sum(1 for n in range(1, 2001) if t[n] != int(np.ceil(n / phi)))
    assert mismatch > 600


@pytest.mark.parametrize("d", range(1, 8))
def test_shift_equals_direct(d):
    n = 10 ** 4
    direct = hof.eval_direct(d, n)
    assert np.array_equal(direct, hof.eval_shift(d, n))
    assert np.array_equal(direct, hof.eval_shift_bulk(d, n))


def test_shift_single_values():
    base = hof.hofstadter_base(3, 100)
    from modsig import numeration as num

    rep = num.encode_greedy(16, base)
    assert num.decode(num.right_shift(rep), base) == 11


def test_monotone_unit_steps(h3_1e6):
    d = np.diff(h3_1e6[1:])
    assert d.min() == 0 and d.max() == 1


def test_envelope(h3_1e6, alpha3):
    dev = hof.envelope_deviation(h3_1e6, float(alpha3.enclosure(64).value))
    assert dev < 2.0, f"|H(n) - alpha n| reached {dev}"


def test_preimage_multiplicity(h3_1e6):
    counts = hof.preimage_counts(h3_1e6[: 10 ** 6])
    assert counts.max() <= 2


def test_rejects_bad_args():
    with pytest.raises(ValueError):
        hof.eval_direct(0, 10)
    with pytest.raises(ValueError):
        hof.eval_direct(3, 0)
