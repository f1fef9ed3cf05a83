from __future__ import annotations

import itertools

import pytest

from netgap.algebra import prime_power
from netgap.gap import (gap_report, max_middle_nodes, min_scalar_field_size,
                        previous_prime_power, prime_powers, scalar_bound)


def test_prime_power_stream():
    assert list(itertools.islice(prime_powers(), 12)) == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19]


def test_max_middle_nodes_examples():
    assert max_middle_nodes("combination", "vector", q=2, t=2, h=3) == 5
    assert max_middle_nodes("star", "scalar", q=2) == 35
    assert max_middle_nodes("star", "vector", q=2, t=2) == 4096
    assert max_middle_nodes("star", "vector", q=2, t=1) == 16
    assert max_middle_nodes("plus", "scalar", q=2, ell=3) == 1395
    assert max_middle_nodes("plus", "vector", q=2, t=1, ell=3) == 512
    assert max_middle_nodes("tilde", "scalar", q=4) == 42
    with pytest.raises(ValueError):
        max_middle_nodes("star", "mixed", q=2)
    with pytest.raises(ValueError):
        max_middle_nodes("ring", "scalar", q=2)


def test_min_scalar_field_size_examples():
    assert min_scalar_field_size("star", 35) == 2
    assert min_scalar_field_size("star", 36) == 3
    assert min_scalar_field_size("star", 4096) == 8
    assert scalar_bound("star", 7) == 2850 and scalar_bound("star", 8) == 4745
    assert min_scalar_field_size("tilde", 43) == 5
    assert min_scalar_field_size("tilde", 42) == 4
    with pytest.raises(ValueError):
        min_scalar_field_size("star", 0)


@pytest.mark.parametrize("family,kw", [("star", {}), ("plus", {"ell": 3}), ("tilde", {}),
                                       ("combination", {"h": 3}), ("combination", {"h": 4})])
def test_monotone_and_bracketed(family, kw):
    prev = 0
    for r in range(1, 400):
        qs = min_scalar_field_size(family, r, **kw)
        assert prime_power(qs)
        assert qs >= prev
        prev = qs
        assert scalar_bound(family, qs, **kw) >= r
        p = previous_prime_power(qs)
        if p is not None:
            assert scalar_bound(family, p, **kw) < r


def test_gap_star_t2():
    rep = gap_report("star", q=2, t=2, sample_cap=500)
    assert rep.r == 4096
    assert (rep.scalar_q, rep.previous_q, rep.previous_bound, rep.scalar_bound) == (8, 7, 2850,
                                                                                    4745)
    assert rep.vector_q == 2 and rep.vector_verified
    assert rep.ratio == 4 == 2 ** (2 * 2 / 2 + 2 / 2 - 1)
    assert rep.exponent == pytest.approx(2.0)
    assert rep.leading_exponent == 2.0 and rep.residual == pytest.approx(0.0)


def test_gap_star_t1_is_zero():
    rep = gap_report("star", q=2, t=1)
    assert rep.r == 16 and rep.scalar_q == 2 and rep.ratio == 1 and rep.exponent == 0


def test_gap_tilde():
    rep = gap_report("tilde", q=2, t=2, r=43)
    assert rep.scalar_q == 5 and rep.vector_q == 2
    assert rep.verification["checked"] == 12341


def test_gap_rejects_r_over_bound():
    with pytest.raises(ValueError):
        gap_report("star", q=2, t=1, r=17)


def test_gap_combination():
    rep = gap_report("combination", q=2, t=2, h=3)
    assert rep.r == 5 and rep.scalar_q == 4
