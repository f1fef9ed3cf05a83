from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from netgap.algebra import MatrixGF, gf, matrix_rank
from netgap.rankmetric import (CompanionCode, GabidulinCode, block_vandermonde,
                               check_consecutive_blocks, companion_matrix,
                               consecutive_block_failures, lift_scalar_solution,
                               poly_eval_matrix, rank_distance, stacked_pair, verify_mrd)


def test_companion_matrix_f4():
    F = gf(2)
    C = companion_matrix(F, (1, 1, 1))
    assert C == MatrixGF(F, [[0, 1], [1, 1]])
    assert poly_eval_matrix(C, (1, 1, 1)).is_zero()


def test_companion_trivial_and_cubic():
    F = gf(2)
    assert companion_matrix(F, (0, 1)) == MatrixGF(F, [[0]])
    C = companion_matrix(F, (1, 1, 0, 1))
    assert C.shape == (3, 3)
    assert [C[i + 1, i] for i in range(2)] == [1, 1]
    assert [C[i, 2] for i in range(3)] == [1, 1, 0]
    I = MatrixGF.identity(F, 3)
    powers = [C ** k for k in range(1, 8)]
    assert powers[-1] == I and all(P != I for P in powers[:-1])


@pytest.mark.parametrize("q,t", [(2, 1), (2, 2), (3, 2), (2, 3), (5, 2), (2, 4), (3, 3)])
def test_companion_code_is_a_field_copy(q, t):
    code = CompanionCode(gf(q), t)
    words = [c.matrix for c in code]
    assert len(words) == q**t == len(set(words))
    assert words[0].is_zero() and words[1] == MatrixGF.identity(gf(q), t)
    if q**t <= 256:
        for A, B in itertools.combinations(words, 2):
            assert A @ B == B @ A
            assert rank_distance(A, B) == t


def test_companion_power_product():
    code = CompanionCode(gf(2), 2)
    C = code.C
    assert C @ (C @ C) == C ** 3 == MatrixGF.identity(gf(2), 2)
    assert code.power(3) == code.power(0)


def test_rank_distance_examples():
    F = gf(2)
    I, Z = MatrixGF.identity(F, 2), MatrixGF.zeros(F, 2, 2)
    assert rank_distance(I, I) == 0
    assert rank_distance(I, Z) == 2


def test_verify_mrd_companion_exhaustive():
    rep = verify_mrd(CompanionCode(gf(2), 2))
    assert rep.ok and rep.min_distance == 2 and rep.pairs_checked == 6
    rep = verify_mrd(CompanionCode(gf(3), 2))
    assert rep.ok and rep.min_distance == 2


def test_gabidulin_sizes_and_singleton():
    F = gf(2)
    full = GabidulinCode(F, 2, 1)
    assert full.k == 4 and len(full) == 16
    assert {full.codeword(i).matrix for i in range(16)} == {
        MatrixGF(F, [[a, b], [c, d]]) for a, b, c, d in itertools.product(range(2), repeat=4)}
    rep = verify_mrd(full)
    assert rep.ok and rep.min_distance == 1
    small = GabidulinCode(F, 2, 2)
    assert small.k == 2 and len(small) == 4
    rep = verify_mrd(small)
    assert rep.ok and rep.min_distance == 2 and rep.pairs_checked == 6
    big = GabidulinCode(F, 4, 2)
    assert big.k == 12 and len(big) == 4096
    for side in range(1, 5):
        for delta in range(1, side + 1):
            assert GabidulinCode(F, side, delta).k == side * (side - delta + 1)


@pytest.mark.parametrize("q,side,delta", [(2, 3, 2), (2, 3, 3), (3, 2, 2), (2, 4, 3),
                                          (2, 4, 4)])
def test_gabidulin_exact_min_distance(q, side, delta):
    code = GabidulinCode(gf(q), side, delta)
    rep = verify_mrd(code)
    assert rep.ok and rep.min_distance == delta


def test_gabidulin_4x4_sampled():
    code = GabidulinCode(gf(2), 4, 2)
    rep = verify_mrd(code, "sampled", samples=10_000, seed=0)
    assert rep.violation is None and rep.min_distance >= 2


def test_gabidulin_index_zero_and_injective():
    code = GabidulinCode(gf(2), 4, 2)
    assert code.codeword(0).matrix.is_zero()
    rng = random.Random(0)
    for _ in range(1000):
        i, j = rng.sample(range(len(code)), 2)
        assert code.codeword(i).matrix != code.codeword(j).matrix


def test_gabidulin_linear():
    code = GabidulinCode(gf(3), 3, 2)
    rng = random.Random(1)
    for _ in range(200):
        i, j = rng.randrange(len(code)), rng.randrange(len(code))
        s = code.add_indices(i, j)
        assert code.codeword(i).matrix + code.codeword(j).matrix == code.codeword(s).matrix


def test_gabidulin_message_round_trip():
    code = GabidulinCode(gf(2), 4, 2)
    for i in (0, 1, 77, 4095):
        assert code.index_of_message(code.message(i)) == i
    with pytest.raises(IndexError):
        code.codeword(4096)


def test_verify_mrd_catches_a_bad_code():
    class Fake:
        delta = 2
        words = [MatrixGF(gf(2), [[0, 0], [0, 0]]), MatrixGF(gf(2), [[1, 0], [0, 0]])]

        def __len__(self):
            return 2

        def codeword(self, i):
            from netgap.rankmetric import RankCodeword
            return RankCodeword(self.words[i], i)

    rep = verify_mrd(Fake())
    assert not rep.ok and rep.violation == (0, 1)


@pytest.mark.parametrize("q,t", [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2)])
def test_lift_is_field_isomorphism(q, t):
    comp = CompanionCode(gf(q), t)
    F = gf(q**t)
    lift = dict(zip(F.elements(), lift_scalar_solution(list(F.elements()), F, comp)))
    for a in F.elements():
        for b in F.elements():
            assert lift[F.add(a, b)] == lift[a] + lift[b]
            assert lift[F.mul(a, b)] == lift[a] @ lift[b]
    assert len(set(lift.values())) == q**t


def test_lift_rejects_modulus_mismatch():
    from netgap.algebra import FieldCtx
    comp = CompanionCode(gf(2), 3)
    other = FieldCtx(2, 3, (1, 0, 1, 1))  # x^3 + x^2 + 1, not the default modulus
    with pytest.raises(ValueError):
        lift_scalar_solution([1], other, comp)


def test_block_vandermonde_small():
    F = gf(2)
    code = CompanionCode(F, 1)
    M = block_vandermonde([code.codeword(0), code.codeword(1)], 2)
    assert M == MatrixGF(F, [[1, 0], [1, 1]]) and matrix_rank(M) == 2
    one = block_vandermonde([CompanionCode(gf(2), 2).codeword(2)], 1)
    assert one == MatrixGF.identity(F, 2)
    with pytest.raises(ValueError):
        block_vandermonde([code.codeword(1), code.codeword(1)], 2)


def test_block_vandermonde_full_rank_d2():
    code = CompanionCode(gf(2), 2)
    for sel in itertools.permutations(list(code), 3):
        assert matrix_rank(block_vandermonde(sel, 3)) == 6


def test_consecutive_blocks_trivial_and_adversarial():
    F = gf(2)
    assert check_consecutive_blocks(MatrixGF.identity(F, 2), 2, 1)
    rep = MatrixGF(F, [[1, 0], [1, 0]])
    assert not check_consecutive_blocks(rep, 1, 2)


def anchored_or_nonzero(q, t, h):
    code = CompanionCode(gf(q), t)
    out = []
    for sel in itertools.permutations(list(code), h):
        M = block_vandermonde(sel, h)
        anchored = check_consecutive_blocks(M, t, h, anchored=True)
        nonzero_ok = (any(c.index == 0 for c in sel)
                      or check_consecutive_blocks(M, t, h))
        out.append((anchored, nonzero_ok))
    return out


@pytest.mark.parametrize("q,t,h", [(2, 1, 2), (2, 1, 4), (2, 2, 2), (2, 2, 3), (2, 2, 4),
                                   (3, 1, 2), (3, 1, 3)])
def test_window_property_leading_or_nonzero(q, t, h):
    # windows starting at block column 0 always have full rank; any window is
    # full rank once the zero codeword is excluded
    assert all(a and b for a, b in anchored_or_nonzero(q, t, h))


def test_window_property_zero_codeword_counterexample():
    code = CompanionCode(gf(2), 2)
    sel = [code.codeword(0), code.codeword(1), code.codeword(2)]
    M = block_vandermonde(sel, 3)
    bad = consecutive_block_failures(M, 2, 3)
    # the 1x1 window at block (0, 1) is 0^1 = 0
    assert (1, 0, 1) in bad


def test_stacked_pair_rank():
    code = CompanionCode(gf(2), 2)
    for A, B in itertools.combinations([c.matrix for c in code], 2):
        assert matrix_rank(stacked_pair(A, B)) == 4


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(2, 3, 2), (3, 2, 1), (2, 4, 2)]), st.integers(0, 10**9),
       st.integers(0, 10**9))
def test_gabidulin_distance_property(params, a, b):
    q, side, delta = params
    code = GabidulinCode(gf(q), side, delta)
    i, j = a % len(code), b % len(code)
    d = rank_distance(code.codeword(i).matrix, code.codeword(j).matrix)
    assert d == 0 if i == j else d >= delta
