"""Rank-metric codes: companion-matrix codes D_t and square Gabidulin codes."""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from netgap.algebra import (FieldCtx, MatrixGF, block, find_primitive_poly, hstack,
                            matrix_rank, vstack)


@dataclass(frozen=True)
class RankCodeword:
    matrix: MatrixGF
    index: int


def _require_prime_field(ctx: FieldCtx) -> None:
    if ctx.m != 1:
        raise ValueError("rank-metric codes here are built over prime fields only")


def companion_matrix(ctx: FieldCtx, poly: Sequence[int]) -> MatrixGF:
    """Sub-diagonal ones, last column holding ``-c_0 .. -c_{t-1}``."""
    poly = [int(c) % ctx.q for c in poly]
    t = len(poly) - 1
    if t < 1 or poly[-1] != 1:
        raise ValueError("companion matrix needs a monic polynomial of degree >= 1")
    rows = [[0] * t for _ in range(t)]
    for i in range(1, t):
        rows[i][i - 1] = 1
    for i in range(t):
        rows[i][t - 1] = ctx.neg(poly[i])
    return MatrixGF(ctx, rows)


def poly_eval_matrix(C: MatrixGF, poly: Sequence[int]) -> MatrixGF:
    """``p(C)`` by Horner's rule."""
    ctx, n = C.ctx, C.rows
    acc = MatrixGF.zeros(ctx, n, n)
    eye = MatrixGF.identity(ctx, n)
    for c in reversed(poly):
        acc = acc @ C + eye.scale(c % ctx.q)
    return acc


class CompanionCode:
    """D_t = {0, I, C, C^2, ..., C^(q^t - 2)} for a primitive companion matrix C.

    Codeword index 0 is the zero matrix and index ``s + 1`` is ``C^s``.
    """

    kind = "companion"

    def __init__(self, field: FieldCtx, t: int, poly: Sequence[int] | None = None):
        _require_prime_field(field)
        if t < 1:
            raise ValueError("t must be >= 1")
        self.field = field
        self.t = t
        self.poly = tuple(poly) if poly is not None else find_primitive_poly(field.p, t)
        self.C = companion_matrix(field, self.poly)
        self.delta = t

    def __len__(self) -> int:
        return self.field.q ** self.t

    @functools.cached_property
    def _powers(self) -> tuple[MatrixGF, ...]:
        out = [MatrixGF.identity(self.field, self.t)]
        for _ in range(len(self) - 2):
            out.append(out[-1] @ self.C)
        return tuple(out)

    def power(self, s: int) -> MatrixGF:
        return self._powers[s % (len(self) - 1)]

    def codeword(self, index: int) -> RankCodeword:
        if not 0 <= index < len(self):
            raise IndexError(f"codeword index {index} out of range")
        if index == 0:
            return RankCodeword(MatrixGF.zeros(self.field, self.t, self.t), 0)
        return RankCodeword(self._powers[index - 1], index)

    def __iter__(self) -> Iterator[RankCodeword]:
        return (self.codeword(i) for i in range(len(self)))

    def descriptor(self) -> dict:
        return {"kind": "companion", "q": self.field.q, "t": self.t, "delta": self.t,
                "modulus": list(self.poly)}


def companion_code(field: FieldCtx, t: int) -> CompanionCode:
    return CompanionCode(field, t)


class GabidulinCode:
    """Square Gabidulin code of side n and minimum rank distance delta over F_q.

    Codewords are evaluations of linearized polynomials
    ``f(x) = sum_i f_i x^(q^i)`` with ``f_i`` in F_{q^n} and ``i < n - delta + 1``,
    at the points ``1, x, ..., x^(n-1)`` of F_{q^n}.  Column j of a codeword is
    the coordinate vector of ``f(x^j)``.
    """

    kind = "gabidulin"

    def __init__(self, field: FieldCtx, side: int, delta: int):
        _require_prime_field(field)
        if not 1 <= delta <= side:
            raise ValueError(f"minimum distance {delta} infeasible for side {side}")
        self.field = field
        self.side = side
        self.delta = delta
        self.n_coeffs = side - delta + 1
        self.k = side * self.n_coeffs
        self.ext = FieldCtx(field.p, side)
        q = field.q
        points = [q**j for j in range(side)]
        # frob[i][j] = (point_j)^(q^i)
        self._frob = [[self.ext.pow(g, q**i) for g in points] for i in range(self.n_coeffs)]

    def __len__(self) -> int:
        return self.field.q ** self.k

    @property
    def size(self) -> int:
        return len(self)

    def message(self, index: int) -> list[int]:
        """Base-q digits of the index, lowest digit first."""
        if not 0 <= index < len(self):
            raise IndexError(f"codeword index {index} out of range")
        q = self.field.q
        digits = []
        for _ in range(self.k):
            index, d = divmod(index, q)
            digits.append(d)
        return digits

    def index_of_message(self, digits: Sequence[int]) -> int:
        q = self.field.q
        return sum(d * q**i for i, d in enumerate(digits))

    def coefficients(self, index: int) -> list[int]:
        digits = self.message(index)
        s = self.side
        return [self.ext.from_digits(digits[i * s:(i + 1) * s]) for i in range(self.n_coeffs)]

    def codeword(self, index: int) -> RankCodeword:
        ext = self.ext
        coeffs = self.coefficients(index)
        values = []
        for j in range(self.side):
            v = 0
            for i, f in enumerate(coeffs):
                if f:
                    v = ext.add(v, ext.mul(f, self._frob[i][j]))
            values.append(ext.digits(v))
        rows = [[values[j][a] for j in range(self.side)] for a in range(self.side)]
        return RankCodeword(MatrixGF(self.field, rows), index)

    def add_indices(self, i: int, j: int) -> int:
        """Index of ``codeword(i) + codeword(j)`` (linearity in message space)."""
        ctx = self.field
        return self.index_of_message([ctx.add(a, b) for a, b in
                                      zip(self.message(i), self.message(j))])

    def descriptor(self) -> dict:
        return {"kind": "gabidulin", "q": self.field.q, "side": self.side,
                "delta": self.delta, "modulus": list(self.ext.modulus)}


def gabidulin_code(field: FieldCtx, side: int, delta: int) -> GabidulinCode:
    return GabidulinCode(field, side, delta)


def mrd_codeword(code: GabidulinCode | CompanionCode, index: int) -> RankCodeword:
    return code.codeword(index)


def rank_distance(A: MatrixGF, B: MatrixGF) -> int:
    if A.shape != B.shape or A.ctx != B.ctx:
        raise ValueError("rank distance needs equal shapes over one field")
    return matrix_rank(A - B)


@dataclass
class MRDReport:
    delta: int
    min_distance: int
    pairs_checked: int
    method: str
    violation: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None and self.min_distance >= self.delta


def verify_mrd(code, mode: str = "exhaustive", samples: int = 10_000,
               seed: int = 0) -> MRDReport:
    """Check the minimum rank distance of ``code``.

    ``exhaustive`` compares all pairs when the code has at most 256 words and
    otherwise, by linearity, the rank of every nonzero codeword (still
    exhaustive, capped at 2^12 words).  ``sampled`` draws random distinct pairs.
    """
    n = len(code)
    delta = code.delta
    if mode == "exhaustive":
        if n > 1 << 12:
            raise ValueError("exhaustive MRD check is capped at 2^12 codewords")
        if n <= 256:
            words = [code.codeword(i).matrix for i in range(n)]
            best, count, bad = None, 0, None
            for i, j in itertools.combinations(range(n), 2):
                d = rank_distance(words[i], words[j])
                count += 1
                best = d if best is None else min(best, d)
                if d < delta and bad is None:
                    bad = (i, j)
            return MRDReport(delta, best if best is not None else delta, count, "pairs", bad)
        best, bad = None, None
        for i in range(1, n):
            d = matrix_rank(code.codeword(i).matrix)
            best = d if best is None else min(best, d)
            if d < delta and bad is None:
                bad = (0, i)
        return MRDReport(delta, best, n - 1, "weights", bad)
    if mode == "sampled":
        rng = random.Random(seed)
        best, bad = None, None
        for _ in range(samples):
            i, j = rng.sample(range(n), 2) if n < 1 << 30 else (rng.randrange(n), rng.randrange(n))
            if i == j:
                continue
            d = rank_distance(code.codeword(i).matrix, code.codeword(j).matrix)
            best = d if best is None else min(best, d)
            if d < delta and bad is None:
                bad = (i, j)
        return MRDReport(delta, best, samples, "sampled", bad)
    raise ValueError(f"unknown mode {mode!r}")


def lift_scalar_solution(coeffs: Sequence[int], scalar_field: FieldCtx,
                         code: CompanionCode) -> list[MatrixGF]:
    """Map ``alpha^s -> C^s`` and ``0 -> 0_t``."""
    if (scalar_field.p != code.field.p or scalar_field.m != code.t
            or tuple(scalar_field.modulus) != tuple(code.poly)):
        raise ValueError("scalar field modulus does not match the companion polynomial")
    zero = MatrixGF.zeros(code.field, code.t, code.t)
    out = []
    for a in coeffs:
        out.append(zero if a == 0 else code.power(scalar_field.log(a)))
    return out


def block_vandermonde(codewords: Sequence[RankCodeword], h: int | None = None) -> MatrixGF:
    """Block row i is ``(I, C_i, C_i^2, ..., C_i^(h-1))``."""
    h = len(codewords) if h is None else h
    if len(codewords) != h:
        raise ValueError("need exactly h codewords")
    if len({c.matrix for c in codewords}) != h:
        raise ValueError("codewords must be distinct")
    return block([[c.matrix ** e for e in range(h)] for c in codewords])


def consecutive_block_failures(M: MatrixGF, t: int, h: int,
                               anchored: bool = False) -> list[tuple[int, int, int]]:
    """Windows ``(ell, row_block, col_block)`` of M that are not of full rank.

    With ``anchored`` only column windows starting at block column 0 are tested.
    """
    if M.shape != (h * t, h * t):
        raise ValueError("matrix is not ht x ht")
    bad = []
    for ell in range(1, h + 1):
        col_starts = [0] if anchored else range(h - ell + 1)
        for r0 in range(h - ell + 1):
            for c0 in col_starts:
                sub = M.submatrix(slice(r0 * t, (r0 + ell) * t), slice(c0 * t, (c0 + ell) * t))
                if matrix_rank(sub) != ell * t:
                    bad.append((ell, r0, c0))
    return bad


def check_consecutive_blocks(M: MatrixGF, t: int, h: int, anchored: bool = False) -> bool:
    return not consecutive_block_failures(M, t, h, anchored)


def stacked_pair(Ci: MatrixGF, Cj: MatrixGF) -> MatrixGF:
    """``[[I, C_i], [I, C_j]]``."""
    eye = MatrixGF.identity(Ci.ctx, Ci.rows)
    return vstack([hstack([eye, Ci]), hstack([eye, Cj])])
