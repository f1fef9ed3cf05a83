"""Grassmannians, subspace distance, spreads and searched subspace codes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from netgap.algebra import FieldCtx, MatrixGF, gf, matrix_rank, row_space_basis, vstack

GRASSMANNIAN_CAP = 10**6


def q_binomial(n: int, r: int, q: int) -> int:
    """Number of r-dimensional subspaces of F_q^n."""
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    num = den = 1
    for i in range(r):
        num *= q**n - q**i
        den *= q**r - q**i
    return num // den


class Subspace:
    """A subspace of F_q^n stored by its RREF basis."""

    __slots__ = ("basis", "n", "k", "_hash")

    def __init__(self, basis: MatrixGF):
        # caller guarantees RREF with no zero rows
        self.basis = basis
        self.n = basis.cols
        self.k = basis.rows
        self._hash = hash((basis.ctx, basis.cols, basis.data))

    @property
    def ctx(self) -> FieldCtx:
        return self.basis.ctx

    def key(self) -> tuple:
        return self.basis.data

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.n == other.n
                and self.basis.ctx == other.basis.ctx and self.basis.data == other.basis.data)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Subspace(n={self.n}, k={self.k}, basis={[list(r) for r in self.basis.data]})"

    def vectors(self) -> Iterator[tuple[int, ...]]:
        """All q^k vectors of the subspace."""
        ctx = self.ctx
        for coeffs in itertools.product(range(ctx.q), repeat=self.k):
            v = [0] * self.n
            for c, row in zip(coeffs, self.basis.data):
                if c:
                    v = [ctx.add(a, ctx.mul(c, b)) for a, b in zip(v, row)]
            yield tuple(v)

    def contains(self, vec: Sequence[int]) -> bool:
        probe = vstack([self.basis, MatrixGF(self.ctx, [vec], self.n)]) if self.k else \
            MatrixGF(self.ctx, [vec], self.n)
        return matrix_rank(probe) == self.k


def subspace_from_matrix(M: MatrixGF) -> Subspace:
    return Subspace(row_space_basis(M))


def _check_ambient(subspaces: Sequence[Subspace]) -> None:
    if len({(s.n, s.ctx) for s in subspaces}) > 1:
        raise ValueError("subspaces live in different ambient spaces")


def span_dim(subspaces: Sequence[Subspace]) -> int:
    _check_ambient(subspaces)
    mats = [s.basis for s in subspaces if s.k]
    if not mats:
        return 0
    return matrix_rank(vstack(mats))


def span(subspaces: Sequence[Subspace]) -> Subspace:
    _check_ambient(subspaces)
    return subspace_from_matrix(vstack([s.basis for s in subspaces]))


def subspace_distance(U: Subspace, V: Subspace) -> int:
    return 2 * span_dim([U, V]) - U.k - V.k


def grassmannian(n: int, k: int, ctx: FieldCtx | int) -> Iterator[Subspace]:
    """All k-subspaces of F_q^n, ordered by pivot set then by free entries.

    Both orders are lexicographic, so the stream is fully deterministic.
    """
    ctx = gf(ctx) if isinstance(ctx, int) else ctx
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if q_binomial(n, k, ctx.q) > GRASSMANNIAN_CAP:
        raise ValueError("Grassmannian too large for enumeration")
    if k == 0:
        yield Subspace(MatrixGF.zeros(ctx, 0, n))
        return
    for pivots in itertools.combinations(range(n), k):
        pivset = set(pivots)
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivset]
        for values in itertools.product(range(ctx.q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            yield Subspace(MatrixGF._raw(ctx, tuple(tuple(r) for r in rows), n))


@dataclass
class SubspaceCode:
    """A list of k-subspaces of F_q^n with a verified property.

    ``prop`` is one of ``{"min_subspace_distance": d}``, ``{"triple_span": s}``
    or ``{"pairwise_intersection": d}``.
    """

    n: int
    k: int
    ctx: FieldCtx
    subspaces: list[Subspace]
    prop: dict
    notes: dict = field(default_factory=dict)
    verified: bool = False

    def __post_init__(self):
        for s in self.subspaces:
            if (s.n, s.k) != (self.n, self.k) or s.ctx != self.ctx:
                raise ValueError("subspace does not match code parameters")
        self.verified = verify_property(self.subspaces, self.prop) is None
        if not self.verified:
            raise ValueError(f"subspace code fails its declared property {self.prop}")

    def __len__(self):
        return len(self.subspaces)

    def __getitem__(self, i):
        return self.subspaces[i]

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "q": self.ctx.q, "field": self.ctx.to_dict(),
                "property": dict(self.prop), "notes": dict(self.notes),
                "bases": [s.basis.entries() for s in self.subspaces]}

    @classmethod
    def from_dict(cls, d: dict) -> "SubspaceCode":
        f = d.get("field")
        ctx = FieldCtx(f["p"], f["m"], f["modulus"]) if f else gf(d["q"])
        n, k = d["n"], d["k"]
        subs = [subspace_from_matrix(MatrixGF(ctx, [flat[i * n:(i + 1) * n] for i in range(k)], n))
                for flat in d["bases"]]
        return cls(n, k, ctx, subs, d["property"], d.get("notes", {}))


def verify_property(subspaces: Sequence[Subspace], prop: dict):
    """First violating pair/triple of indices, or None."""
    if len(set(subspaces)) != len(subspaces):
        return ("duplicate",)
    if "min_subspace_distance" in prop:
        d = prop["min_subspace_distance"]
        if d <= 2 and len({s.k for s in subspaces}) <= 1:
            # equal dimensions: distance is 2*(dim(U+V) - k) >= 2 iff U != V
            return None
        for i, j in itertools.combinations(range(len(subspaces)), 2):
            if subspace_distance(subspaces[i], subspaces[j]) < d:
                return (i, j)
        return None
    if "pairwise_intersection" in prop:
        d = prop["pairwise_intersection"]
        for i, j in itertools.combinations(range(len(subspaces)), 2):
            U, V = subspaces[i], subspaces[j]
            if U.k + V.k - span_dim([U, V]) > d:
                return (i, j)
        return None
    if "triple_span" in prop:
        s = prop["triple_span"]
        for i, j, l in itertools.combinations(range(len(subspaces)), 3):
            if span_dim([subspaces[i], subspaces[j], subspaces[l]]) < s:
                return (i, j, l)
        return None
    raise ValueError(f"unknown subspace code property {prop}")


def spread(n: int, k: int, ctx: FieldCtx | int) -> SubspaceCode:
    """Desarguesian spread of F_q^n by k-subspaces, q prime.

    Cosets ``alpha^i * F_{q^k}`` of the subfield inside F_{q^n}, read through
    the polynomial basis of F_{q^n}.
    """
    ctx = gf(ctx) if isinstance(ctx, int) else ctx
    if ctx.m != 1:
        raise ValueError("spreads are built over prime fields only")
    if k < 1 or n % k:
        raise ValueError(f"k={k} does not divide n={n}")
    q = ctx.q
    big = FieldCtx(q, n)
    count = (q**n - 1) // (q**k - 1)
    step = count  # alpha^count generates the subfield's multiplicative group
    sub = [big.pow(big.alpha, step * j) for j in range(q**k - 1)]
    members = []
    for i in range(count):
        a = big.pow(big.alpha, i)
        vecs = [big.digits(big.mul(a, s)) for s in sub]
        members.append(subspace_from_matrix(MatrixGF(ctx, vecs, n)))
    return SubspaceCode(n, k, ctx, members, {"min_subspace_distance": 2 * k},
                        {"construction": "spread"})


def triple_span_search(n: int, k: int, ctx: FieldCtx | int, min_span: int,
                       target_size: int) -> SubspaceCode:
    """Greedy code in which any 3 distinct codewords span >= min_span dimensions.

    Candidates are the members of a spread (when k | n) followed by the
    Grassmannian stream.  A candidate W is rejected iff some span of two chosen
    codewords with dimension below ``min_span`` still has
    ``dim(S + W) < min_span``; those low spans are kept deduplicated.
    The result is re-verified over all triples before it is returned.
    """
    ctx = gf(ctx) if isinstance(ctx, int) else ctx
    seed: list[Subspace] = list(spread(n, k, ctx).subspaces) if n % k == 0 and ctx.m == 1 else []
    chosen: list[Subspace] = []
    seen: set[Subspace] = set()
    low_spans: set[Subspace] = set()

    def candidates() -> Iterable[Subspace]:
        yield from seed
        yield from grassmannian(n, k, ctx)

    for W in candidates():
        if len(chosen) >= target_size:
            break
        if W in seen:
            continue
        seen.add(W)
        if any(span_dim([S, W]) < min_span for S in low_spans):
            continue
        for U in chosen:
            S = span([U, W])
            if S.k < min_span:
                low_spans.add(S)
        chosen.append(W)
    notes = {"construction": "greedy triple-span search (spread seeded)",
             "target": target_size, "reached": len(chosen) >= target_size,
             "best_size": len(chosen)}
    return SubspaceCode(n, k, ctx, chosen, {"triple_span": min_span}, notes)


def pairwise_distance_code(two_ell: int, ell: int, ctx: FieldCtx | int,
                           min_dist: int) -> SubspaceCode:
    """ell-subspaces of F_q^(2 ell) with pairwise subspace distance >= min_dist.

    Distance 2 is the whole Grassmannian; distance 2*ell - 2 is a greedy pass.
    """
    ctx = gf(ctx) if isinstance(ctx, int) else ctx
    if two_ell != 2 * ell:
        raise ValueError("ambient dimension must be 2*ell")
    if min_dist not in (2, 2 * ell - 2):
        raise ValueError("supported minimum distances are 2 and 2*ell-2")
    if min_dist == 2:
        subs = list(grassmannian(two_ell, ell, ctx))
        return SubspaceCode(two_ell, ell, ctx, subs, {"min_subspace_distance": 2},
                            {"construction": "grassmannian"})
    chosen: list[Subspace] = []
    for W in grassmannian(two_ell, ell, ctx):
        if all(subspace_distance(U, W) >= min_dist for U in chosen):
            chosen.append(W)
    return SubspaceCode(two_ell, ell, ctx, chosen, {"min_subspace_distance": min_dist},
                        {"construction": "greedy"})
