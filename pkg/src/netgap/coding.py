"""Scalar and vector solutions for the network families, plus verification.

A :class:`NetworkCode` stores the *global* coding matrix of every edge: a
``t x (h t)`` matrix mapping the stacked message ``(x_1, ..., x_h)`` to the
symbol carried by the edge.  Scalar codes are the case ``t = 1``.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from netgap.algebra import (FieldCtx, MatrixGF, SingularMatrixError, complete_to_full_rank,
                            gf, hstack, matrix_rank, nullspace, solve_consistent, vstack)
from netgap.network import (SOURCE, EdgeKey, Network, add_direct_links, combination_network,
                            plus_network, star_network, tilde_network)
from netgap.rankmetric import CompanionCode, GabidulinCode, companion_code, lift_scalar_solution
from netgap.subspace import grassmannian, pairwise_distance_code, triple_span_search


class SupplyError(ValueError):
    """The requested number of middle nodes exceeds what a construction supports."""


@dataclass
class NetworkCode:
    scheme: dict
    field: FieldCtx
    h: int
    t: int
    matrices: dict[EdgeKey, MatrixGF]
    provenance: dict[EdgeKey, str] = field(default_factory=dict)

    def __getitem__(self, key: EdgeKey) -> MatrixGF:
        return self.matrices[key]

    def with_matrix(self, key: EdgeKey, M: MatrixGF) -> "NetworkCode":
        mats = dict(self.matrices)
        mats[key] = M
        return NetworkCode(self.scheme, self.field, self.h, self.t, mats, dict(self.provenance))

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme, "h": self.h, "t": self.t, "field": self.field.to_dict(),
            "edges": [{"edge": list(k), "matrix": M.to_dict(),
                       "provenance": self.provenance.get(k, "")}
                      for k, M in self.matrices.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkCode":
        f = d["field"]
        ctx = FieldCtx(f["p"], f["m"], f["modulus"])
        mats, prov = {}, {}
        for rec in d["edges"]:
            key = tuple(rec["edge"])
            M = MatrixGF.from_dict(rec["matrix"])
            if M.ctx != ctx:
                raise ValueError(f"edge {key} matrix is over a different field")
            mats[key] = M
            if rec.get("provenance"):
                prov[key] = rec["provenance"]
        return cls(d["scheme"], ctx, int(d["h"]), int(d["t"]), mats, prov)


def scalar_scheme(q: int) -> dict:
    return {"scalar": q}


def vector_scheme(q: int, t: int) -> dict:
    return {"vector": {"q": q, "t": t}}


# -- shared assembly ---------------------------------------------------------

def _fill_three_layer(net: Network, blocks: Sequence[MatrixGF], t: int, ctx: FieldCtx,
                      scheme: dict, label: str) -> NetworkCode:
    """Middle node i forwards ``blocks[i]`` split into t-row edges; direct links complete.

    ``blocks[i]`` has one t-row slice per parallel source->middle edge.
    """
    h = net.h
    mats: dict[EdgeKey, MatrixGF] = {}
    prov: dict[EdgeKey, str] = {}
    slices = []
    for i, B in enumerate(blocks):
        if B.cols != h * t:
            raise ValueError("block width does not match h*t")
        slices.append([B.row_block(k * t, (k + 1) * t) for k in range(B.rows // t)])
    for e in net.edges:
        if e.tail == SOURCE and net.layer[e.head] == "middle":
            i = int(e.head[1:])
            mats[e.key] = slices[i][e.mult]
            prov[e.key] = f"{label}:block{i}.{e.mult}"
    for rec in net.receivers:
        stacked = []
        direct = []
        for key in rec.in_edges:
            tail, _, mult = key
            if tail == SOURCE:
                direct.append(key)
                continue
            i = int(tail[1:])
            M = slices[i][mult]
            mats[key] = M
            prov[key] = f"{label}:block{i}.{mult}"
            stacked.append(M)
        if direct:
            P = complete_to_full_rank(vstack(stacked), len(direct) * t)
            for n, key in enumerate(direct):
                mats[key] = P.row_block(n * t, (n + 1) * t)
                prov[key] = "completion"
    return NetworkCode(scheme, ctx, h, t, mats, prov)


def _pad(B: MatrixGF, extra_cols: int) -> MatrixGF:
    if not extra_cols:
        return B
    return hstack([B, MatrixGF.zeros(B.ctx, B.rows, extra_cols)])


def _selector(ctx: FieldCtx, h: int, t: int, j: int) -> MatrixGF:
    """``(0 .. I_t .. 0)`` with the identity in block column j."""
    z = MatrixGF.zeros(ctx, t, t)
    return hstack([MatrixGF.identity(ctx, t) if b == j else z for b in range(h)])


# -- combination network ------------------------------------------------------

def mds_regime(h: int, r: int, qs: int) -> str | None:
    """Which extended Reed-Solomon construction applies, or None."""
    if h < 1 or h > r:
        return None
    if r <= qs + 1:
        return "rs"
    if r == qs + 2 and qs % 2 == 0 and h in (3, qs - 1):
        return "hyperoval" if h == 3 else "hyperoval-dual"
    return None


def mds_columns(h: int, r: int, ctx: FieldCtx) -> list[list[int]]:
    """Generator columns of an ``[r, h, r-h+1]`` MDS code, one per middle node.

    Nodes take ``(1, a, ..., a^(h-1))`` for ``a = 0, 1, alpha, alpha^2, ...``;
    the last node takes ``(0, ..., 0, 1)``.  In the ``r = q+2`` regime with
    h = 3 node ``r-2`` takes ``(0, 1, 0)``; for h = q-1 the dual of that
    hyperoval code is used.
    """
    regime = mds_regime(h, r, ctx.q)
    if regime is None:
        raise SupplyError(f"no supported MDS construction for h={h}, r={r}, q_s={ctx.q}; "
                          "only r <= q_s+1, or r = q_s+2 with q_s even and h in {3, q_s-1}")
    points = ctx.power_order()
    if regime == "rs":
        cols = [[ctx.pow(a, e) for e in range(h)] for a in points[:r - 1]]
        cols.append([0] * (h - 1) + [1])
        return cols
    three = [[ctx.pow(a, e) for e in range(3)] for a in points]
    three += [[0, 1, 0], [0, 0, 1]]
    if regime == "hyperoval":
        return three
    G3 = MatrixGF(ctx, list(zip(*three)))
    dual = nullspace(G3)
    return [list(c) for c in zip(*dual.data)]


def scalar_solve_combination(h: int, r: int, ctx: FieldCtx | int,
                             net: Network | None = None) -> NetworkCode:
    ctx = gf(ctx) if isinstance(ctx, int) else ctx
    net = net or combination_network(h, r, h)
    cols = mds_columns(h, r, ctx)
    blocks = [MatrixGF(ctx, [c]) for c in cols]
    return _fill_three_layer(net, blocks, 1, ctx, scalar_scheme(ctx.q), "mds")


def vector_regime(h: int, q: int, t: int, r: int) -> str | None:
    qt = q**t
    if r <= qt + 1:
        return "mrd"
    if r == qt + 2 and h == 3 and qt & (qt - 1) == 0:
        return "mrd+extra"
    return None


def combination_blocks(h: int, code: CompanionCode, r: int) -> list[MatrixGF]:
    ctx, t = code.field, code.t
    regime = vector_regime(h, ctx.q, t, r)
    if regime is None:
        raise SupplyError(f"r={r} exceeds q^t+1 (or q^t+2 for h=3, q^t a power of two)")
    n_code = r - 1 if regime == "mrd" else r - 2
    blocks = [hstack([code.codeword(i).matrix ** e for e in range(h)]) for i in range(n_code)]
    if regime == "mrd+extra":
        blocks.append(_selector(ctx, h, t, 1))
    blocks.append(_selector(ctx, h, t, h - 1))
    return blocks


def vector_solve_combination(h: int, q: int, t: int, r: int,
                             net: Network | None = None) -> NetworkCode:
    code = companion_code(gf(q), t)
    net = net or combination_network(h, r, h)
    return _fill_three_layer(net, combination_blocks(h, code, r), t, code.field,
                             vector_scheme(q, t), "block-vandermonde")


# -- star / plus networks -----------------------------------------------------

def _scalar_blocks(ell: int, r: int, ctx: FieldCtx, min_dist: int, extra: int) -> list[MatrixGF]:
    code = pairwise_distance_code(2 * ell, ell, ctx, min_dist)
    if r > len(code):
        raise SupplyError(f"r={r} exceeds the {len(code)} available subspace blocks over "
                          f"F_{ctx.q}")
    return [_pad(code[i].basis, extra) for i in range(r)]


def scalar_solve_star(ell: int, r: int, ctx: FieldCtx | int, net: Network | None = None,
                      extra_links: int = 0) -> NetworkCode:
    """Blocks are ell-subspaces of F^(2 ell) meeting pairwise in at most a line."""
    ctx = gf(ctx) if isinstance(ctx, int) else ctx
    net = net or _odd(star_network(ell, r), extra_links)
    blocks = _scalar_blocks(ell, r, ctx, 2 * ell - 2, net.h - 2 * ell)
    return _fill_three_layer(net, blocks, 1, ctx, scalar_scheme(ctx.q), "subspace")


def star_code(ell: int, q: int, t: int, family: str = "star") -> GabidulinCode:
    delta = (ell - 1) * t if family == "star" else t
    return GabidulinCode(gf(q), ell * t, delta)


def star_block(code: GabidulinCode, i: int, extra_cols: int = 0) -> MatrixGF:
    """``(I_{ell t}, C_i)`` padded with zero columns for odd message counts."""
    C = code.codeword(i).matrix
    return _pad(hstack([MatrixGF.identity(C.ctx, C.rows), C]), extra_cols)


def _vector_star(ell, q, t, r, net, family):
    code = star_code(ell, q, t, family)
    if r > len(code):
        raise SupplyError(f"r={r} exceeds the MRD code size {len(code)}")
    extra = (net.h - 2 * ell) * t
    blocks = [star_block(code, i, extra) for i in range(r)]
    return _fill_three_layer(net, blocks, t, code.field, vector_scheme(q, t), "mrd")


def _odd(net: Network, extra_links: int) -> Network:
    return add_direct_links(net, extra_links, h=net.h + extra_links) if extra_links else net


def vector_solve_star(ell: int, q: int, t: int, r: int, net: Network | None = None,
                      extra_links: int = 0) -> NetworkCode:
    net = net or _odd(star_network(ell, r), extra_links)
    return _vector_star(ell, q, t, r, net, "star")


def solve_plus(ell: int, r: int, scheme: dict, net: Network | None = None,
               extra_links: int = 0) -> NetworkCode:
    """Scalar blocks: the whole Grassmannian; vector blocks: MRD with delta = t."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    net = net or _odd(plus_network(ell, r), extra_links)
    if "scalar" in scheme:
        ctx = gf(scheme["scalar"])
        blocks = _scalar_blocks(ell, r, ctx, 2, net.h - 2 * ell)
        return _fill_three_layer(net, blocks, 1, ctx, scalar_scheme(ctx.q), "grassmannian")
    v = scheme["vector"]
    return _vector_star(ell, v["q"], v["t"], r, net, "plus")


# -- tilde network ------------------------------------------------------------

def tilde_vector_code(q: int, t: int, r: int):
    return triple_span_search(3 * t, t, gf(q), 2 * t, r)


def solve_tilde(r: int, scheme: dict, net: Network | None = None) -> NetworkCode:
    net = net or tilde_network(r)
    if "scalar" in scheme:
        ctx = gf(scheme["scalar"])
        points = list(grassmannian(3, 1, ctx))
        if r > 2 * len(points):
            raise SupplyError(f"r={r} exceeds 2(q_s^2+q_s+1) = {2 * len(points)}")
        blocks = [points[i // 2].basis for i in range(r)]
        return _fill_three_layer(net, blocks, 1, ctx, scalar_scheme(ctx.q), "line")
    v = scheme["vector"]
    q, t = v["q"], v["t"]
    code = tilde_vector_code(q, t, r)
    if len(code) < r:
        raise SupplyError(f"triple-span search found only {len(code)} codewords, need {r}")
    blocks = [code[i].basis for i in range(r)]
    return _fill_three_layer(net, blocks, t, code.ctx, vector_scheme(q, t), "triple-span")


# -- verification -------------------------------------------------------------

@dataclass
class ReceiverResult:
    index: int
    receiver: str
    rank: int
    required: int

    @property
    def passed(self) -> bool:
        return self.rank == self.required

    def to_dict(self) -> dict:
        return {"index": self.index, "receiver": self.receiver, "rank": self.rank,
                "required": self.required, "pass": self.passed}


@dataclass
class VerificationReport:
    records: list[ReceiverResult]
    elapsed: float = 0.0
    mode: str = "exhaustive"
    total_receivers: int | None = None
    # streaming runs keep only failing records
    n_checked: int | None = None
    # edges whose matrix is not computable from their tail's inputs
    inconsistent: list = field(default_factory=list)

    @property
    def checked(self) -> int:
        return len(self.records) if self.n_checked is None else self.n_checked

    @property
    def failed(self) -> int:
        return sum(not r.passed for r in self.records)

    @property
    def passed(self) -> int:
        return self.checked - self.failed

    @property
    def solved(self) -> bool:
        return self.checked > 0 and self.failed == 0 and not self.inconsistent

    def pass_set(self) -> frozenset[int]:
        return frozenset(r.index for r in self.records if r.passed)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"mode": self.mode, "checked": self.checked, "passed": self.passed,
             "failed": self.failed, "solved": self.solved,
             "total_receivers": self.total_receivers or len(self.records),
             "receivers": [r.to_dict() for r in self.records],
             "inconsistent_edges": [list(k) for k in self.inconsistent]}
        if timing:
            d["elapsed_s"] = round(self.elapsed, 6)
        return d


def transfer_matrix(net: Network, code: NetworkCode, receiver) -> MatrixGF:
    rec = net.receiver(receiver) if isinstance(receiver, (int, str)) else receiver
    try:
        return vstack([code.matrices[k] for k in rec.in_edges])
    except KeyError as exc:
        raise KeyError(f"no coding matrix for edge {exc.args[0]}") from None


_worker_ctx: FieldCtx | None = None


def _init_worker(ctx: FieldCtx) -> None:
    global _worker_ctx
    _worker_ctx = ctx


def _rank_chunk(chunk: list[tuple[tuple, int]]) -> list[int]:
    ctx = _worker_ctx
    return [matrix_rank(MatrixGF._raw(ctx, data, cols)) for data, cols in chunk]


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("NETGAP_WORKERS", "1") or 1)
    return max(1, workers)


def rank_many(ctx: FieldCtx, mats: list[MatrixGF], workers: int | None = 1) -> list[int]:
    workers = resolve_workers(workers)
    if workers == 1 or len(mats) < 64:
        return [matrix_rank(M) for M in mats]
    payload = [(M.data, M.cols) for M in mats]
    size = math.ceil(len(payload) / (workers * 4))
    chunks = [payload[i:i + size] for i in range(0, len(payload), size)]
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(ctx,)) as pool:
        out: list[int] = []
        for part in pool.map(_rank_chunk, chunks):
            out.extend(part)
    return out


def verify_solution(net: Network, code: NetworkCode, workers: int | None = 1) -> VerificationReport:
    """Rank of every receiver's transfer matrix against h*t."""
    start = time.perf_counter()
    required = net.h * code.t
    if code.h != net.h:
        raise ValueError(f"code is for h={code.h}, network has h={net.h}")
    mats = [transfer_matrix(net, code, rec) for rec in net.receivers]
    ranks = rank_many(code.field, mats, workers)
    records = [ReceiverResult(rec.index, rec.id, rk, required)
               for rec, rk in zip(net.receivers, ranks)]
    return VerificationReport(records, time.perf_counter() - start,
                              inconsistent=inconsistent_edges(net, code))


def inconsistent_edges(net: Network, code: NetworkCode) -> list[EdgeKey]:
    """Edges whose global matrix has the wrong shape or leaves its tail's span."""
    bad = []
    shape = (code.t, net.h * code.t)
    for key in (e.key for e in net.edges):
        if key in code.matrices and code.matrices[key].shape != shape:
            bad.append(key)
    for node, outs in net.out_edges.items():
        if node == SOURCE or not outs:
            continue
        S = vstack([code.matrices[k] for k in net.in_edges[node]])
        base = matrix_rank(S)
        for key in outs:
            G = code.matrices.get(key)
            if G is None:
                raise KeyError(f"no coding matrix for edge {key}")
            if key not in bad and matrix_rank(vstack([S, G])) != base:
                bad.append(key)
    return bad


# -- large star/plus instances without materializing the network ---------------

def pair_unrank(index: int, r: int) -> tuple[int, int]:
    """Inverse of the lexicographic rank of 2-subsets of range(r)."""
    i = 0
    while index >= r - 1 - i:
        index -= r - 1 - i
        i += 1
    return i, i + 1 + index


def pair_rank(i: int, j: int, r: int) -> int:
    return i * (2 * r - i - 1) // 2 + (j - i - 1)


_star_worker: dict = {}


def _star_row_task(args) -> tuple[int, list[tuple[int, int, int]]]:
    """All receivers (i, j > i) for one i; returns (count, failures)."""
    ell, q, t, r, family, i = args
    key = (ell, q, t, family)
    if key not in _star_worker:
        _star_worker.clear()
        _star_worker[key] = (star_code(ell, q, t, family), {})
    code, cache = _star_worker[key]
    direct_rows = (1 if family == "star" else ell - 1) * t

    def blk(n):
        if n not in cache:
            cache[n] = star_block(code, n)
        return cache[n]

    bad = []
    for j in range(i + 1, r):
        S = vstack([blk(i), blk(j)])
        rk = matrix_rank(vstack([S, complete_to_full_rank(S, direct_rows)]))
        if rk != 2 * ell * t:
            bad.append((pair_rank(i, j, r), i, j, rk))
    return r - 1 - i, bad


def verify_star_instance(ell: int, q: int, t: int, r: int, family: str = "star",
                         samples: int | None = 2000, seed: int = 0, exhaustive: bool = False,
                         workers: int | None = 1) -> VerificationReport:
    """Check receivers of the vector star/plus solution by direct construction.

    The transfer matrix of receiver (i, j) is ``[B_i; B_j; P_ij]`` exactly as
    the assembled network code would produce it.  Exhaustive runs stream over
    the rows i and keep only failing records plus a pass count.
    """
    start = time.perf_counter()
    code = star_code(ell, q, t, family)
    if r > len(code):
        raise SupplyError(f"r={r} exceeds the MRD code size {len(code)}")
    n_recv = math.comb(r, 2)
    required = 2 * ell * t
    if exhaustive or samples is None or samples >= n_recv:
        tasks = [(ell, q, t, r, family, i) for i in range(r - 1)]
        workers = resolve_workers(workers)
        if workers == 1:
            results = [_star_row_task(task) for task in tasks]
        else:
            with ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_star_row_task, tasks, chunksize=8))
        checked = sum(c for c, _ in results)
        failures = [b for _, bad in results for b in bad]
        records = [ReceiverResult(idx, f"r{idx}", rk, required) for idx, _, _, rk in failures]
        return VerificationReport(records, time.perf_counter() - start, "exhaustive", n_recv,
                                  checked)
    indices = sorted(random.Random(seed).sample(range(n_recv), samples))
    blocks: dict[int, MatrixGF] = {}
    direct_rows = (1 if family == "star" else ell - 1) * t
    mats = []
    for idx in indices:
        i, j = pair_unrank(idx, r)
        for n in (i, j):
            if n not in blocks:
                blocks[n] = star_block(code, n)
        S = vstack([blocks[i], blocks[j]])
        mats.append(vstack([S, complete_to_full_rank(S, direct_rows)]))
    ranks = rank_many(code.field, mats, workers)
    records = [ReceiverResult(idx, f"r{idx}", rk, required) for idx, rk in zip(indices, ranks)]
    return VerificationReport(records, time.perf_counter() - start,
                              f"sampled({samples}, seed={seed})", n_recv)


# -- simulation and decoding ---------------------------------------------------

def random_message(ctx: FieldCtx, h: int, t: int, rng: random.Random) -> MatrixGF:
    return MatrixGF.column(ctx, [rng.randrange(ctx.q) for _ in range(h * t)])


def local_kernels(net: Network, code: NetworkCode) -> dict[EdgeKey, MatrixGF]:
    """Local map L_e with ``L_e @ (stacked in-edge matrices of tail) == G_e``.

    Raises SingularMatrixError when an edge asks for something its tail
    node cannot compute from its inputs.
    """
    kernels: dict[EdgeKey, MatrixGF] = {}
    for node in net.topological_order():
        if node == SOURCE:
            continue
        outs = net.out_edges[node]
        if not outs:
            continue
        S = vstack([code.matrices[k] for k in net.in_edges[node]])
        ST = S.T
        cache: dict[MatrixGF, MatrixGF] = {}
        for key in outs:
            G = code.matrices[key]
            if G not in cache:
                try:
                    cache[G] = solve_consistent(ST, G.T).T
                except SingularMatrixError:
                    raise SingularMatrixError(
                        f"edge {key} is not computable at node {node}") from None
            kernels[key] = cache[G]
    return kernels


def simulate(net: Network, code: NetworkCode, msg: MatrixGF,
             kernels: dict[EdgeKey, MatrixGF] | None = None) -> dict[str, MatrixGF]:
    """Push ``msg`` through the network node by node using local kernels."""
    if msg.rows != net.h * code.t or msg.cols != 1:
        raise ValueError("message must be a column of length h*t")
    kernels = local_kernels(net, code) if kernels is None else kernels
    symbol: dict[EdgeKey, MatrixGF] = {}
    for key in net.out_edges[SOURCE]:
        symbol[key] = code.matrices[key] @ msg
    for node in net.topological_order():
        if node == SOURCE or not net.out_edges[node]:
            continue
        incoming = vstack([symbol[k] for k in net.in_edges[node]])
        for key in net.out_edges[node]:
            symbol[key] = kernels[key] @ incoming
    return {rec.id: vstack([symbol[k] for k in rec.in_edges]) for rec in net.receivers}


def decode_receiver(net: Network, code: NetworkCode, receiver, observation: MatrixGF) -> MatrixGF:
    T = transfer_matrix(net, code, receiver)
    if matrix_rank(T) != net.h * code.t:
        raise SingularMatrixError("receiver transfer matrix is rank deficient")
    return solve_consistent(T, observation)


# -- mapping codes ------------------------------------------------------------

def lift_network_code(scalar: NetworkCode, companion: CompanionCode) -> NetworkCode:
    """Replace every scalar coefficient by its D_t matrix."""
    if scalar.t != 1:
        raise ValueError("only scalar codes can be lifted")
    mats = {}
    for key, M in scalar.matrices.items():
        mats[key] = hstack(lift_scalar_solution(M.data[0], scalar.field, companion))
    q, t = companion.field.q, companion.t
    prov = {k: "lift:" + v for k, v in scalar.provenance.items()}
    return NetworkCode(vector_scheme(q, t), companion.field, scalar.h, t, mats, prov)


def transport_code(code: NetworkCode, net: Network) -> NetworkCode:
    """Carry a code through normalize_min_cut / remove_parallel_edges."""
    mats, prov = {}, {}
    for e in net.edges:
        if e.origin is not None:
            mats[e.key] = code.matrices[e.origin]
            prov[e.key] = code.provenance.get(e.origin, "")
        elif e.select is not None:
            mats[e.key] = _selector(code.field, code.h, code.t, e.select)
            prov[e.key] = f"decode-select:{e.select}"
        else:
            raise ValueError(f"edge {e.key} has no origin in the parent network")
    return NetworkCode(code.scheme, code.field, code.h, code.t, mats, prov)
