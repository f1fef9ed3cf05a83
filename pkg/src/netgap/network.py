"""Generators for the combination-network family and its structural rewrites."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import networkx as nx

SOURCE = "s"

EdgeKey = tuple  # (tail, head, mult)


@dataclass(frozen=True)
class Node:
    id: str
    layer: str  # source | middle | relay | receiver


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    mult: int = 0
    # parent-network edge whose coding matrix this edge repeats
    origin: tuple | None = None
    # message block forwarded by a decode relay
    select: int | None = None

    @property
    def key(self) -> EdgeKey:
        return (self.tail, self.head, self.mult)

    def to_dict(self) -> dict:
        d = {"tail": self.tail, "head": self.head, "mult": self.mult}
        if self.origin is not None:
            d["origin"] = list(self.origin)
        if self.select is not None:
            d["select"] = self.select
        return d


@dataclass(frozen=True)
class Receiver:
    id: str
    index: int
    in_edges: tuple[EdgeKey, ...]
    watched: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Network:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    h: int
    family: dict
    t: int = 1
    watched: dict = field(default_factory=dict)  # receiver id -> middle indices

    @functools.cached_property
    def layer(self) -> dict[str, str]:
        return {n.id: n.layer for n in self.nodes}

    @functools.cached_property
    def in_edges(self) -> dict[str, list[EdgeKey]]:
        out: dict[str, list[EdgeKey]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            out[e.head].append(e.key)
        return out

    @functools.cached_property
    def out_edges(self) -> dict[str, list[EdgeKey]]:
        out: dict[str, list[EdgeKey]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            out[e.tail].append(e.key)
        return out

    @functools.cached_property
    def edge_map(self) -> dict[EdgeKey, Edge]:
        return {e.key: e for e in self.edges}

    @functools.cached_property
    def receivers(self) -> tuple[Receiver, ...]:
        recs = [n.id for n in self.nodes if n.layer == "receiver"]
        return tuple(Receiver(rid, i, tuple(self.in_edges[rid]), tuple(self.watched.get(rid, ())))
                     for i, rid in enumerate(recs))

    def receiver(self, rid: str | int) -> Receiver:
        if isinstance(rid, int):
            return self.receivers[rid]
        for r in self.receivers:
            if r.id == rid:
                return r
        raise KeyError(f"unknown receiver {rid!r}")

    def middle_nodes(self) -> list[str]:
        return [n.id for n in self.nodes if n.layer == "middle"]

    def topological_order(self) -> list[str]:
        g = nx.MultiDiGraph()
        g.add_nodes_from(n.id for n in self.nodes)
        g.add_edges_from((e.tail, e.head) for e in self.edges)
        return list(nx.lexicographical_topological_sort(g))

    def is_acyclic(self) -> bool:
        g = nx.DiGraph()
        g.add_edges_from((e.tail, e.head) for e in self.edges)
        return nx.is_directed_acyclic_graph(g)

    def is_simple(self) -> bool:
        pairs = [(e.tail, e.head) for e in self.edges]
        return len(pairs) == len(set(pairs))

    def with_h(self, h: int) -> "Network":
        return Network(self.nodes, self.edges, h, dict(self.family, h=h), self.t, self.watched)

    def to_dict(self) -> dict:
        return {"family": self.family, "h": self.h, "t": self.t,
                "nodes": [{"id": n.id, "layer": n.layer} for n in self.nodes],
                "edges": [e.to_dict() for e in self.edges],
                "watched": {k: list(v) for k, v in self.watched.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "Network":
        nodes = tuple(Node(n["id"], n["layer"]) for n in d["nodes"])
        ids = {n.id for n in nodes}
        edges = []
        for e in d["edges"]:
            if e["tail"] not in ids or e["head"] not in ids:
                raise ValueError(f"edge {e} references an unknown node")
            edges.append(Edge(e["tail"], e["head"], int(e.get("mult", 0)),
                              tuple(e["origin"]) if e.get("origin") is not None else None,
                              e.get("select")))
        watched = {k: tuple(v) for k, v in d.get("watched", {}).items()}
        return cls(nodes, tuple(edges), int(d["h"]), d["family"], int(d.get("t", 1)), watched)


def mid(i: int) -> str:
    return f"m{i}"


def _three_layer(r: int, s: int, h: int, per_middle: int, direct: int, family: dict) -> Network:
    if s > r:
        raise ValueError(f"s={s} exceeds r={r}")
    nodes = [Node(SOURCE, "source")] + [Node(mid(i), "middle") for i in range(r)]
    edges = [Edge(SOURCE, mid(i), k) for i in range(r) for k in range(per_middle)]
    watched = {}
    for idx, subset in enumerate(itertools.combinations(range(r), s)):
        rid = f"r{idx}"
        nodes.append(Node(rid, "receiver"))
        watched[rid] = subset
        for i in subset:
            edges.extend(Edge(mid(i), rid, k) for k in range(per_middle))
        edges.extend(Edge(SOURCE, rid, k) for k in range(direct))
    return Network(tuple(nodes), tuple(edges), h, family, 1, watched)


def combination_network(h: int, r: int, s: int) -> Network:
    fam = {"name": "combination", "h": h, "r": r, "s": s, "ell": 1, "extra_links": 0}
    return _three_layer(r, s, h, 1, 0, fam)


def star_network(ell: int, r: int) -> Network:
    """N*_{2l,r,2l}: l parallel edges per hop and one direct link per receiver."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    fam = {"name": "star", "h": 2 * ell, "r": r, "s": 2, "ell": ell, "extra_links": 0}
    return _three_layer(r, 2, 2 * ell, ell, 1, fam)


def plus_network(ell: int, r: int) -> Network:
    """N+_{2l,r,2l}: as N* but with l-1 direct links per receiver."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    fam = {"name": "plus", "h": 2 * ell, "r": r, "s": 2, "ell": ell, "extra_links": 0}
    return _three_layer(r, 2, 2 * ell, ell, ell - 1, fam)


def tilde_network(r: int) -> Network:
    if r < 3:
        raise ValueError("r must be >= 3")
    net = add_direct_links(combination_network(3, r, 3), 1)
    return Network(net.nodes, net.edges, 3, dict(net.family, name="tilde"), 1, net.watched)


def add_direct_links(net: Network, count: int, h: int | None = None) -> Network:
    """Add ``count`` source->receiver edges to every receiver."""
    if count == 0 and h is None:
        return net
    edges = list(net.edges)
    for rec in net.receivers:
        have = sum(1 for k in rec.in_edges if k[0] == SOURCE)
        edges.extend(Edge(SOURCE, rec.id, have + c) for c in range(count))
    # keep each receiver's in-edges contiguous in canonical order
    order = {n.id: i for i, n in enumerate(net.nodes)}
    edges.sort(key=lambda e: (order[e.head] if net.layer[e.head] == "receiver" else -1,))
    fam = dict(net.family)
    fam["extra_links"] = fam.get("extra_links", 0) + count
    new_h = net.h if h is None else h
    fam["h"] = new_h
    return Network(net.nodes, tuple(edges), new_h, fam, net.t, net.watched)


def _transforms(net: Network, name: str) -> dict:
    fam = dict(net.family)
    fam["transforms"] = list(fam.get("transforms", [])) + [name]
    return fam


def normalize_min_cut(net: Network) -> Network:
    """Receiver R_i -> relay T_i -> h relays P_ij -> fresh receiver R_i'."""
    nodes = []
    edges = []
    watched = {}
    relabel = {}
    for n in net.nodes:
        if n.layer == "receiver":
            relabel[n.id] = "t" + n.id[1:] if n.id.startswith("r") else "t_" + n.id
            nodes.append(Node(relabel[n.id], "relay"))
        else:
            nodes.append(n)
    for e in net.edges:
        head = relabel.get(e.head, e.head)
        tail = relabel.get(e.tail, e.tail)
        edges.append(Edge(tail, head, e.mult, origin=e.key))
    for rec in net.receivers:
        T = relabel[rec.id]
        base = T[1:]
        new_r = f"r{base}" if not base.startswith("_") else f"r{base}'"
        for j in range(net.h):
            P = f"p{base}_{j}"
            nodes.append(Node(P, "relay"))
            edges.append(Edge(T, P, 0, select=j))
            edges.append(Edge(P, new_r, 0, select=j))
        nodes.append(Node(new_r, "receiver"))
        watched[new_r] = rec.watched
    return Network(tuple(nodes), tuple(edges), net.h, _transforms(net, "normalize_min_cut"),
                   net.t, watched)


def remove_parallel_edges(net: Network) -> Network:
    """Each bundle of l >= 2 parallel edges U->V becomes l paths U->W->V."""
    bundle = {}
    for e in net.edges:
        bundle[(e.tail, e.head)] = bundle.get((e.tail, e.head), 0) + 1
    nodes = list(net.nodes)
    edges = []
    for e in net.edges:
        if bundle[(e.tail, e.head)] < 2:
            edges.append(Edge(e.tail, e.head, e.mult, origin=e.key))
            continue
        w = f"w[{e.tail}>{e.head}#{e.mult}]"
        nodes.append(Node(w, "relay"))
        edges.append(Edge(e.tail, w, 0, origin=e.key))
        edges.append(Edge(w, e.head, 0, origin=e.key))
    # relays are appended after the original nodes; layer order is irrelevant
    return Network(tuple(nodes), tuple(edges), net.h, _transforms(net, "remove_parallel_edges"),
                   net.t, dict(net.watched))


def _flow_graph(net: Network) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(n.id for n in net.nodes)
    for e in net.edges:
        if g.has_edge(e.tail, e.head):
            g[e.tail][e.head]["capacity"] += 1
        else:
            g.add_edge(e.tail, e.head, capacity=1)
    return g


def min_cut(net: Network, receiver: str | int) -> int:
    """Unit-capacity max-flow value from the source to ``receiver``."""
    rid = net.receiver(receiver).id if isinstance(receiver, int) else receiver
    if rid not in net.layer:
        raise KeyError(f"unknown node {rid!r}")
    return int(nx.maximum_flow_value(_flow_graph(net), SOURCE, rid))


def min_cuts(net: Network) -> dict[str, int]:
    g = _flow_graph(net)
    return {r.id: int(nx.maximum_flow_value(g, SOURCE, r.id)) for r in net.receivers}


def generate(family: str, *, h: int | None = None, r: int, s: int | None = None,
             ell: int | None = None, extra_links: int = 0) -> Network:
    """Dispatch used by the CLI."""
    if family == "combination":
        if h is None:
            raise ValueError("combination network needs --h")
        net = combination_network(h, r, s if s is not None else h)
    elif family == "star":
        net = star_network(ell or 2, r)
    elif family == "plus":
        net = plus_network(ell or 2, r)
    elif family == "tilde":
        net = tilde_network(r)
    else:
        raise ValueError(f"unknown family {family!r}")
    if extra_links:
        net = add_direct_links(net, extra_links, h=net.h + extra_links)
    return net


def receiver_count(family: str, r: int, s: int = 2) -> int:
    return math.comb(r, 3 if family == "tilde" else s)
