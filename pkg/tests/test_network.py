from __future__ import annotations

import itertools
import math

import pytest

from netgap.network import (SOURCE, Network, add_direct_links, combination_network, generate,
                            min_cut, min_cuts, normalize_min_cut, plus_network,
                            receiver_count, remove_parallel_edges, star_network, tilde_network)


def reachable(edges, target):
    seen, stack = {SOURCE}, [SOURCE]
    while stack:
        u = stack.pop()
        for a, b in edges:
            if a == u and b not in seen:
                seen.add(b)
                stack.append(b)
    return target in seen


def brute_min_cut(net: Network, rid: str) -> int:
    """Smallest edge set whose removal disconnects rid, by enumeration.

    Edges whose head cannot reach rid never matter and are skipped.
    """
    rel = [(e.tail, e.head) for e in net.edges]
    to_rid, grew = {rid}, True
    while grew:
        grew = False
        for a, b in rel:
            if b in to_rid and a not in to_rid:
                to_rid.add(a)
                grew = True
    useful = [i for i, (a, b) in enumerate(rel) if b in to_rid]
    for size in range(len(useful) + 1):
        for cut in itertools.combinations(useful, size):
            gone = set(cut)
            if not reachable([e for i, e in enumerate(rel) if i not in gone], rid):
                return size
    raise AssertionError("no cut found")


def test_combination_examples():
    net = combination_network(2, 2, 2)
    assert len(net.receivers) == 1 and len(net.receivers[0].in_edges) == 2
    assert len(combination_network(3, 5, 3).receivers) == 10
    net = combination_network(4, 6, 4)
    assert len(net.receivers) == 15
    assert all(len(r.in_edges) == 4 for r in net.receivers)


def test_receivers_are_lexicographic():
    net = combination_network(2, 4, 2)
    assert [r.watched for r in net.receivers] == list(itertools.combinations(range(4), 2))


@pytest.mark.parametrize("ell,r,deg", [(2, 3, 5), (3, 4, 7)])
def test_star_examples(ell, r, deg):
    net = star_network(ell, r)
    assert len(net.receivers) == math.comb(r, 2)
    assert all(len(x.in_edges) == deg for x in net.receivers)
    per_mid = [k for k in net.out_edges[SOURCE] if k[1].startswith("m")]
    assert len(per_mid) == ell * r
    assert len(star_network(2, 16).receivers) == 120


def test_plus_examples():
    a, b = star_network(2, 6), plus_network(2, 6)
    assert [e.key for e in a.edges] == [e.key for e in b.edges]
    assert all(len(x.in_edges) == 8 for x in plus_network(3, 4).receivers)
    net = plus_network(4, 3)
    assert len(net.receivers) == 3 and all(len(x.in_edges) == 11 for x in net.receivers)


def test_tilde_examples():
    assert [len(r.in_edges) for r in tilde_network(3).receivers] == [4]
    assert len(tilde_network(5).receivers) == 10
    assert receiver_count("tilde", 43) == 12341


def test_all_families_acyclic_single_source():
    for net in (combination_network(3, 5, 3), star_network(2, 4), plus_network(3, 4),
                tilde_network(5)):
        assert net.is_acyclic()
        sources = [n for n in net.nodes if not net.in_edges[n.id]]
        assert [n.id for n in sources] == [SOURCE]


def test_add_direct_links():
    net = star_network(2, 4)
    assert add_direct_links(net, 0) is net
    odd = add_direct_links(net, 1, h=5)
    assert odd.h == 5
    assert all(len(r.in_edges) == 6 for r in odd.receivers)
    assert generate("star", r=4, extra_links=1).h == 5


def test_min_cut_values():
    assert set(min_cuts(combination_network(3, 5, 3)).values()) == {3}
    assert set(min_cuts(star_network(2, 5)).values()) == {5}
    assert set(min_cuts(star_network(3, 4)).values()) == {7}
    assert set(min_cuts(normalize_min_cut(star_network(2, 5))).values()) == {4}
    assert min_cut(combination_network(3, 4, 3), 0) == 3


@pytest.mark.parametrize("net", [combination_network(2, 3, 2), combination_network(3, 4, 3),
                                 star_network(2, 3), plus_network(2, 3), tilde_network(4)],
                         ids=["comb232", "comb343", "star23", "plus23", "tilde4"])
def test_min_cut_matches_brute_force(net):
    for rec in net.receivers[:3]:
        assert min_cut(net, rec.id) == brute_min_cut(net, rec.id)


def test_normalize_structure():
    net = star_network(2, 3)
    norm = normalize_min_cut(net)
    assert len(norm.receivers) == len(net.receivers)
    for rec in norm.receivers:
        assert len(rec.in_edges) == net.h
    assert norm.family["transforms"] == ["normalize_min_cut"]
    assert set(min_cuts(normalize_min_cut(combination_network(3, 5, 3))).values()) == {3}


def test_remove_parallel_edges():
    net = normalize_min_cut(star_network(2, 5))
    simple = remove_parallel_edges(net)
    assert not net.is_simple() and simple.is_simple()
    assert min_cuts(simple) == min_cuts(net)
    comb = combination_network(3, 4, 3)
    same = remove_parallel_edges(comb)
    assert [(e.tail, e.head) for e in same.edges] == [(e.tail, e.head) for e in comb.edges]


def test_json_round_trip():
    net = remove_parallel_edges(normalize_min_cut(star_network(2, 4)))
    back = Network.from_dict(net.to_dict())
    assert back.edges == net.edges and back.nodes == net.nodes and back.h == net.h
    assert back.watched == net.watched


def test_bad_json_edge():
    d = combination_network(2, 2, 2).to_dict()
    d["edges"].append({"tail": "s", "head": "nowhere", "mult": 0})
    with pytest.raises(ValueError):
        Network.from_dict(d)


def test_generate_errors():
    with pytest.raises(ValueError):
        generate("combination", r=4)
    with pytest.raises(ValueError):
        generate("ring", r=4)
    with pytest.raises(ValueError):
        combination_network(3, 2, 3)
