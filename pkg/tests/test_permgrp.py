import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tameblocks.errors import DegreeMismatch, NotMember, NotNormal, TooLarge
from tameblocks.permgrp import (
    Perm, PermGroup, center, centralizer, conjugacy_classes, coset_action, derived_subgroup,
    direct_product, fingerprint, fingerprint_match, is_conjugate, is_normal, normalizer,
    o2prime, o_upper_2prime, point_stabilizer, quotient_by, subgroup, sylow2,
)


def closure(gens, degree):
    """Every element as a tuple, by breadth-first multiplication."""
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[i] for i in x)  # x * g under the right action
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def mul(x, y):
    return tuple(y[i] for i in x)


def inv(x):
    out = [0] * len(x)
    for i, v in enumerate(x):
        out[v] = i
    return tuple(out)


def brute_classes(elems):
    left = set(elems)
    sizes = []
    while left:
        x = next(iter(left))
        cls = {mul(mul(inv(g), x), g) for g in elems}
        left -= cls
        sizes.append(len(cls))
    return sorted(sizes)


S4 = [(1, 0, 2, 3), (1, 2, 3, 0)]
A5 = [(1, 2, 0, 3, 4), (0, 1, 3, 4, 2), (1, 0, 3, 2, 4)]
D8 = [(1, 2, 3, 0), (3, 2, 1, 0)]
S3xC3 = [(1, 0, 2, 3, 4, 5), (1, 2, 0, 3, 4, 5), (0, 1, 2, 4, 5, 3)]
SMALL = {"S4": (4, S4), "A5": (5, A5), "D8": (4, D8), "S3xC3": (6, S3xC3)}


def group(name):
    d, gens = SMALL[name]
    return PermGroup(d, [list(g) for g in gens], name=name)


def as_tuples(G, arr):
    return {tuple(int(v) for v in row) for row in arr}


perm_lists = st.integers(3, 7).flatmap(
    lambda d: st.lists(st.permutations(range(d)), min_size=1, max_size=3).map(lambda gs: (d, gs)))


def test_perm_right_action():
    x = Perm([1, 2, 0])
    y = Perm([0, 2, 1])
    assert list((x * y).images) == [2, 1, 0]  # i -> y[x[i]]
    assert (x * ~x).is_identity()
    assert x.order() == 3
    assert Perm.from_cycles(4, [(1, 2, 3)], base=1) == Perm([1, 2, 0, 3])
    assert list(x.conj(y).images) == list((~y * x * y).images)


@settings(max_examples=120, deadline=None)
@given(perm_lists)
def test_chain_order_matches_closure(data):
    d, gens = data
    G = PermGroup(d, gens)
    E = closure([tuple(g) for g in gens], d)
    assert G.order == len(E)
    assert as_tuples(G, G.elements()) == E


@settings(max_examples=120, deadline=None)
@given(perm_lists, st.integers(0, 6))
def test_orbit_stabilizer(data, pt):
    d, gens = data
    pt %= d
    G = PermGroup(d, gens)
    E = closure([tuple(g) for g in gens], d)
    orbit = {x[pt] for x in E}
    H = point_stabilizer(G, pt)
    assert H.order * len(orbit) == G.order
    assert all(int(g.a[pt]) == pt for g in H.gens)


@pytest.mark.parametrize("name", list(SMALL))
def test_classes_and_centralizers_match_brute_force(name):
    G = group(name)
    E = closure(SMALL[name][1], G.degree)
    cl = conjugacy_classes(G)
    assert sorted(c.size for c in cl) == brute_classes(E)
    for c in cl:
        x = tuple(int(v) for v in c.rep.images)
        C = centralizer(G, c.rep)
        brute = {g for g in E if mul(x, g) == mul(g, x)}
        assert C.order == len(brute) == G.order // c.size
        assert as_tuples(C, C.elements()) == brute
    Z = center(G)
    assert Z.order == sum(1 for x in E if all(mul(x, g) == mul(g, x) for g in E))


@pytest.mark.parametrize("name", list(SMALL))
def test_sylow_and_normalizer(name):
    G = group(name)
    P = sylow2(G)
    two = G.order & -G.order
    assert P.order == two
    E = closure(SMALL[name][1], G.degree)
    Pe = as_tuples(P, P.elements())
    N = normalizer(G, P)
    brute = {g for g in E if {mul(mul(inv(g), x), g) for x in Pe} == Pe}
    assert N.order == len(brute)


def test_odd_core_and_residual():
    assert o2prime(group("S4")).order == 1
    assert o2prime(group("S3xC3")).order == 9
    assert o2prime(group("A5")).order == 1
    assert o_upper_2prime(group("S4")).order == 24  # transpositions generate S4
    assert o_upper_2prime(group("S3xC3")).order == 6
    assert o_upper_2prime(group("A5")).order == 60


def test_is_conjugate_returns_witness():
    G = group("S4")
    x, y = Perm([1, 0, 2, 3]), Perm([0, 1, 3, 2])
    ok, g = is_conjugate(G, x, y)
    assert ok and ~g * x * g == y
    ok, g = is_conjugate(G, x, Perm([1, 0, 3, 2]))
    assert not ok and g is None
    with pytest.raises(NotMember):
        is_conjugate(group("D8"), Perm([1, 0, 2, 3]), Perm([1, 0, 2, 3]))


def test_quotient_and_cosets():
    G = group("S4")
    V = subgroup(G, [[1, 0, 3, 2], [2, 3, 0, 1]])
    assert is_normal(G, V)
    Q, ca = quotient_by(G, V)
    assert Q.order == 6 and ca.index == 6
    assert fingerprint_match(Q, PermGroup(3, [[1, 0, 2], [1, 2, 0]]))
    with pytest.raises(NotNormal):
        quotient_by(G, subgroup(G, [[1, 0, 2, 3]]))
    H = subgroup(G, [[1, 0, 2, 3], [1, 2, 0, 3]])
    assert coset_action(G, H).index == 4


def test_derived_and_fingerprint_separation():
    S4g, D8g = group("S4"), group("D8")
    assert derived_subgroup(S4g).order == 12
    Q8 = PermGroup(8, [[1, 2, 3, 0, 5, 6, 7, 4], [4, 7, 6, 5, 2, 1, 0, 3]])
    assert Q8.order == 8
    assert not fingerprint_match(D8g, Q8)
    assert fingerprint(D8g).abelianization == (2, 2)
    assert direct_product(D8g, PermGroup(2, [[1, 0]])).order == 16


def test_degree_mismatch_and_budget():
    with pytest.raises(DegreeMismatch):
        PermGroup(4, [[1, 0, 2]])
    big = PermGroup(12, [list(range(1, 12)) + [0], [1, 0] + list(range(2, 12))])
    with pytest.raises(TooLarge):
        conjugacy_classes(big)


def test_json_roundtrip():
    G = group("A5")
    H = PermGroup.from_json(json.loads(json.dumps(G.to_json())))
    assert H.order == 60 and H.name == "A5"


def test_chain_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("TAMEBLOCKS_CACHE", str(tmp_path))
    G = PermGroup(5, A5, seed=3)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    again = PermGroup(5, A5, seed=3)
    assert again.order == G.order == 60
    assert len(list(tmp_path.iterdir())) == 1
    PermGroup(5, A5, seed=4)
    assert len(list(tmp_path.iterdir())) == 2
    assert np.array_equal(np.sort(again.elements(), axis=0), np.sort(G.elements(), axis=0))
