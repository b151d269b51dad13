"""Acceptance criteria 1-8. Each test prints one verdict line, and the session
summary repeats them under "acceptance criteria"."""
import contextlib
import math

import numpy as np
import pytest
import sympy

from conftest import ACCEPTANCE, built
from tameblocks.atlas import M11_GENERATORS, symmetric_group
from tameblocks.blockinv import SL_SIDE, SU_SIDE, cartan_bar, cartan_double, distinguish, olsson_ell
from tameblocks.classifier import classify
from tameblocks.gf import gf
from tameblocks.gf2 import MatGF2
from tameblocks.modrep2 import direct_sum, perm_module, pim_count, split_summands, trivial_module
from tameblocks.permgrp import (
    PermGroup, centralizer, fingerprint, normalizer, point_stabilizer, quotient_by, subgroup,
)
from tameblocks.suite import module_lab_facts, paper_suite
from tameblocks.twolocal import centralizer_bar, frame_of, fusion_pattern, involution_class_count

ROSTER = [  # name, recipe, family for the closed formula, q, pattern
    ("SD16", "sd:n=4", None, None, "bb"),
    ("SL2pm(3)", "sl2pm:p=3,f=1", "sl", 3, "ba"),
    ("SU2pm(5)", "su2pm:p=5,f=1", "su", 5, "ba"),
    ("PGL2*(9)", "pgl2star:p=3,f=1", "pgl", 3, "ab"),
    ("PSL3(3)", "psl3:p=3,f=1", "psl3", 3, "aa"),
    ("PSU3(5)", "psu3:p=5,f=1", "psu3", 5, "aa"),
    ("M11", "m11", None, None, "aa"),
]
ORDERS = [16, 48, 240, 720, 5616, 126000, 7920]
EXTENDED = [
    ("SL2pm(7)", "sl2pm:p=7,f=1", "sl", 7, 672), ("SU2pm(9)", "su2pm:p=3,f=2", "su", 9, 1440),
    ("PGL2*(49)", "pgl2star:p=7,f=1", "pgl", 7, 117600), ("PSL3(7)", "psl3:p=7,f=1", "psl3", 7, 1876896),
    ("SD32", "sd:n=5", None, None, 32),
]
TRIALS = 1000


def closed_form(family, q):
    if family in ("sl", "su"):
        return 2 * q * (q * q - 1)
    if family == "pgl":
        return q * q * (q**4 - 1)
    if family == "psl3":
        return q**3 * (q**3 - 1) * (q * q - 1) // math.gcd(3, q - 1)
    if family == "psu3":
        return q**3 * (q**3 + 1) * (q * q - 1) // math.gcd(3, q + 1)
    raise KeyError(family)


@contextlib.contextmanager
def criterion(key, title):
    ok = False
    try:
        yield
        ok = True
    finally:
        ACCEPTANCE[key] = (title, ok)
        print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {title}")


def test_criterion_1_roster():
    with criterion(1, "roster construction, orders and Sylow frames"):
        for (name, recipe, fam, q, _), order in zip(ROSTER, ORDERS):
            G = built(recipe)
            assert G.order == order, name
            if fam:
                assert closed_form(fam, q) == order, name
            fr = frame_of(G)
            assert fr.P.order == 16 and fr.n == 4, name


@pytest.mark.extended
def test_criterion_1_extended_roster():
    with criterion("1x", "extended roster at n = 5"):
        for name, recipe, fam, q, order in EXTENDED:
            G = built(recipe)
            assert G.order == order, name
            if fam:
                assert closed_form(fam, q) == order, name
            assert frame_of(G).P.order == 32, name


def test_criterion_2_fusion_patterns():
    with criterion(2, "fusion patterns (bb, ba, ba, ab, aa, aa, aa)"):
        got = tuple(str(fusion_pattern(built(r), frame_of(built(r)))) for _, r, *_ in ROSTER)
        assert got == ("bb", "ba", "ba", "ab", "aa", "aa", "aa")


def test_criterion_3_centralizers():
    with criterion(3, "centralizers of the central involution"):
        gl23 = fingerprint(built("gl2_3"))
        for recipe in ("psl3:p=3,f=1", "m11"):
            G = built(recipe)
            C = centralizer(G, frame_of(G).z)
            assert C.order == 48 and fingerprint(C) == gl23, recipe
        G = built("pgl2star:p=3,f=1")
        _, Cbar = centralizer_bar(G, frame_of(G).z)
        assert fingerprint(Cbar) == fingerprint(built("sd:n=4"))
        assert involution_class_count(G) == 1
        G = built("psu3:p=5,f=1")
        _, Cbar = centralizer_bar(G, frame_of(G).z)
        assert fingerprint(Cbar) == fingerprint(built("su2pm:p=5,f=1"))


def _normalizer_quotient(G, H):
    N = normalizer(G, H)
    Q, _ = quotient_by(N, subgroup(N, H.gens, check=False))
    return Q


def test_criterion_4_normalizers_and_pims():
    with criterion(4, "normalizer quotients and PIM count"):
        s3 = fingerprint(symmetric_group(3))
        for recipe in ("psl3:p=3,f=1", "m11"):
            G = built(recipe)
            fr = frame_of(G)
            assert _normalizer_quotient(G, fr.P).order == 1, recipe
            for H in (fr.Q, fr.K):
                Q = _normalizer_quotient(G, H)
                assert Q.order == 6 and fingerprint(Q) == s3, recipe
        assert pim_count(symmetric_group(3)) == 2


class _Roster:
    get = staticmethod(built)
    seed = 0


def test_criterion_5_module_lab():
    with criterion(5, "module lab: splittings and vertex brackets"):
        f = module_lab_facts(_Roster())
        assert f["dims13"] == [1, 12] and f["dims3"] == [1, 2] and f["verified"]
        assert f["v12"] == {"K": True, "z": False, "C4u": False, "C4v": False}
        assert f["v2"] == {"Q": True, "C4u": False, "C4v": False}
        assert f["induced_dim"] == 234 and 26 in f["factor_dims"]
        assert f["v26"] == {"Q": True, "C4u": False, "C4v": False}


def test_criterion_6_block_invariants():
    with criterion(6, "Cartan matrices, determinants, l(B)"):
        n = sympy.Symbol("n", integer=True)
        sl = sympy.Matrix([[4, 2], [2, 2 ** (n - 3) + 1]])
        su = sympy.Matrix([[2 ** (n - 1), 2 ** (n - 2)], [2 ** (n - 2), 2 ** (n - 3) + 1]])
        for k in range(4, 9):
            assert cartan_bar(k, SL_SIDE).to_list() == sl.subs(n, k).tolist()
            assert cartan_bar(k, SU_SIDE).to_list() == su.subs(n, k).tolist()
        for k in range(4, 13):
            for side in (SL_SIDE, SU_SIDE):
                C = cartan_bar(k, side)
                assert C.det() == 2 ** (k - 1)
                assert cartan_double(C).to_list() == [[2 * x for x in r] for r in C.to_list()]
            assert distinguish(k).sl_value != distinguish(k).su_value
        ells = tuple(olsson_ell(fusion_pattern(built(r), frame_of(built(r)))) for _, r, *_ in ROSTER)
        assert ells == (1, 2, 2, 2, 3, 3, 3)


def test_criterion_7_classification_round_trips():
    with criterion(7, "classification round trips"):
        def triple(G):
            r = classify(G)
            assert r.verified, r.ledger
            return r.case.value, r.n, str(r.canonical)

        assert triple(built("m11")) == ("AA1", 4, "psl3:p=3,f=1")
        a = triple(built("sl2pm:p=3,f=3,d=3"))
        assert a == ("BA1", 4, "sl2pm:p=3,f=1")
        assert triple(built("sd:n=5"))[:2] == ("BB", 5)
        assert triple(built("sl2pm:p=3,f=1")) == a


# -- criterion 8: seeded property trials ---------------------------------------------------------


def _field_trial(rng):
    q = int(rng.choice([2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 49]))
    F = gf(q)
    a, b, c = (F.elem(int(x)) for x in rng.integers(0, q, size=3))
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == 0 and a * 1 == a and a + 0 == a
    if a:
        assert a * a.inverse() == 1


def _orbit_trial(rng):
    d = int(rng.integers(2, 9))
    gens = [rng.permutation(d) for _ in range(int(rng.integers(1, 4)))]
    G = PermGroup(d, gens, seed=int(rng.integers(1 << 30)))
    pt = int(rng.integers(d))
    orbit, frontier = {pt}, [pt]
    while frontier:  # point orbit by hand
        frontier = [int(g[x]) for x in frontier for g in gens if int(g[x]) not in orbit]
        orbit.update(frontier)
    assert point_stabilizer(G, pt).order * len(orbit) == G.order


def _rank_trial(rng):
    m, n = (int(x) for x in rng.integers(1, 80, size=2))
    A = MatGF2.from_dense(rng.integers(0, 2, size=(m, n)))
    N = A.nullspace()
    assert A.rank() + N.rows == n
    assert (A @ N.T).is_zero()


_S4 = PermGroup(4, [[1, 0, 2, 3], [1, 2, 3, 0]])
_S3 = PermGroup(3, [[1, 0, 2], [1, 2, 0]])
_PIECES = [
    perm_module(_S4, subgroup(_S4, [[1, 0, 2, 3]])),
    perm_module(_S4, subgroup(_S4, [[1, 0, 2, 3], [1, 2, 0, 3]])),
    perm_module(_S4, subgroup(_S4, [[1, 0, 3, 2], [2, 3, 0, 1]])),
    trivial_module(_S4),
]


def _decomposition_trial(rng):
    k = int(rng.integers(1, 3))
    picks = [_PIECES[int(i)] for i in rng.integers(0, len(_PIECES), size=k)]
    M = picks[0]
    for X in picks[1:]:
        M = direct_sum(M, X)
    dec = split_summands(M, seed=int(rng.integers(1 << 30)))
    assert dec.verify()
    es = dec.idempotents()
    total = MatGF2.zeros(M.dim, M.dim)
    for i, e in enumerate(es):
        assert e @ e == e
        assert all((e @ f).is_zero() for j, f in enumerate(es) if j != i)
        total = total + e
    assert total.is_identity()


_DET_BASES = ["sd:n=4", "gl2_3", "sl2pm:p=3,f=1"]


def _determinism_trial(rng):
    # a random relabelling of the points gives a fresh input each trial
    G0 = built(_DET_BASES[int(rng.integers(len(_DET_BASES)))])
    sigma = rng.permutation(G0.degree)
    sinv = np.argsort(sigma)
    gens = [sigma[g.a[sinv]] for g in G0.gens]  # sigma^-1 g sigma
    verdicts = set()
    for s in range(5):
        G = PermGroup(G0.degree, gens, seed=s)
        r = classify(G, seed=s)
        verdicts.add((r.case, r.n, str(r.canonical), r.pattern, r.status))
    assert len(verdicts) == 1


@pytest.mark.parametrize("key,name,trial", [
    ("8.1", "field axioms", _field_trial), ("8.2", "orbit-stabilizer", _orbit_trial),
    ("8.3", "rank-nullity", _rank_trial), ("8.4", "decomposition idempotents", _decomposition_trial),
    ("8.5", "5-seed determinism", _determinism_trial),
])
def test_criterion_8_property_suites(key, name, trial):
    rng = np.random.default_rng([8, int(key[-1])])
    failures = 0
    with criterion(key, f"{name}: {TRIALS} seeded trials"):
        for _ in range(TRIALS):
            try:
                trial(rng)
            except AssertionError:
                failures += 1
        assert failures == 0, f"{failures} failing trials"


# -- the battery itself ---------------------------------------------------------------------------


def test_core_suite_passes():
    result = paper_suite("core")
    assert result["status"] == "PASS", [e for e in result["ledger"] if e["status"] != "pass"]


def test_corrupted_m11_fails_loudly():
    bad = (M11_GENERATORS[0], ((3, 7, 11, 8), (4, 10, 6, 5)))
    result = paper_suite("core", m11_generators=bad)
    assert result["status"] == "FAIL"
    assert any("DataCorrupt" in e["witness"] for e in result["ledger"] if e["status"] == "fail")


@pytest.mark.extended
def test_extended_suite_passes():
    result = paper_suite("extended")
    assert result["status"] == "PASS", [e for e in result["ledger"] if e["status"] != "pass"]
