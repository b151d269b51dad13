import math

import pytest

from tameblocks.atlas import (
    GroupRecipe, build, canonical_rep, m11_group, parse_recipe, pgl2_variants, symmetric_group,
)
from tameblocks.errors import BudgetExceeded, DataCorrupt, RecipeInvalid
from tameblocks.permgrp import fingerprint, fingerprint_match, point_stabilizer, sylow2


def closed_order(family, q):
    # written out independently of the library's formula table
    g3m, g3p = math.gcd(3, q - 1), math.gcd(3, q + 1)
    return {
        "sl2pm": 2 * q * (q - 1) * (q + 1),
        "su2pm": 2 * q * (q - 1) * (q + 1),
        "pgl2star": q**2 * (q**2 - 1) * (q**2 + 1),
        "psl3": q**3 * (q**2 - 1) * (q**3 - 1) // g3m,
        "psu3": q**3 * (q**2 - 1) * (q**3 + 1) // g3p,
    }[family]


@pytest.mark.parametrize("family,p", [
    ("sl2pm", 3), ("sl2pm", 11), ("su2pm", 5), ("pgl2star", 3), ("pgl2star", 5), ("psl3", 3), ("psu3", 5),
])
def test_orders_against_closed_forms(atlas_group, family, p):
    G = atlas_group(f"{family}:p={p},f=1")
    assert G.order == closed_order(family, p)


def test_small_isomorphisms(atlas_group):
    # SL2pm(3) has index-2 SL2(3) with determinant +-1, i.e. all of GL2(3)
    assert fingerprint_match(atlas_group("sl2pm:p=3"), atlas_group("gl23"))
    # PSL3(3) is 2-transitive on 13 points
    G = atlas_group("psl3:p=3")
    assert point_stabilizer(G, 0).order == G.order // 13
    assert point_stabilizer(point_stabilizer(G, 0), 1).order == G.order // (13 * 12)


def test_m11_is_sharply_four_transitive():
    G = m11_group()
    H = G
    for pt in range(4):
        H = point_stabilizer(H, pt)
    assert G.order == 7920 and H.order == 1


def test_m11_corruption_detected():
    with pytest.raises(DataCorrupt):
        m11_group(gens=(((1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11),), ((3, 7, 11, 8), (4, 10, 6, 5))))


def test_pgl2_variants_distinct():
    psl, pgl, sphi, star = pgl2_variants(3, 1)
    assert psl.order == 360 and pgl.order == sphi.order == star.order == 720
    fps = {fingerprint(x) for x in (pgl, sphi, star)}
    assert len(fps) == 3
    assert sylow2(star).order == 16


@pytest.mark.parametrize("spec,text", [
    ("SL2pm:p=3", "sl2pm:p=3,f=1"),
    ("sl2pm:p=3,f=3,d=3", "sl2pm:p=3,f=3,d=3"),
    ("psu3:p=5,e=3", "psu3:p=5,f=1,e=3"),
    ("sd:n=5", "sd:n=5"),
    ("GL2(3)", "gl2_3"),
])
def test_parse_roundtrip(spec, text):
    r = parse_recipe(spec)
    assert str(r) == text
    assert parse_recipe(str(r)) == r


@pytest.mark.parametrize("bad", [
    "psl3:p=2", "psl3:p=9", "sl2pm:p=5", "sl2pm:p=3,f=2,d=2", "psl3:p=3,e=3",
    "sd:n=3", "what:p=3", "psl3:p", "sl2pm:p=3,n=5",
])
def test_invalid_recipes(bad):
    with pytest.raises(RecipeInvalid):
        parse_recipe(bad)


def test_recipe_n_follows_q():
    assert GroupRecipe("SL2pm", p=7).n == 5
    assert GroupRecipe("SU2pm", p=3, f=2).n == 5
    assert GroupRecipe("PGL2star", p=5).n == 4


def test_budget():
    with pytest.raises(BudgetExceeded):
        build("psl3:p=3,f=3,d=3")


@pytest.mark.parametrize("tag,n,expect", [
    ("BB", 4, "sd:n=4"), ("BA1", 4, "sl2pm:p=3,f=1"), ("BA1", 5, "sl2pm:p=7,f=1"),
    ("BA2", 4, "su2pm:p=5,f=1"), ("BA2", 5, "su2pm:p=3,f=2"), ("AB", 4, "pgl2star:p=3,f=1"),
    ("AB", 5, "pgl2star:p=7,f=1"), ("AA1", 4, "psl3:p=3,f=1"), ("AA2", 4, "psu3:p=5,f=1"),
])
def test_canonical_reps(tag, n, expect):
    r = canonical_rep(tag, n)
    assert str(r) == expect and r.n == n


def test_symmetric_group():
    assert symmetric_group(5).order == 120
    assert symmetric_group(1).order == 1
