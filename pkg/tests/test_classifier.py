import pytest

from tameblocks.atlas import canonical_rep
from tameblocks.classifier import ClassCase, classify, recognize, reduce_odd_core
from tameblocks.errors import NotSemidihedral
from tameblocks.permgrp import conjugacy_classes, direct_product, fingerprint_match, PermGroup

ROSTER = [
    ("sd:n=4", "bb", "BB", "sd:n=4"),
    ("sl2pm:p=3", "ba1", "BA1", "sl2pm:p=3,f=1"),
    ("su2pm:p=5", "ba2", "BA2", "su2pm:p=5,f=1"),
    ("pgl2star:p=3", "ab", "AB", "pgl2star:p=3,f=1"),
    ("psl3:p=3", "aa1", "AA1", "psl3:p=3,f=1"),
    ("psu3:p=5", "aa2", "AA2", "psu3:p=5,f=1"),
    ("m11", "aa3", "AA1", "psl3:p=3,f=1"),
    ("gl23", "ba1", "BA1", "sl2pm:p=3,f=1"),
]


@pytest.mark.parametrize("spec,structure,tag,canon", ROSTER)
def test_roster_classification(atlas_group, spec, structure, tag, canon):
    rep = classify(atlas_group(spec))
    assert rep.verified, [e for e in rep.ledger if e["status"] != "pass"]
    assert rep.structure_case == structure
    assert rep.case.value == tag and rep.n == 4
    assert str(rep.canonical) == canon
    assert rep.case.letters == rep.pattern
    assert rep.invariants.ell == {"BB": 1, "BA1": 2, "BA2": 2, "AB": 2, "AA1": 3, "AA2": 3}[tag]


@pytest.mark.parametrize("tag", [c.value for c in ClassCase])
def test_canonical_round_trip(atlas_group, tag):
    r = canonical_rep(tag, 4)
    assert classify(atlas_group(str(r))).case.value == tag


@pytest.mark.extended
@pytest.mark.parametrize("tag", ["BB", "BA1", "BA2", "AB"])
def test_canonical_round_trip_n5(atlas_group, tag):
    r = canonical_rep(tag, 5)
    rep = classify(atlas_group(str(r)))
    assert rep.case.value == tag and rep.n == 5 and rep.verified


def test_extension_parameters(atlas_group):
    rep = classify(atlas_group("sl2pm:p=3,f=3,d=3"))
    assert rep.case is ClassCase.BA1 and rep.parameters == {"p": 3, "f": 3, "d": 3}
    assert str(rep.canonical) == "sl2pm:p=3,f=1"
    rep = classify(atlas_group("psu3:p=5,e=3"))
    assert rep.case is ClassCase.AA2 and rep.parameters["h_order"] == 3


def test_odd_core_removed(atlas_group):
    base = atlas_group("sl2pm:p=3")
    G = direct_product(base, PermGroup(3, [[1, 2, 0]]))
    Gbar, core = reduce_odd_core(G)
    assert core == 3 and fingerprint_match(Gbar, base)
    again, core2 = reduce_odd_core(Gbar)
    assert core2 == 1 and again is Gbar
    rep = classify(G)
    assert rep.case is ClassCase.BA1 and rep.o2prime_order == 3 and rep.verified


def test_single_block_class_number(atlas_group):
    rep = classify(atlas_group("gl23"))
    assert rep.invariants.kB == len(conjugacy_classes(atlas_group("gl23"))) == 8
    assert classify(atlas_group("sd:n=4")).invariants.kB == 7
    assert classify(atlas_group("psl3:p=3")).invariants.kB is None


def test_ba_cartan_recorded(atlas_group):
    inv = classify(atlas_group("su2pm:p=5")).invariants
    assert inv.cartan_bar.side == "su-side" and inv.cartan_bar.entries == ((8, 4), (4, 3))


def test_dihedral_rejected(atlas_group):
    with pytest.raises(NotSemidihedral):
        recognize(atlas_group("d:n=4"))


def test_report_json_shape(atlas_group):
    d = classify(atlas_group("m11")).to_dict()
    assert d["class"]["tag"] == "AA1" and d["structure_case"] == "aa3"
    assert d["canonical"]["name"] == "PSL3(3)"
    assert d["scott_statement"].startswith("cited result, not computed")
    assert d["status"] == "VERIFIED"


def test_seed_independence(atlas_group):
    G = atlas_group("pgl2star:p=3")
    verdicts = {(r.case, r.n, str(r.canonical), r.status) for r in (classify(G, seed=s) for s in range(5))}
    assert len(verdicts) == 1
