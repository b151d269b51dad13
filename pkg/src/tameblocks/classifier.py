"""Principal 2-block classification for groups with a semidihedral Sylow 2-subgroup.

Pipeline: divide out the largest odd-order normal subgroup, recognize the
structure of the quotient from its 2-local data and orders, then report the
block class together with a canonical representative and a check ledger.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import atlas
from .atlas import GroupRecipe, canonical_rep
from .blockinv import BlockInvariants, SL_SIDE, SU_SIDE, cartan_bar, cartan_double, olsson_ell, two_part
from .errors import Unrecognized
from .gf import prime_power
from .permgrp import (
    PermGroup,
    SubgroupHandle,
    centralizer_of_subgroup,
    conjugacy_classes,
    fingerprint,
    o2prime,
    o_upper_2prime,
    quotient_by,
    sylow2,
)
from .twolocal import FusionPattern, aut_is_2group, centralizer_bar, fusion_pattern, semidihedral_frame

SCOTT_STATEMENT = (
    "cited result, not computed: the principal block of G is splendidly Morita equivalent to the "
    "principal block of the canonical group G', realized by the Scott module Sc(G x G', Delta P)."
)


class ClassCase(str, Enum):
    BB = "BB"
    BA1 = "BA1"
    BA2 = "BA2"
    AB = "AB"
    AA1 = "AA1"
    AA2 = "AA2"

    @property
    def letters(self) -> str:
        return self.value[:2].lower()


# structural cases before folding; AA3 is M11
STRUCTURE_CASES = ("bb", "ba1", "ba2", "ab", "aa1", "aa2", "aa3")


@dataclass
class Recognition:
    case: str
    n: int
    p: int | None = None
    f: int | None = None
    d: int = 1
    h_order: int = 1
    pattern: FusionPattern | None = None
    ledger: list = field(default_factory=list)

    @property
    def q(self):
        return self.p ** self.f if self.p else None


@dataclass
class ClassificationReport:
    descriptor: str
    o2prime_order: int
    sylow: dict
    pattern: str
    structure_case: str
    case: ClassCase
    n: int
    parameters: dict
    canonical: GroupRecipe
    invariants: BlockInvariants
    scott_statement: str
    ledger: list

    @property
    def verified(self) -> bool:
        return all(e["status"] == "pass" for e in self.ledger)

    @property
    def status(self) -> str:
        return "VERIFIED" if self.verified else "FAILED"

    def to_dict(self) -> dict:
        return {
            "input": self.descriptor,
            "o2prime_order": self.o2prime_order,
            "sylow": self.sylow,
            "pattern": self.pattern,
            "structure_case": self.structure_case,
            "class": {"tag": self.case.value, "n": self.n, **self.parameters},
            "canonical": {"recipe": str(self.canonical), "name": self.canonical.display()},
            "invariants": self.invariants.to_dict(),
            "scott_statement": self.scott_statement,
            "ledger": self.ledger,
            "status": self.status,
        }


def _entry(check, ok, witness=""):
    return {"check": check, "status": "pass" if ok else "fail", "witness": str(witness)}


# -- reduction -----------------------------------------------------------------------------


def reduce_odd_core(G: PermGroup):
    """(G / O_2'(G), |O_2'(G)|), with the quotient's own odd core re-checked to be trivial."""
    O = o2prime(G)
    if O.order == 1:
        return G, 1
    Gbar, _ = quotient_by(G, O)
    Gbar.name = f"{G.name or 'G'}/O2'"
    if o2prime(Gbar).order != 1:
        raise AssertionError("quotient by the odd core still has an odd normal subgroup")
    return Gbar, O.order


# -- order equations ----------------------------------------------------------------------------


def _odd_prime_powers_below(bound):
    q = 3
    while q <= bound:
        pf = prime_power(q)
        if pf:
            yield q, pf
        q += 2


def _solve_q(order: int, formula) -> list:
    out = []
    for q, pf in _odd_prime_powers_below(10 ** 5):
        v = formula(q)
        if v > order:
            break
        if v == order:
            out.append((q, pf))
    return out


ORDER_FORMULAS = {
    "SL2pm": lambda q: 2 * q * (q * q - 1),
    "PGL2star": lambda q: q * q * (q ** 4 - 1),
    "PSL3": lambda q: q ** 3 * (q ** 3 - 1) * (q * q - 1) // math.gcd(3, q - 1),
    "PSU3": lambda q: q ** 3 * (q ** 3 + 1) * (q * q - 1) // math.gcd(3, q + 1),
}


def _central(G, z) -> bool:
    return all(z * g == g * z for g in G.gens)


def _extension_ok(f, d):
    return d % 2 == 1 and f % d == 0


def recognize(Gbar: PermGroup, seed: int = 0) -> Recognition:
    """Structure case of a group with trivial odd core and semidihedral Sylow 2-subgroup."""
    ledger = []
    P = sylow2(Gbar)
    fr = semidihedral_frame(P)
    n = fr.n
    ledger.append(_entry("sylow_semidihedral", True, f"|P| = 2^{n}"))
    pattern = fusion_pattern(Gbar, fr)
    rec = None
    if Gbar.order == P.order:
        rec = Recognition("bb", n)
    elif _central(Gbar, fr.z):
        rec = _recognize_ba(Gbar, n, ledger)
    else:
        C, Cbar = centralizer_bar(Gbar, fr.z)
        if Cbar.order == P.order:
            ok = fingerprint(Cbar) == fingerprint(P)
            ledger.append(_entry("centralizer_bar_is_P", ok, f"|Cbar| = {Cbar.order}"))
            rec = _recognize_ab(Gbar, n, ledger)
        elif Gbar.order == 7920 and fingerprint(Gbar) == fingerprint(atlas.m11_group()):
            ledger.append(_entry("m11_fingerprint", True, "order 7920, M11 class profile"))
            rec = Recognition("aa3", n)
        else:
            rec = _recognize_aa(Gbar, n, Cbar, ledger)
    if rec is None:
        raise Unrecognized("no structure case matches", ledger=ledger)
    rec.pattern = pattern
    rec.ledger = ledger + rec.ledger
    want = rec.case[:2]
    rec.ledger.append(_entry("pattern_matches_case", str(pattern) == want, f"{pattern} vs ({rec.case})"))
    if str(pattern) != want:
        raise Unrecognized(f"fusion pattern {pattern} contradicts case ({rec.case})", ledger=rec.ledger)
    return rec


def _recognize_ba(Gbar, n, ledger):
    """z central: SL2pm or SU2pm possibly extended by field automorphisms."""
    N = o_upper_2prime(Gbar)
    sols = _solve_q(N.order, ORDER_FORMULAS["SL2pm"])
    if len(sols) != 1:
        raise Unrecognized(f"|O^2'| = {N.order} is not 2q(q^2-1) for a unique odd q", ledger=ledger)
    q, (p, f) = sols[0]
    if 4 * two_part(q + 1) == 2 ** n:
        case, fam = "ba1", "SL2pm"
    elif 4 * two_part(q - 1) == 2 ** n:
        case, fam = "ba2", "SU2pm"
    else:
        raise Unrecognized(f"q = {q} is inconsistent with |P| = 2^{n}", ledger=ledger)
    d = Gbar.order // N.order
    ledger.append(_entry("order_formula", Gbar.order == N.order * d and _extension_ok(f, d),
                         f"|O^2'| = {N.order} = 2q(q^2-1) with q = {q}; d = {d}"))
    cand = atlas.build(GroupRecipe(fam, p=p, f=f), seed=0).group
    ok = fingerprint(cand) == fingerprint(N)
    ledger.append(_entry("candidate_fingerprint", ok, f"O^2' vs {fam}({q})"))
    if not ok:
        raise Unrecognized(f"O^2' does not match {fam}({q})", ledger=ledger)
    return Recognition(case, n, p, f, d)


def _recognize_ab(Gbar, n, ledger):
    N = o_upper_2prime(Gbar)
    sols = _solve_q(N.order, ORDER_FORMULAS["PGL2star"])
    if len(sols) != 1:
        raise Unrecognized(f"|O^2'| = {N.order} is not q^2(q^4-1)", ledger=ledger)
    q, (p, f) = sols[0]
    d = Gbar.order // N.order
    ok_n = 2 * two_part(q * q - 1) == 2 ** n
    ledger.append(_entry("order_formula", ok_n and _extension_ok(f, d),
                         f"|O^2'| = {N.order} = q^2(q^4-1) with q = {q}; d = {d}"))
    cand = atlas.build(GroupRecipe("PGL2star", p=p, f=f), seed=0).group
    ok = fingerprint(cand) == fingerprint(N)
    ledger.append(_entry("candidate_fingerprint", ok, f"O^2' vs PGL2*({q * q})"))
    if not ok:
        raise Unrecognized(f"O^2' does not match PGL2*({q * q})", ledger=ledger)
    return Recognition("ab", n, p, f, d)


def _recognize_aa(Gbar, n, Cbar, ledger):
    N = o_upper_2prime(Gbar)
    for fam, case, side_fam, cond in (
        ("PSL3", "aa1", "SL2pm", lambda q: 4 * two_part(q + 1) == 2 ** n),
        ("PSU3", "aa2", "SU2pm", lambda q: 4 * two_part(q - 1) == 2 ** n),
    ):
        for q, (p, f) in _solve_q(N.order, ORDER_FORMULAS[fam]):
            if not cond(q):
                continue
            h = Gbar.order // N.order
            diag = math.gcd(3, q - 1 if fam == "PSL3" else q + 1)
            ledger.append(_entry("order_formula", Gbar.order % N.order == 0 and h % 2 == 1 and (diag * f) % h == 0,
                                 f"|O^2'| = {N.order} matches {fam}({q}); |G:O^2'| = {h}"))
            # the centralizer quotient inside the simple normal subgroup
            fr = semidihedral_frame(sylow2(N))
            _, CbarN = centralizer_bar(N, fr.z)
            cand = atlas.build(GroupRecipe(side_fam, p=p, f=f), seed=0).group
            ok = fingerprint(CbarN) == fingerprint(cand)
            ledger.append(_entry("centralizer_bar_fingerprint", ok, f"Cbar(O^2') vs {side_fam}({q})"))
            if ok:
                return Recognition(case, n, p, f, h_order=h)
    raise Unrecognized(f"|O^2'| = {N.order} matches neither PSL3(q) nor PSU3(q)", ledger=ledger)


# -- classification -----------------------------------------------------------------------------


_FOLD = {"bb": ClassCase.BB, "ba1": ClassCase.BA1, "ba2": ClassCase.BA2, "ab": ClassCase.AB,
         "aa1": ClassCase.AA1, "aa2": ClassCase.AA2, "aa3": ClassCase.AA1}


def _single_block(G: PermGroup, P) -> bool:
    """kG has one block iff C_G(O_2(G)) <= O_2(G)."""
    core = _normal_core(G, P)
    if core.order == 1:
        return G.order == 1
    C = centralizer_of_subgroup(G, core)
    return C.order <= core.order and all(core.contains(g) for g in C.gens)


def _normal_core(G: PermGroup, P) -> SubgroupHandle:
    """Largest normal subgroup of G inside P, by discarding elements whose conjugates leave it."""
    elems = P.elements()
    while len(elems):
        keys = set(G.keys(elems).tolist())
        keep = [x for x in elems
                if all(G.keys(g.a[x[(~g).a]][None, :]).tolist()[0] in keys for g in G.gens)]
        if len(keep) == len(elems):
            break
        elems = keep
    return SubgroupHandle(G, list(elems), name="O2", check=False)


def classify(G: PermGroup, seed: int = 0, descriptor: str | None = None) -> ClassificationReport:
    ledger = []
    Gbar, core = reduce_odd_core(G)
    ledger.append(_entry("odd_core_reduced", o2prime(Gbar).order == 1, f"|O2'(G)| = {core}"))
    rec = recognize(Gbar, seed=seed)
    ledger.extend(rec.ledger)
    case = _FOLD[rec.case]
    n = rec.n
    canonical = canonical_rep(case.value, n)
    pattern = str(rec.pattern)
    ell = olsson_ell(pattern)
    ledger.append(_entry("ell_matches_pattern", (ell == 1) == (case is ClassCase.BB), f"l(B) = {ell}"))
    fr = semidihedral_frame(sylow2(Gbar))
    if n <= 6:
        ledger.append(_entry("aut_P_is_2group", aut_is_2group(fr), f"n = {n}"))
    notes = []
    cb = None
    if case in (ClassCase.BA1, ClassCase.BA2):
        cb = cartan_bar(n, SL_SIDE if case is ClassCase.BA1 else SU_SIDE)
        notes.append(f"C_B = 2 C_Bbar = {cartan_double(cb).to_list()}")
    kB = None
    if Gbar.order <= 20000 and _single_block(Gbar, sylow2(Gbar)):
        kB = len(conjugacy_classes(Gbar))
        notes.append("kG has a single 2-block, so k(B0) is the class number")
    invariants = BlockInvariants(pattern, ell, kB, cb, notes)
    params = {}
    if rec.p:
        params = {"p": rec.p, "f": rec.f}
        if rec.case.startswith("aa"):
            params["h_order"] = rec.h_order
        else:
            params["d"] = rec.d
    if rec.case == "aa3":
        notes.append("M11 is folded into the PSL3(3) class")
    return ClassificationReport(
        descriptor=descriptor or (G.name or f"degree-{G.degree} group"),
        o2prime_order=core,
        sylow={"n": n, **fr.summary()},
        pattern=pattern,
        structure_case=rec.case,
        case=case,
        n=n,
        parameters=params,
        canonical=canonical,
        invariants=invariants,
        scott_statement=SCOTT_STATEMENT,
        ledger=ledger,
    )


def classify_recipe(spec: str, seed: int = 0) -> ClassificationReport:
    A = atlas.build(spec, seed=seed)
    return classify(A.group, seed=seed, descriptor=A.recipe.display())

