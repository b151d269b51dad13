"""The verification battery behind ``tameblocks paper-suite``.

Each check returns (ok, witness). Exceptions are caught and recorded
as failures under the exception's class name, so one broken fact never
hides the others.
"""
from __future__ import annotations

import time

from .atlas import build, m11_group, pgl2_variants, symmetric_group
from .blockinv import SL_SIDE, SU_SIDE, cartan_bar, cartan_double, distinguish, olsson_ell
from .classifier import classify
from .modrep2 import (
    chop,
    constituent_dims,
    induce,
    is_relatively_projective,
    perm_module,
    pim_count,
    scott,
    split_summands,
)
from .permgrp import (
    PermGroup,
    centralizer,
    fingerprint,
    normalizer,
    point_stabilizer,
    quotient_by,
    subgroup,
    sylow2,
)
from .twolocal import centralizer_bar, frame_of, fusion_pattern, involution_class_count

CORE_ROSTER = (
    ("SD16", "sd:n=4", 16, "bb"),
    ("SL2pm(3)", "sl2pm:p=3,f=1", 48, "ba"),
    ("SU2pm(5)", "su2pm:p=5,f=1", 240, "ba"),
    ("PGL2*(9)", "pgl2star:p=3,f=1", 720, "ab"),
    ("PSL3(3)", "psl3:p=3,f=1", 5616, "aa"),
    ("PSU3(5)", "psu3:p=5,f=1", 126000, "aa"),
    ("M11", "m11", 7920, "aa"),
)

EXTENDED_ROSTER = (
    ("SL2pm(7)", "sl2pm:p=7,f=1", 672, "ba"),
    ("SU2pm(9)", "su2pm:p=3,f=2", 1440, "ba"),
    ("PGL2*(49)", "pgl2star:p=7,f=1", 117600, "ab"),
    ("PSL3(7)", "psl3:p=7,f=1", 1876896, "aa"),
    ("SD32", "sd:n=5", 32, "bb"),
)


class _Groups:
    """Roster groups built once per suite run."""

    def __init__(self, seed=0, m11=None):
        self.seed = seed
        self._m11 = m11
        self._cache = {}

    def get(self, recipe) -> PermGroup:
        if recipe not in self._cache:
            if recipe == "m11" and self._m11 is not None:
                self._cache[recipe] = m11_group(self._m11, seed=self.seed)
            else:
                self._cache[recipe] = build(recipe, seed=self.seed).group
        return self._cache[recipe]


def quotient_order_and_fingerprint(G, H):
    N = normalizer(G, H)
    Q, _ = quotient_by(N, subgroup(N, H.gens, check=False))
    return Q.order, fingerprint(Q)


# -- checks -----------------------------------------------------------------------------------


def _roster_checks(groups, roster):
    out = []
    for name, recipe, order, _ in roster:
        def check(recipe=recipe, order=order):
            G = groups.get(recipe)
            fr = frame_of(G)
            ok = G.order == order and fr.P.order == 2 ** fr.n and 2 ** fr.n == G.order & -G.order
            return ok, f"|G| = {G.order}, |P| = {fr.P.order}"
        out.append((f"roster.{name}", check))
    return out


def _pattern_checks(groups, roster):
    out = []
    for name, recipe, _, pattern in roster:
        def check(recipe=recipe, pattern=pattern):
            G = groups.get(recipe)
            got = str(fusion_pattern(G, frame_of(G)))
            return got == pattern and olsson_ell(got) == {"bb": 1, "ba": 2, "ab": 2, "aa": 3}[pattern], got
        out.append((f"pattern.{name}", check))
    return out


def _centralizer_checks(groups):
    gl23 = fingerprint(build("gl2_3").group)

    def glcheck(recipe):
        def check():
            G = groups.get(recipe)
            C = centralizer(G, frame_of(G).z)
            return C.order == 48 and fingerprint(C) == gl23, f"|C(z)| = {C.order}"
        return check

    def pgl():
        G = groups.get("pgl2star:p=3,f=1")
        fr = frame_of(G)
        _, Cbar = centralizer_bar(G, fr.z)
        k = involution_class_count(G)
        return fingerprint(Cbar) == fingerprint(build("sd:n=4").group) and k == 1, f"|Cbar| = {Cbar.order}, classes {k}"

    def psu():
        G = groups.get("psu3:p=5,f=1")
        _, Cbar = centralizer_bar(G, frame_of(G).z)
        return fingerprint(Cbar) == fingerprint(build("su2pm:p=5,f=1").group), f"|Cbar| = {Cbar.order}"

    def pgl_distinct():
        base, pgl, frob, star = pgl2_variants(3, 1)
        fps = {fingerprint(pgl), fingerprint(frob), fingerprint(star)}
        return len(fps) == 3, "PGL2(9), PSL2(9).phi, PGL2*(9) pairwise distinct"

    return [("centralizer.PSL3(3)", glcheck("psl3:p=3,f=1")), ("centralizer.M11", glcheck("m11")),
            ("centralizer.PGL2*(9)", pgl), ("centralizer.PSU3(5)", psu), ("atlas.PGL2*_distinct", pgl_distinct)]


def _normalizer_checks(groups):
    s3 = fingerprint(symmetric_group(3))

    def check(recipe):
        def run():
            G = groups.get(recipe)
            fr = frame_of(G)
            nP, _ = quotient_order_and_fingerprint(G, fr.P)
            nQ, fQ = quotient_order_and_fingerprint(G, fr.Q)
            nK, fK = quotient_order_and_fingerprint(G, fr.K)
            ok = nP == 1 and nQ == 6 and nK == 6 and fQ == s3 and fK == s3
            return ok, f"|N(P)/P| = {nP}, |N(Q)/Q| = {nQ}, |N(K)/K| = {nK}"
        return run

    def pims():
        c = pim_count(symmetric_group(3))
        return c == 2, f"{c} PIMs"

    return [("normalizer.PSL3(3)", check("psl3:p=3,f=1")), ("normalizer.M11", check("m11")), ("pims.S3", pims)]


def module_lab_facts(groups, seed=0):
    """Decompositions and vertex brackets used for the PSL3(3) block."""
    G = groups.get("psl3:p=3,f=1")
    fr = frame_of(G)
    M = perm_module(G, point_stabilizer(G, 0))
    dec13 = split_summands(M, seed=seed)
    gl = build("gl2_3").group
    dec3 = split_summands(perm_module(gl, sylow2(gl)), seed=seed)
    twelve = dec13.summands[-1]
    C = centralizer(G, fr.z)
    decC = split_summands(perm_module(C, subgroup(C, fr.P.gens)), seed=seed)
    two = decC.summands[-1]
    big = induce(two, G)
    factors = chop(big, seed=seed)
    twentysix = [c.module for c in factors if c.dim == 26]
    cyc_u = subgroup(G, [fr.u])
    cyc_v = subgroup(G, [fr.v])
    zed = subgroup(G, [fr.z])
    facts = {
        "dims13": dec13.dims,
        "dims3": dec3.dims,
        "verified": dec13.verify() and dec3.verify(),
        "scott13": scott(G, point_stabilizer(G, 0), seed=seed).dim,
        "v12": {"K": is_relatively_projective(twelve, fr.K), "z": is_relatively_projective(twelve, zed),
                "C4u": is_relatively_projective(twelve, cyc_u), "C4v": is_relatively_projective(twelve, cyc_v)},
        "v2": {"Q": is_relatively_projective(two, fr.Q), "C4u": is_relatively_projective(two, cyc_u),
               "C4v": is_relatively_projective(two, cyc_v)},
        "induced_dim": big.dim,
        "factor_dims": constituent_dims(factors),
    }
    if twentysix:
        t = twentysix[0]
        facts["v26"] = {"Q": is_relatively_projective(t, fr.Q), "C4u": is_relatively_projective(t, cyc_u),
                        "C4v": is_relatively_projective(t, cyc_v)}
    return facts


def _module_checks(groups, seed):
    box = {}

    def facts():
        if "f" not in box:
            box["f"] = module_lab_facts(groups, seed)
        return box["f"]

    def split():
        f = facts()
        return f["dims13"] == [1, 12] and f["dims3"] == [1, 2] and f["verified"] and f["scott13"] == 1, \
            f"13 -> {f['dims13']}, 3 -> {f['dims3']}"

    def v12():
        v = facts()["v12"]
        return v["K"] and not (v["z"] or v["C4u"] or v["C4v"]), v

    def v2():
        v = facts()["v2"]
        return v["Q"] and not (v["C4u"] or v["C4v"]), v

    def v26():
        f = facts()
        v = f.get("v26")
        ok = f["induced_dim"] == 234 and v is not None and v["Q"] and not (v["C4u"] or v["C4v"])
        return ok, {"factors": f["factor_dims"], "vertex": v}

    return [("modules.split", split), ("modules.vertex12", v12), ("modules.vertex2", v2), ("modules.vertex26", v26)]


def _block_checks():
    def displays():
        ok = True
        for n in range(4, 9):
            c = 2 ** (n - 3) + 1
            ok &= cartan_bar(n, SL_SIDE).entries == ((4, 2), (2, c))
            ok &= cartan_bar(n, SU_SIDE).entries == ((2 ** (n - 1), 2 ** (n - 2)), (2 ** (n - 2), c))
        return ok, "n = 4..8"

    def dets():
        ok = all(cartan_bar(n, s).det() == 2 ** (n - 1) for n in range(4, 13) for s in (SL_SIDE, SU_SIDE))
        return ok, "det = 2^(n-1), n = 4..12"

    def doubling():
        C = cartan_bar(4, SL_SIDE)
        return cartan_double(C).entries == ((8, 4), (4, 6)), cartan_double(C).to_list()

    def distinct():
        ds = [distinguish(n) for n in range(4, 13)]
        return all(d.sl_value != d.su_value for d in ds), ds[0].to_dict()

    return [("block.cartan_displays", displays), ("block.determinants", dets), ("block.doubling", doubling),
            ("block.distinguish", distinct)]


def _classification_checks(groups, extended):
    def triple(G):
        r = classify(G, seed=groups.seed)
        return r.case.value, r.n, str(r.canonical), r.verified

    def m11():
        t = triple(groups.get("m11"))
        return t == ("AA1", 4, "psl3:p=3,f=1", True), t

    def sl27():
        a = triple(build("sl2pm:p=3,f=3,d=3", seed=groups.seed).group)
        b = triple(groups.get("sl2pm:p=3,f=1"))
        return a == b == ("BA1", 4, "sl2pm:p=3,f=1", True), (a, b)

    def sd32():
        t = triple(build("sd:n=5", seed=groups.seed).group)
        return t == ("BB", 5, "sd:n=5", True), t

    def seeds():
        verdicts = set()
        for s in range(5):
            r = classify(build("pgl2star:p=3,f=1", seed=s).group, seed=s)
            m = classify(m11_group(seed=s), seed=s)
            verdicts.add((r.case.value, str(r.canonical), m.case.value, str(m.canonical)))
        return len(verdicts) == 1, sorted(verdicts)

    checks = [("classify.M11", m11), ("classify.SL2pm(27):C3", sl27), ("classify.SD32", sd32),
              ("classify.seed_determinism", seeds)]
    if extended:
        def ext():
            got = {}
            for name, recipe in (("SL2pm(7)", "sl2pm:p=7,f=1"), ("SU2pm(9)", "su2pm:p=3,f=2"),
                                 ("PGL2*(49)", "pgl2star:p=7,f=1"), ("PSL3(7)", "psl3:p=7,f=1")):
                got[name] = triple(groups.get(recipe))
            want = {"SL2pm(7)": ("BA1", 5), "SU2pm(9)": ("BA2", 5), "PGL2*(49)": ("AB", 5), "PSL3(7)": ("AA1", 5)}
            ok = all(got[k][:2] == v and got[k][3] for k, v in want.items())
            return ok, got
        checks.append(("classify.extended", ext))
    return checks


def paper_suite(tier: str = "core", seed: int = 0, m11_generators=None, progress=None) -> dict:
    """Run the battery; ``m11_generators`` allows fault injection."""
    if tier not in ("core", "extended"):
        raise ValueError("tier must be 'core' or 'extended'")
    groups = _Groups(seed, m11_generators)
    roster = CORE_ROSTER + (EXTENDED_ROSTER if tier == "extended" else ())
    checks = (_roster_checks(groups, roster) + _pattern_checks(groups, roster) + _centralizer_checks(groups)
              + _normalizer_checks(groups) + _module_checks(groups, seed) + _block_checks()
              + _classification_checks(groups, tier == "extended"))
    ledger = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, witness = fn()
            entry = {"check": name, "status": "pass" if ok else "fail", "witness": str(witness)}
        except Exception as exc:  # recorded, not raised: one failure must not mask the rest
            entry = {"check": name, "status": "fail", "witness": f"{type(exc).__name__}: {exc}"}
        entry["seconds"] = round(time.perf_counter() - t0, 3)
        ledger.append(entry)
        if progress:
            progress(entry)
    status = "PASS" if all(e["status"] == "pass" for e in ledger) else "FAIL"
    return {"tier": tier, "seed": seed, "status": status, "ledger": ledger}


__all__ = ["paper_suite", "module_lab_facts", "CORE_ROSTER", "EXTENDED_ROSTER"]
