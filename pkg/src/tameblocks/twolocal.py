"""2-local structure around a semidihedral Sylow 2-subgroup.

The frame fixes generators ``s, t`` of P with ``tst = s^(2^(n-2)-1)`` and the
derived elements used everywhere else: the central involution ``z``, the
order-4 elements ``u`` (cyclic part) and ``v = st`` (quaternion part), and the
subgroups ``Q = <s^2, st>`` and ``K = <z, t>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockinv import two_part
from .errors import BudgetExceeded, NotSemidihedral, NotSylow
from .permgrp import (
    Perm,
    PermGroup,
    SubgroupHandle,
    centralizer,
    conjugacy_classes,
    fingerprint,
    is_conjugate,
    o2prime,
    order_of_array,
    quotient_by,
    sylow2,
)

AUT_BRUTE_FORCE_MAX_N = 6


@dataclass
class SemidihedralFrame:
    P: PermGroup
    n: int
    s: Perm
    t: Perm
    z: Perm
    Q: SubgroupHandle
    K: SubgroupHandle
    u: Perm
    v: Perm

    def summary(self) -> dict:
        return {"n": self.n, "order_s": self.s.order(), "order_t": self.t.order(),
                "order_Q": self.Q.order, "order_K": self.K.order}


@dataclass(frozen=True)
class FusionPattern:
    invol: str
    ord4: str

    def __post_init__(self):
        if self.invol not in "ab" or self.ord4 not in "ab" or len(self.invol + self.ord4) != 2:
            raise ValueError("fusion letters are 'a' or 'b'")

    def __str__(self):
        return self.invol + self.ord4

    @classmethod
    def parse(cls, text: str) -> "FusionPattern":
        if len(text) != 2:
            raise ValueError(f"bad pattern {text!r}")
        return cls(text[0], text[1])


def _ambient(P):
    return P.parent if isinstance(P, SubgroupHandle) else P


def _exponent(order: int) -> int | None:
    if order < 1 or order & (order - 1):
        return None
    return order.bit_length() - 1


def _power(a, e):
    return (Perm._raw(a) ** e).a


def semidihedral_frame(P: PermGroup) -> SemidihedralFrame:
    n = _exponent(P.order)
    if n is None or n < 4:
        raise NotSemidihedral(f"|P| = {P.order} is not 2^n with n >= 4")
    E = P.elements()
    order = np.array([order_of_array(x) for x in E])
    keys = P.keys(E)
    idx = np.argsort(keys, kind="stable") if keys.dtype != object else np.arange(len(E))
    E, order = E[idx], order[idx]
    half = 2 ** (n - 1)
    k = 2 ** (n - 2) - 1
    invols = [x for x, o in zip(E, order) if o == 2]
    for s in (x for x, o in zip(E, order) if o == half):
        sk = _power(s, k)
        cyc = {P.key(_power(s, i)) for i in range(half)}
        for t in invols:
            if P.key(t) in cyc:
                continue
            # t s t with left-to-right products: (t*s*t)[i] = t[s[t[i]]]
            if np.array_equal(t[s[t]], sk):
                return _make_frame(P, n, s, t)
    raise NotSemidihedral(f"no (s, t) in P of order {P.order} satisfies the semidihedral relation")


def _make_frame(P, n, s, t):
    G = _ambient(P)
    sP, tP = Perm._raw(s), Perm._raw(t)
    z = sP ** (2 ** (n - 2))
    u = sP ** (2 ** (n - 3))
    v = sP * tP
    Q = SubgroupHandle(G, [sP ** 2, v], name="Q", check=False)
    K = SubgroupHandle(G, [z, tP], name="K", check=False)
    fr = SemidihedralFrame(P, n, sP, tP, z, Q, K, u, v)
    _check_frame(fr)
    return fr


def _check_frame(fr):
    P = fr.P
    if fr.z.order() != 2 or any(fr.z * g != g * fr.z for g in P.gens):
        raise NotSemidihedral("z is not a central involution")
    if fr.u.order() != 4 or fr.v.order() != 4:
        raise NotSemidihedral("u or v does not have order 4")
    if fr.Q.order != 2 ** (fr.n - 1):
        raise NotSemidihedral("Q has the wrong order")
    if sum(1 for x in fr.Q.elements() if order_of_array(x) == 2) != 1:
        raise NotSemidihedral("Q has more than one involution")
    if fr.K.order != 4 or not fr.K.is_abelian():
        raise NotSemidihedral("K is not a Klein four group")
    if is_conjugate(P, fr.u, fr.v)[0]:
        raise NotSemidihedral("u and v are conjugate inside P")


def frame_of(G: PermGroup) -> SemidihedralFrame:
    return semidihedral_frame(sylow2(G))


def _require_sylow(G, fr):
    if fr.P.order != two_part(G.order) or not all(G.contains(g) for g in fr.P.gens):
        raise NotSylow("frame subgroup is not a Sylow 2-subgroup of G")


def fusion_pattern(G: PermGroup, frame: SemidihedralFrame) -> FusionPattern:
    _require_sylow(G, frame)
    invol = "a" if is_conjugate(G, frame.t, frame.z)[0] else "b"
    ord4 = "a" if (is_conjugate(G, frame.u, frame.v)[0] or is_conjugate(G, frame.u, ~frame.v)[0]) else "b"
    return FusionPattern(invol, ord4)


def involution_class_count(G: PermGroup) -> int:
    return sum(1 for c in conjugacy_classes(G) if c.order == 2)


def centralizer_bar(G: PermGroup, z) -> tuple:
    """C = C_G(z) and C/O_2'(C)."""
    C = centralizer(G, z)
    O = o2prime(C)
    if O.order == 1:
        return C, C
    Cbar, _ = quotient_by(C, O)
    Cbar.name = "Cbar"
    return C, Cbar


def automorphism_count(frame: SemidihedralFrame) -> int:
    """|Aut(P)| by counting images (s', t') that satisfy the presentation and generate P."""
    n = frame.n
    if n > AUT_BRUTE_FORCE_MAX_N:
        raise BudgetExceeded(f"brute-force automorphism count is limited to n <= {AUT_BRUTE_FORCE_MAX_N}")
    P = frame.P
    E = P.elements()
    half = 2 ** (n - 1)
    k = 2 ** (n - 2) - 1
    orders = np.array([order_of_array(x) for x in E])
    invols = [x for x, o in zip(E, orders) if o == 2]
    count = 0
    for s in (x for x, o in zip(E, orders) if o == half):
        sk = _power(s, k)
        cyc = {P.key(_power(s, i)) for i in range(half)}
        for t in invols:
            if P.key(t) not in cyc and np.array_equal(t[s[t]], sk):
                count += 1
    return count


def aut_is_2group(frame: SemidihedralFrame) -> bool:
    c = automorphism_count(frame)
    return c & (c - 1) == 0


def twolocal_report(G: PermGroup, frame: SemidihedralFrame | None = None) -> dict:
    fr = frame or frame_of(G)
    _, Cbar = centralizer_bar(G, fr.z)
    return {
        "n": fr.n,
        "pattern": str(fusion_pattern(G, fr)),
        "involution_classes": involution_class_count(G),
        "centralizer_bar_fingerprint": fingerprint(Cbar).to_dict(),
    }
