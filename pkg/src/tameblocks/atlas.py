"""Permutation-group constructors for the semidihedral-Sylow families.

A recipe string looks like ``"sl2pm:p=3,f=1"`` or ``"psl3:p=3,f=1,d=1"``;
``d`` adjoins a field automorphism of odd order d and ``e`` (PSL3/PSU3 only)
adjoins the order-3 diagonal outer automorphism.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .blockinv import two_part
from .errors import BudgetExceeded, DataCorrupt, RecipeInvalid
from .gf import FieldDesc, field_make, is_prime
from .permgrp import Perm, PermGroup, StabChain, conjugacy_classes, o2prime, o_upper_2prime

ORDER_BUDGET = 2 * 10 ** 6
DEGREE_BUDGET = 2 * 10 ** 4

FAMILIES = ("SD", "D", "Q", "C", "SL2pm", "SU2pm", "PGL2star", "PSL3", "PSU3", "GL2_3", "M11")
_ALIASES = {f.lower(): f for f in FAMILIES}
_ALIASES.update({"gl2(3)": "GL2_3", "gl23": "GL2_3", "semidirectcd": "SemidirectCd", "doth": "DotH"})
_FIELD_FAMILIES = ("SL2pm", "SU2pm", "PGL2star", "PSL3", "PSU3")

# standard degree-11 generators, points 1..11
M11_GENERATORS = (
    ((1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11),),
    ((3, 7, 11, 8), (4, 10, 5, 6)),
)


@dataclass(frozen=True)
class GroupRecipe:
    family: str
    p: int | None = None
    f: int = 1
    d: int = 1
    e: int = 1
    n: int | None = None
    m: int | None = None  # cyclic order for family C

    def __post_init__(self):
        fam = self.family
        if fam not in FAMILIES:
            raise RecipeInvalid(f"unknown family {fam!r}")
        if fam in _FIELD_FAMILIES:
            if self.p is None or not is_prime(self.p) or self.p == 2:
                raise RecipeInvalid(f"{fam} needs an odd prime p")
            if self.f < 1:
                raise RecipeInvalid("f must be positive")
            if self.d < 1 or self.d % 2 == 0 or self.f % self.d:
                raise RecipeInvalid("d must be an odd divisor of f")
            q = self.p ** self.f
            if self.e not in (1, 3):
                raise RecipeInvalid("e must be 1 or 3")
            if self.e == 3:
                if fam == "PSL3" and (q - 1) % 3:
                    raise RecipeInvalid("diagonal automorphism needs 3 | q-1")
                if fam == "PSU3" and (q + 1) % 3:
                    raise RecipeInvalid("diagonal automorphism needs 3 | q+1")
                if fam not in ("PSL3", "PSU3"):
                    raise RecipeInvalid("e applies to PSL3/PSU3 only")
            if fam in ("SL2pm", "PSL3"):
                n = 2 + two_part(q + 1).bit_length() - 1
            elif fam in ("SU2pm", "PSU3"):
                n = 2 + two_part(q - 1).bit_length() - 1
            else:
                n = 1 + two_part(q * q - 1).bit_length() - 1
            if n < 4:
                raise RecipeInvalid(f"{fam}({q}) has no semidihedral Sylow 2-subgroup (2-exponent {n})")
            if self.n is not None and self.n != n:
                raise RecipeInvalid(f"n={self.n} inconsistent with q={q} (gives n={n})")
            object.__setattr__(self, "n", n)
        elif fam in ("SD", "D", "Q"):
            lo = 4 if fam == "SD" else (2 if fam == "D" else 3)
            if self.n is None or self.n < lo:
                raise RecipeInvalid(f"{fam} needs n >= {lo}")
        elif fam == "C":
            if self.m is None or self.m < 1:
                raise RecipeInvalid("C needs m >= 1")
        elif fam in ("GL2_3", "M11"):
            object.__setattr__(self, "n", 4)

    @property
    def q(self):
        return self.p ** self.f if self.p else None

    def __str__(self):
        fam = self.family.lower()
        if self.family in _FIELD_FAMILIES:
            parts = [f"p={self.p}", f"f={self.f}"]
            if self.d != 1:
                parts.append(f"d={self.d}")
            if self.e != 1:
                parts.append(f"e={self.e}")
            return f"{fam}:{','.join(parts)}"
        if self.family in ("SD", "D", "Q"):
            return f"{fam}:n={self.n}"
        if self.family == "C":
            return f"c:m={self.m}"
        return fam

    def display(self):
        q = self.q
        base = {
            "SD": lambda: f"SD{2 ** self.n}", "D": lambda: f"D{2 ** self.n}", "Q": lambda: f"Q{2 ** self.n}",
            "C": lambda: f"C{self.m}", "SL2pm": lambda: f"SL2pm({q})", "SU2pm": lambda: f"SU2pm({q})",
            "PGL2star": lambda: f"PGL2*({q * q})" if q else "", "PSL3": lambda: f"PSL3({q})",
            "PSU3": lambda: f"PSU3({q})", "GL2_3": lambda: "GL2(3)", "M11": lambda: "M11",
        }[self.family]()
        if self.e == 3:
            base += ".3"
        if self.d > 1:
            base += f":C{self.d}"
        return base

    def order_formula(self) -> int:
        q = self.q
        fam = self.family
        if fam in ("SD", "D", "Q"):
            o = 2 ** self.n
        elif fam == "C":
            o = self.m
        elif fam in ("SL2pm", "SU2pm"):
            o = 2 * q * (q * q - 1)
        elif fam == "PGL2star":
            o = q * q * (q ** 4 - 1)
        elif fam == "PSL3":
            o = q ** 3 * (q ** 3 - 1) * (q * q - 1) // math.gcd(3, q - 1)
        elif fam == "PSU3":
            o = q ** 3 * (q ** 3 + 1) * (q * q - 1) // math.gcd(3, q + 1)
        elif fam == "GL2_3":
            o = 48
        else:
            o = 7920
        return o * self.d * self.e

    def degree_formula(self) -> int:
        q = self.q
        return {
            "SD": lambda: 2 ** self.n, "D": lambda: 2 ** self.n, "Q": lambda: 2 ** self.n, "C": lambda: self.m,
            "SL2pm": lambda: q * q - 1, "SU2pm": lambda: q ** 4 - 1, "PGL2star": lambda: q * q + 1,
            "PSL3": lambda: q * q + q + 1, "PSU3": lambda: q ** 3 + 1, "GL2_3": lambda: 8, "M11": lambda: 11,
        }[self.family]()


def parse_recipe(spec: str) -> GroupRecipe:
    spec = spec.strip()
    head, _, tail = spec.partition(":")
    fam = _ALIASES.get(head.strip().lower())
    if fam is None:
        raise RecipeInvalid(f"unknown family in {spec!r}")
    params = {}
    if tail:
        for item in tail.split(","):
            k, eq, v = item.partition("=")
            if not eq:
                raise RecipeInvalid(f"malformed parameter {item!r}")
            k = k.strip().lower()
            v = v.strip()
            if k == "base":
                params[k] = v
                continue
            try:
                params[k] = int(v)
            except ValueError:
                raise RecipeInvalid(f"parameter {k} must be an integer") from None
    if fam in ("SemidirectCd", "DotH"):
        base = _ALIASES.get(str(params.pop("base", "")).lower())
        if base is None:
            raise RecipeInvalid(f"{fam} needs base=<family>")
        fam = base
    allowed = {"p", "f", "d", "e", "n", "m", "h"}
    bad = set(params) - allowed
    if bad:
        raise RecipeInvalid(f"unknown parameters {sorted(bad)}")
    if "h" in params:
        params["e"] = params.pop("h")
    return GroupRecipe(fam, **params)


@dataclass
class AtlasGroup:
    recipe: GroupRecipe
    group: PermGroup
    provenance: dict = field(default_factory=dict)


# -- vector/point actions --------------------------------------------------------------


class _VectorSpace:
    def __init__(self, F: FieldDesc, dim: int, points: np.ndarray, projective: bool):
        self.F = F
        self.dim = dim
        self.points = points
        self.projective = projective
        self.weights = F.q ** np.arange(dim, dtype=np.int64)
        lookup = np.full(F.q ** dim, -1, dtype=np.int64)
        lookup[points @ self.weights] = np.arange(len(points))
        self.lookup = lookup

    def _normalize(self, V):
        if not self.projective:
            return V
        F = self.F
        nz = V != 0
        first = np.argmax(nz, axis=1)
        lead = V[np.arange(len(V)), first]
        scale = F.inv_table[lead]
        return F.mul_table[V, scale[:, None]]

    def perm_of_matrix(self, A) -> np.ndarray:
        F = self.F
        A = np.asarray(A, dtype=np.int64)
        V = self.points
        out = np.zeros_like(V)
        for k in range(self.dim):
            out = F.add_table[out, F.mul_table[V[:, k][:, None], A[k][None, :]]]
        idx = self.lookup[self._normalize(out) @ self.weights]
        if (idx < 0).any():
            raise DataCorrupt("matrix does not preserve the point set")
        return idx.astype(np.int32)

    def perm_of_frobenius(self, k: int, then=None) -> np.ndarray:
        """x -> x^(p^k) coordinatewise, optionally after the matrix ``then`` is applied first."""
        F = self.F
        V = self.points
        if then is not None:
            out = np.zeros_like(V)
            for j in range(self.dim):
                out = F.add_table[out, F.mul_table[V[:, j][:, None], np.asarray(then)[j][None, :]]]
            V = out
        fr = np.array([F.frobenius(x, k) for x in range(F.q)], dtype=np.int64)
        idx = self.lookup[self._normalize(fr[V]) @ self.weights]
        if (idx < 0).any():
            raise DataCorrupt("field automorphism does not preserve the point set")
        return idx.astype(np.int32)


def _all_vectors(F, dim):
    return np.array(list(itertools.product(range(F.q), repeat=dim)), dtype=np.int64)[:, ::-1]


def _nonzero_vectors(F, dim):
    V = _all_vectors(F, dim)
    return V[(V != 0).any(axis=1)]


def _projective_points(F, dim):
    V = _nonzero_vectors(F, dim)
    first = np.argmax(V != 0, axis=1)
    return V[V[np.arange(len(V)), first] == 1]


def _collect(degree, candidates, target, seed, name):
    """Keep the candidate generators that enlarge the group until it has ``target`` elements."""
    ch = StabChain(degree)
    gens = []
    for c in candidates:
        if ch.order() == target:
            break
        if ch.add_generator(np.asarray(c, dtype=np.int32)):
            gens.append(np.asarray(c, dtype=np.int32))
    if ch.order() != target:
        raise DataCorrupt(f"{name}: generated order {ch.order()} differs from formula {target}")
    return PermGroup(degree, gens, seed=seed, name=name, chain=ch)


def _elementary(F, n, i, j, t):
    A = np.eye(n, dtype=np.int64)
    A[i, j] = t
    return A


def _basis_values(F):
    w = F.primitive()
    return [F.power(w, k) for k in range(F.f)]


def _sl_candidates(F, n):
    cands = []
    for t in _basis_values(F):
        for i in range(n):
            for j in range(n):
                if i != j:
                    cands.append(_elementary(F, n, i, j, t))
    return cands


# -- constructors ------------------------------------------------------------------------


def _regular_two_group(kind, n):
    half = 2 ** (n - 1)
    size = 2 ** n

    def idx(i, j):
        return (i % half) + j * half

    s_img, t_img = [0] * size, [0] * size
    for j in range(2):
        for i in range(half):
            me = idx(i, j)
            if kind == "SD":
                k = half // 2 - 1
                s_img[me] = idx(i + (k if j else 1), j)
                t_img[me] = idx(i, 1 - j)
            elif kind == "D":
                s_img[me] = idx(i + (-1 if j else 1), j)
                t_img[me] = idx(i, 1 - j)
            else:  # generalized quaternion: t^2 = s^(half/2), t s t^-1 = s^-1
                s_img[me] = idx(i + (-1 if j else 1), j)
                t_img[me] = idx(i, 1) if j == 0 else idx(i + half // 2, 0)
    return [np.array(s_img, dtype=np.int32), np.array(t_img, dtype=np.int32)]


def _build_sl2pm(r: GroupRecipe, seed):
    F = field_make(r.p, r.f)
    sp = _VectorSpace(F, 2, _nonzero_vectors(F, 2), projective=False)
    cands = [sp.perm_of_matrix(A) for A in _sl_candidates(F, 2)]
    cands.append(sp.perm_of_matrix([[1, 0], [0, F.neg(1)]]))
    if r.d > 1:
        cands.append(sp.perm_of_frobenius(r.f // r.d))
    return _collect(sp.points.shape[0], cands, r.order_formula(), seed, r.display()), "nonzero vectors of GF(q)^2"


def _su2_matrices(F, q):
    """All [[a, b], [-lam b^q, lam a^q]] with N(a)+N(b)=1; lam = 1 gives SU2."""
    frob = np.array([F.power(x, q) for x in range(F.q)], dtype=np.int64)
    norm = F.mul_table[np.arange(F.q), frob]
    out = []
    for a in range(F.q):
        for b in range(F.q):
            if F.add(int(norm[a]), int(norm[b])) == 1:
                out.append((a, b))
    return out, frob


def _build_su2pm(r: GroupRecipe, seed):
    q = r.q
    F = field_make(r.p, 2 * r.f)
    sp = _VectorSpace(F, 2, _nonzero_vectors(F, 2), projective=False)
    pairs, frob = _su2_matrices(F, q)
    rng = np.random.default_rng([seed, 11])
    order = rng.permutation(len(pairs))
    cands = []
    for i in order[:40]:
        a, b = pairs[i]
        cands.append(sp.perm_of_matrix([[a, b], [F.neg(int(frob[b])), int(frob[a])]]))
    cands.insert(1, sp.perm_of_matrix([[1, 0], [0, F.neg(1)]]))
    if r.d > 1:
        cands.append(sp.perm_of_frobenius(2 * r.f // r.d))
    return _collect(sp.points.shape[0], cands, r.order_formula(), seed, r.display()), \
        "nonzero vectors of GF(q^2)^2, Hermitian form x1*y1^q + x2*y2^q"


def _pgl2_pieces(p, f):
    F = field_make(p, 2 * f)
    sp = _VectorSpace(F, 2, _projective_points(F, 2), projective=True)
    psl = [sp.perm_of_matrix(A) for A in _sl_candidates(F, 2)]
    delta = [[F.primitive(), 0], [0, 1]]
    return F, sp, psl, delta


def _build_pgl2star(r: GroupRecipe, seed):
    F, sp, psl, delta = _pgl2_pieces(r.p, r.f)
    Q = F.q
    psl_order = Q * (Q * Q - 1) // 2
    psl_group = _collect(sp.points.shape[0], psl, psl_order, seed, f"PSL2({Q})")
    cands = list(psl_group.gens) + [sp.perm_of_frobenius(r.f, then=delta)]
    if r.d > 1:
        cands.append(sp.perm_of_frobenius(2 * r.f // r.d))
    cands = [c.a if isinstance(c, Perm) else c for c in cands]
    return _collect(sp.points.shape[0], cands, r.order_formula(), seed, r.display()), \
        "projective line over GF(q^2), generated by PSL2(q^2) and delta*phi"


def pgl2_variants(p: int, f: int, seed=0):
    """(PGL2(q^2), PSL2(q^2)<phi>, PGL2*(q^2)) on the projective line, for comparison."""
    F, sp, psl, delta = _pgl2_pieces(p, f)
    Q = F.q
    o = Q * (Q * Q - 1)
    base = _collect(sp.points.shape[0], psl, o // 2, seed, f"PSL2({Q})")
    g = [x.a for x in base.gens]
    pgl = _collect(sp.points.shape[0], g + [sp.perm_of_matrix(delta)], o, seed, f"PGL2({Q})")
    frob = _collect(sp.points.shape[0], g + [sp.perm_of_frobenius(f)], o, seed, f"PSL2({Q}).phi")
    star = _collect(sp.points.shape[0], g + [sp.perm_of_frobenius(f, then=delta)], o, seed, f"PGL2*({Q})")
    return base, pgl, frob, star


def _build_psl3(r: GroupRecipe, seed):
    F = field_make(r.p, r.f)
    sp = _VectorSpace(F, 3, _projective_points(F, 3), projective=True)
    cands = [sp.perm_of_matrix(A) for A in _sl_candidates(F, 3)]
    if r.e == 3:
        cands.append(sp.perm_of_matrix(np.diag([F.primitive(), 1, 1])))
    if r.d > 1:
        cands.append(sp.perm_of_frobenius(r.f // r.d))
    return _collect(sp.points.shape[0], cands, r.order_formula(), seed, r.display()), "projective plane over GF(q)"


def _hermitian_pieces(p, f):
    q = p ** f
    F = field_make(p, 2 * f)
    frob = np.array([F.power(x, q) for x in range(F.q)], dtype=np.int64)
    P = _projective_points(F, 3)
    # B(v, v) = v1 v3^q + v2 v2^q + v3 v1^q for the antidiagonal form
    t1 = F.mul_table[P[:, 0], frob[P[:, 2]]]
    t2 = F.mul_table[P[:, 1], frob[P[:, 1]]]
    t3 = F.mul_table[P[:, 2], frob[P[:, 0]]]
    iso = F.add_table[F.add_table[t1, t2], t3] == 0
    sp = _VectorSpace(F, 3, P[iso], projective=True)
    return F, frob, sp


def _build_psu3(r: GroupRecipe, seed):
    q = r.q
    F, frob, sp = _hermitian_pieces(r.p, r.f)
    if sp.points.shape[0] != q ** 3 + 1:
        raise DataCorrupt("isotropic point count differs from q^3 + 1")
    # unitriangular unitary elements: b + b^q = -a^(q+1), c = -a^q
    norm = F.mul_table[np.arange(F.q), frob]
    tr = F.add_table[np.arange(F.q), frob]
    unis = []
    for a in range(F.q):
        for b in range(F.q):
            if F.add(int(tr[b]), int(norm[a])) == 0 and (a or b):
                unis.append(np.array([[1, a, b], [0, 1, F.neg(int(frob[a]))], [0, 0, 1]]))
    rng = np.random.default_rng([seed, 13])
    pick = [unis[i] for i in rng.permutation(len(unis))[:12]]
    J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    cands = []
    for U in pick:
        cands.append(sp.perm_of_matrix(U))
        cands.append(sp.perm_of_matrix(J @ U @ J))
    if r.e == 3:
        w = F.primitive()
        cands.append(sp.perm_of_matrix(np.diag([w, 1, F.inv(int(frob[w]))])))
    if r.d > 1:
        cands.append(sp.perm_of_frobenius(2 * r.f // r.d))
    return _collect(sp.points.shape[0], cands, r.order_formula(), seed, r.display()), \
        "isotropic points of the antidiagonal Hermitian form over GF(q^2)"


def _build_gl23(r, seed):
    F = field_make(3, 1)
    sp = _VectorSpace(F, 2, _nonzero_vectors(F, 2), projective=False)
    cands = [sp.perm_of_matrix(A) for A in ([[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 0], [0, 1]])]
    return _collect(8, cands, 48, seed, "GL2(3)"), "nonzero vectors of GF(3)^2"


def m11_group(gens=M11_GENERATORS, seed=0) -> PermGroup:
    perms = [Perm.from_cycles(11, cyc, base=1) for cyc in gens]
    G = PermGroup(11, perms, seed=seed, name="M11")
    _verify_m11(G)
    return G


def _verify_m11(G):
    if G.order != 7920:
        raise DataCorrupt(f"M11 data gives order {G.order}")
    if o2prime(G).order != 1 or o_upper_2prime(G).order != 7920:
        raise DataCorrupt("M11 data fails the simplicity gates")
    if len(conjugacy_classes(G)) != 10:
        raise DataCorrupt("M11 data does not have 10 classes")


def build(recipe, seed: int = 0) -> AtlasGroup:
    r = parse_recipe(recipe) if isinstance(recipe, str) else recipe
    if r.order_formula() > ORDER_BUDGET or r.degree_formula() > DEGREE_BUDGET:
        raise BudgetExceeded(
            f"{r.display()}: order {r.order_formula()} / degree {r.degree_formula()} beyond desk budget")
    fam = r.family
    if fam in ("SD", "D", "Q"):
        G = PermGroup(2 ** r.n, _regular_two_group(fam, r.n), seed=seed, name=r.display())
        action = "regular"
    elif fam == "C":
        G = PermGroup(r.m, [np.roll(np.arange(r.m), -1).astype(np.int32)], seed=seed, name=r.display())
        action = "regular"
    elif fam == "M11":
        G = m11_group(seed=seed)
        action = "embedded degree-11 generators"
    elif fam == "GL2_3":
        G, action = _build_gl23(r, seed)
    else:
        G, action = {
            "SL2pm": _build_sl2pm, "SU2pm": _build_su2pm, "PGL2star": _build_pgl2star,
            "PSL3": _build_psl3, "PSU3": _build_psu3,
        }[fam](r, seed)
    if G.order != r.order_formula():
        raise DataCorrupt(f"{r.display()}: order {G.order} != formula {r.order_formula()}")
    prov = {"action": action, "degree": G.degree, "order": G.order, "order_formula": r.order_formula()}
    return AtlasGroup(r, G, prov)


# -- canonical representatives ------------------------------------------------------------


def _odd_prime_powers(limit=10 ** 4):
    for q in range(3, limit, 2):
        from .gf import prime_power

        pf = prime_power(q)
        if pf:
            yield q, pf


def canonical_rep(tag: str, n: int) -> GroupRecipe:
    """Smallest-q member of the class with Sylow 2-subgroup of order 2^n."""
    tag = tag.upper()
    if n < 4:
        raise RecipeInvalid("n must be at least 4")
    if tag == "BB":
        return GroupRecipe("SD", n=n)
    fam = {"BA1": "SL2pm", "BA2": "SU2pm", "AB": "PGL2star", "AA1": "PSL3", "AA2": "PSU3"}.get(tag)
    if fam is None:
        raise RecipeInvalid(f"unknown class tag {tag!r}")
    for q, (p, f) in _odd_prime_powers():
        if fam in ("SL2pm", "PSL3"):
            ok = 4 * two_part(q + 1) == 2 ** n
        elif fam in ("SU2pm", "PSU3"):
            ok = 4 * two_part(q - 1) == 2 ** n
        else:
            ok = 2 * two_part(q * q - 1) == 2 ** n
        if ok:
            return GroupRecipe(fam, p=p, f=f)
    raise RecipeInvalid(f"no prime power found for {tag}, n={n}")


def with_params(r: GroupRecipe, **kw) -> GroupRecipe:
    return replace(r, n=None, **kw) if r.family in _FIELD_FAMILIES else replace(r, **kw)


def symmetric_group(m: int, seed: int = 0) -> PermGroup:
    """S_m on m points, generated by an m-cycle and a transposition."""
    if m < 1:
        raise RecipeInvalid("m must be positive")
    if m == 1:
        return PermGroup(1, [], seed=seed, name="S1")
    cyc = np.roll(np.arange(m), -1).astype(np.int32)
    tr = np.arange(m, dtype=np.int32)
    tr[[0, 1]] = [1, 0]
    return PermGroup(m, [cyc, tr], seed=seed, name=f"S{m}")
