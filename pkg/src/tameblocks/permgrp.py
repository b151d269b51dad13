"""Permutation groups on {0, ..., d-1} backed by a stabilizer chain.

Conventions: a permutation is an integer array ``a`` with ``i -> a[i]``;
products act left to right, ``(x * y)[i] = y[x[i]]``; conjugation is
``x^g = g^-1 x g``.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .blockinv import two_part
from .errors import (
    DegreeMismatch,
    InvalidInput,
    NotMember,
    NotNormal,
    Stalled,
    TooLarge,
)

ENUM_BUDGET = 2 * 10 ** 6
NORMALIZER_INDEX_BUDGET = 10 ** 5
SUBGROUP_ENUM_BUDGET = 20000
COSET_BUDGET = 2 * 10 ** 6

_DTYPE = np.int32


def identity_array(d: int) -> np.ndarray:
    return np.arange(d, dtype=_DTYPE)


def inverse_array(a: np.ndarray) -> np.ndarray:
    inv = np.empty_like(a)
    inv[a] = np.arange(len(a), dtype=a.dtype)
    return inv


def cycle_lengths(a: np.ndarray):
    seen = np.zeros(len(a), dtype=bool)
    out = []
    al = a.tolist()
    for i in range(len(al)):
        if not seen[i]:
            n, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = al[j]
                n += 1
            out.append(n)
    return out


def order_of_array(a: np.ndarray) -> int:
    return reduce(math.lcm, cycle_lengths(a), 1)


class Perm:
    """Immutable permutation."""

    __slots__ = ("a", "_hash")

    def __init__(self, images):
        a = np.array(images, dtype=_DTYPE)
        if a.ndim != 1 or not np.array_equal(np.sort(a), np.arange(len(a))):
            raise InvalidInput("images do not form a permutation")
        a.setflags(write=False)
        self.a = a
        self._hash = None

    @classmethod
    def _raw(cls, a):
        p = object.__new__(cls)
        a = np.ascontiguousarray(a, dtype=_DTYPE)
        a.setflags(write=False)
        p.a = a
        p._hash = None
        return p

    @classmethod
    def identity(cls, d):
        return cls._raw(identity_array(d))

    @classmethod
    def from_cycles(cls, d, cycles, base=0):
        a = list(range(d))
        for cyc in cycles:
            cyc = [c - base for c in cyc]
            for i, c in enumerate(cyc):
                a[c] = cyc[(i + 1) % len(cyc)]
        return cls(a)

    @property
    def degree(self):
        return len(self.a)

    @property
    def images(self):
        return tuple(int(x) for x in self.a)

    def __mul__(self, other: "Perm") -> "Perm":
        if self.degree != other.degree:
            raise DegreeMismatch("degree mismatch in product")
        return Perm._raw(other.a[self.a])

    def __invert__(self) -> "Perm":
        return Perm._raw(inverse_array(self.a))

    def inverse(self):
        return ~self

    def __pow__(self, e: int) -> "Perm":
        base = self if e >= 0 else ~self
        e = abs(e)
        r = identity_array(self.degree)
        b = base.a
        while e:
            if e & 1:
                r = b[r]
            b = b[b]
            e >>= 1
        return Perm._raw(r)

    def conj(self, g: "Perm") -> "Perm":
        """g^-1 * self * g."""
        return Perm._raw(g.a[self.a[inverse_array(g.a)]])

    def order(self) -> int:
        return order_of_array(self.a)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.a, np.arange(self.degree)))

    def __eq__(self, other):
        return isinstance(other, Perm) and np.array_equal(self.a, other.a)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.a.tobytes())
        return self._hash

    def __repr__(self):
        cyc = []
        seen = set()
        for i in range(self.degree):
            if i in seen or self.a[i] == i:
                continue
            c = [i]
            j = int(self.a[i])
            while j != i:
                seen.add(j)
                c.append(j)
                j = int(self.a[j])
            seen.add(i)
            cyc.append("(" + ",".join(map(str, c)) + ")")
        return "".join(cyc) or "()"


def _arr(x) -> np.ndarray:
    return x.a if isinstance(x, Perm) else np.asarray(x, dtype=_DTYPE)


# -- stabilizer chain ----------------------------------------------------------


class _Level:
    __slots__ = ("point", "gens", "gens_inv", "orbit", "index", "reps", "reps_inv", "pending", "_stack")

    def __init__(self, point, degree):
        self.point = point
        self.gens = []
        self.gens_inv = []
        self.orbit = [point]
        self.index = np.full(degree, -1, dtype=np.int64)
        self.index[point] = 0
        ident = identity_array(degree)
        self.reps = [ident]
        self.reps_inv = [ident]
        self.pending = deque()
        self._stack = None

    def _visit(self, k, gi):
        """Extend the orbit through generator gi applied to orbit point k."""
        s = self.gens[gi]
        gamma = int(s[self.orbit[k]])
        if self.index[gamma] < 0:
            self.index[gamma] = len(self.orbit)
            self.orbit.append(gamma)
            u = s[self.reps[k]]
            self.reps.append(u)
            self.reps_inv.append(inverse_array(u))
            return len(self.orbit) - 1
        return None

    def add_gen(self, s):
        self.gens.append(s)
        self.gens_inv.append(inverse_array(s))
        self._stack = None
        gi = len(self.gens) - 1
        new = []
        for k in range(len(self.orbit)):
            self.pending.append((k, gi))
            nk = self._visit(k, gi)
            if nk is not None:
                new.append(nk)
        # points reached for the first time need every generator
        while new:
            k = new.pop()
            for g in range(len(self.gens)):
                self.pending.append((k, g))
                nk = self._visit(k, g)
                if nk is not None:
                    new.append(nk)

    def rep_stack(self):
        if self._stack is None:
            self._stack = np.stack(self.reps)
        return self._stack


class StabChain:
    """Deterministic Schreier-Sims chain, extendable by generators."""

    def __init__(self, degree: int):
        self.degree = degree
        self.levels: list[_Level] = []

    @property
    def base(self):
        return [lv.point for lv in self.levels]

    def order(self) -> int:
        return math.prod(len(lv.orbit) for lv in self.levels)

    def strip(self, g, start=0):
        for j in range(start, len(self.levels)):
            lv = self.levels[j]
            k = lv.index[g[lv.point]]
            if k < 0:
                return g, j
            g = lv.reps_inv[k][g]
        return g, len(self.levels)

    def contains(self, g) -> bool:
        r, j = self.strip(g)
        return j == len(self.levels) and bool(np.array_equal(r, np.arange(self.degree)))

    def _is_id(self, g):
        return bool(np.array_equal(g, np.arange(self.degree)))

    def _add_strong(self, r, lo, hi):
        if hi == len(self.levels):
            moved = np.flatnonzero(r != np.arange(self.degree))
            self.levels.append(_Level(int(moved[0]), self.degree))
        for l in range(lo, hi + 1):
            self.levels[l].add_gen(r)

    def add_generator(self, g) -> bool:
        g = np.asarray(g, dtype=_DTYPE)
        r, j = self.strip(g)
        if j == len(self.levels) and self._is_id(r):
            return False
        self._add_strong(r, 0, j)
        self._complete()
        return True

    def _complete(self):
        i = len(self.levels) - 1
        while i >= 0:
            lv = self.levels[i]
            advanced = False
            while lv.pending:
                k, gi = lv.pending.popleft()
                s = lv.gens[gi]
                gamma = int(s[lv.orbit[k]])
                h = lv.reps_inv[lv.index[gamma]][s[lv.reps[k]]]
                if self._is_id(h):
                    continue
                r, j = self.strip(h, i + 1)
                if j == len(self.levels) and self._is_id(r):
                    continue
                self._add_strong(r, i + 1, j)
                i = j
                advanced = True
                break
            if not advanced:
                i -= 1

    def random_element(self, rng) -> np.ndarray:
        g = identity_array(self.degree)
        for lv in reversed(self.levels):
            u = lv.reps[int(rng.integers(len(lv.orbit)))]
            g = u[g]
        return g

    def elements(self) -> np.ndarray:
        E = identity_array(self.degree)[None, :]
        for lv in reversed(self.levels):
            U = lv.rep_stack()
            E = np.ascontiguousarray(U[:, E].reshape(-1, self.degree))
        return E

    def strong_generators(self):
        seen = {}
        for lv in self.levels:
            for s in lv.gens:
                seen.setdefault(s.tobytes(), s)
        return list(seen.values())

    # cache support
    def dump(self):
        return {
            "base": self.base,
            "levels": [[s.tolist() for s in lv.gens] for lv in self.levels],
        }

    @classmethod
    def load(cls, degree, data):
        ch = cls(degree)
        for pt in data["base"]:
            ch.levels.append(_Level(pt, degree))
        for lv, gens in zip(ch.levels, data["levels"]):
            for s in gens:
                lv.add_gen(np.array(s, dtype=_DTYPE))
            lv.pending.clear()
        return ch


def _cache_path(degree, gens, seed):
    root = os.environ.get("TAMEBLOCKS_CACHE")
    if not root:
        return None
    h = hashlib.sha256()
    h.update(f"{degree}:{seed}:".encode())
    for g in gens:
        h.update(np.asarray(g, dtype=np.int32).tobytes())
    return os.path.join(root, h.hexdigest() + ".json")


def _build_chain(degree, gens, seed) -> StabChain:
    path = _cache_path(degree, gens, seed)
    if path and os.path.exists(path):
        with open(path) as fh:
            return StabChain.load(degree, json.load(fh))
    ch = StabChain(degree)
    for g in gens:
        ch.add_generator(g)
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(ch.dump(), fh)
        os.replace(tmp, path)
    return ch


# -- groups ----------------------------------------------------------------------


class PermGroup:
    """Finite permutation group; the chain and order are computed at construction."""

    def __init__(self, degree: int, gens, seed: int = 0, name: str | None = None, chain: StabChain | None = None):
        self.degree = int(degree)
        arrs = []
        for g in gens:
            a = _arr(g)
            if len(a) != self.degree:
                raise DegreeMismatch(f"generator of degree {len(a)} in a degree-{self.degree} group")
            arrs.append(a)
        self.gens = [Perm._raw(a) for a in arrs]
        self.seed = int(seed)
        self.name = name
        self.chain = chain if chain is not None else _build_chain(self.degree, arrs, self.seed)
        self.order = self.chain.order()
        self._classes = None
        self._base = np.array(self.chain.base, dtype=np.int64)
        self._radix = None
        if len(self._base) and self.degree ** len(self._base) < 2 ** 62:
            self._radix = self.degree ** np.arange(len(self._base), dtype=np.int64)
        self._cache = {}

    def __repr__(self):
        return f"PermGroup({self.name or 'anon'}, degree={self.degree}, order={self.order})"

    def __len__(self):
        return self.order

    @property
    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def contains(self, g) -> bool:
        a = _arr(g)
        if len(a) != self.degree:
            return False
        return self.chain.contains(a)

    __contains__ = contains

    def rng(self, salt=0):
        return np.random.default_rng([self.seed, salt])

    def random_element(self, rng) -> Perm:
        return Perm._raw(self.chain.random_element(rng))

    def elements(self, budget=ENUM_BUDGET) -> np.ndarray:
        if self.order > budget:
            raise TooLarge(f"enumerating {self.order} elements exceeds budget {budget}")
        if "elements" not in self._cache:
            self._cache["elements"] = self.chain.elements()
        return self._cache["elements"]

    # element keys: images of the base determine an element uniquely
    def keys(self, batch: np.ndarray):
        batch = np.atleast_2d(batch)
        if len(self._base) == 0:
            return np.zeros(batch.shape[0], dtype=np.int64)
        sub = batch[:, self._base].astype(np.int64)
        if self._radix is not None:
            return sub @ self._radix
        return np.array([r.tobytes() for r in sub], dtype=object)

    def key(self, g):
        return _key1(self, g)

    def is_abelian(self) -> bool:
        for i, a in enumerate(self.gens):
            for b in self.gens[i + 1:]:
                if a * b != b * a:
                    return False
        return True

    def to_json(self) -> dict:
        d = {"degree": self.degree, "generators": [list(g.images) for g in self.gens], "seed": self.seed}
        if self.name is not None:
            d["name"] = self.name
        return d

    @classmethod
    def from_json(cls, d: dict) -> "PermGroup":
        if "degree" not in d or "generators" not in d:
            raise InvalidInput("group JSON needs 'degree' and 'generators'")
        gens = [Perm(g) for g in d["generators"]]
        return cls(d["degree"], gens, seed=d.get("seed", 0), name=d.get("name"))


class SubgroupHandle(PermGroup):
    """A subgroup of ``parent`` with its own chain."""

    def __init__(self, parent: PermGroup, gens, name=None, check=True, chain=None):
        arrs = [_arr(g) for g in gens]
        if check:
            for a in arrs:
                if not parent.contains(a):
                    raise NotMember("subgroup generator outside parent")
        super().__init__(parent.degree, arrs, seed=parent.seed, name=name, chain=chain)
        self.parent = parent
        # keys are reused from the parent so element sets compare across subgroups
        self._base = parent._base
        self._radix = parent._radix


def group_make(gens, seed: int = 0, name=None, degree=None) -> PermGroup:
    gens = [g if isinstance(g, Perm) else Perm(g) for g in gens]
    if degree is None:
        if not gens:
            raise InvalidInput("degree needed for a group without generators")
        degree = gens[0].degree
    if any(g.degree != degree for g in gens):
        raise DegreeMismatch("generators must share one degree")
    return PermGroup(degree, gens, seed=seed, name=name)


def subgroup(G: PermGroup, gens, name=None, check=True) -> SubgroupHandle:
    return SubgroupHandle(G, gens, name=name, check=check)


def _grow_subgroup(G, target_order, sampler, budget=200, name=None):
    """Build the subgroup generated by sampled elements until it has target_order."""
    ch = StabChain(G.degree)
    gens = []
    tries = 0
    while ch.order() < target_order:
        if tries >= budget:
            raise Stalled(f"subgroup stuck at order {ch.order()} of {target_order}")
        tries += 1
        g = sampler()
        if ch.add_generator(g):
            gens.append(g)
    if ch.order() != target_order:
        raise Stalled(f"overshot subgroup order: {ch.order()} vs {target_order}")
    return SubgroupHandle(G, gens, name=name, check=False, chain=ch)


# -- conjugation orbits ------------------------------------------------------------


class _ElementOrbit:
    """Conjugacy class of x under G by BFS, keeping the BFS tree for witnesses."""

    def __init__(self, G: PermGroup, x, limit=ENUM_BUDGET):
        self.G = G
        self.root = np.array(_arr(x), dtype=_DTYPE)
        gens = [g.a for g in G.gens]
        gens_inv = [inverse_array(g) for g in gens]
        root_key = G.keys(self.root[None, :])[0]
        index = {root_key: 0}
        parent = [-1]
        pgen = [-1]
        frontier = self.root[None, :]
        fidx = np.array([0])
        while len(frontier):
            nxt, nidx = [], []
            for gi, (s, sinv) in enumerate(zip(gens, gens_inv)):
                conj = s[frontier[:, sinv]]
                ks = G.keys(conj)
                for row, k in enumerate(ks.tolist()):
                    if k not in index:
                        index[k] = len(parent)
                        parent.append(int(fidx[row]))
                        pgen.append(gi)
                        nxt.append(conj[row])
                        nidx.append(index[k])
                        if len(parent) > limit:
                            raise TooLarge(f"conjugacy class exceeds {limit}")
            if not nxt:
                break
            frontier = np.array(nxt, dtype=_DTYPE)
            fidx = np.array(nidx)
        self.index = index
        self.parent = np.array(parent, dtype=np.int64)
        self.pgen = np.array(pgen, dtype=np.int64)
        self.size = len(parent)
        self._gens = gens

    def find(self, y):
        return self.index.get(_key1(self.G, y))

    def conjugator(self, idx) -> np.ndarray:
        """c with root^c equal to the orbit element at idx."""
        path = []
        while idx > 0:
            path.append(self.pgen[idx])
            idx = self.parent[idx]
        c = identity_array(self.G.degree)
        for gi in reversed(path):
            c = self._gens[gi][c]
        return c


def _key1(G, g):
    k = G.keys(_arr(g)[None, :])[0]
    return k.item() if hasattr(k, "item") else k


class _SubgroupOrbit:
    """Orbit of a subgroup (as an element set) under conjugation by G."""

    def __init__(self, G: PermGroup, H_elements: np.ndarray, limit=NORMALIZER_INDEX_BUDGET):
        self.G = G
        gens = [g.a for g in G.gens]
        gens_inv = [inverse_array(g) for g in gens]
        root = H_elements
        rk = self._k(root)
        self.index = {rk: 0}
        parent, pgen = [-1], [-1]
        queue = deque([(0, root)])
        while queue:
            i, E = queue.popleft()
            for gi, (s, sinv) in enumerate(zip(gens, gens_inv)):
                F = s[E[:, sinv]]
                k = self._k(F)
                if k not in self.index:
                    self.index[k] = len(parent)
                    parent.append(i)
                    pgen.append(gi)
                    if len(parent) > limit:
                        raise TooLarge(f"subgroup orbit exceeds {limit}")
                    queue.append((len(parent) - 1, F))
        self.parent = parent
        self.pgen = pgen
        self.size = len(parent)
        self._gens = gens

    def _k(self, E):
        ks = self.G.keys(E)
        if ks.dtype == object:
            return tuple(sorted(ks.tolist()))
        return np.sort(ks).tobytes()

    def find(self, E):
        return self.index.get(self._k(E))

    def conjugator(self, idx):
        path = []
        while idx > 0:
            path.append(self.pgen[idx])
            idx = self.parent[idx]
        c = identity_array(self.G.degree)
        for gi in reversed(path):
            c = self._gens[gi][c]
        return c


def _stabilizer(G, orbit, act, name=None):
    """Stabilizer of the orbit root: g * c^-1 for random g, c the tree witness of root.g."""
    target = G.order // orbit.size
    rng = G.rng(7919 + orbit.size)

    def sample():
        g = G.chain.random_element(rng)
        idx = orbit.find(act(g))
        c = orbit.conjugator(idx)
        return inverse_array(c)[g]

    return _grow_subgroup(G, target, sample, name=name)


def _require_member(G, x):
    if not G.contains(x):
        raise NotMember("element is not in the group")


def _centralizer_any(G: PermGroup, x, name=None) -> SubgroupHandle:
    xa = np.array(_arr(x), dtype=_DTYPE)
    orbit = _ElementOrbit(G, xa)

    def act(g):
        return g[xa[inverse_array(g)]]

    return _stabilizer(G, orbit, act, name=name)


class _PointOrbit:
    """Orbit of a point with a transversal, for point stabilizers."""

    def __init__(self, G: PermGroup, pt: int):
        self.G = G
        self.pt = pt
        self.index = {pt: 0}
        self.reps = [identity_array(G.degree)]
        i = 0
        pts = [pt]
        while i < len(pts):
            for g in G.gens:
                y = int(g.a[pts[i]])
                if y not in self.index:
                    self.index[y] = len(pts)
                    pts.append(y)
                    self.reps.append(g.a[self.reps[i]])
            i += 1
        self.size = len(pts)

    def find(self, y):
        return self.index.get(int(y))

    def conjugator(self, idx):
        return self.reps[idx]


def point_stabilizer(G: PermGroup, pt: int) -> SubgroupHandle:
    if not 0 <= pt < G.degree:
        raise InvalidInput(f"point {pt} outside 0..{G.degree - 1}")
    orbit = _PointOrbit(G, pt)
    return _stabilizer(G, orbit, lambda g: g[pt], name=f"Stab({pt})")


def centralizer(G: PermGroup, x) -> SubgroupHandle:
    _require_member(G, x)
    return _centralizer_any(G, x, name=f"C({G.name or 'G'},x)")


def centralizer_of_subgroup(G: PermGroup, H: PermGroup) -> SubgroupHandle:
    C = G
    for g in H.gens:
        C = _centralizer_any(C, g)
    return SubgroupHandle(G, C.gens, check=False, chain=C.chain)


def center(G: PermGroup) -> SubgroupHandle:
    if "center" not in G._cache:
        Z = centralizer_of_subgroup(G, G)
        Z.name = "Z"
        G._cache["center"] = Z
    return G._cache["center"]


def is_conjugate(G: PermGroup, x, y):
    """Return (True, g) with g^-1 x g = y, or (False, None)."""
    _require_member(G, x)
    _require_member(G, y)
    xa, ya = _arr(x), _arr(y)
    if order_of_array(xa) != order_of_array(ya) or sorted(cycle_lengths(xa)) != sorted(cycle_lengths(ya)):
        return False, None
    orbit = _ElementOrbit(G, xa)
    idx = orbit.find(ya)
    if idx is None:
        return False, None
    return True, Perm._raw(orbit.conjugator(idx))


# -- conjugacy classes -------------------------------------------------------------


@dataclass
class ConjClass:
    rep: Perm
    size: int
    order: int
    keys: np.ndarray = field(repr=False)

    def __contains__(self, key):
        i = np.searchsorted(self.keys, key)
        return i < len(self.keys) and self.keys[i] == key


def conjugacy_classes(G: PermGroup, budget=ENUM_BUDGET, max_samples=200000):
    """Class representatives and sizes, sorted by (element order, size)."""
    if G._classes is not None:
        return G._classes
    if G.order > budget:
        raise TooLarge(f"|G| = {G.order} exceeds class budget {budget}")
    classes = []
    covered = 0
    keyed = G._radix is not None or len(G._base) == 0

    def known(k):
        return any(k in c for c in classes) if keyed else any(k in c.keyset for c in classes)

    def add(x):
        nonlocal covered
        orb = _ElementOrbit(G, x)
        ks = list(orb.index.keys())
        if keyed:
            arr = np.sort(np.array(ks, dtype=np.int64))
            c = ConjClass(Perm._raw(np.array(x, dtype=_DTYPE)), orb.size, order_of_array(x), arr)
        else:
            c = ConjClass(Perm._raw(np.array(x, dtype=_DTYPE)), orb.size, order_of_array(x), np.array([]))
            c.keyset = set(ks)
        classes.append(c)
        covered += orb.size

    def consider(x):
        k = _key1(G, x)
        if not known(k):
            add(x)
            return True
        return False

    def consider_with_powers(x):
        if consider(x):
            n = order_of_array(x)
            for e in range(2, n):
                if covered >= G.order:
                    break
                consider(_power_array(x, e))

    consider(identity_array(G.degree))
    if G.order <= SUBGROUP_ENUM_BUDGET:
        for x in G.elements():
            if covered >= G.order:
                break
            consider(x)
    else:
        for z in center(G).elements():
            consider(z)
        rng = G.rng(104729)
        for g in G.gens:
            consider_with_powers(g.a)
        samples = 0
        while covered < G.order:
            if samples >= max_samples:
                raise TooLarge(f"class search incomplete after {samples} samples ({covered}/{G.order})")
            samples += 1
            consider_with_powers(G.chain.random_element(rng))
    if covered != G.order:
        raise AssertionError("class sizes do not sum to the group order")
    classes.sort(key=lambda c: (c.order, c.size, _key1(G, c.rep.a) if keyed else 0))
    G._classes = classes
    return classes


def _power_array(x, e):
    r = identity_array(len(x))
    b = x
    while e:
        if e & 1:
            r = b[r]
        b = b[b]
        e >>= 1
    return r


def class_of(G: PermGroup, x) -> int:
    k = _key1(G, x)
    for i, c in enumerate(conjugacy_classes(G)):
        if (k in c) if len(c.keys) else (k in getattr(c, "keyset", ())):
            return i
    raise NotMember("element not in any class")


# -- normal structure ----------------------------------------------------------------


def is_normal(G: PermGroup, N: PermGroup) -> bool:
    for n in N.gens:
        for g in G.gens:
            if not N.contains(n.conj(g)):
                return False
    return True


def normal_closure(G: PermGroup, elems, stop=None, name=None) -> SubgroupHandle:
    """Smallest normal subgroup of G containing elems. ``stop(order)`` aborts early."""
    ch = StabChain(G.degree)
    gens = []
    queue = deque()
    for e in elems:
        a = np.array(_arr(e), dtype=_DTYPE)
        if ch.add_generator(a):
            gens.append(a)
            queue.append(a)
    ginv = [inverse_array(g.a) for g in G.gens]
    while queue:
        if stop is not None and stop(ch.order()):
            return None
        n = queue.popleft()
        for g, gi in zip(G.gens, ginv):
            c = g.a[n[gi]]
            if ch.add_generator(c):
                gens.append(c)
                queue.append(c)
    if stop is not None and stop(ch.order()):
        return None
    return SubgroupHandle(G, gens, name=name, check=False, chain=ch)


def derived_subgroup(G: PermGroup) -> SubgroupHandle:
    if "derived" in G._cache:
        return G._cache["derived"]
    comms = []
    for i, a in enumerate(G.gens):
        for b in G.gens[i + 1:]:
            c = (~a) * (~b) * a * b
            if not c.is_identity():
                comms.append(c)
    D = normal_closure(G, comms, name="G'") if comms else SubgroupHandle(G, [], name="G'", check=False)
    G._cache["derived"] = D
    return D


def o2prime(G: PermGroup) -> SubgroupHandle:
    """Largest normal subgroup of odd order."""
    if "o2prime" in G._cache:
        return G._cache["o2prime"]
    odd = []
    for c in conjugacy_classes(G):
        if c.order % 2 == 1 and c.order > 1:
            if any(N.contains(c.rep) for N in odd):
                continue
            N = normal_closure(G, [c.rep], stop=lambda o: o % 2 == 0)
            if N is not None:
                odd.append(N)
    gens = [g for N in odd for g in N.gens]
    O = normal_closure(G, gens, name="O2'") if gens else SubgroupHandle(G, [], name="O2'", check=False)
    if O.order % 2 == 0:
        raise AssertionError("odd normal closures generated an even-order subgroup")
    G._cache["o2prime"] = O
    return O


def o_upper_2prime(G: PermGroup) -> SubgroupHandle:
    """Normal closure of a Sylow 2-subgroup: the smallest normal subgroup of odd index."""
    if "oupper" in G._cache:
        return G._cache["oupper"]
    P = sylow2(G)
    N = normal_closure(G, P.gens, name="O^2'") if P.gens else SubgroupHandle(G, [], name="O^2'", check=False)
    G._cache["oupper"] = N
    return N


# -- Sylow and normalizers --------------------------------------------------------------


def normalizer(G: PermGroup, H: PermGroup, name=None) -> SubgroupHandle:
    if H.order == G.order:
        return SubgroupHandle(G, G.gens, name=name, check=False, chain=G.chain)
    if H.order > SUBGROUP_ENUM_BUDGET:
        raise TooLarge(f"|H| = {H.order} too large to enumerate for the normalizer")
    if is_normal(G, H):
        return SubgroupHandle(G, G.gens, name=name, check=False, chain=G.chain)
    E = H.elements()
    orbit = _SubgroupOrbit(G, E)

    def act(g):
        return g[E[:, inverse_array(g)]]

    return _stabilizer(G, orbit, act, name=name)


def two_part_of_element(a: np.ndarray) -> np.ndarray:
    n = order_of_array(a)
    odd = n // two_part(n)
    return _power_array(a, odd)


def sylow2(G: PermGroup, seed: int | None = None, retries: int = 5) -> SubgroupHandle:
    """Sylow 2-subgroup by normalizer ascent from the 2-part of a random element."""
    if seed is None and "sylow2" in G._cache:
        return G._cache["sylow2"]
    target = two_part(G.order)
    base_seed = G.seed if seed is None else seed
    last = None
    for attempt in range(retries):
        rng = np.random.default_rng([base_seed, 2, attempt])
        try:
            P = _sylow_ascent(G, target, rng)
        except Stalled as exc:
            last = exc
            continue
        if seed is None:
            G._cache["sylow2"] = P
        return P
    raise Stalled(f"Sylow ascent failed after {retries} attempts: {last}")


def _sylow_ascent(G, target, rng, budget=400):
    ident = identity_array(G.degree)
    if target == 1:
        return SubgroupHandle(G, [], name="P", check=False)
    y = None
    for _ in range(budget):
        y = two_part_of_element(G.chain.random_element(rng))
        if not np.array_equal(y, ident):
            break
    else:
        raise Stalled("no 2-element found")
    ch = StabChain(G.degree)
    ch.add_generator(y)
    gens = [y]
    while ch.order() < target:
        H = SubgroupHandle(G, gens, check=False, chain=ch)
        N = normalizer(G, H)
        if two_part(N.order) == ch.order():
            raise Stalled("2-subgroup is self-normalizing in its 2-part yet not Sylow")
        for _ in range(budget):
            y = two_part_of_element(N.chain.random_element(rng))
            if not ch.contains(y):
                break
        else:
            raise Stalled("normalizer ascent found no new 2-element")
        new = StabChain(G.degree)
        for g in gens + [y]:
            new.add_generator(g)
        if two_part(new.order()) != new.order():
            raise Stalled("extension is not a 2-group")
        ch = new
        gens = gens + [y]
    return SubgroupHandle(G, gens, name="P", check=False, chain=ch)


# -- cosets and quotients ----------------------------------------------------------------


@dataclass
class CosetAction:
    """Right cosets H r_i of H in G with the action of G's generators."""

    G: PermGroup
    H: PermGroup
    reps: list
    perms: list
    labels: dict

    @property
    def index(self):
        return len(self.reps)

    def coset_of(self, g) -> int:
        E = self.H.elements()
        return self.labels[_label(self.G, _arr(g)[E])]

    def image(self, g) -> Perm:
        """Permutation induced by g on the cosets."""
        a = _arr(g)
        return Perm._raw(np.array([self.coset_of(a[r]) for r in self.reps], dtype=_DTYPE))


def _label(G, batch):
    ks = G.keys(batch)
    return min(ks.tolist())


def coset_action(G: PermGroup, H: PermGroup, budget=COSET_BUDGET) -> CosetAction:
    index = G.order // H.order
    if H.order * index > budget or H.order > ENUM_BUDGET:
        raise TooLarge(f"coset enumeration |H|*|G:H| = {H.order * index} exceeds {budget}")
    E = H.elements()
    ident = identity_array(G.degree)
    reps = [ident]
    labels = {_label(G, E): 0}
    i = 0
    table = []
    while i < len(reps):
        r = reps[i]
        row = []
        for s in G.gens:
            rs = s.a[r]
            lab = _label(G, rs[E])
            if lab not in labels:
                labels[lab] = len(reps)
                reps.append(rs)
            row.append(labels[lab])
        table.append(row)
        i += 1
    if len(reps) != index:
        raise AssertionError("coset count disagrees with the index")
    perms = [Perm._raw(np.array([table[c][j] for c in range(index)], dtype=_DTYPE)) for j in range(len(G.gens))]
    return CosetAction(G, H, reps, perms, labels)


def quotient_by(G: PermGroup, N: PermGroup, budget=COSET_BUDGET):
    """G/N acting faithfully on the cosets of N. Returns (quotient, coset action)."""
    if not is_normal(G, N):
        raise NotNormal("subgroup is not normal")
    ca = coset_action(G, N, budget=budget)
    Q = PermGroup(ca.index, ca.perms, seed=G.seed, name=f"{G.name or 'G'}/N")
    return Q, ca


# -- isomorphism invariants ---------------------------------------------------------------


@dataclass(frozen=True)
class Fingerprint:
    order: int
    nclasses: int
    class_profile: tuple
    center_order: int
    derived_order: int
    abelianization: tuple

    def to_dict(self):
        return {
            "order": self.order,
            "nclasses": self.nclasses,
            "class_profile": [list(x) for x in self.class_profile],
            "center_order": self.center_order,
            "derived_order": self.derived_order,
            "abelianization": list(self.abelianization),
            "kind": "fingerprint-isomorphic invariant",
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["order"], d["nclasses"], tuple(tuple(x) for x in d["class_profile"]),
                   d["center_order"], d["derived_order"], tuple(d["abelianization"]))


def abelian_invariants(A: PermGroup):
    """Invariant factors of an abelian permutation group."""
    if A.order == 1:
        return ()
    E = A.elements()
    orders = np.array([order_of_array(x) for x in E])
    m = A.order
    primes = [p for p in range(2, m + 1) if m % p == 0 and all(p % q for q in range(2, int(p ** 0.5) + 1))]
    cyclic_parts = []
    for p in primes:
        counts = [1]
        k = 1
        while counts[-1] < two_part_like(m, p):
            counts.append(int(np.sum(np.array([(p ** k) % o == 0 for o in orders]))))
            k += 1
        # number of cyclic factors of order >= p^k is log_p(counts[k]/counts[k-1])
        ranks = [round(math.log(counts[i] / counts[i - 1], p)) for i in range(1, len(counts))]
        parts = []
        for i, r in enumerate(ranks):
            nxt = ranks[i + 1] if i + 1 < len(ranks) else 0
            parts += [p ** (i + 1)] * (r - nxt)
        cyclic_parts.append(sorted(parts, reverse=True))
    width = max(len(c) for c in cyclic_parts)
    inv = []
    for i in range(width):
        inv.append(math.prod(c[i] for c in cyclic_parts if i < len(c)))
    return tuple(sorted(inv))


def two_part_like(m, p):
    r = 1
    while m % p == 0:
        m //= p
        r *= p
    return r


def fingerprint(G: PermGroup) -> Fingerprint:
    if "fingerprint" in G._cache:
        return G._cache["fingerprint"]
    cl = conjugacy_classes(G)
    prof = tuple(sorted((c.order, c.size) for c in cl))
    Z = center(G)
    D = derived_subgroup(G)
    if D.order == G.order:
        ab = ()
    else:
        A, _ = quotient_by(G, D)
        ab = abelian_invariants(A)
    fp = Fingerprint(G.order, len(cl), prof, Z.order, D.order, ab)
    G._cache["fingerprint"] = fp
    return fp


def fingerprint_match(A, B) -> bool:
    fa = A if isinstance(A, Fingerprint) else fingerprint(A)
    fb = B if isinstance(B, Fingerprint) else fingerprint(B)
    return fa == fb


# -- constructions ----------------------------------------------------------------------


def direct_product(A: PermGroup, B: PermGroup, name=None) -> PermGroup:
    d = A.degree + B.degree
    gens = []
    for g in A.gens:
        gens.append(np.concatenate([g.a, np.arange(A.degree, d)]))
    for g in B.gens:
        gens.append(np.concatenate([np.arange(A.degree), g.a + A.degree]))
    return PermGroup(d, gens, seed=A.seed, name=name)


def element_orders_histogram(G: PermGroup):
    hist = {}
    for c in conjugacy_classes(G):
        hist[c.order] = hist.get(c.order, 0) + c.size
    return dict(sorted(hist.items()))
