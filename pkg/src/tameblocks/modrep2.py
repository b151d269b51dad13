"""GF(2) representations of permutation groups.

Matrices act on row vectors, ``v -> v @ A``, so the matrix of ``x*y`` (x then
y) is ``A(x) @ A(y)``, matching the permutation product convention.

Composition factors come from the Holt-Rees form of the MeatAxe. Direct
summands come from Fitting decompositions of endomorphisms, with End(M)
computed from a spinning basis of M. Relative projectivity uses Higman's
trace criterion.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import Inconclusive, NonUnique, NotMember, ShapeMismatch, TooLarge
from .gf2 import MatGF2, gf2_solve
from .permgrp import PermGroup, _arr, _label, coset_action, inverse_array, order_of_array, conjugacy_classes

PERM_MODULE_INDEX_BUDGET = 2000
CHOP_DIM_BUDGET = 2000
SPLIT_DIM_BUDGET = 300
PROJECTIVITY_DIM_BUDGET = 64
INDUCE_DIM_BUDGET = 2000
ELEMENT_INDEX_BUDGET = 200000
LOCAL_SAMPLES = 50
RELATION_WORDS = 20


# -- GF(2)[x] as python ints, bit i = coefficient of x^i ---------------------------------


def poly_deg(a: int) -> int:
    return a.bit_length() - 1


def poly_mod(a: int, m: int) -> int:
    dm = poly_deg(m)
    while a and poly_deg(a) >= dm:
        a ^= m << (poly_deg(a) - dm)
    return a


def poly_mul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _poly_divmod(a, m):
    q = 0
    dm = poly_deg(m)
    while a and poly_deg(a) >= dm:
        s = poly_deg(a) - dm
        q |= 1 << s
        a ^= m << s
    return q, a


_IRRED_CACHE: dict[int, list[int]] = {}


def irreducibles_up_to(degree: int) -> list[int]:
    """All irreducible polynomials over GF(2) of degree 1..degree, by a sieve."""
    if degree in _IRRED_CACHE:
        return _IRRED_CACHE[degree]
    found: list[int] = []
    for deg in range(1, degree + 1):
        for p in range(1 << deg, 1 << (deg + 1)):
            if deg > 1 and not (p & 1):
                continue
            if all(poly_mod(p, q) for q in found if 2 * poly_deg(q) <= deg):
                found.append(p)
    _IRRED_CACHE[degree] = found
    return found


def small_factors(poly: int, max_degree: int = 12) -> list[int]:
    """Distinct irreducible factors of degree <= max_degree."""
    out = []
    for q in irreducibles_up_to(max_degree):
        if poly_deg(q) > poly_deg(poly):
            break
        if poly_mod(poly, q) == 0:
            out.append(q)
            while True:
                quo, rem = _poly_divmod(poly, q)
                if rem:
                    break
                poly = quo
    return out


def poly_eval(p: int, A: MatGF2) -> MatGF2:
    n = A.rows
    R = MatGF2.zeros(n, n)
    I = MatGF2.identity(n)
    for i in range(poly_deg(p), -1, -1):
        R = R @ A
        if (p >> i) & 1:
            R = R + I
    return R


# -- row vectors as python ints ------------------------------------------------------------


def _row_ints(A: MatGF2) -> list[int]:
    out = []
    for r in A.words:
        x = 0
        for w, word in enumerate(r.tolist()):
            x |= int(word) << (64 * w)
        out.append(x)
    return out


def _vec_times(v: int, rows: list[int]) -> int:
    r = 0
    i = 0
    while v:
        if v & 1:
            r ^= rows[i]
        v >>= 1
        i += 1
    return r


def _ints_to_mat(vs, cols) -> MatGF2:
    w = max(1, (cols + 63) // 64)
    words = np.zeros((len(vs), w), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(vs):
        for j in range(w):
            words[i, j] = (v >> (64 * j)) & mask
    return MatGF2(len(vs), cols, words)


class _Echelon:
    """Incremental echelon form over GF(2) with combination tracking."""

    def __init__(self):
        self.piv: dict[int, tuple[int, int]] = {}

    def reduce(self, x: int, c: int = 0):
        while x:
            hb = x.bit_length() - 1
            e = self.piv.get(hb)
            if e is None:
                break
            x ^= e[0]
            c ^= e[1]
        return x, c

    def add(self, x: int, c: int):
        self.piv[x.bit_length() - 1] = (x, c)

    def __len__(self):
        return len(self.piv)


# -- element words ---------------------------------------------------------------------------


class _ElementIndex:
    """Cayley-graph BFS tree of G over its generators (right multiplication)."""

    def __init__(self, G: PermGroup, budget=ELEMENT_INDEX_BUDGET):
        if G.order > budget:
            raise TooLarge(f"element index of a group of order {G.order} exceeds {budget}")
        self.G = G
        gens = [g.a for g in G.gens]
        ident = np.arange(G.degree, dtype=np.int32)
        self.index = {int(G.keys(ident[None, :])[0]) if G._radix is not None else G.keys(ident[None, :])[0]: 0}
        parent, pgen = [-1], [-1]
        frontier, fidx = ident[None, :], [0]
        while len(frontier):
            nxt, nidx = [], []
            for gi, s in enumerate(gens):
                prod = s[frontier]
                ks = G.keys(prod).tolist()
                for row, k in enumerate(ks):
                    if k not in self.index:
                        self.index[k] = len(parent)
                        parent.append(fidx[row])
                        pgen.append(gi)
                        nxt.append(prod[row])
                        nidx.append(self.index[k])
            frontier = np.array(nxt, dtype=np.int32) if nxt else np.zeros((0, G.degree), dtype=np.int32)
            fidx = nidx
        if len(parent) != G.order:
            raise AssertionError("Cayley BFS did not reach every element")
        self.parent = parent
        self.pgen = pgen

    def word(self, g) -> list[int]:
        k = self.G.keys(_arr(g)[None, :]).tolist()[0]
        idx = self.index.get(k)
        if idx is None:
            raise NotMember("element not in the group")
        path = []
        while idx > 0:
            path.append(self.pgen[idx])
            idx = self.parent[idx]
        return path[::-1]


# -- modules --------------------------------------------------------------------------------


class GF2Module:
    """A representation of ``group``: one invertible matrix per generator."""

    def __init__(self, group: PermGroup, mats, label: str = "", dim: int | None = None):
        mats = list(mats)
        if len(mats) != len(group.gens):
            raise ShapeMismatch("one matrix per group generator is required")
        if dim is None:
            if not mats:
                raise ShapeMismatch("dim is required for a group without generators")
            dim = mats[0].rows
        for A in mats:
            if (A.rows, A.cols) != (dim, dim):
                raise ShapeMismatch("generator matrices must be square of one size")
        self.group = group
        self.mats = mats
        self.label = label
        self.dim = int(dim)
        self._index = None
        self._words = {}

    @classmethod
    def from_mats(cls, group, mats, label="", dim=None):
        return cls(group, mats, label, dim)

    def __repr__(self):
        return f"GF2Module(dim={self.dim}, label={self.label!r})"

    def rep(self, g) -> MatGF2:
        """Matrix of an arbitrary group element (via a word in the generators)."""
        if self._index is None:
            self._index = _ElementIndex(self.group)
        return self.word_matrix(tuple(self._index.word(g)))

    def word_matrix(self, word) -> MatGF2:
        word = tuple(word)
        if word in self._words:
            return self._words[word]
        if not word:
            M = MatGF2.identity(self.dim)
        else:
            M = self.word_matrix(word[:-1]) @ self.mats[word[-1]]
        if len(self._words) < 4096:
            self._words[word] = M
        return M

    def check_relations(self, seed=0, words=RELATION_WORDS) -> bool:
        """Random words: the matrix raised to the permutation's order is the identity."""
        rng = np.random.default_rng([seed, 101])
        k = len(self.mats)
        if k == 0:
            return True
        for _ in range(words):
            w = rng.integers(k, size=int(rng.integers(1, 12))).tolist()
            perm = np.arange(self.group.degree, dtype=np.int32)
            for i in w:
                perm = self.group.gens[i].a[perm]
            m = self.word_matrix(tuple(w)).power(order_of_array(perm))
            if not m.is_identity():
                return False
        for g, A in zip(self.group.gens, self.mats):
            if not A.power(g.order()).is_identity():
                return False
        return True

    def is_trivial_action(self) -> bool:
        return all(A.is_identity() for A in self.mats)

    def fixed_points(self) -> MatGF2:
        """Basis of {v : v A = v for all generators}."""
        if not self.mats:
            return MatGF2.identity(self.dim)
        stacked = _hstack([A + MatGF2.identity(self.dim) for A in self.mats])
        return stacked.T.nullspace()

    def cofixed_functionals(self) -> MatGF2:
        """Basis of column vectors f with A f = f, i.e. homomorphisms M -> k."""
        if not self.mats:
            return MatGF2.identity(self.dim)
        stacked = MatGF2.zeros(0, self.dim)
        for A in self.mats:
            stacked = stacked.vstack(A + MatGF2.identity(self.dim))
        return stacked.nullspace()

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "generators": [A.to_hex_rows() for A in self.mats],
            "group": self.group.name or "G",
            "label": self.label,
        }

    @classmethod
    def from_json(cls, d: dict, group: PermGroup) -> "GF2Module":
        mats = [MatGF2.from_hex_rows(rows, d["dim"]) for rows in d["generators"]]
        for A in mats:
            if A.rows != d["dim"]:
                raise ShapeMismatch("generator row count differs from dim")
        return cls.from_mats(group, mats, d.get("label", ""), dim=d["dim"])


def _hstack(ms):
    dense = np.hstack([m.to_dense() for m in ms])
    return MatGF2.from_dense(dense)


def trivial_module(G: PermGroup, label="k") -> GF2Module:
    return GF2Module.from_mats(G, [MatGF2.identity(1) for _ in G.gens], label, dim=1)


def direct_sum(M: GF2Module, N: GF2Module, label=None) -> GF2Module:
    mats = []
    for A, B in zip(M.mats, N.mats):
        top = np.hstack([A.to_dense(), np.zeros((M.dim, N.dim), dtype=np.uint8)])
        bot = np.hstack([np.zeros((N.dim, M.dim), dtype=np.uint8), B.to_dense()])
        mats.append(MatGF2.from_dense(np.vstack([top, bot])))
    return GF2Module.from_mats(M.group, mats, label or f"{M.label}+{N.label}", dim=M.dim + N.dim)


def _perm_matrix(images) -> MatGF2:
    n = len(images)
    d = np.zeros((n, n), dtype=np.uint8)
    d[np.arange(n), np.asarray(images)] = 1
    return MatGF2.from_dense(d)


def perm_module(G: PermGroup, H: PermGroup, budget=PERM_MODULE_INDEX_BUDGET) -> GF2Module:
    """k_H induced to G: the permutation module on the right cosets of H."""
    index = G.order // H.order
    if index > budget:
        raise TooLarge(f"index {index} exceeds the permutation-module budget {budget}")
    for h in H.gens:
        if not G.contains(h):
            raise NotMember("H is not a subgroup of G")
    if index == 1:
        return trivial_module(G, "k")
    ca = coset_action(G, H)
    mats = [_perm_matrix(p.a) for p in ca.perms]
    return GF2Module.from_mats(G, mats, f"k_{H.name or 'H'}^G", dim=index)


def restrict(M: GF2Module, H: PermGroup) -> GF2Module:
    for h in H.gens:
        if not M.group.contains(h):
            raise NotMember("restriction to a non-subgroup")
    mats = [M.rep(h) for h in H.gens]
    return GF2Module.from_mats(H, mats, f"{M.label}|{H.name or 'H'}", dim=M.dim)


def induce(M: GF2Module, G: PermGroup, budget=INDUCE_DIM_BUDGET) -> GF2Module:
    H = M.group
    if not all(G.contains(h) for h in H.gens):
        raise NotMember("module group is not a subgroup of G")
    index = G.order // H.order
    d = M.dim
    if d * index > budget:
        raise TooLarge(f"induced dimension {d * index} exceeds {budget}")
    ca = coset_action(G, H)
    reps = ca.reps
    reps_inv = [inverse_array(r) for r in reps]
    mats = []
    for gi, g in enumerate(G.gens):
        big = np.zeros((d * index, d * index), dtype=np.uint8)
        perm = ca.perms[gi].a
        for i, r in enumerate(reps):
            j = int(perm[i])
            h = reps_inv[j][g.a[r]]  # r_i g r_j^-1, an element of H
            big[i * d:(i + 1) * d, j * d:(j + 1) * d] = M.rep(h).to_dense()
        mats.append(MatGF2.from_dense(big))
    return GF2Module.from_mats(G, mats, f"{M.label}^{G.name or 'G'}", dim=d * index)


def submodule_action(M: GF2Module, basis: MatGF2) -> GF2Module:
    """Action on an invariant subspace given by an RREF basis."""
    red, piv = basis.rref()
    red = red.take_rows(range(len(piv)))
    mats = []
    for A in M.mats:
        img = (red @ A).to_dense()
        mats.append(MatGF2.from_dense(img[:, piv]))
    return GF2Module.from_mats(M.group, mats, M.label + "/sub", dim=len(piv))


def quotient_action(M: GF2Module, basis: MatGF2) -> GF2Module:
    """Action on M / span(basis), in the basis of non-pivot unit vectors."""
    red, piv = basis.rref()
    red = red.take_rows(range(len(piv)))
    free = [c for c in range(M.dim) if c not in set(piv)]
    mats = []
    dense_red = red.to_dense()
    for A in M.mats:
        img = A.to_dense()[free].copy()  # images of the complement basis
        # reduce modulo the submodule: clear pivot columns
        for r, c in enumerate(piv):
            rows = img[:, c] == 1
            img[rows] ^= dense_red[r]
        mats.append(MatGF2.from_dense(img[:, free]))
    return GF2Module.from_mats(M.group, mats, M.label + "/quot", dim=len(free))


def spin(vectors: MatGF2, mats) -> MatGF2:
    """RREF basis of the smallest subspace containing ``vectors`` and closed under ``mats``."""
    red, piv = vectors.rref()
    basis = red.take_rows(range(len(piv)))
    frontier = basis
    while frontier.rows:
        imgs = [frontier @ A for A in mats]
        if not imgs:
            break
        stack = basis
        for m in imgs:
            stack = stack.vstack(m)
        red, newpiv = stack.rref()
        if len(newpiv) == len(piv):
            break
        old = set(piv)
        fresh = [i for i, c in enumerate(newpiv) if c not in old]
        basis = red.take_rows(range(len(newpiv)))
        frontier = basis.take_rows(fresh)
        piv = newpiv
    return basis


# -- algebra elements -------------------------------------------------------------------------


class _AlgebraWords:
    """Random elements of the group algebra as sums of words, reusable on any module."""

    def __init__(self, ngens, rng):
        self.rng = rng
        self.words = [(i,) for i in range(ngens)]

    def next(self):
        a, b = self.rng.integers(len(self.words), size=2)
        self.words.append(self.words[a] + self.words[b])
        while True:
            pick = [w for w in self.words if self.rng.random() < 0.5]
            if pick:
                return pick

    @staticmethod
    def evaluate(M: GF2Module, element) -> MatGF2:
        A = MatGF2.zeros(M.dim, M.dim)
        for w in element:
            A = A + M.word_matrix(w)
        return A


def local_min_poly(A: MatGF2, v: int) -> int:
    rows = _row_ints(A)
    ech = _Echelon()
    x = v
    i = 0
    while True:
        r, c = ech.reduce(x, 1 << i)
        if r == 0:
            return c
        ech.add(r, c)
        x = _vec_times(x, rows)
        i += 1


def find_submodule(M: GF2Module, rng, attempts=200):
    """A proper nonzero submodule basis, or None if M is irreducible."""
    d = M.dim
    if d == 1:
        return None
    if not M.mats:
        return MatGF2.from_dense(np.eye(d, dtype=np.uint8)[:1])
    alg = _AlgebraWords(len(M.mats), rng)
    transposes = [A.T for A in M.mats]
    for _ in range(attempts):
        A = _AlgebraWords.evaluate(M, alg.next())
        v = int.from_bytes(rng.bytes((d + 7) // 8), "little") & ((1 << d) - 1)
        if v == 0:
            continue
        for p in sorted(small_factors(local_min_poly(A, v)), key=poly_deg):
            pA = poly_eval(p, A)
            N = pA.left_nullspace()
            if N.rows == 0:
                continue
            S = spin(N.row(0), M.mats)
            if S.rows < d:
                return S
            if N.rows == poly_deg(p):
                W = pA.nullspace()
                T = spin(W.row(0), transposes)
                if T.rows < d:
                    return T.nullspace()
                return None
            break
    raise Inconclusive(f"MeatAxe found no certificate for a {d}-dimensional module")


@dataclass
class Constituent:
    module: GF2Module
    multiplicity: int
    note: str = "absolutely irreducible over GF(2): unknown"

    @property
    def dim(self):
        return self.module.dim


def chop(M: GF2Module, seed=0, budget=CHOP_DIM_BUDGET) -> list:
    """Composition factors with multiplicities, sorted by dimension."""
    if M.dim > budget:
        raise TooLarge(f"dimension {M.dim} exceeds chop budget {budget}")
    rng = np.random.default_rng([seed, 211])
    todo = [M]
    found: list[Constituent] = []
    while todo:
        X = todo.pop()
        S = find_submodule(X, rng)
        if S is None:
            for c in found:
                if c.dim == X.dim and is_isomorphic(c.module, X, seed=seed, irreducible=True):
                    c.multiplicity += 1
                    break
            else:
                X.label = f"{X.dim}"
                found.append(Constituent(X, 1))
            continue
        todo.append(submodule_action(X, S))
        todo.append(quotient_action(X, S))
    found.sort(key=lambda c: c.dim)
    return found


def constituent_dims(factors) -> list:
    return sorted(c.dim for c in factors for _ in range(c.multiplicity))


# -- homomorphisms --------------------------------------------------------------------------


def hom_space(M: GF2Module, N: GF2Module) -> list:
    """Basis of Hom_G(M, N) as dim(M) x dim(N) matrices (row vectors map by v -> v @ phi)."""
    if len(M.mats) != len(N.mats):
        raise ShapeMismatch("modules for different generator sets")
    dM, dN = M.dim, N.dim
    if dM == 0 or dN == 0:
        return []
    rowsM = [_row_ints(A) for A in M.mats]
    ech = _Echelon()
    basis: list[int] = []
    tree: list[tuple] = []  # ("seed", j) or ("edge", parent, gen)
    constraints: list[tuple] = []  # (k, gen, combo bitmask over basis indices)
    seeds = 0
    for e in range(dM):
        r, used = ech.reduce(1 << e, 0)
        if r == 0:
            continue
        queue = deque()
        k = len(basis)
        ech.add(r, used ^ (1 << k))
        basis.append(1 << e)
        tree.append(("seed", seeds))
        seeds += 1
        queue.append(k)
        while queue:
            k = queue.popleft()
            for gi, rows in enumerate(rowsM):
                w = _vec_times(basis[k], rows)
                rem, combo = ech.reduce(w, 0)
                if rem:
                    idx = len(basis)
                    basis.append(w)
                    tree.append(("edge", k, gi))
                    ech.add(rem, combo ^ (1 << idx))
                    queue.append(idx)
                else:
                    constraints.append((k, gi, combo))
    U = seeds * dN
    wN = max(1, (dN + 63) // 64)
    Y = np.zeros((dM, U, wN), dtype=np.uint64)
    Nmats = N.mats
    for k, node in enumerate(tree):
        if node[0] == "seed":
            j = node[1]
            Y[k, j * dN:(j + 1) * dN] = MatGF2.identity(dN).words
        else:
            _, parent, gi = node
            Y[k] = (MatGF2(U, dN, Y[parent]) @ Nmats[gi]).words
    if constraints:
        blocks = []
        for k, gi, combo in constraints:
            Z = (MatGF2(U, dN, Y[k]) @ Nmats[gi]).words.copy()
            idx = _bits(combo)
            if idx:
                Z ^= np.bitwise_xor.reduce(Y[idx], axis=0)
            blocks.append(MatGF2(U, dN, Z).T.words)
        big = MatGF2(len(blocks) * dN, U, np.vstack(blocks))
        sols = big.nullspace()
    else:
        sols = MatGF2.identity(U)
    if sols.rows == 0:
        return []
    B = _ints_to_mat(basis, dM)
    Binv = B.inverse()
    Yd = np.stack([MatGF2(U, dN, Y[k]).to_dense() for k in range(dM)]).astype(np.int64)  # (dM, U, dN)
    out = []
    for x in sols.to_dense():
        img = np.tensordot(x.astype(np.int64), Yd, axes=([0], [1])) & 1  # images of the spin basis
        out.append(Binv @ MatGF2.from_dense(img))
    return out


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def endomorphisms(M: GF2Module) -> list:
    return hom_space(M, M)


def is_isomorphic(M: GF2Module, N: GF2Module, seed=0, irreducible=False, samples=30) -> bool:
    """Looks for an invertible homomorphism; exact for irreducible modules."""
    if M.dim != N.dim:
        return False
    H = hom_space(M, N)
    if not H:
        return False
    if irreducible:
        return True
    for phi in H:
        if phi.rank() == M.dim:
            return True
    rng = np.random.default_rng([seed, 307])
    for _ in range(samples):
        phi = _random_combination(H, rng)
        if phi.rank() == M.dim:
            return True
    return False


def _random_combination(basis, rng):
    coeffs = rng.integers(2, size=len(basis))
    if not coeffs.any():
        coeffs[int(rng.integers(len(basis)))] = 1
    acc = MatGF2.zeros(basis[0].rows, basis[0].cols)
    for c, b in zip(coeffs, basis):
        if c:
            acc = acc + b
    return acc


# -- direct summands -----------------------------------------------------------------------------


@dataclass
class SummandDecomposition:
    parent: GF2Module
    summands: list
    inclusions: list  # rows spanning each summand inside the parent
    projections: list  # parent -> summand, dim(parent) x dim(summand)

    @property
    def dims(self):
        return [S.dim for S in self.summands]

    def idempotents(self):
        return [p @ i for p, i in zip(self.projections, self.inclusions)]

    def verify(self) -> bool:
        d = self.parent.dim
        if sum(self.dims) != d:
            return False
        total = MatGF2.zeros(d, d)
        for j, (inc, proj) in enumerate(zip(self.inclusions, self.projections)):
            for k, inc2 in enumerate(self.inclusions):
                prod = inc2 @ proj
                want = MatGF2.identity(inc.rows) if j == k else MatGF2.zeros(inc2.rows, inc.rows)
                if prod != want:
                    return False
            total = total + proj @ inc
        if not total.is_identity():
            return False
        for e in self.idempotents():
            if e @ e != e:
                return False
            for A in self.parent.mats:
                if A @ e != e @ A:
                    return False
        return True


def _nilpotent_or_unit(theta: MatGF2):
    d = theta.rows
    r = theta.rank()
    if r == d:
        return "unit"
    P = theta
    k = 1
    while k < d:
        P = P @ P
        k *= 2
    return "nilpotent" if P.is_zero() else "mixed"


def _stable_power(theta: MatGF2) -> MatGF2:
    P = theta
    k = 1
    while k < theta.rows:
        P = P @ P
        k *= 2
    return P


def _fitting_split(M: GF2Module, theta: MatGF2):
    """(kernel basis, image basis) of theta^N if both are proper, else None."""
    P = _stable_power(theta)
    K = P.left_nullspace()
    if K.rows in (0, M.dim):
        return None
    red, piv = P.rref()
    Im = red.take_rows(range(len(piv)))
    return K, Im


def split_summands(M: GF2Module, seed=0, budget=SPLIT_DIM_BUDGET) -> SummandDecomposition:
    if M.dim > budget:
        raise TooLarge(f"dimension {M.dim} exceeds split budget {budget}")
    rng = np.random.default_rng([seed, 401])
    pieces = []  # (module, inclusion rows in parent coords)
    todo = [(M, MatGF2.identity(M.dim))]
    while todo:
        X, inc = todo.pop()
        parts = _split_once(X, rng)
        if parts is None:
            pieces.append((X, inc))
            continue
        for basis in parts:
            red, piv = basis.rref()
            red = red.take_rows(range(len(piv)))
            todo.append((submodule_action(X, red), red @ inc))
    pieces.sort(key=lambda t: t[0].dim)
    summands = []
    incs = []
    for i, (X, inc) in enumerate(pieces):
        X.label = f"{M.label}[{i}]"
        summands.append(X)
        incs.append(inc)
    T = incs[0]
    for inc in incs[1:]:
        T = T.vstack(inc)
    Tinv = T.inverse().to_dense()
    projs = []
    c = 0
    for inc in incs:
        projs.append(MatGF2.from_dense(Tinv[:, c:c + inc.rows]))
        c += inc.rows
    dec = SummandDecomposition(M, summands, incs, projs)
    if not dec.verify():
        raise AssertionError("summand decomposition failed its idempotent identities")
    return dec


def _split_once(X: GF2Module, rng):
    if X.dim == 1:
        return None
    E = endomorphisms(X)
    if len(E) == 1:
        return None
    candidates = list(E)
    for _ in range(LOCAL_SAMPLES):
        candidates.append(_random_combination(E, rng))
    for theta in candidates:
        kind = _nilpotent_or_unit(theta)
        if kind == "mixed":
            return _fitting_split(X, theta)
        # units may still have several primary components
        if kind == "unit":
            for p in (0b11, 0b111, 0b1011, 0b1101):
                res = _fitting_split(X, poly_eval(p, theta))
                if res is not None:
                    return res
    return None


def scott(G: PermGroup, H: PermGroup, seed=0) -> GF2Module:
    """The summand of k_H^G with a trivial quotient (which is then unique)."""
    M = perm_module(G, H)
    if M.dim == 1:
        M.label = "Sc(G,G)"
        return M
    dec = split_summands(M, seed=seed)
    heads = [S for S in dec.summands if S.cofixed_functionals().rows > 0]
    if len(heads) != 1:
        raise NonUnique(f"{len(heads)} summands have a trivial quotient")
    S = heads[0]
    if S.fixed_points().rows == 0:
        raise NonUnique("Scott summand has no trivial submodule")
    S.label = f"Sc(G,{H.name or 'H'})"
    return S


# -- relative projectivity ------------------------------------------------------------------------


def _transversal_matrices(M: GF2Module, H: PermGroup):
    """Matrices of right coset representatives of H in M.group, built along the coset BFS."""
    G = M.group
    E = H.elements()
    ident = np.arange(G.degree, dtype=np.int32)
    labels = {_label(G, E): 0}
    reps = [ident]
    mats = [MatGF2.identity(M.dim)]
    i = 0
    while i < len(reps):
        r = reps[i]
        for gi, s in enumerate(G.gens):
            rs = s.a[r]
            lab = _label(G, rs[E])
            if lab not in labels:
                labels[lab] = len(reps)
                reps.append(rs)
                mats.append(mats[i] @ M.mats[gi])
        i += 1
    if len(reps) != G.order // H.order:
        raise AssertionError("transversal size differs from the index")
    return mats


def trace_map(M: GF2Module, H: PermGroup):
    """The linear map phi -> sum_r r^-1 phi r on d x d matrices, as a (d^2 x d^2) 0/1 array
    acting on row-major vec(phi) from the left."""
    d = M.dim
    mats = _transversal_matrices(M, H)
    R = np.stack([m.to_dense() for m in mats]).astype(np.float32)
    Rinv = np.stack([m.inverse().to_dense() for m in mats]).astype(np.float32)
    # (Rinv phi R)[a,b] = sum_{c,e} Rinv[a,c] phi[c,e] R[e,b]
    left = Rinv.transpose(1, 2, 0).reshape(d * d, -1)  # (a,c) x r
    right = R.transpose(0, 1, 2).reshape(len(mats), d * d)  # r x (e,b)
    L = (left @ right).reshape(d, d, d, d)  # a, c, e, b
    L = np.rint(L).astype(np.int64) & 1
    return L.transpose(0, 3, 1, 2).reshape(d * d, d * d)  # (a,b) x (c,e)


def is_relatively_projective(M: GF2Module, H: PermGroup, budget=PROJECTIVITY_DIM_BUDGET) -> bool:
    """Higman's criterion: some H-endomorphism has relative trace equal to the identity."""
    if M.dim > budget:
        raise TooLarge(f"dimension {M.dim} exceeds the projectivity budget {budget}")
    G = M.group
    for h in H.gens:
        if not G.contains(h):
            raise NotMember("H is not a subgroup of the module's group")
    if H.order == G.order:
        return True
    EH = endomorphisms(restrict(M, H))
    if not EH:
        return False
    d = M.dim
    L = trace_map(M, H)
    V = np.stack([e.to_dense().reshape(-1) for e in EH]).astype(np.int64)  # m x d^2
    T = (V @ L.T) & 1  # traces of the basis, as rows
    target = np.eye(d, dtype=np.uint8).reshape(-1)
    sol = gf2_solve(MatGF2.from_dense(T.T.astype(np.uint8)), target)
    return sol is not None


def vertex_bracket(M: GF2Module, slice_: dict) -> dict:
    """Relative projectivity over each named subgroup of a tested slice."""
    return {name: is_relatively_projective(M, H) for name, H in slice_.items()}


def pim_count(G: PermGroup) -> int:
    """Number of projective indecomposables in characteristic 2 = number of odd-order classes."""
    return sum(1 for c in conjugacy_classes(G) if c.order % 2 == 1)
