"""Arithmetic in GF(p^f) and small dense matrices over it.

Elements are encoded as integers ``0 <= x < q`` whose base-``p`` digits are the
polynomial coefficients, least-degree first. Addition and multiplication go
through precomputed tables, which is all the group constructions need.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NotPrime, NotSquare, ShapeMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_power(q: int):
    """Return (p, f) with q = p**f, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            f, r = 0, q
            while r % p == 0:
                r //= p
                f += 1
            return (p, f) if r == 1 else None
    return None


# polynomials over GF(p) as coefficient tuples, least-degree first

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _poly_trim(a)
    m = _poly_trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        a = _poly_trim(a)
    return a


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(tail) + [1], p):
                return False
    return True


def least_irreducible(p: int, f: int):
    """Lexicographically least monic irreducible of degree f (coefficients low to high,
    compared from the constant term upward)."""
    if f == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=f):
        cand = tuple(reversed(tail))
        poly = cand + (1,)
        if poly[0] != 0 and is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable


@dataclass(frozen=True, eq=False)
class FieldDesc:
    p: int
    f: int
    modulus: tuple
    q: int = field(init=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(self.p)
        mod = tuple(self.modulus)
        if len(mod) != self.f + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        if not is_irreducible(mod, self.p):
            raise ValueError(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)
        object.__setattr__(self, "q", self.p ** self.f)
        add, mul = _tables(self.p, self.f, mod)
        object.__setattr__(self, "add_table", add)
        object.__setattr__(self, "mul_table", mul)
        q = self.q
        neg = np.array([int(np.flatnonzero(add[x] == 0)[0]) for x in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for x in range(1, q):
            inv[x] = int(np.flatnonzero(mul[x] == 1)[0])
        object.__setattr__(self, "neg_table", neg)
        object.__setattr__(self, "inv_table", inv)
        object.__setattr__(self, "_prim", None)

    def __eq__(self, other):
        return isinstance(other, FieldDesc) and (self.p, self.f, self.modulus) == (other.p, other.f, other.modulus)

    def __hash__(self):
        return hash((self.p, self.f, self.modulus))

    def __repr__(self):
        return f"GF({self.q})"

    # element helpers on integer codes
    def coeffs(self, x: int):
        out = []
        for _ in range(self.f):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        x = 0
        for c in reversed(tuple(coeffs)):
            x = x * self.p + (c % self.p)
        return x

    def add(self, a, b):
        return int(self.add_table[a, b])

    def sub(self, a, b):
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def neg(self, a):
        return int(self.neg_table[a])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.inv_table[a])

    def power(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def element_order(self, a) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            n += 1
        return n

    def primitive(self) -> int:
        """Least code generating the multiplicative group."""
        if self._prim is None:
            for a in range(1, self.q):
                if self.element_order(a) == self.q - 1:
                    object.__setattr__(self, "_prim", a)
                    break
        return self._prim

    def frobenius(self, a, k: int = 1):
        return self.power(a, self.p ** k)

    def elem(self, x) -> "FieldElem":
        if isinstance(x, FieldElem):
            return x
        return FieldElem(self, int(x) % self.q if x >= 0 else self.neg(int(-x) % self.q))


@lru_cache(maxsize=None)
def _tables(p, f, modulus):
    q = p ** f
    digits = np.array([[(x // p ** i) % p for i in range(f)] for x in range(q)], dtype=np.int64)
    weights = p ** np.arange(f, dtype=np.int64)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    # multiply coefficient vectors then reduce by the modulus
    prod = np.zeros((q, q, 2 * f - 1), dtype=np.int64)
    for i in range(f):
        for j in range(f):
            prod[:, :, i + j] += digits[:, None, i] * digits[None, :, j]
    prod %= p
    mod = np.array(modulus, dtype=np.int64)
    for k in range(2 * f - 2, f - 1, -1):
        c = prod[:, :, k].copy()
        prod[:, :, k - f:k + 1] -= c[:, :, None] * mod[None, None, :]
        prod %= p
    mul = prod[:, :, :f] @ weights
    add.setflags(write=False)
    mul.setflags(write=False)
    return add, mul


@lru_cache(maxsize=None)
def field_make(p: int, f: int = 1) -> FieldDesc:
    if not is_prime(p):
        raise NotPrime(p)
    if f < 1:
        raise ValueError("exponent must be positive")
    return FieldDesc(p, f, least_irreducible(p, f))


def gf(q: int) -> FieldDesc:
    pf = prime_power(q)
    if pf is None:
        raise NotPrime(q)
    return field_make(*pf)


@dataclass(frozen=True)
class FieldElem:
    field: FieldDesc
    value: int

    @property
    def coeffs(self):
        return self.field.coeffs(self.value)

    def _other(self, o):
        if isinstance(o, FieldElem):
            if o.field != self.field:
                raise ValueError("field mismatch")
            return o.value
        return self.field.elem(o).value

    def __add__(self, o):
        return FieldElem(self.field, self.field.add(self.value, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElem(self.field, self.field.sub(self.value, self._other(o)))

    def __rsub__(self, o):
        return FieldElem(self.field, self.field.sub(self._other(o), self.value))

    def __mul__(self, o):
        return FieldElem(self.field, self.field.mul(self.value, self._other(o)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __truediv__(self, o):
        return FieldElem(self.field, self.field.mul(self.value, self.field.inv(self._other(o))))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.power(self.value, e))

    def inverse(self):
        return FieldElem(self.field, self.field.inv(self.value))

    def __eq__(self, o):
        if isinstance(o, FieldElem):
            return self.field == o.field and self.value == o.value
        if isinstance(o, int):
            return self.value == self.field.elem(o).value
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value}@{self.field!r}"


class MatGF:
    """Dense matrix over a FieldDesc, entries as integer codes."""

    def __init__(self, field: FieldDesc, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2:
            raise ShapeMismatch("matrix must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= field.q):
            raise ValueError("entry outside field")
        a.setflags(write=False)
        self.field = field
        self.entries = a

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64))

    def __matmul__(self, other: "MatGF") -> "MatGF":
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        F = self.field
        out = np.zeros((self.rows, other.cols), dtype=np.int64)
        for k in range(self.cols):
            term = F.mul_table[self.entries[:, k][:, None], other.entries[k][None, :]]
            out = F.add_table[out, term]
        return MatGF(F, out)

    def __eq__(self, other):
        return isinstance(other, MatGF) and self.field == other.field and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.field, self.entries.tobytes(), self.entries.shape))

    def __repr__(self):
        return f"MatGF({self.field!r}, {self.entries.tolist()})"


def mat_det(m: MatGF) -> FieldElem:
    """Determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols}")
    F = m.field
    n = m.rows
    if n == 0:
        return FieldElem(F, 1)
    a = [[int(x) for x in row] for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return FieldElem(F, 0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pinv = F.inv(prev)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = F.sub(F.mul(a[i][j], a[k][k]), F.mul(a[i][k], a[k][j]))
                a[i][j] = F.mul(num, pinv)
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return FieldElem(F, d if sign > 0 else F.neg(d))
