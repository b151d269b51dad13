"""Bit-packed matrices over GF(2).

Rows are packed 64 columns per ``uint64`` word (column ``c`` is bit ``c & 63``
of word ``c >> 6``). Padding bits beyond ``cols`` are kept zero.
"""
from __future__ import annotations

import numpy as np

from . import _accel
from .errors import NotSquare, ShapeMismatch


def _words(cols: int) -> int:
    return max(1, (cols + 63) // 64)


def pack(dense) -> np.ndarray:
    d = np.asarray(dense, dtype=np.uint8) & 1
    if d.ndim != 2:
        raise ShapeMismatch("expected a 2-d array")
    rows, cols = d.shape
    w = _words(cols)
    padded = np.zeros((rows, w * 64), dtype=np.uint8)
    padded[:, :cols] = d
    bits = np.packbits(padded.reshape(rows, w, 64)[:, :, ::-1], axis=2)
    # packbits is big-endian within each byte; reversed 64-bit chunks give LSB-first words
    return np.ascontiguousarray(bits.reshape(rows, w, 8)).view(">u8").reshape(rows, w).astype(np.uint64)


def unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows, w = words.shape
    be = words.astype(">u8").view(np.uint8).reshape(rows, w, 8)
    bits = np.unpackbits(be, axis=2).reshape(rows, w, 64)[:, :, ::-1]
    return bits.reshape(rows, w * 64)[:, :cols].copy()


class MatGF2:
    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.shape != (rows, _words(cols)):
            raise ShapeMismatch(f"packed shape {words.shape} does not fit {rows}x{cols}")
        self.rows = int(rows)
        self.cols = int(cols)
        self.words = words

    # construction
    @classmethod
    def from_dense(cls, dense) -> "MatGF2":
        d = np.asarray(dense)
        if d.ndim == 1:
            d = d[None, :]
        return cls(d.shape[0], d.shape[1], pack(d))

    @classmethod
    def zeros(cls, rows, cols) -> "MatGF2":
        return cls(rows, cols, np.zeros((rows, _words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n) -> "MatGF2":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_hex_rows(cls, rows_hex, cols) -> "MatGF2":
        cols = int(cols)
        if not rows_hex:
            return cls.zeros(0, cols)
        ints = [int(h, 16) for h in rows_hex]
        dense = np.array([[(x >> c) & 1 for c in range(cols)] for x in ints], dtype=np.uint8)
        if any(x >> cols for x in ints):
            raise ShapeMismatch("hex row wider than column count")
        return cls.from_dense(dense)

    def to_hex_rows(self):
        out = []
        for r in self.to_dense():
            x = 0
            for c in np.flatnonzero(r)[::-1]:
                x |= 1 << int(c)
            out.append(format(x, "x"))
        return out

    def to_dense(self) -> np.ndarray:
        return unpack(self.words, self.cols)

    def copy(self) -> "MatGF2":
        return MatGF2(self.rows, self.cols, self.words.copy())

    # arithmetic
    def __matmul__(self, other: "MatGF2") -> "MatGF2":
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        return MatGF2(self.rows, other.cols, _accel.mul(self.words, other.words, self.cols))

    def __add__(self, other: "MatGF2") -> "MatGF2":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("shape mismatch in addition")
        return MatGF2(self.rows, self.cols, self.words ^ other.words)

    __sub__ = __add__

    def __eq__(self, other):
        return (
            isinstance(other, MatGF2)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and np.array_equal(self.words, other.words)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self):
        return f"MatGF2({self.rows}x{self.cols})"

    @property
    def T(self) -> "MatGF2":
        return MatGF2.from_dense(self.to_dense().T) if self.rows else MatGF2.zeros(self.cols, 0)

    def is_zero(self) -> bool:
        return not self.words.any()

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == MatGF2.identity(self.rows)

    def row(self, i) -> "MatGF2":
        return MatGF2(1, self.cols, self.words[i:i + 1].copy())

    def take_rows(self, idx) -> "MatGF2":
        idx = np.asarray(idx, dtype=np.int64)
        return MatGF2(len(idx), self.cols, self.words[idx].copy())

    def vstack(self, other: "MatGF2") -> "MatGF2":
        if self.cols != other.cols:
            raise ShapeMismatch("column mismatch in vstack")
        return MatGF2(self.rows + other.rows, self.cols, np.vstack([self.words, other.words]))

    def hstack(self, other: "MatGF2") -> "MatGF2":
        return MatGF2.from_dense(np.hstack([self.to_dense(), other.to_dense()]))

    def block(self, r0, r1, c0, c1) -> "MatGF2":
        return MatGF2.from_dense(self.to_dense()[r0:r1, c0:c1])

    def power(self, e: int) -> "MatGF2":
        if self.rows != self.cols:
            raise NotSquare("power of non-square matrix")
        result = MatGF2.identity(self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    # elimination
    def rref(self):
        """Return (reduced matrix, pivot columns)."""
        w = self.words.copy()
        r, piv = _accel.rref(w, self.cols)
        return MatGF2(self.rows, self.cols, w), [int(c) for c in piv[:r]]

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> "MatGF2":
        """Basis (as rows) of {x : self @ x^T = 0}."""
        red, piv = self.rref()
        free = [c for c in range(self.cols) if c not in set(piv)]
        dense = red.to_dense()[: len(piv)]
        basis = np.zeros((len(free), self.cols), dtype=np.uint8)
        for k, c in enumerate(free):
            basis[k, c] = 1
            for r, pc in enumerate(piv):
                basis[k, pc] = dense[r, c]
        return MatGF2.from_dense(basis) if free else MatGF2.zeros(0, self.cols)

    def left_nullspace(self) -> "MatGF2":
        """Basis (as rows) of {y : y @ self = 0}."""
        return self.T.nullspace()

    def inverse(self) -> "MatGF2":
        if self.rows != self.cols:
            raise NotSquare("inverse of non-square matrix")
        n = self.rows
        aug = self.hstack(MatGF2.identity(n))
        red, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return red.block(0, n, n, 2 * n)


def gf2_rank(m: MatGF2) -> int:
    return m.rank()


def gf2_nullspace(m: MatGF2) -> MatGF2:
    return m.nullspace()


def gf2_solve(a: MatGF2, b) -> np.ndarray | None:
    """One solution x of a @ x = b (b a length-rows 0/1 vector), or None."""
    bv = np.asarray(b.to_dense().ravel() if isinstance(b, MatGF2) else b, dtype=np.uint8) & 1
    if bv.shape != (a.rows,):
        raise ShapeMismatch(f"right-hand side of length {bv.shape} for {a.rows} rows")
    aug = MatGF2.from_dense(np.hstack([a.to_dense(), bv[:, None]]))
    red, piv = aug.rref()
    if a.cols in piv:
        return None
    dense = red.to_dense()
    x = np.zeros(a.cols, dtype=np.uint8)
    for r, c in enumerate(piv):
        x[c] = dense[r, a.cols]
    return x


def row_space_basis(m: MatGF2) -> MatGF2:
    red, piv = m.rref()
    return red.take_rows(range(len(piv)))


def in_row_space(basis_rref: MatGF2, pivots, v: MatGF2) -> bool:
    """Membership of row vector v in the span of an RREF basis with given pivots."""
    d = v.to_dense()[0].copy()
    b = basis_rref.to_dense()
    for r, c in enumerate(pivots):
        if d[c]:
            d ^= b[r]
    return not d.any()
