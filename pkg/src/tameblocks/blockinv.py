"""Arithmetic invariants of the principal 2-block: 2-parts, l(B), Cartan matrices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SL_SIDE = "sl-side"
SU_SIDE = "su-side"

_ELL = {"bb": 1, "ba": 2, "ab": 2, "aa": 3}


def two_part(m: int) -> int:
    if m < 1:
        raise ValueError("two_part needs a positive integer")
    return m & -m


def olsson_ell(pattern) -> int:
    """Number of simple modules in the principal block for a fusion pattern."""
    key = str(pattern)
    if key not in _ELL:
        raise ValueError(f"unknown fusion pattern {key!r}")
    return _ELL[key]


@dataclass(frozen=True)
class CartanMatrix:
    entries: tuple
    n: int
    side: str

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("Cartan matrix must be square")

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def det(self) -> int:
        a = [list(r) for r in self.entries]
        return _det_int(a)

    def is_symmetric(self) -> bool:
        e = self.entries
        return all(e[i][j] == e[j][i] for i in range(len(e)) for j in range(len(e)))

    def is_positive_definite(self) -> bool:
        # Sylvester's criterion on leading minors
        e = self.entries
        return all(_det_int([list(r[:k]) for r in e[:k]]) > 0 for k in range(1, len(e) + 1))

    def to_list(self):
        return [list(r) for r in self.entries]


def _det_int(a) -> int:
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return sum((-1) ** j * a[0][j] * _det_int([r[:j] + r[j + 1:] for r in a[1:]]) for j in range(n))


def cartan_bar(n: int, side: str) -> CartanMatrix:
    """Cartan matrix of the principal block of the central quotient, two simples."""
    if n < 4:
        raise ValueError("n must be at least 4")
    corner = 2 ** (n - 3) + 1
    if side == SL_SIDE:
        e = ((4, 2), (2, corner))
    elif side == SU_SIDE:
        e = ((2 ** (n - 1), 2 ** (n - 2)), (2 ** (n - 2), corner))
    else:
        raise ValueError(f"side must be {SL_SIDE!r} or {SU_SIDE!r}")
    return CartanMatrix(e, n, side)


def cartan_double(C: CartanMatrix) -> CartanMatrix:
    """Passing to a central extension by an order-2 group doubles every entry."""
    return CartanMatrix(tuple(tuple(2 * x for x in r) for r in C.entries), C.n, C.side)


@dataclass(frozen=True)
class Distinction:
    n: int
    entry: tuple
    sl_value: int
    su_value: int

    def to_dict(self):
        return {"n": self.n, "entry": list(self.entry), "sl_side": self.sl_value, "su_side": self.su_value}


def distinguish(n: int) -> Distinction:
    """First entry where the two Cartan matrices at exponent n differ."""
    a = cartan_bar(n, SL_SIDE).entries
    b = cartan_bar(n, SU_SIDE).entries
    for i in range(2):
        for j in range(2):
            if a[i][j] != b[i][j]:
                return Distinction(n, (i + 1, j + 1), a[i][j], b[i][j])
    raise AssertionError(f"Cartan matrices coincide at n={n}")


@dataclass
class BlockInvariants:
    pattern: str
    ell: int
    kB: int | None = None
    cartan_bar: CartanMatrix | None = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.ell not in (1, 2, 3):
            raise ValueError("ell must be 1, 2 or 3")
        if (self.ell == 1) != (str(self.pattern) == "bb"):
            raise ValueError("ell = 1 exactly for pattern bb")

    def to_dict(self):
        return {
            "pattern": str(self.pattern),
            "ell": self.ell,
            "kB": self.kB,
            "cartan_bar": None if self.cartan_bar is None else {
                "entries": self.cartan_bar.to_list(), "n": self.cartan_bar.n, "side": self.cartan_bar.side},
            "notes": list(self.notes),
        }
