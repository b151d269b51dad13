import itertools

import pytest
from hypothesis import given, settings, strategies as st

from tameblocks.errors import NotPrime, NotSquare
from tameblocks.gf import (
    MatGF, field_make, gf, is_irreducible, least_irreducible, mat_det, prime_power,
)

SMALL_Q = [2, 3, 4, 5, 7, 8, 9, 25, 27, 49]


def _polymulmod(a, b, mod, p):
    """Schoolbook product of coefficient lists reduced by a monic modulus."""
    f = len(mod) - 1
    prod = [0] * (2 * f)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c:
            for i, m in enumerate(mod):
                prod[k - f + i] = (prod[k - f + i] - c * m) % p
    return tuple(prod[:f])


def _has_root(poly, p):
    return any(sum(c * x**i for i, c in enumerate(poly)) % p == 0 for x in range(p))


def test_prime_power():
    assert prime_power(27) == (3, 3)
    assert prime_power(2) == (2, 1)
    assert prime_power(12) is None
    assert prime_power(1) is None
    with pytest.raises(NotPrime):
        gf(6)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_degree_two_three_irreducibility_matches_root_search(p):
    # for degree <= 3, irreducible iff no root
    for deg in (2, 3):
        for tail in itertools.product(range(p), repeat=deg):
            poly = tuple(tail) + (1,)
            assert is_irreducible(poly, p) == (not _has_root(poly, p))


def test_least_irreducible_examples():
    assert least_irreducible(2, 2) == (1, 1, 1)
    assert least_irreducible(3, 2) == (1, 0, 1)
    assert least_irreducible(2, 3) == (1, 1, 0, 1)


@pytest.mark.parametrize("q", SMALL_Q)
def test_tables_agree_with_schoolbook_arithmetic(q):
    F = gf(q)
    for a in range(q):
        for b in range(q):
            ca, cb = F.coeffs(a), F.coeffs(b)
            assert F.coeffs(F.add(a, b)) == tuple((x + y) % F.p for x, y in zip(ca, cb))
            assert F.coeffs(F.mul(a, b)) == _polymulmod(ca, cb, F.modulus, F.p)


@pytest.mark.parametrize("q", SMALL_Q)
def test_primitive_and_frobenius(q):
    F = gf(q)
    w = F.primitive()
    assert len({F.power(w, k) for k in range(q - 1)}) == q - 1
    # Frobenius is additive, multiplicative and has order f
    for a in range(q):
        assert F.frobenius(a, F.f) == a
        for b in range(0, q, max(1, q // 5)):
            assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
            assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL_Q), st.data())
def test_field_axioms(q, data):
    F = gf(q)
    a, b, c = (F.elem(data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0 and a + (-a) == 0
    if a:
        assert a * a.inverse() == 1
        assert a ** (q - 1) == 1


def _cofactor_det(rows, F):
    if len(rows) == 1:
        return rows[0][0]
    total = 0
    for j, x in enumerate(rows[0]):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = F.mul(x, _cofactor_det(minor, F))
        total = F.add(total, term) if j % 2 == 0 else F.sub(total, term)
    return total


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 9]), st.integers(1, 4), st.data())
def test_det_matches_cofactor_expansion(q, n, data):
    F = gf(q)
    rows = [[data.draw(st.integers(0, q - 1)) for _ in range(n)] for _ in range(n)]
    assert mat_det(MatGF(F, rows)).value == _cofactor_det(rows, F)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5]), st.data())
def test_det_is_multiplicative(q, data):
    F = gf(q)
    draw = lambda: [[data.draw(st.integers(0, q - 1)) for _ in range(3)] for _ in range(3)]
    A, B = MatGF(F, draw()), MatGF(F, draw())
    assert mat_det(A @ B) == mat_det(A) * mat_det(B)


def test_det_rejects_rectangular():
    with pytest.raises(NotSquare):
        mat_det(MatGF(field_make(3), [[1, 2, 0]]))
