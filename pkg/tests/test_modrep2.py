import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tameblocks.errors import ShapeMismatch, TooLarge
from tameblocks.gf2 import MatGF2
from tameblocks.modrep2 import (
    GF2Module, chop, constituent_dims, direct_sum, hom_space, induce, irreducibles_up_to,
    is_isomorphic, is_relatively_projective, local_min_poly, perm_module, pim_count, poly_eval,
    poly_mul, restrict, scott, small_factors, split_summands, trivial_module,
)
from tameblocks.permgrp import PermGroup, subgroup

S3 = PermGroup(3, [[1, 0, 2], [1, 2, 0]], name="S3")
A4 = PermGroup(4, [[1, 2, 0, 3], [1, 0, 3, 2]], name="A4")
S4 = PermGroup(4, [[1, 0, 2, 3], [1, 2, 3, 0]], name="S4")
TRIV = lambda G: subgroup(G, [])


def mobius(n):
    out, k, m = 1, 2, n
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            out = -out
        k += 1
    return -out if m > 1 else out


def test_irreducible_count_matches_gauss_formula():
    for n in range(1, 11):
        expect = sum(mobius(d) * 2 ** (n // d) for d in range(1, n + 1) if n % d == 0) // n
        got = [p for p in irreducibles_up_to(n) if p.bit_length() - 1 == n]
        assert len(got) == expect


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=4))
def test_small_factors_recover_product(idx):
    irr = irreducibles_up_to(5)
    picks = [irr[i % len(irr)] for i in idx]
    prod = 1
    for p in picks:
        prod = poly_mul(prod, p)
    assert sorted(small_factors(prod)) == sorted(set(picks))  # distinct factors


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_local_min_poly_annihilates(d, seed):
    rng = np.random.default_rng(seed)
    A = MatGF2.from_dense(rng.integers(0, 2, size=(d, d)))
    v = int(rng.integers(1, 2**d)) if d < 63 else 1
    p = local_min_poly(A, v)
    vec = MatGF2.from_dense([[(v >> i) & 1 for i in range(d)]])
    assert (vec @ poly_eval(p, A)).is_zero()


def hom_dim_oracle(M, N):
    """Nullity of phi -> A_g phi - phi B_g on vec(phi), assembled with Kronecker products."""
    dM, dN = M.dim, N.dim
    blocks = []
    for A, B in zip(M.mats, N.mats):
        a, b = A.to_dense().astype(int), B.to_dense().astype(int)
        # row-major vec: vec(A phi) = (A kron I) vec, vec(phi B) = (I kron B^T) vec
        blocks.append((np.kron(a, np.eye(dN, dtype=int)) + np.kron(np.eye(dM, dtype=int), b.T)) % 2)
    if not blocks:
        return dM * dN
    return dM * dN - MatGF2.from_dense(np.vstack(blocks)).rank()


@pytest.mark.parametrize("G,H", [(S3, TRIV(S3)), (S4, subgroup(S4, [[1, 0, 2, 3]])), (A4, TRIV(A4))])
def test_hom_space_dimension(G, H):
    M = perm_module(G, H)
    N = perm_module(G, G)
    for X, Y in ((M, M), (M, N), (N, M)):
        basis = hom_space(X, Y)
        assert len(basis) == hom_dim_oracle(X, Y)
        for phi in basis:
            assert all(A @ phi == phi @ B for A, B in zip(X.mats, Y.mats))


def test_chop_on_regular_modules():
    assert constituent_dims(chop(perm_module(S3, TRIV(S3)))) == [1, 1, 2, 2]
    # over GF(2) the two nontrivial linear characters of A4 merge into one 2-dimensional simple
    assert constituent_dims(chop(perm_module(A4, TRIV(A4)))) == [1, 1, 1, 1, 2, 2, 2, 2]


def test_pim_count():
    assert pim_count(S3) == 2
    assert pim_count(A4) == 3
    assert pim_count(S4) == 2


def test_perm_module_and_relations():
    M = perm_module(S4, subgroup(S4, [[1, 0, 2, 3], [1, 2, 0, 3]]))
    assert M.dim == 4 and M.check_relations(seed=1)
    assert M.fixed_points().rows == 1
    with pytest.raises(ShapeMismatch):
        GF2Module(S4, [MatGF2.identity(2)])


def test_induction_frobenius_reciprocity():
    H = subgroup(S4, [[1, 0, 2, 3], [0, 1, 3, 2]])
    M = perm_module(H, TRIV(H))
    I = induce(M, S4)
    assert I.dim == M.dim * (S4.order // H.order)
    assert I.check_relations(seed=2)
    lhs = len(hom_space(I, trivial_module(S4)))
    rhs = len(hom_space(M, trivial_module(H)))
    assert lhs == rhs
    assert restrict(I, H).dim == I.dim


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_decomposition_identities(seed):
    M = direct_sum(perm_module(S4, subgroup(S4, [[1, 0, 2, 3]])), trivial_module(S4))
    dec = split_summands(M, seed=seed)
    assert dec.verify()
    es = dec.idempotents()
    d = M.dim
    total = MatGF2.zeros(d, d)
    for i, e in enumerate(es):
        assert e @ e == e
        for j, f in enumerate(es):
            if i != j:
                assert (e @ f).is_zero()
        total = total + e
    assert total.is_identity()


def test_split_isomorphic_summands():
    # kS3 = P(k) + 2 + 2 with P(k) uniserial of length two
    M = perm_module(S3, TRIV(S3))
    assert split_summands(M, seed=3).dims == [2, 2, 2]
    dec = split_summands(direct_sum(M, M), seed=3)
    assert dec.dims == [2] * 6 and dec.verify()


def test_scott():
    assert scott(S3, S3).dim == 1
    Sc = scott(S4, TRIV(S4))  # projective cover of the trivial module
    assert Sc.dim == 8
    assert Sc.fixed_points().rows == 1 and Sc.cofixed_functionals().rows == 1


def test_relative_projectivity_of_trivial():
    k = trivial_module(S3)
    assert is_relatively_projective(k, subgroup(S3, [[1, 0, 2]]))  # contains a Sylow 2
    assert not is_relatively_projective(k, subgroup(S3, [[1, 2, 0]]))
    assert not is_relatively_projective(k, TRIV(S3))
    assert is_relatively_projective(perm_module(S3, TRIV(S3)), TRIV(S3))


def test_projectivity_budget():
    M = perm_module(S4, TRIV(S4))
    with pytest.raises(TooLarge):
        is_relatively_projective(M, TRIV(S4), budget=10)


def test_isomorphism_and_json():
    M = perm_module(S4, subgroup(S4, [[1, 0, 2, 3], [1, 2, 0, 3]]))
    N = GF2Module.from_json(M.to_json(), S4)
    assert is_isomorphic(M, N)
    assert not is_isomorphic(M, GF2Module(S4, [MatGF2.identity(4)] * 2))
