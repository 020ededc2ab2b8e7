from __future__ import annotations

import random

import pytest

from strata.corpus import CORPUS_NAMES
from strata.module import (
    EndAlgebra,
    HomSpace,
    ModuleMap,
    cokernel,
    decompose,
    direct_sum,
    dualize,
    find_isomorphism,
    image,
    injective,
    is_brick,
    is_indecomposable,
    is_isomorphic,
    kernel,
    left_minimal,
    loewy_length,
    minimal_left_approximation,
    projective,
    radical,
    right_minimal,
    simple,
    socle,
    syzygy,
    top,
)
from tests import oracles


def pool(A):
    return [projective(A, i) for i in range(A.n)] + [injective(A, i) for i in range(A.n)] + [simple(A, i) for i in range(A.n)]


def test_projective_dims(corpus):
    A = corpus["ex43"]
    assert [projective(A, i).dims for i in range(3)] == [(2, 1, 0), (2, 3, 2), (0, 1, 2)]


def test_injective_dims(corpus):
    A = corpus["ex43"]
    assert [injective(A, i).dims for i in range(3)] == [(2, 2, 0), (1, 3, 1), (0, 2, 2)]
    B = corpus["ex414"]
    assert [injective(B, i).dims for i in range(3)] == [(3, 1, 0), (0, 2, 2), (0, 1, 2)]


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_hom_dims_match_oracle(corpus, name):
    A = corpus[name]
    mods = pool(A)
    for M in mods:
        for N in mods:
            assert HomSpace(M, N).dim == oracles.hom_dim(M, N)


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_hom_from_projective_is_cartan(corpus, name):
    A = corpus[name]
    C = A.cartan()
    for i in range(A.n):
        for j in range(A.n):
            assert HomSpace(projective(A, i), projective(A, j)).dim == C[j][i]


def test_hom_basis_elements_are_homomorphisms(corpus):
    A = corpus["ex414"]
    for M in pool(A):
        for N in pool(A):
            for f in HomSpace(M, N).basis:
                assert f.is_homomorphism()


def test_kernel_image_cokernel_dims(corpus):
    A = corpus["ex43"]
    rng = random.Random(3)
    P, I = projective(A, 1), injective(A, 1)
    f = HomSpace(P, I).random_element(rng)
    K, k = kernel(f)
    Im, _ = image(f)
    C, c = cokernel(f)
    for v in range(A.n):
        assert K.dims[v] + Im.dims[v] == P.dims[v]
        assert Im.dims[v] + C.dims[v] == I.dims[v]
    assert k.then(f).is_zero() and f.then(c).is_zero()
    assert K.satisfies_relations() and C.satisfies_relations()


def test_radical_top_socle(corpus):
    A = corpus["ex43"]
    P = projective(A, 1)
    assert top(P)[0].dims == (0, 1, 0)
    assert radical(P)[0].dims == (2, 2, 2)
    assert loewy_length(P) == 4
    B = corpus["ex35a"]
    assert socle(projective(B, 1))[0].dims == (1, 0)


def test_duality_swaps_projectives_and_injectives(corpus):
    A = corpus["ex414"]
    for i in range(A.n):
        assert is_isomorphic(dualize(injective(A, i)), projective(A.opposite(), i))


def test_simples_are_bricks_and_orthogonal(corpus):
    A = corpus["ex43"]
    for i in range(A.n):
        assert is_brick(simple(A, i))
        for j in range(A.n):
            assert HomSpace(simple(A, i), simple(A, j)).dim == (1 if i == j else 0)
    assert not is_brick(projective(A, 1))


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_projectives_are_indecomposable(corpus, name):
    A = corpus[name]
    for i in range(A.n):
        assert is_indecomposable(projective(A, i))
        assert is_indecomposable(injective(A, i))


def test_decomposition_of_a_sum(corpus):
    A = corpus["ex43"]
    parts = [projective(A, 1), projective(A, 1), simple(A, 0), injective(A, 2)]
    S, _, _ = direct_sum(parts)
    d = decompose(S)
    assert d.verify()
    assert len(d.summands) == 4
    assert sorted(Y.dims for Y in d.summands) == sorted(Y.dims for Y in parts)


def test_decomposition_over_f2(corpus_f2):
    A = corpus_f2["ex414"]
    S, _, _ = direct_sum([projective(A, 0), simple(A, 0), simple(A, 0)])
    d = decompose(S)
    assert d.verify() and len(d.summands) == 3


def test_isomorphism_search(corpus):
    A = corpus["ex43"]
    P = projective(A, 2)
    S, _, _ = direct_sum([P, simple(A, 0)])
    T, _, _ = direct_sum([simple(A, 0), P])
    assert is_isomorphic(S, T)
    g = find_isomorphism(P, P)
    assert g is not None and g.is_iso()
    assert not is_isomorphic(projective(A, 0), injective(A, 0))


def test_end_algebra_radical(corpus):
    A = corpus["ex43"]
    E = EndAlgebra(projective(A, 1))
    assert E.dim == 3 and E.radical.dim == 2
    assert E.is_local()


def test_right_minimal_drops_redundant_summand(corpus):
    A = corpus["ex43"]
    P = projective(A, 1)
    X, incs, projs = direct_sum([P, P])
    S, to_top = top(P)
    f = projs[0].then(to_top)
    red, inc, drop = right_minimal(f)
    assert red.source.dims == P.dims
    assert drop.source.dims == P.dims
    assert red.is_surjective() and red.target is S


def test_left_minimal_drops_redundant_summand(corpus):
    A = corpus["ex43"]
    I = injective(A, 0)
    X, incs, projs = direct_sum([I, I])
    S = simple(A, 0)
    f = HomSpace(S, I).basis[0].then(incs[0])
    red, proj, drop = left_minimal(f)
    assert red.target.dims == I.dims


def test_minimal_left_approximation_by_injectives(corpus):
    A = corpus["ex43"]
    inj = [injective(A, i) for i in range(A.n)]
    P = projective(A, 1)
    f = minimal_left_approximation(P, inj)
    assert f.is_injective()
    socle_dims = socle(P)[0].dims
    assert sum(f.target.dims) == sum(socle_dims[i] * inj[i].dim for i in range(A.n))


def test_syzygy_dims(corpus):
    A = corpus["ex43"]
    om = syzygy(simple(A, 1))
    assert om.dims == tuple(p - s for p, s in zip(projective(A, 1).dims, (0, 1, 0)))


def test_module_map_algebra(corpus):
    A = corpus["ex43"]
    P = projective(A, 1)
    idm = ModuleMap.identity(P)
    assert (idm + idm).equals(idm.scale(A.field(2)))
    assert (idm - idm).is_zero()
