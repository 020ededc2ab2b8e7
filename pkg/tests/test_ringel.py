from __future__ import annotations

import pytest

from strata.algebra import AdmissibilityError, path_algebra
from strata.corpus import CORPUS_NAMES
from strata.module import (
    HomSpace,
    decompose,
    direct_sum,
    injective,
    is_isomorphic,
    projective,
    simple,
)
from strata.ringel import (
    NotBasic,
    apply_phi,
    apply_psi,
    basic_presentation,
    end_algebra,
    ringel_dual,
    standardization_check,
    wakamatsu_check,
)
from strata.strata import (
    PreconditionError,
    family,
    is_mixed_stratified,
    proper_standard_module,
    standard_module,
)
from strata.systems import build_cosystem, build_system


def projectives(A):
    return [projective(A, i) for i in range(A.n)]


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_endomorphisms_of_regular_module(corpus, name):
    A = corpus[name]
    B = end_algebra(projectives(A))
    assert B.dim == A.dim
    assert B.cartan() == A.cartan()
    assert B.check_associativity()
    pres = basic_presentation(B)
    assert pres.complete and pres.presented_dim == A.dim
    assert pres.arrow_counts() == A.arrow_counts()
    assert pres.algebra.cartan() == A.cartan()


def test_yoneda_projectives_map_to_projectives(corpus):
    A = corpus["ex43"]
    pres = basic_presentation(end_algebra(projectives(A)))
    for i in range(A.n):
        assert is_isomorphic(apply_psi(pres, projective(A, i)), projective(pres.algebra, i))
        assert apply_psi(pres, simple(A, i)).dim == sum(HomSpace(P, simple(A, i)).dim for P in projectives(A))
    with pytest.raises(ValueError):
        apply_phi(pres, simple(A, 0))


def test_semisimple_endomorphisms(corpus):
    A = corpus["ex43"]
    B = end_algebra([simple(A, i) for i in range(A.n)])
    assert B.dim == 3
    pres = basic_presentation(B)
    assert pres.arrow_counts() == [[0] * 3 for _ in range(3)]


def test_repeated_summands_are_not_basic(corpus):
    A = corpus["ex43"]
    P = projective(A, 0)
    with pytest.raises(NotBasic):
        basic_presentation(end_algebra([P, P]))


def test_end_of_cogenerator_dimension(corpus):
    A = corpus["ex414"]
    cos = build_cosystem(family(A, "pdp"))
    T = cos.injectives
    oracle = sum(HomSpace(X, Y).dim for X in T for Y in T)
    assert end_algebra(T, opposite=True).dim == oracle == 14
    assert end_algebra(T, opposite=True).dim == end_algebra(T, opposite=True).dim


def test_standardization_on_ex43(corpus):
    A = corpus["ex43"]
    theta = family(A, "dpd")
    sysm = build_system(theta)
    rep = standardization_check(sysm.theta, sysm.projectives)
    assert rep.passed
    B = rep.presentation.algebra
    assert B.dim == A.dim and B.arrow_counts() == A.arrow_counts()
    assert [M.dims for M in rep.psi_theta] == [standard_module(B, 0).dims, proper_standard_module(B, 1).dims, standard_module(B, 2).dims]


def test_standardization_on_hereditary_a2():
    A = path_algebra(2, [("a", 0, 1)])
    sysm = build_system(family(A, "dd"))
    assert standardization_check(sysm.theta, sysm.projectives).passed


def test_standardization_on_semisimple():
    A = path_algebra(2, [])
    theta = family(A, "dd")
    rep = standardization_check(theta, theta)
    assert rep.passed
    assert rep.presentation.arrow_counts() == [[0, 0], [0, 0]]


def test_regular_module_is_wakamatsu_and_tilting(corpus):
    A = corpus["ex43"]
    rep = wakamatsu_check(projectives(A))
    assert rep.wakamatsu and rep.tilting is True
    assert rep.projective_dimension == 0


def test_ex414_cogenerator_is_wakamatsu_not_tilting(corpus):
    A = corpus["ex414"]
    cos = build_cosystem(family(A, "pdp"))
    rep = wakamatsu_check(cos.injectives)
    assert rep.self_ext == [0, 0, 0]
    assert rep.wakamatsu
    assert rep.projective_dimension is None and rep.tilting is None
    assert rep.status == "verified up to caps"


def test_wakamatsu_accepts_a_module(corpus):
    A = corpus["ex35a"]
    W, _, _ = direct_sum(projectives(A) + [projective(A, 0)])
    rep = wakamatsu_check(W)
    assert rep.wakamatsu


def test_ex414_ringel_dual(corpus):
    A = corpus["ex414"]
    rd = ringel_dual(A, "pdp")
    assert rd.passed
    C = rd.C
    assert C.n == 3 and C.dim == 14
    assert rd.presentation.arrow_counts() == [[1, 0, 0], [1, 0, 2], [0, 1, 0]]
    assert rd.double_dual.layers_passed == ["dim", "cartan", "arrow_counts", "explicit_isomorphism"]
    assert is_mixed_stratified(C, rd.dual_choice).passed
    assert rd.to_json()["pass"] is True


def test_two_cubic_relations_leave_dual_quiver_infinite():
    arrows = [("al", 0, 0), ("be", 1, 0), ("ga", 1, 2), ("ph", 1, 2), ("de", 2, 1)]
    relations = [["al", "al"], ["be", "al"], ["de", "be"], ["ga", "de", "ga"], ["ph", "de", "ph"]]
    with pytest.raises(AdmissibilityError):
        path_algebra(3, arrows, relations, length_cap=12)


@pytest.mark.parametrize("name", ["ex35a", "ex35b", "kron"])
def test_standardly_stratified_duals(corpus, name):
    A = corpus[name]
    choice = "d" * A.n
    rd = ringel_dual(A, choice)
    assert rd.passed
    assert rd.dual_choice == tuple(choice)
    assert wakamatsu_check(rd.cosystem.injectives).tilting is True


def test_all_standard_ex43_fails_dual_precondition(corpus):
    A = corpus["ex43"]
    with pytest.raises(PreconditionError):
        ringel_dual(A, "ddd")
    cos = build_cosystem(family(A, "ddd"))
    assert not wakamatsu_check(cos.injectives).self_orthogonal


def test_semisimple_dual_is_itself():
    A = path_algebra(2, [])
    rd = ringel_dual(A, "dd")
    assert rd.passed and rd.C.dim == 2
    assert rd.presentation.arrow_counts() == [[0, 0], [0, 0]]


def test_left_right_symmetry_dims(corpus):
    A = corpus["ex414"]
    rd = ringel_dual(A, "pdp")
    cos = rd.cosystem
    for k, M in enumerate(rd.phi_theta):
        theta_k = cos.theta[A.n - 1 - k]
        assert M.dim == sum(HomSpace(theta_k, I).dim for I in cos.injectives)
    for i, M in enumerate(rd.phi_regular):
        assert M.dim == sum(HomSpace(projective(A, i), I).dim for I in cos.injectives)


def test_decomposed_injective_cogenerator(corpus):
    A = corpus["ex43"]
    I, _, _ = direct_sum([injective(A, i) for i in range(A.n)])
    assert len(decompose(I).summands) == 3
    assert wakamatsu_check(I).self_orthogonal
