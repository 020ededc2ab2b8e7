from __future__ import annotations

import pytest

from strata.algebra import (
    AdmissibilityError,
    DSLParseError,
    parse_algebra,
    parse_document,
    path_algebra,
)
from strata.corpus import CORPUS_NAMES, corpus_text
from strata.exactlin import QQ, Field


def monomial_path_count(A) -> int:
    """Paths avoiding every monomial relation as a subword, counted by brute force."""
    forbidden = [tuple(next(iter(r))) for r in A.relations]
    assert all(len(r) == 1 for r in A.relations)
    count = A.n
    layer = [(k,) for k in range(len(A.arrows))]
    while layer:
        ok = [w for w in layer if not any(w[i : i + len(f)] == f for f in forbidden for i in range(len(w) - len(f) + 1))]
        count += len(ok)
        layer = [w + (k,) for w in ok for k, a in enumerate(A.arrows) if A.arrows[w[-1]].target == a.source]
        if len(layer) > 10000:
            raise AssertionError("not admissible")
    return count


def test_example_dimensions(corpus):
    assert corpus["ex43"].dim == 13
    assert corpus["ex414"].dim == 11


@pytest.mark.parametrize("name", ["ex43", "ex414", "kron"])
def test_dimension_matches_monomial_path_count(corpus, name):
    A = corpus[name]
    assert A.dim == monomial_path_count(A)


def test_ex43_basis_and_loewy(corpus):
    A = corpus["ex43"]
    names = [A.path_name(p) for p in A.basis]
    assert names == ["e1", "a", "ac", "e2", "b", "c", "bd", "ca", "bdb", "cac", "e3", "d", "db"]
    assert A.loewy_length == 4
    assert A.cartan() == [[2, 1, 0], [2, 3, 2], [0, 1, 2]]


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_associativity_and_relations(corpus, name):
    A = corpus[name]
    assert A.check_associativity()
    assert A.relations_hold()


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_print_parse_roundtrip(corpus, name):
    A = corpus[name]
    B = parse_algebra(A.to_dsl())
    assert A.same_presentation(B)
    assert B.dim == A.dim


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_opposite_is_an_involution(corpus, name):
    A = corpus[name]
    op = A.opposite()
    assert op.dim == A.dim
    assert op.opposite() is A
    assert op.cartan() == [list(r) for r in zip(*A.cartan())]
    assert op.check_associativity()


def test_field_override():
    A = parse_algebra(corpus_text("ex43"), Field(2))
    assert A.field.characteristic == 2 and A.dim == 13


def test_inhomogeneous_relation_collapses_to_monomial():
    # x^2 = x^3 forces x^2 = x^4 = ... = 0
    A = path_algebra(1, [("x", 0, 0)], [{(0, 0): QQ(1), (0, 0, 0): QQ(-1)}])
    assert A.dim == 2


def test_commutativity_relation():
    A = path_algebra(4, [("a", 0, 1), ("b", 1, 3), ("c", 0, 2), ("d", 2, 3)], [{(0, 1): QQ(1), (2, 3): QQ(-1)}])
    assert A.dim == 4 + 4 + 1
    assert A.check_associativity()


def test_hereditary_a2():
    A = path_algebra(2, [("a", 0, 1)])
    assert A.dim == 3 and A.loewy_length == 2


def test_non_admissible_is_rejected():
    with pytest.raises(AdmissibilityError):
        parse_algebra("field Q\nvertices 1\narrow x : 1 -> 1\n")


def test_parse_errors_carry_position():
    with pytest.raises(DSLParseError) as err:
        parse_algebra("field Q\nvertices 1 2\narrow a : 1 -> 3\n")
    assert err.value.line == 3
    with pytest.raises(DSLParseError) as err:
        parse_algebra("field Q\nvertices 1\nrelation z*z\n")
    assert err.value.line == 3


def test_module_literals_are_parsed():
    A, mods = parse_document(corpus_text("kron"))
    M = mods["M"]
    assert list(M.dims) == [1, 1]
