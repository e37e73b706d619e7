"""Kauffman brackets, Jones polynomials and the Euler-characteristic
identities."""

import pytest

from spantreekh import corpus
from spantreekh.algebra import LaurentPolynomial
from spantreekh.diagram import DiagramError, parse_pd, tait_graph
from spantreekh.jones import (
    bracket_spantree,
    bracket_statesum,
    euler_check,
    jones,
    jones_in_t,
)
from spantreekh.spantree import enumerate_trees


def test_bracket_unknot_is_one():
    d = parse_pd("PD[]")
    one = LaurentPolynomial.one("A")
    assert bracket_statesum(d) == one
    assert bracket_spantree(d) == one


def test_bracket_single_kinks():
    assert bracket_statesum(parse_pd("PD[X(2,2,1,1)]")) == LaurentPolynomial({3: -1})
    assert bracket_statesum(parse_pd("PD[X(1,2,2,1)]")) == LaurentPolynomial({-3: -1})


def test_bracket_trefoil4_value():
    d = corpus.diagram("trefoil4")
    expected = LaurentPolynomial({4: -1, 0: 1, -8: 1})
    assert bracket_statesum(d) == expected
    assert bracket_spantree(d) == expected


def test_thistlethwaite_equality_on_corpus():
    for entry in corpus.entries():
        d = entry.diagram()
        assert bracket_statesum(d) == bracket_spantree(d), entry.name


def test_jones_values():
    assert str(jones_in_t(jones(corpus.diagram("trefoil4")))) == "-t^-4+t^-3+t^-1"
    assert str(jones_in_t(jones(corpus.diagram("3_1")))) == "-t^-4+t^-3+t^-1"
    assert str(jones_in_t(jones(corpus.diagram("4_1")))) == "t^-2-t^-1+1-t+t^2"
    assert str(jones_in_t(jones(corpus.diagram("8_19")))) == "t^3+t^5-t^8"
    for name in corpus.UNKNOTS:
        assert str(jones_in_t(jones(corpus.diagram(name)))) == "1"


def test_jones_mirror_inverts_t():
    for name in ("3_1", "5_2", "trefoil4", "8_19"):
        d = corpus.diagram(name)
        v = jones(d)
        vm = jones(d.mirror())
        assert vm.coeffs == {-e: c for e, c in v.coeffs.items()}


def test_kink_multiplies_bracket():
    b0 = bracket_statesum(parse_pd("PD[]"))
    b1 = bracket_statesum(parse_pd("PD[X(2,2,1,1)]"))
    assert b1 == b0 * LaurentPolynomial({3: -1})
    # three kinks of signs +,-,+ contribute (-A^3)(-A^-3)(-A^3)
    b3 = bracket_statesum(corpus.diagram("unknot3"))
    assert b3 == LaurentPolynomial({3: -1})
    # the Jones polynomial is unchanged by kinks
    for name in corpus.UNKNOTS:
        assert jones(corpus.diagram(name)) == LaurentPolynomial.one("q")


def test_euler_identities_on_corpus():
    for entry in corpus.entries():
        report = euler_check(entry.diagram())
        assert report["reduced_identity"] and report["unreduced_identity"], entry.name


def test_alternating_k_identity():
    # alternating diagrams: k = c(D) + 2 v with v = V(G) - 1
    for name in corpus.ALTERNATING_KNOTS:
        d = corpus.diagram(name)
        g = tait_graph(d)
        assert g.k_invariant() == d.n + 2 * (len(g.vertices) - 1)


def test_jones_rejects_inconsistent_input():
    # a 2-component link has half-integer exponents; knots must be integral
    d = corpus.diagram("trefoil4")
    v = jones(d)
    assert all(e % 4 == 0 for e in v.coeffs)
