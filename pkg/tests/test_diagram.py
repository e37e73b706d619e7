"""PD parsing, faces, checkerboard coloring and Tait graphs."""

import pytest

from spantreekh import corpus
from spantreekh.diagram import DiagramError, parse_pd, tait_graph

TREFOIL4 = "PD[X(1,6,2,7), X(5,2,6,3), X(8,3,1,4), X(4,7,5,8)] base=1"
LEFT_TREFOIL = "PD[X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)]"


def test_parse_empty_pd_is_round_unknot():
    d = parse_pd("PD[]")
    assert d.n == 0
    assert len(d.faces) == 2
    assert d.writhe == 0 if d.n else True


def test_parse_standard_left_trefoil():
    d = parse_pd(LEFT_TREFOIL)
    assert d.n == 3
    assert d.writhe == -3


def test_parse_trefoil4():
    d = parse_pd(TREFOIL4, label="trefoil4")
    assert d.n == 4
    assert d.writhe == -4
    assert len(d.faces) == 6  # F = 8 - 4 + 2


def test_parse_rejects_malformed():
    with pytest.raises(DiagramError):
        parse_pd("PD[X(1,2,3)]")
    with pytest.raises(DiagramError):
        parse_pd("X(1,2,3,4)")
    with pytest.raises(DiagramError):
        parse_pd("PD[X(1,2,3,4), garbage]")


def test_parse_rejects_bad_arc_counts():
    with pytest.raises(DiagramError, match="exactly twice"):
        parse_pd("PD[X(1,1,1,2)]")


def test_parse_rejects_disconnected():
    # two disjoint kinks
    with pytest.raises(DiagramError, match="disconnected"):
        parse_pd("PD[X(1,1,2,2), X(3,3,4,4)]")


def test_parse_rejects_nonplanar():
    # trefoil code with two arcs exchanged: fails the Euler count
    with pytest.raises(DiagramError, match="Euler|planar"):
        parse_pd("PD[X(1,4,2,5), X(3,6,1,4), X(5,2,6,3)]")


def test_round_trip_serialization():
    for text in (TREFOIL4, LEFT_TREFOIL, "PD[]"):
        d = parse_pd(text)
        again = parse_pd(d.serialize())
        assert again.crossings == d.crossings
        assert again.basepoint == d.basepoint


def test_mirror_flips_writhe():
    for name in ("3_1", "trefoil4", "5_2"):
        d = corpus.diagram(name)
        assert d.mirror().writhe == -d.writhe


def test_faces_euler_formula_on_corpus():
    for entry in corpus.entries():
        d = entry.diagram()
        if d.n == 0:
            assert len(d.faces) == 2
        else:
            assert len(d.faces) == d.n + 2


def test_kink_faces():
    d = parse_pd("PD[X(2,2,1,1)]")
    assert len(d.faces) == 3


def test_tait_graph_unknot():
    g = tait_graph(parse_pd("PD[]"))
    assert len(g.vertices) == 1
    assert g.edges == ()


def test_tait_graph_trefoil4_matches_worked_example():
    d = parse_pd(TREFOIL4)
    g = tait_graph(d)
    assert len(g.vertices) == 3
    assert [s for _, _, s, _ in g.edges] == [1, 1, -1, -1]
    assert g.k_invariant() == 4
    # triangle with a doubled side: the two negative edges are parallel
    neg = [(u, v) for u, v, s, _ in g.edges if s < 0]
    assert len(set(map(frozenset, neg))) == 1


def test_tait_graph_alternating_signs_equal():
    for name in corpus.ALTERNATING_KNOTS:
        g = tait_graph(corpus.diagram(name))
        assert g.e_minus == 0 or g.e_plus == 0


def test_tait_graph_normalization_prefers_positive():
    for entry in corpus.entries():
        g = tait_graph(entry.diagram())
        assert g.e_plus >= g.e_minus


def test_negative_edge_counts_for_almost_alternating_entries():
    g4 = tait_graph(corpus.diagram("trefoil4"))
    assert g4.e_minus == min(2, len(g4.edges) - 2)
    g19 = tait_graph(corpus.diagram("8_19"))
    assert g19.e_minus == 2


def test_dual_shading_is_planar_dual_with_flipped_signs():
    for name in ("trefoil4", "3_1", "4_1", "6_3"):
        d = corpus.diagram(name)
        g = tait_graph(d)
        dual = tait_graph(d, shading=1 - g.shading)
        assert len(g.edges) == len(dual.edges)
        assert len(g.vertices) + len(dual.vertices) == len(d.faces)
        for e, f in zip(g.edges, dual.edges):
            assert e[2] == -f[2]
            assert e[3] == f[3]


def test_smooth_full_circles():
    d = parse_pd(TREFOIL4)
    all_b = d.smooth({c: "B" for c in range(4)})
    assert len(all_b.circles) >= 1
    assert all_b.sigma() == -4
    # circles partition the arcs
    arcs = sorted(a for c in all_b.circles for a in c)
    assert arcs == list(d.arcs)


def test_smooth_partial_and_kinks():
    d = parse_pd(TREFOIL4)
    partial = d.smooth({1: "A", 2: "B", 3: "A"})  # the *ABA leaf
    assert partial.kept == (0,)
    assert partial.kink_slot_pair(0) is not None


def test_is_nugatory():
    kink = parse_pd("PD[X(2,2,1,1)]")
    assert kink.is_nugatory(0)
    trefoil = parse_pd(LEFT_TREFOIL)
    for c in range(3):
        assert not trefoil.is_nugatory(c)
    # the remaining crossing of trefoil4 under *ABA is a kink
    d = parse_pd(TREFOIL4)
    assert d.is_nugatory(0, {1: "A", 2: "B", 3: "A"})


def test_component_count():
    d = parse_pd(TREFOIL4)
    assert d.component_count({}) == 1
    # a full smoothing can split into several circles
    assert d.component_count({c: "B" for c in range(4)}) >= 1
