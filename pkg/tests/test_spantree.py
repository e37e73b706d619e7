"""Spanning trees, activities, the partial order and the resolution tree."""

import pytest

from spantreekh import corpus
from spantreekh.algebra import LaurentPolynomial
from spantreekh.diagram import DiagramError, parse_pd, tait_graph
from spantreekh.spantree import (
    activity_word,
    build_poset,
    compare_trees,
    cut_set,
    cycle_set,
    enumerate_trees,
    kink_undo_sequence,
    leaf_monomial,
    resolution_tree,
    sigma_of_partial,
    spanning_tree_count,
    twisted_unknot,
    unknot_writhe,
)

BAR = "̄"
ELL = "ℓ"


def trefoil4():
    return parse_pd("PD[X(1,6,2,7), X(5,2,6,3), X(8,3,1,4), X(4,7,5,8)] base=1",
                    label="trefoil4")


def test_single_vertex_graph_has_one_empty_tree():
    g = tait_graph(parse_pd("PD[]"))
    trees = enumerate_trees(g)
    assert len(trees) == 1
    assert trees[0].edges == frozenset()


def test_trefoil4_worked_example_table():
    g = tait_graph(trefoil4())
    trees = enumerate_trees(g)
    assert len(trees) == 5
    table = {t.smoothing_string(): t for t in trees}
    words = {s: str(table[s].word) for s in table}
    gradings = {s: (table[s].u, table[s].v) for s in table}
    assert words == {
        "*ABA": ELL + "DD" + BAR + "d" + BAR,
        "*A*B": ELL + "D" + ELL + BAR + "D" + BAR,
        "*BBA": "LdD" + BAR + "d" + BAR,
        "*B*B": "Ld" + ELL + BAR + "D" + BAR,
        "**AA": "LLd" + BAR + "d" + BAR,
    }
    assert gradings == {
        "*ABA": (-1, 1), "*A*B": (0, 1), "*BBA": (1, 1),
        "*B*B": (2, 1), "**AA": (2, 2),
    }


def test_tree_count_matches_matrix_tree_determinant():
    for entry in corpus.entries():
        g = tait_graph(entry.diagram())
        assert len(enumerate_trees(g)) == spanning_tree_count(g)


def test_capital_letters_are_tree_edges():
    for name in ("trefoil4", "5_2", "6_3", "8_19"):
        g = tait_graph(corpus.diagram(name))
        for t in enumerate_trees(g):
            capitals = {
                i for i, l in enumerate(t.word.letters) if l in "LD"
            }
            assert capitals == t.edges


def test_letter_count_identities():
    for name in ("trefoil4", "6_2", "8_19"):
        g = tait_graph(corpus.diagram(name))
        nv, ne = len(g.vertices), len(g.edges)
        for t in enumerate_trees(g):
            p, q, r, s, x, y, z, w = t.word.counts()
            assert p + q + x + y == nv - 1
            assert r + s + z + w == ne - nv + 1


def test_activity_definitions_and_cut_cycle_duality():
    for name in ("trefoil4", "5_2", "8_19"):
        g = tait_graph(corpus.diagram(name))
        for t in enumerate_trees(g):
            for e in range(len(g.edges)):
                if e in t.edges:
                    cut = cut_set(g, t.edges, e)
                    live = t.word.letters[e] == "L"
                    assert (min(cut) == e) == live
                    for f in cut:
                        if f not in t.edges:
                            assert e in cycle_set(g, t.edges, f)
                else:
                    cyc = cycle_set(g, t.edges, e)
                    live = t.word.letters[e] == "l"
                    assert (min(cyc) == e) == live
                    for f in cyc:
                        if f in t.edges:
                            assert e in cut_set(g, t.edges, f)


def test_loop_edge_is_externally_active():
    d = parse_pd("PD[X(2,2,1,1)]")
    g = tait_graph(d)
    trees = enumerate_trees(g)
    assert len(trees) == 1
    word = trees[0].word
    assert word.letters == ("l",)
    assert str(word) in (ELL, ELL + BAR)


def test_tree_monomials_worked_example():
    g = tait_graph(trefoil4())
    table = {t.smoothing_string(): t for t in enumerate_trees(g)}
    assert table["*ABA"].word.monomial() == LaurentPolynomial({4: -1})
    assert table["**AA"].word.monomial() == LaurentPolynomial({-4: 1})
    assert table["*A*B"].word.monomial() == LaurentPolynomial({0: 1})
    # closed form mu(T) = (-1)^u A^(-4(u-v)-k)
    k = tait_graph(trefoil4()).k_invariant()
    for t in table.values():
        expected = LaurentPolynomial(
            {-4 * (t.u - t.v) - k: (-1) ** (t.u % 2)}
        )
        assert t.word.monomial() == expected


def test_mu_closed_form_on_corpus():
    for entry in corpus.entries():
        g = tait_graph(entry.diagram())
        k = g.k_invariant()
        for t in enumerate_trees(g):
            expected = LaurentPolynomial(
                {-4 * (t.u - t.v) - k: (-1) ** (t.u % 2)}
            )
            assert t.word.monomial() == expected


def test_empty_word_monomial_is_one():
    g = tait_graph(parse_pd("PD[]"))
    t = enumerate_trees(g)[0]
    assert t.word.monomial() == LaurentPolynomial.one("A")


def test_sigma_of_partial():
    assert sigma_of_partial("AAA") == 3
    assert sigma_of_partial("*ABA") == 1
    assert sigma_of_partial("*B*B") == -2


def test_twisted_unknot_smoothings_and_writhe():
    d = trefoil4()
    g = tait_graph(d)
    for t in enumerate_trees(g):
        markers, stages = twisted_unknot(d, t)
        assert unknot_writhe(stages) == -t.u
        smoothing = "".join(markers[c] for c in range(d.n))
        assert smoothing == t.smoothing_string()


def test_kink_undo_rejects_non_twisted_unknot():
    d = parse_pd("PD[X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)]")
    with pytest.raises(DiagramError):
        kink_undo_sequence(d, {})  # the trefoil has no removable kink


def test_compare_trees_single_steps():
    g = tait_graph(trefoil4())
    table = {t.smoothing_string(): t for t in enumerate_trees(g)}
    assert compare_trees(table["**AA"], table["*ABA"]) == "greater"
    assert compare_trees(table["*ABA"], table["**AA"]) == "less"
    assert compare_trees(table["*A*B"], table["*BBA"]) == "incomparable-or-equal-generator"
    for t in table.values():
        assert compare_trees(t, t) == "incomparable-or-equal-generator"


def test_poset_trefoil4_maximal_chains():
    g = tait_graph(trefoil4())
    trees = enumerate_trees(g)
    poset = build_poset(trees)
    chains = {
        tuple(trees[i].smoothing_string() for i in chain)
        for chain in poset.maximal_chains()
    }
    assert chains == {
        ("**AA", "*ABA", "*A*B", "*B*B"),
        ("**AA", "*ABA", "*BBA", "*B*B"),
    }


def test_poset_extremes_extend_all_a_and_all_b():
    for name in ("trefoil4", "5_2", "6_3", "8_19"):
        g = tait_graph(corpus.diagram(name))
        trees = enumerate_trees(g)
        poset = build_poset(trees)
        top = trees[poset.max_index].markers()
        bottom = trees[poset.min_index].markers()
        assert all(m in ("A", "*") for m in top)
        assert all(m in ("B", "*") for m in bottom)


def test_single_tree_graph_trivial_poset():
    g = tait_graph(parse_pd("PD[X(2,2,1,1)]"))
    trees = enumerate_trees(g)
    poset = build_poset(trees)
    assert poset.max_index == poset.min_index == 0
    assert poset.maximal_chains() == [(0,)]


def test_resolution_tree_leaves_match_trees():
    for name in ("unknot0", "trefoil4", "4_1", "5_2", "8_19"):
        d = corpus.diagram(name)
        g = tait_graph(d)
        trees = enumerate_trees(g)
        root = resolution_tree(d, g, trees)
        leaves = root.leaves()
        assert len(leaves) == len(trees)
        smoothings = {
            "".join(leaf.markers[c] for c in range(d.n)) for leaf in leaves
        }
        assert smoothings == {t.smoothing_string() for t in trees}


def test_resolution_leaf_monomial_identity():
    d = trefoil4()
    root = resolution_tree(d)
    for leaf in root.leaves():
        sigma = sigma_of_partial([leaf.markers[c] for c in range(d.n)])
        w_u = unknot_writhe(leaf.stages)
        assert leaf.tree.word.monomial() == leaf_monomial(sigma, w_u)
