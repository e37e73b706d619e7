"""Elementary collapses, fundamental cycles and the retraction pipeline."""

import random

import pytest

from spantreekh import corpus
from spantreekh.diagram import DiagramError, parse_pd, tait_graph
from spantreekh.khovanov import differential, khovanov_homology
from spantreekh.spantree import build_poset, enumerate_trees, resolution_tree
from spantreekh.collapse import (
    MutableComplex,
    check_order_discipline,
    elementary_collapse,
    grading_map,
    inverse_grading_map,
    jacobsson_cycle,
    retract_to_tree_complex,
    state_tree_assignment,
)


def test_grading_map_worked_example():
    # trefoil4 has w = -4, k = 4
    assert grading_map(2, 2, -4, 4) == (-2, -5)
    assert grading_map(-1, 1, -4, 4) == (-3, -9)
    assert inverse_grading_map(-3, -9, -4, 4) == (-1, 1)


def test_grading_map_round_trip():
    rng = random.Random(5)
    for _ in range(50):
        w = rng.randint(-6, 6)
        k = rng.randint(-2, 10)
        u = rng.randint(-5, 5)
        v = rng.randint(-5, 5)
        if (w + k) % 2:
            continue
        i, j = grading_map(u, v, w, k)
        assert inverse_grading_map(i, j, w, k) == (u, v)


def test_elementary_collapse_pair_only():
    mc = MutableComplex({"x": 0, "y": 1}, {"x": {"y": 1}})
    elementary_collapse(mc, "x", "y")
    assert mc.live == set()


def test_elementary_collapse_keeps_third_generator():
    # dx = y + 2z: collapsing (x, y) leaves z with homology unchanged (none)
    mc = MutableComplex(
        {"x": 0, "y": 1, "z": 1}, {"x": {"y": 1, "z": 2}}
    )
    before = mc.homology_snapshot()
    mc.collapse("x", "y")
    assert mc.live == {"z"}
    assert mc.homology_snapshot() == before


def test_elementary_collapse_requires_unit_incidence():
    mc = MutableComplex({"x": 0, "y": 1}, {"x": {"y": 2}})
    with pytest.raises(DiagramError, match="must be"):
        mc.collapse("x", "y")


def _random_complex(rng, size=30):
    """Random two-or-three step chain complex with d o d = 0, built by
    composing random elementary matrices so the differential squares to
    zero by construction: generators in degrees 0/1/2 with d = 0 between
    non-adjacent, and d1 o d0 = 0 arranged by choosing d0 into ker(d1)."""
    n2 = rng.randint(2, size // 3)
    n1 = rng.randint(2, size // 3)
    n0 = rng.randint(2, size // 3)
    rows_d1 = {}
    for a in range(n1):
        for b in range(n2):
            if rng.random() < 0.3:
                rows_d1[(a, b)] = rng.choice([-2, -1, 1, 2])
    # d0: degree0 -> degree1 with d1(d0(x)) = 0: build from kernel combos
    from spantreekh.algebra import nullspace_over_field
    matrix = [[rows_d1.get((a, b), 0) for a in range(n1)] for b in range(n2)]
    kernel = nullspace_over_field(matrix)
    integral = []
    import math
    for vec in kernel:
        scale = 1
        for v in vec:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
        integral.append([int(v * scale) for v in vec])
    gradings = {}
    rows = {}
    for x in range(n0):
        gradings[("c0", x)] = 0
        combo = [0] * n1
        for vec in integral:
            c = rng.randint(-1, 1)
            for idx, v in enumerate(vec):
                combo[idx] += c * v
        row = {("c1", a): combo[a] for a in range(n1) if combo[a]}
        if row:
            rows[("c0", x)] = row
    for a in range(n1):
        gradings[("c1", a)] = 1
        row = {("c2", b): rows_d1[(a, b)] for b in range(n2) if (a, b) in rows_d1}
        if row:
            rows[("c1", a)] = row
    for b in range(n2):
        gradings[("c2", b)] = 2
    return MutableComplex(gradings, rows)


def test_random_collapses_preserve_homology():
    """Acceptance 8a: 200 randomized complexes, homology before == after."""
    rng = random.Random(2024)
    performed = 0
    for trial in range(200):
        mc = _random_complex(rng)
        mc.check_d_squared()
        before = mc.homology_snapshot()
        # perform random legal collapses
        for _ in range(10):
            pairs = [
                (x, y)
                for x in sorted(mc.live, key=repr)
                for y, c in mc.rows.get(x, {}).items()
                if c in (1, -1)
            ]
            if not pairs:
                break
            x, y = pairs[rng.randrange(len(pairs))]
            mc.collapse(x, y)
            performed += 1
        mc.check_d_squared()
        assert mc.homology_snapshot() == before
    assert performed > 200


def test_transport_drops_collapsed_pair():
    mc = MutableComplex(
        {"x": 0, "y": 1, "z": 1}, {"x": {"y": 1, "z": 2}}
    )
    mc.collapse("x", "y")
    # a chain with a y component picks up -dx
    moved = mc.transport({"y": 1})
    assert moved == {"z": -2}
    assert mc.transport({"z": 5}) == {"z": 5}


def test_jacobsson_cycle_single_kinks():
    dplus = parse_pd("PD[X(2,2,1,1)]")
    g = tait_graph(dplus)
    trees = enumerate_trees(g)
    leaf = resolution_tree(dplus, g, trees).leaves()[0]
    z = jacobsson_cycle(dplus, leaf.tree, leaf.stages, reduced=True)
    assert z == {(("A",), (1, 1)): 1}

    dminus = parse_pd("PD[X(1,2,2,1)]")
    g = tait_graph(dminus)
    trees = enumerate_trees(g)
    leaf = resolution_tree(dminus, g, trees).leaves()[0]
    z = jacobsson_cycle(dminus, leaf.tree, leaf.stages, reduced=True)
    (markers, signs), coeff = next(iter(z.items()))
    assert markers == ("B",)
    assert coeff == 1
    assert sum(signs) == 0  # one + and one -


def test_jacobsson_cycles_are_block_cycles_with_correct_gradings():
    for name in ("trefoil4", "4_1", "8_19"):
        d = corpus.diagram(name)
        g = tait_graph(d)
        trees = enumerate_trees(g)
        res = resolution_tree(d, g, trees)
        stages_of = {leaf.tree.index: leaf.stages for leaf in res.leaves()}
        cx = differential(d, reduced=True)
        tree_of = state_tree_assignment(d, res)
        w = d.writhe if d.n else 0
        k = g.k_invariant()
        for t in trees:
            z = jacobsson_cycle(d, t, stages_of[t.index], reduced=True)
            gradings = {(cx.states[key].i, cx.states[key].j) for key in z}
            assert gradings == {grading_map(t.u, t.v, w, k)}
            boundary = {}
            for key, coeff in z.items():
                for dst, c in cx.differential.get(key, {}).items():
                    boundary[dst] = boundary.get(dst, 0) + coeff * c
            internal = {
                kk: v for kk, v in boundary.items()
                if v and tree_of(kk[0]) == t.index
            }
            assert not internal


def test_include_unknot_states_partition_and_shifts():
    from spantreekh.collapse import include_unknot_states
    from spantreekh.khovanov import enumerate_states

    for name in ("trefoil4", "5_2"):
        d = corpus.diagram(name)
        g = tait_graph(d)
        seen = set()
        for t in enumerate_trees(g):
            states, shifts = include_unknot_states(d, t)
            assert not (states & seen)
            seen |= states
        assert seen == {s.key for s in enumerate_states(d, True)}


def test_state_partition_by_resolution_leaves():
    for name in ("trefoil4", "5_2"):
        d = corpus.diagram(name)
        res = resolution_tree(d)
        tree_of = state_tree_assignment(d, res)
        cx = differential(d, reduced=False)
        leaves = {leaf.tree.index: leaf for leaf in res.leaves()}
        for key in cx.states:
            ti = tree_of(key[0])
            leaf = leaves[ti]
            for c in range(d.n):
                if leaf.markers[c] in "AB":
                    assert key[0][c] == leaf.markers[c]


def test_order_discipline_small_corpus():
    """Acceptance 8b on diagrams up to 7 crossings."""
    for entry in corpus.entries():
        d = entry.diagram()
        if d.n > 7:
            continue
        g = tait_graph(d)
        trees = enumerate_trees(g)
        poset = build_poset(trees)
        res = resolution_tree(d, g, trees)
        tree_of = state_tree_assignment(d, res)
        for reduced in (True, False):
            cx = differential(d, reduced=reduced)
            state_tree = {key: tree_of(key[0]) for key in cx.states}
            assert check_order_discipline(cx, state_tree, poset, trees)


def test_pipeline_unknot():
    tc, record = retract_to_tree_complex(parse_pd("PD[]"), reduced=True)
    assert len(tc.generators) == 1
    assert tc.differential == {}
    assert tc.homology() == {(0, 0): (1, [])}


def test_pipeline_trefoil4_reduced():
    d = corpus.diagram("trefoil4")
    tc, record = retract_to_tree_complex(d, reduced=True)
    assert sorted(tc.generators.values()) == [(-1, 1), (0, 1), (1, 1), (2, 1), (2, 2)]
    hom = tc.homology()
    assert hom == {(-1, 1): (1, []), (0, 1): (1, []), (2, 1): (1, [])}
    # the only differential is T5 -> T3, forced by the bidegree
    entries = [(src, dst, c) for src, row in tc.differential.items()
               for dst, c in row.items()]
    assert len(entries) == 1
    assert abs(entries[0][2]) == 1


def test_pipeline_alternating_has_zero_differential():
    for name in corpus.ALTERNATING_KNOTS:
        d = corpus.diagram(name)
        if d.n > 7:
            continue
        tc, _ = retract_to_tree_complex(d, reduced=True)
        assert tc.differential == {}, name


def test_pipeline_matches_brute_force_reduced_and_unreduced():
    for name in ("unknot1p", "unknot3", "trefoil4", "3_1", "4_1", "5_1", "5_2"):
        d = corpus.diagram(name)
        for reduced in (True, False):
            tc, _ = retract_to_tree_complex(d, reduced=reduced)
            assert tc.homology_in_ij() == khovanov_homology(d, reduced=reduced), (
                name, reduced,
            )


def test_retraction_of_cycles_is_identity():
    """Acceptance 8d: r o f = id with unit diagonal, both modes."""
    for name in ("trefoil4", "6_3", "8_19"):
        d = corpus.diagram(name)
        for reduced in (True, False):
            tc, record = retract_to_tree_complex(d, reduced=reduced)
            for cyc in record.cycles:
                row = record.transport_matrix[cyc.tree_index]
                assert row.get(cyc.tree_index) == 1


def test_unreduced_survivors_at_shifted_gradings():
    d = corpus.diagram("trefoil4")
    tc, _ = retract_to_tree_complex(d, reduced=False)
    by_tree = {}
    for (ti, seed), (u, v) in tc.generators.items():
        by_tree.setdefault(ti, {})[seed] = (u, v)
    for ti, pair in by_tree.items():
        u, v = pair[1]
        assert pair[-1] == (u + 2, v + 1)


def test_insulation_is_instrumented():
    # the pipeline raises if a collapse leaks into another tree's block;
    # running it on the corpus exercises the instrumentation
    d = corpus.diagram("6_2")
    retract_to_tree_complex(d, reduced=True)
