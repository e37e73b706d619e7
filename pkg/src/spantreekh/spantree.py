"""Spanning trees of the Tait graph: Tutte activities, activity words,
twisted unknots, tree monomials, gradings, the partial order on trees and
the partial skein resolution tree.

Edge order is always the crossing listing order.  Activity letters are kept
as plain characters L/D/l/d; an edge's sign (bar) comes from the graph.
"""

from __future__ import annotations

from .algebra import LaurentPolynomial, bareiss_determinant
from .diagram import DiagramError, kink_sign, tait_graph

BAR = "̄"
ELL = "ℓ"

# per-letter bracket monomials, keyed by (letter, positive?)
_MONOMIALS = {
    ("L", True): (-1, -3),
    ("D", True): (1, 1),
    ("l", True): (-1, 3),
    ("d", True): (1, -1),
    ("L", False): (-1, 3),
    ("D", False): (1, -1),
    ("l", False): (-1, -3),
    ("d", False): (1, 1),
}

# dead letters smooth to these markers
_DEAD_MARKER = {("D", True): "A", ("d", True): "B", ("D", False): "B", ("d", False): "A"}

# live letters carry kinks of these writhes
_KINK_WRITHE = {("L", True): -1, ("l", True): 1, ("L", False): 1, ("l", False): -1}


def render_letter(letter, positive):
    base = ELL if letter == "l" else letter
    return base if positive else base + BAR


class ActivityWord:
    """Activity letters of a spanning tree, one per edge in edge order."""

    __slots__ = ("letters", "signs")

    def __init__(self, letters, signs):
        self.letters = tuple(letters)
        self.signs = tuple(signs)
        if len(self.letters) != len(self.signs):
            raise ValueError("letters and signs must align")

    def __str__(self):
        return "".join(
            render_letter(l, s > 0) for l, s in zip(self.letters, self.signs)
        )

    def count(self, letter, positive):
        return sum(
            1
            for l, s in zip(self.letters, self.signs)
            if l == letter and (s > 0) == positive
        )

    def counts(self):
        """(p, q, r, s, x, y, z, w) = counts of L D l d Lbar Dbar lbar dbar."""
        return (
            self.count("L", True),
            self.count("D", True),
            self.count("l", True),
            self.count("d", True),
            self.count("L", False),
            self.count("D", False),
            self.count("l", False),
            self.count("d", False),
        )

    def gradings(self):
        p, q, r, s, x, y, z, w = self.counts()
        return (p - r - x + z, p + q)

    def monomial(self):
        poly = LaurentPolynomial.one("A")
        for l, s in zip(self.letters, self.signs):
            c, e = _MONOMIALS[(l, s > 0)]
            poly = poly * LaurentPolynomial.monomial(c, e, "A")
        return poly

    def markers(self):
        """Per-crossing partial smoothing: live edges stay ``*``."""
        out = []
        for l, s in zip(self.letters, self.signs):
            key = (l, s > 0)
            out.append(_DEAD_MARKER.get(key, "*"))
        return tuple(out)

    def smoothing_string(self):
        return "".join(self.markers())

    def expected_kink_writhes(self):
        """crossing -> expected kink writhe for the live letters."""
        return {
            i: _KINK_WRITHE[(l, s > 0)]
            for i, (l, s) in enumerate(zip(self.letters, self.signs))
            if (l, s > 0) in _KINK_WRITHE
        }


class SpanningTree:
    """A spanning tree of the Tait graph with its cached activity data."""

    __slots__ = ("edges", "word", "u", "v", "index")

    def __init__(self, edges, word, index=None):
        self.edges = frozenset(edges)
        self.word = word
        self.u, self.v = word.gradings()
        self.index = index

    def markers(self):
        return self.word.markers()

    def smoothing_string(self):
        return self.word.smoothing_string()

    def __repr__(self):
        return f"SpanningTree({sorted(self.edges)}, {self.word})"


def _vertex_index(graph):
    return {v: i for i, v in enumerate(graph.vertices)}


def spanning_tree_count(graph):
    """Number of spanning trees by the reduced-Laplacian determinant."""
    vi = _vertex_index(graph)
    nv = len(graph.vertices)
    if nv == 1:
        return 1
    lap = [[0] * nv for _ in range(nv)]
    for u, v, _, _ in graph.edges:
        a, b = vi[u], vi[v]
        if a == b:
            continue
        lap[a][a] += 1
        lap[b][b] += 1
        lap[a][b] -= 1
        lap[b][a] -= 1
    reduced = [row[1:] for row in lap[1:]]
    return abs(bareiss_determinant(reduced))


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True

    def copy(self):
        d = _DSU(0)
        d.parent = list(self.parent)
        return d

    def components(self):
        return len({self.find(x) for x in range(len(self.parent))})


def _edge_list(graph):
    vi = _vertex_index(graph)
    return [(vi[u], vi[v]) for u, v, _, _ in graph.edges]


def enumerate_trees(graph):
    """All spanning trees, each once, ordered lexicographically by their
    sorted edge-index sets.  Backtracking contraction/deletion; excluding an
    edge is only allowed when the remaining edges still connect the graph."""
    nv = len(graph.vertices)
    edges = _edge_list(graph)
    ne = len(edges)
    if nv == 0:
        raise DiagramError("empty graph")
    found = []

    def still_connectable(dsu, start):
        probe = dsu.copy()
        for i in range(start, ne):
            probe.union(*edges[i])
        return probe.components() == 1

    def recurse(i, dsu, chosen):
        if dsu.components() == 1:
            found.append(frozenset(chosen))
            return
        if i == ne:
            return
        u, v = edges[i]
        if dsu.find(u) != dsu.find(v):
            inc = dsu.copy()
            inc.union(u, v)
            chosen.append(i)
            recurse(i + 1, inc, chosen)
            chosen.pop()
        if still_connectable(dsu, i + 1):
            recurse(i + 1, dsu, chosen)

    recurse(0, _DSU(nv), [])
    found.sort(key=lambda t: tuple(sorted(t)))
    trees = []
    for k, t in enumerate(found):
        word = activity_word(graph, t)
        trees.append(SpanningTree(t, word, index=k))
    return trees


def cut_set(graph, tree, edge):
    """Edges reconnecting the two components of tree - {edge}."""
    if edge not in tree:
        raise ValueError(f"edge {edge} is not in the tree")
    edges = _edge_list(graph)
    nv = len(graph.vertices)
    dsu = _DSU(nv)
    for e in tree:
        if e != edge:
            dsu.union(*edges[e])
    side = {x: dsu.find(x) for x in range(nv)}
    a, b = edges[edge]
    ra, rb = side[a], side[b]
    if ra == rb:
        raise ValueError("tree edge does not separate the tree")
    return {
        i
        for i, (u, v) in enumerate(edges)
        if {side[u], side[v]} == {ra, rb}
    }


def cycle_set(graph, tree, edge):
    """Edges of the unique cycle in tree + {edge}."""
    if edge in tree:
        raise ValueError(f"edge {edge} is in the tree")
    edges = _edge_list(graph)
    u, v = edges[edge]
    if u == v:
        return {edge}
    # path from u to v inside the tree
    adj = {}
    for e in tree:
        a, b = edges[e]
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    stack = [(u, None, [])]
    seen = {u}
    while stack:
        node, _, path = stack.pop()
        if node == v:
            return set(path) | {edge}
        for nxt, e in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, e, path + [e]))
    raise ValueError("tree does not span the edge's endpoints")


def activity_word(graph, tree):
    """Tutte activity letters for the tree with the graph's edge order."""
    letters = []
    signs = []
    for i, (_, _, sign, _) in enumerate(graph.edges):
        if i in tree:
            live = min(cut_set(graph, tree, i)) == i
            letters.append("L" if live else "D")
        else:
            live = min(cycle_set(graph, tree, i)) == i
            letters.append("l" if live else "d")
        signs.append(sign)
    return ActivityWord(letters, signs)


def gradings(word):
    return word.gradings()


def tree_monomial(word):
    return word.monomial()


def sigma_of_partial(markers):
    """#A - #B over the smoothed crossings, ignoring ``*``."""
    return sum(1 if m == "A" else -1 for m in markers if m in "AB")


class KinkStage:
    """One undone Reidemeister-I kink of a twisted unknot."""

    __slots__ = ("crossing", "sign", "loop_pair", "loop_marker", "splice_marker")

    def __init__(self, crossing, loop_pair):
        self.crossing = crossing
        self.loop_pair = loop_pair
        self.sign = kink_sign(loop_pair)
        # a positive kink's loop appears in its A-smoothing
        self.loop_marker = "A" if self.sign > 0 else "B"
        self.splice_marker = "B" if self.sign > 0 else "A"

    def __repr__(self):
        return f"KinkStage(c={self.crossing}, sign={self.sign:+d})"


def kink_undo_sequence(diagram, dead_markers):
    """Undo removable kinks (smallest crossing index first) until the round
    unknot remains.  Raises DiagramError if the partial smoothing is not a
    twisted unknot."""
    markers = {c: m for c, m in dead_markers.items() if m in "AB"}
    live = [c for c in range(diagram.n) if c not in markers]
    stages = []
    while live:
        partial = diagram.smooth(markers)
        if partial.free_circles:
            raise DiagramError("partial smoothing is split: not a twisted unknot")
        stage = None
        for c in live:
            pair = partial.kink_slot_pair(c)
            if pair is not None:
                stage = KinkStage(c, pair)
                break
        if stage is None:
            raise DiagramError("no removable kink: not a twisted unknot")
        markers[stage.crossing] = stage.splice_marker
        live.remove(stage.crossing)
        stages.append(stage)
    final = diagram.smooth(markers)
    if len(final.circles) != 1:
        raise DiagramError("kink removal did not end at the round unknot")
    return stages


def twisted_unknot(diagram, tree_or_word):
    """Partial smoothing for the tree's dead edges plus its kink structure.

    Returns (markers, stages): markers maps every crossing to A/B/*, stages
    is the kink-undoing sequence.  Verifies the result is a twisted unknot
    whose kink writhes match the live activity letters.
    """
    word = tree_or_word.word if isinstance(tree_or_word, SpanningTree) else tree_or_word
    marker_tuple = word.markers()
    dead = {c: m for c, m in enumerate(marker_tuple) if m in "AB"}
    stages = kink_undo_sequence(diagram, dead)
    expected = word.expected_kink_writhes()
    for st in stages:
        if expected.get(st.crossing) != st.sign:
            raise DiagramError(
                f"kink writhe at crossing {st.crossing} is {st.sign:+d}, "
                f"activity letter expects {expected.get(st.crossing):+d}"
            )
    return dict(enumerate(marker_tuple)), stages


def unknot_writhe(stages):
    return sum(st.sign for st in stages)


def compare_trees(t1, t2):
    """Single-step relation on partial smoothings: 'greater', 'less' or
    'incomparable-or-equal-generator'."""
    x = t1.markers() if isinstance(t1, SpanningTree) else tuple(t1)
    y = t2.markers() if isinstance(t2, SpanningTree) else tuple(t2)
    if len(x) != len(y):
        raise ValueError("trees come from different diagrams")

    def step_greater(a, b):
        ok = all(ai in ("A", "*") for ai, bi in zip(a, b) if bi == "A")
        strict = any(ai == "A" and bi == "B" for ai, bi in zip(a, b))
        return ok and strict

    if step_greater(x, y):
        return "greater"
    if step_greater(y, x):
        return "less"
    return "incomparable-or-equal-generator"


class TreePoset:
    """Poset of spanning trees: transitive closure of the single-step
    relation, with its maximal descending chains."""

    def __init__(self, trees):
        self.trees = list(trees)
        n = len(self.trees)
        gt = [[False] * n for _ in range(n)]
        for i, a in enumerate(self.trees):
            for j, b in enumerate(self.trees):
                if i != j and compare_trees(a, b) == "greater":
                    gt[i][j] = True
        # transitive closure
        for k in range(n):
            for i in range(n):
                if gt[i][k]:
                    row_i, row_k = gt[i], gt[k]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        for i in range(n):
            if gt[i][i]:
                raise DiagramError("partial order on trees has a cycle")
        self.greater = gt
        maxima = [i for i in range(n) if not any(gt[j][i] for j in range(n))]
        minima = [i for i in range(n) if not any(gt[i][j] for j in range(n))]
        if len(maxima) != 1 or len(minima) != 1:
            raise DiagramError("tree poset must have unique maximal and minimal elements")
        self.max_index = maxima[0]
        self.min_index = minima[0]

    def is_greater(self, i, j):
        return self.greater[i][j]

    def covers(self, i):
        """Indices j covered by i (i > j with nothing between)."""
        n = len(self.trees)
        below = [j for j in range(n) if self.greater[i][j]]
        return [
            j
            for j in below
            if not any(self.greater[k][j] for k in below if k != j)
        ]

    def maximal_chains(self):
        """All maximal descending chains, as tuples of tree indices."""
        chains = []

        def descend(i, acc):
            cov = self.covers(i)
            if not cov:
                chains.append(tuple(acc))
                return
            for j in sorted(cov):
                descend(j, acc + [j])

        descend(self.max_index, [self.max_index])
        return chains

    def depth_from_minimal(self, i):
        """Length of the longest descending chain from tree i to the minimum."""
        below = [j for j in range(len(self.trees)) if self.greater[i][j]]
        if not below:
            return 0
        return 1 + max(self.depth_from_minimal(j) for j in below)

    def linear_extension(self):
        """Tree indices, minimal first, compatible with the partial order."""
        keyed = sorted(
            range(len(self.trees)),
            key=lambda i: (
                self.depth_from_minimal(i),
                tuple(sorted(self.trees[i].edges)),
            ),
        )
        return keyed


def build_poset(trees):
    return TreePoset(trees)


class ResolutionNode:
    """Node of the partial skein resolution tree."""

    __slots__ = ("markers", "crossing", "a_child", "b_child", "tree", "stages")

    def __init__(self, markers, crossing=None, a_child=None, b_child=None,
                 tree=None, stages=None):
        self.markers = markers
        self.crossing = crossing
        self.a_child = a_child
        self.b_child = b_child
        self.tree = tree
        self.stages = stages

    @property
    def is_leaf(self):
        return self.crossing is None

    def leaves(self):
        if self.is_leaf:
            return [self]
        return self.a_child.leaves() + self.b_child.leaves()


def resolution_tree(diagram, graph=None, trees=None):
    """Binary resolution tree branching A-first, processing crossings in
    reverse edge order and leaving nugatory crossings unsmoothed."""
    graph = graph or tait_graph(diagram)
    trees = trees if trees is not None else enumerate_trees(graph)
    by_edges = {t.edges: t for t in trees}
    sign_of = {c: s for _, _, s, c in graph.edges}
    order = list(range(diagram.n - 1, -1, -1))

    def descend(markers, pos):
        for idx in range(pos, len(order)):
            c = order[idx]
            if c in markers:
                continue
            if not diagram.is_nugatory(c, markers):
                node = ResolutionNode(dict(markers), crossing=c)
                ma = dict(markers)
                ma[c] = "A"
                node.a_child = descend(ma, idx + 1)
                mb = dict(markers)
                mb[c] = "B"
                node.b_child = descend(mb, idx + 1)
                return node
        live = [c for c in range(diagram.n) if c not in markers]
        for c in live:
            if not diagram.is_nugatory(c, markers):
                raise DiagramError("leaf with a non-nugatory crossing left over")
        stages = kink_undo_sequence(diagram, markers)
        kinks = {st.crossing: st.sign for st in stages}
        edges = set()
        for c in range(diagram.n):
            if c in markers:
                if (sign_of[c] > 0) == (markers[c] == "A"):
                    edges.add(c)
            else:
                if (sign_of[c] > 0) == (kinks[c] < 0):
                    edges.add(c)
        tree = by_edges.get(frozenset(edges))
        if tree is None:
            raise DiagramError("resolution leaf does not match a spanning tree")
        leaf_markers = {c: markers.get(c, "*") for c in range(diagram.n)}
        if tuple(leaf_markers[c] for c in range(diagram.n)) != tree.markers():
            raise DiagramError("leaf smoothing disagrees with the tree's activity word")
        return ResolutionNode(leaf_markers, tree=tree, stages=stages)

    root = descend({}, 0)
    leaves = root.leaves()
    if len(leaves) != len(trees):
        raise DiagramError(
            f"{len(leaves)} leaves for {len(trees)} spanning trees"
        )
    for leaf in leaves:
        mu = leaf.tree.word.monomial()
        sigma = sigma_of_partial(
            [leaf.markers[c] for c in range(diagram.n)]
        )
        if mu != leaf_monomial(sigma, unknot_writhe(leaf.stages)):
            raise DiagramError("mu(T) != A^sigma(U) (-A)^{3w(U)} at a leaf")
    return root


def leaf_monomial(sigma, w_u):
    """A^{sigma(U)} (-A)^{3 w(U)}."""
    k = 3 * w_u
    return LaurentPolynomial.monomial((-1) ** (k % 2), sigma + k, "A")
