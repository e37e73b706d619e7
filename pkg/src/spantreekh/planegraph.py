"""Signed plane multigraphs and their medial link diagrams.

A plane graph is given by its rotation system: for every vertex the
counterclockwise cyclic order of incident edge-ends.  The medial construction
places one crossing on every edge and one arc across every vertex corner; the
edge sign fixes the over-strand so that the graph is recovered as the Tait
graph of the diagram with the vertex regions shaded (positive edge: the
A-smoothing joins the vertex regions).
"""

from __future__ import annotations

from .diagram import DiagramError, LinkDiagram

# crossing-end names; counterclockwise order around the crossing
_CCW_ENDS = ("SW", "SE", "NE", "NW")
_OPPOSITE = {"SW": "NE", "NE": "SW", "NW": "SE", "SE": "NW"}


class PlaneGraph:
    """Signed plane multigraph with an explicit rotation system."""

    def __init__(self, edges, rotations):
        """``edges``: list of (u, v, sign); ``rotations``: vertex -> cyclic
        CCW list of (edge_index, end) with end 0 at u and 1 at v."""
        self.edges = [(u, v, s) for u, v, s in edges]
        self.rotations = {v: list(r) for v, r in rotations.items()}
        seen = {}
        for v, rot in self.rotations.items():
            for e, end in rot:
                if (e, end) in seen:
                    raise DiagramError(f"edge end ({e},{end}) appears twice")
                seen[(e, end)] = v
        for i, (u, v, s) in enumerate(self.edges):
            if seen.get((i, 0)) != u or seen.get((i, 1)) != v:
                raise DiagramError(f"rotation system disagrees with edge {i}")
            if s not in (1, -1):
                raise DiagramError(f"edge {i} has sign {s}")

    @property
    def n_vertices(self):
        return len(self.rotations)

    def signs(self):
        return tuple(s for _, _, s in self.edges)


def _corner_arcs(graph):
    """Arcs of the medial diagram, one per vertex corner.

    Each arc joins two crossing ends: the CCW-after corner of one edge end
    and the CCW-before corner of the next edge end at the same vertex.
    """
    end_of = {}  # (edge, end, 'after'/'before') -> crossing end key
    for e, end in ((e, end) for e in range(len(graph.edges)) for end in (0, 1)):
        if end == 0:
            end_of[(e, end, "after")] = (e, "NW")
            end_of[(e, end, "before")] = (e, "SW")
        else:
            end_of[(e, end, "after")] = (e, "SE")
            end_of[(e, end, "before")] = (e, "NE")
    attach = {}
    arcs = []
    for v, rot in graph.rotations.items():
        m = len(rot)
        for i in range(m):
            e_a, end_a = rot[i]
            e_b, end_b = rot[(i + 1) % m]
            a_end = end_of[(e_a, end_a, "after")]
            b_end = end_of[(e_b, end_b, "before")]
            arcs.append((a_end, b_end))
    for idx, (a_end, b_end) in enumerate(arcs):
        for key in (a_end, b_end):
            if key in attach:
                raise DiagramError(f"crossing end {key} used twice")
        attach[a_end] = (idx, 0)
        attach[b_end] = (idx, 1)
    return arcs, attach


def medial_diagram(graph, label="", basepoint=None):
    """Medial link diagram of a signed plane graph.

    Crossing order equals edge order; arcs are numbered along the traced
    strands.  The Tait graph of the result, with vertex regions shaded,
    recovers the input graph.
    """
    if not graph.edges:
        return LinkDiagram([], basepoint=basepoint, label=label)
    arcs, attach = _corner_arcs(graph)
    # trace strands: each arc traversed once
    arc_label = {}
    direction = {}  # crossing end -> 'in'/'out'
    next_label = 1
    for e_start in range(len(graph.edges)):
        for start_end in _CCW_ENDS:
            if (e_start, start_end) in direction:
                continue
            e, end_name = e_start, start_end
            while True:
                direction[(e, end_name)] = "in"
                out_name = _OPPOSITE[end_name]
                direction[(e, out_name)] = "out"
                arc_idx, side = attach[(e, out_name)]
                if arc_idx in arc_label:
                    raise DiagramError("arc traversed twice during tracing")
                arc_label[arc_idx] = next_label
                next_label += 1
                other = arcs[arc_idx][1 - side]
                e, end_name = other
                if (e, end_name) in direction:
                    break
    crossings = []
    for e, (u, v, sign) in enumerate(graph.edges):
        under_ends = ("SW", "NE") if sign > 0 else ("NW", "SE")
        under_in = next(
            name for name in under_ends if direction[(e, name)] == "in"
        )
        start = _CCW_ENDS.index(under_in)
        slots = []
        for t in range(4):
            name = _CCW_ENDS[(start + t) % 4]
            arc_idx, _ = attach[(e, name)]
            slots.append(arc_label[arc_idx])
        crossings.append(tuple(slots))
    return LinkDiagram(crossings, basepoint=basepoint, label=label)


def triangle_bundle(ab, bc, ca, label="", basepoint=None):
    """Triangle with parallel-edge bundles on its three sides.

    ``ab``, ``bc``, ``ca`` are sign sequences for the bundles; extra copies
    in a bundle curl outward.  Edge order: ab bundle, bc bundle, ca bundle.
    """
    edges = []
    for u, v, signs in (("a", "b", ab), ("b", "c", bc), ("c", "a", ca)):
        for s in signs:
            edges.append((u, v, s))
    p, q, r = len(ab), len(bc), len(ca)
    ab_ids = list(range(p))
    bc_ids = list(range(p, p + q))
    ca_ids = list(range(p + q, p + q + r))
    rotations = {
        "a": [(ca_ids[0], 1)] + [(e, 0) for e in ab_ids]
        + [(e, 1) for e in reversed(ca_ids[1:])],
        "b": [(e, 1) for e in reversed(ab_ids[1:])] + [(ab_ids[0], 1)]
        + [(e, 0) for e in bc_ids],
        "c": [(e, 1) for e in reversed(bc_ids[1:])] + [(bc_ids[0], 1)]
        + [(e, 0) for e in ca_ids],
    }
    graph = PlaneGraph(edges, rotations)
    return medial_diagram(graph, label=label, basepoint=basepoint), graph


def cycle_graph(signs, label="", basepoint=None):
    """Cycle with one vertex per edge boundary; medial is a (2, n) torus
    diagram when all signs agree."""
    n = len(signs)
    edges = [(i, (i + 1) % n, signs[i]) for i in range(n)]
    rotations = {
        i: [((i - 1) % n, 1), (i, 0)] for i in range(n)
    }
    graph = PlaneGraph(edges, rotations)
    return medial_diagram(graph, label=label, basepoint=basepoint), graph


def loop_flower(signs, label="", basepoint=None):
    """Single vertex with side-by-side loops; medial is a chain of kinks."""
    edges = [("v", "v", s) for s in signs]
    rot = []
    for e in range(len(signs)):
        rot.extend([(e, 0), (e, 1)])
    graph = PlaneGraph(edges, {"v": rot})
    return medial_diagram(graph, label=label, basepoint=basepoint), graph


def theta_graph(path_signs, label="", basepoint=None):
    """Two poles joined by parallel paths (a generalized theta graph).

    ``path_signs`` is a list of sign sequences, one per path, each path
    subdivided into that many edges.  Paths are embedded side by side.
    """
    edges = []
    path_edges = []
    mid_rotations = {}
    for pi, signs in enumerate(path_signs):
        ids = []
        prev = "u"
        for j, s in enumerate(signs):
            node = "v" if j == len(signs) - 1 else f"p{pi}_{j}"
            edges.append((prev, node, s))
            ids.append(len(edges) - 1)
            prev = node
        path_edges.append(ids)
        for j in range(len(signs) - 1):
            mid_rotations[f"p{pi}_{j}"] = [(ids[j], 1), (ids[j + 1], 0)]
    rotations = {
        "u": [(ids[0], 0) for ids in reversed(path_edges)],
        "v": [(ids[-1], 1) for ids in path_edges],
    }
    rotations.update(mid_rotations)
    graph = PlaneGraph(edges, rotations)
    return medial_diagram(graph, label=label, basepoint=basepoint), graph
