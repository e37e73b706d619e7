"""Spanning-tree filtration of the reduced Khovanov complex and the spectral
sequence of the filtered complex, over field coefficients (Q or F_p).

Filtration: F^p = sum over maximal descending chains S_j of psi(T^j_p) where
psi(T) is the span of the blocks of all trees below T.  A generator's level
is the largest p with its block inside F^p; chains shorter than p contribute
nothing.  The page indexing has p + q = i, so d_r has (p, q) bidegree
(r, 1 - r).
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import nullspace_over_field, rank_over_field
from .diagram import DiagramError, tait_graph
from .khovanov import differential
from .spantree import build_poset, enumerate_trees, resolution_tree
from .collapse import state_tree_assignment


class Filtration:
    """Filtration levels for every enhanced-state generator."""

    def __init__(self, diagram, complex, levels, tree_levels, chains, poset, trees):
        self.diagram = diagram
        self.complex = complex
        self.levels = levels            # state key -> p
        self.tree_levels = tree_levels  # tree index -> p
        self.chains = chains            # maximal chains as tree-index tuples
        self.poset = poset
        self.trees = trees

    @property
    def depth(self):
        return max(self.tree_levels.values())

    def blocks_at_level(self, p):
        return sorted(t for t, lv in self.tree_levels.items() if lv == p)


def build_filtration(diagram, reduced=True):
    """Levels from the maximal descending chains of the tree poset."""
    graph = tait_graph(diagram)
    trees = enumerate_trees(graph)
    poset = build_poset(trees)
    res = resolution_tree(diagram, graph, trees)
    complex = differential(diagram, reduced)
    chains_by_pos = poset.maximal_chains()
    index_of = {t.index: i for i, t in enumerate(trees)}

    tree_levels = {}
    for chain in chains_by_pos:
        for p, pos in enumerate(chain, start=1):
            ti = trees[pos].index
            tree_levels[ti] = max(tree_levels.get(ti, 0), p)
    # trees at one level must be pairwise incomparable
    by_level = {}
    for ti, lv in tree_levels.items():
        by_level.setdefault(lv, []).append(ti)
    for lv, tis in by_level.items():
        for a in tis:
            for b in tis:
                if a != b and poset.is_greater(index_of[a], index_of[b]):
                    raise DiagramError(
                        f"trees {a} and {b} are comparable but share level {lv}"
                    )

    tree_of = state_tree_assignment(diagram, res)
    levels = {}
    for key in complex.states:
        levels[key] = tree_levels[tree_of(key[0])]
    # the differential must respect the filtration
    for src, row in complex.differential.items():
        for dst in row:
            if levels[dst] < levels[src]:
                raise DiagramError("differential lowers the filtration level")
    chains = tuple(tuple(trees[pos].index for pos in chain) for chain in chains_by_pos)
    return Filtration(diagram, complex, levels, tree_levels, chains, poset, trees)


class SpectralPage:
    """Dimensions of E_r^{p,q} at one page, for one coefficient field."""

    __slots__ = ("r", "dims", "field")

    def __init__(self, r, dims, field):
        self.r = r
        self.dims = {pq: d for pq, d in dims.items() if d}
        self.field = field

    def total_dimension(self):
        return sum(self.dims.values())

    def dims_by_total_degree(self):
        out = {}
        for (p, q), d in self.dims.items():
            out[p + q] = out.get(p + q, 0) + d
        return out

    def __repr__(self):
        return f"SpectralPage(r={self.r}, total={self.total_dimension()})"


def _field_params(field):
    name = str(field).upper()
    if name in ("Q", "0"):
        return None, "Q"
    if name.startswith("F"):
        name = name[1:]
    p = int(name)
    return p, f"F{p}"


class _SliceData:
    """Matrices of one j-slice of the filtered complex."""

    def __init__(self, complex, levels, j):
        states = [
            key for key, s in complex.states.items() if s.j == j
        ]
        self.by_i = {}
        for key in sorted(states):
            self.by_i.setdefault(complex.states[key].i, []).append(key)
        self.levels = levels
        self.complex = complex

    def basis(self, i, min_level):
        return [k for k in self.by_i.get(i, []) if self.levels[k] >= min_level]

    def vector(self, key, basis_index):
        vec = [0] * len(basis_index)
        vec[basis_index[key]] = 1
        return vec


def _span_dim(vectors, p):
    if not vectors:
        return 0
    return rank_over_field(vectors, p)


def _cycle_space(slice_data, i, p_level, r, prime):
    """Spanning vectors of Z_r^{p,i} = {x in F^p C_i : dx in F^{p+r}},
    expressed in the basis of F^p C_i."""
    basis = slice_data.basis(i, p_level)
    if not basis:
        return [], basis
    basis_index = {k: c for c, k in enumerate(basis)}
    target = [
        k for k in slice_data.by_i.get(i + 1, [])
        if slice_data.levels[k] < p_level + r
    ]
    if not target:
        vecs = []
        for k in basis:
            v = [0] * len(basis)
            v[basis_index[k]] = 1
            vecs.append(v)
        return vecs, basis
    t_index = {k: r_ for r_, k in enumerate(target)}
    rows = []
    for k in basis:
        row = [0] * len(target)
        for dst, coeff in slice_data.complex.differential.get(k, {}).items():
            if dst in t_index:
                row[t_index[dst]] = coeff if prime is None else coeff % prime
        rows.append(row)
    # kernel of the map F^p C_i -> C_{i+1}/F^{p+r}
    matrix = [[rows[c][r_] for c in range(len(basis))] for r_ in range(len(target))]
    kernel = nullspace_over_field(matrix, prime)
    return [list(v) for v in kernel], basis


def _boundary_images(slice_data, i, p_level, r, prime, basis):
    """d(Z_{r-1}^{p-r+1, i-1}) expressed in the basis of F^p C_{i-1+1}."""
    src_vectors, src_basis = _cycle_space(slice_data, i - 1, p_level - r + 1, r - 1, prime)
    if not src_vectors:
        return []
    basis_index = {k: c for c, k in enumerate(basis)}
    out = []
    for vec in src_vectors:
        img = [0] * len(basis)
        for c, coeff in enumerate(vec):
            if not coeff:
                continue
            for dst, d in slice_data.complex.differential.get(src_basis[c], {}).items():
                if dst in basis_index:
                    val = coeff * d
                    img[basis_index[dst]] += val
        if prime is not None:
            img = [v % prime for v in img]
        if any(img):
            out.append(img)
    return out


def page_dimension(slice_data, i, p_level, r, prime):
    """dim E_r^{p, i-p} inside one j-slice."""
    z_r, basis = _cycle_space(slice_data, i, p_level, r, prime)
    if not z_r:
        return 0
    z_below, basis_b = _cycle_space(slice_data, i, p_level + 1, r - 1, prime)
    basis_index = {k: c for c, k in enumerate(basis)}
    lifted = []
    for vec in z_below:
        v = [0] * len(basis)
        for c, coeff in enumerate(vec):
            v[basis_index[basis_b[c]]] = coeff
        lifted.append(v)
    boundaries = _boundary_images(slice_data, i, p_level, r, prime, basis)
    denom = lifted + boundaries
    dim_z = _span_dim(z_r, prime)
    dim_den = _span_dim(denom, prime)
    dim_total = _span_dim(z_r + denom, prime)
    if dim_total != dim_z:
        raise DiagramError("denominator leaves the cycle space")
    return dim_z - dim_den


def differential_ranks(filtration, field="Q", r=1):
    """Rank of d_r out of each (p, q) slot.

    Uses ker(d_r on E_r^p) = (Z_{r+1}^p + Z_{r-1}^{p+1}) / denominators, so
    rank d_r = dim Z_r^p - dim span(Z_{r+1}^p, Z_{r-1}^{p+1})."""
    prime, _ = _field_params(field)
    depth = filtration.depth
    slices = {}
    for key, s in filtration.complex.states.items():
        slices.setdefault(s.j, None)
    for j in list(slices):
        slices[j] = _SliceData(filtration.complex, filtration.levels, j)
    i_values = sorted({s.i for s in filtration.complex.states.values()})
    ranks = {}
    for j, sl in slices.items():
        for i in i_values:
            for p in range(1, depth + 1):
                z_r, basis = _cycle_space(sl, i, p, r, prime)
                if not z_r:
                    continue
                basis_index = {k: c for c, k in enumerate(basis)}
                z_next, _ = _cycle_space(sl, i, p, r + 1, prime)
                z_above, basis_a = _cycle_space(sl, i, p + 1, r - 1, prime)
                lifted = []
                for vec in z_above:
                    v = [0] * len(basis)
                    for c, coeff in enumerate(vec):
                        v[basis_index[basis_a[c]]] = coeff
                    lifted.append(v)
                rank = _span_dim(z_r, prime) - _span_dim(z_next + lifted, prime)
                if rank:
                    ranks[(p, i - p)] = ranks.get((p, i - p), 0) + rank
    return ranks


def compute_pages(filtration, field="Q", r_max=None):
    """Pages E_0, E_1, ..., up to stabilization (or r_max)."""
    prime, field_name = _field_params(field)
    depth = filtration.depth
    stop = depth + 1 if r_max is None else min(r_max, depth + 1)
    slices = {}
    for key, s in filtration.complex.states.items():
        slices.setdefault(s.j, None)
    for j in list(slices):
        slices[j] = _SliceData(filtration.complex, filtration.levels, j)

    i_values = sorted({s.i for s in filtration.complex.states.values()})
    pages = []
    for r in range(stop + 1):
        dims = {}
        for j, sl in slices.items():
            for i in i_values:
                for p in range(1, depth + 1):
                    d = page_dimension(sl, i, p, r, prime)
                    if d:
                        dims[(p, i - p)] = dims.get((p, i - p), 0) + d
        pages.append(SpectralPage(r, dims, field_name))
    return pages


def collapse_page(pages):
    """Smallest r with E_r = E_infinity (the last computed page)."""
    final = pages[-1].dims
    for page in pages:
        if page.dims == final:
            return page.r
    return pages[-1].r


def check_convergence(pages, diagram, field="Q", reduced=True):
    """E_infinity totals against brute-force field homology, per (i, j)."""
    prime, _ = _field_params(field)
    complex = differential(diagram, reduced)
    coeff = "Q" if prime is None else prime
    brute = complex.homology(coeff)
    # E_infinity dims per total degree i (the filtration is j-homogeneous,
    # so compare per-i totals of both sides)
    e_inf = pages[-1].dims_by_total_degree()
    brute_by_i = {}
    for (i, j), dim in brute.items():
        brute_by_i[i] = brute_by_i.get(i, 0) + dim
    if e_inf != {i: d for i, d in brute_by_i.items() if d}:
        raise DiagramError(
            f"E_inf totals {e_inf} disagree with homology {brute_by_i}"
        )
    return {
        "field": pages[-1].field,
        "e_infinity": e_inf,
        "homology": brute_by_i,
        "collapse_page": collapse_page(pages),
    }


def e1_tree_counts(filtration):
    """Expected E_1 dimensions: number of trees per (p, q) bigrading."""
    w = filtration.diagram.writhe if filtration.diagram.n else 0
    k = tait_graph(filtration.diagram).k_invariant()
    from .collapse import grading_map

    counts = {}
    for t in filtration.trees:
        i, _ = grading_map(t.u, t.v, w, k)
        p = filtration.tree_levels[t.index]
        counts[(p, i - p)] = counts.get((p, i - p), 0) + 1
    return counts
