"""Exact arithmetic substrate: integer Laurent polynomials, sparse integer
matrices, Smith normal form, and ranks/nullspaces over Q and F_p.

Everything here is exact; no floating point anywhere.  Coefficient growth in
the Smith reduction is handled by Python's big integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class LaurentPolynomial:
    """Laurent polynomial with integer coefficients in a single variable.

    Stored as a map exponent -> coefficient with no zero coefficients.
    """

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs=None, var="A"):
        self.var = var
        self.coeffs = {int(e): int(c) for e, c in (coeffs or {}).items() if c}

    @classmethod
    def zero(cls, var="A"):
        return cls({}, var)

    @classmethod
    def one(cls, var="A"):
        return cls({0: 1}, var)

    @classmethod
    def monomial(cls, coeff, exponent, var="A"):
        return cls({exponent: coeff}, var)

    def is_zero(self):
        return not self.coeffs

    def _check_var(self, other):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def __add__(self, other):
        self._check_var(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out, self.var)

    def __sub__(self, other):
        self._check_var(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) - c
        return LaurentPolynomial(out, self.var)

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.coeffs.items()}, self.var)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPolynomial(
                {e: c * other for e, c in self.coeffs.items()}, self.var
            )
        self._check_var(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial(out, self.var)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var, tuple(sorted(self.coeffs.items()))))

    def coefficient(self, e):
        return self.coeffs.get(e, 0)

    def exponents(self):
        return sorted(self.coeffs)

    def min_exponent(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no exponents")
        return min(self.coeffs)

    def max_exponent(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no exponents")
        return max(self.coeffs)

    def reindex(self, factor, var=None):
        """Substitute var -> newvar**factor, i.e. multiply every exponent."""
        return LaurentPolynomial(
            {e * factor: c for e, c in self.coeffs.items()}, var or self.var
        )

    def evaluate(self, x):
        """Evaluate at a nonzero rational point, exactly."""
        x = Fraction(x)
        if x == 0:
            raise ValueError("cannot evaluate a Laurent polynomial at 0")
        return sum((Fraction(c) * x**e for e, c in self.coeffs.items()), Fraction(0))

    def l1_norm(self):
        return sum(abs(c) for c in self.coeffs.values())

    def __str__(self):
        """Canonical ascending-exponent form, e.g. ``A^-8+1-A^4``."""
        if not self.coeffs:
            return "0"
        parts = []
        for e in self.exponents():
            c = self.coeffs[e]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                head = self.var if mag == 1 else f"{mag}*{self.var}"
                body = f"{head}^{e}" if e != 1 else head
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(sign + body)
        return "".join(parts)

    def __repr__(self):
        return f"LaurentPolynomial({self})"


class IntegerMatrix:
    """Sparse integer matrix with optional row/column labels."""

    __slots__ = ("nrows", "ncols", "entries", "row_labels", "col_labels")

    def __init__(self, nrows, ncols, entries=None, row_labels=None, col_labels=None):
        if row_labels is not None and len(set(row_labels)) != nrows:
            raise ValueError("row labels must be unique and match nrows")
        if col_labels is not None and len(set(col_labels)) != ncols:
            raise ValueError("col labels must be unique and match ncols")
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        self.row_labels = list(row_labels) if row_labels is not None else None
        self.col_labels = list(col_labels) if col_labels is not None else None
        for (i, j), v in (entries or {}).items():
            if v:
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise ValueError(f"entry ({i},{j}) out of bounds")
                self.entries[(i, j)] = int(v)

    @classmethod
    def from_rows(cls, rows, row_labels=None, col_labels=None):
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(nrows, ncols, entries, row_labels, col_labels)

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def to_rows(self):
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def get(self, i, j):
        return self.entries.get((i, j), 0)

    def transpose(self):
        return IntegerMatrix(
            self.ncols,
            self.nrows,
            {(j, i): v for (i, j), v in self.entries.items()},
            self.col_labels,
            self.row_labels,
        )

    def __mul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        by_row = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(i, []).append((k, v))
        by_col = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(k, []).append((j, v))
        out = {}
        for i, row in by_row.items():
            for k, v in row:
                for j, w in by_col.get(k, ()):
                    key = (i, j)
                    out[key] = out.get(key, 0) + v * w
        return IntegerMatrix(self.nrows, other.ncols, out, self.row_labels, other.col_labels)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"IntegerMatrix({self.nrows}x{self.ncols}, {len(self.entries)} nonzero)"


class SmithForm:
    """Invariant factors d_1 | d_2 | ... | d_r of an integer matrix."""

    __slots__ = ("factors", "nrows", "ncols", "left", "right")

    def __init__(self, factors, nrows, ncols, left=None, right=None):
        self.factors = list(factors)
        self.nrows = nrows
        self.ncols = ncols
        self.left = left
        self.right = right
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a != 0:
                raise ValueError(f"divisibility chain violated: {a} does not divide {b}")
        if len(self.factors) > min(nrows, ncols):
            raise ValueError("rank exceeds matrix dimensions")

    @property
    def rank(self):
        return len(self.factors)

    def torsion(self):
        """Invariant factors exceeding 1."""
        return [d for d in self.factors if d > 1]


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(matrix, certificate=False):
    """Smith normal form of an integer matrix.

    Pivots are chosen with minimal absolute value to limit entry growth.
    With ``certificate=True`` the unimodular transforms U, V with
    U*M*V = diag(d_i) are returned on the SmithForm and verified.
    """
    if isinstance(matrix, IntegerMatrix):
        nrows, ncols = matrix.nrows, matrix.ncols
        m = matrix.to_rows()
    else:
        m = [list(map(int, row)) for row in matrix]
        nrows = len(m)
        ncols = len(m[0]) if m else 0

    left = [[int(i == j) for j in range(nrows)] for i in range(nrows)] if certificate else None
    right = [[int(i == j) for j in range(ncols)] for i in range(ncols)] if certificate else None

    def row_op(dst, src, q):
        # row[dst] -= q * row[src]
        for j in range(ncols):
            m[dst][j] -= q * m[src][j]
        if certificate:
            for j in range(nrows):
                left[dst][j] -= q * left[src][j]

    def col_op(dst, src, q):
        for i in range(nrows):
            m[i][dst] -= q * m[i][src]
        if certificate:
            for i in range(ncols):
                right[i][dst] -= q * right[i][src]

    t = 0
    size = min(nrows, ncols)
    while t < size:
        # locate smallest-magnitude nonzero pivot in the remaining block
        pivot = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                v = m[i][j]
                if v and (pivot is None or abs(v) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            _swap_rows(m, t, pi)
            if certificate:
                _swap_rows(left, t, pi)
        if pj != t:
            _swap_cols(m, t, pj)
            if certificate:
                _swap_cols(right, t, pj)
        clean = True
        for i in range(t + 1, nrows):
            if m[i][t]:
                q = m[i][t] // m[t][t]
                row_op(i, t, q)
                if m[i][t]:
                    clean = False
        for j in range(t + 1, ncols):
            if m[t][j]:
                q = m[t][j] // m[t][t]
                col_op(j, t, q)
                if m[t][j]:
                    clean = False
        if not clean:
            continue  # remainders left; re-pick a smaller pivot
        # enforce divisibility of the rest of the block by the pivot
        offender = None
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if m[i][j] % m[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)  # add offender row to pivot row
            continue
        if m[t][t] < 0:
            for j in range(ncols):
                m[t][j] = -m[t][j]
            if certificate:
                for j in range(nrows):
                    left[t][j] = -left[t][j]
        t += 1

    factors = [m[i][i] for i in range(min(nrows, ncols)) if m[i][i]]
    form = SmithForm(
        factors,
        nrows,
        ncols,
        IntegerMatrix.from_rows(left) if certificate else None,
        IntegerMatrix.from_rows(right) if certificate else None,
    )
    if certificate:
        _verify_certificate(matrix if isinstance(matrix, IntegerMatrix) else IntegerMatrix.from_rows(
            [list(map(int, row)) for row in matrix]), form)
    return form


def _verify_certificate(matrix, form):
    prod = form.left * matrix * form.right
    diag = {(i, i): d for i, d in enumerate(form.factors)}
    if prod.entries != diag:
        raise AssertionError("Smith certificate U*M*V != diag(d_i)")
    for tr in (form.left, form.right):
        if bareiss_determinant(tr.to_rows()) not in (1, -1):
            raise AssertionError("transform is not unimodular")


def bareiss_determinant(rows):
    """Exact integer determinant by fraction-free Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    m = [list(map(int, r)) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _field_rows(matrix, p):
    if isinstance(matrix, IntegerMatrix):
        rows = matrix.to_rows()
    else:
        rows = [list(r) for r in matrix]
    if p is None:
        return [[int(v) for v in row] for row in rows]
    return [[v % p for v in row] for row in rows]


def _gcd_reduce(row):
    g = 0
    for v in row:
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return [v // g for v in row]
    return row


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def rank_over_field(matrix, p=None):
    """Matrix rank by exact elimination: fraction-free over Q (p=None),
    modular over F_p."""
    if p is not None and not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    rows = _field_rows(matrix, p)
    if not rows or not rows[0]:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    nrows = len(rows)
    while rank < nrows and col < ncols:
        piv = next((i for i in range(rank, nrows) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pivot = rows[rank][col]
        if p is None:
            for i in range(rank + 1, nrows):
                f = rows[i][col]
                if f:
                    rows[i] = _gcd_reduce(
                        [pivot * a - f * b for a, b in zip(rows[i], rows[rank])]
                    )
        else:
            inv = pow(pivot, p - 2, p)
            rows[rank] = [v * inv % p for v in rows[rank]]
            for i in range(rank + 1, nrows):
                f = rows[i][col]
                if f:
                    rows[i] = [
                        (a - f * b) % p for a, b in zip(rows[i], rows[rank])
                    ]
        rank += 1
        col += 1
    return rank


def nullspace_over_field(matrix, p=None):
    """Spanning set of the right kernel over Q (p=None) or F_p.

    Over Q the vectors are integral (denominators cleared); any spanning
    set is as good as a basis for the rank computations built on top.
    """
    if p is not None and not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    rows = _field_rows(matrix, p)
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    if ncols == 0:
        return []
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pivot = rows[rank][col]
        if p is None:
            for i in range(nrows):
                if i != rank and rows[i][col]:
                    f = rows[i][col]
                    rows[i] = _gcd_reduce(
                        [pivot * a - f * b for a, b in zip(rows[i], rows[rank])]
                    )
        else:
            inv = pow(pivot, p - 2, p)
            rows[rank] = [v * inv % p for v in rows[rank]]
            for i in range(nrows):
                if i != rank and rows[i][col]:
                    f = rows[i][col]
                    rows[i] = [
                        (a - f * b) % p for a, b in zip(rows[i], rows[rank])
                    ]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        if p is None:
            scale = 1
            for r, pc in enumerate(pivots):
                piv = rows[r][pc]
                scale = scale * piv // gcd(scale, piv)
            vec = [0] * ncols
            vec[fc] = scale
            for r, pc in enumerate(pivots):
                vec[pc] = -rows[r][fc] * (scale // rows[r][pc])
            basis.append(_gcd_reduce(vec))
        else:
            vec = [0] * ncols
            vec[fc] = 1
            for r, pc in enumerate(pivots):
                vec[pc] = (-rows[r][fc]) % p
            basis.append(vec)
    return basis


def homology_groups(boundary_in, boundary_out):
    """Homology at the middle of  C_in --d_in--> C --d_out--> C_next.

    ``boundary_in`` maps into the chain group (its columns are incoming
    generators), ``boundary_out`` maps out of it.  Returns (free_rank,
    torsion) where torsion lists the invariant factors of d_in above 1.
    """
    if boundary_in.nrows != boundary_out.ncols:
        raise ValueError("chain group dimension mismatch")
    comp = boundary_out * boundary_in
    if not comp.is_zero():
        raise ValueError("boundary_out o boundary_in != 0: not a chain complex")
    dim = boundary_out.ncols
    rank_out = rank_over_field(boundary_out) if boundary_out.entries else 0
    snf_in = smith_normal_form(boundary_in) if boundary_in.entries else SmithForm(
        [], boundary_in.nrows, boundary_in.ncols
    )
    free_rank = dim - rank_out - snf_in.rank
    if free_rank < 0:
        raise ValueError("negative free rank: inconsistent boundaries")
    return free_rank, snf_in.torsion()
