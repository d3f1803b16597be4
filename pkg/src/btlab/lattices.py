"""Canonical forms and enumeration for submodules of (O_R)^d over a chain ring.

Convention (one must be fixed; the skew case forces a choice): modules are
RIGHT modules, the span of rows g_1..g_k is { sum g_i c_i } with the scalars
multiplying each entry on the right.  Row operations therefore combine rows
with right-hand coefficients, which preserves the span without commutativity.
Over a commutative ring this is the usual picture.

The canonical form is a Howell-style echelon matrix: pivot columns strictly
increase, each pivot is a power pi^v of the uniformizer, entries of other
rows in a pivot column are truncated representatives mod pi^v, and for every
pivot row the shifted row (row * pi^(R-v)) lies in the span of the rows below
it (the shift rows are added during reduction, which is what makes membership
testing by reduction complete).  Equal modules produce identical matrices;
this is exercised by randomized-shuffle tests rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from btlab.errors import BudgetExceeded, InvalidInput

MATRIX_ROW_SEP = ";"
MATRIX_COL_SEP = " "


@dataclass(frozen=True, eq=False)
class SubmoduleRep:
    ring: object
    d: int
    rows: tuple  # tuple of row tuples, canonical
    pivots: tuple  # tuple of (column, valuation), aligned with rows

    def __eq__(self, other):
        return (
            isinstance(other, SubmoduleRep)
            and self.ring.key == other.ring.key
            and self.d == other.d
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.d, self.rows))

    @property
    def size_log(self):
        """log_q of the module size: sum over pivots of (R - v)."""
        return sum(self.ring.R - v for _, v in self.pivots)

    def matrix_string(self):
        ring = self.ring
        return MATRIX_ROW_SEP.join(
            MATRIX_COL_SEP.join(ring.element_string(e) for e in row) for row in self.rows
        )

    def __repr__(self):
        return f"SubmoduleRep<{self.matrix_string()}>"


def parse_matrix_string(ring, d, s):
    rows = []
    if s:
        for row in s.split(MATRIX_ROW_SEP):
            entries = tuple(ring.parse_element(e) for e in row.split(MATRIX_COL_SEP))
            if len(entries) != d:
                raise InvalidInput(f"row of length {len(entries)}, expected {d}")
            rows.append(entries)
    return canonical_span(ring, d, rows)


def _scale_row(ring, row, c):
    return tuple(ring.mul(e, c) for e in row)


def _sub_scaled(ring, row, other, c):
    return tuple(ring.sub(e, ring.mul(o, c)) for e, o in zip(row, other))


def _pi_powers(ring):
    """[1, pi, pi^2, ..., pi^R], cached on the ring object."""
    cached = getattr(ring, "_pi_power_cache", None)
    if cached is None:
        pows = [ring.one]
        pi = ring.uniformizer()
        for _ in range(ring.R):
            pows.append(ring.mul(pows[-1], pi))
        cached = ring._pi_power_cache = tuple(pows)
    return cached


def _echelon(ring, d, rows):
    """Howell-style reduction; returns (rows, pivots) sorted by pivot column."""
    R = ring.R
    zero_row = (ring.zero,) * d
    pipow = _pi_powers(ring)
    active = [tuple(r) for r in rows if tuple(r) != zero_row]
    result = []  # (col, val, row)
    for col in range(d):
        best = None
        for idx, row in enumerate(active):
            v = ring.valuation(row[col])
            if v < R and (best is None or v < best[1]):
                best = (idx, v)
        if best is None:
            continue
        idx, v = best
        row = active.pop(idx)
        u = ring.unit_part(row[col])
        row = _scale_row(ring, row, ring.inverse(u))
        remaining = []
        for other in active:
            if ring.valuation(other[col]) < R:
                c = ring.shift_down(other[col], v)
                other = _sub_scaled(ring, other, row, c)
            if other != zero_row:
                remaining.append(other)
        active = remaining
        if v > 0:
            shifted = _scale_row(ring, row, pipow[R - v])
            if shifted != zero_row:
                active.append(shifted)
        result.append((col, v, row))
    # reduce entries above each pivot to truncated representatives
    result.sort(key=lambda t: t[0])
    rows_out = [list(r) for _, _, r in result]
    for k, (colk, vk, _) in enumerate(result):
        prow = tuple(rows_out[k])
        for i in range(k):
            e = rows_out[i][colk]
            canon = ring.truncate(e, vk)
            if e != canon:
                c = ring.shift_down(ring.sub(e, canon), vk)
                rows_out[i] = list(_sub_scaled(ring, tuple(rows_out[i]), prow, c))
    rows_final = tuple(tuple(r) for r in rows_out)
    pivots = tuple((col, v) for col, v, _ in result)
    return rows_final, pivots


def canonical_span(ring, d, generators):
    """Canonical representative of the right span of the generator rows.

    Independent of generator order and of invertible recombination
    (property-tested, not assumed).
    """
    for g in generators:
        if len(g) != d:
            raise InvalidInput(f"generator of length {len(g)}, expected {d}")
    rows, pivots = _echelon(ring, d, generators)
    return SubmoduleRep(ring, d, rows, pivots)


def _reduce_against(ring, pivots, rows, vec):
    """Residual of vec after reduction against echelon rows."""
    R = ring.R
    vec = tuple(vec)
    for (col, v), row in zip(pivots, rows):
        ve = ring.valuation(vec[col])
        if ve < R:
            if ve < v:
                return vec  # cannot be cleared; leading obstruction
            c = ring.shift_down(vec[col], v)
            vec = _sub_scaled(ring, vec, row, c)
    return vec


def _reduce_vector(ring, rep, vec):
    return _reduce_against(ring, rep.pivots, rep.rows, vec)


def contains(A, B):
    """True iff the module of A contains the module of B (same ring and rank)."""
    if A.ring.key != B.ring.key or A.d != B.d:
        raise InvalidInput("contains() needs matching ring and rank")
    zero_row = (A.ring.zero,) * A.d
    return all(_reduce_vector(A.ring, A, row) == zero_row for row in B.rows)


def member(A, vec):
    return _reduce_vector(A.ring, A, vec) == (A.ring.zero,) * A.d


def scale_by_uniformizer(A):
    """Canonical form of A * pi."""
    ring = A.ring
    pi = ring.uniformizer()
    rows = [_scale_row(ring, row, pi) for row in A.rows]
    return canonical_span(ring, A.d, rows)


def module_elements(A, budget=1 << 16):
    """All elements of the module, by brute span (small oracles only)."""
    ring = A.ring
    if ring.size ** len(A.rows) > budget:
        raise BudgetExceeded("module element enumeration over budget")
    elems = ring.enumerate_elements()
    out = {(ring.zero,) * A.d}
    for row in A.rows:
        new = set()
        for base in out:
            for c in elems:
                shifted = tuple(ring.add(b, ring.mul(r, c)) for b, r in zip(base, row))
                new.add(shifted)
        out = new
    return out


def is_inside_radical(A):
    """True iff the module sits inside (pi O)^d, i.e. has no unit entry."""
    ring = A.ring
    return all(ring.valuation(e) >= 1 for row in A.rows for e in row)


def enumerate_vertex_modules(ring, d, budget=200_000, validate=False):
    """All canonical submodules of (O_R)^d not inside (pi O)^d.

    Deterministic order: pivot-column sets lexicographic, pivot valuations
    lexicographic, then free entries in digit order.  Rows are built bottom
    up so that the shift constraint (row * pi^(R-v) inside the span of the
    rows below) can be enforced during generation; duplicates are impossible
    by canonicity (optionally re-checked with validate=True).
    """
    import itertools as it

    R = ring.R
    zero_row = (ring.zero,) * d
    pipow = _pi_powers(ring)
    elements = ring.enumerate_elements()
    # truncated transversals per valuation: canonical residues mod pi^v
    transversal = [
        sorted({ring.truncate(a, v) for a in elements}, key=ring.index_of)
        for v in range(R + 1)
    ]
    out = []
    for k in range(1, d + 1):
        for J in it.combinations(range(d), k):
            for vals in it.product(range(R), repeat=k):
                piv = dict(zip(J, vals))
                pivot_rows = {}

                def build(idx, below_rows, below_pivots):
                    if idx < 0:
                        rows = tuple(pivot_rows[i] for i in range(k))
                        rep = SubmoduleRep(ring, d, rows, tuple(zip(J, vals)))
                        if is_inside_radical(rep):
                            return
                        if validate:
                            again = canonical_span(ring, d, rows)
                            if again.rows != rows:
                                raise AssertionError(
                                    f"enumeration emitted a non-canonical matrix: {rows}"
                                )
                        out.append(rep)
                        if len(out) > budget:
                            raise BudgetExceeded(
                                f"vertex module enumeration exceeded {budget}"
                            )
                        return
                    col, v = J[idx], vals[idx]
                    free_cols = list(range(col + 1, d))
                    domains = [
                        transversal[piv[c]] if c in piv else elements for c in free_cols
                    ]
                    for combo in it.product(*domains):
                        row = list(zero_row)
                        row[col] = pipow[v]
                        for c, val in zip(free_cols, combo):
                            row[c] = val
                        row = tuple(row)
                        if v > 0:
                            # Howell shift constraint: row * pi^(R-v) must lie
                            # in the span of the rows below this one
                            shifted = _scale_row(ring, row, pipow[R - v])
                            if shifted != zero_row and _reduce_against(
                                ring, below_pivots, below_rows, shifted
                            ) != zero_row:
                                continue
                        pivot_rows[idx] = row
                        build(idx - 1, [row] + below_rows, [(col, v)] + below_pivots)

                build(k - 1, [], [])
    out.sort(key=lambda rep: (len(rep.rows), rep.matrix_string()))
    return out


def invariant_factors(A):
    """Valuations (n_1 <= ... <= n_d) of a diagonal form of A inside (O_R)^d.

    Commutative rings only (two-sided pivoting for the skew case is not
    implemented; distances there fall back to BFS in the ball).
    n_1 = 0 iff the module is not inside (pi O)^d; missing rank pads with R.
    """
    ring = A.ring
    if ring.kind == "SKEW":
        raise InvalidInput("invariant_factors requires a commutative ring")
    R = ring.R
    mat = [list(row) for row in A.rows]
    factors = []
    while mat and any(ring.valuation(e) < R for row in mat for e in row):
        best = None
        for i, row in enumerate(mat):
            for j, e in enumerate(row):
                v = ring.valuation(e)
                if v < R and (best is None or v < best[2]):
                    best = (i, j, v)
        i0, j0, v = best
        mat[0], mat[i0] = mat[i0], mat[0]
        for row in mat:
            row[0], row[j0] = row[j0], row[0]
        u = ring.unit_part(mat[0][0])
        mat[0] = list(_scale_row(ring, tuple(mat[0]), ring.inverse(u)))
        for i in range(1, len(mat)):
            e = mat[i][0]
            if ring.valuation(e) < R:
                c = ring.shift_down(e, v)
                mat[i] = list(_sub_scaled(ring, tuple(mat[i]), tuple(mat[0]), c))
        # clearing the pivot row with column operations only changes row 0
        factors.append(v)
        mat = [row[1:] for row in mat[1:]]
    factors.sort()
    return tuple(factors) + (R,) * (A.d - len(factors))
