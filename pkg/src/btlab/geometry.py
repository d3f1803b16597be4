"""Coxeter diagrams, flags, residues, and the geometry axioms.

A geometry over a label set I is a LabeledGraph with a total proper coloring
tau into I.  A flag is a clique; its residue is the induced colored graph on
the common neighbors.  A geometry has type M (a Coxeter diagram) when the
residue of every flag of type J is

  (1) nonempty   if |I \\ J| >= 1,
  (2) connected  if |I \\ J| >= 2,
  (3) a generalized M(i,j)-gon if I \\ J = {i, j},

where a generalized m-gon is a connected bipartite graph of diameter m and
girth 2m with minimum degree 2.

On a radius-R building ball the axioms can only be checked away from the
boundary: a flag whose vertices lie within distance R-2 of the origin has
its full residue inside the ball (the "interior" scope).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from btlab.errors import InvalidInput
from btlab.fields import INFINITY
from btlab.graphs import LabeledGraph


@dataclass(frozen=True)
class CoxeterDiagram:
    labels: tuple
    entries: tuple  # tuple of tuples, symmetric, 1 on the diagonal

    def __post_init__(self):
        k = len(self.labels)
        if len(self.entries) != k or any(len(row) != k for row in self.entries):
            raise InvalidInput("diagram matrix shape mismatch")
        for i in range(k):
            if self.entries[i][i] != 1:
                raise InvalidInput("diagram must have 1 on the diagonal")
            for j in range(k):
                if i != j:
                    mij = self.entries[i][j]
                    if mij != self.entries[j][i]:
                        raise InvalidInput("diagram must be symmetric")
                    if mij != INFINITY and (not isinstance(mij, int) or mij < 2):
                        raise InvalidInput("off-diagonal entries must be >= 2 or inf")

    def m(self, i, j):
        return self.entries[self.labels.index(i)][self.labels.index(j)]

    @property
    def rank(self):
        return len(self.labels)


def atilde_diagram(d):
    """The affine type-A diagram over Z/dZ: 3 between cyclic neighbors, else 2.

    d = 2 is refused: the two defining conditions collide there and the
    rank-1 affine diagram would need an infinite entry.
    """
    if not isinstance(d, int) or d < 3:
        raise InvalidInput(f"atilde_diagram needs d >= 3, got {d}")
    labels = tuple(range(d))
    entries = tuple(
        tuple(
            1 if i == j else (3 if (i - j) % d in (1, d - 1) else 2)
            for j in range(d)
        )
        for i in range(d)
    )
    return CoxeterDiagram(labels, entries)


def rank2_diagram(m):
    return CoxeterDiagram((0, 1), ((1, m), (m, 1)))


def diagram_symmetries(M):
    """All permutations of the labels preserving the matrix (a group)."""
    if M.rank > 8:
        raise InvalidInput("diagram symmetry search limited to rank <= 8")
    k = M.rank
    out = []
    for perm in itertools.permutations(range(k)):
        if all(
            M.entries[i][j] == M.entries[perm[i]][perm[j]]
            for i in range(k)
            for j in range(k)
        ):
            out.append(tuple(M.labels[perm[M.labels.index(l)]] for l in M.labels))
    return out


def apply_symmetry(M, sigma, color):
    """Image of a color under a symmetry given as a tuple over M.labels."""
    return sigma[M.labels.index(color)]


def is_generalized_mgon(g, m):
    """(ok, reason) for the generalized m-gon test; m >= 2."""
    if m == INFINITY:
        raise InvalidInput("no generalized infinity-gon test")
    if g.n == 0:
        return False, "empty graph"
    if any(g.degree(v) < 2 for v in range(g.n)):
        return False, "minimum degree < 2"
    if not g.is_connected():
        return False, "not connected"
    if g.bipartition() is None:
        return False, "not bipartite"
    diam = g.diameter()
    if diam != m:
        return False, f"diameter {diam} != {m}"
    girth = g.girth()
    if girth != 2 * m:
        return False, f"girth {girth} != {2 * m}"
    return True, None


def _check_total_coloring(g, M):
    if g.tau is None:
        raise InvalidInput("geometry requires a total coloring (tau)")
    bad = [v for v in range(g.n) if g.tau[v] not in M.labels]
    if bad:
        raise InvalidInput(f"colors outside the diagram labels at vertices {bad[:5]}")


def residue_of_flag(g, flag):
    """Induced colored graph on the common neighbors of the flag.

    The empty flag returns the geometry itself (with identity map).
    """
    flag = tuple(sorted(flag))
    for a, b in itertools.combinations(flag, 2):
        if b not in g.adj[a]:
            raise InvalidInput(f"not a flag: {a} and {b} are not adjacent")
    if not flag:
        return g, {v: v for v in range(g.n)}
    vs = g.common_neighbors(flag)
    sub, index = g.induced(vs)
    return sub, index


def enumerate_flags(g, scope=None):
    """All cliques (including the empty one) with vertices inside scope,
    in lexicographic vertex order."""
    if scope is None:
        verts = list(range(g.n))
    else:
        verts = sorted(scope)
    inside = set(verts)
    flags = [()]

    def extend(clique, candidates):
        for i, v in enumerate(candidates):
            new = clique + (v,)
            flags.append(new)
            nbrs = [w for w in candidates[i + 1 :] if w in g.adj[v]]
            extend(new, nbrs)

    extend((), verts)
    return flags


@dataclass
class Violation:
    flag: tuple
    condition: int
    detail: str


@dataclass
class GeometryReport:
    violations: list
    flags_checked: int

    @property
    def ok(self):
        return not self.violations


def verify_geometry(g, M, scope=None):
    """Check conditions (1)(2)(3) on the residue of every flag inside scope.

    scope is a vertex collection (or None for all vertices); residues are
    always computed in the full graph.  Violations are data, not errors.
    """
    _check_total_coloring(g, M)
    violations = []
    for u, v in g.edges:
        if g.tau[u] == g.tau[v]:
            violations.append(Violation((u, v), 0, "adjacent vertices share a color"))
    if violations:
        return GeometryReport(violations, 0)

    label_set = set(M.labels)
    flags = enumerate_flags(g, scope)
    for flag in flags:
        J = {g.tau[v] for v in flag}
        rest = sorted(label_set - J, key=M.labels.index)
        if len(rest) == 0:
            continue
        residue, _ = residue_of_flag(g, flag)
        if residue.n == 0:
            violations.append(Violation(flag, 1, "empty residue"))
            continue
        if len(rest) >= 2 and not residue.is_connected():
            violations.append(Violation(flag, 2, "disconnected residue"))
            continue
        if len(rest) == 2:
            m = M.m(rest[0], rest[1])
            ok, reason = is_generalized_mgon(residue, m)
            if not ok:
                violations.append(
                    Violation(flag, 3, f"residue is not a generalized {m}-gon: {reason}")
                )
    return GeometryReport(violations, len(flags))


def interior_scope(g, margin=2):
    """Vertices within dist <= R - margin of the origin of a ball graph."""
    if g.dist is None:
        raise InvalidInput("interior scope needs dist annotations")
    R = max(g.dist)
    return [v for v in range(g.n) if g.dist[v] <= R - margin]


def fano_incidence_graph():
    """Point-line incidence graph of the projective plane over F_2.

    Built independently of the building machinery: points are the nonzero
    vectors of F_2^3, lines the nonzero functionals, incidence is vanishing.
    """
    points = [v for v in itertools.product((0, 1), repeat=3) if any(v)]
    edges = []
    for i, pt in enumerate(points):
        for j, fn in enumerate(points):
            if sum(a * b for a, b in zip(pt, fn)) % 2 == 0:
                edges.append((i, 7 + j))
    g = LabeledGraph(14, tuple(sorted(edges)), tau=tuple([1] * 7 + [2] * 7))
    return g
