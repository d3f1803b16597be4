"""The radius-R ball of the rank-d affine building over a chain ring O_R.

Vertices are the canonical submodules of (O_R)^d not inside (pi O_R)^d; the
origin is the full module.  Two distinct vertices are adjacent iff
pi*U <= V <= U or pi*V <= U <= V.  The ball radius is implicit: it equals
the nilpotency index R of the ring (callers wanting a smaller ball truncate
by the dist annotation).

For commutative rings each vertex carries
  dist = largest invariant factor (cross-checked against BFS, not assumed),
  tau  = (- sum of invariant factors) mod d, so tau(origin) = 0.
Skew rings get BFS distances and no type labels (germ propagation can label
them afterwards).
"""

from __future__ import annotations

from dataclasses import dataclass

from btlab.errors import BudgetExceeded, InternalCheckFailed, InvalidInput
from btlab.graphs import LabeledGraph
from btlab.lattices import (
    SubmoduleRep,
    canonical_span,
    contains,
    enumerate_vertex_modules,
    invariant_factors,
    scale_by_uniformizer,
)


@dataclass
class Ball:
    graph: LabeledGraph
    modules: list
    ring: object
    d: int

    @property
    def R(self):
        return self.ring.R

    def origin(self):
        return self.graph.dist.index(0)


def type_label(rep, d):
    """(- sum n_i) mod d; the origin gets 0."""
    return (-sum(invariant_factors(rep))) % d


def distance_origin(rep):
    """Largest invariant factor = graph distance to the origin (commutative)."""
    return max(invariant_factors(rep))


def gaussian_binomial(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def degree_closed_form(q, d):
    """(enumerative degree, footnote product).

    The degree of the building is the number of subspaces of F_q^d of
    dimension not 0 or d: sum_k binom[d,k]_q.  The second value is the
    product form Prod_{i=1..d} (q^i - 1)/(q - 1), reported alongside because
    the two disagree for d >= 3 (e.g. q=2, d=3: 14 vs 21); the enumeration
    is authoritative.
    """
    degree = sum(gaussian_binomial(d, k, q) for k in range(1, d))
    product = 1
    for i in range(1, d + 1):
        assert (q**i - 1) % (q - 1) == 0
        product *= (q**i - 1) // (q - 1)
    return degree, product


def build_ball(ring, d, budget_vertices=200_000):
    """Assemble the ball as a typed graph.  Deterministic vertex order."""
    if d < 2:
        raise InvalidInput(f"building rank d must be >= 2, got {d}")
    modules = enumerate_vertex_modules(ring, d, budget=budget_vertices)
    n = len(modules)
    index = {rep: i for i, rep in enumerate(modules)}
    origin = canonical_span(
        ring,
        d,
        [
            tuple(ring.one if j == i else ring.zero for j in range(d))
            for i in range(d)
        ],
    )
    origin_idx = index[origin]

    scaled = [scale_by_uniformizer(rep) for rep in modules]
    sizes = [rep.size_log for rep in modules]
    scaled_sizes = [rep.size_log for rep in scaled]

    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            # orientation pi*U <= V <= U needs |pi U| <= |V| <= |U|
            if scaled_sizes[i] <= sizes[j] <= sizes[i]:
                if contains(modules[i], modules[j]) and contains(modules[j], scaled[i]):
                    edges.append((i, j))
                    continue
            if scaled_sizes[j] <= sizes[i] <= sizes[j]:
                if contains(modules[j], modules[i]) and contains(modules[i], scaled[j]):
                    edges.append((i, j))
    edges = tuple(sorted(edges))

    payload = tuple(rep.matrix_string() for rep in modules)
    if ring.kind == "SKEW":
        tau = None
        dist = None
    else:
        tau = tuple(type_label(rep, d) for rep in modules)
        dist = tuple(distance_origin(rep) for rep in modules)

    graph = LabeledGraph(
        n,
        edges,
        payload=payload,
        tau=tau,
        dist=dist,
        meta={
            "descriptor": ring.descriptor.to_dict() if ring.descriptor else None,
            "R": ring.R,
            "d": d,
            "kind": "ball",
        },
    )
    bfs = graph.bfs_dist(origin_idx)
    if any(x is None for x in bfs):
        raise InternalCheckFailed("ball graph is not connected")
    if dist is not None:
        if tuple(bfs) != dist:
            raise InternalCheckFailed(
                "invariant-factor distance disagrees with BFS distance"
            )
    else:
        graph = LabeledGraph(
            n, edges, payload=payload, tau=None, dist=tuple(bfs), meta=graph.meta
        )
    return Ball(graph, modules, ring, d)


def sub_ball(ball, radius):
    """Induced subgraph on dist <= radius, vertices reindexed."""
    keep = [i for i in range(ball.graph.n) if ball.graph.dist[i] <= radius]
    sub, _ = ball.graph.induced(keep)
    meta = dict(ball.graph.meta or {})
    meta["truncated_to"] = radius
    return LabeledGraph(sub.n, sub.edges, sub.payload, sub.tau, sub.dist, meta=meta)


def tree_vertex_count(q, R):
    """1 + (q+1) (q^R - 1)/(q - 1): rank-2 balls are trees of degree q+1."""
    return 1 + (q + 1) * (q**R - 1) // (q - 1)


def edge_increment_consistent(ball):
    """Check along every edge that the type labels change by the dimension
    (mod d) of the image of the smaller module in L/piL of the larger,
    computed through module sizes.  Returns the list of violations."""
    g = ball.graph
    if g.tau is None:
        return []
    d = ball.d
    q = ball.ring.q_residue
    sizes = {i: rep.size_log for i, rep in enumerate(ball.modules)}
    scaled = {i: scale_by_uniformizer(rep) for i, rep in enumerate(ball.modules)}
    bad = []
    for u, v in g.edges:
        for x, y in ((u, v), (v, u)):
            # orientation pi L(x) <= L(y) <= L(x)
            if contains(ball.modules[x], ball.modules[y]) and contains(
                ball.modules[y], scaled[x]
            ):
                image_dim = d - (sizes[x] - sizes[y])
                if (g.tau[y] - g.tau[x]) % d != image_dim % d:
                    bad.append((x, y))
                break
        else:
            bad.append((u, v, "no orientation"))
    return bad
