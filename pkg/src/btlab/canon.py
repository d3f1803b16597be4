"""Canonical forms and isomorphism testing for finite colored graphs.

Individualization-refinement with automorphism pruning.  Cells of the
ordered partition are kept in an order determined only by isomorphism
invariants (previous position, then neighbor-count against the splitter);
the first smallest non-singleton cell is individualized; the certificate is
the minimum adjacency encoding over the leaves.  Whenever two leaves produce
the same encoding, composing their labelings yields an automorphism;
automorphisms that fix the current prefix pointwise collapse the remaining
branch candidates into orbits, which is what makes highly symmetric inputs
(building balls) tractable.  Skipping an orbit sibling never changes the set
of leaf encodings, so the minimum is unaffected.

Certificates are byte sequences (the full adjacency bitmap of the relabeled
graph, plus colors when used): equal certificates hold iff the (colored)
graphs are isomorphic.  The publication certificate for balls is color-blind
(an isometry need not fix the center); centered_certificate refines from
dist annotations as a faster origin-fixing comparison.

Disconnected inputs are rejected; everything upstream produces connected
graphs, and canonizing a forest of pieces usually signals a caller bug.
"""

from __future__ import annotations

import hashlib
import sys
from collections import deque
from dataclasses import dataclass

from btlab.errors import BudgetExceeded, InvalidInput

DEFAULT_NODE_BUDGET = 100_000


@dataclass(frozen=True)
class CanonicalCertificate:
    encoding: bytes
    labeling: tuple  # labeling[i] = canonical position of vertex i
    cells: tuple  # stable refinement partition (unions of automorphism orbits)

    @property
    def hex(self):
        return hashlib.sha256(self.encoding).hexdigest()


def _refine(adj, partition, active=None):
    """Worklist refinement to an equitable ordered partition.

    Splits every cell by neighbor count against each pending splitter cell;
    sub-cells replace their parent in count order, so the resulting order
    depends only on isomorphism invariants.  `active` (cell positions) seeds
    the worklist; None refines from scratch.
    """
    cells = [list(c) for c in partition]
    n = len(adj)
    cell_of = [0] * n
    for idx, cell in enumerate(cells):
        for v in cell:
            cell_of[v] = idx

    if active is None:
        pending = deque(cells)
    else:
        pending = deque(cells[i] for i in active)
    in_pending = set(map(id, pending))

    while pending:
        splitter = pending.popleft()
        in_pending.discard(id(splitter))
        if not splitter or cell_of[splitter[0]] is None:
            continue  # stale handle (its cell was replaced)
        counts = {}
        for u in splitter:
            for w in adj[u]:
                counts[w] = counts.get(w, 0) + 1
        touched = {}
        for w, c in counts.items():
            touched.setdefault(cell_of[w], []).append((c, w))
        for pos in sorted(touched, reverse=True):
            cell = cells[pos]
            if len(cell) == 1:
                continue
            groups = {}
            for v in cell:
                groups.setdefault(counts.get(v, 0), []).append(v)
            if len(groups) == 1:
                continue
            parts = [sorted(groups[c]) for c in sorted(groups)]
            for v in cell:
                cell_of[v] = None
            cells[pos : pos + 1] = parts
            for i in range(pos, len(cells)):
                for v in cells[i]:
                    cell_of[v] = i
            for part in parts:
                if id(part) not in in_pending:
                    pending.append(part)
                    in_pending.add(id(part))
    return cells


def _encode(g, order, colors):
    """Adjacency bitmatrix (upper triangle) of the relabeled graph + colors."""
    n = g.n
    pos = {v: i for i, v in enumerate(order)}
    bits = bytearray((n * (n - 1) // 2 + 7) // 8)
    for u, v in g.edges:
        i, j = pos[u], pos[v]
        if i > j:
            i, j = j, i
        k = i * (2 * n - i - 1) // 2 + (j - i - 1)
        bits[k >> 3] |= 1 << (k & 7)
    head = n.to_bytes(4, "big")
    if colors is None:
        return head + bytes(bits)
    color_part = b",".join(str(colors[v]).encode() for v in order)
    return head + bytes(bits) + b"|" + color_part


def _first_target_cell(partition):
    best = None
    for idx, cell in enumerate(partition):
        if len(cell) > 1 and (best is None or len(cell) < len(partition[best])):
            best = idx
    return best


class _Backjump(Exception):
    """Unwind to the deepest common ancestor of two automorphic leaves."""

    def __init__(self, level):
        self.level = level


class _Search:
    def __init__(self, g, colors, node_budget):
        self.g = g
        self.adj = g.adj
        self.colors = colors
        self.node_budget = node_budget
        self.nodes = 0
        self.best = None  # (encoding, order)
        self.leaf_seen = {}  # sha256(encoding) -> (order, prefix)
        self.autos = []  # automorphism permutations (tuples)
        self.edge_set = set(g.edges)

    def _is_automorphism(self, gamma):
        for u, v in self.g.edges:
            a, b = gamma[u], gamma[v]
            if (a, b) not in self.edge_set and (b, a) not in self.edge_set:
                return False
        if self.colors is not None:
            return all(self.colors[v] == self.colors[gamma[v]] for v in range(self.g.n))
        return True

    def _record_leaf(self, partition, prefix):
        order = tuple(cell[0] for cell in partition)
        enc = _encode(self.g, order, self.colors)
        if self.best is None or enc < self.best[0]:
            self.best = (enc, order)
        key = hashlib.sha256(enc).digest()
        prev = self.leaf_seen.get(key)
        if prev is None:
            self.leaf_seen[key] = (order, prefix)
            return
        prev_order, prev_prefix = prev
        if prev_order == order:
            return
        gamma = [0] * self.g.n
        for a, b in zip(prev_order, order):
            gamma[a] = b
        gamma = tuple(gamma)
        if self._is_automorphism(gamma):
            self.autos.append(gamma)
            h = 0
            for a, b in zip(prev_prefix, prefix):
                if a != b:
                    break
                h += 1
            # the current branch below the divergence point maps onto an
            # explored sibling branch under gamma: abandon it
            raise _Backjump(h)

    def _prefix_fixing_gens(self, prefix):
        return [gm for gm in self.autos if all(gm[x] == x for x in prefix)]

    def _search(self, partition, prefix, seed_positions):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded(f"canonical search exceeded {self.node_budget} nodes")
        partition = _refine(self.adj, partition, active=seed_positions)
        target = _first_target_cell(partition)
        if target is None:
            self._record_leaf(partition, prefix)
            return
        depth = len(prefix)
        cell = partition[target]
        explored_union = set()
        explored = []
        autos_snapshot = -1
        for v in cell:
            if explored:
                if len(self.autos) != autos_snapshot:
                    gens = self._prefix_fixing_gens(prefix)
                    autos_snapshot = len(self.autos)
                    if gens:
                        explored_union = set()
                        for u in explored:
                            if u in explored_union:
                                continue
                            orbit = {u}
                            stack = [u]
                            while stack:
                                a = stack.pop()
                                for gamma in gens:
                                    b = gamma[a]
                                    if b not in orbit:
                                        orbit.add(b)
                                        stack.append(b)
                        explored_union |= orbit
                    else:
                        explored_union = set(explored)
                if v in explored_union:
                    explored.append(v)
                    continue
            child = (
                partition[:target]
                + [[v], [w for w in cell if w != v]]
                + partition[target + 1 :]
            )
            try:
                self._search(child, prefix + (v,), (target, target + 1))
            except _Backjump as bj:
                if bj.level < depth:
                    raise
                # bj.level == depth: v's subtree is automorphic to an
                # explored sibling's; move on to the next candidate
            explored.append(v)
            autos_snapshot = -1  # re-derive orbits with any new automorphisms

    def run(self, root_partition):
        try:
            self._search(root_partition, (), None)
        except _Backjump:
            pass  # backjump past the root: everything remaining was redundant
        return self.best


def canonical_form(g, use_colors=False, colors=None, node_budget=DEFAULT_NODE_BUDGET):
    """Canonical certificate of a connected graph.

    use_colors=True refines from g.tau (or an explicit colors sequence);
    the default is the color-blind certificate.
    """
    if not g.is_connected():
        raise InvalidInput("canonical_form expects a connected graph")
    if use_colors:
        colors = colors if colors is not None else g.tau
        if colors is None:
            raise InvalidInput("use_colors=True but the graph has no coloring")
    else:
        colors = None

    if g.n == 0:
        return CanonicalCertificate(b"", (), ())
    if colors is None:
        root = [sorted(range(g.n))]
    else:
        by_color = {}
        for v in range(g.n):
            by_color.setdefault(colors[v], []).append(v)
        root = [sorted(by_color[c]) for c in sorted(by_color)]

    root_refined = _refine(g.adj, root)
    search = _Search(g, colors, node_budget)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * g.n + 100))
    try:
        enc, order = search.run([list(c) for c in root_refined])
    finally:
        sys.setrecursionlimit(old_limit)
    labeling = [0] * g.n
    for i, v in enumerate(order):
        labeling[v] = i
    return CanonicalCertificate(
        enc, tuple(labeling), tuple(tuple(c) for c in root_refined)
    )


def centered_certificate(ball_graph, node_budget=DEFAULT_NODE_BUDGET):
    """Accelerated variant refining from the dist annotation (fixes the center)."""
    if ball_graph.dist is None:
        raise InvalidInput("centered certificate needs dist annotations")
    return canonical_form(
        ball_graph, use_colors=True, colors=ball_graph.dist, node_budget=node_budget
    )


@dataclass
class GraphIsoResult:
    isomorphic: bool
    mapping: dict | None = None
    invariant: tuple | None = None  # (name, a, b) on certified mismatch

    def __bool__(self):
        return self.isomorphic


def are_isomorphic(g, h, use_colors=False, node_budget=DEFAULT_NODE_BUDGET):
    """Explicit vertex bijection (verified edge-by-edge) or a mismatch invariant."""
    if g.n != h.n:
        return GraphIsoResult(False, None, ("vertex count", g.n, h.n))
    if len(g.edges) != len(h.edges):
        return GraphIsoResult(False, None, ("edge count", len(g.edges), len(h.edges)))
    dg = sorted(g.degree(v) for v in range(g.n))
    dh = sorted(h.degree(v) for v in range(h.n))
    if dg != dh:
        return GraphIsoResult(False, None, ("degree sequence", tuple(dg[:8]), tuple(dh[:8])))
    cg = canonical_form(g, use_colors=use_colors, node_budget=node_budget)
    ch = canonical_form(h, use_colors=use_colors, node_budget=node_budget)
    if cg.encoding != ch.encoding:
        hist_g = sorted(len(c) for c in cg.cells)
        hist_h = sorted(len(c) for c in ch.cells)
        if hist_g != hist_h:
            return GraphIsoResult(
                False, None, ("refinement histogram", tuple(hist_g[:8]), tuple(hist_h[:8]))
            )
        return GraphIsoResult(False, None, ("certificate", cg.hex[:16], ch.hex[:16]))
    inv_h = [0] * h.n
    for v, p in enumerate(ch.labeling):
        inv_h[p] = v
    mapping = {v: inv_h[cg.labeling[v]] for v in range(g.n)}
    hedges = set(h.edges)
    for u, v in g.edges:
        a, b = mapping[u], mapping[v]
        if (min(a, b), max(a, b)) not in hedges:
            raise InvalidInput("internal: certificate collision without isomorphism")
    if use_colors:
        for v in range(g.n):
            if g.tau[v] != h.tau[mapping[v]]:
                raise InvalidInput("internal: color-preservation failure")
    return GraphIsoResult(True, mapping, None)
