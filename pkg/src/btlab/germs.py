"""Germs of geometries, transport along edges, and global propagation.

A germ at x is a proper coloring of the closed neighborhood V(x) such that
conditions (1)(2)(3) hold for every flag through x, with residues computed
inside V(x).  When germs exist they form a single orbit under the diagram
symmetries (checked by tests, used nowhere as an assumption).

Transport across an edge (x, x') finds the unique germ at x' agreeing with
the given one on V(x) & V(x'); nonexistence (NO_EXTENSION) and ambiguity
(NOT_UNIQUE) are hard errors carrying the failing edge, never tie-broken,
because both refute the local hypothesis the whole construction rests on.

propagate() transports a seed germ over a BFS spanning tree of the scope and
then checks every non-tree edge; a mismatch yields the fundamental cycle as
a holonomy obstruction.  This is complete for the given finite graph.
short_cycle_certificate() instead checks holonomy around all closed walks of
bounded length; that criterion is only sufficient under a simple-connectivity
hypothesis the artifact does not verify, so it is reported separately.

On a radius-R ball germs exist exactly at vertices with dist <= R-1 (their
closed neighborhood is complete); pass that set as the scope.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from btlab.errors import BudgetExceeded, InvalidInput
from btlab.geometry import apply_symmetry, is_generalized_mgon


class TransportError(Exception):
    """kind is "NO_EXTENSION" or "NOT_UNIQUE"; edge is the failing pair."""

    def __init__(self, kind, edge, detail=""):
        super().__init__(f"{kind} at edge {edge} {detail}".strip())
        self.kind = kind
        self.edge = edge


class Germ:
    __slots__ = ("center", "items", "_map")

    def __init__(self, center, mapping):
        self.center = center
        self.items = tuple(sorted(mapping.items()))
        self._map = dict(mapping)

    def color_of(self, v):
        return self._map[v]

    @property
    def support(self):
        return tuple(v for v, _ in self.items)

    def compose(self, M, sigma):
        return Germ(self.center, {v: apply_symmetry(M, sigma, c) for v, c in self.items})

    def agrees_on(self, other, vertices):
        return all(self._map[v] == other._map[v] for v in vertices)

    def __eq__(self, other):
        return (
            isinstance(other, Germ)
            and self.center == other.center
            and self.items == other.items
        )

    def __hash__(self):
        return hash((self.center, self.items))

    def __repr__(self):
        return f"Germ(center={self.center}, {dict(self.items)})"


def _flags_through(g, x, neighborhood):
    """All cliques of the induced neighborhood containing x."""
    nbrs = [v for v in neighborhood if v != x and v in g.adj[x]]
    flags = []

    def extend(clique, candidates):
        flags.append(clique)
        for i, v in enumerate(candidates):
            rest = [w for w in candidates[i + 1 :] if w in g.adj[v]]
            extend(clique + (v,), rest)

    extend((x,), nbrs)
    return flags


class _NeighborhoodData:
    """Color-independent facts about V(x): flags through x and, per flag,
    residue metrics needed by the germ conditions."""

    def __init__(self, g, x, M):
        self.x = x
        self.vertices = sorted(set([x] + list(g.adj[x])))
        vset = set(self.vertices)
        self.local_adj = {
            v: [w for w in g.adj[v] if w in vset] for v in self.vertices
        }
        self.flags = _flags_through(g, x, self.vertices)
        self.flag_data = []
        ms = sorted(
            {
                M.entries[i][j]
                for i in range(M.rank)
                for j in range(M.rank)
                if i != j
            }
        )
        from btlab.graphs import LabeledGraph

        for flag in self.flags:
            fs = set(flag)
            residue = [
                v
                for v in self.vertices
                if v not in fs and all(v in self.local_adj[u] for u in flag)
            ]
            rset = {v: i for i, v in enumerate(residue)}
            redges = tuple(
                sorted(
                    (rset[u], rset[w])
                    for u in residue
                    for w in self.local_adj[u]
                    if w in rset and rset[u] < rset[w]
                )
            )
            rg = LabeledGraph(len(residue), redges)
            nonempty = rg.n > 0
            connected = nonempty and rg.is_connected()
            mgon = {}
            for m in ms:
                try:
                    mgon[m] = is_generalized_mgon(rg, m)[0]
                except InvalidInput:
                    mgon[m] = False
            self.flag_data.append((flag, nonempty, connected, mgon))


def _conditions_hold(data, M, coloring):
    rank = M.rank
    for flag, nonempty, connected, mgon in data.flag_data:
        missing = rank - len(flag)
        if missing >= 1 and not nonempty:
            return False
        if missing >= 2 and not connected:
            return False
        if missing == 2:
            used = {coloring[v] for v in flag}
            i, j = [l for l in M.labels if l not in used]
            if not mgon.get(M.m(i, j), False):
                return False
    return True


class GermContext:
    """Caches germ sets and transports for one (graph, diagram) pair."""

    def __init__(self, g, M, budget=500_000):
        self.g = g
        self.M = M
        self.budget = budget
        self._germs = {}
        self._data = {}
        self._transport = {}

    def neighborhood_data(self, x):
        if x not in self._data:
            self._data[x] = _NeighborhoodData(self.g, x, self.M)
        return self._data[x]

    def germs(self, x):
        if x in self._germs:
            return self._germs[x]
        data = self.neighborhood_data(x)
        vs = data.vertices
        colors = list(self.M.labels)
        coloring = {}
        out = []
        nodes = 0

        def assign(idx):
            nonlocal nodes
            nodes += 1
            if nodes > self.budget:
                raise BudgetExceeded(f"germ enumeration at {x} exceeded {self.budget} nodes")
            if idx == len(vs):
                if _conditions_hold(data, self.M, coloring):
                    out.append(Germ(x, dict(coloring)))
                return
            v = vs[idx]
            for c in colors:
                if any(coloring.get(w) == c for w in data.local_adj[v]):
                    continue
                coloring[v] = c
                assign(idx + 1)
                del coloring[v]

        assign(0)
        self._germs[x] = out
        return out

    def transport(self, x, x2, germ):
        key = (x, x2, germ)
        if key in self._transport:
            return self._transport[key]
        if x2 not in self.g.adj[x]:
            raise InvalidInput(f"transport needs adjacent vertices, got ({x}, {x2})")
        overlap = sorted(
            ({x, x2} | (set(self.g.adj[x]) & set(self.g.adj[x2])))
        )
        matches = [
            h for h in self.germs(x2) if all(h.color_of(v) == germ.color_of(v) for v in overlap)
        ]
        if not matches:
            raise TransportError("NO_EXTENSION", (x, x2))
        if len(matches) > 1:
            raise TransportError("NOT_UNIQUE", (x, x2), f"{len(matches)} extensions")
        self._transport[key] = matches[0]
        return matches[0]


def germs_at(g, x, M, budget=500_000):
    """All germs at x, in lexicographic (vertex, color) order."""
    return GermContext(g, M, budget).germs(x)


def transport(g, M, x, x2, germ):
    """The unique germ at x2 agreeing with germ on V(x) & V(x2)."""
    return GermContext(g, M).transport(x, x2, germ)


@dataclass
class Labelling:
    colors: dict  # vertex -> color, on the scope
    basepoint: int
    scope: tuple


@dataclass
class Obstruction:
    edge: tuple  # the non-tree edge whose transport disagrees
    cycle: list  # closed walk (first == last) exhibiting the holonomy


def propagate(g, M, basepoint, seed, scope=None, context=None):
    """Spread the seed germ over a spanning tree, then check every other edge.

    Returns a Labelling on success and an Obstruction when some fundamental
    cycle has nontrivial holonomy.  Transport failures (NO_EXTENSION /
    NOT_UNIQUE) propagate as TransportError with the failing edge.
    """
    ctx = context or GermContext(g, M)
    scope_set = set(range(g.n)) if scope is None else set(scope)
    if basepoint not in scope_set:
        raise InvalidInput("basepoint outside scope")
    if seed not in ctx.germs(basepoint):
        raise InvalidInput("seed is not a germ at the basepoint")

    stored = {basepoint: seed}
    parent = {basepoint: None}
    order = [basepoint]
    dq = deque([basepoint])
    while dq:
        u = dq.popleft()
        for w in g.adj[u]:
            if w in scope_set and w not in stored:
                stored[w] = ctx.transport(u, w, stored[u])
                parent[w] = u
                order.append(w)
                dq.append(w)
    if set(stored) != scope_set:
        raise InvalidInput("scope is not connected")

    def path_to_root(v):
        out = [v]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out

    for u, v in g.edges:
        if u not in scope_set or v not in scope_set:
            continue
        if parent.get(v) == u or parent.get(u) == v:
            continue
        if ctx.transport(u, v, stored[u]) != stored[v]:
            cycle = list(reversed(path_to_root(u))) + path_to_root(v)
            return Obstruction((u, v), cycle)

    colors = {v: stored[v].color_of(v) for v in scope_set}
    for v in scope_set:
        for w in stored[v].support:
            if w in colors and colors[w] != stored[v].color_of(w):
                raise InvalidInput(
                    f"propagated germs disagree at {w}; graph is not locally consistent"
                )
    return Labelling(colors, basepoint, tuple(sorted(scope_set)))


@dataclass
class WalkFailure:
    walk: tuple
    germ: "Germ"
    kind: str  # "holonomy" or a TransportError kind


@dataclass
class CertificateReport:
    max_length: int
    classes_checked: int
    walks_checked: int
    failures: list

    @property
    def ok(self):
        return not self.failures


def short_cycle_certificate(g, M, k=3, scope=None, context=None):
    """Check trivial holonomy around every closed walk of length <= k.

    Walk classes are deduplicated up to rotation and reflection.  A pass is
    only a sufficient certificate under a simple-connectivity hypothesis on
    the ambient graph; propagate() is the complete check for finite inputs.
    """
    ctx = context or GermContext(g, M)
    scope_set = set(range(g.n)) if scope is None else set(scope)
    classes = {}
    for v0 in sorted(scope_set):
        stack = [(v0,)]
        while stack:
            walk = stack.pop()
            last = walk[-1]
            if len(walk) > 1 and last == v0 and len(walk) >= 3:
                seq = walk[:-1]
                variants = []
                for s in (seq, tuple(reversed(seq))):
                    for i in range(len(s)):
                        variants.append(s[i:] + s[:i])
                key = min(variants)
                classes.setdefault(key, walk)
            if len(walk) - 1 < k:
                for w in g.adj[last]:
                    if w in scope_set:
                        if len(walk) < k or w == v0:
                            stack.append(walk + (w,))
    failures = []
    walks = 0
    for key in sorted(classes):
        walk = classes[key]
        base = walk[0]
        for germ in ctx.germs(base):
            walks += 1
            cur = germ
            try:
                for a, b in zip(walk, walk[1:]):
                    cur = ctx.transport(a, b, cur)
            except TransportError as exc:
                failures.append(WalkFailure(walk, germ, exc.kind))
                continue
            if cur != germ:
                failures.append(WalkFailure(walk, germ, "holonomy"))
    return CertificateReport(k, len(classes), walks, failures)
