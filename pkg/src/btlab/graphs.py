"""Finite simple graphs with optional vertex payloads, colors and distances.

The JSON schema (shared by the CLI commands):

    {"meta": {...},
     "vertices": [{"id": 0, "module": "1.0 0.0;0.0 1.0" | null,
                   "tau": 0 | null, "dist": 0 | null}, ...],
     "edges": [[0, 1], ...]}

Vertices are listed in index order and edges lexicographically, so dumps are
byte-stable for equal graphs.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from btlab.errors import InvalidInput


@dataclass(frozen=True)
class LabeledGraph:
    n: int
    edges: tuple  # sorted tuple of (u, v) with u < v
    payload: tuple | None = None  # per-vertex strings
    tau: tuple | None = None  # per-vertex colors
    dist: tuple | None = None  # per-vertex distance to origin
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise InvalidInput(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInput(f"edge ({u},{v}) out of range")
            if u > v or (u, v) in seen:
                raise InvalidInput(f"edge ({u},{v}) not normalized or duplicated")
            seen.add((u, v))
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def adj(self):
        return self._adj

    def degree(self, v):
        return len(self._adj[v])

    def bfs_dist(self, source):
        out = [None] * self.n
        out[source] = 0
        dq = deque([source])
        while dq:
            u = dq.popleft()
            for w in self._adj[u]:
                if out[w] is None:
                    out[w] = out[u] + 1
                    dq.append(w)
        return out

    def is_connected(self):
        if self.n == 0:
            return True
        return all(d is not None for d in self.bfs_dist(0))

    def bipartition(self):
        """Two-coloring (list of 0/1) or None if an odd cycle exists."""
        color = [None] * self.n
        for start in range(self.n):
            if color[start] is not None:
                continue
            color[start] = 0
            dq = deque([start])
            while dq:
                u = dq.popleft()
                for w in self._adj[u]:
                    if color[w] is None:
                        color[w] = 1 - color[u]
                        dq.append(w)
                    elif color[w] == color[u]:
                        return None
        return color

    def diameter(self):
        best = 0
        for v in range(self.n):
            ds = self.bfs_dist(v)
            if any(d is None for d in ds):
                raise InvalidInput("diameter of a disconnected graph")
            best = max(best, max(ds))
        return best

    def girth(self):
        """Length of a shortest cycle; None if acyclic.  Exact via BFS from
        every vertex (the meet edge on a shortest cycle through the root
        realizes its length)."""
        best = None
        for root in range(self.n):
            dist = [None] * self.n
            parent = [None] * self.n
            dist[root] = 0
            dq = deque([root])
            while dq:
                u = dq.popleft()
                for w in self._adj[u]:
                    if dist[w] is None:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        dq.append(w)
                    elif parent[u] != w and parent[w] != u:
                        cand = dist[u] + dist[w] + 1
                        if best is None or cand < best:
                            best = cand
        return best

    def has_cycle(self):
        return self.girth() is not None

    def common_neighbors(self, vertices):
        if not vertices:
            return list(range(self.n))
        out = set(self._adj[vertices[0]])
        for v in vertices[1:]:
            out &= set(self._adj[v])
        return sorted(out - set(vertices))

    def induced(self, vertices):
        """Induced subgraph; returns (graph, old->new index map)."""
        vs = sorted(set(vertices))
        index = {v: i for i, v in enumerate(vs)}
        edges = tuple(
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        )
        return (
            LabeledGraph(
                n=len(vs),
                edges=edges,
                payload=tuple(self.payload[v] for v in vs) if self.payload else None,
                tau=tuple(self.tau[v] for v in vs) if self.tau else None,
                dist=tuple(self.dist[v] for v in vs) if self.dist else None,
            ),
            index,
        )

    def is_proper_coloring(self):
        if self.tau is None:
            return False
        return all(self.tau[u] != self.tau[v] for u, v in self.edges)

    def relabel(self, perm):
        """New graph with vertex i renamed perm[i]."""
        inv = [0] * self.n
        for i, p in enumerate(perm):
            inv[p] = i
        edges = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in self.edges))
        pick = lambda seq: tuple(seq[inv[i]] for i in range(self.n)) if seq else None
        return LabeledGraph(
            self.n, edges, pick(self.payload), pick(self.tau), pick(self.dist)
        )


def cycle_graph(n):
    return LabeledGraph(n, tuple(sorted(tuple(sorted((i, (i + 1) % n))) for i in range(n))))


def path_graph(n):
    return LabeledGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def star_graph(leaves):
    return LabeledGraph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def with_colors(g, colors):
    return LabeledGraph(g.n, g.edges, g.payload, tuple(colors), g.dist, meta=g.meta)


def graph_to_dict(g):
    vertices = []
    for i in range(g.n):
        vertices.append(
            {
                "id": i,
                "module": g.payload[i] if g.payload else None,
                "tau": g.tau[i] if g.tau else None,
                "dist": g.dist[i] if g.dist else None,
            }
        )
    return {
        "meta": g.meta or {},
        "vertices": vertices,
        "edges": [list(e) for e in sorted(g.edges)],
    }


def graph_from_dict(data):
    try:
        vertices = data["vertices"]
        n = len(vertices)
        ids = [v["id"] for v in vertices]
        if ids != list(range(n)):
            raise InvalidInput("vertex ids must be 0..n-1 in order")
        edges = tuple(sorted(tuple(sorted(e)) for e in data["edges"]))
        payload = tuple(v.get("module") for v in vertices)
        tau = tuple(v.get("tau") for v in vertices)
        dist = tuple(v.get("dist") for v in vertices)
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"bad graph document: {exc}") from None
    return LabeledGraph(
        n,
        edges,
        payload if any(x is not None for x in payload) else None,
        tau if all(x is not None for x in tau) else None,
        dist if all(x is not None for x in dist) else None,
        meta=data.get("meta") or {},
    )


def dump_graph_json(g):
    return json.dumps(graph_to_dict(g), sort_keys=True, separators=(",", ":")) + "\n"


def load_graph_json(text):
    try:
        return graph_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed graph JSON: {exc}") from None


def to_dot(g):
    lines = ["graph ball {"]
    palette = [
        "lightblue", "lightcoral", "lightgreen", "gold", "plum", "orange",
        "cyan", "gray",
    ]
    for i in range(g.n):
        attrs = []
        if g.tau is not None:
            attrs.append(f'fillcolor="{palette[g.tau[i] % len(palette)]}"')
            attrs.append('style="filled"')
        if g.dist is not None:
            attrs.append(f'label="{i} (d={g.dist[i]})"')
        lines.append(f"  {i} [{', '.join(attrs)}];" if attrs else f"  {i};")
    for u, v in sorted(g.edges):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
