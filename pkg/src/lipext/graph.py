"""Graph data model with boundary data.

Vertices carry positions, edges carry positive lengths (Euclidean between
the endpoint positions unless overridden), and a nonempty boundary set
carries the values to extend.  Queries are read-only; a Graph is immutable
after construction.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryMismatch, BoundaryVertex, UnknownVertex

# A vertex function assigns an m-vector to every vertex id.
VertexFunction = dict[str, np.ndarray]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


class Graph:
    """Undirected graph with positions, edge lengths and boundary values.

    Parameters
    ----------
    vertices : mapping id -> position (sequence of floats)
    edges : iterable of (a, b) or (a, b, length); length defaults to the
        Euclidean distance between the endpoint positions
    omega : iterable of boundary vertex ids
    boundary_values : mapping id -> value (scalar or sequence), defined on
        exactly the omega set
    """

    def __init__(self, vertices, edges, omega, boundary_values):
        pos: dict[str, np.ndarray] = {}
        for vid, p in dict(vertices).items():
            pos[str(vid)] = np.atleast_1d(np.asarray(p, dtype=float))
        dims = {p.shape[0] for p in pos.values()}
        if len(dims) > 1:
            raise ValueError(f"positions have mixed dimensions {sorted(dims)}")
        lengths: dict[tuple[str, str], float] = {}
        for edge in edges:
            a, b = str(edge[0]), str(edge[1])
            if a not in pos:
                raise UnknownVertex(a)
            if b not in pos:
                raise UnknownVertex(b)
            if a == b:
                raise ValueError(f"self-loop at {a!r}")
            key = (a, b) if a < b else (b, a)
            if key in lengths:
                raise ValueError(f"duplicate edge {key}")
            if len(edge) > 2 and edge[2] is not None:
                lengths[key] = float(edge[2])
            else:
                lengths[key] = float(np.linalg.norm(pos[a] - pos[b]))
        bvals: dict[str, np.ndarray] = {}
        for vid, val in dict(boundary_values).items():
            bvals[str(vid)] = np.atleast_1d(np.asarray(val, dtype=float))
        self.positions = pos
        self.lengths = lengths
        self.omega = frozenset(str(v) for v in omega)
        self.boundary_values = bvals
        adj: dict[str, list[tuple[str, float]]] = {v: [] for v in pos}
        for (a, b), ln in lengths.items():
            adj[a].append((b, ln))
            adj[b].append((a, ln))
        for v in adj:
            adj[v].sort()
        self._adj = adj
        self.ids = sorted(pos)

    # -- basic queries ------------------------------------------------------

    def __contains__(self, vid: str) -> bool:
        return vid in self.positions

    def _require(self, vid: str) -> str:
        if vid not in self.positions:
            raise UnknownVertex(vid)
        return vid

    def interior(self) -> list[str]:
        return [v for v in self.ids if v not in self.omega]

    def neighbors(self, x: str) -> list[tuple[str, float]]:
        """Sorted (neighbor, edge length) pairs."""
        return self._adj[self._require(x)]

    def edge_length(self, a: str, b: str) -> float:
        key = (a, b) if a < b else (b, a)
        return self.lengths[key]

    def value_dim(self) -> int:
        return next(iter(self.boundary_values.values())).shape[0] if self.boundary_values else 0


def neighborhood(g: Graph, x: str) -> set[str]:
    """All vertices sharing an edge with x; never contains x itself."""
    return {y for y, _ in g.neighbors(x)}


def geodesic_distance(g: Graph, x: str, y: str) -> float:
    """Infimum of chain lengths between x and y under the edge lengths."""
    g._require(x)
    g._require(y)
    return _dijkstra(g, x, target=y).get(y, math.inf)


def geodesic_distances_from(g: Graph, x: str) -> dict[str, float]:
    """Shortest-path distance from x to every reachable vertex."""
    g._require(x)
    return _dijkstra(g, x)


def _dijkstra(g: Graph, source: str, target: str | None = None) -> dict[str, float]:
    dist = {source: 0.0}
    done: set[str] = set()
    heap = [(0.0, source)]
    while heap:
        dx, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == target:
            break
        for w, ln in g._adj[v]:
            alt = dx + ln
            if alt < dist.get(w, math.inf):
                dist[w] = alt
                heapq.heappush(heap, (alt, w))
    return dist


def as_vertex_function(values) -> VertexFunction:
    """Normalize a mapping of vertex values to 1-d float arrays."""
    return {str(k): np.atleast_1d(np.asarray(v, dtype=float)) for k, v in dict(values).items()}


def lipschitz_ratio(g: Graph, u) -> float:
    """Largest value distance to geodesic distance ratio over vertex pairs."""
    u = as_vertex_function(u)
    best = 0.0
    for x in g.ids:
        ux = u[x]
        for y, d in geodesic_distances_from(g, x).items():
            if y > x and d > 0.0:
                best = max(best, float(np.linalg.norm(ux - u[y])) / d)
    return best


def local_lipschitz(g: Graph, u, x: str) -> float:
    """Largest difference quotient of u over the neighbors of x."""
    g._require(x)
    if x in g.omega:
        raise BoundaryVertex(x)
    u = u if isinstance(u, dict) else dict(u)
    ux = np.atleast_1d(np.asarray(u[x], dtype=float))
    best = 0.0
    for y, ln in g.neighbors(x):
        uy = np.atleast_1d(np.asarray(u[y], dtype=float))
        best = max(best, float(np.linalg.norm(uy - ux)) / ln)
    return best


def is_tighter(g: Graph, v, u) -> bool:
    """Comparison of local Lipschitz profiles: True when the worst vertices
    where u is steeper dominate the worst where v is steeper (empty max = 0)."""
    v = as_vertex_function(v)
    u = as_vertex_function(u)
    for b in g.omega:
        if not np.array_equal(v[b], u[b]):
            raise BoundaryMismatch(b)
    u_worse = 0.0
    v_worse = 0.0
    for x in g.interior():
        lu = local_lipschitz(g, u, x)
        lv = local_lipschitz(g, v, x)
        if lu > lv:
            u_worse = max(u_worse, lu)
        elif lv > lu:
            v_worse = max(v_worse, lv)
    return u_worse > v_worse


def validate(g: Graph) -> list[Violation]:
    """Structural checks; an empty list means the graph is usable."""
    out: list[Violation] = []
    if not g.omega:
        out.append(Violation("EmptyBoundary", "boundary set is empty"))
    for v in g.omega:
        if v not in g.positions:
            out.append(Violation("UnknownVertex", f"boundary vertex {v!r} not in graph"))
    missing = set(g.omega) - set(g.boundary_values)
    extra = set(g.boundary_values) - set(g.omega)
    if missing:
        out.append(Violation("MissingBoundaryValue", f"no value for {sorted(missing)}"))
    if extra:
        out.append(Violation("ExtraBoundaryValue", f"values outside boundary: {sorted(extra)}"))
    dims = {v.shape[0] for v in g.boundary_values.values()}
    if len(dims) > 1:
        out.append(Violation("DimensionMismatch", f"boundary value dimensions {sorted(dims)}"))
    for (a, b), ln in sorted(g.lengths.items()):
        if not ln > 0.0:
            out.append(Violation("ZeroLengthEdge", f"edge ({a}, {b}) has length {ln}"))
    if g.ids:
        seen = {g.ids[0]}
        stack = [g.ids[0]]
        while stack:
            v = stack.pop()
            for w, _ in g._adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(g.ids):
            out.append(Violation("Disconnected", f"{len(g.ids) - len(seen)} vertices unreachable"))
    return out
