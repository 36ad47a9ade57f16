"""Exact scalar extension by the connecting-path construction.

Starting from the boundary, the solver repeatedly finds the steepest
connecting path between two labeled vertices (through unlabeled interior
vertices and unused edges, single-edge paths allowed), interpolates
linearly along it, and finally floods any remaining dead-end components
with the value of their unique labeled attachment.  A Gauss-Seidel sweep
solver over the same local replacement is provided as an independent
cross-check, and a verifier re-derives the defining equation, the maximum
principle and the geodesic ratio bound for any candidate solution.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidPath,
    MethodUnavailable,
    MultipleAttachments,
    NotConverged,
    ValidationError,
)
from .graph import Graph, VertexFunction, geodesic_distances_from, validate
from .kpoint import pairwise_optimum

log = logging.getLogger("lipext.scalar")


@dataclass
class SubgraphState:
    """Growing labeled subgraph: values, consumed edges, slope log."""

    labeled: dict[str, float]
    used_edges: set[tuple[str, str]] = field(default_factory=set)
    stage_slopes: list[float] = field(default_factory=list)

    def copy(self) -> "SubgraphState":
        return SubgraphState(dict(self.labeled), set(self.used_edges), list(self.stage_slopes))


@dataclass(frozen=True)
class ConnectingPath:
    """Path between labeled endpoints, oriented so the value rises.

    vertices[0] and vertices[-1] are labeled, interior vertices are not;
    lengths[i] is the edge length between vertices[i] and vertices[i+1].
    """

    vertices: tuple[str, ...]
    lengths: tuple[float, ...]
    slope: float

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(_edge_key(a, b) for a, b in zip(self.vertices, self.vertices[1:]))

    @property
    def total_length(self) -> float:
        return sum(self.lengths)


@dataclass(frozen=True)
class VerifyReport:
    """Checks of a candidate extension, each with a witness on failure."""

    residual: float
    residual_ok: bool
    residual_witness: str | None
    max_principle_ok: bool | None
    max_principle_witness: str | None
    interior_ratio: float
    boundary_ratio: float
    geodesic_ok: bool
    geodesic_witness: tuple[str, str] | None
    hull_ok: bool | None = None
    hull_witness: str | None = None
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return (
            self.residual_ok
            and self.max_principle_ok is not False
            and self.geodesic_ok
            and self.hull_ok is not False
        )


@dataclass(frozen=True)
class ExtensionResult:
    """Full vertex-value map plus its verification report."""

    values: VertexFunction
    report: VerifyReport
    stage_slopes: list[float] | None
    converged: bool


def _edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def initial_state(g: Graph) -> SubgraphState:
    """Trivial subgraph: boundary vertices labeled with their data."""
    return SubgraphState({b: float(v[0]) for b, v in g.boundary_values.items()})


def _rank(path: ConnectingPath) -> tuple:
    """Deterministic order: steepest first, then lexicographic tie-break on
    (sorted endpoints, interior sequence read from the smaller endpoint)."""
    a, b = path.vertices[0], path.vertices[-1]
    if a <= b:
        return (-path.slope, (a, b), path.vertices[1:-1])
    return (-path.slope, (b, a), tuple(reversed(path.vertices[1:-1])))


def _oriented(vertices: tuple[str, ...], lengths: tuple[float, ...],
              labeled: dict[str, float]) -> ConnectingPath:
    """Orient so that the end value is not below the start value."""
    v0, vk = vertices[0], vertices[-1]
    total = sum(lengths)
    slope = abs(labeled[vk] - labeled[v0]) / total
    if labeled[v0] <= labeled[vk]:
        return ConnectingPath(vertices, lengths, slope)
    return ConnectingPath(tuple(reversed(vertices)), tuple(reversed(lengths)), slope)


def _single_edge_candidates(g: Graph, state: SubgraphState) -> list[ConnectingPath]:
    out = []
    for (a, b), ln in g.lengths.items():
        if (a, b) in state.used_edges:
            continue
        if a in state.labeled and b in state.labeled:
            out.append(_oriented((a, b), (ln,), state.labeled))
    return out


def _best_interior_path(g: Graph, state: SubgraphState) -> ConnectingPath | None:
    """Steepest connecting path with at least one interior vertex.

    One lexicographic shortest-path search per labeled vertex: heap entries
    carry the path itself so equal-length ties resolve to the smallest
    vertex sequence.
    """
    labeled = state.labeled
    used = state.used_edges
    best = None
    best_rank = None
    for a in sorted(labeled):
        if not any(
            w not in labeled and _edge_key(a, w) not in used for w, _ in g.neighbors(a)
        ):
            continue
        heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (a,))]
        closed: set[str] = set()
        lengths: dict[tuple[str, ...], tuple[float, ...]] = {(a,): ()}
        while heap:
            dist, path = heapq.heappop(heap)
            v = path[-1]
            if v in closed:
                lengths.pop(path, None)
                continue
            closed.add(v)
            plens = lengths.pop(path)
            if v != a and v in labeled:
                b = v
                if b > a:
                    cand = _oriented(path, plens, labeled)
                    rank = _rank(cand)
                    if best_rank is None or rank < best_rank:
                        best, best_rank = cand, rank
                continue
            for w, ln in g.neighbors(v):
                if w in closed or _edge_key(v, w) in used:
                    continue
                if w in labeled and v == a:
                    continue  # single edges are handled separately
                np_path = path + (w,)
                heapq.heappush(heap, (dist + ln, np_path))
                lengths[np_path] = plens + (ln,)
    return best


def find_max_slope_connecting_path(g: Graph, state: SubgraphState) -> ConnectingPath | None:
    """Steepest connecting path over all labeled pairs, or None."""
    cands = _single_edge_candidates(g, state)
    interior = _best_interior_path(g, state)
    if interior is not None:
        cands.append(interior)
    if not cands:
        return None
    return min(cands, key=_rank)


def apply_path(state: SubgraphState, path: ConnectingPath) -> SubgraphState:
    """Label the interior of the path by linear interpolation."""
    labeled = state.labeled
    v0, vk = path.vertices[0], path.vertices[-1]
    if v0 not in labeled or vk not in labeled:
        raise InvalidPath("endpoints must be labeled")
    if labeled[vk] < labeled[v0]:
        raise InvalidPath("path must be oriented with nondecreasing endpoint values")
    if len(set(path.vertices)) != len(path.vertices):
        raise InvalidPath("path vertices must be distinct")
    for v in path.vertices[1:-1]:
        if v in labeled:
            raise InvalidPath(f"interior vertex {v!r} already labeled")
    for e in path.edges:
        if e in state.used_edges:
            raise InvalidPath(f"edge {e} already used")
    new = state.copy()
    acc = 0.0
    base = labeled[v0]
    for v, ln in zip(path.vertices[1:-1], path.lengths):
        acc += ln
        new.labeled[v] = base + path.slope * acc
    new.used_edges.update(path.edges)
    new.stage_slopes.append(path.slope)
    return new


def finalize_components(g: Graph, state: SubgraphState) -> dict[str, float]:
    """Flood the remaining unlabeled components from their attachments.

    Pre: no connecting path exists.  Each unlabeled component then touches
    exactly one labeled vertex and receives its value.
    """
    labeled = dict(state.labeled)
    seen: set[str] = set()
    for start in g.ids:
        if start in labeled or start in seen:
            continue
        comp = [start]
        seen.add(start)
        attachments: set[str] = set()
        queue = [start]
        while queue:
            v = queue.pop()
            for w, _ in g.neighbors(v):
                if w in state.labeled:
                    attachments.add(w)
                elif w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        if len(attachments) != 1:
            raise MultipleAttachments(
                f"component of {start!r} attaches to {sorted(attachments)}"
            )
        val = state.labeled[attachments.pop()]
        for v in comp:
            labeled[v] = val
    return labeled


def solve_scalar(g: Graph) -> ExtensionResult:
    """Exact extension of scalar boundary data on a connected graph."""
    violations = validate(g)
    if violations:
        raise ValidationError("; ".join(f"{v.code}: {v.message}" for v in violations))
    if g.value_dim() != 1:
        raise MethodUnavailable("the connecting-path solver requires scalar values")
    state = initial_state(g)
    # single labeled-labeled edges neither move values nor relabel anything,
    # so the steepest interior path stays valid while they are drained
    interior = _best_interior_path(g, state)
    pending = _single_edge_candidates(g, state)
    pending.sort(key=_rank)
    while True:
        take_single = bool(pending) and (
            interior is None or _rank(pending[0]) < _rank(interior)
        )
        if take_single:
            path = pending.pop(0)
            state.used_edges.update(path.edges)
            state.stage_slopes.append(path.slope)
            continue
        if interior is None:
            break
        log.debug("stage %d: slope %.6g through %s",
                  len(state.stage_slopes) + 1, interior.slope, interior.vertices)
        state = apply_path(state, interior)
        have = {p.edges[0] for p in pending}
        pending.extend(
            p for p in _single_edge_candidates(g, state) if p.edges[0] not in have
        )
        pending.sort(key=_rank)
        interior = _best_interior_path(g, state)
    values = finalize_components(g, state)
    vf: VertexFunction = {v: np.array([val]) for v, val in values.items()}
    report = verify_extension(g, vf)
    return ExtensionResult(vf, report, list(state.stage_slopes), True)


def gauss_seidel_scalar(g: Graph, tol: float = 1e-10, max_iter: int = 100_000) -> ExtensionResult:
    """Sweep solver: replace each interior value by its local optimum.

    Initializes the interior at the mean of the boundary data and stops
    once no value moves by more than tol in a sweep.
    """
    violations = validate(g)
    if violations:
        raise ValidationError("; ".join(f"{v.code}: {v.message}" for v in violations))
    if g.value_dim() != 1:
        raise MethodUnavailable("gauss_seidel_scalar requires scalar values")
    ids = g.ids
    index = {v: i for i, v in enumerate(ids)}
    u = [0.0] * len(ids)
    mean = float(np.mean([v[0] for v in g.boundary_values.values()]))
    for v in ids:
        u[index[v]] = float(g.boundary_values[v][0]) if v in g.omega else mean
    interior = [v for v in ids if v not in g.omega]
    nbrs = {
        v: ([index[w] for w, _ in g.neighbors(v)], [ln for _, ln in g.neighbors(v)])
        for v in interior
    }
    converged = False
    for sweep in range(max_iter):
        delta = 0.0
        for v in interior:
            idxs, lens = nbrs[v]
            new, _, _ = pairwise_optimum([u[i] for i in idxs], lens)
            delta = max(delta, abs(new - u[index[v]]))
            u[index[v]] = new
        if delta < tol:
            log.debug("converged after %d sweeps (delta %.3g)", sweep + 1, delta)
            converged = True
            break
    vf: VertexFunction = {v: np.array([u[index[v]]]) for v in ids}
    report = verify_extension(g, vf)
    if not converged:
        raise NotConverged(
            f"displacement above {tol} after {max_iter} sweeps", values=vf, report=report
        )
    return ExtensionResult(vf, report, None, True)


def residual_scalar(g: Graph, u: VertexFunction) -> tuple[float, str | None]:
    """Largest deviation of u from its local pairwise optimum, with witness."""
    worst, witness = 0.0, None
    for x in g.interior():
        vals = [float(u[w][0]) for w, _ in g.neighbors(x)]
        lens = [ln for _, ln in g.neighbors(x)]
        k, _, _ = pairwise_optimum(vals, lens)
        r = abs(float(u[x][0]) - k)
        if r > worst:
            worst, witness = r, x
    return worst, witness


def verify_extension(g: Graph, u: VertexFunction, tol: float = 1e-9) -> VerifyReport:
    """Re-derive the defining checks for a scalar candidate extension."""
    fvals = [float(v[0]) for v in g.boundary_values.values()]
    span = max(fvals) - min(fvals) if fvals else 0.0
    scaled = tol * span if span > 0.0 else tol

    worst, witness = residual_scalar(g, u)
    residual_ok = worst <= scaled

    lo, hi = min(fvals), max(fvals)
    mp_ok, mp_witness = True, None
    for x in g.ids:
        val = float(u[x][0])
        if val < lo - scaled or val > hi + scaled:
            mp_ok, mp_witness = False, x
            break

    boundary_ratio = 0.0
    interior_ratio = 0.0
    geo_witness = None
    omega = sorted(g.omega)
    for x in g.ids:
        dists = geodesic_distances_from(g, x)
        ux = float(u[x][0])
        for y, d in dists.items():
            if y <= x or d == 0.0:
                continue
            r = abs(ux - float(u[y][0])) / d
            if r > interior_ratio:
                interior_ratio, geo_witness = r, (x, y)
            if x in g.omega and y in g.omega:
                fx = float(g.boundary_values[x][0])
                fy = float(g.boundary_values[y][0])
                boundary_ratio = max(boundary_ratio, abs(fx - fy) / d)
    geodesic_ok = interior_ratio <= boundary_ratio * (1.0 + tol) + (0.0 if span > 0.0 else tol)
    if geodesic_ok:
        geo_witness = None

    return VerifyReport(
        residual=worst,
        residual_ok=residual_ok,
        residual_witness=None if residual_ok else witness,
        max_principle_ok=mp_ok,
        max_principle_witness=mp_witness,
        interior_ratio=interior_ratio,
        boundary_ratio=boundary_ratio,
        geodesic_ok=geodesic_ok,
        geodesic_witness=geo_witness,
        tol=tol,
    )
