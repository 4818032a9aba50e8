"""Pullback of the channel diagram under the Newton map.

Each pass lifts the newest edges: an edge with tail t is lifted once from
every preimage x of t, along each of the local_degree(x) inverse branches at
x. Tails of lifts map onto tails of sources, so orientation, the edge map
and the vertex map come from lift bookkeeping instead of after-the-fact
geometry matching. Fixed edges are their own lifts; on the first pass the
branch that retraces the source is skipped and the existing edge kept. The
tower stops one pullback after every critical point has become a vertex.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .combinatorial import (
    KIND_INFINITY,
    KIND_PLAIN,
    KIND_POLE,
    KIND_ROOT,
    ConditionCheck,
    EmbeddedGraph,
    GraphDynamics,
    ValidationReport,
    embedded_graph_from_rotations,
    graph_to_json,
)
from .dynamics import critical_orbits, require_postcritically_fixed
from .errors import (
    BranchJump,
    EndpointUnmatched,
    LevelCapExceeded,
    NonPlanarIncidence,
)
from .poly import NewtonMap, roots_of
from .rays import (
    GeoEdge,
    GeoGraph,
    channel_diagram,
    continue_inverse_branch,
    geograph_to_json,
    solve_preimage_near,
)
from .sphere import INF, SpherePoint, chordal_distance
from .tolerances import DEFAULT_TOL, Tolerances

_TAU = 2 * math.pi


def _mod_tau(x: float) -> float:
    r = math.fmod(x, _TAU)
    return r + _TAU if r < 0 else r


@dataclass(frozen=True)
class DynamicGraph:
    """Geometric graph with the self-map bookkeeping of a pullback tower.

    vertex_map/edge_map give the image vertex/edge under f (fixed for the
    level-0 core); vertex_level/edge_level record the pass on which each
    item first appeared, so the level-n subgraph is a prefix slice.
    """

    geo: GeoGraph
    level: int
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    vertex_level: tuple[int, ...]
    edge_level: tuple[int, ...]

    def root_owner(self, edge: int) -> int:
        """Vertex index of the root whose basin carries this edge: the tail
        of the edge's level-0 ancestor under the edge map."""
        j = edge
        while self.edge_level[j] > 0:
            j = self.edge_map[j]
        return self.geo.edges[j].tail

    def edges_at_level(self, level: int) -> tuple[int, ...]:
        return tuple(j for j, l in enumerate(self.edge_level) if l == level)


def base_dynamic_graph(f: NewtonMap, tol: Tolerances | None = None) -> DynamicGraph:
    """The channel diagram as a level-0 tower: every vertex and edge fixed."""
    geo = channel_diagram(f, tol)
    n_v, n_e = len(geo.vertices), len(geo.edges)
    return DynamicGraph(
        geo=geo,
        level=0,
        vertex_map=tuple(range(n_v)),
        edge_map=tuple(range(n_e)),
        vertex_level=(0,) * n_v,
        edge_level=(0,) * n_e,
    )


# --- preimages ----------------------------------------------------------


def _snap_marked(f: NewtonMap, z: complex, tol: Tolerances) -> complex:
    for a in f.roots:
        if chordal_distance(z, a) <= tol.match_tol:
            return a
    for a, _ in f.poles:
        if chordal_distance(z, a) <= tol.match_tol:
            return a
    for a, _ in f.critical_points:
        if chordal_distance(z, a) <= tol.match_tol:
            return a
    return z


def lift_point(
    f: NewtonMap, w: SpherePoint | complex, tol: Tolerances | None = None
) -> tuple[tuple[SpherePoint, int], ...]:
    """All preimages of w under f with their local degrees, summing to deg f.

    Finite fibers solve numerator - w * denominator = 0; the fiber over
    infinity is the poles plus infinity itself. Preimages are snapped to the
    map's marked points, and two fiber points closer than match_tol abort
    rather than silently merging.
    """
    tol = tol or DEFAULT_TOL
    pt = w if isinstance(w, SpherePoint) else SpherePoint.of(w)
    if pt.is_infinity:
        out = [(SpherePoint.of(q), m) for q, m in f.poles] + [(INF, 1)]
    else:
        shifted = f.numerator - f.denominator * pt.value
        out = [
            (SpherePoint.of(_snap_marked(f, z, tol)), m)
            for z, m in roots_of(shifted, tol.root_tol)
        ]
    total = sum(m for _, m in out)
    if total != f.degree:
        raise NonPlanarIncidence(
            f"fiber over {pt} carries total degree {total}, expected {f.degree}"
        )
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if chordal_distance(out[i][0], out[j][0]) < tol.match_tol:
                raise NonPlanarIncidence(
                    f"fiber points {out[i][0]} and {out[j][0]} collide below "
                    f"match_tol; vertex merging would corrupt the embedding"
                )
    return tuple(out)


def _leading_coefficient(f: NewtonMap, x: complex, order: int, w0: complex) -> complex:
    """b with f(x + u) = w0 + b u^order + O(u^(order+1)) at a critical
    preimage x of the finite value w0."""
    shifted = f.numerator - f.denominator * w0
    deriv = shifted
    fact = 1
    for i in range(1, order + 1):
        deriv = deriv.derivative()
        fact *= i
    return deriv(x) / (fact * f.denominator(x))


def _branched_first_step(
    f: NewtonMap,
    w0: complex,
    w1: complex,
    x0: complex,
    order: int,
    coeff: complex,
    direction: float,
    tol: Tolerances,
    depth: int = 0,
) -> complex:
    """First continuation step away from a critical start point, selecting the
    inverse branch that leaves x0 in the given direction.

    The local model places the preimage of w1 near x0 + rho e^{i phi} with
    rho = (|w1 - w0| / |coeff|)^(1/order); the corrected point must stay
    within 0.6 rho of that seed (adjacent branches are 2 rho sin(pi/order)
    apart), otherwise the segment is subdivided until the model holds.
    """
    rho = (abs(w1 - w0) / abs(coeff)) ** (1.0 / order)
    seed = x0 + rho * cmath.exp(1j * direction)
    x = solve_preimage_near(f, w1, seed, tol)
    if x is not None and abs(x - seed) <= 0.6 * rho:
        return x
    if depth >= 24:
        raise BranchJump(
            f"inverse branch at direction {direction:.6f} lost leaving "
            f"critical point {x0}"
        )
    mid = (w0 + w1) / 2
    xm = _branched_first_step(
        f, w0, mid, x0, order, coeff, direction, tol, depth + 1
    )
    return continue_inverse_branch(f, mid, w1, xm, tol)


def _match_endpoint(
    last: SpherePoint,
    candidates: tuple[tuple[SpherePoint, int], ...],
    tol: Tolerances,
) -> SpherePoint:
    """Pick the fiber point the lift ran into. The polyline stops one sample
    short of the vertex, so the gate is a separation margin (factor 5 against
    the runner-up, 0.1 chordal absolute), not match_tol."""
    ranked = sorted(
        ((chordal_distance(last, c), i) for i, (c, _) in enumerate(candidates))
    )
    best_d, best_i = ranked[0]
    if best_d > 0.1:
        raise EndpointUnmatched(
            f"lift endpoint {last} is {best_d:.3g} away from every preimage "
            f"of the source head"
        )
    if len(ranked) > 1 and 5 * best_d > ranked[1][0]:
        raise EndpointUnmatched(
            f"lift endpoint {last} is ambiguous between fiber points "
            f"{candidates[best_i][0]} and {candidates[ranked[1][1]][0]}"
        )
    return candidates[best_i][0]


def lift_edge(
    f: NewtonMap,
    edge_points: tuple[SpherePoint, ...],
    start: SpherePoint | complex,
    branch_direction: float | None = None,
    head_candidates: tuple[tuple[SpherePoint, int], ...] | None = None,
    tol: Tolerances | None = None,
) -> tuple[SpherePoint, ...]:
    """Lift a polyline under f, starting at the given preimage of its tail.

    Continuation is predictor-corrector over the interior samples; the final
    vertex is never solved for directly (it is typically a critical point or
    infinity) but matched against the fiber over the source head. At a start
    of local degree m >= 2 the m lifts are distinguished by branch_direction,
    the initial tangent of the desired lift; None selects the unique branch
    of a non-critical start.
    """
    tol = tol or DEFAULT_TOL
    start_pt = start if isinstance(start, SpherePoint) else SpherePoint.of(start)
    if len(edge_points) < 3:
        raise ValueError("polyline needs interior samples to continue along")
    tail, head = edge_points[0], edge_points[-1]
    if not tail.finite or not start_pt.finite:
        raise ValueError("edge tails and lift starts must be finite points")
    if any(p.is_infinity for p in edge_points[1:-1]):
        raise ValueError("interior samples must be finite")
    if chordal_distance(f.evaluate(start_pt), tail) > tol.match_tol:
        raise ValueError(f"start {start_pt} is not a preimage of the tail {tail}")

    order = f.local_degree(start_pt)
    if order > 1 and branch_direction is None:
        raise ValueError(
            f"start {start_pt} has local degree {order}; a branch direction "
            f"is required to select one of its lifts"
        )

    w_prev = tail.value
    x = start_pt.value
    out = [SpherePoint.of(x)]
    for i, p in enumerate(edge_points[1:-1]):
        w = p.value
        if w == w_prev:
            continue
        if i == 0 and branch_direction is not None:
            coeff = _leading_coefficient(f, x, order, w_prev)
            x = _branched_first_step(
                f, w_prev, w, x, order, coeff, branch_direction, tol
            )
        else:
            x = continue_inverse_branch(f, w_prev, w, x, tol)
        out.append(SpherePoint.of(x))
        w_prev = w

    cands = head_candidates if head_candidates is not None else lift_point(f, head, tol)
    out.append(_match_endpoint(out[-1], cands, tol))
    return tuple(out)


# --- one pullback pass ----------------------------------------------------


def _circular_gap(a: float, b: float) -> float:
    d = abs(_mod_tau(a) - _mod_tau(b))
    return min(d, _TAU - d)


def pullback_level(
    f: NewtonMap, current: DynamicGraph, tol: Tolerances | None = None
) -> DynamicGraph:
    """One pullback pass: lift every newest edge from every preimage of its
    tail, merge endpoints, and keep the connected component of the core.

    Lifts of older edges are already present (a level-n edge maps onto a
    level-(n-1) edge), so only the top level is lifted; on the first pass the
    branch retracing a fixed edge is recognized by its direction and skipped.
    """
    tol = tol or DEFAULT_TOL
    geo = current.geo
    fibers: dict[int, tuple[tuple[SpherePoint, int], ...]] = {}

    def fiber(vertex: int) -> tuple[tuple[SpherePoint, int], ...]:
        if vertex not in fibers:
            fibers[vertex] = lift_point(f, geo.vertices[vertex], tol)
        return fibers[vertex]

    records = []  # (tail point, head point, polyline, source edge)
    for j in current.edges_at_level(current.level):
        e = geo.edges[j]
        tail_pt = geo.vertices[e.tail]
        psi = cmath.phase(e.points[1].value - tail_pt.value)
        head_fiber = fiber(e.head)
        for x, order in fiber(e.tail):
            if order == 1:
                directions: list[float | None] = [None]
            else:
                coeff = _leading_coefficient(f, x.value, order, tail_pt.value)
                base = (psi - cmath.phase(coeff)) / order
                directions = [_mod_tau(base + _TAU * t / order) for t in range(order)]
                if (
                    current.level == 0
                    and chordal_distance(x, tail_pt) <= tol.match_tol
                ):
                    # a fixed edge is one of its own lifts; drop that branch
                    self_branch = min(
                        range(order), key=lambda t: _circular_gap(directions[t], psi)
                    )
                    directions.pop(self_branch)
            for direction in directions:
                pts = lift_edge(
                    f, e.points, x, direction, head_candidates=head_fiber, tol=tol
                )
                records.append((pts[0], pts[-1], pts, j))

    # merge endpoints into the vertex list, newest last
    verts = list(geo.vertices)
    vmap = list(current.vertex_map)
    vlevel = list(current.vertex_level)

    def locate_or_add(p: SpherePoint, image_vertex: int) -> int:
        for i, v in enumerate(verts):
            if chordal_distance(v, p) <= tol.match_tol:
                if vmap[i] != image_vertex:
                    raise NonPlanarIncidence(
                        f"point {p} merges with vertex {i} whose image is "
                        f"vertex {vmap[i]}, not {image_vertex}"
                    )
                return i
        verts.append(p)
        vmap.append(image_vertex)
        vlevel.append(current.level + 1)
        return len(verts) - 1

    edges = list(geo.edges)
    emap = list(current.edge_map)
    elevel = list(current.edge_level)
    for tail_p, head_p, pts, source in records:
        ti = locate_or_add(tail_p, geo.edges[source].tail)
        hi = locate_or_add(head_p, geo.edges[source].head)
        edges.append(GeoEdge(tail=ti, head=hi, points=pts))
        emap.append(source)
        elevel.append(current.level + 1)

    # keep the connected component containing the core (vertex 0 is a root)
    adjacency: dict[int, set[int]] = {i: set() for i in range(len(verts))}
    for e in edges:
        adjacency[e.tail].add(e.head)
        adjacency[e.head].add(e.tail)
    seen = {0}
    queue = [0]
    while queue:
        v = queue.pop()
        for u in adjacency[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    if len(seen) != len(verts):
        vkeep = sorted(seen)
        vindex = {old: new for new, old in enumerate(vkeep)}
        ekeep = [j for j, e in enumerate(edges) if e.tail in seen]
        eindex = {old: new for new, old in enumerate(ekeep)}
        verts = [verts[i] for i in vkeep]
        vmap = [vindex[vmap[i]] for i in vkeep]
        vlevel = [vlevel[i] for i in vkeep]
        edges = [
            GeoEdge(vindex[edges[j].tail], vindex[edges[j].head], edges[j].points)
            for j in ekeep
        ]
        emap = [eindex[emap[j]] for j in ekeep]
        elevel = [elevel[j] for j in ekeep]

    return DynamicGraph(
        geo=GeoGraph(tuple(verts), tuple(edges)),
        level=current.level + 1,
        vertex_map=tuple(vmap),
        edge_map=tuple(emap),
        vertex_level=tuple(vlevel),
        edge_level=tuple(elevel),
    )


# --- the full tower -------------------------------------------------------


def vertex_kinds_for(
    f: NewtonMap, geo: GeoGraph, tol: Tolerances | None = None
) -> tuple[str, ...]:
    tol = tol or DEFAULT_TOL
    kinds = []
    for v in geo.vertices:
        if v.is_infinity:
            kinds.append(KIND_INFINITY)
        elif any(chordal_distance(v, r) <= tol.match_tol for r in f.roots):
            kinds.append(KIND_ROOT)
        elif any(chordal_distance(v, q) <= tol.match_tol for q, _ in f.poles):
            kinds.append(KIND_POLE)
        else:
            kinds.append(KIND_PLAIN)
    return tuple(kinds)


def _sorted_star(
    geo: GeoGraph, vertex: int
) -> tuple[tuple[float, int], ...]:
    """(angle, dart) pairs at a vertex, counterclockwise; rejects ties."""
    ends = []
    for j, e in enumerate(geo.edges):
        if e.tail == vertex:
            ends.append((geo.direction_at(j, "tail"), 2 * j))
        if e.head == vertex:
            ends.append((geo.direction_at(j, "head"), 2 * j + 1))
    ends.sort()
    for t in range(len(ends)):
        gap = _circular_gap(ends[t][0], ends[(t + 1) % len(ends)][0])
        if len(ends) > 1 and gap < 1e-9:
            raise NonPlanarIncidence(
                f"edge ends {ends[t][1]} and {ends[(t + 1) % len(ends)][1]} at "
                f"vertex {vertex} are angularly indistinguishable"
            )
    return tuple(ends)


def extract_combinatorial(
    f: NewtonMap, dg: DynamicGraph, tol: Tolerances | None = None
) -> GraphDynamics:
    """Rotation system and self-map data of a pullback level.

    Cyclic orders come from edge-end tangent angles (the 1/z chart at
    infinity); the dart map aligns tails with tails since lifts inherit
    orientation from their sources.
    """
    tol = tol or DEFAULT_TOL
    geo = dg.geo
    kinds = vertex_kinds_for(f, geo, tol)
    rotations = [
        [d for _, d in _sorted_star(geo, v)] for v in range(len(geo.vertices))
    ]
    graph = embedded_from_geo(geo, rotations, kinds)
    dart_map = tuple(2 * dg.edge_map[d >> 1] + (d & 1) for d in range(2 * len(geo.edges)))
    local_degree = tuple(f.local_degree(v) for v in geo.vertices)
    return GraphDynamics(
        graph=graph,
        vertex_map=tuple(dg.vertex_map),
        edge_map=tuple(dg.edge_map),
        dart_map=dart_map,
        local_degree=local_degree,
        channel_edges=frozenset(j for j, l in enumerate(dg.edge_level) if l == 0),
        level=dg.level,
    )


def embedded_from_geo(
    geo: GeoGraph, rotations: list[list[int]], kinds: tuple[str, ...]
) -> EmbeddedGraph:
    endpoints = [(e.tail, e.head) for e in geo.edges]
    return embedded_graph_from_rotations(endpoints, rotations, kinds)


@dataclass(frozen=True)
class NewtonGraphResult:
    """The pullback tower with its combinatorial extraction.

    graphs[n] is the level-n graph; minimal_level is the first level whose
    predecessor contains every critical point as a vertex (the tower height);
    pole_cover_level is the first level containing every pole, or None if
    the tower never covered them.
    """

    graphs: tuple[DynamicGraph, ...]
    minimal_level: int
    pole_cover_level: int | None
    dynamics: GraphDynamics

    @property
    def embedded(self) -> EmbeddedGraph:
        return self.dynamics.graph


def _marked_covered(
    geo: GeoGraph, points: list[complex], tol: Tolerances
) -> bool:
    return all(geo.find_vertex(c, tol) is not None for c in points)


def compute_newton_graph(
    f: NewtonMap, max_level: int = 8, tol: Tolerances | None = None
) -> NewtonGraphResult:
    """Pull the channel diagram back until the graph certifies itself.

    Requires a postcritically fixed map. Levels are added until every
    critical point is a vertex, plus one more pass; LevelCapExceeded carries
    the partial tower when max_level is hit first.
    """
    tol = tol or DEFAULT_TOL
    require_postcritically_fixed(critical_orbits(f, tol))

    crit_pts = [c for c, _ in f.critical_points]
    pole_pts = [q for q, _ in f.poles]
    cur = base_dynamic_graph(f, tol)
    tower = [cur]
    crit_level = 0 if _marked_covered(cur.geo, crit_pts, tol) else None
    pole_level = 0 if _marked_covered(cur.geo, pole_pts, tol) else None

    while crit_level is None or cur.level < crit_level + 1:
        if cur.level >= max_level:
            raise LevelCapExceeded(
                f"critical points still missing from the graph at the level "
                f"cap {max_level}",
                partial=tuple(tower),
            )
        cur = pullback_level(f, cur, tol)
        tower.append(cur)
        if crit_level is None and _marked_covered(cur.geo, crit_pts, tol):
            crit_level = cur.level
        if pole_level is None and _marked_covered(cur.geo, pole_pts, tol):
            pole_level = cur.level

    return NewtonGraphResult(
        graphs=tuple(tower),
        minimal_level=crit_level + 1,
        pole_cover_level=pole_level,
        dynamics=extract_combinatorial(f, cur, tol),
    )


# --- point location and face counting --------------------------------------


def _cross(a: complex, b: complex) -> float:
    return (a.conjugate() * b).imag


def _chart_values(points: list[SpherePoint]) -> list[complex] | None:
    """All points in one common chart: the plane if every point is finite,
    else the 1/z chart if every point admits it."""
    if all(p.finite for p in points):
        return [p.value for p in points]
    if all(p.is_infinity or p.value != 0 for p in points):
        return [0j if p.is_infinity else 1 / p.value for p in points]
    return None


def locate_face(
    geo: GeoGraph,
    embedded: EmbeddedGraph,
    q: SpherePoint | complex,
    tol: Tolerances | None = None,
) -> int | None:
    """Face of the embedding containing q, or None if q lies on the graph.

    The query point is sided against the nearest graph point: against the
    directed nearest segment when that point is interior to it, with the
    corner rule at polyline bends, and by rotation sector when the nearest
    point is a vertex. All side tests run in a chart containing the local
    data (1/z near infinity), so counterclockwise order is preserved.
    """
    from .rays import nearest_edge_point

    tol = tol or DEFAULT_TOL
    pt = q if isinstance(q, SpherePoint) else SpherePoint.of(q)
    ei, si, dist = nearest_edge_point(geo, pt)
    if dist <= tol.match_tol:
        return None

    pts = geo.edges[ei].points
    p0, p1 = pts[si], pts[si + 1]
    chart = _chart_values([p0, p1, pt])
    if chart is None:
        raise ValueError(f"no common chart for segment {si} of edge {ei}")
    c0, c1, cq = chart

    seg = c1 - c0
    t = ((cq - c0) * seg.conjugate()).real / abs(seg) ** 2 if seg != 0 else 0.0
    if 0.0 < t < 1.0:
        side = _cross(seg, cq - c0)
        return embedded.face_of[2 * ei if side < 0 else 2 * ei + 1]

    corner = si if t <= 0.0 else si + 1
    if corner == 0 or corner == len(pts) - 1:
        vertex = geo.edges[ei].tail if corner == 0 else geo.edges[ei].head
        return _face_at_vertex(geo, embedded, vertex, pt)

    trio = _chart_values([pts[corner - 1], pts[corner], pts[corner + 1], pt])
    if trio is None:
        raise ValueError(f"no common chart at corner {corner} of edge {ei}")
    a, b, c, qq = trio
    incoming, outgoing, rel = b - a, c - b, qq - b
    cross_in, cross_out = _cross(incoming, rel), _cross(outgoing, rel)
    if _cross(incoming, outgoing) < 0:
        right = cross_in < 0 and cross_out < 0
    else:
        right = cross_in < 0 or cross_out < 0
    return embedded.face_of[2 * ei if right else 2 * ei + 1]


def _face_at_vertex(
    geo: GeoGraph, embedded: EmbeddedGraph, vertex: int, pt: SpherePoint
) -> int:
    star = _sorted_star(geo, vertex)
    v = geo.vertices[vertex]
    if v.is_infinity:
        alpha = _mod_tau(cmath.phase(1 / pt.value))
    else:
        alpha = _mod_tau(cmath.phase(pt.value - v.value))
    chosen = star[-1][1]
    for angle, dart in star:
        if angle <= alpha:
            chosen = dart
        else:
            break
    return embedded.face_of_corner(chosen)


def verify_face_counts(
    result: NewtonGraphResult, f: NewtonMap, tol: Tolerances | None = None
) -> ValidationReport:
    """Face bookkeeping of the basin structure.

    - boundary_fixed_points: each face of the level-0 diagram has one more
      root on its boundary than poles (with multiplicity) strictly inside it;
      poles sitting on the diagram itself are listed, not guessed about.
    - shared_pole_access: each level-0 face contains a level-1 pole vertex
      whose incident edges belong to at least two distinct roots' basins.
    - simple_pole_basin_bound: a simple pole meets immediate basins of at
      most two roots; at level 1 an incident edge lies in an immediate basin
      exactly when its tail is the owning root itself.
    """
    tol = tol or DEFAULT_TOL
    base = result.graphs[0]
    level1 = result.graphs[1]
    kinds0 = vertex_kinds_for(f, base.geo, tol)
    rotations0 = [
        [d for _, d in _sorted_star(base.geo, v)]
        for v in range(len(base.geo.vertices))
    ]
    emb0 = embedded_from_geo(base.geo, rotations0, kinds0)

    boundary_roots: dict[int, set[int]] = {i: set() for i in range(emb0.n_faces)}
    for dart in range(emb0.n_darts):
        v = emb0.vertex_of[dart]
        if kinds0[v] == KIND_ROOT:
            boundary_roots[emb0.face_of[dart]].add(v)

    interior_poles: dict[int, int] = {i: 0 for i in range(emb0.n_faces)}
    pole_face: dict[int, int | None] = {}
    boundary_poles = []
    for i, (q, mult) in enumerate(f.poles):
        face = locate_face(base.geo, emb0, q, tol)
        pole_face[i] = face
        if face is None:
            boundary_poles.append(q)
        else:
            interior_poles[face] += mult

    mismatches = [
        f"face {i}: {len(boundary_roots[i])} boundary roots vs "
        f"{interior_poles[i]} interior poles"
        for i in range(emb0.n_faces)
        if len(boundary_roots[i]) != interior_poles[i] + 1
    ]
    witness = "; ".join(mismatches) if mismatches else None
    if boundary_poles and witness is None:
        witness = f"poles on the diagram, excluded from counts: {boundary_poles}"
    checks = [
        ConditionCheck("boundary_fixed_points", not mismatches, witness)
    ]

    # owners of level-1 edges at each pole vertex
    geo1 = level1.geo
    kinds1 = vertex_kinds_for(f, geo1, tol)
    pole_owner_sets: dict[int, set[int]] = {}
    pole_immediate_sets: dict[int, set[int]] = {}
    for j, e in enumerate(geo1.edges):
        owner = level1.root_owner(j)
        for v in (e.tail, e.head):
            if kinds1[v] != KIND_POLE:
                continue
            pole_owner_sets.setdefault(v, set()).add(owner)
            if e.tail == owner:
                pole_immediate_sets.setdefault(v, set()).add(owner)

    uncovered = []
    for face in range(emb0.n_faces):
        found = False
        for v, owners in pole_owner_sets.items():
            if len(owners) < 2:
                continue
            if locate_face(base.geo, emb0, geo1.vertices[v], tol) == face:
                found = True
                break
        if not found:
            uncovered.append(face)
    checks.append(
        ConditionCheck(
            "shared_pole_access",
            not uncovered,
            f"faces without a two-basin pole: {uncovered}" if uncovered else None,
        )
    )

    crowded = []
    for v, kind in enumerate(kinds1):
        if kind != KIND_POLE:
            continue
        pole_index, _ = f.nearest_pole(geo1.vertices[v].value)
        if f.poles[pole_index][1] != 1:
            continue
        owners = pole_immediate_sets.get(v, set())
        if len(owners) > 2:
            crowded.append((v, sorted(owners)))
    checks.append(
        ConditionCheck(
            "simple_pole_basin_bound",
            not crowded,
            f"simple poles meeting too many immediate basins: {crowded}"
            if crowded
            else None,
        )
    )
    return ValidationReport(tuple(checks))


# --- export -----------------------------------------------------------------


def newton_graph_to_json(
    result: NewtonGraphResult, f: NewtonMap, tol: Tolerances | None = None
) -> dict:
    """Plain-data export of the top level: the geometric graph with per-edge
    levels and source edges, the map data, and the combinatorial extraction."""
    tol = tol or DEFAULT_TOL
    top = result.graphs[-1]
    kinds = vertex_kinds_for(f, top.geo, tol)
    labels = []
    counters = {KIND_ROOT: 0, KIND_POLE: 0, KIND_PLAIN: 0}
    for i, kind in enumerate(kinds):
        if kind == KIND_INFINITY:
            labels.append("infinity")
        else:
            labels.append(f"{kind} {counters[kind]}")
            counters[kind] += 1
    data = geograph_to_json(
        top.geo, kinds, tuple(labels), top.edge_level, top.edge_map
    )
    data["vertex_map"] = {str(i): m for i, m in enumerate(top.vertex_map)}
    data["edge_map"] = {str(j): m for j, m in enumerate(top.edge_map)}
    data["local_degrees"] = {
        str(i): f.local_degree(v) for i, v in enumerate(top.geo.vertices)
    }
    data["N"] = result.minimal_level
    data["pole_cover_level"] = result.pole_cover_level
    data["combinatorial"] = graph_to_json(result.dynamics)
    return data
