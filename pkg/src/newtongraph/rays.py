"""Fixed internal rays and the channel diagram.

Each root is a superattracting fixed point of local degree k >= 2, so its
immediate basin carries k - 1 invariant accesses to infinity. A ray is traced
from a short straight fundamental segment in an invariant direction near the
root, then continued by repeated inverse lifts: the preimage of each traced
segment, taken along the branch that starts at the segment's outer endpoint,
extends the ray outward until it escapes past the chart radius. Forward
iteration is useless here (it contracts into the root), so tracing runs
against the dynamics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchJump, NoEscape, NotARoot, RayCollision
from .poly import NewtonMap
from .sphere import INF, SpherePoint, chordal_distance
from .tolerances import DEFAULT_TOL, Tolerances

_TAU = 2 * math.pi


def _mod_tau(x: float) -> float:
    r = math.fmod(x, _TAU)
    return r + _TAU if r < 0 else r


@dataclass(frozen=True)
class BottcherLocal:
    """Local model f(xi + w) = xi + a w^k + O(w^(k+1)) at a root."""

    root_index: int
    root: complex
    local_degree: int
    coefficient: complex
    fixed_directions: tuple[float, ...]  # angles in [0, 2pi), sorted


def bottcher_local(
    f: NewtonMap, root_index: int, tol: Tolerances | None = None
) -> BottcherLocal:
    """Leading local coefficient and the k-1 invariant ray directions."""
    tol = tol or DEFAULT_TOL
    if not 0 <= root_index < len(f.roots):
        raise NotARoot(f"no root with index {root_index}")
    xi = f.roots[root_index]
    k = f.local_degree(xi)
    if k < 2:
        raise NotARoot(f"point {xi} is not superattracting")
    # T = N - xi*D vanishes to order exactly k at xi; its k-th Taylor
    # coefficient over D(xi) is the leading local coefficient.
    t = f.numerator + f.denominator * (-xi)
    deriv = t
    fact = 1
    for i in range(1, k + 1):
        deriv = deriv.derivative()
        fact *= i
    a = deriv(xi) / (fact * f.denominator(xi))
    dirs = sorted(
        _mod_tau((-cmath.phase(a) + _TAU * j) / (k - 1)) for j in range(k - 1)
    )
    return BottcherLocal(root_index, xi, k, a, tuple(dirs))


@dataclass(frozen=True)
class RayPath:
    root_index: int
    direction: float
    points: tuple[SpherePoint, ...]  # root first, infinity last
    infinity_angle: float  # tangent angle at infinity in the w = 1/z chart


def _horner(coeffs: tuple[complex, ...], x: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def solve_preimage_near(
    f: NewtonMap, w: complex, x0: complex, tol: Tolerances
) -> complex | None:
    """One preimage of w under f near x0, or None if the iteration strays."""
    nc = f.numerator.coeffs
    dc = f.denominator.coeffs
    nd = f.numerator_derivative.coeffs
    dd = f.denominator_derivative.coeffs
    inverted = abs(w) > tol.chart_radius
    target = 1 / w if inverted else w
    x = x0
    converged = False
    for _ in range(50):
        nv, dv = _horner(nc, x), _horner(dc, x)
        if inverted:
            # solve D/N = 1/w; the pole of f is a regular point of 1/f
            if nv == 0:
                x += 1e-12 * (1 + abs(x))
                continue
            g = dv / nv - target
            gp = (_horner(dd, x) * nv - dv * _horner(nd, x)) / (nv * nv)
        else:
            if dv == 0:
                x += 1e-12 * (1 + abs(x))
                continue
            g = nv / dv - target
            gp = (_horner(nd, x) * dv - nv * _horner(dd, x)) / (dv * dv)
        if gp == 0:
            x += 1e-12 * (1 + abs(x))
            continue
        step = g / gp
        x = x - step
        if abs(step) <= tol.lift_tol * (1 + abs(x)):
            converged = True
            break
    if not converged:
        return None
    # post-step residual in the working chart; scale matches the chordal
    # metric since |g| ~ chordal(f(x), w) * (1 + |target|^2) / 2
    nv, dv = _horner(nc, x), _horner(dc, x)
    if inverted:
        res = abs(dv / nv - target) if nv != 0 else math.inf
    else:
        res = abs(nv / dv - target) if dv != 0 else math.inf
    if res > 1e3 * tol.lift_tol * (1 + abs(target) ** 2):
        return None
    return x


def continue_inverse_branch(
    f: NewtonMap,
    w_from: complex,
    w_to: complex,
    x0: complex,
    tol: Tolerances,
    depth: int = 0,
) -> complex:
    """Continue the branch of f^{-1} from x0 (a preimage of w_from) to w_to."""
    x = solve_preimage_near(f, w_to, x0, tol)
    if x is not None and abs(x - x0) <= 0.5 * (1 + abs(x0)):
        return x
    if depth >= 24:
        raise BranchJump(
            f"inverse branch lost between targets {w_from} and {w_to}"
        )
    mid = (w_from + w_to) / 2
    xm = continue_inverse_branch(f, w_from, mid, x0, tol, depth + 1)
    return continue_inverse_branch(f, mid, w_to, xm, tol, depth + 1)


def trace_fixed_ray(
    f: NewtonMap,
    local: BottcherLocal,
    direction_index: int,
    tol: Tolerances | None = None,
    max_lifts: int = 512,
) -> RayPath:
    """Trace one invariant ray from the root out to infinity.

    The assembled polyline satisfies f(points[j of segment n+1]) = points[j of
    segment n] to solver accuracy, so forward invariance is structural.
    """
    tol = tol or DEFAULT_TOL
    theta = local.fixed_directions[direction_index]
    xi, k, a = local.root, local.local_degree, local.coefficient

    clearance = min(
        [abs(q - xi) for q in f.roots if q != xi]
        + [abs(q - xi) for q, _ in f.poles],
        default=1.0,
    )
    r0 = min(0.02, 0.25 * clearance)
    while abs(a) * r0 ** (k - 1) > 0.25:
        r0 *= 0.5
    inner = abs(a) * r0**k
    m = max(2, math.ceil(math.log(r0 / inner) / math.log(tol.sample_ratio)))
    seg = [
        xi + inner * (r0 / inner) ** (j / m) * cmath.exp(1j * theta)
        for j in range(m + 1)
    ]

    crit_hot = [c for c, _ in f.critical_points]
    points: list[complex] = list(seg)
    cur = seg
    escaped = False
    for _ in range(max_lifts):
        new = [cur[-1]]
        for j in range(1, len(cur)):
            x = continue_inverse_branch(f, cur[j - 1], cur[j], new[-1], tol)
            for c in crit_hot:
                if abs(x - c) <= 1e-12 * (1 + abs(c)) and abs(c - xi) > 1e-9:
                    raise RayCollision(f"ray lift landed on critical point {c}")
            new.append(x)
        points.extend(new[1:])
        cur = new
        if abs(cur[-1]) >= tol.escape_radius:
            escaped = True
            break
    if not escaped:
        raise NoEscape(
            f"ray from root {xi} direction {theta:.6f} did not reach "
            f"radius {tol.escape_radius:g} within {max_lifts} lifts"
        )
    # truncate at the first escaped sample, then close with infinity
    cut = next(i for i, z in enumerate(points) if abs(z) >= tol.escape_radius)
    kept = points[: cut + 1]
    sphere_pts = (
        (SpherePoint.of(xi),) + tuple(SpherePoint.of(z) for z in kept) + (INF,)
    )
    return RayPath(
        root_index=local.root_index,
        direction=theta,
        points=sphere_pts,
        infinity_angle=_mod_tau(-cmath.phase(kept[-1])),
    )


# --- geometric embedded graphs ----------------------------------------------


@dataclass(frozen=True)
class GeoEdge:
    """Polyline edge; points[0] and points[-1] are the vertex locations."""

    tail: int
    head: int
    points: tuple[SpherePoint, ...]


@dataclass(frozen=True)
class GeoGraph:
    vertices: tuple[SpherePoint, ...]
    edges: tuple[GeoEdge, ...]

    def find_vertex(
        self, q: SpherePoint | complex, tol: Tolerances | None = None
    ) -> int | None:
        tol = tol or DEFAULT_TOL
        pt = q if isinstance(q, SpherePoint) else SpherePoint.of(q)
        best, best_d = None, tol.match_tol
        for i, v in enumerate(self.vertices):
            d = chordal_distance(v, pt)
            if d <= best_d:
                best, best_d = i, d
        return best

    def direction_at(self, edge_index: int, end: str) -> float:
        """Initial tangent angle of the edge at one end, in that vertex's chart.

        Finite vertices use the plane chart, infinity uses w = 1/z. The angle
        orders edge ends counterclockwise around the vertex.
        """
        e = self.edges[edge_index]
        pts = e.points if end == "tail" else tuple(reversed(e.points))
        v = pts[0]
        if v.is_infinity:
            for p in pts[1:]:
                if not p.is_infinity and p.value != 0:
                    return _mod_tau(cmath.phase(1 / p.value))
            raise ValueError("degenerate edge at infinity")
        for p in pts[1:]:
            if p.is_infinity:
                continue
            if p.value != v.value:
                return _mod_tau(cmath.phase(p.value - v.value))
        raise ValueError("degenerate edge: no distinct neighbor point")

    def vertex_star(self, vertex: int) -> tuple[tuple[int, str], ...]:
        """Edge ends at a vertex in counterclockwise order of initial angle."""
        ends = []
        for i, e in enumerate(self.edges):
            if e.tail == vertex:
                ends.append((self.direction_at(i, "tail"), i, "tail"))
            if e.head == vertex:
                ends.append((self.direction_at(i, "head"), i, "head"))
        ends.sort()
        return tuple((i, side) for _, i, side in ends)


def _project_segment(q: complex, p0: complex, p1: complex) -> complex:
    d = p1 - p0
    if d == 0:
        return p0
    t = ((q - p0) * d.conjugate()).real / (abs(d) ** 2)
    t = min(1.0, max(0.0, t))
    return p0 + t * d


def _as_w(p: SpherePoint) -> complex | None:
    if p.is_infinity:
        return 0j
    if p.value == 0:
        return None
    return 1 / p.value


def segment_distance(q: SpherePoint, p0: SpherePoint, p1: SpherePoint) -> float:
    """Chordal distance from q to a chord, drawn in whichever charts apply."""
    best = min(chordal_distance(q, p0), chordal_distance(q, p1))
    if not (q.is_infinity or p0.is_infinity or p1.is_infinity):
        s = _project_segment(q.value, p0.value, p1.value)
        best = min(best, chordal_distance(q, s))
    w0, w1, wq = _as_w(p0), _as_w(p1), _as_w(q)
    if w0 is not None and w1 is not None and wq is not None:
        s = _project_segment(wq, w0, w1)
        sp = INF if s == 0 else SpherePoint.of(1 / s)
        best = min(best, chordal_distance(q, sp))
    return best


class _Geometry:
    """Flattened segment arrays for vectorized distance queries.

    Segments with two finite endpoints live in the plane chart; segments whose
    endpoints both admit w = 1/z (nonzero or infinite) live in the inverted
    chart. Every polyline point also sits in a baseline endpoint array, so a
    segment excluded from both charts still contributes through its ends.
    """

    def __init__(self, graph: GeoGraph):
        zp0, zp1, ze, zs = [], [], [], []
        wp0, wp1, we, ws = [], [], [], []
        pts, pe, ps = [], [], []
        self.inf_refs: list[tuple[int, int]] = []
        for ei, e in enumerate(graph.edges):
            last_seg = len(e.points) - 2
            for i, p in enumerate(e.points):
                si = min(i, last_seg)
                if p.is_infinity:
                    self.inf_refs.append((ei, si))
                else:
                    pts.append(p.value)
                    pe.append(ei)
                    ps.append(si)
                if i == len(e.points) - 1:
                    break
                a, b = p, e.points[i + 1]
                if not a.is_infinity and not b.is_infinity:
                    zp0.append(a.value)
                    zp1.append(b.value)
                    ze.append(ei)
                    zs.append(i)
                wa, wb = _as_w(a), _as_w(b)
                if wa is not None and wb is not None:
                    wp0.append(wa)
                    wp1.append(wb)
                    we.append(ei)
                    ws.append(i)
        self.zp0 = np.array(zp0, dtype=complex)
        self.zp1 = np.array(zp1, dtype=complex)
        self.ze = np.array(ze, dtype=np.int64)
        self.zs = np.array(zs, dtype=np.int64)
        self.wp0 = np.array(wp0, dtype=complex)
        self.wp1 = np.array(wp1, dtype=complex)
        self.we = np.array(we, dtype=np.int64)
        self.ws = np.array(ws, dtype=np.int64)
        self.pts = np.array(pts, dtype=complex)
        self.pe = np.array(pe, dtype=np.int64)
        self.ps = np.array(ps, dtype=np.int64)


def _graph_geometry(graph: GeoGraph) -> _Geometry:
    cached = graph.__dict__.get("_geom")
    if cached is None:
        cached = _Geometry(graph)
        object.__setattr__(graph, "_geom", cached)
    return cached


def _project_distances(q: complex, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
    """Chordal distance from q to each chord, all drawn in one chart."""
    d = p1 - p0
    dd = np.abs(d) ** 2
    t = np.where(dd > 0, ((q - p0) * np.conj(d)).real / np.where(dd > 0, dd, 1), 0)
    s = p0 + np.clip(t, 0.0, 1.0) * d
    return 2 * np.abs(q - s) / np.sqrt((1 + abs(q) ** 2) * (1 + np.abs(s) ** 2))


def _distance_candidates(
    graph: GeoGraph, q: SpherePoint
) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    geom = _graph_geometry(graph)
    out = []
    if geom.pts.size:
        if q.is_infinity:
            base = 2 / np.sqrt(1 + np.abs(geom.pts) ** 2)
        else:
            base = 2 * np.abs(q.value - geom.pts) / np.sqrt(
                (1 + abs(q.value) ** 2) * (1 + np.abs(geom.pts) ** 2)
            )
        out.append((base, geom.pe, geom.ps))
    if geom.inf_refs:
        dinf = 0.0 if q.is_infinity else 2 / math.sqrt(1 + abs(q.value) ** 2)
        ei, si = geom.inf_refs[0]
        out.append(
            (np.array([dinf]), np.array([ei]), np.array([si]))
        )
    if not q.is_infinity and geom.zp0.size:
        out.append((_project_distances(q.value, geom.zp0, geom.zp1), geom.ze, geom.zs))
    qw = 0j if q.is_infinity else (1 / q.value if q.value != 0 else None)
    if qw is not None and geom.wp0.size:
        out.append((_project_distances(qw, geom.wp0, geom.wp1), geom.we, geom.ws))
    return out


def graph_distance(graph: GeoGraph, q: SpherePoint | complex) -> float:
    """Chordal distance from a point to the union of the graph's edges."""
    pt = q if isinstance(q, SpherePoint) else SpherePoint.of(q)
    cands = _distance_candidates(graph, pt)
    if not cands:
        return math.inf
    return min(float(d.min()) for d, _, _ in cands if d.size)


def nearest_edge_point(
    graph: GeoGraph, q: SpherePoint | complex
) -> tuple[int, int, float]:
    """(edge index, segment index, distance) of the closest edge point."""
    pt = q if isinstance(q, SpherePoint) else SpherePoint.of(q)
    best = (0, 0, math.inf)
    for d, earr, sarr in _distance_candidates(graph, pt):
        if not d.size:
            continue
        k = int(np.argmin(d))
        if d[k] < best[2]:
            best = (int(earr[k]), int(sarr[k]), float(d[k]))
    return best


# --- export -------------------------------------------------------------


def _pos_json(p: SpherePoint):
    if p.is_infinity:
        return "inf"
    return [p.value.real, p.value.imag]


def geograph_to_json(
    graph: GeoGraph,
    kinds: tuple[str, ...] | None = None,
    labels: tuple[str, ...] | None = None,
    edge_levels: tuple[int, ...] | None = None,
    edge_maps: tuple[int, ...] | None = None,
) -> dict:
    """Plain-data form of a geometric graph.

    Vertices carry id/kind/pos/label; edges carry id/from/to/level/maps_to
    and their full sample polylines; cyclic orders list edge-end dart ids
    (2j for the tail of edge j, 2j+1 for its head) counterclockwise. Absent
    metadata defaults to kind "point", level 0, and edges mapping to
    themselves.
    """
    n_e = len(graph.edges)
    kinds = kinds or ("point",) * len(graph.vertices)
    labels = labels or tuple(f"{kinds[i]} {i}" for i in range(len(graph.vertices)))
    edge_levels = edge_levels or (0,) * n_e
    edge_maps = edge_maps or tuple(range(n_e))
    vertices = [
        {"id": i, "kind": kinds[i], "pos": _pos_json(v), "label": labels[i]}
        for i, v in enumerate(graph.vertices)
    ]
    edges = [
        {
            "id": j,
            "from": e.tail,
            "to": e.head,
            "level": edge_levels[j],
            "maps_to": edge_maps[j],
            "samples": [_pos_json(p) for p in e.points],
        }
        for j, e in enumerate(graph.edges)
    ]
    orders = {
        str(v): [2 * j + (0 if side == "tail" else 1) for j, side in graph.vertex_star(v)]
        for v in range(len(graph.vertices))
    }
    return {"vertices": vertices, "edges": edges, "cyclic_orders": orders}


def geograph_to_dot(
    graph: GeoGraph,
    kinds: tuple[str, ...] | None = None,
    labels: tuple[str, ...] | None = None,
) -> str:
    """Graphviz source with finite vertex positions as layout hints."""
    kinds = kinds or ("point",) * len(graph.vertices)
    labels = labels or tuple(f"{kinds[i]} {i}" for i in range(len(graph.vertices)))
    lines = ["graph newton {"]
    for i, v in enumerate(graph.vertices):
        attrs = [f'label="{labels[i]}"']
        if not v.is_infinity:
            attrs.append(f'pos="{v.value.real:.6f},{v.value.imag:.6f}!"')
        lines.append(f"  v{i} [{', '.join(attrs)}];")
    for e in graph.edges:
        lines.append(f"  v{e.tail} -- v{e.head};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def channel_diagram(f: NewtonMap, tol: Tolerances | None = None) -> GeoGraph:
    """The invariant graph of all fixed rays: roots joined to infinity.

    Vertices are the roots in order followed by infinity; edges are grouped by
    root and sorted by ray direction, so the construction is deterministic.
    """
    tol = tol or DEFAULT_TOL
    verts = tuple(SpherePoint.of(r) for r in f.roots) + (INF,)
    inf_index = len(f.roots)
    edges = []
    for i in range(len(f.roots)):
        loc = bottcher_local(f, i, tol)
        for j in range(len(loc.fixed_directions)):
            ray = trace_fixed_ray(f, loc, j, tol)
            edges.append(GeoEdge(tail=i, head=inf_index, points=ray.points))
    return GeoGraph(verts, tuple(edges))
