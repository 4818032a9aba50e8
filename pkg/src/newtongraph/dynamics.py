"""Orbit classification, basin rasters, and critical-orbit certification.

Basin membership is asymptotic (enter a small disk around a root and stay for
five more iterates). Critical-orbit landings are the opposite: they must be
exact hits, so a root landing is only recorded when the orbit jumps onto the
root from a genuine distance — a superattracting approach that merely shrinks
past every tolerance is left unresolved and the map reported not
postcritically fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnresolvedOrbit
from .poly import NewtonMap
from .sphere import INF, SpherePoint
from .tolerances import DEFAULT_TOL, Tolerances

STAY_ITERATES = 5


@dataclass(frozen=True)
class OrbitResult:
    """Outcome of classify_point: basin index, fixed infinity, or unresolved."""

    kind: str  # "basin" | "fixed_infinity" | "unresolved"
    root_index: int | None = None
    entry_step: int | None = None
    hit_prepole: bool = False
    trace: tuple[SpherePoint, ...] | None = None


def _snap_pole(f: NewtonMap, z: complex, tol: Tolerances) -> bool:
    for q, _ in f.poles:
        if abs(z - q) <= tol.pole_snap * (1 + abs(q)):
            return True
    return False


def classify_point(
    f: NewtonMap,
    z: SpherePoint | complex,
    max_iter: int = 256,
    tol: Tolerances | None = None,
    keep_trace: bool = False,
) -> OrbitResult:
    """Classify the forward orbit of z: which root's basin it belongs to.

    Orbits hitting a pole (exactly, or within the snap distance) are routed
    through infinity and reported unresolved with the prepole flag — infinity
    repels, so no open set converges there.
    """
    tol = tol or DEFAULT_TOL
    pt = z if isinstance(z, SpherePoint) else SpherePoint.of(z)
    trace = [pt] if keep_trace else None
    if pt.is_infinity:
        return OrbitResult(
            "fixed_infinity", entry_step=0, trace=tuple(trace) if trace else None
        )

    cand_root = -1
    cand_step = -1
    stay = 0
    cur = pt
    for s in range(max_iter + STAY_ITERATES + 1):
        if cur.is_infinity:
            return OrbitResult(
                "unresolved", hit_prepole=True, trace=tuple(trace) if trace else None
            )
        zv = cur.value
        if _snap_pole(f, zv, tol):
            if trace is not None:
                trace.append(INF)
            return OrbitResult(
                "unresolved", hit_prepole=True, trace=tuple(trace) if trace else None
            )
        idx, dist = f.nearest_root(zv)
        near = dist <= tol.basin_tol
        if cand_root >= 0:
            if near and idx == cand_root:
                stay += 1
                if stay >= STAY_ITERATES:
                    return OrbitResult(
                        "basin",
                        root_index=cand_root,
                        entry_step=cand_step,
                        trace=tuple(trace) if trace else None,
                    )
            else:
                cand_root, cand_step, stay = -1, -1, 0
        if cand_root < 0 and near:
            cand_root, cand_step, stay = idx, s, 0
        cur = f.evaluate(zv)
        if trace is not None:
            trace.append(cur)
    return OrbitResult("unresolved", trace=tuple(trace) if trace else None)


# --- rasters ----------------------------------------------------------------

_PALETTE = (
    (230, 57, 70),
    (69, 123, 157),
    (42, 157, 143),
    (233, 196, 106),
    (155, 93, 229),
    (244, 162, 97),
    (38, 70, 83),
    (144, 190, 109),
    (231, 111, 81),
    (0, 121, 140),
    (188, 108, 37),
    (94, 84, 142),
)


@dataclass(frozen=True)
class RasterSpec:
    width: int
    height: int
    center: complex = 0j
    half_width: float = 2.0

    @property
    def half_height(self) -> float:
        return self.half_width * self.height / self.width

    def grid(self) -> np.ndarray:
        """Cell-center sample grid; row 0 is the top (largest imaginary part)."""
        xs = self.center.real + self.half_width * (
            (np.arange(self.width) + 0.5) / self.width * 2 - 1
        )
        ys = self.center.imag + self.half_height * (
            1 - (np.arange(self.height) + 0.5) / self.height * 2
        )
        return xs[None, :] + 1j * ys[:, None]


@dataclass(frozen=True)
class Raster:
    spec: RasterSpec
    basin_id: np.ndarray  # int16, -1 for unresolved
    steps: np.ndarray  # int16, basin entry step, -1 for unresolved

    def to_ppm(self) -> bytes:
        """Binary P6 image; palette indexed by root order, black unresolved."""
        h, w = self.basin_id.shape
        rgb = np.zeros((h, w, 3), dtype=np.uint8)
        for i in range(int(self.basin_id.max()) + 1 if self.basin_id.size else 0):
            color = _PALETTE[i % len(_PALETTE)]
            rgb[self.basin_id == i] = color
        header = f"P6\n{w} {h}\n255\n".encode()
        return header + rgb.tobytes()


def render_basins(
    f: NewtonMap,
    spec: RasterSpec,
    max_iter: int = 256,
    tol: Tolerances | None = None,
) -> Raster:
    """Classify every cell center; deterministic for fixed inputs."""
    tol = tol or DEFAULT_TOL
    z = spec.grid().ravel().astype(complex)
    n = z.size
    roots = np.array(f.roots)
    basin = np.full(n, -1, dtype=np.int16)
    entry = np.full(n, -1, dtype=np.int16)
    cand = np.full(n, -1, dtype=np.int16)
    cand_step = np.full(n, -1, dtype=np.int16)
    stay = np.zeros(n, dtype=np.int16)
    active = np.ones(n, dtype=bool)
    if f.poles:
        pole_locs = np.array([q for q, _ in f.poles])
        pole_snap = tol.pole_snap * (1 + np.abs(pole_locs))
    else:
        pole_locs = None

    for s in range(max_iter + STAY_ITERATES + 1):
        idxa = np.flatnonzero(active)
        if idxa.size == 0:
            break
        za = z[idxa]
        dead = ~np.isfinite(za)
        if pole_locs is not None:
            near_pole = np.any(
                np.abs(za[:, None] - pole_locs[None, :]) <= pole_snap[None, :],
                axis=1,
            )
            dead |= near_pole
        if np.any(dead):
            active[idxa[dead]] = False
            idxa = idxa[~dead]
            za = z[idxa]
            if idxa.size == 0:
                break
        d = np.abs(za[:, None] - roots[None, :])
        # chordal correction keeps huge |z| away from every root disk
        d = 2 * d / np.sqrt(
            (1 + np.abs(za[:, None]) ** 2) * (1 + np.abs(roots[None, :]) ** 2)
        )
        nearest = np.argmin(d, axis=1).astype(np.int16)
        near = d[np.arange(idxa.size), nearest] <= tol.basin_tol

        c = cand[idxa]
        have = c >= 0
        keep = have & near & (nearest == c)
        stay[idxa[keep]] += 1
        done = keep & (stay[idxa] >= STAY_ITERATES)
        if np.any(done):
            di = idxa[done]
            basin[di] = cand[di]
            entry[di] = cand_step[di]
            active[di] = False
        lost = have & ~keep
        cand[idxa[lost]] = -1
        cand_step[idxa[lost]] = -1
        stay[idxa[lost]] = 0
        fresh = (cand[idxa] < 0) & near & ~done
        cand[idxa[fresh]] = nearest[fresh]
        cand_step[idxa[fresh]] = s
        stay[idxa[fresh]] = 0

        idxa = np.flatnonzero(active)
        if idxa.size == 0:
            break
        z[idxa] = f.evaluate_array(z[idxa])

    shape = (spec.height, spec.width)
    return Raster(spec, basin.reshape(shape), entry.reshape(shape))


# --- critical orbits ---------------------------------------------------------


@dataclass(frozen=True)
class CriticalOrbit:
    start: SpherePoint
    branching: int  # local degree minus one
    orbit: tuple[SpherePoint, ...]
    landing: str  # "root" | "infinity" | "unresolved"
    root_index: int | None
    landing_time: int | None
    hit_prepole: bool


@dataclass(frozen=True)
class CriticalOrbitTable:
    entries: tuple[CriticalOrbit, ...]

    @property
    def all_resolved(self) -> bool:
        return all(e.landing != "unresolved" for e in self.entries)

    @property
    def max_landing_time(self) -> int | None:
        if not self.all_resolved:
            return None
        return max((e.landing_time for e in self.entries), default=0)


def critical_orbits(
    f: NewtonMap, tol: Tolerances | None = None, max_steps: int | None = None
) -> CriticalOrbitTable:
    """Forward orbit of every critical point until it provably lands or the cap.

    Root landings are exact hits only: the orbit must arrive within land_tol
    from at least jump_guard away (one application of f collapses a genuine
    preimage onto the root; an asymptotic approach shrinks gradually and is
    not a landing). Orbits touching a pole are routed exactly through infinity.
    """
    tol = tol or DEFAULT_TOL
    cap = tol.max_steps if max_steps is None else max_steps
    entries = []
    for c, mult in f.critical_points:
        orbit: list[SpherePoint] = [SpherePoint.of(c)]
        landing, root_index, time, prepole = "unresolved", None, None, False
        prev_dist = None  # distance from previous point to the root it may hit
        for s in range(cap + 1):
            cur = orbit[-1]
            if cur.is_infinity:
                landing, time = "infinity", s
                break
            zv = cur.value
            idx, dist = f.nearest_root(zv)
            if dist <= tol.land_tol:
                arrived_from_far = s == 0 or prev_dist is None or prev_dist >= tol.jump_guard
                if arrived_from_far:
                    landing, root_index, time = "root", idx, s
                    break
            prev_dist = dist
            if _snap_pole(f, zv, tol):
                orbit.append(INF)
                prepole = True
                continue
            nxt = f.evaluate(zv)
            if nxt.is_infinity:
                prepole = True
            orbit.append(nxt)
        entries.append(
            CriticalOrbit(
                start=SpherePoint.of(c),
                branching=mult,
                orbit=tuple(orbit),
                landing=landing,
                root_index=root_index,
                landing_time=time,
                hit_prepole=prepole,
            )
        )
    return CriticalOrbitTable(tuple(entries))


def is_postcritically_fixed(table: CriticalOrbitTable) -> tuple[bool, int | None]:
    """(certified, max landing time); (False, None) when any orbit wandered."""
    if not table.all_resolved:
        return False, None
    return True, table.max_landing_time


def require_postcritically_fixed(table: CriticalOrbitTable) -> int:
    """Landing level L, or UnresolvedOrbit naming the wandering critical points."""
    ok, level = is_postcritically_fixed(table)
    if not ok:
        bad = [str(e.start) for e in table.entries if e.landing == "unresolved"]
        raise UnresolvedOrbit(
            "critical orbits did not land on fixed points: " + ", ".join(bad)
        )
    return level if level is not None else 0
