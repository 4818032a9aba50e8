"""Numerical policy knobs, threaded through the whole pipeline as one object."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # Root solving: relative residual gate and the simple-root separation gate.
    root_tol: float = 1e-8
    # Vertex identification, chordal metric on the sphere.
    match_tol: float = 1e-6
    # |z| beyond this counts as "at infinity" for ray truncation.
    escape_radius: float = 1e6
    # Basin membership disk for orbit classification (enter and stay).
    basin_tol: float = 1e-3
    # Snap distance for routing orbits exactly through poles.
    pole_snap: float = 1e-9
    # Tight landing tolerance for critical orbits (chordal).
    land_tol: float = 1e-9
    # A root landing must arrive from at least this far away (chordal); closer
    # approaches are superattracting convergence, not exact hits.
    jump_guard: float = 1e-3
    # Orbit iteration cap.
    max_steps: int = 64
    # Newton corrector tolerance for edge lifting / ray continuation (chordal).
    lift_tol: float = 1e-10
    # Geometric ratio for far-field polyline sampling.
    sample_ratio: float = 1.25

    def __post_init__(self):
        if not (0 < self.root_tol < 1):
            raise ValueError("root_tol out of range")
        if not (0 < self.match_tol < 1):
            raise ValueError("match_tol out of range")
        if self.escape_radius < 1e3:
            raise ValueError("escape_radius too small")

    @property
    def chart_radius(self) -> float:
        """|z| beyond which evaluation is routed through the w = 1/z chart."""
        return self.escape_radius ** 0.5


DEFAULT_TOL = Tolerances()
