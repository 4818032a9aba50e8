"""Transition matrices of curve-lifting data and their leading eigenvalues.

A multicurve spec records, for each curve class, how its preimage components
distribute over the classes and with what mapping degrees. The induced linear
map has matrix entry A[i][j] = sum of 1/degree over lifts of class j landing
in class i; lifts landing outside the system contribute nothing. The decision
of interest is whether the matrix is irreducible with leading eigenvalue >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NoConvergence


@dataclass(frozen=True)
class MulticurveSpec:
    """Lifting table: lifts[j] lists (target class or None, degree) for each
    preimage component of class j."""

    classes: int
    lifts: tuple[tuple[tuple[int | None, int], ...], ...]

    def __post_init__(self):
        if self.classes < 1:
            raise ValueError("need at least one curve class")
        if len(self.lifts) != self.classes:
            raise ValueError("lift table length does not match class count")
        for j, row in enumerate(self.lifts):
            for target, degree in row:
                if not isinstance(degree, int) or degree < 1:
                    raise ValueError(
                        f"lift of class {j}: degree must be a positive integer"
                    )
                if target is not None and not 0 <= target < self.classes:
                    raise ValueError(
                        f"lift of class {j}: target {target} out of range"
                    )


def multicurve_from_json(data) -> MulticurveSpec:
    """Parse {"classes": m, "lifts": {"j": [{"target": i|null, "degree": d}]}}.

    Classes with no entry have no lifts; unknown keys are rejected.
    """
    try:
        classes = int(data["classes"])
        raw = dict(data.get("lifts", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed multicurve spec: {exc}") from exc
    rows = []
    for j in range(classes):
        row = []
        for item in raw.pop(str(j), []):
            try:
                target = item["target"]
                degree = item["degree"]
            except (KeyError, TypeError) as exc:
                raise ValueError(f"malformed lift entry for class {j}") from exc
            row.append((None if target is None else int(target), int(degree)))
        rows.append(tuple(row))
    if raw:
        raise ValueError(f"lift table keys outside 0..{classes - 1}: {sorted(raw)}")
    return MulticurveSpec(classes, tuple(rows))


@dataclass(frozen=True)
class TransitionMatrix:
    entries: tuple[tuple[Fraction, ...], ...]
    leading: float
    irreducible: bool


def _validated(matrix) -> list[list[float]]:
    rows = [list(map(float, row)) for row in matrix]
    m = len(rows)
    if m == 0 or any(len(r) != m for r in rows):
        raise ValueError("matrix must be square and non-empty")
    for r in rows:
        for x in r:
            if not math.isfinite(x) or x < 0:
                raise ValueError("matrix entries must be finite and non-negative")
    return rows


def _matmul(a: list[list[float]], b: list[list[float]]) -> list[list[float]]:
    m = len(a)
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _spectral_radius(b: list[list[float]], tol: float) -> float:
    """Power iteration by repeated squaring, all-ones start.

    Two estimators run side by side: the enclosure min/max of (B w)_i / w_i
    for w = B^(2^k) 1 (exact when it closes, e.g. periodic irreducible
    matrices finish immediately), and the norm growth exp(log||B^n 1|| / n),
    which converges for every non-negative matrix, including reducible and
    defective ones where the enclosure never closes.
    """
    m = len(b)
    if m == 1:
        return b[0][0]
    c = [row[:] for row in b]
    log_scale = 0.0
    prev = None
    for k in range(1, 61):
        w = [math.fsum(row) for row in c]
        if all(x > 0 for x in w):
            bw = [math.fsum(b[i][j] * w[j] for j in range(m)) for i in range(m)]
            ratios = [bw[i] / w[i] for i in range(m)]
            low, high = min(ratios), max(ratios)
            if high - low <= tol * max(1.0, high):
                return (low + high) / 2
        c = _matmul(c, c)
        top = max(max(row) for row in c)
        if top == 0:
            return 0.0
        c = [[x / top for x in row] for row in c]
        log_scale = 2 * log_scale + math.log(top)
        total = math.fsum(math.fsum(row) for row in c)
        est = math.exp((log_scale + math.log(total)) / 2.0 ** k)
        if prev is not None and abs(est - prev) <= 0.25 * tol * max(1.0, est):
            return est
        prev = est
    raise NoConvergence("spectral radius estimate did not stabilize")


def leading_eigenvalue(matrix, tol: float = 1e-10) -> float:
    """Spectral radius of a non-negative square matrix.

    Falls back to the radius of A + eps*I minus eps (eps = 1e-3) if the
    direct iteration fails to stabilize; the shift leaves eigenvectors alone
    and moves every eigenvalue by eps, so the radius shifts by exactly eps.
    """
    rows = _validated(matrix)
    try:
        return _spectral_radius(rows, tol)
    except NoConvergence:
        eps = 1e-3
        shifted = [
            [x + (eps if i == j else 0.0) for j, x in enumerate(row)]
            for i, row in enumerate(rows)
        ]
        return _spectral_radius(shifted, tol) - eps


def is_irreducible(matrix) -> bool:
    """True iff every class reaches every class through the support digraph
    in at least one step. A 1x1 matrix needs a self-loop."""
    rows = _validated(matrix)
    m = len(rows)
    if m == 1:
        return rows[0][0] > 0
    forward = [[j for j in range(m) if rows[i][j] > 0] for i in range(m)]
    backward = [[j for j in range(m) if rows[j][i] > 0] for i in range(m)]
    for adjacency in (forward, backward):
        seen = {0}
        stack = [0]
        while stack:
            for nxt in adjacency[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != m:
            return False
    return True


def transition_matrix(spec: MulticurveSpec) -> TransitionMatrix:
    """Weighted preimage-count matrix of a lifting table, with its leading
    eigenvalue and irreducibility verdict."""
    m = spec.classes
    entries = [[Fraction(0)] * m for _ in range(m)]
    for j, row in enumerate(spec.lifts):
        for target, degree in row:
            if target is not None:
                entries[target][j] += Fraction(1, degree)
    frozen = tuple(tuple(row) for row in entries)
    return TransitionMatrix(
        entries=frozen,
        leading=leading_eigenvalue(frozen),
        irreducible=is_irreducible(frozen),
    )


def is_irreducible_obstruction(spec: MulticurveSpec, tol: float = 1e-10) -> bool:
    """True iff the transition matrix is irreducible with leading eigenvalue
    at least 1 (up to tol)."""
    tm = transition_matrix(spec)
    return tm.irreducible and tm.leading >= 1 - tol
