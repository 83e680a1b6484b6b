"""Transversality, fixed points and low-period orbits of Volterra operators.

On a face with support ``F`` a point is fixed exactly when
``a[F, F] @ x_F = 0`` with ``sum(x_F) = 1`` and ``x_F > 0``, so every face
holds at most one isolated fixed point and a sweep over all faces finds
them all.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .errors import DegenerateFace, FaceBudgetExceeded, InvalidBudget, UnsupportedDimension, UnsupportedPeriod
from .operators import VolterraMatrix, apply_volterra
from .simplex import SimplexPoint, check_face, distance, vertex

MINOR_TOL = 1e-12
POSITIVE_TOL = 1e-10
RANK_TOL = 1e-10
RESIDUAL_TOL = 1e-9
DEDUP_TOL = 1e-8
MAX_FACE_DIM = 20

FD_STEP = 1e-6
PERIODIC_RESIDUAL_TOL = 1e-9
PERIODIC_FIXED_TOL = 1e-6


@dataclass(frozen=True)
class TransversalityReport:
    transversal: bool
    minors: tuple[tuple[int, float], ...]
    tolerance_used: float = MINOR_TOL


class FixedPointKind(str, Enum):
    VERTEX = "vertex"
    FACE_INTERIOR = "face_interior"
    SIMPLEX_INTERIOR = "simplex_interior"


@dataclass(frozen=True)
class FixedPointRecord:
    point: SimplexPoint
    face: frozenset
    residual: float
    classification: FixedPointKind

    def to_dict(self) -> dict:
        return {
            "face": sorted(self.face),
            "coordinates": self.point.coords.tolist(),
            "residual": self.residual,
            "classification": self.classification.value,
        }


def leading_principal_minors(a: np.ndarray) -> list[float]:
    """Determinants of the leading ``k x k`` blocks for ``k = 1..m``."""
    return [float(np.linalg.det(a[:k, :k])) for k in range(1, a.shape[0] + 1)]


def check_transversality(v: VolterraMatrix) -> TransversalityReport:
    # odd orders vanish identically for skew-symmetric matrices
    minors = tuple((k, float(np.linalg.det(v.a[:k, :k]))) for k in range(2, v.m + 1, 2))
    return TransversalityReport(
        transversal=all(abs(d) > MINOR_TOL for _, d in minors),
        minors=minors,
    )


def _classify(size: int, m: int) -> FixedPointKind:
    if size == 1:
        return FixedPointKind.VERTEX
    return FixedPointKind.SIMPLEX_INTERIOR if size == m else FixedPointKind.FACE_INTERIOR


def fixed_points_on_face(v: VolterraMatrix, face) -> FixedPointRecord | None:
    """The fixed point whose support is exactly ``face`` (1-based), if any.

    Raises :class:`DegenerateFace` when the solutions on the face form a
    continuum instead of an isolated point.
    """
    f = check_face(v.m, face)
    if len(f) == 1:
        return FixedPointRecord(vertex(v.m, f[0]), frozenset(f), 0.0, FixedPointKind.VERTEX)
    idx = np.array(f) - 1
    sub = v.a[np.ix_(idx, idx)]
    system = np.vstack([sub, np.ones(len(f))])
    rhs = np.zeros(len(f) + 1)
    rhs[-1] = 1.0
    sv = np.linalg.svd(system, compute_uv=False)
    rank = int(np.sum(sv > RANK_TOL * max(sv[0], 1.0)))
    if rank < len(f):
        raise DegenerateFace(f"face {f} carries a {len(f) - rank}-dimensional family of fixed points", f)
    sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if np.linalg.norm(system @ sol - rhs) > RANK_TOL:
        return None  # inconsistent: no fixed point with this support
    if np.any(sol <= POSITIVE_TOL):
        return None
    x = np.zeros(v.m)
    x[idx] = sol
    point = SimplexPoint(x)
    residual = distance(apply_volterra(v, point), point)
    if residual > RESIDUAL_TOL:
        warnings.warn(f"fixed point on face {f} has residual {residual:.3g}; dropped", RuntimeWarning)
        return None
    return FixedPointRecord(point, frozenset(f), residual, _classify(len(f), v.m))


def all_faces(m: int):
    for size in range(1, m + 1):
        yield from (tuple(i + 1 for i in c) for c in combinations(range(m), size))


def enumerate_fixed_points(v: VolterraMatrix) -> list[FixedPointRecord]:
    """Every isolated fixed point, sorted by face then coordinates."""
    if v.m > MAX_FACE_DIM:
        raise FaceBudgetExceeded(f"2^{v.m} faces exceed the sweep budget (m <= {MAX_FACE_DIM})")
    found: list[FixedPointRecord] = []
    for f in all_faces(v.m):
        rec = fixed_points_on_face(v, f)
        if rec is None:
            continue
        if any(distance(rec.point, r.point) < DEDUP_TOL for r in found):
            continue
        found.append(rec)
    found.sort(key=lambda r: (sorted(r.face), r.point.coords.tolist()))
    return found


# -- periodic orbits on S^2 --------------------------------------------------

def _power_map(a: np.ndarray, x: np.ndarray, period: int) -> np.ndarray:
    # the polynomial itself, defined off the simplex too (finite differences
    # step outside it near the boundary)
    for _ in range(period):
        x = x * (1.0 + a @ x)
    return x


def _lift(u):
    return np.array([u[0], u[1], 1.0 - u[0] - u[1]])


def _newton(a, u, period, max_iter=100):
    def g(w):
        return _power_map(a, _lift(w), period)[:2] - w

    gu = g(u)
    for _ in range(max_iter):
        norm = np.linalg.norm(gu)
        if norm < 1e-14:
            break
        jac = np.empty((2, 2))
        for c in range(2):
            e = np.zeros(2)
            e[c] = FD_STEP
            jac[:, c] = (g(u + e) - g(u - e)) / (2 * FD_STEP)
        try:
            d = np.linalg.solve(jac, -gu)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(jac, -gu, rcond=None)[0]
        t = 1.0
        while t > 1e-4:
            w = u + t * d
            if np.all(_lift(w) >= -1e-12):
                gw = g(w)
                if np.linalg.norm(gw) < norm:
                    break
            t *= 0.5
        else:
            break
        u, gu = w, gw
    return u


def find_periodic_points(v: VolterraMatrix, period: int, grid_step: float) -> list[SimplexPoint]:
    """Points of least period ``period`` found by grid-seeded damped Newton.

    Only the three-species case with periods 2 and 3 is supported.  An empty
    result is evidence at the grid resolution, not a proof of absence.
    """
    if v.m != 3:
        raise UnsupportedDimension(f"periodic search runs on S^2 only (m = 3), got m = {v.m}")
    if period not in (2, 3):
        raise UnsupportedPeriod(f"period must be 2 or 3, got {period}")
    if not 0.01 <= grid_step <= 0.2:
        raise InvalidBudget(f"grid step {grid_step} outside [0.01, 0.2]")
    fixed = [r.point.coords for r in enumerate_fixed_points(v)]
    n = int(round(1.0 / grid_step))
    found: list[np.ndarray] = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            u = _newton(v.a, np.array([i / n, j / n]), period)
            x = _lift(u)
            if np.any(x < -1e-12):
                continue
            if np.linalg.norm(_power_map(v.a, x, period) - x) >= PERIODIC_RESIDUAL_TOL:
                continue
            if any(np.linalg.norm(x - p) < PERIODIC_FIXED_TOL for p in fixed):
                continue
            if np.linalg.norm(_power_map(v.a, x, 1) - x) < PERIODIC_FIXED_TOL:
                continue
            if any(np.linalg.norm(x - y) < PERIODIC_FIXED_TOL for y in found):
                continue
            found.append(x)
    points = [SimplexPoint(np.clip(x, 0.0, None)) for x in found]
    points.sort(key=lambda p: p.coords.tolist())
    return points
