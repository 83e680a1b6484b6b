"""Points of the probability simplex S^{m-1}.

Indices exposed to callers (vertices, faces, supports) are 1-based, the way
species are labelled in the population-genetics setting; arrays underneath
are ordinary 0-based numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import BadSum, DimensionMismatch, EmptyFace, EmptyVector, IndexOutOfRange, NegativeCoordinate

CLAMP_TOL = 1e-12
SUM_TOL = 1e-6
SUPPORT_TOL = 1e-12
# floor applied to coordinates read back from log-space orbits
UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    """A probability vector with ``m`` coordinates.

    Construction clamps entries in ``[-1e-12, 0)`` to zero and divides by the
    coordinate sum, so every instance is non-negative and sums to one up to
    rounding.
    """

    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.array(self.coords, dtype=np.float64).ravel()
        if x.size == 0:
            raise EmptyVector("a simplex point needs at least one coordinate")
        if not np.all(np.isfinite(x)):
            raise BadSum(f"non-finite coordinates: {x}")
        if np.any(x < -CLAMP_TOL):
            bad = int(np.argmin(x))
            raise NegativeCoordinate(f"coordinate {bad + 1} is {x[bad]!r}")
        x[x < 0] = 0.0
        s = x.sum()
        if abs(s - 1.0) > SUM_TOL:
            raise BadSum(f"coordinates sum to {s!r}")
        x /= s
        x.flags.writeable = False
        object.__setattr__(self, "coords", x)

    @property
    def dim(self) -> int:
        return self.coords.size

    def __len__(self):
        return self.coords.size

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords.tolist())

    def __eq__(self, other):
        if not isinstance(other, SimplexPoint):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def __repr__(self):
        return f"SimplexPoint({np.array2string(self.coords, precision=6, separator=', ')})"

    def csv_fields(self) -> list[str]:
        return [format_float(v) for v in self.coords]


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def make_point(raw: Iterable[float]) -> SimplexPoint:
    return SimplexPoint(np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=np.float64))


def vertex(m: int, i: int) -> SimplexPoint:
    """The vertex ``e_i`` of S^{m-1} (``i`` is 1-based)."""
    if m < 1 or not 1 <= i <= m:
        raise IndexOutOfRange(f"vertex {i} does not exist in dimension {m}")
    x = np.zeros(m)
    x[i - 1] = 1.0
    return SimplexPoint(x)


def barycenter(m: int) -> SimplexPoint:
    if m < 1:
        raise EmptyVector("dimension must be at least 1")
    return SimplexPoint(np.full(m, 1.0 / m))


def distance(x: SimplexPoint, y: SimplexPoint) -> float:
    """Euclidean distance ``|x - y|``."""
    if x.dim != y.dim:
        raise DimensionMismatch(f"dimensions differ: {x.dim} vs {y.dim}")
    return float(np.linalg.norm(x.coords - y.coords))


def support(x: SimplexPoint) -> frozenset[int]:
    """1-based indices of coordinates above the support tolerance."""
    return frozenset(int(i) + 1 for i in np.flatnonzero(x.coords > SUPPORT_TOL))


def check_face(m: int, face: Iterable[int]) -> tuple[int, ...]:
    """Validate a 1-based face and return it sorted."""
    f = tuple(sorted(set(int(i) for i in face)))
    if not f:
        raise EmptyFace("face must contain at least one index")
    if f[0] < 1 or f[-1] > m:
        raise IndexOutOfRange(f"face {f} is not inside dimension {m}")
    return f


def sample_uniform(m: int, face: Iterable[int], rng_seed) -> SimplexPoint:
    """Uniform point on the relative interior of ``face``.

    Normalized exponential variates give the flat Dirichlet distribution.
    ``rng_seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    f = check_face(m, face)
    rng = np.random.default_rng(rng_seed)
    idx = np.array(f) - 1
    while True:
        e = rng.exponential(size=len(f))
        x = np.zeros(m)
        x[idx] = e / e.sum()
        if np.all(x[idx] > SUPPORT_TOL):
            return SimplexPoint(x)


def from_log(l: np.ndarray) -> tuple[SimplexPoint, bool]:
    """Read a log-coordinate state back as a point.

    Returns the point and whether a support coordinate fell below
    ``UNDERFLOW_FLOOR`` and was floored to zero.
    """
    with np.errstate(under="ignore"):
        x = np.exp(l)
    lost = bool(np.any(np.isfinite(l) & (x < UNDERFLOW_FLOOR)))
    x[x < UNDERFLOW_FLOOR] = 0.0
    return SimplexPoint(x), lost


def to_log(x: SimplexPoint) -> np.ndarray:
    """Log-coordinates with ``-inf`` outside ``support(x)``."""
    c = np.where(x.coords > SUPPORT_TOL, x.coords, 0.0)
    with np.errstate(divide="ignore"):
        return np.log(c)
