"""General quadratic stochastic operators and their Volterra subclass.

A general operator is the heredity tensor ``p[i, j, k] = P_{ij,k}`` acting by
``x'_k = sum_{i,j} P_{ij,k} x_i x_j``.  A Volterra operator has
``P_{ij,k} = 0`` unless ``k`` is ``i`` or ``j``; it is carried by a
skew-symmetric matrix ``a`` with ``x'_k = x_k (1 + sum_i a_ki x_i)``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionMismatch, InvalidOperator, NotVolterra, SamplingBudgetExceeded
from .simplex import SimplexPoint, format_float

SKEW_TOL = 1e-12
STOCHASTIC_TOL = 1e-9
VOLTERRA_TOL = 1e-12
MAX_REJECTIONS = 1000

# exact infimum of the positivity threshold for m = 2; no sharp value is
# known for m >= 3, so check_positivity_bound always uses 1/(2m)
ALPHA_2_INFIMUM = (3.0 - math.sqrt(7.0)) / 2.0


@dataclass(frozen=True, eq=False)
class QsoTensor:
    """Heredity coefficients ``p[i, j, k]`` of a quadratic stochastic operator.

    The tensor is symmetrized in ``(i, j)`` on construction, so the symmetry
    invariant holds exactly afterwards.
    """

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.ndim != 3 or not (p.shape[0] == p.shape[1] == p.shape[2]) or p.shape[0] < 1:
            raise InvalidOperator(f"heredity tensor must be m x m x m, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvalidOperator("heredity tensor has non-finite entries")
        p = 0.5 * (p + p.transpose(1, 0, 2))
        if p.min() < 0:
            raise InvalidOperator(f"negative heredity coefficient {p.min()!r}")
        drift = np.abs(p.sum(axis=2) - 1.0).max()
        if drift > STOCHASTIC_TOL:
            raise InvalidOperator(f"rows of P_ij,. do not sum to 1 (max drift {drift:.3g})")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def m(self) -> int:
        return self.p.shape[0]

    def __repr__(self):
        return f"QsoTensor(m={self.m})"


@dataclass(frozen=True, eq=False)
class VolterraMatrix:
    """Skew-symmetric matrix of a Volterra operator.

    Only the strict upper triangle is read; the lower triangle is its negated
    mirror and the diagonal is zero.  Use :meth:`from_matrix` to build one from
    a full matrix with a skew-symmetry check.
    """

    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidOperator(f"Volterra matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidOperator("Volterra matrix has non-finite entries")
        upper = np.triu(a, 1)
        if np.abs(upper).max(initial=0.0) > 1.0:
            raise InvalidOperator("Volterra matrix entries must lie in [-1, 1]")
        a = upper - upper.T
        a.flags.writeable = False
        object.__setattr__(self, "a", a)

    @classmethod
    def from_matrix(cls, a, tol: float = SKEW_TOL) -> "VolterraMatrix":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidOperator(f"Volterra matrix must be square, got shape {a.shape}")
        skew = np.abs(a + a.T).max(initial=0.0)
        if skew > tol:
            raise InvalidOperator(f"matrix is not skew-symmetric (max |a + a^T| = {skew:.3g})")
        return cls(a)

    @classmethod
    def from_upper(cls, m: int, values) -> "VolterraMatrix":
        """Build from the strict upper triangle listed row by row."""
        a = np.zeros((m, m))
        a[np.triu_indices(m, 1)] = values
        return cls(a)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def b(self) -> np.ndarray:
        """``1 + a``: non-negative, and ``(b @ x)_k = 1 + (a @ x)_k`` on the simplex."""
        return 1.0 + self.a

    def __neg__(self):
        return VolterraMatrix(-self.a)

    def __repr__(self):
        return f"VolterraMatrix({np.array2string(self.a, precision=4, separator=', ')})"


def identity_tensor(m: int) -> QsoTensor:
    """Tensor of the identity operator (the Volterra operator with ``a = 0``)."""
    p = np.zeros((m, m, m))
    for i in range(m):
        for j in range(m):
            if i == j:
                p[i, i, i] = 1.0
            else:
                p[i, j, i] = p[i, j, j] = 0.5
    return QsoTensor(p)


def _check_dim(m: int, x: SimplexPoint):
    if x.dim != m:
        raise DimensionMismatch(f"operator acts on dimension {m}, point has {x.dim}")


def apply_qso(t: QsoTensor, x: SimplexPoint) -> SimplexPoint:
    _check_dim(t.m, x)
    c = x.coords
    return SimplexPoint(np.einsum("ijk,i,j->k", t.p, c, c))


def apply_volterra(v: VolterraMatrix, x: SimplexPoint) -> SimplexPoint:
    # x_k * (b @ x)_k sums non-negative terms, so there is no cancellation
    # when 1 + (a @ x)_k is close to zero
    _check_dim(v.m, x)
    c = x.coords
    return SimplexPoint(c * (v.b @ c))


def volterra_to_tensor(v: VolterraMatrix) -> QsoTensor:
    m = v.m
    p = np.zeros((m, m, m))
    for k in range(m):
        p[k, k, k] = 1.0
        for i in range(m):
            if i != k:
                p[i, k, k] = p[k, i, k] = (1.0 + v.a[k, i]) / 2.0
    return QsoTensor(p)


def tensor_to_volterra(t: QsoTensor) -> VolterraMatrix:
    m = t.m
    i, j, k = np.indices((m, m, m))
    off = (k != i) & (k != j)
    worst = t.p[off].max(initial=0.0)
    if worst > VOLTERRA_TOL:
        bad = np.argwhere(off & (t.p == worst))[0] + 1
        raise NotVolterra(f"P_{{{bad[0]}{bad[1]},{bad[2]}}} = {worst!r} although {bad[2]} is not a parent")
    a = np.zeros((m, m))
    for r in range(m):
        for c in range(r + 1, m):
            a[r, c] = 2.0 * t.p[r, c, r] - 1.0
    return VolterraMatrix(np.clip(a, -1.0, 1.0))


@dataclass(frozen=True)
class PositivityVerdict:
    satisfied: bool
    min_coefficient: float
    threshold: float
    # (3 - sqrt 7)/2 when m == 2, for reference only
    infimum_m2: float | None = None


def check_positivity_bound(t: QsoTensor) -> PositivityVerdict:
    """Sufficient regularity test ``min P_{ij,k} > 1/(2m)``.

    A satisfied verdict guarantees the operator is regular; an unsatisfied one
    says nothing.
    """
    threshold = 1.0 / (2 * t.m)
    low = float(t.p.min())
    return PositivityVerdict(
        satisfied=low > threshold,
        min_coefficient=low,
        threshold=threshold,
        infimum_m2=ALPHA_2_INFIMUM if t.m == 2 else None,
    )


def counterexample_operator() -> VolterraMatrix:
    """Volterra matrix of the cyclic operator on S^2.

    ``x1' = x1^2 + 2 x1 x2``, ``x2' = x2^2 + 2 x2 x3``, ``x3' = x3^2 + 2 x1 x3``:
    fixed points are the vertices and the barycenter, and no interior orbit
    other than the barycenter converges.
    """
    return VolterraMatrix.from_upper(3, [1.0, -1.0, 1.0])


def random_transversal(m: int, rng_seed) -> tuple[VolterraMatrix, int]:
    """Random transversal matrix with i.i.d. uniform upper-triangle entries.

    Returns the matrix and the number of rejected draws.  Transversal
    matrices are generic, so rejections are practically never seen; hitting
    the budget points at a broken transversality check.
    """
    from .fixed_points import check_transversality

    if m < 2:
        raise InvalidOperator("random operators need m >= 2")
    rng = np.random.default_rng(rng_seed)
    n_upper = m * (m - 1) // 2
    for rejections in range(MAX_REJECTIONS + 1):
        v = VolterraMatrix.from_upper(m, rng.uniform(-1.0, 1.0, size=n_upper))
        if check_transversality(v).transversal:
            return v, rejections
    raise SamplingBudgetExceeded(f"no transversal matrix after {MAX_REJECTIONS} rejections", MAX_REJECTIONS)


# -- file format -------------------------------------------------------------

Operator = Union[VolterraMatrix, QsoTensor]


def _nested(values) -> str:
    if isinstance(values, np.ndarray):
        values = values.tolist()
    if isinstance(values, list):
        return "[" + ",".join(_nested(v) for v in values) + "]"
    return format_float(values)


def dumps_operator(op: Operator) -> str:
    """Canonical text form; numbers carry 17 significant digits."""
    if isinstance(op, VolterraMatrix):
        return f'{{"type": "volterra", "m": {op.m}, "a": {_nested(op.a)}}}\n'
    return f'{{"type": "qso", "m": {op.m}, "p": {_nested(op.p)}}}\n'


def loads_operator(text: str) -> Operator:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidOperator(f"operator file is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise InvalidOperator("operator file must hold an object")
    kind = obj.get("type")
    m = obj.get("m")
    if not isinstance(m, int) or m < 1:
        raise InvalidOperator(f"bad dimension m = {m!r}")
    try:
        if kind == "volterra":
            a = np.array(obj["a"], dtype=np.float64)
            if a.shape != (m, m):
                raise InvalidOperator(f"matrix shape {a.shape} does not match m = {m}")
            if np.abs(np.diag(a)).max() > SKEW_TOL:
                raise InvalidOperator("diagonal of a Volterra matrix must be zero")
            return VolterraMatrix.from_matrix(a)
        if kind == "qso":
            p = np.array(obj["p"], dtype=np.float64)
            if p.shape != (m, m, m):
                raise InvalidOperator(f"tensor shape {p.shape} does not match m = {m}")
            asym = np.abs(p - p.transpose(1, 0, 2)).max()
            if asym > STOCHASTIC_TOL:
                raise InvalidOperator(f"tensor is not symmetric in (i, j) (max gap {asym:.3g})")
            return QsoTensor(p)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidOperator):
            raise
        raise InvalidOperator(f"malformed operator: {exc}") from None
    raise InvalidOperator(f"unknown operator type {kind!r}")


def load_operator(path) -> Operator:
    with open(path, encoding="utf-8") as fh:
        return loads_operator(fh.read())


def operator_digest(op: Operator) -> str:
    return hashlib.sha256(dumps_operator(op).encode()).hexdigest()
