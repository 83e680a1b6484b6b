"""Orbits, Cesaro means, and the empirical side of the regularity theorem.

For a transversal Volterra operator the following are equivalent: every
orbit converges (regularity), the tournament has no 3-cycle (transitivity),
orbits started on the same face merge (the ergodic principle), and
successive differences ``|V^{n+1} x - V^n x|`` vanish for every start.
Transitivity is decided exactly by :mod:`volterra_qso.tournament`; the
functions here probe the other three numerically.

All orbits run in log-coordinates (see :mod:`volterra_qso._kernels`), so
supports are preserved exactly and orbits that hug the boundary are
followed faithfully instead of being absorbed by underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, InvalidBudget, NotTransversal, SupportMismatch
from .fixed_points import FixedPointRecord, TransversalityReport, check_transversality, enumerate_fixed_points
from .operators import VolterraMatrix, operator_digest
from .simplex import SimplexPoint, distance, from_log, sample_uniform, support, to_log
from .tournament import extract_tournament, find_three_cycle, is_transitive

# log-growth above which a support coordinate counts as escaping a candidate limit
ESCAPE_TOL = 1e-6
LIMIT_MATCH_TOL = 1e-6
UNDERFLOW_LOG = math.log(1e-300)


class Verdict(str, Enum):
    CONVERGED = "converged"
    # kept for report compatibility; iterate never emits it because running
    # out of budget is not a proof of non-convergence
    NOT_CONVERGED = "not_converged"
    BUDGET_EXHAUSTED = "budget_exhausted"


class PairVerdict(str, Enum):
    CONTRACTING = "contracting"
    NON_CONTRACTING = "non_contracting"
    INCONCLUSIVE = "inconclusive"


class DifferenceVerdict(str, Enum):
    VANISHING = "vanishing"
    NON_VANISHING = "non_vanishing"


class Empirical(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


def _prepare(v: VolterraMatrix):
    b = np.ascontiguousarray(v.b)
    with np.errstate(divide="ignore"):
        logb = np.log(b)
    return b, logb


def _check_dim(v: VolterraMatrix, x: SimplexPoint):
    if x.dim != v.m:
        raise DimensionMismatch(f"operator acts on dimension {v.m}, point has {x.dim}")


@dataclass(frozen=True)
class TrajectoryReport:
    start: SimplexPoint
    steps_run: int
    verdict: Verdict
    limit_candidate: SimplexPoint | None
    limit_residual: float | None
    max_late_step: float
    sampled_states: list = field(repr=False)
    converged_at: int | None = None
    # largest step after max_steps // 10, for orbits that ran out of budget
    tail_max_step: float | None = None
    # a support coordinate dropped below 1e-300; reported states show it as 0
    underflow: bool = False


def iterate(
    v: VolterraMatrix,
    x0: SimplexPoint,
    max_steps: int = 100_000,
    eps: float = 1e-9,
    window: int = 100,
    stride: int = 1000,
) -> TrajectoryReport:
    """Iterate ``v`` from ``x0`` until the orbit settles or the budget ends.

    Convergence needs ``window`` consecutive steps below ``eps``, a candidate
    with ``|V x* - x*| < 10 eps``, and no support coordinate still growing
    at the candidate (an orbit resting next to a saddle vertex is not
    converging).  ``converged_at`` is where the final run of small steps
    began; an exact fixed point converges at step 0.
    """
    _check_dim(v, x0)
    if not (max_steps >= window >= 1) or not eps > 0 or stride < 1:
        raise InvalidBudget(f"need max_steps >= window >= 1, eps > 0, stride >= 1 "
                            f"(got {max_steps}, {window}, {eps}, {stride})")
    b, logb = _prepare(v)
    n_last, run_start, converged, residual, lowest, norms, sample_n, sample_l = _kernels.iterate(
        b, logb, to_log(x0), max_steps, eps, window, ESCAPE_TOL, stride
    )
    samples = [(int(n), from_log(l)[0]) for n, l in zip(sample_n, sample_l)]
    last = samples[-1][1]
    if converged:
        late = norms[max(0, n_last - window):]
        return TrajectoryReport(
            start=x0,
            steps_run=int(n_last),
            verdict=Verdict.CONVERGED,
            limit_candidate=last,
            limit_residual=float(residual),
            max_late_step=float(late.max()) if late.size else 0.0,
            sampled_states=samples,
            converged_at=int(run_start),
            underflow=lowest < UNDERFLOW_LOG,
        )
    late = norms[max(0, n_last - max(window, max_steps // 10)):]
    return TrajectoryReport(
        start=x0,
        steps_run=int(n_last),
        verdict=Verdict.BUDGET_EXHAUSTED,
        limit_candidate=None,
        limit_residual=None,
        max_late_step=float(late.max()) if late.size else 0.0,
        sampled_states=samples,
        tail_max_step=float(norms[max_steps // 10:].max()),
        underflow=lowest < UNDERFLOW_LOG,
    )


def orbit(v: VolterraMatrix, x0: SimplexPoint, n_steps: int) -> np.ndarray:
    """Coordinates of ``x^(0) .. x^(n_steps)`` as an ``(n_steps + 1, m)`` array.

    Coordinates below the double range read back as 0.
    """
    _check_dim(v, x0)
    b, logb = _prepare(v)
    with np.errstate(under="ignore"):
        return np.exp(_kernels.orbit(b, logb, to_log(x0), n_steps))


# -- Cesaro means ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CesaroAccumulator:
    """Running Cesaro means of orders ``1..order``.

    The order-1 mean averages the absorbed states, and the order-j mean
    averages the sequence of order-(j-1) means.
    """

    order: int
    n: int
    values: np.ndarray = field(repr=False)

    @property
    def means(self) -> list[SimplexPoint]:
        if self.n == 0:
            return []
        return [SimplexPoint(row) for row in self.values]


def cesaro_accumulator(order: int, m: int) -> CesaroAccumulator:
    if order < 1:
        raise InvalidBudget(f"Cesaro order must be >= 1, got {order}")
    return CesaroAccumulator(order, 0, np.zeros((order, m)))


def cesaro_step(acc: CesaroAccumulator, x: SimplexPoint) -> CesaroAccumulator:
    if x.dim != acc.values.shape[1]:
        raise DimensionMismatch(f"accumulator has dimension {acc.values.shape[1]}, point has {x.dim}")
    values = acc.values.copy()
    prev = x.coords
    w = 1.0 / (acc.n + 1)
    for j in range(acc.order):
        values[j] += (prev - values[j]) * w
        prev = values[j]
    return CesaroAccumulator(acc.order, acc.n + 1, values)


def cesaro_series(states: np.ndarray, order: int) -> np.ndarray:
    """Same recurrence as :func:`cesaro_step`, over a whole orbit at once.

    ``out[t, j]`` is the order-(j+1) mean after absorbing ``states[:t+1]``.
    """
    if order < 1:
        raise InvalidBudget(f"Cesaro order must be >= 1, got {order}")
    return _kernels.running_means(np.ascontiguousarray(states, dtype=np.float64), order)


# -- ergodic principle and successive differences ----------------------------

@dataclass(frozen=True)
class ErgodicPairReport:
    x0: SimplexPoint
    y0: SimplexPoint
    distances: list = field(repr=False)
    final_window_max: float
    verdict: PairVerdict
    burn_in: int


def _tail_start(max_steps: int, burn_in: int | None) -> int:
    if max_steps < 1:
        raise InvalidBudget(f"max_steps must be positive, got {max_steps}")
    burn = max_steps // 10 if burn_in is None else burn_in
    if not 0 <= burn < max_steps:
        raise InvalidBudget(f"burn_in must lie in [0, max_steps), got {burn}")
    return burn


def ergodic_pair_test(
    v: VolterraMatrix,
    x0: SimplexPoint,
    y0: SimplexPoint,
    max_steps: int = 100_000,
    stride: int = 1000,
    delta_contract: float = 1e-6,
    delta_separate: float = 1e-2,
    burn_in: int | None = None,
) -> ErgodicPairReport:
    """Track ``|V^n x0 - V^n y0|`` for two starts with the same support.

    The verdict reads the largest distance over ``n`` in
    ``[burn_in, max_steps]`` (``burn_in`` defaults to ``max_steps // 10``).
    """
    _check_dim(v, x0)
    _check_dim(v, y0)
    if support(x0) != support(y0):
        raise SupportMismatch(f"supports differ: {sorted(support(x0))} vs {sorted(support(y0))}")
    if not delta_contract < delta_separate:
        raise InvalidBudget("delta_contract must be below delta_separate")
    if stride < 1:
        raise InvalidBudget("stride must be positive")
    burn = _tail_start(max_steps, burn_in)
    b, logb = _prepare(v)
    d = _kernels.pair_distances(b, logb, to_log(x0), to_log(y0), max_steps)
    tail = float(d[burn:].max())
    if tail < delta_contract:
        verdict = PairVerdict.CONTRACTING
    elif tail > delta_separate:
        verdict = PairVerdict.NON_CONTRACTING
    else:
        verdict = PairVerdict.INCONCLUSIVE
    idx = list(range(0, max_steps + 1, stride))
    if idx[-1] != max_steps:
        idx.append(max_steps)
    return ErgodicPairReport(x0, y0, [(n, float(d[n])) for n in idx], tail, verdict, burn)


@dataclass(frozen=True)
class DifferenceReport:
    verdict: DifferenceVerdict
    max_tail_step: float
    burn_in: int
    max_steps: int


def successive_difference_test(
    v: VolterraMatrix,
    x0: SimplexPoint,
    max_steps: int = 100_000,
    burn_in: int | None = None,
    delta: float = 1e-2,
) -> DifferenceReport:
    """Vanishing iff ``|x^(n+1) - x^(n)| < delta`` for all n in ``[burn_in, max_steps]``."""
    _check_dim(v, x0)
    burn = _tail_start(max_steps, burn_in)
    b, logb = _prepare(v)
    norms, _ = _kernels.step_norms(b, logb, to_log(x0), max_steps + 1)
    tail = float(norms[burn:].max())
    verdict = DifferenceVerdict.VANISHING if tail < delta else DifferenceVerdict.NON_VANISHING
    return DifferenceReport(verdict, tail, burn, max_steps)


# -- classification ----------------------------------------------------------

@dataclass(frozen=True)
class TrialBudget:
    n_starts: int = 10
    n_pairs: int = 10
    max_steps: int = 100_000
    eps: float = 1e-9
    window: int = 100
    burn_in: int | None = None
    delta: float = 1e-2
    delta_contract: float = 1e-6
    delta_separate: float = 1e-2
    seed: int = 0

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["burn_in"] = self.max_steps // 10 if self.burn_in is None else self.burn_in
        return d


def start_faces(m: int, n: int, seed) -> list[tuple[int, ...]]:
    """Faces for ``n`` random starts: shuffled round-robin over 3-element faces.

    A non-transitive tournament has a 3-cycle on some triple, and orbits on
    that face are where non-regularity shows; larger faces often funnel
    every orbit into a dominating vertex and hide it.  For ``m < 3`` every
    start uses the whole simplex.
    """
    if m < 3:
        return [tuple(range(1, m + 1))] * n
    rng = np.random.default_rng(seed)
    triples = [tuple(i + 1 for i in c) for c in combinations(range(m), 3)]
    faces: list[tuple[int, ...]] = []
    while len(faces) < n:
        faces.extend(triples[i] for i in rng.permutation(len(triples)))
    return faces[:n]


def random_starts(m: int, n: int, seed, stream: int = 0) -> list[SimplexPoint]:
    """``n`` uniform starts on :func:`start_faces`; each draw has its own seed."""
    faces = start_faces(m, n, [seed, stream])
    return [sample_uniform(m, f, [seed, stream, i]) for i, f in enumerate(faces)]


@dataclass(frozen=True)
class EmpiricalCheck:
    verdict: Empirical
    witnesses: int
    trials: int
    parameters: dict

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "witnesses": self.witnesses, "trials": self.trials,
                "parameters": self.parameters}


@dataclass(frozen=True)
class ClassificationReport:
    operator_digest: str
    transversal: TransversalityReport
    tournament_edges: list
    three_cycle: tuple | None
    transitive: bool
    regular_by_theorem: bool
    fixed_points: list[FixedPointRecord]
    empirical: dict
    consistency_ok: bool

    def to_dict(self) -> dict:
        return {
            "operator_digest": self.operator_digest,
            "transversal": {
                "transversal": self.transversal.transversal,
                "minors": [{"order": k, "determinant": d} for k, d in self.transversal.minors],
                "tolerance_used": self.transversal.tolerance_used,
            },
            "tournament_edges": [f"{i}->{j}" for i, j in self.tournament_edges],
            "three_cycle": list(self.three_cycle) if self.three_cycle else None,
            "transitive": self.transitive,
            "regular_by_theorem": self.regular_by_theorem,
            "fixed_points": [r.to_dict() for r in self.fixed_points],
            "empirical": {k: c.to_dict() for k, c in self.empirical.items()},
            "consistency_ok": self.consistency_ok,
        }


def _regularity(v, starts, fixed, budget) -> EmpiricalCheck:
    converged = witnesses = 0
    for x0 in starts:
        rep = iterate(v, x0, budget.max_steps, budget.eps, budget.window, stride=budget.max_steps)
        if rep.verdict is Verdict.CONVERGED:
            if any(distance(rep.limit_candidate, r.point) < LIMIT_MATCH_TOL for r in fixed):
                converged += 1
        elif rep.tail_max_step > budget.delta_separate:
            witnesses += 1
    if witnesses:
        verdict = Empirical.FAILS
    elif converged == len(starts):
        verdict = Empirical.HOLDS
    else:
        verdict = Empirical.INCONCLUSIVE
    params = {"starts": len(starts), "max_steps": budget.max_steps, "eps": budget.eps,
              "window": budget.window, "burn_in": budget.max_steps // 10,
              "oscillation_threshold": budget.delta_separate}
    return EmpiricalCheck(verdict, witnesses, len(starts), params)


def _ergodic(v, pairs, budget) -> EmpiricalCheck:
    contracting = witnesses = 0
    for x0, y0 in pairs:
        rep = ergodic_pair_test(v, x0, y0, budget.max_steps, budget.max_steps, budget.delta_contract,
                                budget.delta_separate, budget.burn_in)
        if rep.verdict is PairVerdict.NON_CONTRACTING:
            witnesses += 1
        elif rep.verdict is PairVerdict.CONTRACTING:
            contracting += 1
    if witnesses:
        verdict = Empirical.FAILS
    elif contracting == len(pairs):
        verdict = Empirical.HOLDS
    else:
        verdict = Empirical.INCONCLUSIVE
    params = {"pairs": len(pairs), "max_steps": budget.max_steps, "burn_in": budget.as_dict()["burn_in"],
              "delta_contract": budget.delta_contract, "delta_separate": budget.delta_separate}
    return EmpiricalCheck(verdict, witnesses, len(pairs), params)


def _condition_iv(v, starts, budget) -> EmpiricalCheck:
    witnesses = 0
    for x0 in starts:
        rep = successive_difference_test(v, x0, budget.max_steps, budget.burn_in, budget.delta)
        if rep.verdict is DifferenceVerdict.NON_VANISHING:
            witnesses += 1
    verdict = Empirical.FAILS if witnesses else Empirical.HOLDS
    params = {"starts": len(starts), "max_steps": budget.max_steps, "burn_in": budget.as_dict()["burn_in"],
              "delta": budget.delta}
    return EmpiricalCheck(verdict, witnesses, len(starts), params)


def classify_operator(v: VolterraMatrix, budget: TrialBudget = TrialBudget()) -> ClassificationReport:
    """Exact transitivity verdict next to empirical checks of the equivalent conditions.

    ``consistency_ok`` is false when any conclusive empirical verdict
    disagrees with transitivity, which the theorem rules out.
    """
    tr = check_transversality(v)
    if not tr.transversal:
        raise NotTransversal(f"operator is not transversal (leading minors {tr.minors})")
    tour = extract_tournament(v)
    transitive = is_transitive(tour)
    fixed = enumerate_fixed_points(v)

    starts = random_starts(v.m, budget.n_starts, budget.seed, stream=0)
    iv_starts = random_starts(v.m, budget.n_starts, budget.seed, stream=3)
    pair_a = random_starts(v.m, budget.n_pairs, budget.seed, stream=1)
    # second member of each pair: fresh draw on the same face
    pair_b = [sample_uniform(v.m, support(x), [budget.seed, 2, i]) for i, x in enumerate(pair_a)]

    empirical = {
        "regularity": _regularity(v, starts, fixed, budget),
        "ergodic_principle": _ergodic(v, list(zip(pair_a, pair_b)), budget),
        "condition_iv": _condition_iv(v, iv_starts, budget),
    }
    expected = Empirical.HOLDS if transitive else Empirical.FAILS
    consistent = all(c.verdict in (expected, Empirical.INCONCLUSIVE) for c in empirical.values())
    return ClassificationReport(
        operator_digest=operator_digest(v),
        transversal=tr,
        tournament_edges=tour.edges(),
        three_cycle=find_three_cycle(tour),
        transitive=transitive,
        regular_by_theorem=transitive,
        fixed_points=fixed,
        empirical=empirical,
        consistency_ok=consistent,
    )
