import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from volterra_qso.errors import DegenerateFace, FaceBudgetExceeded, InvalidBudget, UnsupportedDimension, UnsupportedPeriod
from volterra_qso.fixed_points import (
    FixedPointKind,
    check_transversality,
    enumerate_fixed_points,
    find_periodic_points,
    fixed_points_on_face,
    leading_principal_minors,
)
from volterra_qso.operators import VolterraMatrix, apply_volterra, counterexample_operator, random_transversal
from volterra_qso.simplex import distance


def test_two_by_two_minor():
    v = VolterraMatrix.from_upper(2, [0.3])
    rep = check_transversality(v)
    assert rep.minors[0][0] == 2
    assert rep.minors[0][1] == pytest.approx(0.09, abs=1e-15)
    assert rep.transversal


def test_odd_minors_vanish():
    v, _ = random_transversal(5, 0)
    minors = leading_principal_minors(v.a)
    assert all(abs(minors[k]) < 1e-12 for k in (0, 2, 4))


def test_non_transversal_detected():
    v = VolterraMatrix.from_upper(3, [0.0, 0.5, 0.5])
    assert not check_transversality(v).transversal


def test_counterexample_fixed_points():
    recs = enumerate_fixed_points(counterexample_operator())
    assert len(recs) == 4
    kinds = {tuple(sorted(r.face)): r for r in recs}
    assert set(kinds) == {(1,), (2,), (3,), (1, 2, 3)}
    assert np.allclose(kinds[(1, 2, 3)].point.coords, 1 / 3, atol=1e-12)
    assert kinds[(1, 2, 3)].classification is FixedPointKind.SIMPLEX_INTERIOR
    assert kinds[(2,)].classification is FixedPointKind.VERTEX
    assert all(r.residual <= 1e-9 for r in recs)


def test_face_interior_point_on_an_edge():
    # a12 = 0 would make the edge a continuum; a12 != 0 leaves none on it
    v = VolterraMatrix.from_upper(3, [0.5, -0.5, 0.5])
    assert fixed_points_on_face(v, [1, 2]) is None


def test_degenerate_face_raises():
    v = VolterraMatrix.from_upper(3, [0.0, 0.5, 0.5])
    with pytest.raises(DegenerateFace):
        fixed_points_on_face(v, [1, 2])


def test_face_budget():
    with pytest.raises(FaceBudgetExceeded):
        enumerate_fixed_points(VolterraMatrix(np.zeros((21, 21))))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_enumerated_points_are_fixed_and_distinct(m, seed):
    v, _ = random_transversal(m, seed)
    recs = enumerate_fixed_points(v)
    assert len(recs) >= m  # every vertex
    for r in recs:
        assert distance(apply_volterra(v, r.point), r.point) <= 1e-9
    for i, r in enumerate(recs):
        for s in recs[i + 1:]:
            assert distance(r.point, s.point) > 1e-8


def test_periodic_scope_errors():
    with pytest.raises(UnsupportedDimension):
        find_periodic_points(VolterraMatrix.from_upper(2, [0.5]), 2, 0.05)
    with pytest.raises(UnsupportedPeriod):
        find_periodic_points(counterexample_operator(), 4, 0.05)
    with pytest.raises(InvalidBudget):
        find_periodic_points(counterexample_operator(), 2, 0.5)


def test_periodic_search_coarse_grid_empty():
    assert find_periodic_points(counterexample_operator(), 2, 0.1) == []
