import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from volterra_qso.errors import BadSum, EmptyFace, EmptyVector, IndexOutOfRange, NegativeCoordinate
from volterra_qso.simplex import (
    SimplexPoint,
    barycenter,
    check_face,
    distance,
    format_float,
    from_log,
    make_point,
    sample_uniform,
    support,
    to_log,
    vertex,
)


def test_vertex_distance_is_sqrt2():
    assert distance(vertex(3, 1), vertex(3, 2)) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_vertex_is_one_based():
    assert vertex(4, 4).coords.tolist() == [0, 0, 0, 1]
    with pytest.raises(IndexOutOfRange):
        vertex(3, 0)
    with pytest.raises(IndexOutOfRange):
        vertex(3, 4)


def test_barycenter():
    assert np.allclose(barycenter(4).coords, 0.25)


@pytest.mark.parametrize("raw,err", [([], EmptyVector), ([0.5, -0.1, 0.6], NegativeCoordinate),
                                     ([0.5, 0.6], BadSum), ([float("nan"), 1.0], BadSum)])
def test_rejects_invalid(raw, err):
    with pytest.raises(err):
        make_point(raw)


def test_clamps_rounding_noise_and_renormalizes():
    p = make_point([-1e-13, 0.5 + 1e-7, 0.5])
    assert p.coords[0] == 0.0
    assert p.coords.sum() == pytest.approx(1.0, abs=1e-15)


def test_coords_read_only():
    p = barycenter(3)
    with pytest.raises(ValueError):
        p.coords[0] = 1.0


def test_support_one_based_with_tolerance():
    assert support(make_point([0.5, 1e-13, 0.5])) == frozenset({1, 3})


def test_check_face():
    assert check_face(4, [3, 1]) == (1, 3)
    with pytest.raises(EmptyFace):
        check_face(3, [])
    with pytest.raises(IndexOutOfRange):
        check_face(3, [1, 5])


def test_format_float_round_trips():
    for v in (0.1, 1 / 3, 1e-300, 2.0 ** -1074):
        assert float(format_float(v)) == v


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_sample_uniform_support_is_face(m, seed):
    r = np.random.default_rng(seed)
    k = int(r.integers(1, m + 1))
    face = sorted(r.choice(m, size=k, replace=False) + 1)
    p = sample_uniform(m, face, seed)
    assert support(p) == frozenset(face)
    assert p.coords.sum() == pytest.approx(1.0, abs=1e-12)


def test_sample_uniform_reproducible():
    assert sample_uniform(5, [1, 2, 4], 7) == sample_uniform(5, [1, 2, 4], 7)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8).filter(lambda v: sum(v) > 1e-3))
def test_log_round_trip(raw):
    p = make_point(np.array(raw) / sum(raw))
    back, lost = from_log(to_log(p))
    assert not lost
    # coordinates at or below the support tolerance are off the support
    kept = np.where(p.coords > 1e-12, p.coords, 0.0)
    assert np.allclose(back.coords, kept / kept.sum(), atol=1e-14)


def test_from_log_flags_underflow():
    p, lost = from_log(np.array([0.0, -800.0, -np.inf]))
    assert lost
    assert p.coords.tolist() == [1.0, 0.0, 0.0]


def test_equality_and_hash():
    a = make_point([0.25, 0.75])
    b = SimplexPoint(np.array([0.25, 0.75]))
    assert a == b and hash(a) == hash(b)
    assert a.csv_fields() == ["0.25", "0.75"]
