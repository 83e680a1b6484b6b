import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from volterra_qso.dynamics import (
    DifferenceVerdict,
    Empirical,
    PairVerdict,
    TrialBudget,
    Verdict,
    cesaro_accumulator,
    cesaro_series,
    cesaro_step,
    classify_operator,
    ergodic_pair_test,
    iterate,
    orbit,
    random_starts,
    start_faces,
    successive_difference_test,
)
from volterra_qso.errors import InvalidBudget, NotTransversal, SupportMismatch
from volterra_qso.fixed_points import enumerate_fixed_points
from volterra_qso.operators import VolterraMatrix, apply_volterra, counterexample_operator, random_transversal
from volterra_qso.simplex import barycenter, distance, make_point, support, vertex
from volterra_qso.tournament import extract_tournament, is_transitive


def test_fixed_start_converges_immediately(cyclic):
    for x in (vertex(3, 1), barycenter(3)):
        rep = iterate(cyclic, x, 1000)
        assert rep.verdict is Verdict.CONVERGED
        assert rep.converged_at == 0
        assert rep.limit_candidate == x


def test_transitive_orbit_reaches_sink_vertex(chain3):
    rep = iterate(chain3, make_point([0.3, 0.3, 0.4]), 100_000)
    assert rep.verdict is Verdict.CONVERGED
    assert distance(rep.limit_candidate, vertex(3, 3)) < 1e-6
    assert rep.limit_residual < 1e-8


def test_saddle_vertex_is_not_a_limit():
    # x1 grows by about 1% per step near e2: tiny steps there are a transit
    v = VolterraMatrix.from_upper(2, [0.01])
    rep = iterate(v, make_point([1e-9, 1 - 1e-9]), 100_000)
    assert rep.verdict is Verdict.CONVERGED
    assert distance(rep.limit_candidate, vertex(2, 1)) < 1e-6
    assert rep.steps_run > 1000


def test_iterate_samples_and_budget(chain3):
    rep = iterate(chain3, barycenter(3), 50, window=10, stride=1000)
    ns = [n for n, _ in rep.sampled_states]
    assert ns[0] == 0 and ns[-1] == rep.steps_run
    assert len(ns) == len(set(ns))
    with pytest.raises(InvalidBudget):
        iterate(chain3, barycenter(3), 5, window=10)


def test_orbit_matches_direct_application(cyclic):
    x = make_point([0.2, 0.3, 0.5])
    states = orbit(cyclic, x, 50)
    for n in range(50):
        x = apply_volterra(cyclic, x)
        assert np.abs(states[n + 1] - x.coords).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_support_invariant_along_orbit(m, seed):
    v, _ = random_transversal(m, seed)
    x0 = random_starts(m, 1, seed)[0]
    states = orbit(v, x0, 2000)
    off = [k for k in range(m) if k + 1 not in support(x0)]
    assert not states[:, off].any()
    assert np.allclose(states.sum(axis=1), 1.0, atol=1e-12)


def test_cesaro_hand_values():
    acc = cesaro_accumulator(2, 2)
    for s in ([1.0, 0.0], [0.0, 1.0], [0.5, 0.5]):
        acc = cesaro_step(acc, make_point(s))
    first, second = (p.coords for p in acc.means)
    assert np.allclose(first, [0.5, 0.5], atol=1e-15)
    assert np.allclose(second, [2 / 3, 1 / 3], atol=1e-15)


def test_cesaro_series_matches_stepwise():
    states = np.random.default_rng(0).dirichlet(np.ones(3), size=40)
    series = cesaro_series(states, 3)
    acc = cesaro_accumulator(3, 3)
    for t, s in enumerate(states):
        acc = cesaro_step(acc, make_point(s))
        assert np.allclose(series[t], acc.values, atol=1e-14)
    assert np.allclose(series[-1, 0], states.mean(axis=0), atol=1e-14)


def test_cesaro_step_is_functional():
    acc = cesaro_accumulator(1, 2)
    cesaro_step(acc, make_point([1, 0]))
    assert acc.n == 0 and not acc.values.any()
    with pytest.raises(InvalidBudget):
        cesaro_accumulator(0, 2)


def test_ergodic_pair_contracts_for_transitive(chain3):
    rep = ergodic_pair_test(chain3, make_point([0.2, 0.3, 0.5]), make_point([0.5, 0.3, 0.2]), 20_000)
    assert rep.verdict is PairVerdict.CONTRACTING
    assert rep.distances[0][0] == 0 and rep.distances[-1][0] == 20_000


def test_ergodic_pair_requires_equal_support(chain3):
    with pytest.raises(SupportMismatch):
        ergodic_pair_test(chain3, make_point([0.5, 0.5, 0]), barycenter(3))


def test_successive_differences_vanish_for_transitive(chain3):
    rep = successive_difference_test(chain3, barycenter(3), 20_000)
    assert rep.verdict is DifferenceVerdict.VANISHING
    assert rep.burn_in == 2000


def test_start_faces_round_robin():
    faces = start_faces(4, 8, 0)
    assert sorted(set(faces)) == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    assert all(faces.count(f) == 2 for f in set(faces))
    assert start_faces(2, 3, 0) == [(1, 2)] * 3


def test_random_starts_reproducible():
    a = random_starts(5, 6, 11, stream=2)
    b = random_starts(5, 6, 11, stream=2)
    assert all(x == y for x, y in zip(a, b))


def test_classify_transitive(chain3):
    rep = classify_operator(chain3, TrialBudget(n_starts=4, n_pairs=4, max_steps=20_000))
    assert rep.transitive and rep.consistency_ok
    assert all(c.verdict is Empirical.HOLDS for c in rep.empirical.values())
    assert len(rep.fixed_points) == len(enumerate_fixed_points(chain3))


def test_classify_cyclic(cyclic):
    rep = classify_operator(cyclic, TrialBudget(n_starts=4, n_pairs=4, max_steps=20_000))
    assert not rep.transitive
    assert rep.three_cycle == (1, 3, 2)
    assert rep.consistency_ok
    d = rep.to_dict()
    assert d["tournament_edges"] == ["1->3", "2->1", "3->2"]


def test_classify_rejects_non_transversal():
    with pytest.raises(NotTransversal):
        classify_operator(VolterraMatrix.from_upper(3, [0.0, 0.5, 0.5]))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(6))
def test_classify_agrees_with_transitivity(seed):
    v, _ = random_transversal(4, seed)
    rep = classify_operator(v, TrialBudget(n_starts=6, n_pairs=6, max_steps=50_000, seed=seed))
    assert rep.transitive == is_transitive(extract_tournament(v))
    assert rep.consistency_ok
