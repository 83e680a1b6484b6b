from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from volterra_qso.errors import InvalidOperator, ZeroOffDiagonal
from volterra_qso.operators import VolterraMatrix, counterexample_operator
from volterra_qso.tournament import (
    Tournament,
    extract_tournament,
    find_three_cycle,
    is_transitive,
    random_tournament,
    score_sequence,
)


def brute_force_transitive(t):
    # transitive iff some vertex ordering puts every edge forward
    m = t.m
    return any(all(t.beats[p[i], p[j]] for i in range(m) for j in range(i + 1, m))
               for p in permutations(range(m)))


def test_counterexample_tournament():
    t = extract_tournament(counterexample_operator())
    assert t.edges() == [(1, 3), (2, 1), (3, 2)]
    assert t.render() == "1->3\n2->1\n3->2\n"
    assert find_three_cycle(t) == (1, 3, 2)
    assert score_sequence(t) == (1, 1, 1)
    assert not is_transitive(t)


def test_transitive_chain(chain3):
    t = extract_tournament(chain3)
    assert is_transitive(t)
    assert find_three_cycle(t) is None
    assert score_sequence(t) == (0, 1, 2)


def test_reversal_flips_edges():
    t = extract_tournament(counterexample_operator())
    assert t.reversed().edges() == [(1, 2), (2, 3), (3, 1)]
    assert extract_tournament(-counterexample_operator()) == t.reversed()


def test_zero_entry_has_no_tournament():
    with pytest.raises(ZeroOffDiagonal):
        extract_tournament(VolterraMatrix.from_upper(3, [0.5, 0.0, 0.2]))


def test_incomplete_adjacency_rejected():
    with pytest.raises(InvalidOperator):
        Tournament(np.zeros((3, 3), dtype=bool))


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_three_verdicts_agree_with_brute_force(m, seed):
    t = random_tournament(m, seed)
    expected = brute_force_transitive(t)
    assert is_transitive(t) == expected
    assert (find_three_cycle(t) is None) == expected
    assert (score_sequence(t) == tuple(range(m))) == expected


@given(st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_cycle_witness_is_a_cycle(m, seed):
    t = random_tournament(m, seed)
    c = find_three_cycle(t)
    if c is not None:
        i, j, k = (x - 1 for x in c)
        assert t.beats[i, j] and t.beats[j, k] and t.beats[k, i]


def test_edges_sorted_and_one_based():
    t = random_tournament(6, 1)
    edges = t.edges()
    assert edges == sorted(edges)
    assert len(edges) == 15
    assert all(1 <= i <= 6 and 1 <= j <= 6 for i, j in edges)
