"""Tournaments of transversal Volterra operators.

Vertex ``i`` beats ``j`` (edge ``i -> j``) when ``a_ij < 0``.  Labels are
1-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidOperator, ZeroOffDiagonal
from .operators import VolterraMatrix

ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Tournament:
    """Complete directed graph stored as a boolean ``beats`` matrix."""

    beats: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.array(self.beats, dtype=bool)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise InvalidOperator(f"adjacency must be square, got shape {b.shape}")
        if b.diagonal().any():
            raise InvalidOperator("a vertex cannot beat itself")
        off = ~np.eye(b.shape[0], dtype=bool)
        if not np.all((b ^ b.T)[off]):
            raise InvalidOperator("every pair needs exactly one directed edge")
        b.flags.writeable = False
        object.__setattr__(self, "beats", b)

    @property
    def m(self) -> int:
        return self.beats.shape[0]

    def edges(self) -> list[tuple[int, int]]:
        return [(int(i) + 1, int(j) + 1) for i, j in np.argwhere(self.beats)]

    def reversed(self) -> "Tournament":
        return Tournament(self.beats.T)

    def render(self) -> str:
        return "".join(f"{i}->{j}\n" for i, j in self.edges())

    def __eq__(self, other):
        if not isinstance(other, Tournament):
            return NotImplemented
        return np.array_equal(self.beats, other.beats)

    def __hash__(self):
        return hash(self.beats.tobytes())


def extract_tournament(v: VolterraMatrix) -> Tournament:
    a = v.a
    m = v.m
    for i, j in combinations(range(m), 2):
        if abs(a[i, j]) <= ZERO_TOL:
            raise ZeroOffDiagonal(f"a_{i + 1}{j + 1} = {a[i, j]!r}; the tournament is undefined")
    return Tournament(a < 0)


def find_three_cycle(t: Tournament) -> tuple[int, int, int] | None:
    """Lexicographically smallest ``(i, j, k)`` with ``i -> j -> k -> i``."""
    b = t.beats
    m = t.m
    for i in range(m):
        for j in range(m):
            if not b[i, j]:
                continue
            for k in range(m):
                if b[j, k] and b[k, i]:
                    return i + 1, j + 1, k + 1
    return None


def is_transitive(t: Tournament) -> bool:
    """Exhaustive triple scan for a directed 3-cycle."""
    b = t.beats
    m = t.m
    for i, j, k in combinations(range(m), 3):
        # a triangle is cyclic in one of its two orientations
        if (b[i, j] and b[j, k] and b[k, i]) or (b[i, k] and b[k, j] and b[j, i]):
            return False
    return True


def score_sequence(t: Tournament) -> tuple[int, ...]:
    """Sorted out-degrees; ``(0, 1, ..., m-1)`` exactly for transitive tournaments."""
    return tuple(sorted(int(d) for d in t.beats.sum(axis=1)))


def random_tournament(m: int, rng_seed) -> Tournament:
    rng = np.random.default_rng(rng_seed)
    upper = np.triu(rng.random((m, m)) < 0.5, 1)
    lower = np.triu(~upper, 1).T
    return Tournament(upper | lower)
