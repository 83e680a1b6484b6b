"""Quadratic stochastic Volterra operators on the simplex.

Build operators, decide transversality and tournament transitivity,
enumerate fixed points, and cross-check regularity, the ergodic principle
and vanishing successive differences against transitivity numerically.
"""

from .dynamics import (
    CesaroAccumulator,
    ClassificationReport,
    ErgodicPairReport,
    TrajectoryReport,
    TrialBudget,
    cesaro_accumulator,
    cesaro_series,
    cesaro_step,
    classify_operator,
    ergodic_pair_test,
    iterate,
    orbit,
    random_starts,
    successive_difference_test,
)
from .fixed_points import (
    FixedPointRecord,
    TransversalityReport,
    check_transversality,
    enumerate_fixed_points,
    find_periodic_points,
    fixed_points_on_face,
)
from .operators import (
    QsoTensor,
    VolterraMatrix,
    apply_qso,
    apply_volterra,
    check_positivity_bound,
    counterexample_operator,
    identity_tensor,
    random_transversal,
    tensor_to_volterra,
    volterra_to_tensor,
)
from .simplex import SimplexPoint, barycenter, distance, make_point, sample_uniform, support, vertex
from .tournament import Tournament, extract_tournament, find_three_cycle, is_transitive, score_sequence

__version__ = "0.1.0"
