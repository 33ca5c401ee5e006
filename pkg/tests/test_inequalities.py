"""Matrix and vector inequalities used by the optimality arguments, on random instances."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import inequality_checks as Q

SEEDS = st.integers(0, 2 ** 32 - 1)


@pytest.mark.parametrize("name", sorted(set(Q.CASES) - {"trace_lower_bound"}))
def test_property_holds_on_1000_cases(name):
    fails, first = Q.run(Q.CASES[name], 1000, seed=2024)
    assert fails == 0, first


@settings(max_examples=200, deadline=None)
@given(SEEDS)
def test_sum_of_grams_random_seed(seed):
    assert Q.case_sum_of_grams(np.random.default_rng(seed)) is None


@settings(max_examples=200, deadline=None)
@given(SEEDS)
def test_loewner_majorization_random_seed(seed):
    assert Q.case_loewner_implies_majorization(np.random.default_rng(seed)) is None


def test_trace_lower_bound_for_sums_of_constant_row_sum_matrices():
    # The statement as usually quoted: Tr(HH') >= m^2 v r.  It does not hold
    # in general (the all-equal binary case is where the sum of squares is
    # largest, not smallest); this test records that.
    fails, first = Q.run(Q.case_trace_lower_bound, 1000, seed=2024)
    assert fails == 0, first


def test_trace_lower_bound_smallest_counterexample():
    N1 = np.array([[1, 1, 0]])
    N2 = np.array([[0, 1, 1]])
    H = N1 + N2
    assert int((H * H).sum()) == 6 < 2 * 2 * 1 * 2


def test_trace_bound_holds_with_equal_binary_summands():
    rng = np.random.default_rng(3)
    for _ in range(200):
        v, b = int(rng.integers(1, 5)), int(rng.integers(2, 6))
        r, m = int(rng.integers(1, b)), int(rng.integers(1, 5))
        N = np.zeros((v, b), dtype=int)
        for i in range(v):
            N[i, rng.choice(b, r, replace=False)] = 1
        H = m * N
        assert int((H * H).sum()) == m * m * v * r


def test_even_spread_is_the_true_minimum():
    fails, first = Q.run(Q.case_trace_even_spread_bound, 1000, seed=2024)
    assert fails == 0, first
    assert Q.even_spread_trace(1, 3, 2, 2) == 6
