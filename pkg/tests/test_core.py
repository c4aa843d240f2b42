import numpy as np
import pytest
from hypothesis import given, strategies as st

from drlos.core import (EvaluationError, ProblemSpec, Solution, constraint_violation, evaluate,
                        is_feasible)
from drlos.problems import make_problem


def toy_spec(p=1, q=1, sigma=1e-4):
    return ProblemSpec(name="toy", n=2, m=2, p=p, q=q, bounds=[[0, 1], [0, 1]], sigma=sigma,
                       evaluator=lambda x: (x.copy(), [], []))


def test_satisfied_inequality():
    per, total = constraint_violation(toy_spec(), [-1.0], [])
    assert per.tolist() == [0.0]
    assert total == 0.0


def test_violated_inequality():
    per, total = constraint_violation(toy_spec(p=2, q=2), [0.5, -0.2], [])
    assert per.tolist() == [0.5, 0.0]
    assert total == 0.5


def test_equality_branch_subtracts_sigma():
    per, total = constraint_violation(toy_spec(p=0, q=1), [], [0.3])
    assert per.tolist() == [0.3 - 1e-4]
    assert total == 0.3 - 1e-4
    per, _ = constraint_violation(toy_spec(p=0, q=1), [], [-0.3])
    assert per.tolist() == [0.3 - 1e-4]


def test_equality_within_sigma_is_satisfied():
    _, total = constraint_violation(toy_spec(p=0, q=1), [], [5e-5])
    assert total == 0.0


def test_constraint_count_mismatch():
    with pytest.raises(ValueError):
        constraint_violation(toy_spec(p=1, q=1), [0.1, 0.2], [])


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_constraint(bad):
    with pytest.raises(EvaluationError):
        constraint_violation(toy_spec(), [bad], [])


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.lists(st.floats(-10, 10), min_size=2, max_size=2),
       st.integers(0, 2), st.floats(0, 5))
def test_violation_monotone_in_g(g, h, j, bump):
    spec = toy_spec(p=3, q=5)
    _, before = constraint_violation(spec, g, h)
    g2 = list(g)
    g2[j] += bump
    _, after = constraint_violation(spec, g2, h)
    assert after >= before


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=2),
       st.lists(st.floats(-10, 10), min_size=2, max_size=2))
def test_zero_violation_iff_all_satisfied(g, h):
    spec = toy_spec(p=2, q=4)
    per, total = constraint_violation(spec, g, h)
    assert np.all(per >= 0) and total >= 0
    satisfied = all(v <= 0 for v in g) and all(abs(v) <= spec.sigma for v in h)
    assert (total == 0.0) == satisfied


def test_evaluate_cp1_feasible():
    spec = make_problem("CP1", 10)
    s = evaluate(spec, [0.5] + [0.0] * 9)
    assert s.f.tolist() == [0.5, 0.5]
    assert s.cv == 0.0


def test_evaluate_cp1_violates_edge():
    spec = make_problem("CP1", 10)
    s = evaluate(spec, [0.0] * 10)
    assert s.f.tolist() == [0.0, 1.0]
    assert s.cv == pytest.approx(0.2, abs=0)


def test_evaluate_rejects_out_of_bounds():
    spec = make_problem("CP1", 3)
    with pytest.raises(EvaluationError) as info:
        evaluate(spec, [1.2, 0.0, 0.0])
    assert info.value.x.tolist() == [1.2, 0.0, 0.0]
    with pytest.raises(EvaluationError):
        evaluate(spec, [np.nan, 0.0, 0.0])


def test_evaluate_non_finite_objective_carries_x():
    spec = ProblemSpec(name="bad", n=1, m=2, p=0, q=0, bounds=[[0, 1]],
                       evaluator=lambda x: ([np.inf, 0.0], [], []))
    with pytest.raises(EvaluationError) as info:
        evaluate(spec, [0.5])
    assert info.value.x.tolist() == [0.5]


def test_evaluate_is_deterministic(rng):
    spec = make_problem("CP3", 5)
    x = rng.random(5)
    a, b = evaluate(spec, x), evaluate(spec, x)
    assert np.array_equal(a.f, b.f) and np.array_equal(a.cv_per, b.cv_per) and a.cv == b.cv


def test_solution_invariants(rng):
    spec = make_problem("CP3", 6)
    for _ in range(50):
        s = evaluate(spec, rng.random(6))
        assert s.cv == float(np.sum(s.cv_per))
        assert np.all(s.cv_per >= 0)
    with pytest.raises(ValueError):
        s.x[0] = 1.0  # immutable


@pytest.mark.parametrize("cv, expected", [(0.0, True), (1e-12, False), (3.5, False)])
def test_is_feasible_exact_zero(cv, expected):
    s = Solution(x=[0.0], f=[0.0, 0.0], cv_per=[cv], cv=cv)
    assert is_feasible(s) is expected


@pytest.mark.parametrize("kwargs", [
    dict(n=0, m=2, p=0, q=0, bounds=np.empty((0, 2))),
    dict(n=1, m=1, p=0, q=0, bounds=[[0, 1]]),
    dict(n=1, m=2, p=2, q=1, bounds=[[0, 1]]),
    dict(n=1, m=2, p=0, q=0, bounds=[[1, 1]]),
    dict(n=1, m=2, p=0, q=0, bounds=[[0, 1]], sigma=0.0),
])
def test_problem_spec_invariants(kwargs):
    with pytest.raises(ValueError):
        ProblemSpec(name="x", evaluator=lambda x: None, **kwargs)
