"""Problem definitions, evaluated solutions and constraint-violation aggregation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

DEFAULT_SIGMA = 1e-4

# (objectives, inequality values g_1..g_p, equality values h_{p+1}..h_q)
Evaluator = Callable[[np.ndarray], tuple]


class EvaluationError(ValueError):
    """Raised when a decision vector cannot be evaluated."""

    def __init__(self, message: str, x=None):
        super().__init__(message)
        self.x = None if x is None else np.array(x, dtype=float)


@dataclass(frozen=True)
class ProblemSpec:
    """A constrained multi-objective problem.

    ``bounds`` has shape (n, 2) holding the (lower, upper) pair of every
    variable. ``preimage``, when given, declares the distance-term structure of
    the problem: it maps a position parameter ``x1`` and a distance value ``g``
    to a decision vector, which lets the grid oracle enumerate only two
    dimensions. ``front`` samples the analytic constrained Pareto front.
    """

    name: str
    n: int
    m: int
    p: int
    q: int
    bounds: np.ndarray
    evaluator: Evaluator
    sigma: float = DEFAULT_SIGMA
    front: Optional[Callable[[int], np.ndarray]] = field(default=None, compare=False)
    preimage: Optional[Callable[[float, float], np.ndarray]] = field(default=None, compare=False)
    distance_range: tuple = (0.0, 0.0)

    def __post_init__(self):
        bounds = np.array(self.bounds, dtype=float)
        bounds.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if not 0 <= self.p <= self.q:
            raise ValueError(f"need 0 <= p <= q, got p={self.p}, q={self.q}")
        if bounds.shape != (self.n, 2):
            raise ValueError(f"bounds must have shape ({self.n}, 2), got {bounds.shape}")
        if not np.all(bounds[:, 0] < bounds[:, 1]):
            raise ValueError("every lower bound must be strictly below its upper bound")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[:, 1]


@dataclass(frozen=True, eq=False)
class Solution:
    x: np.ndarray
    f: np.ndarray
    cv_per: np.ndarray
    cv: float

    def __post_init__(self):
        for name in ("x", "f", "cv_per"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "cv", float(self.cv))

    @property
    def feasible(self) -> bool:
        return is_feasible(self)


class Population:
    """An ordered, immutable collection of evaluated solutions."""

    def __init__(self, members: Sequence[Solution], capacity: Optional[int] = None):
        self.members = tuple(members)
        self.capacity = len(self.members) if capacity is None else int(capacity)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, idx):
        return self.members[idx]

    @property
    def objectives(self) -> np.ndarray:
        if not self.members:
            return np.empty((0, 0))
        return np.vstack([s.f for s in self.members])

    @property
    def decisions(self) -> np.ndarray:
        if not self.members:
            return np.empty((0, 0))
        return np.vstack([s.x for s in self.members])

    @property
    def violations(self) -> np.ndarray:
        return np.array([s.cv for s in self.members], dtype=float)

    def feasible_members(self) -> list:
        return [s for s in self.members if is_feasible(s)]


def constraint_violation(spec: ProblemSpec, g, h) -> tuple:
    """Per-constraint violations and their total.

    Inequalities contribute ``max(0, g_j)``; equalities are relaxed by
    ``spec.sigma`` and contribute ``max(0, |h_j| - sigma)``.
    """
    g = np.atleast_1d(np.asarray(g, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if g.size != spec.p or h.size != spec.q - spec.p:
        raise ValueError(
            f"expected {spec.p} inequality and {spec.q - spec.p} equality values, "
            f"got {g.size} and {h.size}"
        )
    # any nan or +-inf entry makes the sum non-finite
    if not np.isfinite(g.sum() + h.sum()):
        raise EvaluationError("non-finite constraint value")
    per = np.concatenate([np.maximum(0.0, g), np.maximum(0.0, np.abs(h) - spec.sigma)])
    return per, float(np.sum(per))


def clamp_to_bounds(x, bounds) -> np.ndarray:
    bounds = np.asarray(bounds, dtype=float)
    return np.clip(np.asarray(x, dtype=float), bounds[:, 0], bounds[:, 1])


def evaluate(spec: ProblemSpec, x) -> Solution:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise EvaluationError(f"decision vector must have shape ({spec.n},), got {x.shape}", x)
    if not np.all((x >= spec.lower) & (x <= spec.upper)):
        if not np.all(np.isfinite(x)):
            raise EvaluationError("non-finite decision vector", x)
        raise EvaluationError("decision vector outside bounds", x)
    f, g, h = spec.evaluator(x)
    f = np.asarray(f, dtype=float)
    if f.shape != (spec.m,) or not np.isfinite(f.sum()):
        raise EvaluationError(f"invalid objective vector {f!r}", x)
    try:
        per, total = constraint_violation(spec, g, h)
    except EvaluationError as err:
        raise EvaluationError(str(err), x) from None
    return Solution(x=x.copy(), f=f, cv_per=per, cv=total)


def is_feasible(s: Solution) -> bool:
    # exact zero, no tolerance band
    return s.cv == 0.0
