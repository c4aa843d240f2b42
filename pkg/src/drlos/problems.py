"""Built-in synthetic constrained bi-objective problems.

Every problem shares the shape functions::

    f1 = x1 * (1 + g),   f2 = (1 - x1) * (1 + g),   g = sum(x2..xn)

on [0, 1]^n and differs only in its constraints, so the constrained Pareto
front is known in closed form:

    CP1  edge-cut        0.2 - f1 <= 0                    front (t, 1-t), t in [0.2, 1]
    CP2  disconnected    0.01 - (f1 - 0.5)^2 <= 0         front (t, 1-t), t in [0, .4] u [.6, 1]
    CP3  equality        CP1 plus x2 - x3 = 0             front as CP1
    CP4  boundary-front  1.5 - (f1 + f2) <= 0             front (1.5t, 1.5(1-t)), t in [0, 1]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_SIGMA, ProblemSpec, evaluate
from .indicators import nondominated_mask

PROBLEM_NAMES = ("CP1", "CP2", "CP3", "CP4")


@dataclass(frozen=True)
class ReferenceFront:
    points: np.ndarray
    source: str  # "analytic" | "grid-oracle"

    def __len__(self):
        return len(self.points)


def _shape(x):
    g = float(np.sum(x[1:]))
    return x[0] * (1.0 + g), (1.0 - x[0]) * (1.0 + g), g


def _cp1(x):
    f1, f2, _ = _shape(x)
    return np.array([f1, f2]), [0.2 - f1], []


def _cp2(x):
    f1, f2, _ = _shape(x)
    return np.array([f1, f2]), [0.01 - (f1 - 0.5) ** 2], []


def _cp3(x):
    f1, f2, _ = _shape(x)
    return np.array([f1, f2]), [0.2 - f1], [x[1] - x[2]]


def _cp4(x):
    f1, f2, g = _shape(x)
    # f1 + f2 == 1 + g algebraically; the right-hand form is exact in floating point
    return np.array([f1, f2]), [1.5 - (1.0 + g)], []


def _cp2_edge(t: float, toward: float) -> float:
    # smallest step from t toward `toward` that satisfies the CP2 constraint exactly
    while 0.01 - (t - 0.5) ** 2 > 0:
        t = float(np.nextafter(t, toward))
    return t


_CP2_LOW_END = _cp2_edge(0.4, 0.0)
_CP2_HIGH_START = _cp2_edge(0.6, 1.0)


def _line_front(lo: float, hi: float, scale: float = 1.0):
    def sample(resolution: int) -> np.ndarray:
        t = np.linspace(lo, hi, resolution)
        return np.column_stack([scale * t, scale * (1.0 - t)])

    return sample


def _cp2_front(resolution: int) -> np.ndarray:
    # uniform in arc length over the two segments [0, .4] and [.6, 1]
    s = np.linspace(0.0, 0.8, resolution)
    t = np.where(s <= 0.4, s, s + 0.2)
    t = np.where((t > _CP2_LOW_END) & (t < _CP2_HIGH_START), _CP2_HIGH_START, t)
    t = np.minimum(t, 1.0)
    return np.column_stack([t, 1.0 - t])


def _greedy_preimage(n: int):
    def preimage(x1: float, g: float) -> np.ndarray:
        x = np.zeros(n)
        x[0] = x1
        rest = g
        for i in range(1, n):
            x[i] = min(rest, 1.0)
            rest -= x[i]
            if rest <= 0:
                break
        return x

    return preimage


def _paired_preimage(n: int):
    # keeps x2 == x3 so the CP3 equality holds exactly
    def preimage(x1: float, g: float) -> np.ndarray:
        x = np.zeros(n)
        x[0] = x1
        x[1] = x[2] = min(g / 2.0, 1.0)
        rest = g - 2.0 * x[1]
        for i in range(3, n):
            if rest <= 0:
                break
            x[i] = min(rest, 1.0)
            rest -= x[i]
        return x

    return preimage


def make_problem(name: str, n: int = 10, sigma: float = DEFAULT_SIGMA) -> ProblemSpec:
    """Build one of the CP1-CP4 problems with ``n`` decision variables."""
    key = str(name).upper()
    if key not in PROBLEM_NAMES:
        raise ValueError(f"unknown problem {name!r}; expected one of {', '.join(PROBLEM_NAMES)}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if key == "CP3" and n < 3:
        raise ValueError("CP3 needs n >= 3 (its equality couples x2 and x3)")

    bounds = np.tile([0.0, 1.0], (n, 1))
    common = dict(n=n, m=2, bounds=bounds, sigma=sigma, distance_range=(0.0, float(n - 1)))
    if key == "CP1":
        return ProblemSpec(name=key, p=1, q=1, evaluator=_cp1, front=_line_front(0.2, 1.0),
                           preimage=_greedy_preimage(n), **common)
    if key == "CP2":
        return ProblemSpec(name=key, p=1, q=1, evaluator=_cp2, front=_cp2_front,
                           preimage=_greedy_preimage(n), **common)
    if key == "CP3":
        return ProblemSpec(name=key, p=1, q=2, evaluator=_cp3, front=_line_front(0.2, 1.0),
                           preimage=_paired_preimage(n), **common)
    return ProblemSpec(name=key, p=1, q=1, evaluator=_cp4, front=_line_front(0.0, 1.0, 1.5),
                       preimage=_greedy_preimage(n), **common)


def analytic_front(spec: ProblemSpec, resolution: int = 500) -> ReferenceFront:
    if spec.front is None:
        raise ValueError(f"problem {spec.name!r} has no analytic front")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    return ReferenceFront(points=spec.front(int(resolution)), source="analytic")


def _filter_front(solutions) -> np.ndarray:
    feasible = [s.f for s in solutions if s.cv == 0.0]
    if not feasible:
        return np.empty((0, 2))
    F = np.unique(np.vstack(feasible), axis=0)  # sorted rows, deterministic
    return F[nondominated_mask(F)]


def grid_oracle_front(spec: ProblemSpec, points_per_dim: int = 101,
                      max_evals: int = 2_000_000) -> ReferenceFront:
    """Brute-force reference front by grid enumeration.

    The full n-dimensional grid is used when it fits in ``max_evals``;
    otherwise the problem must declare its distance-term structure, and only
    the (x1, g) plane is enumerated, with g sampled at the same spacing as x1.
    """
    if points_per_dim < 2:
        raise ValueError("points_per_dim must be >= 2")
    axes = [np.linspace(lo, hi, points_per_dim) for lo, hi in spec.bounds]
    if points_per_dim ** spec.n <= max_evals:
        sols = [evaluate(spec, np.array(x)) for x in itertools.product(*axes)]
        return ReferenceFront(points=_filter_front(sols), source="grid-oracle")

    if spec.preimage is None:
        raise ValueError(
            f"grid of {points_per_dim}^{spec.n} points exceeds budget {max_evals} "
            "and the problem declares no distance-term structure"
        )
    g_lo, g_hi = spec.distance_range
    g_count = int(round((g_hi - g_lo) * (points_per_dim - 1))) + 1
    if points_per_dim * g_count > max_evals:
        raise ValueError(f"separable grid of {points_per_dim}x{g_count} exceeds budget {max_evals}")
    g_axis = np.linspace(g_lo, g_hi, g_count)
    sols = [evaluate(spec, spec.preimage(x1, g)) for x1 in axes[0] for g in g_axis]
    return ReferenceFront(points=_filter_front(sols), source="grid-oracle")
