"""Variation operators that form the action set: GA (SBX + polynomial mutation) and DE."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .core import ProblemSpec, clamp_to_bounds


class OperatorId(enum.IntEnum):
    GA = 1
    DE = 2

    @property
    def label(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text) -> "OperatorId":
        if isinstance(text, cls):
            return text
        try:
            return cls[str(text).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown operator {text!r}; expected GA or DE") from None


ACTIONS = tuple(OperatorId)


@dataclass(frozen=True)
class OperatorParams:
    pc: float = 1.0
    eta_c: float = 20.0
    pm: Optional[float] = None  # per-gene mutation probability; None means 1/n
    eta_m: float = 20.0
    F: float = 0.5
    CR: float = 1.0

    def __post_init__(self):
        for name in ("pc", "CR"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.pm is not None and not 0.0 <= self.pm <= 1.0:
            raise ValueError(f"pm must lie in [0, 1], got {self.pm}")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise ValueError("distribution indices must be positive")

    def mutation_rate(self, n: int) -> float:
        return 1.0 / n if self.pm is None else self.pm

    def resolved(self, n: int) -> "OperatorParams":
        return replace(self, pm=self.mutation_rate(n))


def _unit_bounds(n):
    return np.tile([0.0, 1.0], (n, 1))


def sbx_crossover(p1, p2, params: OperatorParams, rng, bounds=None) -> tuple:
    """Simulated binary crossover of two parents.

    Each gene pair is recombined with the spread factor of Deb and Agrawal;
    genes are swapped between the children with probability 1/2 and the whole
    pair is copied unchanged with probability ``1 - pc``. Parents may also be
    stacked row-wise, in which case every row pair is crossed independently.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    shape = p1.shape
    bounds = _unit_bounds(shape[-1]) if bounds is None else np.asarray(bounds, dtype=float)
    eta = params.eta_c

    mu = rng.random(shape)
    beta = np.where(mu <= 0.5,
                    (2.0 * mu) ** (1.0 / (eta + 1.0)),
                    (2.0 - 2.0 * mu) ** (-1.0 / (eta + 1.0)))
    beta *= np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    keep = rng.random(shape) < 0.5
    keep |= (rng.random(shape[:-1]) >= params.pc)[..., None]

    mid = 0.5 * (p1 + p2)
    half = 0.5 * (p1 - p2)
    c1 = np.where(keep, p1, mid + beta * half)
    c2 = np.where(keep, p2, mid - beta * half)
    return clamp_to_bounds(c1, bounds), clamp_to_bounds(c2, bounds)


def polynomial_mutation(x, params: OperatorParams, bounds, rng) -> np.ndarray:
    """Deb's polynomial mutation; each gene mutates with probability ``pm`` (default 1/n)."""
    x = np.array(x, dtype=float)
    bounds = np.asarray(bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    eta = params.eta_m
    site = rng.random(x.shape) < params.mutation_rate(x.shape[-1])
    mu = rng.random(x.shape)
    span = np.broadcast_to(hi - lo, x.shape)
    exp = 1.0 / (eta + 1.0)

    low = site & (mu <= 0.5)
    d1 = (x - lo) / span
    x[low] += span[low] * (
        (2.0 * mu[low] + (1.0 - 2.0 * mu[low]) * (1.0 - d1[low]) ** (eta + 1.0)) ** exp - 1.0
    )
    high = site & (mu > 0.5)
    d2 = (hi - x) / span
    x[high] += span[high] * (
        1.0 - (2.0 * (1.0 - mu[high]) + 2.0 * (mu[high] - 0.5) * (1.0 - d2[high]) ** (eta + 1.0)) ** exp
    )
    return clamp_to_bounds(x, bounds)


def de_variation(parent, a, b, params: OperatorParams, rng, bounds=None) -> np.ndarray:
    """DE/current/1/bin: ``parent + F * (a - b)`` on binomially chosen genes, then mutation.

    At least one gene per child always takes the perturbed value. Accepts
    single vectors or row-stacked batches.
    """
    parent = np.asarray(parent, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not parent.shape == a.shape == b.shape:
        raise ValueError("parent, a and b must have the same length")
    n = parent.shape[-1]
    bounds = _unit_bounds(n) if bounds is None else np.asarray(bounds, dtype=float)

    cross = rng.random(parent.shape) < params.CR
    forced = rng.integers(n, size=parent.shape[:-1])
    np.put_along_axis(cross, np.asarray(forced)[..., None], True, axis=-1)
    child = np.where(cross, parent + params.F * (a - b), parent)
    child = clamp_to_bounds(child, bounds)
    return polynomial_mutation(child, params, bounds, rng)


def generate_offspring(op, mating_pool: Sequence, spec: ProblemSpec,
                       params: OperatorParams, rng) -> np.ndarray:
    """Offspring decision vectors (one per pool member) produced by ``op``.

    GA pairs consecutive pool members; an odd pool wraps its last member
    around to the first. DE uses every member as a parent and draws two other
    distinct members for the difference vector.
    """
    op = OperatorId(op)
    X = np.vstack([getattr(s, "x", s) for s in mating_pool])
    size = len(X)
    bounds = spec.bounds

    if op is OperatorId.GA:
        if size < 2:
            raise ValueError(f"GA needs a mating pool of at least 2, got {size}")
        first = np.arange(0, size, 2)
        c1, c2 = sbx_crossover(X[first], X[(first + 1) % size], params, rng, bounds)
        children = np.empty((2 * len(first), X.shape[1]))
        children[0::2], children[1::2] = c1, c2
        return polynomial_mutation(children, params, bounds, rng)[:size]

    if size < 3:
        raise ValueError(f"DE needs a mating pool of at least 3, got {size}")
    # a uniform pair of distinct indices from the size-1 members other than i
    ia = rng.integers(size - 1, size=size)
    ib = rng.integers(size - 2, size=size)
    ib = ib + (ib >= ia)
    own = np.arange(size)
    ia = ia + (ia >= own)
    ib = ib + (ib >= own)
    return de_variation(X, X[ia], X[ib], params, rng, bounds)


def random_population(spec: ProblemSpec, size: int, rng) -> np.ndarray:
    return spec.lower + rng.random((size, spec.n)) * (spec.upper - spec.lower)
