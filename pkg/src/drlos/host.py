"""Host CMOEA interface and a constrained-dominance NSGA-II host."""

from __future__ import annotations

import abc

import numpy as np

from .core import Population, ProblemSpec, Solution, evaluate
from .operators import random_population


def _pareto_dominates(a, b) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def cdp_compare(s1: Solution, s2: Solution) -> int:
    """-1 if ``s1`` wins under constrained dominance, 1 if ``s2`` wins, 0 if incomparable."""
    f1, f2 = s1.cv == 0.0, s2.cv == 0.0
    if f1 and not f2:
        return -1
    if f2 and not f1:
        return 1
    if not f1:
        return -1 if s1.cv < s2.cv else (1 if s2.cv < s1.cv else 0)
    if _pareto_dominates(s1.f, s2.f):
        return -1
    if _pareto_dominates(s2.f, s1.f):
        return 1
    return 0


def _arrays(pop):
    members = list(pop)
    F = np.vstack([s.f for s in members])
    cv = np.array([s.cv for s in members], dtype=float)
    return F, cv


def cdp_matrix(F, cv) -> np.ndarray:
    """``D[i, j]`` is True when member i constrained-dominates member j."""
    feas = cv == 0.0
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    both_feas = feas[:, None] & feas[None, :]
    both_infeas = ~feas[:, None] & ~feas[None, :]
    return ((feas[:, None] & ~feas[None, :])
            | (both_infeas & (cv[:, None] < cv[None, :]))
            | (both_feas & le & lt))


def nondominated_sort(pop) -> list:
    """Fronts of member indices, best first, under constrained dominance."""
    members = list(pop)
    if not members:
        return []
    F, cv = _arrays(members)
    D = cdp_matrix(F, cv)
    counts = D.sum(axis=0)
    fronts = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append([int(i) for i in current])
        counts = counts - D[current].sum(axis=0)
        counts[current] = -1
        current = np.flatnonzero(counts == 0)
    return fronts


def crowding_distance(F) -> np.ndarray:
    F = np.atleast_2d(np.asarray(F, dtype=float))
    n, m = F.shape
    if n == 0:
        raise ValueError("crowding distance of an empty front")
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        fj = F[order, j]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = fj[-1] - fj[0]
        if span > 0:
            dist[order[1:-1]] += (fj[2:] - fj[:-2]) / span
    return dist


def rank_and_crowding(pop) -> tuple:
    members = list(pop)
    rank = np.zeros(len(members), dtype=int)
    crowd = np.zeros(len(members))
    F, _ = _arrays(members)
    for r, front in enumerate(nondominated_sort(members)):
        rank[front] = r
        crowd[front] = crowding_distance(F[front])
    return rank, crowd


def environmental_selection(pop, offspring, N: int) -> Population:
    """Keep N members of the union, front by front; the last front is cut by crowding."""
    union = list(pop) + list(offspring)
    if len(union) < N:
        raise ValueError(f"need at least {N} candidates, got {len(union)}")
    F, _ = _arrays(union)
    chosen = []
    for front in nondominated_sort(union):
        if len(chosen) + len(front) <= N:
            chosen.extend(front)
            if len(chosen) == N:
                break
            continue
        crowd = crowding_distance(F[front])
        order = np.argsort(-crowd, kind="stable")
        chosen.extend(front[i] for i in order[: N - len(chosen)])
        break
    return Population([union[i] for i in chosen], capacity=N)


def _tournament(i, j, rank, crowd) -> int:
    if rank[i] != rank[j]:
        return i if rank[i] < rank[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i


def mating_selection(pop, count: int, rng) -> list:
    """Binary tournaments on (front rank, crowding distance)."""
    members = list(pop)
    if not members:
        raise ValueError("mating selection from an empty population")
    rank, crowd = rank_and_crowding(members)
    picks = rng.integers(len(members), size=(count, 2))
    return [members[_tournament(int(i), int(j), rank, crowd)] for i, j in picks]


class HostCMOEA(abc.ABC):
    """What the operator-selection loop needs from a host algorithm."""

    name = "host"

    @abc.abstractmethod
    def initialize(self, spec: ProblemSpec, N: int, rng) -> Population: ...

    @abc.abstractmethod
    def mating_selection(self, pop, count: int, rng) -> list: ...

    @abc.abstractmethod
    def environmental_selection(self, pop, offspring, N: int) -> Population: ...

    @abc.abstractmethod
    def reporting_population(self) -> Population: ...


class CNSGA2(HostCMOEA):
    """NSGA-II with the constrained-dominance principle as its constraint handler."""

    name = "cnsga2"

    def __init__(self):
        self.population = None

    def initialize(self, spec, N, rng):
        X = random_population(spec, N, rng)
        self.population = Population([evaluate(spec, x) for x in X], capacity=N)
        return self.population

    def mating_selection(self, pop, count, rng):
        return mating_selection(pop, count, rng)

    def environmental_selection(self, pop, offspring, N):
        self.population = environmental_selection(pop, offspring, N)
        return self.population

    def reporting_population(self):
        return self.population


HOSTS = {"cnsga2": CNSGA2}


def make_host(name: str) -> HostCMOEA:
    try:
        return HOSTS[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown host {name!r}; available: {', '.join(HOSTS)}") from None
