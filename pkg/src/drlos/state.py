"""Population state, reward, transition records and the experience replay queue."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .indicators import hypervolume_2d, hypervolume_mc, spacing

SPREAD_FLOOR = 1e-12
DIV_CAP = 1e12


@dataclass(frozen=True)
class PopulationState:
    con: float
    fea: float
    div: float

    def as_array(self) -> np.ndarray:
        return np.array([self.con, self.fea, self.div], dtype=float)


@dataclass(frozen=True)
class Record:
    s: PopulationState
    op: int
    r: float
    s_next: PopulationState

    def as_row(self) -> np.ndarray:
        """The 8-column layout (con, fea, div, op, r, con', fea', div')."""
        return np.array([self.s.con, self.s.fea, self.s.div, float(self.op), self.r,
                         self.s_next.con, self.s_next.fea, self.s_next.div])

    def is_consistent(self) -> bool:
        return self.r == compute_reward(self.s, self.s_next)


def _objectives_and_cv(pop):
    members = list(pop)
    if not members:
        raise ValueError("cannot assess an empty population")
    F = np.vstack([s.f for s in members])
    cv = np.array([s.cv for s in members], dtype=float)
    return F, cv


def assess_state(pop) -> PopulationState:
    """(con, fea, div) of a population on raw, unnormalised objectives.

    con is the mean objective sum, fea the mean constraint violation, and div
    the reciprocal of the summed per-objective ranges.
    """
    F, cv = _objectives_and_cv(pop)
    n = len(F)
    con = float(np.sum(F) / n)
    fea = float(np.sum(cv) / n)
    spread = float(np.sum(F.max(axis=0) - F.min(axis=0)))
    div = min(1.0 / max(spread, SPREAD_FLOOR), DIV_CAP)
    return PopulationState(con, fea, div)


def indicator_state(pop, ref_point, ideal=None, mc_samples: int = 20_000) -> PopulationState:
    """Indicator-based state: (1 - normalised HV, mean CV, Spacing).

    HV is normalised by the volume of the box between ``ideal`` (origin by
    default) and ``ref_point``, so every component is smaller-is-better.
    """
    F, cv = _objectives_and_cv(pop)
    ref = np.asarray(ref_point, dtype=float)
    ideal = np.zeros_like(ref) if ideal is None else np.asarray(ideal, dtype=float)
    box = float(np.prod(ref - ideal))
    if F.shape[1] == 2:
        hv = hypervolume_2d(F, ref)
    else:
        # fixed seed keeps the estimate a deterministic function of the population
        hv = hypervolume_mc(F, ref, mc_samples, rng=0)
    con = 1.0 - hv / box
    fea = float(np.sum(cv) / len(F))
    return PopulationState(float(con), fea, spacing(F))


def compute_reward(s: PopulationState, s_next: PopulationState) -> float:
    return (s.con + s.fea + s.div) - (s_next.con + s_next.fea + s_next.div)


def make_record(s: PopulationState, op, s_next: PopulationState) -> Record:
    return Record(s=s, op=int(op), r=compute_reward(s, s_next), s_next=s_next)


class ExperienceReplay:
    """Bounded FIFO queue of records; the oldest record is evicted first."""

    def __init__(self, ms_ep: int = 1000, rs_ep: int = 50, records: Optional[Iterable[Record]] = None):
        if ms_ep < 1:
            raise ValueError(f"ms_ep must be >= 1, got {ms_ep}")
        if rs_ep < 1:
            raise ValueError(f"rs_ep must be >= 1, got {rs_ep}")
        self.ms_ep = ms_ep
        self.rs_ep = rs_ep
        self.queue = deque(maxlen=ms_ep)
        for t in records or ():
            self.push(t)

    def __len__(self):
        return len(self.queue)

    def __iter__(self):
        return iter(self.queue)

    @property
    def ready(self) -> bool:
        return len(self.queue) >= self.rs_ep

    def push(self, t: Record) -> None:
        self.queue.append(t)

    def sample(self, s_tr: int, rng) -> list:
        return sample_training(self, s_tr, rng)


def push_record(ep: ExperienceReplay, t: Record) -> None:
    ep.push(t)


def sample_training(ep: ExperienceReplay, s_tr: int, rng) -> list:
    if s_tr < 1:
        raise ValueError(f"s_tr must be >= 1, got {s_tr}")
    if s_tr > len(ep):
        raise ValueError(f"cannot sample {s_tr} records from a replay holding {len(ep)}")
    items = list(ep.queue)
    idx = rng.choice(len(items), size=s_tr, replace=False)
    return [items[i] for i in idx]
