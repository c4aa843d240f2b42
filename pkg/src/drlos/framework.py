"""Deep-Q-learning assisted operator selection wrapped around a host CMOEA."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import EvaluationError, ProblemSpec, evaluate
from .indicators import final_quality
from .operators import ACTIONS, OperatorId, OperatorParams, generate_offspring
from .problems import analytic_front
from .qnet import NormStats, QNetwork, TrainHyper, action_code, train_session
from .state import (ExperienceReplay, PopulationState, assess_state, indicator_state,
                    make_record)

log = logging.getLogger(__name__)

ASSESSORS = ("basic", "indicator")


class RunError(RuntimeError):
    pass


@dataclass(frozen=True)
class SelectionPolicy:
    mode: str = "drl"  # drl | random | fixed
    op: Optional[OperatorId] = None
    epsilon: float = 0.9
    actions: tuple = ACTIONS

    def __post_init__(self):
        if self.mode not in ("drl", "random", "fixed"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.mode == "fixed":
            if self.op is None:
                raise ValueError("a fixed policy needs an operator")
            object.__setattr__(self, "op", OperatorId(self.op))
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not self.actions:
            raise ValueError("empty action set")

    @classmethod
    def parse(cls, text: str, epsilon: float = 0.9) -> "SelectionPolicy":
        """Parse ``drl``, ``random``, ``fixed:ga`` or ``fixed:de``."""
        text = text.strip().lower()
        if text.startswith("fixed:"):
            return cls("fixed", OperatorId.parse(text.split(":", 1)[1]), epsilon)
        if text in ("drl", "random"):
            return cls(text, None, epsilon)
        raise ValueError(f"unknown policy {text!r}; expected drl, random, fixed:ga or fixed:de")

    @property
    def label(self) -> str:
        return f"fixed:{self.op.label.lower()}" if self.mode == "fixed" else self.mode


@dataclass(frozen=True)
class RunConfig:
    N: int = 40
    G_max: int = 200
    seed: int = 0
    policy: SelectionPolicy = field(default_factory=SelectionPolicy)
    hyper: TrainHyper = field(default_factory=TrainHyper)
    ms_ep: int = 1000
    rs_ep: int = 50
    s_tr: int = 100
    update_period: int = 50
    params: OperatorParams = field(default_factory=OperatorParams)
    assessor: str = "basic"
    front_resolution: int = 500

    def __post_init__(self):
        if self.N < 4:
            raise ValueError(f"N must be >= 4, got {self.N}")
        if self.G_max < 1:
            raise ValueError(f"G_max must be >= 1, got {self.G_max}")
        if self.update_period < 1:
            raise ValueError(f"update_period must be >= 1, got {self.update_period}")
        if min(self.ms_ep, self.rs_ep, self.s_tr) < 1:
            raise ValueError("ms_ep, rs_ep and s_tr must all be >= 1")
        if self.assessor not in ASSESSORS:
            raise ValueError(f"assessor must be one of {ASSESSORS}, got {self.assessor!r}")


@dataclass(frozen=True)
class TraceRow:
    gen: int
    state: PopulationState
    op: OperatorId
    branch: str
    reward: float
    next_state: PopulationState
    igd_plus: float
    hv: float

    def csv_row(self) -> dict:
        s = self.next_state
        return {"gen": self.gen, "con": s.con, "fea": s.fea, "div": s.div,
                "op": self.op.label, "reward": self.reward,
                "igd_plus": self.igd_plus, "hv": self.hv}


TRACE_FIELDS = ("gen", "con", "fea", "div", "op", "reward", "igd_plus", "hv")


@dataclass
class RunResult:
    population: object
    trace: list
    usage: dict
    sessions: int
    replay: ExperienceReplay
    initial_state: PopulationState
    network: Optional[QNetwork] = None
    norm: Optional[NormStats] = None

    @property
    def final_igd_plus(self) -> float:
        return self.trace[-1].igd_plus if self.trace else float("nan")

    @property
    def final_hv(self) -> float:
        return self.trace[-1].hv if self.trace else float("nan")


def should_update_network(gen: int, update_period: int) -> bool:
    return gen % update_period == 0


def greedy_operator(net: QNetwork, norm: NormStats, s: PopulationState, actions=ACTIONS) -> OperatorId:
    x = norm.state_input(s)
    k = len(actions)
    X = np.array([[*x, action_code(i + 1, k)] for i in range(k)])
    q = net.predict(X)
    return actions[int(np.argmax(q))]  # first maximum, so ties go to the lowest index


def select_operator(net, norm, s, policy: SelectionPolicy, rng, explain: bool = False):
    """Pick the next operator.

    Fixed policies always return their operator, random ones draw uniformly.
    The DRL policy draws uniformly until a network exists; afterwards it takes
    the network's argmax with probability epsilon and a uniform draw otherwise.
    With ``explain`` the branch taken is returned alongside the operator.
    """
    actions = policy.actions
    if policy.mode == "fixed":
        op, branch = policy.op, "fixed"
    elif policy.mode == "random" or net is None:
        op, branch = actions[int(rng.integers(len(actions)))], "random"
    elif rng.random() <= policy.epsilon:
        op, branch = greedy_operator(net, norm, s, actions), "greedy"
    else:
        op, branch = actions[int(rng.integers(len(actions)))], "explore"
    return (op, branch) if explain else op


class _Assessor:
    def __init__(self, kind: str, initial_objectives: np.ndarray):
        self.kind = kind
        if kind == "indicator":
            lo = np.minimum(initial_objectives.min(axis=0), 0.0)
            hi = initial_objectives.max(axis=0)
            self.ideal = lo
            self.ref = lo + 1.1 * np.maximum(hi - lo, 1e-12)

    def __call__(self, pop) -> PopulationState:
        if self.kind == "basic":
            return assess_state(pop)
        return indicator_state(pop, self.ref, ideal=self.ideal)


def _quality(pop, reference) -> tuple:
    if reference is None:
        return float("nan"), float("nan")
    return final_quality(pop.objectives, pop.violations, reference)


def run(host, spec: ProblemSpec, cfg: RunConfig, reference=None) -> RunResult:
    """Evolve ``spec`` with ``host`` for ``cfg.G_max`` generations under ``cfg.policy``."""
    rng = np.random.default_rng(cfg.seed)
    policy = cfg.policy
    params = cfg.params.resolved(spec.n)
    if reference is None and spec.front is not None:
        reference = analytic_front(spec, cfg.front_resolution).points

    try:
        pop = host.initialize(spec, cfg.N, rng)
    except EvaluationError as err:
        raise RunError(f"{spec.name} seed {cfg.seed}: initialization failed: {err}") from err
    assess = _Assessor(cfg.assessor, host.reporting_population().objectives)
    s = assess(host.reporting_population())
    initial = s

    ep = ExperienceReplay(cfg.ms_ep, cfg.rs_ep)
    net, norm = None, None
    sessions = 0
    trace = []
    usage = {a.label: 0 for a in policy.actions}

    def train():
        nonlocal net, norm, sessions
        batch = ep.sample(min(cfg.s_tr, len(ep)), rng)
        net, norm = train_session(net, batch, cfg.hyper, rng, k=len(policy.actions))
        sessions += 1

    for gen in range(1, cfg.G_max + 1):
        op, branch = select_operator(net, norm, s, policy, rng, explain=True)
        pool = host.mating_selection(pop, cfg.N, rng)
        X = generate_offspring(op, pool, spec, params, rng)
        try:
            offspring = [evaluate(spec, x) for x in X]
        except EvaluationError as err:
            raise RunError(f"{spec.name} seed {cfg.seed} generation {gen}: {err}") from err
        pop = host.environmental_selection(pop, offspring, cfg.N)

        s_next = assess(host.reporting_population())
        record = make_record(s, op, s_next)
        ep.push(record)
        usage[op.label] += 1
        igd, hv = _quality(host.reporting_population(), reference)
        trace.append(TraceRow(gen, s, op, branch, record.r, s_next, igd, hv))
        s = s_next

        if policy.mode == "drl" and ep.ready:
            if net is None:
                train()
                log.debug("%s seed %d: network built at generation %d", spec.name, cfg.seed, gen)
            elif should_update_network(gen, cfg.update_period):
                train()

    return RunResult(population=host.reporting_population(), trace=trace, usage=usage,
                     sessions=sessions, replay=ep, initial_state=initial, network=net, norm=norm)
