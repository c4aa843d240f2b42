"""Deep-Q-learning assisted operator selection for constrained multi-objective EAs."""

from .core import (EvaluationError, Population, ProblemSpec, Solution, constraint_violation,
                   evaluate, is_feasible)
from .framework import RunConfig, RunResult, SelectionPolicy, run, select_operator
from .host import CNSGA2, HostCMOEA
from .operators import OperatorId, OperatorParams
from .problems import analytic_front, grid_oracle_front, make_problem
from .qnet import TrainHyper, init_network, train_session
from .state import ExperienceReplay, PopulationState, assess_state, compute_reward

__version__ = "0.1.0"
