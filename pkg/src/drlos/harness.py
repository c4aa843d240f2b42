"""Batch experiments: config parsing, seeded suite runs, CSV output and rank summaries."""

from __future__ import annotations

import csv
import dataclasses
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from .framework import TRACE_FIELDS, RunConfig, SelectionPolicy, run
from .host import make_host
from .indicators import HV_SENTINEL, IGD_PLUS_SENTINEL, nondominated_mask
from .problems import PROBLEM_NAMES, analytic_front, make_problem
from .qnet import TrainHyper

log = logging.getLogger(__name__)

DEFAULT_POLICIES = ("drl", "random", "fixed:ga", "fixed:de")


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SuiteConfig:
    problems: tuple = PROBLEM_NAMES
    policies: tuple = DEFAULT_POLICIES
    seeds: tuple = tuple(range(10))
    n: int = 10
    N: int = 40
    G_max: int = 200
    out: str = "results"
    epsilon: float = 0.9
    gamma: float = 0.9
    ms_ep: int = 1000
    rs_ep: int = 50
    s_tr: int = 100
    update_period: int = 50
    lr0: float = 0.01
    lr_decay: float = 1e-4
    max_iters: int = 80_000
    assessor: str = "basic"
    host: str = "cnsga2"
    front_resolution: int = 500
    workers: int = 1

    def __post_init__(self):
        if not self.problems:
            raise ConfigError("problems list is empty")
        if not self.policies:
            raise ConfigError("policies list is empty")
        if not self.seeds:
            raise ConfigError("seeds list is empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        for name in self.problems:
            if name not in PROBLEM_NAMES:
                raise ConfigError(f"unknown problem {name!r}")
        for p in self.policies:
            SelectionPolicy.parse(p)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        self.run_config(self.policies[0], self.seeds[0])

    def run_config(self, policy: str, seed: int) -> RunConfig:
        return RunConfig(
            N=self.N, G_max=self.G_max, seed=seed,
            policy=SelectionPolicy.parse(policy, self.epsilon),
            hyper=TrainHyper(lr0=self.lr0, decay=self.lr_decay, max_iters=self.max_iters,
                             gamma=self.gamma),
            ms_ep=self.ms_ep, rs_ep=self.rs_ep, s_tr=self.s_tr,
            update_period=self.update_period, assessor=self.assessor,
            front_resolution=self.front_resolution,
        )


def _names(v):
    return tuple(s.strip() for s in v.split(",") if s.strip())


def _upper_names(v):
    return tuple(s.upper() for s in _names(v))


def _lower_names(v):
    return tuple(s.lower() for s in _names(v))


def _seeds(v):
    out = []
    for part in _names(v):
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return tuple(out)


# config key -> (SuiteConfig field, converter)
CONFIG_KEYS = {
    "problems": ("problems", _upper_names),
    "policies": ("policies", _lower_names),
    "seeds": ("seeds", _seeds),
    "n": ("n", int),
    "pop": ("N", int),
    "gens": ("G_max", int),
    "out": ("out", str),
    "epsilon": ("epsilon", float),
    "gamma": ("gamma", float),
    "ms_ep": ("ms_ep", int),
    "rs_ep": ("rs_ep", int),
    "s_tr": ("s_tr", int),
    "update_period": ("update_period", int),
    "lr": ("lr0", float),
    "lr_decay": ("lr_decay", float),
    "max_iters": ("max_iters", int),
    "assessor": ("assessor", str),
    "host": ("host", str),
    "front_resolution": ("front_resolution", int),
    "workers": ("workers", int),
}


def parse_config(text: str, **overrides) -> SuiteConfig:
    """Parse ``key = value`` lines (``#`` comments, comma-separated lists)."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        attr, conv = CONFIG_KEYS[key]
        try:
            values[attr] = conv(value)
            SuiteConfig(**{attr: values[attr]})
        except ValueError as err:
            raise ConfigError(f"bad value for {key!r}: {err}", lineno) from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SuiteConfig(**values)
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError(str(err)) from None


def load_config(path, **overrides) -> SuiteConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "NaN" if math.isnan(v) else f"{float(v):.9g}"
    return str(v)


def write_csv(rows, path, fields=None) -> None:
    """Header plus one line per row; reals at 9 significant digits, NaN spelled ``NaN``."""
    rows = list(rows)
    if fields is None:
        if not rows:
            raise ValueError("fields are required to write an empty table")
        fields = list(rows[0].keys())
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(fields)
        for row in rows:
            if set(row) != set(fields):
                raise ValueError(f"row keys {sorted(row)} do not match header {list(fields)}")
            w.writerow([_fmt(row[f]) for f in fields])


def read_csv(path) -> list:
    """Rows as dicts, numeric cells converted to float."""
    def conv(cell):
        try:
            return float(cell)
        except ValueError:
            return cell

    with open(path, newline="", encoding="utf-8") as fh:
        return [{k: conv(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def front_rows(objectives, violations) -> list:
    F = np.asarray(objectives, dtype=float)
    F = F[np.asarray(violations) == 0.0] if F.size else F
    if len(F) == 0:
        return []
    F = np.unique(F, axis=0)
    F = F[nondominated_mask(F)]
    return [{f"f{j + 1}": v for j, v in enumerate(row)} for row in F]


def run_stem(problem: str, policy: str, seed: int) -> str:
    return f"{problem}__{policy.replace(':', '-')}__seed{seed}"


@dataclass
class JobResult:
    problem: str
    policy: str
    seed: int
    trace: list = field(default_factory=list)
    front: list = field(default_factory=list)
    igd_plus: float = float("nan")
    hv: float = float("nan")
    usage: dict = field(default_factory=dict)
    sessions: int = 0
    error: Optional[str] = None


def run_job(cfg: SuiteConfig, problem: str, policy: str, seed: int) -> JobResult:
    result = JobResult(problem, policy, seed)
    try:
        spec = make_problem(problem, cfg.n)
        reference = analytic_front(spec, cfg.front_resolution).points
        out = run(make_host(cfg.host), spec, cfg.run_config(policy, seed), reference)
    except Exception as err:  # a failed run is reported, the suite carries on
        log.warning("run %s failed: %s", run_stem(problem, policy, seed), err)
        result.error = f"{type(err).__name__}: {err}"
        return result
    result.trace = [row.csv_row() for row in out.trace]
    pop = out.population
    result.front = front_rows(pop.objectives, pop.violations)
    result.igd_plus, result.hv = out.final_igd_plus, out.final_hv
    result.usage = out.usage
    result.sessions = out.sessions
    return result


def _run_job_star(args):
    return run_job(*args)


def _iqr(v) -> float:
    q75, q25 = np.percentile(v, [75, 25])
    return float(q75 - q25)


SUMMARY_FIELDS = ("problem", "policy", "runs", "failures", "igd_plus_median", "igd_plus_iqr",
                  "hv_median", "hv_iqr", "igd_plus_rank", "hv_rank")


@dataclass
class SuiteSummary:
    rows: list
    mean_rank_igd_plus: dict
    mean_rank_hv: dict
    results: list

    def table(self) -> str:
        lines = ["policy        mean IGD+ rank   mean HV rank"]
        for pol in self.mean_rank_igd_plus:
            lines.append(f"{pol:<13} {self.mean_rank_igd_plus[pol]:>14.3f} "
                         f"{self.mean_rank_hv[pol]:>14.3f}")
        return "\n".join(lines)


def summarize(results, problems, policies) -> SuiteSummary:
    """Per-(problem, policy) medians and IQRs plus ranks averaged over problems.

    Runs without a feasible solution count as IGD+ = 100 and HV = 0. Policies
    are ranked per problem by median (ties share the averaged rank).
    """
    rows = []
    ranks_igd = {p: [] for p in policies}
    ranks_hv = {p: [] for p in policies}
    for prob in problems:
        block = []
        for pol in policies:
            mine = [r for r in results if r.problem == prob and r.policy == pol]
            ok = [r for r in mine if r.error is None]
            igd = np.array([IGD_PLUS_SENTINEL if math.isnan(r.igd_plus) else r.igd_plus for r in ok])
            hv = np.array([HV_SENTINEL if math.isnan(r.hv) else r.hv for r in ok])
            block.append({
                "problem": prob, "policy": pol, "runs": len(ok), "failures": len(mine) - len(ok),
                "igd_plus_median": float(np.median(igd)) if len(ok) else float("nan"),
                "igd_plus_iqr": _iqr(igd) if len(ok) else float("nan"),
                "hv_median": float(np.median(hv)) if len(ok) else float("nan"),
                "hv_iqr": _iqr(hv) if len(ok) else float("nan"),
            })
        med_igd = np.array([IGD_PLUS_SENTINEL if math.isnan(b["igd_plus_median"]) else b["igd_plus_median"]
                            for b in block])
        med_hv = np.array([HV_SENTINEL if math.isnan(b["hv_median"]) else b["hv_median"] for b in block])
        r_igd = rankdata(med_igd, method="average")
        r_hv = rankdata(-med_hv, method="average")
        for b, ri, rh in zip(block, r_igd, r_hv):
            b["igd_plus_rank"] = float(ri)
            b["hv_rank"] = float(rh)
            ranks_igd[b["policy"]].append(float(ri))
            ranks_hv[b["policy"]].append(float(rh))
        rows.extend(block)
    mean_igd = {p: float(np.mean(v)) for p, v in ranks_igd.items()}
    mean_hv = {p: float(np.mean(v)) for p, v in ranks_hv.items()}
    for pol in policies:
        rows.append({"problem": "mean", "policy": pol, "runs": "", "failures": "",
                     "igd_plus_median": float("nan"), "igd_plus_iqr": float("nan"),
                     "hv_median": float("nan"), "hv_iqr": float("nan"),
                     "igd_plus_rank": mean_igd[pol], "hv_rank": mean_hv[pol]})
    return SuiteSummary(rows, mean_igd, mean_hv, list(results))


def run_suite(cfg: SuiteConfig, out: Optional[str] = None) -> SuiteSummary:
    """Run every (problem, policy, seed) job, write trace/front CSVs and summary.csv."""
    out_dir = Path(out or cfg.out)
    jobs = [(cfg, prob, pol, seed)
            for prob, pol, seed in itertools.product(cfg.problems, cfg.policies, cfg.seeds)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, os.cpu_count() or 1)) as pool:
            results = list(pool.map(_run_job_star, jobs))
    else:
        results = [run_job(*job) for job in jobs]

    for r in results:
        if r.error is not None:
            continue
        stem = run_stem(r.problem, r.policy, r.seed)
        write_csv(r.trace, out_dir / "traces" / f"{stem}.csv", TRACE_FIELDS)
        write_csv(r.front, out_dir / "fronts" / f"{stem}.csv", ("f1", "f2"))
    summary = summarize(results, cfg.problems, cfg.policies)
    write_csv(summary.rows, out_dir / "summary.csv", SUMMARY_FIELDS)
    return summary


def config_text(cfg: SuiteConfig) -> str:
    """Render a config back to the ``key = value`` format."""
    reverse = {attr: key for key, (attr, _) in CONFIG_KEYS.items()}
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{reverse[f.name]} = {v}")
    return "\n".join(lines) + "\n"
