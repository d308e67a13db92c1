"""Domain types and primitives for ask-and-tell optimization benchmarking.

Everything else in the package is built on the types here: typed
configuration spaces, trial exchange structures, tasks, run histories and
incumbent trajectories, plus the trial-budget formula and Pareto dominance
helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Literal, Mapping, Protocol, Sequence

import numpy as np

from .errors import SpecError

ParamKind = Literal["float", "int", "ordinal", "categorical"]
TaskType = Literal["BB", "MF", "MO", "MOMF"]

TASK_TYPES: tuple[TaskType, ...] = ("BB", "MF", "MO", "MOMF")


@dataclass(frozen=True)
class HyperparameterDef:
    """One dimension of a configuration space, in native units."""

    name: str
    kind: ParamKind
    lower: float | None = None
    upper: float | None = None
    log_scale: bool = False
    choices: tuple | None = None

    def __post_init__(self):
        if self.kind in ("float", "int"):
            if self.lower is None or self.upper is None:
                raise SpecError(f"{self.name}: numeric parameter needs bounds")
            # degenerate intervals [a, a] are legal (constant parameter)
            if self.lower > self.upper:
                raise SpecError(f"{self.name}: lower must be <= upper")
            if self.log_scale:
                if self.kind != "float":
                    raise SpecError(f"{self.name}: log scale is float-only")
                if self.lower <= 0:
                    raise SpecError(f"{self.name}: log scale needs lower > 0")
            if self.choices is not None:
                raise SpecError(f"{self.name}: numeric parameter with choices")
        else:
            if not self.choices:
                raise SpecError(f"{self.name}: {self.kind} needs choices")
            if len(set(self.choices)) != len(self.choices):
                raise SpecError(f"{self.name}: duplicate choices")
            if self.lower is not None or self.upper is not None:
                raise SpecError(f"{self.name}: {self.kind} takes no bounds")
            if self.log_scale:
                raise SpecError(f"{self.name}: log scale is float-only")


def float_param(name, lower, upper, log_scale=False) -> HyperparameterDef:
    return HyperparameterDef(name, "float", float(lower), float(upper), log_scale)


def int_param(name, lower, upper) -> HyperparameterDef:
    return HyperparameterDef(name, "int", int(lower), int(upper))


def ordinal_param(name, choices) -> HyperparameterDef:
    return HyperparameterDef(name, "ordinal", choices=tuple(choices))


def categorical_param(name, choices) -> HyperparameterDef:
    return HyperparameterDef(name, "categorical", choices=tuple(choices))


@dataclass(frozen=True)
class ConfigSpace:
    """A flat product of hyperparameter definitions."""

    params: tuple[HyperparameterDef, ...]
    by_name: Mapping[str, HyperparameterDef] = field(
        init=False, repr=False, compare=False
    )

    def __init__(self, params: Sequence[HyperparameterDef]):
        params = tuple(params)
        if len(params) < 1:
            raise SpecError("a configuration space needs at least one parameter")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise SpecError("duplicate parameter names")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "by_name", {p.name: p for p in params})

    @property
    def dimension(self) -> int:
        return len(self.params)

    def __iter__(self) -> Iterator[HyperparameterDef]:
        return iter(self.params)


@dataclass(frozen=True)
class Configuration:
    """A point in a configuration space: one value per parameter name."""

    values: Mapping

    def __init__(self, values: Mapping):
        object.__setattr__(self, "values", dict(values))

    def __getitem__(self, name):
        return self.values[name]

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.values == other.values


@dataclass(frozen=True)
class FidelityRange:
    """Name and budget range of a task's fidelity dimension."""

    name: str
    min_budget: float
    max_budget: float

    def __post_init__(self):
        if not (0 < self.min_budget <= self.max_budget):
            raise SpecError("need 0 < min_budget <= max_budget")


@dataclass(frozen=True)
class TrialInfo:
    """Everything needed to perform one evaluation."""

    config: Configuration
    budget: float | None = None
    instance: int | None = None
    seed: int | None = None
    name: str | None = None
    checkpoint: str | None = None


@dataclass(frozen=True)
class TrialValue:
    """Everything observed from one evaluation. Objectives are minimized."""

    objectives: tuple[float, ...]
    cost: float = 0.0
    status: Literal["ok", "failed"] = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class ObjectiveFunction(Protocol):
    """Evaluates a TrialInfo into a TrialValue."""

    def evaluate(self, info: TrialInfo) -> TrialValue: ...


@dataclass(frozen=True)
class Task:
    """An objective function with its spaces, task type and trial budget.

    ``make_task_set`` always derives ``n_trials`` from the budget formula;
    direct construction accepts any positive budget so harness-style
    experiments can run longer.
    """

    id: str
    objective: ObjectiveFunction | None
    task_type: TaskType
    config_space: ConfigSpace
    n_objectives: int
    n_trials: int
    fidelity: FidelityRange | None = None
    instance: int | None = None

    def __post_init__(self):
        if self.task_type not in TASK_TYPES:
            raise SpecError(f"unknown task type {self.task_type!r}")
        if self.task_type in ("MF", "MOMF") and self.fidelity is None:
            raise SpecError(f"{self.id}: {self.task_type} task needs a fidelity")
        if self.task_type in ("MO", "MOMF") and self.n_objectives < 2:
            raise SpecError(f"{self.id}: multi-objective task needs >= 2 objectives")
        if self.task_type in ("BB", "MF") and self.n_objectives != 1:
            raise SpecError(f"{self.id}: single-objective task must have O = 1")
        if self.n_trials < 1:
            raise SpecError(f"{self.id}: n_trials must be positive")

    @property
    def dimension(self) -> int:
        return self.config_space.dimension


@dataclass
class History:
    """Evaluated trials of one run, in evaluation order."""

    entries: list[tuple[TrialInfo, TrialValue]] = field(default_factory=list)

    def append(self, info: TrialInfo, value: TrialValue):
        self.entries.append((info, value))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class TrajectoryEntry:
    """The incumbent after ``trial_index`` trials (1-based).

    ``front`` always holds (configuration, objectives) pairs; single-objective
    incumbents are fronts of length one.
    """

    trial_index: int
    front: tuple[tuple[Configuration, tuple[float, ...]], ...]

    def value(self) -> float:
        """Single-objective incumbent cost."""
        return self.front[0][1][0]


@dataclass
class Trajectory:
    """Sequence of incumbent changes over one run."""

    entries: list[TrajectoryEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def final(self) -> TrajectoryEntry | None:
        return self.entries[-1] if self.entries else None

    def at_step(self, step: int) -> TrajectoryEntry | None:
        """Last incumbent entry with trial_index <= step."""
        best = None
        for entry in self.entries:
            if entry.trial_index <= step:
                best = entry
            else:
                break
        return best


def budget_formula(d: int) -> int:
    """Trial budget for a d-dimensional task: ceil(20 + 40 * sqrt(d))."""
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise SpecError(f"dimension must be a positive integer, got {d!r}")
    return math.ceil(20 + 40 * math.sqrt(d))


def sample_config(space: ConfigSpace, rng: np.random.Generator) -> Configuration:
    """Uniform prior sample (uniform in log space for log-scale floats)."""
    values = {}
    for p in space:
        if p.kind == "float":
            if p.log_scale:
                values[p.name] = float(
                    10 ** rng.uniform(math.log10(p.lower), math.log10(p.upper))
                )
            else:
                values[p.name] = float(rng.uniform(p.lower, p.upper))
        elif p.kind == "int":
            values[p.name] = int(rng.integers(p.lower, p.upper + 1))
        else:
            values[p.name] = p.choices[int(rng.integers(len(p.choices)))]
    return Configuration(values)


def validate_config(space: ConfigSpace, config: Configuration) -> list[str]:
    """Return every violation; an empty list means the configuration is valid."""
    violations = []
    for p in space:
        if p.name not in config.values:
            violations.append(f"{p.name}: missing value")
            continue
        v = config.values[p.name]
        if p.kind in ("float", "int"):
            if not isinstance(v, (int, float, np.integer, np.floating)):
                violations.append(f"{p.name}: non-numeric value {v!r}")
            elif not p.lower <= v <= p.upper:
                violations.append(f"{p.name}: out of bounds ({v!r} not in [{p.lower}, {p.upper}])")
            elif p.kind == "int" and float(v) != int(v):
                violations.append(f"{p.name}: non-integer value {v!r}")
        else:
            if v not in p.choices:
                violations.append(f"{p.name}: {v!r} not among choices")
    for name in config.values:
        if name not in space.by_name:
            violations.append(f"{name}: extraneous value")
    return violations


def pareto_front(points: Sequence[Sequence[float]] | np.ndarray) -> list[int]:
    """Indices of points not weakly dominated by any strictly better point.

    Minimization dominance; duplicates of a front point are all retained.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise SpecError("pareto_front needs equally sized objective vectors")
    n = arr.shape[0]
    keep = []
    for i in range(n):
        # dominated iff some j is <= everywhere and < somewhere
        leq = np.all(arr <= arr[i], axis=1)
        lt = np.any(arr < arr[i], axis=1)
        if not np.any(leq & lt):
            keep.append(i)
    return keep


def _front_key(front):
    return tuple(sorted(tuple(obj) for _, obj in front))


def update_incumbent(history: History, task: Task) -> Trajectory:
    """Incumbent trajectory of a run.

    Only ok trials count. For fidelity tasks, trials at the highest budget
    define the incumbent as soon as any exist; before that, all ok trials do.
    Multi-objective incumbents are Pareto fronts under the same filter.
    """
    multi = task.n_objectives >= 2
    full_budget = task.fidelity.max_budget if task.fidelity is not None else None

    traj = Trajectory()
    all_pool: list[tuple[Configuration, tuple[float, ...]]] = []
    full_pool: list[tuple[Configuration, tuple[float, ...]]] = []
    last_key = None

    for step, (info, value) in enumerate(history, start=1):
        if value.ok and all(math.isfinite(o) for o in value.objectives):
            entry = (info.config, tuple(value.objectives))
            all_pool.append(entry)
            if full_budget is None or (
                info.budget is not None and info.budget == full_budget
            ):
                full_pool.append(entry)
        pool = full_pool if full_pool else all_pool
        if not pool:
            continue
        if multi:
            idx = pareto_front([obj for _, obj in pool])
            front = tuple(pool[i] for i in idx)
        else:
            best = min(pool, key=lambda e: e[1][0])
            front = (best,)
        key = _front_key(front)
        if key != last_key:
            traj.entries.append(TrajectoryEntry(step, front))
            last_key = key
    return traj
