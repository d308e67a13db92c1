"""Baseline ask-and-tell optimizers for every task type.

All optimizers speak the same protocol: ``ask()`` returns a TrialInfo,
``tell(info, value)`` reports the evaluation back. The runner owns the
budget; optimizers keep producing trials for as long as they are asked,
and signal exhaustion only once the task's trial budget has been told.

Rosters per task type (three diverse optimizers each):
  BB:   RandomSearch, OnePlusOneES, DifferentialEvolution
  MF:   RandomSearch, SuccessiveHalving, Hyperband
  MO:   RandomSearch, ArchiveSearch, DifferentialEvolution
  MOMF: RandomSearch, HyperbandPareto, ArchiveSearch (ignores fidelity)
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Configuration,
    ConfigSpace,
    Task,
    TrialInfo,
    TrialValue,
    pareto_front,
    sample_config,
)
from .errors import BudgetExhausted, ProtocolError, SpecError


def derive_seed(*parts) -> int:
    """Stable cross-process seed material from string parts."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "little")


class Optimizer:
    """Ask/tell bookkeeping shared by all variants."""

    id: str = "base"
    task_types: tuple[str, ...] = ()

    def __init__(self, task: Task, seed: int):
        self.task = task
        self.seed = seed
        self.rng = np.random.default_rng(derive_seed(self.id, task.id, seed))
        self.pending: dict[str, TrialInfo] = {}
        self._ask_counter = 0
        self._told = 0

    @classmethod
    def supports(cls, task_type: str) -> bool:
        return task_type in cls.task_types

    def ask(self) -> TrialInfo:
        if self._told >= self.task.n_trials:
            raise BudgetExhausted(
                f"{self.id}: budget of {self.task.n_trials} trials spent"
            )
        config, budget = self._propose()
        self._ask_counter += 1
        info = TrialInfo(
            config=config,
            budget=budget,
            instance=self.task.instance,
            seed=self.seed,
            name=f"t{self._ask_counter}",
        )
        self.pending[info.name] = info
        return info

    def tell(self, info: TrialInfo, value: TrialValue):
        if info.name is None or info.name not in self.pending:
            raise ProtocolError(f"{self.id}: tell of a trial that was never asked")
        del self.pending[info.name]
        self._told += 1
        self._observe(info, value)

    # strategy hooks -----------------------------------------------------
    def _propose(self) -> tuple[Configuration, float | None]:
        raise NotImplementedError

    def _observe(self, info: TrialInfo, value: TrialValue):
        pass

    # helpers ------------------------------------------------------------
    def _max_budget(self) -> float | None:
        return self.task.fidelity.max_budget if self.task.fidelity else None

    def _scalar(self, value: TrialValue) -> float:
        if not value.ok or not math.isfinite(value.objectives[0]):
            return math.inf
        return value.objectives[0]


class RandomSearch(Optimizer):
    """Uniform sampling; fidelity tasks are asked at full budget."""

    id = "RandomSearch"
    task_types = ("BB", "MF", "MO", "MOMF")

    def _propose(self):
        return sample_config(self.task.config_space, self.rng), self._max_budget()


def _mutate_config(
    space: ConfigSpace,
    config: Configuration,
    rng: np.random.Generator,
    sigma: float,
    cat_prob: float,
) -> Configuration:
    """Gaussian step on numerics (log space where applicable), +-1 on
    ordinals, resample on categoricals with probability ``cat_prob``."""
    values = {}
    for p in space:
        v = config[p.name]
        if p.kind == "float":
            if p.lower == p.upper:
                values[p.name] = p.lower
                continue
            if p.log_scale:
                lo, hi = math.log10(p.lower), math.log10(p.upper)
                z = (math.log10(v) - lo) / (hi - lo)
                z = min(1.0, max(0.0, z + sigma * rng.standard_normal()))
                values[p.name] = float(10 ** (lo + z * (hi - lo)))
            else:
                z = (v - p.lower) / (p.upper - p.lower)
                z = min(1.0, max(0.0, z + sigma * rng.standard_normal()))
                values[p.name] = float(p.lower + z * (p.upper - p.lower))
        elif p.kind == "int":
            if p.lower == p.upper:
                values[p.name] = p.lower
                continue
            z = (v - p.lower) / (p.upper - p.lower)
            z = min(1.0, max(0.0, z + sigma * rng.standard_normal()))
            values[p.name] = int(round(p.lower + z * (p.upper - p.lower)))
        elif p.kind == "ordinal":
            i = p.choices.index(v)
            step = 1 if rng.random() < 0.5 else -1
            i = min(len(p.choices) - 1, max(0, i + step))
            values[p.name] = p.choices[i]
        else:
            if rng.random() < cat_prob:
                values[p.name] = p.choices[int(rng.integers(len(p.choices)))]
            else:
                values[p.name] = v
    return Configuration(values)


class OnePlusOneES(Optimizer):
    """(1+1) evolution strategy with one-fifth-rule step adaptation."""

    id = "OnePlusOneES"
    task_types = ("BB",)

    def __init__(self, task, seed, sigma0: float = 0.2):
        super().__init__(task, seed)
        self.sigma = sigma0
        self.parent: Configuration | None = None
        self.parent_cost = math.inf

    def _propose(self):
        if self.parent is None:
            return sample_config(self.task.config_space, self.rng), self._max_budget()
        child = _mutate_config(
            self.task.config_space, self.parent, self.rng, self.sigma, 0.2
        )
        return child, self._max_budget()

    def _observe(self, info, value):
        cost = self._scalar(value)
        if self.parent is None:
            self.parent, self.parent_cost = info.config, cost
            return
        if cost <= self.parent_cost:
            self.parent, self.parent_cost = info.config, cost
            self.sigma = min(0.5, self.sigma * 1.5)
        else:
            self.sigma = max(1e-4, self.sigma * 1.5 ** -0.25)


def mo_archive_select(
    space: ConfigSpace,
    archive: list[tuple[Configuration, tuple[float, ...]]],
    rng: np.random.Generator,
    sigma: float = 0.1,
    cat_prob: float = 0.2,
) -> Configuration:
    """Next configuration for a Pareto-archive mutation search.

    Empty archive: uniform sample. Otherwise a uniformly chosen member of
    the archive's current front is mutated (Gaussian, sigma = 10% of range
    on numerics; uniform categorical resample with probability 0.2).
    """
    if not archive:
        return sample_config(space, rng)
    front = pareto_front([obj for _, obj in archive])
    parent = archive[front[int(rng.integers(len(front)))]][0]
    return _mutate_config(space, parent, rng, sigma, cat_prob)


class ArchiveSearch(Optimizer):
    """Pareto-archive mutation search; single-objective archives degenerate
    to the incumbent. Ignores fidelity (asks at full budget)."""

    id = "ArchiveSearch"
    task_types = ("BB", "MO", "MOMF")

    def __init__(self, task, seed, sigma: float = 0.1):
        super().__init__(task, seed)
        self.sigma = sigma
        self.archive: list[tuple[Configuration, tuple[float, ...]]] = []

    def _propose(self):
        config = mo_archive_select(
            self.task.config_space, self.archive, self.rng, self.sigma
        )
        return config, self._max_budget()

    def _observe(self, info, value):
        if value.ok and all(math.isfinite(o) for o in value.objectives):
            self.archive.append((info.config, tuple(value.objectives)))


class DifferentialEvolution(Optimizer):
    """rand/1/bin differential evolution in a normalized space.

    Selection is by objective for single-objective tasks and by Pareto
    dominance for multi-objective ones (non-dominated children replace
    their parent with probability one half).
    """

    id = "DifferentialEvolution"
    task_types = ("BB", "MO")

    def __init__(self, task, seed, f: float = 0.5, cr: float = 0.9):
        super().__init__(task, seed)
        self.f = f
        self.cr = cr
        d = task.config_space.dimension
        self.pop_size = max(8, min(40, 5 * d))
        self.pop: list[tuple[Configuration, tuple[float, ...] | None]] = []
        self.slot_of: dict[str, int] = {}
        self.cursor = 0

    def _norm(self, config: Configuration) -> np.ndarray:
        out = []
        for p in self.task.config_space:
            v = config[p.name]
            if p.kind == "float" and p.log_scale:
                lo, hi = math.log10(p.lower), math.log10(p.upper)
                out.append(0.0 if hi == lo else (math.log10(v) - lo) / (hi - lo))
            elif p.kind in ("float", "int"):
                out.append(
                    0.0
                    if p.upper == p.lower
                    else (v - p.lower) / (p.upper - p.lower)
                )
            else:
                out.append(p.choices.index(v) / max(1, len(p.choices) - 1))
        return np.array(out)

    def _denorm(self, z: np.ndarray) -> Configuration:
        values = {}
        for i, p in enumerate(self.task.config_space):
            zi = min(1.0, max(0.0, float(z[i])))
            if p.kind == "float" and p.log_scale:
                lo, hi = math.log10(p.lower), math.log10(p.upper)
                values[p.name] = float(10 ** (lo + zi * (hi - lo)))
            elif p.kind == "float":
                values[p.name] = float(p.lower + zi * (p.upper - p.lower))
            elif p.kind == "int":
                values[p.name] = int(round(p.lower + zi * (p.upper - p.lower)))
            else:
                values[p.name] = p.choices[
                    int(round(zi * (len(p.choices) - 1)))
                ]
        return Configuration(values)

    def ask(self):
        self._slot_hint = None
        info = super().ask()
        if self._slot_hint is not None:
            self.slot_of[info.name] = self._slot_hint
        return info

    def _propose(self):
        budget = self._max_budget()
        if len(self.pop) + len(self.pending) < self.pop_size:
            return sample_config(self.task.config_space, self.rng), budget
        slot = self.cursor % self.pop_size
        self.cursor += 1
        d = self.task.config_space.dimension
        choices = [i for i in range(len(self.pop)) if i != slot]
        a, b, c = self.rng.choice(choices, size=3, replace=len(choices) < 3)
        za = self._norm(self.pop[a][0])
        zb = self._norm(self.pop[b][0])
        zc = self._norm(self.pop[c][0])
        mutant = np.clip(za + self.f * (zb - zc), 0.0, 1.0)
        target = self._norm(self.pop[slot][0])
        cross = self.rng.random(d) < self.cr
        cross[int(self.rng.integers(d))] = True
        trial = np.where(cross, mutant, target)
        config = self._denorm(trial)
        self._slot_hint = slot
        return config, budget

    def _observe(self, info, value):
        objs = (
            tuple(value.objectives)
            if value.ok and all(math.isfinite(o) for o in value.objectives)
            else None
        )
        slot = self.slot_of.pop(info.name, None)
        if slot is None:
            if len(self.pop) < self.pop_size:
                self.pop.append((info.config, objs))
            return
        parent_objs = self.pop[slot][1]
        if objs is None:
            return
        if parent_objs is None:
            self.pop[slot] = (info.config, objs)
            return
        if self.task.n_objectives == 1:
            if objs[0] <= parent_objs[0]:
                self.pop[slot] = (info.config, objs)
        else:
            child_le = all(c <= p for c, p in zip(objs, parent_objs))
            parent_le = all(p <= c for c, p in zip(objs, parent_objs))
            if child_le:
                self.pop[slot] = (info.config, objs)
            elif not parent_le and self.rng.random() < 0.5:
                self.pop[slot] = (info.config, objs)


def hyperband_brackets(
    min_budget: float, max_budget: float, eta: float = 3.0
) -> list[tuple[int, tuple[float, ...]]]:
    """Hyperband bracket schedule: (initial configs, rung budgets) pairs.

    s_max = floor(log_eta(max/min)); bracket s in s_max..0 starts
    ceil((s_max+1)/(s+1) * eta^s) configs at budget max * eta^-s and keeps
    the top floor(n/eta) per rung. min == max degenerates to one bracket
    with a single rung.
    """
    if eta < 2:
        raise SpecError("eta must be >= 2")
    if not 0 < min_budget <= max_budget:
        raise SpecError("need 0 < min_budget <= max_budget")
    if min_budget == max_budget:
        return [(1, (float(max_budget),))]
    s_max = int(math.floor(math.log(max_budget / min_budget) / math.log(eta) + 1e-9))
    brackets = []
    for s in range(s_max, -1, -1):
        n = math.ceil((s_max + 1) / (s + 1) * eta**s)
        budgets = tuple(float(max_budget * eta ** -(s - i)) for i in range(s + 1))
        brackets.append((n, budgets))
    return brackets


def bracket_rung_counts(n0: int, n_rungs: int, eta: float) -> list[int]:
    counts = [n0]
    for _ in range(n_rungs - 1):
        counts.append(int(counts[-1] // eta))
    return counts


class Hyperband(Optimizer):
    """Hyperband over the task's fidelity range; schedules repeat forever."""

    id = "Hyperband"
    task_types = ("MF",)

    def __init__(self, task, seed, eta: float = 3.0):
        super().__init__(task, seed)
        if task.fidelity is None:
            raise SpecError(f"{self.id} needs a fidelity task")
        self.eta = eta
        self.brackets = self._schedule()
        self.bracket_i = 0
        self.rung_i = 0
        self.rung: list[tuple[Configuration, float | None]] = []  # config, key
        self.queue: list[int] = []  # rung slots awaiting an ask
        self.awaiting: dict[str, int] = {}  # trial name -> rung slot
        self._next_slot: int | None = None
        self._open_rung()

    def _schedule(self):
        return hyperband_brackets(
            self.task.fidelity.min_budget, self.task.fidelity.max_budget, self.eta
        )

    def _open_rung(self, survivors: list[Configuration] | None = None):
        n0, budgets = self.brackets[self.bracket_i]
        if survivors is None:
            configs = [
                sample_config(self.task.config_space, self.rng) for _ in range(n0)
            ]
        else:
            configs = survivors
        self.rung = [(c, None) for c in configs]
        self.queue = list(range(len(configs)))
        self.current_budget = budgets[self.rung_i]

    def _promotion_key(self, value: TrialValue) -> float:
        return self._scalar(value)

    def _advance_if_complete(self):
        if self.queue or self.awaiting:
            return
        if any(key is None for _, key in self.rung):
            return
        n0, budgets = self.brackets[self.bracket_i]
        counts = bracket_rung_counts(len(self.rung), 2, self.eta)
        keep = counts[1]
        if self.rung_i + 1 < len(budgets) and keep >= 1:
            order = sorted(range(len(self.rung)), key=lambda i: (self.rung[i][1], i))
            survivors = [self.rung[i][0] for i in order[:keep]]
            self.rung_i += 1
            self._open_rung(survivors)
        else:
            self.bracket_i += 1
            self.rung_i = 0
            if self.bracket_i >= len(self.brackets):
                self.bracket_i = 0  # start a fresh schedule
            self._open_rung()

    def _propose(self):
        self._advance_if_complete()
        if not self.queue:
            # rung still in flight; sample a filler at the current budget
            return (
                sample_config(self.task.config_space, self.rng),
                self.current_budget,
            )
        slot = self.queue.pop(0)
        self._next_slot = slot
        return self.rung[slot][0], self.current_budget

    def ask(self):
        info = super().ask()
        if hasattr(self, "_next_slot") and self._next_slot is not None:
            self.awaiting[info.name] = self._next_slot
            self._next_slot = None
        return info

    def _observe(self, info, value):
        slot = self.awaiting.pop(info.name, None)
        if slot is not None:
            config, _ = self.rung[slot]
            self.rung[slot] = (config, self._promotion_key(value))
        self._advance_if_complete()


class SuccessiveHalving(Hyperband):
    """The most exploratory Hyperband bracket, repeated."""

    id = "SuccessiveHalving"
    task_types = ("MF",)

    def _schedule(self):
        return hyperband_brackets(
            self.task.fidelity.min_budget, self.task.fidelity.max_budget, self.eta
        )[:1]


class HyperbandPareto(Hyperband):
    """Hyperband scheduling with multi-objective rung promotion.

    Rung entries are ranked by the mean of per-objective min-max-normalized
    values across the rung; the incumbent is the Pareto front (computed by
    the core trajectory machinery).
    """

    id = "HyperbandPareto"
    task_types = ("MOMF",)

    def __init__(self, task, seed, eta: float = 3.0):
        super().__init__(task, seed, eta)
        self.rung_values: dict[int, tuple[float, ...] | None] = {}

    def _observe(self, info, value):
        slot = self.awaiting.pop(info.name, None)
        if slot is not None:
            config, _ = self.rung[slot]
            objs = (
                tuple(value.objectives)
                if value.ok and all(math.isfinite(o) for o in value.objectives)
                else None
            )
            self.rung_values[slot] = objs
            self.rung[slot] = (config, 0.0)  # placeholder until rung closes
            if not self.queue and not self.awaiting:
                self._score_rung()
        self._advance_if_complete()

    def _score_rung(self):
        objs = [self.rung_values.get(i) for i in range(len(self.rung))]
        valid = [o for o in objs if o is not None]
        if not valid:
            keys = [math.inf] * len(self.rung)
        else:
            arr = np.array(valid)
            lo = arr.min(axis=0)
            hi = arr.max(axis=0)
            span = np.where(hi > lo, hi - lo, 1.0)
            keys = []
            for o in objs:
                if o is None:
                    keys.append(math.inf)
                else:
                    z = (np.array(o) - lo) / span
                    z = np.where(hi > lo, z, 0.5)
                    keys.append(float(z.mean()))
        self.rung = [(c, k) for (c, _), k in zip(self.rung, keys)]
        self.rung_values.clear()


OPTIMIZERS: dict[str, type[Optimizer]] = {
    cls.id: cls
    for cls in (
        RandomSearch,
        OnePlusOneES,
        ArchiveSearch,
        DifferentialEvolution,
        SuccessiveHalving,
        Hyperband,
        HyperbandPareto,
    )
}

DEFAULT_ROSTER = {
    "BB": ("RandomSearch", "OnePlusOneES", "DifferentialEvolution"),
    "MF": ("RandomSearch", "SuccessiveHalving", "Hyperband"),
    "MO": ("RandomSearch", "ArchiveSearch", "DifferentialEvolution"),
    "MOMF": ("RandomSearch", "HyperbandPareto", "ArchiveSearch"),
}


def make_optimizer(
    optimizer_id: str, task: Task, seed: int, params: dict | None = None
) -> Optimizer:
    if optimizer_id not in OPTIMIZERS:
        raise SpecError(f"unknown optimizer {optimizer_id!r}")
    cls = OPTIMIZERS[optimizer_id]
    if not cls.supports(task.task_type):
        raise SpecError(
            f"{optimizer_id} does not support task type {task.task_type}"
        )
    return cls(task, seed, **(params or {}))
