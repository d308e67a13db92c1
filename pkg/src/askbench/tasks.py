"""Synthetic objective-function suite with known optima.

Six function families cover all four task types: sphere, rosenbrock,
rastrigin and ackley (single-objective), zdt1 (two objectives) and dtlz2
(three objectives). Instances shift the optimum by a seeded offset drawn
from the central 20% of the box; a deterministic fidelity model turns any
family into a multi-fidelity task.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigSpace,
    FidelityRange,
    Task,
    TrialInfo,
    TrialValue,
    budget_formula,
    float_param,
)
from .errors import DomainError, FidelityError, SpecError

# family -> (n_objectives, (lower, upper) canonical box, supported task types)
FAMILIES = {
    "sphere": (1, (-5.0, 5.0), ("BB", "MF")),
    "rosenbrock": (1, (-5.0, 10.0), ("BB", "MF")),
    "rastrigin": (1, (-5.0, 5.0), ("BB", "MF")),
    "ackley": (1, (-5.0, 5.0), ("BB", "MF")),
    "zdt1": (2, (0.0, 1.0), ("MO", "MOMF")),
    "dtlz2": (3, (0.0, 1.0), ("MO", "MOMF")),
}


def _stable_seed(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "little")


def instance_offset(family: str, d: int, instance: int) -> np.ndarray:
    """Seeded optimum shift; instance 0 is exactly zero.

    Offsets live in the central 20% of the box so the shifted optimum (and
    the shift-identity point) stays interior.
    """
    if family not in FAMILIES:
        raise SpecError(f"unknown family {family!r}")
    if instance == 0:
        return np.zeros(d)
    lo, hi = FAMILIES[family][1]
    center = 0.5 * (lo + hi)
    rng = np.random.default_rng(_stable_seed("offset", family, d, instance))
    return center + rng.uniform(-0.1, 0.1, size=d) * (hi - lo)


def _f_sphere(z):
    return np.array([float(np.sum(z * z))])


def _f_rosenbrock(z):
    a = z[:-1]
    b = z[1:]
    if len(z) == 1:
        return np.array([float((1.0 - z[0]) ** 2)])
    return np.array([float(np.sum(100.0 * (b - a * a) ** 2 + (1.0 - a) ** 2))])


def _f_rastrigin(z):
    return np.array(
        [float(10.0 * len(z) + np.sum(z * z - 10.0 * np.cos(2.0 * math.pi * z)))]
    )


def _f_ackley(z):
    d = len(z)
    s1 = math.sqrt(float(np.sum(z * z)) / d)
    s2 = float(np.sum(np.cos(2.0 * math.pi * z))) / d
    return np.array([-20.0 * math.exp(-0.2 * s1) - math.exp(s2) + 20.0 + math.e])


def _f_zdt1(z):
    # |z| in both terms keeps the formula defined after instance shifts
    f1 = abs(float(z[0]))
    if len(z) > 1:
        g = 1.0 + 9.0 * float(np.mean(np.abs(z[1:])))
    else:
        g = 1.0
    f2 = g * (1.0 - math.sqrt(f1 / g))
    return np.array([f1, f2])


def _f_dtlz2(z):
    theta = np.clip(np.abs(z[:2]), 0.0, 1.0) * (math.pi / 2.0)
    t1 = theta[0]
    t2 = theta[1] if len(theta) > 1 else 0.0
    g = float(np.sum((z[2:] - 0.5) ** 2)) if len(z) > 2 else 0.0
    return np.array(
        [
            (1.0 + g) * math.cos(t1) * math.cos(t2),
            (1.0 + g) * math.cos(t1) * math.sin(t2),
            (1.0 + g) * math.sin(t1),
        ]
    )


_EVALUATORS = {
    "sphere": _f_sphere,
    "rosenbrock": _f_rosenbrock,
    "rastrigin": _f_rastrigin,
    "ackley": _f_ackley,
    "zdt1": _f_zdt1,
    "dtlz2": _f_dtlz2,
}


def evaluate_synthetic(family: str, x, instance: int = 0) -> np.ndarray:
    """Objective vector of a family at x, with the instance's optimum shift."""
    if family not in FAMILIES:
        raise SpecError(f"unknown family {family!r}")
    x = np.asarray(x, dtype=float)
    lo, hi = FAMILIES[family][1]
    if np.any(x < lo) or np.any(x > hi):
        raise DomainError(f"{family}: input outside canonical box [{lo}, {hi}]^d")
    z = x - instance_offset(family, len(x), instance)
    return _EVALUATORS[family](z)


@dataclass(frozen=True)
class FidelityModel:
    """Deterministic low-fidelity bias model.

    At fidelity F the objective becomes f(x) + c * (1 - t) * g(x) with
    t = (F - min) / (max - min) and |g| <= 1 smooth and seeded, so the
    full-fidelity value is exact and the bias shrinks linearly in F.
    """

    min_budget: float
    max_budget: float
    bias_scale: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.min_budget < self.max_budget:
            raise SpecError("need 0 < min_budget < max_budget")
        if self.bias_scale < 0:
            raise SpecError("bias_scale must be non-negative")

    def bias(self, x: np.ndarray, n_objectives: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(n_objectives)
        for o in range(n_objectives):
            rng = np.random.default_rng(_stable_seed("fidelity", self.seed, o))
            w = rng.standard_normal(len(x))
            b = rng.uniform(0.0, 2.0 * math.pi)
            out[o] = math.sin(float(np.dot(w, x)) / math.sqrt(len(x)) + b)
        return out


def attach_fidelity(
    family: str, x, instance: int, fm: FidelityModel, fidelity: float
) -> np.ndarray:
    """Evaluate a family through the fidelity model at budget ``fidelity``."""
    if not fm.min_budget <= fidelity <= fm.max_budget:
        raise FidelityError(
            f"fidelity {fidelity} outside [{fm.min_budget}, {fm.max_budget}]"
        )
    base = evaluate_synthetic(family, x, instance)
    t = (fidelity - fm.min_budget) / (fm.max_budget - fm.min_budget)
    if t == 1.0 or fm.bias_scale == 0.0:
        return base
    return base + fm.bias_scale * (1.0 - t) * fm.bias(x, len(base))


@dataclass(frozen=True)
class SyntheticObjective:
    """ObjectiveFunction over one (family, dimension, instance) triple."""

    family: str
    dimension: int
    instance: int = 0
    fidelity_model: FidelityModel | None = None
    fail_always: bool = False  # test hook for the runner's failure policy

    def evaluate(self, info: TrialInfo) -> TrialValue:
        if self.fail_always:
            raise RuntimeError("synthetic objective configured to fail")
        x = np.array(
            [info.config[f"x{i}"] for i in range(self.dimension)], dtype=float
        )
        if self.fidelity_model is not None and info.budget is not None:
            objectives = attach_fidelity(
                self.family, x, self.instance, self.fidelity_model, info.budget
            )
            cost = info.budget / self.fidelity_model.max_budget
        else:
            objectives = evaluate_synthetic(self.family, x, self.instance)
            cost = 1.0
        return TrialValue(tuple(float(o) for o in objectives), cost=cost)


def space_for(family: str, d: int) -> ConfigSpace:
    lo, hi = FAMILIES[family][1]
    return ConfigSpace([float_param(f"x{i}", lo, hi) for i in range(d)])


def task_id_for(task_type: str, family: str, d: int, instance: int) -> str:
    return f"{task_type.lower()}-{family}-d{d}-i{instance}"


def make_task(
    family: str,
    d: int,
    instance: int,
    task_type: str,
    fidelity: FidelityModel | None = None,
) -> Task:
    """One task with the budget-formula trial count."""
    if family not in FAMILIES:
        raise SpecError(f"unknown family {family!r}")
    n_obj, _, supported = FAMILIES[family]
    if task_type not in supported:
        raise SpecError(f"{family} does not support task type {task_type}")
    needs_fidelity = task_type in ("MF", "MOMF")
    if needs_fidelity and fidelity is None:
        fidelity = FidelityModel(1.0, 100.0)
    objective = SyntheticObjective(
        family, d, instance, fidelity_model=fidelity if needs_fidelity else None
    )
    return Task(
        id=task_id_for(task_type, family, d, instance),
        objective=objective,
        task_type=task_type,  # type: ignore[arg-type]
        config_space=space_for(family, d),
        n_objectives=n_obj,
        n_trials=budget_formula(d),
        fidelity=(
            FidelityRange("budget", fidelity.min_budget, fidelity.max_budget)
            if needs_fidelity
            else None
        ),
        instance=instance,
    )


def make_task_set(spec: dict) -> list[Task]:
    """Expand a task-set spec into tasks.

    Spec format (see FORMATS.md)::

        {"groups": [{"family": "sphere", "dimensions": [2, 3],
                     "instances": [0, 1], "task_type": "BB",
                     "fidelity": {"min_budget": 1, "max_budget": 100,
                                  "bias_scale": 0.5}}]}
    """
    if not isinstance(spec, dict) or "groups" not in spec:
        raise SpecError("task-set spec needs a 'groups' list")
    tasks = []
    seen = set()
    for group in spec["groups"]:
        try:
            family = group["family"]
            task_type = group["task_type"]
            dims = list(group["dimensions"])
            instances = list(group.get("instances", [0]))
        except (KeyError, TypeError) as exc:
            raise SpecError(f"bad task group: {exc}") from exc
        fid = None
        if group.get("fidelity"):
            f = group["fidelity"]
            fid = FidelityModel(
                float(f["min_budget"]),
                float(f["max_budget"]),
                float(f.get("bias_scale", 0.5)),
                int(f.get("seed", 0)),
            )
        for d in dims:
            for inst in instances:
                task = make_task(family, int(d), int(inst), task_type, fid)
                if task.id in seen:
                    raise SpecError(f"duplicate task id {task.id}")
                seen.add(task.id)
                tasks.append(task)
    return tasks


def load_task_set(path) -> list[Task]:
    with open(path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(
                f"{path}: invalid JSON at byte offset {exc.pos}: {exc.msg}"
            ) from exc
    return make_task_set(spec)


def hp_type_counts(space: ConfigSpace) -> dict[str, int]:
    counts = {"float": 0, "int": 0, "categorical": 0, "ordinal": 0}
    for p in space:
        counts[p.kind] += 1
    return counts
