"""Task and task-set model, JSON I/O and random task-set generation."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

DEFAULT_TOLERANCE = 1e-12


def tolerance() -> float:
    """Absolute tolerance on accept boundaries (``K2U_TOLERANCE`` overrides)."""
    raw = os.environ.get("K2U_TOLERANCE")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOLERANCE
    value = float(raw)
    if value < 0 or not math.isfinite(value):
        raise ValueError(f"K2U_TOLERANCE must be a finite non-negative number, got {raw!r}")
    return value


class TaskModelError(ValueError):
    """Invalid task or task-set data.

    ``task_index`` is ``None`` for errors at the task-set level.
    """

    def __init__(self, message: str, task_index: Optional[int] = None, field: Optional[str] = None):
        self.task_index = task_index
        self.field = field
        self.detail = message
        where = []
        if task_index is not None:
            where.append(f"task {task_index}")
        if field is not None:
            where.append(f"field {field}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class Task:
    """One sporadic task.

    ``suspension`` is the per-job self-suspension bound, ``critical_path``
    the DAG critical-path length and ``frames`` the execution times of a
    multi-frame task (``wcet`` must then be the largest frame).
    """

    wcet: float
    period: float
    deadline: Optional[float] = None
    suspension: float = 0.0
    critical_path: Optional[float] = None
    frames: Optional[tuple] = None

    def __post_init__(self):
        if self.deadline is None:
            object.__setattr__(self, "deadline", self.period)
        if self.frames is not None:
            object.__setattr__(self, "frames", tuple(float(f) for f in self.frames))
        self._check()

    def _check(self, index=None):
        for name in ("wcet", "period", "deadline"):
            v = getattr(self, name)
            if not _is_number(v) or not v > 0 or not math.isfinite(v):
                raise TaskModelError(f"must be a finite number > 0, got {v!r}", index, name)
        if not _is_number(self.suspension) or self.suspension < 0:
            raise TaskModelError(f"must be >= 0, got {self.suspension!r}", index, "suspension")
        if self.suspension > 0 and self.wcet + self.suspension > self.period:
            raise TaskModelError(
                f"violates C_i + S_i <= T_i ({self.wcet} + {self.suspension} > {self.period})",
                index,
                "suspension",
            )
        if self.critical_path is not None:
            cp = self.critical_path
            if not _is_number(cp) or cp < 0:
                raise TaskModelError(f"must be >= 0, got {cp!r}", index, "critical_path")
            if cp > self.wcet:
                raise TaskModelError(
                    f"critical path {cp} exceeds wcet {self.wcet}", index, "critical_path"
                )
        if self.frames is not None:
            if len(self.frames) == 0:
                raise TaskModelError("must be a nonempty list", index, "frames")
            if any(not f > 0 for f in self.frames):
                raise TaskModelError("every frame must be > 0", index, "frames")
            if max(self.frames) != self.wcet:
                raise TaskModelError(
                    f"wcet {self.wcet} must equal the largest frame {max(self.frames)}",
                    index,
                    "wcet",
                )

    @property
    def utilization(self) -> float:
        return self.wcet / self.period


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


@dataclass(frozen=True)
class TaskSet:
    """Tasks in priority order (index 0 is the highest) plus processor count."""

    tasks: tuple
    processors: int = 1

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise TaskModelError("a task set needs at least one task", field="tasks")
        if isinstance(self.processors, bool) or not isinstance(self.processors, int) or self.processors < 1:
            raise TaskModelError(f"must be an integer >= 1, got {self.processors!r}", field="processors")
        for i, t in enumerate(self.tasks):
            if not isinstance(t, Task):
                raise TaskModelError("not a Task", i)

    def __len__(self):
        return len(self.tasks)

    def __getitem__(self, i):
        return self.tasks[i]

    @property
    def deadline_class(self) -> str:
        if all(t.deadline == t.period for t in self.tasks):
            return "implicit"
        if all(t.deadline <= t.period for t in self.tasks):
            return "constrained"
        return "arbitrary"

    def arrays(self, upto: Optional[int] = None):
        """(C, T, D) as float64 arrays for tasks ``[0, upto)``."""
        tasks = self.tasks if upto is None else self.tasks[:upto]
        c = np.array([t.wcet for t in tasks], dtype=np.float64)
        p = np.array([t.period for t in tasks], dtype=np.float64)
        d = np.array([t.deadline for t in tasks], dtype=np.float64)
        return c, p, d

    def with_processors(self, m: int) -> "TaskSet":
        return TaskSet(self.tasks, m)

    def sorted_rm(self) -> "TaskSet":
        order = sorted(range(len(self.tasks)), key=lambda i: (self.tasks[i].period, i))
        return TaskSet([self.tasks[i] for i in order], self.processors)

    def sorted_dm(self) -> "TaskSet":
        order = sorted(range(len(self.tasks)), key=lambda i: (self.tasks[i].deadline, i))
        return TaskSet([self.tasks[i] for i in order], self.processors)


@dataclass(frozen=True)
class Verdict:
    """Result of one schedulability test on one task (or a whole set).

    ``accepted`` mirrors ``value <= bound`` within the boundary tolerance.
    Inapplicable tests set ``applicable=False``, ``accepted=False`` and say
    why in ``note``.
    """

    accepted: bool
    bound: float
    value: float
    test_name: str
    note: str = ""
    applicable: bool = True
    task: Optional[int] = None

    @classmethod
    def compare(cls, value, bound, test_name, note="", task=None, tol=None):
        tol = tolerance() if tol is None else tol
        return cls(bool(value <= bound + tol), float(bound), float(value), test_name, note, True, task)

    @classmethod
    def not_applicable(cls, test_name, note, task=None):
        return cls(False, math.nan, math.nan, test_name, note, False, task)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "test": self.test_name,
            "accepted": self.accepted,
            "applicable": self.applicable,
            "value": None if math.isnan(self.value) else self.value,
            "bound": None if math.isnan(self.bound) else self.bound,
            "note": self.note,
        }


def utilization_summary(taskset: TaskSet):
    """Return ``(total, max, per_task)`` utilizations."""
    per_task = [t.wcet / t.period for t in taskset.tasks]
    return math.fsum(per_task), max(per_task), per_task


# --------------------------------------------------------------------------
# multi-frame
# --------------------------------------------------------------------------


def phi(task: Task, ell: int) -> float:
    """Largest total execution of ``ell`` cyclically consecutive frames."""
    if task.frames is None:
        raise TaskModelError("task has no frames", field="frames")
    n = len(task.frames)
    if isinstance(ell, bool) or not isinstance(ell, int) or not 1 <= ell <= n:
        raise ValueError(f"ell must be an integer in [1, {n}], got {ell!r}")
    f = task.frames
    return max(math.fsum(f[(s + j) % n] for j in range(ell)) for s in range(n))


def beta_bound(task: Task) -> float:
    """Upper bound on the multi-frame beta coefficient, (phi(2) - phi(1)) / phi(1)."""
    if task.frames is None or len(task.frames) < 2:
        raise ValueError("beta_bound needs at least two frames")
    p1 = phi(task, 1)
    return (phi(task, 2) - p1) / p1


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

_TASK_KEYS = {"c", "t", "d", "s", "cp", "frames"}
_SET_KEYS = {"processors", "tasks"}
_FIELD_NAMES = {"c": "wcet", "t": "period", "d": "deadline", "s": "suspension", "cp": "critical_path"}


def taskset_from_dict(doc) -> TaskSet:
    if not isinstance(doc, dict):
        raise TaskModelError("document must be a JSON object")
    unknown = set(doc) - _SET_KEYS
    if unknown:
        raise TaskModelError(f"unknown field(s) {sorted(unknown)}")
    if "tasks" not in doc:
        raise TaskModelError("missing required field", field="tasks")
    m = doc.get("processors", 1)
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise TaskModelError(f"must be an integer >= 1, got {m!r}", field="processors")
    raw = doc["tasks"]
    if not isinstance(raw, list) or not raw:
        raise TaskModelError("must be a nonempty list", field="tasks")
    tasks = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise TaskModelError("task entry must be an object", i)
        unknown = set(entry) - _TASK_KEYS
        if unknown:
            raise TaskModelError(f"unknown field(s) {sorted(unknown)}", i)
        for key in ("c", "t"):
            if key not in entry:
                raise TaskModelError("missing required field", i, _FIELD_NAMES[key])
        for key, name in _FIELD_NAMES.items():
            if key in entry and not _is_number(entry[key]):
                raise TaskModelError(f"must be a number, got {entry[key]!r}", i, name)
        frames = entry.get("frames")
        if frames is not None and (
            not isinstance(frames, list) or not all(_is_number(f) for f in frames)
        ):
            raise TaskModelError("must be a list of numbers", i, "frames")
        try:
            tasks.append(
                Task(
                    wcet=entry["c"],
                    period=entry["t"],
                    deadline=entry.get("d"),
                    suspension=entry.get("s", 0.0),
                    critical_path=entry.get("cp"),
                    frames=tuple(frames) if frames is not None else None,
                )
            )
        except TaskModelError as exc:
            raise TaskModelError(exc.detail, i, exc.field) from None
    return TaskSet(tasks, m)


def parse_taskset(text: str) -> TaskSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaskModelError(f"malformed JSON: {exc}") from None
    return taskset_from_dict(doc)


def taskset_to_dict(taskset: TaskSet) -> dict:
    tasks = []
    for t in taskset.tasks:
        entry = {"c": t.wcet, "t": t.period, "d": t.deadline}
        if t.suspension:
            entry["s"] = t.suspension
        if t.critical_path is not None:
            entry["cp"] = t.critical_path
        if t.frames is not None:
            entry["frames"] = list(t.frames)
        tasks.append(entry)
    return {"processors": taskset.processors, "tasks": tasks}


def serialize_taskset(taskset: TaskSet, indent: Optional[int] = 2) -> str:
    return json.dumps(taskset_to_dict(taskset), indent=indent)


# --------------------------------------------------------------------------
# generation
# --------------------------------------------------------------------------

DEADLINE_CLASSES = ("implicit", "constrained", "arbitrary")
MODELS = ("sporadic", "dag", "suspending")


def uunifast(n: int, total: float, rng: np.random.Generator) -> np.ndarray:
    """Bini & Buttazzo's unbiased split of ``total`` into ``n`` utilizations."""
    utils = np.empty(n)
    remaining = total
    for i in range(n - 1):
        nxt = remaining * rng.random() ** (1.0 / (n - 1 - i))
        utils[i] = remaining - nxt
        remaining = nxt
    utils[n - 1] = remaining
    return utils


def generate_taskset(
    n: int,
    total_util: float,
    period_range=(10.0, 1000.0),
    deadline_class: str = "implicit",
    seed: int = 0,
    processors: int = 1,
    model: str = "sporadic",
    max_tries: int = 10_000,
) -> TaskSet:
    """Random task set with utilizations summing to ``total_util``.

    Utilizations come from UUniFast (re-drawn until every task has
    ``U_i <= 1``), periods are log-uniform over ``period_range``.
    Constrained deadlines are uniform in ``[C_i, T_i]``, arbitrary ones in
    ``[C_i, 4 T_i]``. The result is RM-ordered for implicit deadlines and
    DM-ordered otherwise.

    ``model="dag"`` adds a critical path uniform in ``[0, C_i]``;
    ``model="suspending"`` adds a suspension uniform in ``[0, T_i - C_i]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < total_util <= n:
        raise ValueError(f"total_util must lie in (0, n={n}], got {total_util}")
    lo, hi = period_range
    if not 0 < lo < hi:
        raise ValueError(f"period range must satisfy 0 < lo < hi, got {period_range}")
    if deadline_class not in DEADLINE_CLASSES:
        raise ValueError(f"unknown deadline class {deadline_class!r}")
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        utils = uunifast(n, total_util, rng)
        if np.all(utils <= 1.0) and np.all(utils > 0.0):
            break
    else:
        raise ValueError(f"could not draw {n} utilizations <= 1 summing to {total_util}")
    periods = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    wcets = utils * periods

    tasks = []
    for c, p in zip(wcets, periods):
        c, p = float(c), float(p)
        if deadline_class == "implicit":
            d = p
        elif deadline_class == "constrained":
            d = float(rng.uniform(c, p))
        else:
            d = float(rng.uniform(c, 4.0 * p))
        cp = None
        s = 0.0
        if model == "dag":
            cp = float(rng.uniform(0.0, c))
        elif model == "suspending":
            s = float(rng.uniform(0.0, (p - c) * (1.0 - 1e-9)))
        tasks.append(Task(c, p, max(d, c), s, cp))

    ts = TaskSet(tasks, processors)
    return ts.sorted_rm() if deadline_class == "implicit" else ts.sorted_dm()


def rescale(taskset: TaskSet, wcets: Sequence[float]) -> TaskSet:
    """Copy of ``taskset`` with new WCETs (other parameters unchanged)."""
    out = []
    for t, c in zip(taskset.tasks, wcets):
        out.append(Task(c, t.period, t.deadline, t.suspension, t.critical_path, None))
    return TaskSet(out, taskset.processors)
