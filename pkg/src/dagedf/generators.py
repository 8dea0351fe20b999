"""Job collections generated by task systems, plus seeded random corpora.

Job ids are ``<task>.<release index>.<vertex>``.
"""

from __future__ import annotations

import random
from typing import List, Optional, Tuple

from dagedf.simulator import JobCollection, JobInstance
from dagedf.taskmodel import (DagTask, TaskSystem, Vertex,
                              longest_chain_length)


def dag_job(task: DagTask, index: int, release: int) -> List[JobInstance]:
    preds = task.predecessors()
    name = f"{task.id}.{index}."
    return [JobInstance(name + v.id, release, release + task.deadline, v.wcet,
                        frozenset(name + u for u in preds[v.id]))
            for v in task.vertices]


def _collect(sys: TaskSystem, releases) -> JobCollection:
    jobs = []
    for tsk in sys.tasks:
        for i, r in enumerate(releases[tsk.id]):
            jobs.extend(dag_job(tsk, i, r))
    return JobCollection(tuple(jobs))


def synchronous_sequence(sys: TaskSystem, horizon: int) -> JobCollection:
    """Releases at 0, T, 2T, ... while the deadline stays within ``horizon``."""
    releases = {}
    for tsk in sys.tasks:
        releases[tsk.id] = range(0, horizon - tsk.deadline + 1, tsk.period) \
            if horizon >= tsk.deadline else []
    return _collect(sys, releases)


def dense_pattern(task: DagTask, t: int) -> Tuple[JobCollection, Tuple[int, int]]:
    """The densest release pattern for a window of length t.

    Releases are t - D - kT for k = 0 .. ceil(t/T) - 1, shifted so the earliest
    one is at 0. Returns the collection together with the shifted window,
    whose right end is the deadline of the latest release.
    """
    if t < 1:
        raise ValueError("window length must be positive")
    D, T = task.deadline, task.period
    k_count = -(-t // T)
    rhos = [t - D - k * T for k in range(k_count)]
    shift = -min(rhos)
    jobs = []
    for i, rho in enumerate(sorted(rhos)):
        jobs.extend(dag_job(task, i, rho + shift))
    return JobCollection(tuple(jobs)), (shift, t + shift)


def random_sporadic(sys: TaskSystem, horizon: int, seed: int,
                    max_jitter: Optional[int] = None) -> JobCollection:
    """Sporadic releases: gaps T + j with j uniform on {0, ..., max_jitter}.

    ``max_jitter`` defaults to T per task; 0 reproduces the synchronous
    sequence.
    """
    rng = random.Random(seed)
    releases = {}
    for tsk in sys.tasks:
        hi = tsk.period if max_jitter is None else max_jitter
        rs = []
        r = 0
        while r + tsk.deadline <= horizon:
            rs.append(r)
            r += tsk.period + rng.randint(0, hi)
        releases[tsk.id] = rs
    return _collect(sys, releases)


def random_dag(rng: random.Random, task_id: str, n_vertices: int, max_wcet: int,
               deadline: int, period: int, edge_prob: float = 0.3) -> DagTask:
    names = [f"v{i}" for i in range(n_vertices)]
    vertices = tuple(Vertex(v, rng.randint(1, max_wcet)) for v in names)
    edges = tuple((names[i], names[j]) for i in range(n_vertices)
                  for j in range(i + 1, n_vertices) if rng.random() < edge_prob)
    return DagTask(task_id, vertices, edges, deadline, period)


def random_task(rng: random.Random, task_id: str = "t", max_vertices: int = 8,
                max_wcet: int = 10, max_deadline: int = 50, max_period: int = 50,
                edge_prob: float = 0.3) -> DagTask:
    """A random task with len(G) <= D; DAGs whose critical path exceeds
    ``max_deadline`` are redrawn."""
    while True:
        n = rng.randint(1, max_vertices)
        proto = random_dag(rng, task_id, n, max_wcet, 1, 1, edge_prob)
        length = longest_chain_length(proto)
        if length <= max_deadline:
            break
    D = rng.randint(length, max_deadline)
    T = rng.randint(1, max_period)
    return DagTask(task_id, proto.vertices, proto.edges, D, T)


def random_task_system(rng: random.Random, n_tasks: int, **kw) -> TaskSystem:
    return TaskSystem(tuple(random_task(rng, f"t{i}", **kw) for i in range(n_tasks)))
