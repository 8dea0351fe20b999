"""Sporadic DAG tasks and their static quantities.

A task is a vertex-weighted DAG together with a relative deadline D and a
minimum inter-release separation T. All parameters are positive integers.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple


class CycleError(ValueError):
    """Raised when a precedence relation contains a directed cycle."""

    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("cycle: " + " -> ".join(self.cycle))


@dataclass(frozen=True)
class Vertex:
    id: str
    wcet: int


@dataclass(frozen=True)
class DagTask:
    id: str
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Tuple[str, str], ...]
    deadline: int
    period: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @property
    def wcet(self) -> Dict[str, int]:
        return {v.id: v.wcet for v in self.vertices}

    def predecessors(self) -> Dict[str, List[str]]:
        preds: Dict[str, List[str]] = {v.id: [] for v in self.vertices}
        for u, v in self.edges:
            preds[v].append(u)
        return preds


@dataclass(frozen=True)
class TaskSystem:
    tasks: Tuple[DagTask, ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)

    def task(self, task_id: str) -> DagTask:
        for tsk in self.tasks:
            if tsk.id == task_id:
                return tsk
        raise KeyError(task_id)


def _is_pos_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 1


def find_cycle(nodes: Sequence[str], edges: Sequence[Tuple[str, str]]):
    """Return one directed cycle as a closed vertex list, or None."""
    succ: Dict[str, List[str]] = {v: [] for v in nodes}
    for u, v in edges:
        if u in succ and v in succ:
            succ[u].append(v)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in nodes}
    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        path = [root]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
                path.pop()
            elif color[nxt] == GREY:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(sorted(succ[nxt]))))
                path.append(nxt)
    return None


def validate_task(task: DagTask) -> List[str]:
    where = f"task {task.id!r}"
    out = []
    if not task.vertices:
        out.append(f"{where}: empty vertex set")
    if not _is_pos_int(task.deadline):
        out.append(f"{where}: deadline must be a positive integer, got {task.deadline!r}")
    if not _is_pos_int(task.period):
        out.append(f"{where}: period must be a positive integer, got {task.period!r}")
    seen = set()
    for v in task.vertices:
        if v.id in seen:
            out.append(f"{where}: duplicate vertex id {v.id!r}")
        seen.add(v.id)
        if not _is_pos_int(v.wcet):
            out.append(f"{where}, vertex {v.id!r}: wcet must be a positive integer, got {v.wcet!r}")
    dangling = False
    for u, v in task.edges:
        for end in (u, v):
            if end not in seen:
                out.append(f"{where}: edge ({u!r}, {v!r}) references unknown vertex {end!r}")
                dangling = True
    if not dangling:
        cycle = find_cycle([v.id for v in task.vertices], task.edges)
        if cycle is not None:
            out.append(f"{where}: cycle {' -> '.join(cycle)}")
    return out


def validate_task_system(sys: TaskSystem) -> List[str]:
    """List every invariant violation of ``sys``; empty iff well formed."""
    out = []
    if len(sys.tasks) == 0:
        out.append("task system has no tasks")
    ids = set()
    for tsk in sys.tasks:
        if tsk.id in ids:
            out.append(f"duplicate task id {tsk.id!r}")
        ids.add(tsk.id)
        out.extend(validate_task(tsk))
    return out


def topological_order(task: DagTask) -> List[str]:
    """Kahn's algorithm; among ready vertices the smallest id goes first."""
    indeg = {v.id: 0 for v in task.vertices}
    succ: Dict[str, List[str]] = {v.id: [] for v in task.vertices}
    for u, v in task.edges:
        succ[u].append(v)
        indeg[v] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != len(indeg):
        raise CycleError(find_cycle(list(indeg), task.edges) or [])
    return order


def start_offsets(task: DagTask) -> Dict[str, int]:
    """Earliest start of each vertex within its dag-job on unboundedly many
    unit-speed processors: 0 for sources, otherwise the latest finish among
    the predecessors."""
    wcet = task.wcet
    preds = task.predecessors()
    s: Dict[str, int] = {}
    for v in topological_order(task):
        s[v] = max((s[u] + wcet[u] for u in preds[v]), default=0)
    return s


def longest_chain_length(task: DagTask) -> int:
    """len(G): the largest WCET sum along any directed path."""
    wcet = task.wcet
    return max(s + wcet[v] for v, s in start_offsets(task).items())


def volume(task: DagTask) -> int:
    return sum(v.wcet for v in task.vertices)


def trivial_feasibility(sys: TaskSystem) -> Dict[str, bool]:
    """Per task, whether len(G) <= D. A False entry means the task misses a
    deadline on any number of unit-speed processors."""
    return {tsk.id: longest_chain_length(tsk) <= tsk.deadline for tsk in sys.tasks}


def make_task(task_id: str, wcets: Dict[str, int], edges=(), deadline: int = 1,
              period: int = 1) -> DagTask:
    """Shorthand constructor.

    >>> make_task("t", {"u": 1, "v": 2}, [("u", "v")], deadline=4, period=3).vertices
    (Vertex(id='u', wcet=1), Vertex(id='v', wcet=2))
    """
    return DagTask(task_id, tuple(Vertex(k, w) for k, w in wcets.items()),
                   tuple(edges), deadline, period)
