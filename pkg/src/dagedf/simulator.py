"""Exact simulation of normal job collections.

Two schedules are provided: preemptive global EDF on m identical processors
of a common rational speed, and the greedy schedule on unboundedly many
unit-speed processors (every job starts as soon as it is released and its
predecessors are done). On top of these, ``interval_work`` measures the
work the greedy schedule performs in a window on jobs due in that window,
and ``extract_witness`` turns an EDF deadline miss into an overload
certificate.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from dagedf.taskmodel import find_cycle

Number = Union[int, Fraction]

EDF_OK = "EDF_OK"
INFEASIBLE_CHAIN = "INFEASIBLE_CHAIN"
OVERLOAD_INTERVAL = "OVERLOAD_INTERVAL"

UNFINISHED = "unfinished"


class WitnessInconsistency(RuntimeError):
    """The overload inequality failed on a witness interval.

    This cannot happen for a normal collection unless the simulation is wrong.
    """


@dataclass(frozen=True)
class JobInstance:
    id: str
    release: int
    deadline: int
    wcet: int
    predecessors: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "predecessors", frozenset(self.predecessors))


@dataclass(frozen=True)
class JobCollection:
    jobs: Tuple[JobInstance, ...]

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))

    def __iter__(self):
        return iter(self.jobs)

    def __len__(self):
        return len(self.jobs)

    def by_id(self) -> Dict[str, JobInstance]:
        return {j.id: j for j in self.jobs}

    def restrict(self, max_deadline: int) -> "JobCollection":
        return JobCollection(tuple(j for j in self.jobs if j.deadline <= max_deadline))


@dataclass(frozen=True)
class Segment:
    job: str
    processor: int
    start: Number
    end: Number
    speed: Number


@dataclass(frozen=True)
class Miss:
    job: str
    deadline: int
    completion: Union[Number, str]


@dataclass
class ScheduleTrace:
    segments: List[Segment] = field(default_factory=list)
    misses: List[Miss] = field(default_factory=list)
    completion: Dict[str, Number] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.misses

    def processed(self, job_id: str) -> Number:
        return sum((s.speed * (s.end - s.start) for s in self.segments if s.job == job_id), 0)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of the overload argument for one collection.

    For ``OVERLOAD_INTERVAL``, ``work_in_interval`` is the work every valid
    schedule has to perform inside [t_star, interval_end] (what the greedy
    schedule still has left at t_star), and ``edf_work`` is what EDF actually
    processed there.
    """
    case: str
    t_star: Optional[Number] = None
    interval_end: Optional[int] = None
    work_in_interval: Optional[Number] = None
    edf_work: Optional[Number] = None
    threshold: Optional[Number] = None
    missed_job: Optional[str] = None

    @property
    def length(self) -> Optional[Number]:
        if self.t_star is None:
            return None
        return self.interval_end - self.t_star


def validate_normal(coll: JobCollection) -> List[str]:
    out = []
    jobs = {}
    for j in coll.jobs:
        if j.id in jobs:
            out.append(f"duplicate job id {j.id!r}")
        jobs[j.id] = j
        if j.release < 0:
            out.append(f"job {j.id!r}: negative release {j.release}")
        if j.wcet < 1:
            out.append(f"job {j.id!r}: wcet must be positive, got {j.wcet}")
        if j.deadline <= j.release:
            out.append(f"job {j.id!r}: deadline {j.deadline} not after release {j.release}")
    edges = []
    for j in coll.jobs:
        for p in sorted(j.predecessors):
            if p not in jobs:
                out.append(f"job {j.id!r}: unknown predecessor {p!r}")
                continue
            edges.append((p, j.id))
            q = jobs[p]
            if (q.release, q.deadline) != (j.release, j.deadline):
                out.append(f"job {j.id!r}: predecessor {p!r} has release/deadline "
                           f"({q.release}, {q.deadline}) != ({j.release}, {j.deadline})")
    cycle = find_cycle(list(jobs), edges)
    if cycle is not None:
        out.append("predecessor cycle " + " -> ".join(cycle))
    return out


def _topo(coll: JobCollection) -> List[JobInstance]:
    jobs = coll.by_id()
    indeg = {j.id: len(j.predecessors) for j in coll.jobs}
    succ: Dict[str, List[str]] = {j.id: [] for j in coll.jobs}
    for j in coll.jobs:
        for p in j.predecessors:
            succ[p].append(j.id)
    ready = sorted(k for k, d in indeg.items() if d == 0)
    out = []
    while ready:
        k = ready.pop()
        out.append(jobs[k])
        for s in succ[k]:
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
    if len(out) != len(jobs):
        raise ValueError("predecessor relation is cyclic")
    return out


def _greedy_times(coll: JobCollection) -> Dict[str, Tuple[int, int]]:
    """(start, finish) of every job in the greedy unbounded schedule."""
    times: Dict[str, Tuple[int, int]] = {}
    for j in _topo(coll):
        start = max([j.release] + [times[p][1] for p in j.predecessors])
        times[j.id] = (start, start + j.wcet)
    return times


def sinfty_schedule(coll: JobCollection) -> ScheduleTrace:
    """Every job on a private unit-speed processor, as early as possible.

    Processor indices follow the order of ``coll.jobs``.
    """
    times = _greedy_times(coll)
    trace = ScheduleTrace()
    for i, j in enumerate(coll.jobs):
        start, end = times[j.id]
        trace.segments.append(Segment(j.id, i, start, end, 1))
        trace.completion[j.id] = end
        if end > j.deadline:
            trace.misses.append(Miss(j.id, j.deadline, end))
    trace.misses.sort(key=lambda m: (m.deadline, m.job))
    return trace


def interval_work(coll: JobCollection, a: int, b: int) -> int:
    """Greedy-schedule work inside [a, b] on jobs with deadline in [a, b]."""
    times = _greedy_times(coll)
    total = 0
    for j in coll.jobs:
        if a <= j.deadline <= b:
            s, e = times[j.id]
            lo, hi = max(s, a), min(e, b)
            if hi > lo:
                total += hi - lo
    return total


def edf_simulate(coll: JobCollection, m: int, speed=1) -> ScheduleTrace:
    """Preemptive global EDF; ties by (deadline, release, id).

    Time is rescaled so that everything stays integral: with speed a/b, one
    internal time unit is 1/a real time units and one internal work unit is
    1/b real work units, which makes the processing rate exactly 1.
    """
    if m < 1:
        raise ValueError("need at least one processor")
    speed = Fraction(speed)
    if speed <= 0:
        raise ValueError("speed must be positive")
    a, b = speed.numerator, speed.denominator

    def real(x: int) -> Number:
        return Fraction(x, a) if a != 1 else x

    jobs = coll.by_id()
    order = _topo(coll)
    succ: Dict[str, List[str]] = {j.id: [] for j in coll.jobs}
    for j in coll.jobs:
        for p in j.predecessors:
            succ[p].append(j.id)
    waiting = {j.id: len(j.predecessors) for j in coll.jobs}
    remaining = {j.id: j.wcet * b for j in coll.jobs}
    key = {j.id: (j.deadline, j.release, j.id) for j in coll.jobs}
    releases = sorted(order, key=lambda j: (j.release, j.id))
    ri = 0
    released = set()
    ready = set()  # released, predecessors complete, unfinished
    on_proc: Dict[str, int] = {}
    open_seg: Dict[str, int] = {}  # job -> internal start of current segment
    trace = ScheduleTrace()
    now = 0
    done = 0
    n = len(jobs)

    def close(jid: str, t: int):
        start = open_seg.pop(jid)
        if t > start:
            trace.segments.append(Segment(jid, on_proc[jid], real(start), real(t), speed))

    while done < n:
        while ri < n and releases[ri].release * a <= now:
            jid = releases[ri].id
            released.add(jid)
            if waiting[jid] == 0:
                ready.add(jid)
            ri += 1
        running = sorted(ready, key=key.__getitem__)[:m]
        run_set = set(running)
        for jid in list(open_seg):
            if jid not in run_set:
                close(jid, now)
                del on_proc[jid]
        busy = {on_proc[j] for j in running if j in on_proc}
        free = (p for p in range(m) if p not in busy)
        for jid in running:
            if jid not in on_proc:
                on_proc[jid] = next(free)
                open_seg[jid] = now
        nxt = releases[ri].release * a if ri < n else None
        if running:
            fin = now + min(remaining[j] for j in running)
            if nxt is None or fin < nxt:
                nxt = fin
        if nxt is None:
            raise RuntimeError("simulation stalled with unfinished jobs")
        dt = nxt - now
        now = nxt
        for jid in running:
            remaining[jid] -= dt
            if remaining[jid] == 0:
                close(jid, now)
                del on_proc[jid]
                ready.discard(jid)
                done += 1
                t = real(now)
                trace.completion[jid] = t
                if t > jobs[jid].deadline:
                    trace.misses.append(Miss(jid, jobs[jid].deadline, t))
                for s in succ[jid]:
                    waiting[s] -= 1
                    if waiting[s] == 0 and s in released:
                        ready.add(s)
    trace.segments.sort(key=lambda s: (s.start, s.processor))
    trace.misses.sort(key=lambda x: (x.deadline, x.completion, x.job))
    return trace


class _Progress:
    """Cumulative processed amount of one job as a function of time."""

    def __init__(self, segs: Sequence[Segment]):
        segs = sorted(segs, key=lambda s: s.start)
        self.starts = [s.start for s in segs]
        self.segs = segs
        acc, self.before = 0, []
        for s in segs:
            self.before.append(acc)
            acc += s.speed * (s.end - s.start)

    def __call__(self, t: Number) -> Number:
        i = bisect.bisect_right(self.starts, t) - 1
        if i < 0:
            return 0
        s = self.segs[i]
        return self.before[i] + s.speed * (min(t, s.end) - s.start)


def _greedy_progress(start: int, end: int, t: Number) -> Number:
    return min(max(t - start, 0), end - start)


def _feasible_part(g0: Number, g1: Number, x: Number, y: Number):
    """Sub-interval of [x, y] where a linear g with g(x)=g0, g(y)=g1 is >= 0."""
    if g0 >= 0 and g1 >= 0:
        return x, y
    if g0 < 0 and g1 < 0:
        return None
    root = x + (y - x) * Fraction(g0) / (g0 - g1)
    return (x, root) if g0 >= 0 else (root, y)


def extract_witness(coll: JobCollection, m: int, speed=1) -> WitnessReport:
    """Classify an EDF run on ``coll`` into the three possible outcomes.

    On a deadline miss that the greedy schedule avoids, the report gives an
    interval [t_star, d] ending at the earliest missed deadline d, where
    t_star is the latest time at which EDF is at least as far as the greedy
    schedule on every job. Every valid unit-speed schedule must then process
    strictly more than (speed*m - m + 1) * (d - t_star) inside the interval.
    """
    speed = Fraction(speed)
    edf = edf_simulate(coll, m, speed)
    if edf.ok:
        return WitnessReport(EDF_OK)
    greedy = sinfty_schedule(coll)
    if not greedy.ok:
        first = greedy.misses[0]
        return WitnessReport(INFEASIBLE_CHAIN, missed_job=first.job,
                             interval_end=first.deadline)
    d = min(x.deadline for x in edf.misses)
    missed = min((x for x in edf.misses if x.deadline == d), key=lambda x: x.job).job
    sub = coll.restrict(d)
    edf = edf_simulate(sub, m, speed)
    times = _greedy_times(sub)
    per_job: Dict[str, List[Segment]] = {j.id: [] for j in sub.jobs}
    for s in edf.segments:
        per_job[s.job].append(s)
    prog = {jid: _Progress(segs) for jid, segs in per_job.items()}

    points = {0, d}
    for s in edf.segments:
        points.update((s.start, s.end))
    for s, e in times.values():
        points.update((s, e))
    points = sorted(p for p in points if 0 <= p <= d)

    def gap(jid: str, t: Number) -> Number:
        s, e = times[jid]
        return prog[jid](t) - _greedy_progress(s, e, t)

    t_star = None
    for x, y in zip(reversed(points[:-1]), reversed(points[1:])):
        lo, hi = x, y
        for j in sub.jobs:
            if j.release >= hi:
                continue
            part = _feasible_part(gap(j.id, x), gap(j.id, y), x, y)
            if part is None:
                lo = None
                break
            lo, hi = max(lo, part[0]), min(hi, part[1])
            if lo > hi:
                lo = None
                break
        if lo is not None:
            t_star = hi
            break
    if t_star is None:
        raise WitnessInconsistency("no time where EDF dominates the greedy schedule")

    edf_work = sum(((min(s.end, d) - max(s.start, t_star)) * s.speed
                    for s in edf.segments if s.end > t_star and s.start < d), Fraction(0))
    required = sum((e - s - _greedy_progress(s, e, t_star) for s, e in times.values()),
                   Fraction(0))
    bound = (speed * m - m + 1) * (d - t_star)
    report = WitnessReport(OVERLOAD_INTERVAL, t_star=t_star, interval_end=d,
                           work_in_interval=required, edf_work=edf_work,
                           threshold=bound, missed_job=missed)
    if not required > bound:
        raise WitnessInconsistency(f"required work {required} <= {bound} on [{t_star}, {d}]")
    if not (edf_work > bound if m > 1 else edf_work >= bound):
        raise WitnessInconsistency(f"EDF work {edf_work} vs bound {bound} on [{t_star}, {d}]")
    return report
