"""Work functions of sporadic DAG tasks.

``exact_work(task, t)`` is the largest amount of work the greedy
unbounded-processor schedule performs inside a window of length t on jobs
whose deadline falls in the window. It is attained by releasing the task
as densely as possible with one deadline aligned to the right end of the
window. ``approx_work`` replaces it by the straight line (t - D) / T * vol
beyond an eps-dependent threshold; this keeps the number of linear pieces
bounded and loses at most a factor 1 + eps.

Everything is exact: ints on the integer time domain, Fractions elsewhere.
"""

from __future__ import annotations

import math
from itertools import chain
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from dagedf.taskmodel import (DagTask, TaskSystem, longest_chain_length,
                              start_offsets, volume)

__all__ = [
    "PiecewiseProfile", "Run", "as_epsilon", "start_offsets", "exact_work",
    "work_lower_bound", "work_upper_bound", "threshold", "approx_work",
    "approx_work_profile", "system_work_profile", "lambda_hat", "LIMIT",
    "first_exceeding",
]

Number = Union[int, Fraction]

LIMIT = "limit"


def as_epsilon(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    return eps


class _Shape:
    """Per-task data that every evaluation of the work function needs."""

    __slots__ = ("D", "T", "vol", "len", "windows", "tails")

    def __init__(self, task: DagTask):
        s = start_offsets(task)
        wcet = task.wcet
        self.D = task.deadline
        self.T = task.period
        self.vol = volume(task)
        self.len = longest_chain_length(task)
        # vertex execution windows relative to the dag-job release
        self.windows = sorted((s[v], s[v] + wcet[v]) for v in s)
        self.tails = self._tail_sums() if self.len <= self.D else None

    def _tail_sums(self):
        # tails[x] = sum over j >= 0 of clipped(x - jT) for -len < x < 0; a
        # dag-job released at x < 0 keeps its whole window left of its
        # deadline, so only clipping at 0 matters
        tails = {}
        for x in range(1 - self.len, 0):
            below = x - self.T
            tails[x] = self.clipped(x, self.D + x) + (tails[below] if below > -self.len else 0)
        return tails

    def clipped(self, rho: int, t: int) -> int:
        total = 0
        for a, b in self.windows:
            lo = max(rho + a, 0)
            hi = min(rho + b, t)
            if hi > lo:
                total += hi - lo
        return total

    def work(self, t: int) -> int:
        if t <= 0:
            return 0
        D, T = self.D, self.T
        if self.tails is not None:
            k_full = (t - D) // T + 1 if t >= D else 0
            x = t - D - k_full * T
            return k_full * self.vol + self.tails.get(x, 0)
        return self.generic_work(t)

    def generic_work(self, t: int) -> int:
        D, T = self.D, self.T
        k_count = -(-t // T)  # dag-jobs k = 0 .. k_count-1 have deadline t - kT in (0, t]
        # dag-job k is wholly inside [0, t] iff rho_k >= 0 and rho_k + len <= t
        k_lo = max(0, -(-(self.len - D) // T))
        k_hi = min(k_count - 1, (t - D) // T) if t >= D else -1
        total = 0
        if k_lo <= k_hi:
            total = (k_hi - k_lo + 1) * self.vol
            partial = chain(range(0, k_lo), range(k_hi + 1, k_count))
        else:
            partial = range(k_count)
        for k in partial:
            rho = t - D - k * T
            if rho + self.len <= 0:
                break
            total += self.clipped(rho, t)
        return total

    def threshold(self, eps: Fraction) -> Fraction:
        return self.T / eps + (1 + 1 / eps) * self.D


def exact_work(task: DagTask, t: int) -> int:
    """Work in [0, t] of the densest release pattern, deadlines in (0, t].

    >>> from dagedf.taskmodel import make_task
    >>> tsk = make_task("t", {"u": 1, "v": 2, "w": 3}, [("u", "v")], deadline=4, period=3)
    >>> exact_work(tsk, 5)
    8
    """
    return _Shape(task).work(t)


def work_lower_bound(task: DagTask, t: int) -> int:
    return max((t + task.period - task.deadline) // task.period, 0) * volume(task)


def work_upper_bound(task: DagTask, t: int) -> int:
    return -(-t // task.period) * volume(task)


def threshold(task: DagTask, eps) -> Fraction:
    """Largest window length for which the approximation stays exact."""
    eps = as_epsilon(eps)
    return task.period / eps + (1 + 1 / eps) * task.deadline


def approx_work(task: DagTask, t: int, eps) -> Number:
    eps = as_epsilon(eps)
    if t <= threshold(task, eps):
        return exact_work(task, t)
    return Fraction((t - task.deadline) * volume(task), task.period)


@dataclass(frozen=True)
class Run:
    """A maximal linear stretch on the integers t_start .. t_end."""
    t_start: int
    t_end: int
    value_at_start: Number
    slope: Number

    def at(self, t: int) -> Number:
        return self.value_at_start + self.slope * (t - self.t_start)


@dataclass(frozen=True)
class PiecewiseProfile:
    """Piecewise linear function on the nonnegative integers.

    The exact work function is nondecreasing; the approximate one may step
    down once, where it switches to the straight-line branch.

    Runs are contiguous (one run's ``t_end`` is the next one's ``t_start``)
    and the last run continues forever with slope ``tail_slope``.
    """
    runs: Tuple[Run, ...]
    tail_slope: Number

    def __call__(self, t: int) -> Number:
        if t < 0:
            raise ValueError("profile is defined for t >= 0 only")
        lo, hi = 0, len(self.runs) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.runs[mid].t_start <= t:
                lo = mid
            else:
                hi = mid - 1
        return self.runs[lo].at(t)

    @property
    def breakpoints(self) -> List[int]:
        return [r.t_start for r in self.runs]

    @property
    def tail_start(self) -> int:
        return self.runs[-1].t_start

    def __len__(self):
        return len(self.runs)

    def __add__(self, other: "PiecewiseProfile") -> "PiecewiseProfile":
        return _sum_profiles([self, other])


def _runs_from_samples(values: List[Number], tail_slope: Number) -> Tuple[Run, ...]:
    """Greedy maximal runs over samples f(0), f(1), ...; the final sample is
    followed by slope ``tail_slope``."""
    n = len(values)
    diffs = [values[i + 1] - values[i] for i in range(n - 1)] + [tail_slope]
    runs = []
    start = 0
    for i in range(1, n):
        if diffs[i] != diffs[start]:
            runs.append(Run(start, i, values[start], diffs[start]))
            start = i
    last = values[start]
    runs.append(Run(start, max(n, start + 1), last, diffs[start]))
    return tuple(runs)


def approx_work_profile(task: DagTask, eps) -> PiecewiseProfile:
    eps = as_epsilon(eps)
    shape = _Shape(task)
    last_exact = math.floor(shape.threshold(eps))
    values: List[Number] = [shape.work(t) for t in range(last_exact + 1)]
    first_lin = last_exact + 1
    values.append(Fraction((first_lin - shape.D) * shape.vol, shape.T))
    tail = Fraction(shape.vol, shape.T)
    return PiecewiseProfile(_runs_from_samples(values, tail), tail)


def _sum_profiles(profiles: List[PiecewiseProfile]) -> PiecewiseProfile:
    points = sorted({b for p in profiles for b in p.breakpoints})
    tail = sum((p.tail_slope for p in profiles), Fraction(0))
    # past the last breakpoint every summand is on its tail run
    last = points[-1]
    values = [sum(p(t) for p in profiles) for t in points]
    slopes = []
    for t in points:
        slopes.append(sum(_slope_at(p, t) for p in profiles))
    runs = []
    for i, t in enumerate(points):
        nxt = points[i + 1] if i + 1 < len(points) else last + 1
        v, s = values[i], slopes[i]
        if runs and runs[-1].slope == s and runs[-1].at(t) == v:
            prev = runs[-1]
            runs[-1] = Run(prev.t_start, nxt, prev.value_at_start, prev.slope)
        else:
            runs.append(Run(t, nxt, v, s))
    return PiecewiseProfile(tuple(runs), tail)


def _slope_at(p: PiecewiseProfile, t: int) -> Number:
    """Slope of the run of ``p`` that covers t (continuing to the right)."""
    lo, hi = 0, len(p.runs) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if p.runs[mid].t_start <= t:
            lo = mid
        else:
            hi = mid - 1
    return p.runs[lo].slope


def system_work_profile(sys: TaskSystem, eps) -> PiecewiseProfile:
    eps = as_epsilon(eps)
    profiles = [approx_work_profile(tsk, eps) for tsk in sys.tasks]
    if len(profiles) == 1:
        return profiles[0]
    return _sum_profiles(profiles)


def _ratio_candidates(profile: PiecewiseProfile):
    # f(t)/t is monotone on a run, so endpoints suffice; max(start, 1) also
    # catches the smallest maximiser when the ratio is constant on the run
    for r in profile.runs:
        yield max(r.t_start, 1)
        yield r.t_end


def lambda_hat(sys: TaskSystem, eps, profile: PiecewiseProfile = None):
    """sup over integers t >= 1 of w(t) / t for the approximate system work.

    Returns ``(value, argmax)`` where argmax is the smallest integer attaining
    the supremum, or ``LIMIT`` when it is only approached as t grows (the
    value is then the sum of vol / T).
    """
    if profile is None:
        profile = system_work_profile(sys, eps)
    best, arg = None, None
    for t in _ratio_candidates(profile):
        q = Fraction(profile(t)) / t
        if best is None or q > best or (q == best and t < arg):
            best, arg = q, t
    # f(t)/t is monotone along the last run, so it tends to its slope
    tail = Fraction(profile.tail_slope)
    if best is None or tail > best:
        return tail, LIMIT
    return best, arg


def first_exceeding(profile: PiecewiseProfile, m) -> Union[int, None]:
    """Smallest integer t >= 1 with profile(t) > m * t, or None."""
    m = Fraction(m)
    for i, r in enumerate(profile.runs):
        lo = max(r.t_start, 1)
        last = i == len(profile.runs) - 1
        hi = None if last else r.t_end - 1
        if hi is not None and hi < lo:
            continue
        # g(t) = value + slope (t - start) - m t is linear in t
        g_lo = r.at(lo) - m * lo
        if g_lo > 0:
            return lo
        rate = Fraction(r.slope) - m
        if rate <= 0:
            continue
        # g(lo + x) = g_lo + rate x > 0  <=>  x > -g_lo / rate
        t = lo + math.floor(-g_lo / rate) + 1
        if hi is None or t <= hi:
            return t
    return None
