"""EDF schedulability tests for sporadic DAG task systems on m processors."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Union

from dagedf.taskmodel import (TaskSystem, longest_chain_length,
                              trivial_feasibility, validate_task_system,
                              volume)
from dagedf.workfunction import (LIMIT, as_epsilon, first_exceeding,
                                 lambda_hat, system_work_profile)

SCHEDULABLE_WITH_SPEEDUP = "SchedulableWithSpeedup"
INFEASIBLE = "Infeasible"
SCHEDULABLE_UNIT_SPEED = "SchedulableUnitSpeed"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class TestVerdict:
    kind: str
    speedup: Optional[Fraction] = None
    witness_t: Union[int, str, None] = None
    detail: str = ""
    # ids of tasks whose critical path exceeds the deadline
    chain_violations: tuple = ()

    __test__ = False  # not a pytest class


def _check_m(m: int):
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"processor count must be a positive integer, got {m!r}")


def pseudopoly_test(sys: TaskSystem, m: int, eps) -> TestVerdict:
    """Approximate-demand test with speedup 2 - 1/m + eps.

    Either certifies EDF on m processors of that speed, or proves that no
    schedule meets all deadlines on m unit-speed processors. The witness of
    an infeasibility verdict is the smallest integer window length t whose
    approximate demand exceeds m * t; the exact demand is at least as large.
    """
    return _pseudopoly(sys, m, eps)[0]


def _pseudopoly(sys: TaskSystem, m: int, eps):
    _check_m(m)
    eps = as_epsilon(eps)
    bad = tuple(k for k, ok in trivial_feasibility(sys).items() if not ok)
    if bad:
        return TestVerdict(INFEASIBLE, chain_violations=bad,
                           detail="critical path longer than deadline: " + ", ".join(bad)), None, None
    profile = system_work_profile(sys, eps)
    lam, arg = lambda_hat(sys, eps, profile)
    if lam > m:
        t = first_exceeding(profile, m)
        witness = LIMIT if t is None else t
        return TestVerdict(INFEASIBLE, witness_t=witness,
                           detail=f"lambda_hat = {lam} > {m}; demand in a window of "
                                  f"length {witness} exceeds m * length"), lam, arg
    speedup = 2 - Fraction(1, m) + eps
    return TestVerdict(SCHEDULABLE_WITH_SPEEDUP, speedup=speedup,
                       detail=f"lambda_hat = {lam} <= {m} (sup at t = {arg})"), lam, arg


def sufficient_test(sys: TaskSystem, m: int) -> TestVerdict:
    """Polynomial-time sufficient condition for EDF on m unit-speed processors.

    With tasks in nondecreasing deadline order, every task k needs
    len(G_k) <= D_k / 3 and

        sum_{T_i <= D_k} vol_i / T_i + sum_{T_i > D_k} vol_i / D_k <= (m + 1/2) / 3.

    A failed condition gives ``Unknown``, never an infeasibility claim.
    """
    _check_m(m)
    tasks = sorted(sys.tasks, key=lambda tsk: (tsk.deadline, tsk.id))
    vols = {tsk.id: volume(tsk) for tsk in tasks}
    cap = (m + Fraction(1, 2)) / 3
    for k in tasks:
        D = k.deadline
        length = longest_chain_length(k)
        if 3 * length > D:
            return TestVerdict(UNKNOWN, detail=f"task {k.id}: len {length} > D/3 = {Fraction(D, 3)}")
        load = sum((Fraction(vols[i.id], i.period if i.period <= D else D) for i in tasks),
                   Fraction(0))
        if load > cap:
            return TestVerdict(UNKNOWN, detail=f"task {k.id}: load {load} > (m + 1/2)/3 = {cap}")
    return TestVerdict(SCHEDULABLE_UNIT_SPEED, speedup=Fraction(1),
                       detail="both conditions hold for every task")


@dataclass
class AnalysisReport:
    violations: List[str] = field(default_factory=list)
    lengths: Dict[str, int] = field(default_factory=dict)
    volumes: Dict[str, int] = field(default_factory=dict)
    feasible_chains: Dict[str, bool] = field(default_factory=dict)
    total_density: Optional[Fraction] = None
    lambda_hat: Optional[Fraction] = None
    lambda_argmax: Union[int, str, None] = None
    sufficient: Optional[TestVerdict] = None
    pseudopoly: Optional[TestVerdict] = None

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def strongest(self) -> Optional[str]:
        kinds = {v.kind for v in (self.sufficient, self.pseudopoly) if v is not None}
        for kind in (SCHEDULABLE_UNIT_SPEED, SCHEDULABLE_WITH_SPEEDUP, INFEASIBLE, UNKNOWN):
            if kind in kinds:
                return kind
        return None


def analyze(sys: TaskSystem, m: int, eps) -> AnalysisReport:
    """Run validation and both tests; verdicts are kept side by side."""
    report = AnalysisReport(violations=validate_task_system(sys))
    if not report.valid:
        return report
    eps = as_epsilon(eps)
    report.lengths = {tsk.id: longest_chain_length(tsk) for tsk in sys.tasks}
    report.volumes = {tsk.id: volume(tsk) for tsk in sys.tasks}
    report.feasible_chains = trivial_feasibility(sys)
    report.total_density = sum((Fraction(report.volumes[tsk.id], tsk.period)
                                for tsk in sys.tasks), Fraction(0))
    report.sufficient = sufficient_test(sys, m)
    report.pseudopoly, report.lambda_hat, report.lambda_argmax = _pseudopoly(sys, m, eps)
    return report
