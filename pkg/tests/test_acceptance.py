"""Exit criteria. Every comparison is exact (ints and Fractions).

Run ``pytest tests/test_acceptance.py -v`` to get one PASS/FAIL line per
criterion in the terminal summary.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from acceptance_log import criterion
from dagedf.cli import main
from dagedf import formats
from dagedf.generators import (dense_pattern, random_sporadic, random_task,
                               random_task_system, synchronous_sequence)
from dagedf.schedtests import (INFEASIBLE, SCHEDULABLE_UNIT_SPEED,
                               SCHEDULABLE_WITH_SPEEDUP, analyze,
                               pseudopoly_test, sufficient_test)
from dagedf.simulator import (OVERLOAD_INTERVAL, WitnessInconsistency,
                              edf_simulate, extract_witness, interval_work)
from dagedf.taskmodel import TaskSystem, make_task
from dagedf.workfunction import (LIMIT, approx_work, exact_work, lambda_hat,
                                 threshold, work_lower_bound,
                                 work_upper_bound)
from oracles import brute_lambda, unit_step_work
from simhelpers import random_collection

EPSILONS = (Fraction(1), Fraction(1, 2), Fraction(1, 4))


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(20240601)
    return [random_task(rng, f"t{i}", max_vertices=8, max_wcet=10,
                        max_deadline=50, max_period=50) for i in range(200)]


def test_1_work_bounds(corpus):
    with criterion(1, "work lower/upper bound sandwich") as info:
        start = time.perf_counter()
        checks = violations = 0
        for tsk in corpus:
            for t in range(1, 5 * (tsk.period + tsk.deadline) + 1):
                w = exact_work(tsk, t)
                checks += 1
                if not work_lower_bound(tsk, t) <= w <= work_upper_bound(tsk, t):
                    violations += 1
        elapsed = time.perf_counter() - start
        assert violations == 0
        assert elapsed < 10
        info["detail"] = f"{checks} checks, 0 violations, {elapsed:.2f} s"


def test_2_approximation_sandwich(corpus):
    with criterion(2, "approximation within factor 1+eps") as info:
        checks = violations = 0
        for tsk in corpus:
            for eps in EPSILONS:
                for t in range(0, 2 * math.floor(threshold(tsk, eps)) + 1):
                    w, a = exact_work(tsk, t), approx_work(tsk, t, eps)
                    checks += 1
                    if not Fraction(w) / (1 + eps) <= a <= w:
                        violations += 1
        assert violations == 0
        info["detail"] = f"{checks} checks, 0 violations"


def test_3_dense_pattern_oracle(corpus):
    with criterion(3, "dense pattern + interval work == exact work") as info:
        checks = violations = 0
        for tsk in corpus:
            for t in range(1, 3 * (tsk.period + tsk.deadline) + 1):
                coll, (a, b) = dense_pattern(tsk, t)
                checks += 1
                if interval_work(coll, a, b) != exact_work(tsk, t):
                    violations += 1
        assert violations == 0
        info["detail"] = f"{checks} windows, 0 mismatches"


def test_4_lambda_breakpoints_vs_enumeration():
    with criterion(4, "lambda_hat by breakpoints == exhaustive enumeration") as info:
        rng = random.Random(4)
        checks = 0
        for _ in range(100):
            sys = random_task_system(rng, rng.randint(1, 4), max_vertices=8, max_wcet=10,
                                     max_deadline=50, max_period=50)
            for eps in (Fraction(1), Fraction(1, 2)):
                got = lambda_hat(sys, eps)
                want = brute_lambda(sys, eps, approx=approx_work)
                assert got == want, (sys, eps, got, want)
                checks += 1
        info["detail"] = f"{checks} (system, eps) pairs equal"


def test_5_overload_witness():
    with criterion(5, "every EDF miss yields a strict overload interval") as info:
        rng = random.Random(5)
        runs = misses = errors = 0
        for _ in range(100):
            coll = random_collection(rng)
            for m in (1, 2, 3):
                for speed in sorted({Fraction(1), Fraction(3, 2), 2 - Fraction(1, m)}):
                    runs += 1
                    try:
                        w = extract_witness(coll, m, speed)
                    except WitnessInconsistency:
                        errors += 1
                        continue
                    if edf_simulate(coll, m, speed).misses:
                        misses += 1
                        assert w.case == OVERLOAD_INTERVAL
                        assert w.work_in_interval > (speed * m - m + 1) * (w.interval_end - w.t_star)
                        assert w.threshold == (speed * m - m + 1) * (w.interval_end - w.t_star)
        assert errors == 0
        assert misses > 0
        info["detail"] = f"{runs} runs, {misses} misses, all certified, 0 inconsistencies"


def battery(sys: TaskSystem, seed: int):
    """Synchronous sequence, 10 dense windows per task, 50 random sporadic runs."""
    n = len(sys)
    horizon = 4 * n * max(t.deadline + t.period for t in sys.tasks)
    yield synchronous_sequence(sys, horizon)
    for tsk in sys.tasks:
        top = 3 * (tsk.deadline + tsk.period)
        for t in sorted({max(1, top * i // 10) for i in range(1, 11)}
                        | {tsk.deadline, tsk.deadline + tsk.period}):
            yield dense_pattern(tsk, t)[0]
    for k in range(50):
        yield random_sporadic(sys, horizon, seed * 1000 + k)


def certified_systems(kind, m_values, want, seed, **kw):
    rng = random.Random(seed)
    found = []
    while len(found) < want:
        sys = random_task_system(rng, rng.randint(1, 3), **kw)
        for m in m_values:
            if kind == SCHEDULABLE_WITH_SPEEDUP:
                ok = pseudopoly_test(sys, m, Fraction(1, 2)).kind == kind
            else:
                ok = sufficient_test(sys, m).kind == kind
            # keep the tightest m for which the system is certified
            if ok:
                found.append((sys, m))
                break
    return found


def test_6_pseudopoly_certificate_end_to_end():
    with criterion(6, "SchedulableWithSpeedup => no EDF miss at 2-1/m+eps") as info:
        eps = Fraction(1, 2)
        systems = certified_systems(SCHEDULABLE_WITH_SPEEDUP, (1, 2, 3), 8, seed=6,
                                    max_vertices=5, max_wcet=6, max_deadline=20,
                                    max_period=20)
        sims = 0
        for idx, (sys, m) in enumerate(systems):
            speed = 2 - Fraction(1, m) + eps
            for coll in battery(sys, idx):
                sims += 1
                assert edf_simulate(coll, m, speed).ok, (sys, m)
        info["detail"] = f"{len(systems)} certified systems, {sims} simulations, 0 misses"


def test_7_sufficient_certificate_end_to_end():
    with criterion(7, "SchedulableUnitSpeed => no EDF miss at speed 1") as info:
        systems = certified_systems(SCHEDULABLE_UNIT_SPEED, (1, 2, 3), 6, seed=7,
                                    max_vertices=5, max_wcet=3, max_deadline=40,
                                    max_period=30)
        sims = 0
        for idx, (sys, m) in enumerate(systems):
            for coll in battery(sys, 100 + idx):
                sims += 1
                assert edf_simulate(coll, m, 1).ok, (sys, m)
        info["detail"] = f"{len(systems)} certified systems, {sims} simulations, 0 misses"


def test_8_pinned_regressions():
    with criterion(8, "pinned regression values") as info:
        tsk = make_task("t1", {"u": 1, "v": 2, "w": 3}, [("u", "v")], deadline=4, period=3)
        sys = TaskSystem((tsk,))
        # oracles first, then the library has to agree with them
        assert unit_step_work(tsk, 5) == 8
        assert brute_lambda(sys, 1) == (2, LIMIT)
        assert exact_work(tsk, 5) == 8
        assert lambda_hat(sys, 1) == (2, LIMIT)
        v1 = pseudopoly_test(sys, 1, 1)
        assert v1.kind == INFEASIBLE
        t = v1.witness_t
        assert unit_step_work(tsk, t) > t
        v2 = pseudopoly_test(sys, 2, 1)
        assert v2.kind == SCHEDULABLE_WITH_SPEEDUP and v2.speedup == Fraction(5, 2)
        info["detail"] = (f"work(5)=8, lambda_hat=2 at limit, m=1 Infeasible (t={t}), "
                          f"m=2 speedup 5/2")


def test_9_analyze_performance(tmp_path, capsys):
    with criterion(9, "analyze n=5, T,D<=100, |V|<=10, eps=1/10 under 1 s") as info:
        rng = random.Random(9)
        worst = 0.0
        systems = [random_task_system(rng, 5, max_vertices=10, max_wcet=10,
                                      max_deadline=100, max_period=100) for _ in range(5)]
        # adversarial: T = 1 keeps the most dag-jobs straddling each window
        systems.append(TaskSystem(tuple(
            type(t)(t.id, t.vertices, t.edges, 100, 1) for t in systems[0].tasks)))
        for sys in systems:
            start = time.perf_counter()
            analyze(sys, 3, Fraction(1, 10))
            worst = max(worst, time.perf_counter() - start)
        path = tmp_path / "sys.json"
        path.write_text(formats.dump_json(formats.system_to_dict(systems[0])))
        start = time.perf_counter()
        main(["analyze", "--system", str(path), "-m", "3", "--epsilon", "1/10"])
        cli = time.perf_counter() - start
        capsys.readouterr()
        assert worst < 1 and cli < 1
        info["detail"] = f"worst library call {worst * 1000:.0f} ms, CLI {cli * 1000:.0f} ms"
