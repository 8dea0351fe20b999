"""File formats: task systems and job collections as JSON, traces and
profiles as CSV. Rationals are always written as ``num/den`` strings."""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from typing import Any, Iterable

from dagedf.simulator import JobCollection, JobInstance, ScheduleTrace
from dagedf.taskmodel import DagTask, TaskSystem, Vertex
from dagedf.workfunction import PiecewiseProfile


class InputError(ValueError):
    """Malformed input file or flag."""


_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def parse_rational(text: str, what: str = "value") -> Fraction:
    """Parse ``"a/b"`` or an integer; decimals are rejected.

    >>> parse_rational("5/2")
    Fraction(5, 2)
    """
    if not isinstance(text, str) or not _RATIONAL.match(text):
        raise InputError(f"{what}: expected a rational 'num/den', got {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise InputError(f"{what}: zero denominator in {text!r}") from None


def format_rational(x) -> str:
    return str(Fraction(x))


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(obj, key, where, kind):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    val = obj[key]
    if kind is int:
        if not isinstance(val, int) or isinstance(val, bool):
            raise InputError(f"{where}.{key}: expected an integer, got {val!r}")
    elif not isinstance(val, kind):
        raise InputError(f"{where}.{key}: expected {kind.__name__}, got {val!r}")
    return val


def system_from_dict(data: Any, source: str = "<system>") -> TaskSystem:
    tasks = _field(data, "tasks", source, list)
    out = []
    for i, td in enumerate(tasks):
        where = f"{source}: tasks[{i}]"
        vertices = []
        for j, vd in enumerate(_field(td, "vertices", where, list)):
            vw = f"{where}.vertices[{j}]"
            vertices.append(Vertex(str(_field(vd, "id", vw, (str, int))), _field(vd, "wcet", vw, int)))
        edges = []
        for j, e in enumerate(td.get("edges", [])):
            if not isinstance(e, list) or len(e) != 2:
                raise InputError(f"{where}.edges[{j}]: expected a pair [from, to]")
            edges.append((str(e[0]), str(e[1])))
        out.append(DagTask(str(_field(td, "id", where, (str, int))), tuple(vertices), tuple(edges),
                           _field(td, "D", where, int), _field(td, "T", where, int)))
    return TaskSystem(tuple(out))


def system_to_dict(sys: TaskSystem) -> dict:
    return {"tasks": [{"id": t.id, "D": t.deadline, "T": t.period,
                       "vertices": [{"id": v.id, "wcet": v.wcet} for v in t.vertices],
                       "edges": [list(e) for e in t.edges]} for t in sys.tasks]}


def collection_from_dict(data: Any, source: str = "<collection>") -> JobCollection:
    jobs = []
    for i, jd in enumerate(_field(data, "jobs", source, list)):
        where = f"{source}: jobs[{i}]"
        preds = jd.get("predecessors", []) if isinstance(jd, dict) else []
        if not isinstance(preds, list):
            raise InputError(f"{where}.predecessors: expected a list")
        jobs.append(JobInstance(str(_field(jd, "id", where, (str, int))),
                                _field(jd, "release", where, int),
                                _field(jd, "deadline", where, int),
                                _field(jd, "wcet", where, int),
                                frozenset(str(p) for p in preds)))
    return JobCollection(tuple(jobs))


def collection_to_dict(coll: JobCollection) -> dict:
    return {"jobs": [{"id": j.id, "release": j.release, "deadline": j.deadline,
                      "wcet": j.wcet, "predecessors": sorted(j.predecessors)}
                     for j in coll.jobs]}


def load_system(path: str) -> TaskSystem:
    with open(path) as fh:
        return system_from_dict(_load_json(fh.read(), path), path)


def load_collection(path: str) -> JobCollection:
    with open(path) as fh:
        return collection_from_dict(_load_json(fh.read(), path), path)


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def _rows_to_csv(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trace_csv(trace: ScheduleTrace) -> str:
    rows = []
    for s in trace.segments:
        a, b = Fraction(s.start), Fraction(s.end)
        rows.append((s.job, s.processor, a.numerator, a.denominator, b.numerator, b.denominator))
    return _rows_to_csv(("job_id", "processor", "start_num", "start_den", "end_num", "end_den"), rows)


def misses_csv(trace: ScheduleTrace) -> str:
    return _rows_to_csv(("job_id", "deadline", "completion"),
                        ((m.job, m.deadline, m.completion if isinstance(m.completion, str)
                          else format_rational(m.completion)) for m in trace.misses))


def profile_csv(profile: PiecewiseProfile) -> str:
    """One row per run start; the last row starts the tail."""
    rows = []
    for r in profile.runs:
        v = Fraction(r.value_at_start)
        rows.append((r.t_start, v.numerator, v.denominator))
    return _rows_to_csv(("t", "value_num", "value_den"), rows)


def read_profile_csv(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    return [(int(t), Fraction(int(n), int(d))) for t, n, d in rows[1:]]
