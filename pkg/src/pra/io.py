"""JSON instance and solution files.

Instance document::

    {"horizon": 5,
     "rooms": [{"id": "r1", "capacity": 2}],
     "patients": [{"id": "p1", "sex": "F", "arrival": 1, "discharge": 3,
                   "age": 40, "single_request": false, "registration": 1}],
     "preassigned": [{"patient": "p1", "room": "r1"}]}

Solution documents store the room of every patient in every period of
its stay (``assignment[patient][period]``), the recomputed objective
values and, for rolling runs, the per-period trajectory.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any, Mapping

from jsonschema import Draft202012Validator

from pra.errors import InstanceError, InstanceFileError
from pra.model import Assignment, Instance, Patient, Room, check_assignment, evaluate_objectives

_ID = {"type": "string", "pattern": "^[A-Za-z0-9_.]+$"}
_PERIOD = {"type": "integer", "minimum": 1}

INSTANCE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["horizon", "rooms", "patients"],
    "additionalProperties": False,
    "properties": {
        "horizon": _PERIOD,
        "rooms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "capacity"],
                "additionalProperties": False,
                "properties": {"id": _ID, "capacity": {"type": "integer", "minimum": 1}},
            },
        },
        "patients": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "sex", "arrival", "discharge"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "sex": {"enum": ["F", "M"]},
                    "arrival": _PERIOD,
                    "discharge": _PERIOD,
                    "age": {"type": ["integer", "null"], "minimum": 0},
                    "single_request": {"type": "boolean"},
                    "registration": _PERIOD,
                },
            },
        },
        "preassigned": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["patient", "room"],
                "additionalProperties": False,
                "properties": {"patient": _ID, "room": _ID},
            },
        },
        "meta": {"type": "object"},
    },
}

_VALIDATOR = Draft202012Validator(INSTANCE_SCHEMA)


def _pointer(parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def instance_from_dict(doc: Any) -> Instance:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise InstanceFileError(err.message, _pointer(err.absolute_path))
    horizon = doc["horizon"]
    seen: dict[str, int] = {}
    for i, r in enumerate(doc["rooms"]):
        if r["id"] in seen:
            raise InstanceFileError(f"duplicate room id {r['id']!r}", f"/rooms/{i}/id")
        seen[r["id"]] = i
    rooms = [Room(r["id"], r["capacity"]) for r in doc["rooms"]]
    pseen: dict[str, int] = {}
    patients = []
    for i, p in enumerate(doc["patients"]):
        where = f"/patients/{i}"
        if p["id"] in pseen:
            raise InstanceFileError(f"duplicate patient id {p['id']!r}", where + "/id")
        pseen[p["id"]] = i
        for key in ("arrival", "discharge", "registration"):
            if key in p and p[key] > horizon:
                raise InstanceFileError(f"period {p[key]} beyond horizon {horizon}", f"{where}/{key}")
        if p["arrival"] > p["discharge"]:
            raise InstanceFileError("arrival after discharge", where + "/discharge")
        if "registration" in p and p["registration"] > p["arrival"]:
            raise InstanceFileError("registration after arrival", where + "/registration")
        patients.append(Patient(p["id"], p["sex"], p["arrival"], p["discharge"], p.get("age"),
                                p.get("single_request", False), p.get("registration")))
    pre = []
    fixed: set[str] = set()
    for i, item in enumerate(doc.get("preassigned", [])):
        where = f"/preassigned/{i}"
        if item["patient"] not in pseen:
            raise InstanceFileError(f"unknown patient {item['patient']!r}", where + "/patient")
        if item["room"] not in seen:
            raise InstanceFileError(f"unknown room {item['room']!r}", where + "/room")
        if item["patient"] in fixed:
            raise InstanceFileError(f"patient {item['patient']!r} preassigned twice", where + "/patient")
        fixed.add(item["patient"])
        pre.append((item["patient"], item["room"]))
    try:
        return Instance(horizon, rooms, patients, frozenset(pre))
    except InstanceError as exc:
        raise InstanceFileError(str(exc)) from None


def parse_instance(text: str) -> Instance:
    return instance_from_dict(_load(text))


def instance_to_dict(instance: Instance, meta: Mapping | None = None) -> dict:
    patients = []
    for p in instance.patients:
        item: dict[str, Any] = {"id": p.id, "sex": p.sex, "arrival": p.arrival, "discharge": p.discharge}
        if p.age is not None:
            item["age"] = p.age
        item["single_request"] = p.single_request
        if p.registration is not None:
            item["registration"] = p.registration
        patients.append(item)
    doc: dict[str, Any] = {
        "horizon": instance.horizon,
        "rooms": [{"id": r.id, "capacity": r.capacity} for r in instance.rooms],
        "patients": patients,
        "preassigned": [{"patient": pid, "room": rid} for pid, rid in sorted(instance.preassigned)],
    }
    if meta:
        doc["meta"] = dict(meta)
    return doc


def write_instance(instance: Instance, meta: Mapping | None = None) -> str:
    return json.dumps(instance_to_dict(instance, meta), indent=1) + "\n"


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- solutions -----------------------------------------------------------

def solution_to_dict(instance: Instance, assignment: Mapping, scorer, *, status: str = "optimal",
                     variant: str | None = None, optima=(), objective_names=(), trajectory=None,
                     extra: Mapping | None = None) -> dict:
    rooms: dict[str, dict[str, str]] = {}
    for p in instance.patients:
        rooms[p.id] = {str(t): assignment[p.id, t] for t in p.periods if (p.id, t) in assignment}
    doc: dict[str, Any] = {
        "status": status,
        "scorer": scorer.spec(),
        "variant": variant,
        "assignment": rooms,
        "objectives": None,
        "optima": list(optima),
        "objective_names": list(objective_names),
    }
    complete = all((p.id, t) in assignment for p in instance.patients for t in p.periods)
    if complete:
        doc["objectives"] = evaluate_objectives(assignment, instance, scorer).as_dict()
    if trajectory is not None:
        doc["trajectory"] = [dict(r) for r in trajectory]
    if extra:
        doc.update(extra)
    return doc


def write_solution(instance: Instance, assignment: Mapping, scorer, **kwargs) -> str:
    return json.dumps(solution_to_dict(instance, assignment, scorer, **kwargs), indent=1) + "\n"


def parse_solution(text: str) -> tuple[Assignment, dict]:
    doc = _load(text)
    if not isinstance(doc, dict) or not isinstance(doc.get("assignment"), dict):
        raise InstanceFileError("solution needs an 'assignment' object", "/assignment")
    out = {}
    for pid, per in doc["assignment"].items():
        if not isinstance(per, dict):
            raise InstanceFileError("expected an object period -> room", _pointer(["assignment", pid]))
        for t, rid in per.items():
            try:
                out[pid, int(t)] = rid
            except ValueError:
                raise InstanceFileError(f"bad period {t!r}", _pointer(["assignment", pid, t])) from None
    return Assignment(out), doc


def validate_solution(text: str, instance: Instance, scorer) -> list[str]:
    """Problems found when re-checking a solution file; empty when it is consistent."""
    assignment, doc = parse_solution(text)
    problems = [str(v) for v in check_assignment(assignment, instance)]
    if problems:
        return problems
    stored = doc.get("objectives")
    if stored is not None:
        recomputed = evaluate_objectives(assignment, instance, scorer).as_dict()
        for key, value in recomputed.items():
            if stored.get(key) != value:
                problems.append(f"objective {key}: stored {stored.get(key)}, recomputed {value}")
    return problems
