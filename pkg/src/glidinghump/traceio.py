"""Stable on-disk forms: trace and certificate JSON, delimited tables.

Numbers round-trip exactly: floats are rendered with ``repr`` (shortest
string that parses back to the same double) both in JSON and in CSV cells,
and indices stay arbitrary-precision integers.  Key order is sorted and
line endings are fixed, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from typing import Iterable, Sequence

from .families import OperatorFamily, family_from_description
from .glide import (
    BetaSchedule,
    Certificate,
    STEP_FLAG_NAMES,
    TraceStep,
    WitnessTrace,
)
from .spaces import CoordinatePoint, Hump, PeriodicPoint, Point, ScalarPoint

TRACE_VERSION = 1

GROWTH_HEADER = (
    "k",
    "m",
    "n_k",
    "beta_k",
    "gamma_k",
    "op_norm",
    "image_norm_at_xk",
    "image_norm_at_xK",
    "final_bound_target_k",
    "pass",
)
SCHEDULE_HEADER = ("k", "m", "beta_tilde", "beta", "gamma")
LEBESGUE_HEADER = ("n", "L_n", "log_reference")


def point_to_jsonable(point: Point) -> dict:
    if isinstance(point, CoordinatePoint):
        entries = [[i, v] for i, v in sorted(point.coords.items())]
        return {"type": "coordinate", "entries": entries}
    if isinstance(point, PeriodicPoint):
        humps = [
            {
                "kind": h.kind,
                "amplitude": h.amplitude,
                "center": h.center,
                "width": h.width,
                "order": h.order,
            }
            for h in sorted(point.humps, key=Hump.merge_key)
        ]
        return {"type": "periodic", "humps": humps}
    if isinstance(point, ScalarPoint):
        return {"type": "scalar", "value": point.value}
    raise TypeError(f"cannot serialize point of type {type(point).__name__}")


def point_from_jsonable(obj: dict) -> Point:
    kind = obj.get("type")
    if kind == "coordinate":
        return CoordinatePoint((int(i), float(v)) for i, v in obj["entries"])
    if kind == "periodic":
        return PeriodicPoint(
            Hump(
                kind=h["kind"],
                amplitude=float(h["amplitude"]),
                center=float(h["center"]),
                width=float(h["width"]),
                order=int(h["order"]),
            )
            for h in obj["humps"]
        )
    if kind == "scalar":
        return ScalarPoint(float(obj["value"]))
    raise ValueError(f"unknown point type {kind!r}")


def schedule_to_jsonable(schedule: BetaSchedule) -> dict:
    return {
        "horizon": schedule.horizon,
        "p": schedule.p,
        "cap": schedule.cap,
        "rows": list(schedule.rows),
        "increment_constants": list(schedule.increment_constants),
        "subadditivity_constants": list(schedule.subadditivity_constants),
        "beta_tilde": list(schedule.beta_tilde),
        "beta": list(schedule.beta),
        "gamma": list(schedule.gamma),
    }


def schedule_from_jsonable(obj: dict) -> BetaSchedule:
    return BetaSchedule(
        horizon=int(obj["horizon"]),
        p=float(obj["p"]),
        cap=float(obj["cap"]),
        rows=tuple(int(m) for m in obj["rows"]),
        increment_constants=tuple(float(v) for v in obj["increment_constants"]),
        subadditivity_constants=tuple(float(v) for v in obj["subadditivity_constants"]),
        beta_tilde=tuple(float(v) for v in obj["beta_tilde"]),
        beta=tuple(float(v) for v in obj["beta"]),
        gamma=tuple(float(v) for v in obj["gamma"]),
    )


def trace_to_jsonable(trace: WitnessTrace, schedule: BetaSchedule) -> dict:
    return {
        "trace_version": TRACE_VERSION,
        "family": trace.family_description,
        "config": {
            "horizon": trace.horizon,
            "cap": trace.cap,
            "index_max": trace.index_max,
            "seed": trace.seed,
        },
        "schedule": schedule_to_jsonable(schedule),
        "steps": [
            {
                "k": s.k,
                "row": s.row,
                "index": s.index,
                "beta": s.beta,
                "gamma": s.gamma,
                "op_norm": s.op_norm,
                "image_norm": s.image_norm,
                "hump": point_to_jsonable(s.increment),
            }
            for s in trace.steps
        ],
        "final_point": point_to_jsonable(trace.final_point),
    }


def trace_from_jsonable(obj: dict) -> tuple[WitnessTrace, BetaSchedule, OperatorFamily]:
    version = obj.get("trace_version")
    if version != TRACE_VERSION:
        raise ValueError(f"unsupported trace version {version!r}, expected {TRACE_VERSION}")
    family = family_from_description(obj["family"])
    schedule = schedule_from_jsonable(obj["schedule"])
    config = obj["config"]
    steps = tuple(
        TraceStep(
            k=int(s["k"]),
            row=int(s["row"]),
            index=int(s["index"]),
            beta=float(s["beta"]),
            gamma=float(s["gamma"]),
            op_norm=float(s["op_norm"]),
            image_norm=float(s["image_norm"]),
            increment=point_from_jsonable(s["hump"]),
        )
        for s in obj["steps"]
    )
    trace = WitnessTrace(
        steps=steps,
        final_point=point_from_jsonable(obj["final_point"]),
        seed=int(config["seed"]),
        horizon=int(config["horizon"]),
        cap=float(config["cap"]),
        index_max=int(config["index_max"]),
        family_description=dict(obj["family"]),
    )
    return trace, schedule, family


def certificate_to_jsonable(certificate: Certificate) -> dict:
    return {
        "accepted": certificate.accepted,
        "schedule_ok": certificate.schedule_ok,
        "steps": [
            {
                "k": c.k,
                "row": c.row,
                "index": c.index,
                "flags": {name: getattr(c, name) for name in STEP_FLAG_NAMES},
                "passed": c.passed,
                "values": {
                    "op_norm": c.op_norm,
                    "image_at_point": c.image_at_point,
                    "image_at_final": c.image_at_final,
                    "drift_at_final": c.drift_at_final,
                    "final_bound_value": c.final_bound_value,
                },
                "margins": {
                    "budget": c.budget_margin,
                    "image": c.image_margin,
                    "norm": c.norm_margin,
                    "tail": c.tail_margin,
                    "final": c.final_margin,
                },
            }
            for c in certificate.steps
        ],
    }


def dump_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json_file(path: str, obj: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_json(obj))


def read_json_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv_file(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def growth_table(trace: WitnessTrace, certificate: Certificate) -> list[tuple]:
    """One row per step: placement, budgets, norms, and the verdict."""
    rows = []
    for step, check in zip(trace.steps, certificate.steps):
        rows.append(
            (
                step.k,
                step.row,
                step.index,
                step.beta,
                step.gamma,
                step.op_norm,
                step.image_norm,
                check.image_at_final,
                step.k,
                check.passed,
            )
        )
    return rows


def schedule_table(schedule: BetaSchedule) -> list[tuple]:
    return [
        (k, schedule.rows[k - 1], schedule.beta_tilde[k - 1], schedule.beta[k - 1], schedule.gamma[k - 1])
        for k in range(1, schedule.horizon + 1)
    ]


def lebesgue_table(orders: Sequence[int], values: Sequence[float]) -> list[tuple]:
    """Constants next to the (4/pi^2) log n reference curve (blank at n = 0)."""
    rows = []
    for n, value in zip(orders, values):
        reference = (4.0 / math.pi**2) * math.log(n) if n >= 1 else ""
        rows.append((n, value, reference))
    return rows
