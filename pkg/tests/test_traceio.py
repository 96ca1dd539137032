from __future__ import annotations

import json
import math

import pytest

from glidinghump.families import coordinate_family, nonlinear_gal_family
from glidinghump.glide import build_schedule, run_condensation, verify_certificate
from glidinghump.spaces import CoordinatePoint, Hump, PeriodicPoint, ScalarPoint
from glidinghump.traceio import (
    GROWTH_HEADER,
    certificate_to_jsonable,
    dump_json,
    growth_table,
    lebesgue_table,
    point_from_jsonable,
    point_to_jsonable,
    schedule_from_jsonable,
    schedule_to_jsonable,
    trace_from_jsonable,
    trace_to_jsonable,
)


def test_point_round_trip_coordinate():
    x = CoordinatePoint({3: -0.1, 10**40: 2.5, 7: 1e-300})
    doc = point_to_jsonable(x)
    assert doc["type"] == "coordinate"
    # indices stay exact integers through JSON
    text = json.dumps(doc)
    back = point_from_jsonable(json.loads(text))
    assert back == x
    assert back.get(10**40) == 2.5


def test_point_round_trip_periodic():
    f = PeriodicPoint(
        [
            Hump("tent", 1.5, center=0.25, width=0.5),
            Hump("dirichlet_sign", -2.0, center=1.0, width=0.01, order=4),
            Hump("constant", 0.75),
        ]
    )
    back = point_from_jsonable(json.loads(json.dumps(point_to_jsonable(f))))
    assert back == f


def test_point_round_trip_scalar():
    s = ScalarPoint(-3.25)
    back = point_from_jsonable(json.loads(json.dumps(point_to_jsonable(s))))
    assert back.value == -3.25


def test_point_unknown_type_rejected():
    with pytest.raises(ValueError):
        point_from_jsonable({"type": "mystery"})


def test_schedule_round_trip():
    fam = coordinate_family(0.5)
    s = build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 7)
    back = schedule_from_jsonable(json.loads(json.dumps(schedule_to_jsonable(s))))
    assert back == s


def test_trace_round_trip_reproduces_certificate():
    fam = nonlinear_gal_family(0.5)
    trace, cert = run_condensation(fam, 9, 0.5, 10**60, 4)
    schedule = build_schedule(
        0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 9
    )
    doc = json.loads(dump_json(trace_to_jsonable(trace, schedule)))
    assert doc["trace_version"] == 1
    trace2, schedule2, fam2 = trace_from_jsonable(doc)
    cert2 = verify_certificate(fam2, schedule2, trace2)
    assert certificate_to_jsonable(cert2) == certificate_to_jsonable(cert)


def test_trace_version_guard():
    fam = coordinate_family(0.5)
    trace, _ = run_condensation(fam, 2, 0.5, 10**60, 0)
    schedule = build_schedule(
        0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 2
    )
    doc = trace_to_jsonable(trace, schedule)
    doc["trace_version"] = 99
    with pytest.raises(ValueError):
        trace_from_jsonable(doc)


def test_dump_json_stable():
    a = dump_json({"b": 1.5, "a": [1, 2]})
    b = dump_json({"a": [1, 2], "b": 1.5})
    assert a == b
    assert a.endswith("\n")
    with pytest.raises(ValueError):
        dump_json({"x": math.inf})


def test_growth_table_shape():
    fam = coordinate_family(0.5)
    trace, cert = run_condensation(fam, 4, 0.5, 10**60, 0)
    rows = growth_table(trace, cert)
    assert len(rows) == 4
    assert len(GROWTH_HEADER) == len(rows[0]) == 10
    ks = [r[0] for r in rows]
    assert ks == [1, 2, 3, 4]
    targets = [r[8] for r in rows]
    assert targets == ks
    assert all(r[9] is True for r in rows)


def test_lebesgue_table_reference_column():
    rows = lebesgue_table([0, 1, 10], [1.0, 1.43, 2.2])
    assert rows[0][2] == ""
    assert rows[1][2] == 0.0
    assert rows[2][2] == pytest.approx((4.0 / math.pi**2) * math.log(10.0), rel=1e-15)
