import json

import pytest

from torifan.report import (
    RequestError,
    dumps,
    parse_request,
    request_document,
    reverify_report,
    run_report,
)

EXAMPLE = {"rank": 3, "rays": [[1, 0, 0], [0, 1, 0], [1, 2, 4]]}
SQUARE = {"rank": 3, "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]}
A1 = {"rank": 2, "rays": [[1, 0], [1, 2]]}


def req(doc, **extra):
    return parse_request(json.dumps({**doc, **extra}))


def without_timing(report):
    return {k: v for k, v in report.items() if k != "timing_ms"}


def test_valid_requests():
    r = req(EXAMPLE)
    assert r.rank == 3 and r.rays == [(1, 0, 0), (0, 1, 0), (1, 2, 4)]
    assert [c.name for c in r.commands] == ["report"]
    assert req(A1).cone.rays == ((1, 0), (1, 2))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"rank": 2, "rays": [[0, 0]]}', "zero ray"),
        ('{"rank": 2, "rays": [[1, 0.5]]}', "non-integer"),
        ('{"rank": 2, "rays": [[1, true]]}', "rays[0][1]"),
        ('{"rank": 2, "rays": [[1, 0, 0]]}', "does not match rank"),
        ('{"rank": 2, "rays": [[1, 0], [-1, 0]]}', "strongly convex"),
        ('{"rank": 2}', "required"),
        ('{"rank": 2, "rays": [[1, 0]],\n "commands": ["bogus"]}', "unknown command"),
        ('{"rank": 2, "rays": [[1, 0], [1, 2]], "commands": ["arrows"]}', "needs 'w'"),
        ('{"rank": 2, "rays": [[1, 0], [1, 2]], "commands": [{"name": "arrows", "w": [0, 1]}]}', "primitive vector of the cone"),
        ('{"rank": 2, "rays": [[1, 0], [1, 2]], "commands": ["moderate"]}', "fan: required"),
        ('{"rank": 2, "rays": [[1, 0], [1, 2]], "options": {"colour": 1}}', "unknown option"),
        ('{"rank": 2, "rays": [[1, 0], [1, 2]], "options": {"norm_bound": "1/0"}}', "bad rational"),
        ('{"rank": 2,\n  "rays": [[1, 0]', "line 2"),
    ],
)
def test_request_errors(text, fragment):
    with pytest.raises(RequestError) as info:
        parse_request(text)
    assert fragment in str(info.value)


def test_request_round_trip():
    doc = {
        **A1,
        "commands": [{"name": "ray-test", "w": [1, 1]}, {"name": "moderate"}],
        "fan": {"rank": 2, "rays": [[1, 0], [1, 1], [1, 2]], "cones": [[0, 1], [1, 2]]},
        "options": {"norm_bound": "9/2", "grid_l": 3, "cell_budget": 1000},
    }
    r = parse_request(json.dumps(doc))
    again = parse_request(json.dumps(request_document(r)))
    assert request_document(again) == request_document(r)
    assert again.norm_bound == r.norm_bound and again.fan == r.fan


def test_example_report():
    r = req(EXAMPLE, commands=[{"name": "ray-test", "w": [1, 2, 2]}, {"name": "arrows", "w": [1, 2, 2]}])
    out = run_report(r)
    (rec,) = [d for d in out["divisors"] if d["ray"] == [1, 2, 2]]
    assert rec["sufficient_condition"] is False
    assert rec["arrow_dim_bound"] == 1
    assert rec["in_delta"] is True
    assert rec["bgs_essential"] is False
    (arrows,) = out["arrows"]
    assert arrows["dim_bound"] == 1 and len(arrows["certificates"]) == 2
    assert arrows["certificates"][0]["tail"] == [2, 0, "-1/2"]
    assert reverify_report(out) == []


def test_tampered_report_fails_reverification():
    out = run_report(req(EXAMPLE, commands=[{"name": "arrows", "w": [1, 2, 2]}]))
    out["arrows"][0]["certificates"][0]["level"] = "2"
    assert reverify_report(out)


def test_square_divisors():
    out = run_report(req(SQUARE, commands=["divisors"]))
    (rec,) = [d for d in out["divisors"] if d["ray"] == [1, 1, 2]]
    assert rec["essential"] is True and rec["bgs_essential"] is False
    assert out["s_sigma"]["certified"] is True


def test_a1_delta_report(tmp_path):
    svg = tmp_path / "a1.svg"
    out = run_report(req(A1, commands=["delta"], options={"grid_l": 4, "svg_path": str(svg)}))
    assert out["delta"]["status"] == "ok"
    assert out["delta"]["rays"] == [[1, 0], [1, 1], [1, 2]]
    assert out["delta"]["diameter_sq"] == 8
    assert out["delta"]["grid_check"] is True
    assert svg.exists() and out["svg"] == str(svg)


def test_budget_marks_delta_skipped():
    out = run_report(req(EXAMPLE, commands=["delta"], options={"cell_budget": 3}))
    assert out["delta"]["status"] == "skipped"


def test_fan_checks():
    doc = {
        **SQUARE,
        "commands": ["moderate", "crepant"],
        "fan": {"rank": 3, "rays": SQUARE["rays"], "cones": [[0, 1, 3], [0, 2, 3]]},
    }
    out = run_report(parse_request(json.dumps(doc)))
    fc = out["fan_check"]
    assert fc["valid_subdivision"] and fc["moderate"] and fc["crepant"] and fc["rays_in_hilbert_basis"]
    doc["fan"]["cones"] = [[0, 1, 3]]
    out = run_report(parse_request(json.dumps(doc)))
    assert out["fan_check"]["valid_subdivision"] is False


def test_report_is_deterministic_and_float_free():
    r = req(A1)
    a, b = run_report(r), run_report(r)
    assert dumps(without_timing(a)) == dumps(without_timing(b))
    assert all(isinstance(v, int) for v in a["timing_ms"].values())
    assert "." not in json.dumps(without_timing(a)).replace('"', "")
    assert set(a) >= {"input", "dual_cone", "hilbert_basis", "delta", "s_sigma", "divisors", "flags"}
