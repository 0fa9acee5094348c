"""Requests, the analysis pipeline and JSON reports.

Rationals are written as "p/q" strings and integers as JSON integers, so a
report carries the exact values.  Field order is fixed and every list is
sorted, which makes two runs of the same request byte-identical apart from
the timing block.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .arrows import (
    Arrow,
    CriticalCertificate,
    TieBreaker,
    certificate_violation,
    min_cone_dim_bound,
    search_critical_arrows,
)
from .cones import (
    Cone,
    ConeError,
    Fan,
    convex_moderate_check,
    dual_cone,
    is_crepant,
    is_moderate,
    subdivision_violation,
)
from .deltafan import (
    DEFAULT_CELL_BUDGET,
    BudgetExceeded,
    complement_window,
    delta_fan,
    general_point,
    theta_and_diameter,
    xi_fingerprint,
    xi_grid_oracle,
)
from .level import ray_sufficient_test
from .lattice import is_primitive
from .monoid import classify_divisors, hilbert_basis, minimal_s_sigma

COMMANDS = ("dual", "hilbert", "divisors", "ray-test", "arrows", "delta", "moderate", "crepant", "report")
NEEDS_W = ("ray-test", "arrows")
NEEDS_FAN = ("moderate", "crepant")


class RequestError(ValueError):
    pass


@dataclass
class Command:
    name: str
    w: tuple | None = None


@dataclass
class AnalysisRequest:
    rank: int
    rays: list
    commands: list = field(default_factory=lambda: [Command("report")])
    fan: dict | None = None
    height_bound: int | None = None
    norm_bound: Fraction | None = None
    cell_budget: int = DEFAULT_CELL_BUDGET
    grid_l: int | None = None
    svg_path: str | None = None

    @property
    def cone(self) -> Cone:
        return Cone.from_rays(self.rays, self.rank)

    def fan_object(self) -> Fan:
        rays = [tuple(r) for r in self.fan["rays"]]
        return Fan.from_cones([Cone.from_rays([rays[i] for i in c], self.rank) for c in self.fan["cones"]], self.cone)


# ---------------------------------------------------------------------------
# parsing


def _no_floats(text: str):
    raise RequestError(f"non-integer number {text}; write rationals as \"p/q\" strings")


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise RequestError(f"{where}: expected an integer, got {json.dumps(value)}")
    return value


def _vector(value: Any, rank: int, where: str) -> tuple:
    if not isinstance(value, list):
        raise RequestError(f"{where}: expected a list of integers")
    v = tuple(_int(x, f"{where}[{i}]") for i, x in enumerate(value))
    if len(v) != rank:
        raise RequestError(f"{where}: length {len(v)} does not match rank {rank}")
    return v


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise RequestError(f"{where}: bad rational {value!r}") from None
    return Fraction(_int(value, where))


def parse_request(text: str) -> AnalysisRequest:
    try:
        doc = json.loads(text, parse_float=_no_floats)
    except json.JSONDecodeError as exc:
        raise RequestError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise RequestError("top level: expected an object")
    if "rank" not in doc or "rays" not in doc:
        raise RequestError("top level: 'rank' and 'rays' are required")
    rank = _int(doc["rank"], "rank")
    if rank < 1:
        raise RequestError("rank: must be at least 1")
    if not isinstance(doc["rays"], list) or not doc["rays"]:
        raise RequestError("rays: expected a nonempty list")
    rays = [_vector(r, rank, f"rays[{i}]") for i, r in enumerate(doc["rays"])]
    for i, r in enumerate(rays):
        if not any(r):
            raise RequestError(f"rays[{i}]: zero ray")
    req = AnalysisRequest(rank, rays)
    try:
        sigma = req.cone
    except ConeError as exc:
        raise RequestError(f"rays: {exc}") from None
    if "commands" in doc:
        cmds = doc["commands"]
        if not isinstance(cmds, list) or not cmds:
            raise RequestError("commands: expected a nonempty list")
        req.commands = []
        for i, c in enumerate(cmds):
            where = f"commands[{i}]"
            if isinstance(c, str):
                c = {"name": c}
            if not isinstance(c, dict) or c.get("name") not in COMMANDS:
                raise RequestError(f"{where}: unknown command {json.dumps(c)}")
            w = None
            if c["name"] in NEEDS_W:
                if "w" not in c:
                    raise RequestError(f"{where}: command {c['name']} needs 'w'")
                w = _vector(c["w"], rank, f"{where}.w")
                if not is_primitive(w) or not sigma.contains(w):
                    raise RequestError(f"{where}.w: must be a primitive vector of the cone")
            req.commands.append(Command(c["name"], w))
    if "fan" in doc:
        f = doc["fan"]
        if not isinstance(f, dict) or not isinstance(f.get("rays"), list) or not isinstance(f.get("cones"), list):
            raise RequestError("fan: expected {'rank', 'rays', 'cones'}")
        if _int(f.get("rank", rank), "fan.rank") != rank:
            raise RequestError("fan.rank: does not match the cone")
        frays = [_vector(r, rank, f"fan.rays[{i}]") for i, r in enumerate(f["rays"])]
        cones = []
        for i, c in enumerate(f["cones"]):
            if not isinstance(c, list) or not c:
                raise RequestError(f"fan.cones[{i}]: expected a nonempty list of ray indices")
            idx = [_int(x, f"fan.cones[{i}]") for x in c]
            if any(not 0 <= x < len(frays) for x in idx):
                raise RequestError(f"fan.cones[{i}]: ray index out of range")
            cones.append(idx)
        req.fan = {"rays": frays, "cones": cones}
        try:
            req.fan_object()
        except ConeError as exc:
            raise RequestError(f"fan: {exc}") from None
    elif any(c.name in NEEDS_FAN for c in req.commands):
        raise RequestError("fan: required by the moderate and crepant commands")
    opts = doc.get("options", {})
    if not isinstance(opts, dict):
        raise RequestError("options: expected an object")
    for key, value in opts.items():
        where = f"options.{key}"
        if key == "height_bound":
            req.height_bound = _int(value, where)
        elif key == "norm_bound":
            req.norm_bound = _rational(value, where)
        elif key == "cell_budget":
            req.cell_budget = _int(value, where)
        elif key == "grid_l":
            req.grid_l = _int(value, where)
            if req.grid_l < 1:
                raise RequestError(f"{where}: must be positive")
        elif key == "svg_path":
            if not isinstance(value, str):
                raise RequestError(f"{where}: expected a string")
            req.svg_path = value
        else:
            raise RequestError(f"{where}: unknown option")
    return req


def request_document(req: AnalysisRequest) -> dict:
    """Canonical JSON form of a request (parse_request inverts it)."""
    doc: dict = {"rank": req.rank, "rays": [list(r) for r in req.rays]}
    doc["commands"] = [{"name": c.name, "w": list(c.w)} if c.w is not None else {"name": c.name} for c in req.commands]
    if req.fan is not None:
        doc["fan"] = {"rank": req.rank, "rays": [list(r) for r in req.fan["rays"]], "cones": [list(c) for c in req.fan["cones"]]}
    opts: dict = {}
    if req.height_bound is not None:
        opts["height_bound"] = req.height_bound
    if req.norm_bound is not None:
        opts["norm_bound"] = encode(req.norm_bound)
    if req.cell_budget != DEFAULT_CELL_BUDGET:
        opts["cell_budget"] = req.cell_budget
    if req.grid_l is not None:
        opts["grid_l"] = req.grid_l
    if req.svg_path is not None:
        opts["svg_path"] = req.svg_path
    if opts:
        doc["options"] = opts
    return doc


# ---------------------------------------------------------------------------
# serialization


def encode(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {k: encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_vector(v: list) -> tuple:
    return tuple(Fraction(x) if isinstance(x, str) else x for x in v)


def _cone_doc(c: Cone) -> dict:
    return {"rays": c.rays, "facets": c.facets}


def _fan_doc(f: Fan) -> dict:
    rays = list(f.rays)
    return {"rays": rays, "cones": [[rays.index(r) for r in c.rays] for c in f.cones]}


def certificate_doc(cert: CriticalCertificate) -> dict:
    a, tb = cert.arrow, cert.tie_breaker
    return {
        "tail": a.tail,
        "head": a.head,
        "vector": a.vector,
        "level": cert.level_c,
        "tie_breaker": {"weight": tb.weight, "vector": tb.vector, "chamber_witness": tb.chamber_witness},
        "no_lower_point": [[lvl, status] for lvl, status in cert.no_lower_point_proof],
        "b_values": [[v, val] for v, val in cert.unique_min_proof],
    }


def certificate_from_doc(doc: dict, sigma: Cone) -> CriticalCertificate:
    tb = doc["tie_breaker"]
    tie = TieBreaker(
        tuple(tb["weight"]), decode_vector(tb["vector"]), decode_vector(tb["chamber_witness"]), sigma
    )
    level = Fraction(doc["level"])
    arrow = Arrow.make(decode_vector(doc["head"]), decode_vector(doc["tail"]), level)
    proof = tuple((Fraction(lvl), status) for lvl, status in doc["no_lower_point"])
    umin = tuple((decode_vector(v), Fraction(val)) for v, val in doc["b_values"])
    return CriticalCertificate(arrow, tie, level, proof, umin)


def reverify_report(doc: dict) -> list[str]:
    """Re-check every arrow certificate stored in a report document."""
    sigma = Cone.from_rays([tuple(r) for r in doc["input"]["rays"]], doc["input"]["rank"])
    problems = []
    for entry in doc.get("arrows", []):
        for cert_doc in entry["certificates"]:
            why = certificate_violation(certificate_from_doc(cert_doc, sigma))
            if why is not None:
                problems.append(f"{entry['w']}: {why}")
    return problems


# ---------------------------------------------------------------------------
# pipeline


def run_report(req: AnalysisRequest) -> dict:
    """Run every requested analysis and return the report document."""
    start = time.perf_counter()
    sigma = req.cone
    names = {c.name for c in req.commands}
    everything = "report" in names
    ws = sorted({c.w for c in req.commands if c.w is not None})
    test_ws = sorted({c.w for c in req.commands if c.name == "ray-test" and c.w is not None})
    arrow_ws = sorted({c.w for c in req.commands if c.name == "arrows" and c.w is not None})
    flags: dict = {}
    timing: dict = {}
    out: dict = {"input": {"rank": req.rank, "rays": [list(r) for r in req.rays], "commands": sorted(names | {f"{c.name} {','.join(map(str, c.w))}" for c in req.commands if c.w})}}

    def tick(name: str, t0: float) -> None:
        timing[name] = int((time.perf_counter() - t0) * 1000)

    full = sigma.is_full
    if everything or "dual" in names:
        out["dual_cone"] = _cone_doc(dual_cone(sigma)) if full else None

    hb_b = hilbert_basis(sigma)
    if everything or names & {"hilbert", "divisors"}:
        t0 = time.perf_counter()
        out["hilbert_basis"] = {"B": hb_b.elements, "A": hilbert_basis(dual_cone(sigma)).elements if full else None}
        tick("hilbert", t0)

    theta = None
    delta = None
    if full and (everything or "delta" in names or arrow_ws):
        t0 = time.perf_counter()
        try:
            theta = theta_and_diameter(dual_cone(sigma), req.cell_budget)
        except BudgetExceeded as exc:
            flags["theta"] = f"skipped: {exc}"
        tick("theta", t0)

    if theta is not None and (everything or "delta" in names):
        t0 = time.perf_counter()
        try:
            delta = delta_fan(sigma, req.cell_budget, theta)
            out["delta"] = {"status": "ok", "diameter_sq": theta.diameter_sq, **_fan_doc(delta)}
            if req.grid_l:
                out["delta"]["grid_check"] = _grid_check(delta, theta, req.grid_l)
        except BudgetExceeded as exc:
            out["delta"] = {"status": "skipped", "reason": str(exc)}
        tick("delta", t0)
    elif everything or "delta" in names:
        out["delta"] = {"status": "skipped", "reason": flags.get("theta", "cone is not full-dimensional")}

    arrow_bounds: dict = {}
    if arrow_ws:
        t0 = time.perf_counter()
        out["arrows"] = []
        for w in arrow_ws:
            if theta is None:
                out["arrows"].append({"w": w, "status": "skipped", "certificates": []})
                continue
            certs = search_critical_arrows(sigma, w, theta.m_le_d, req.norm_bound)
            bound = min_cone_dim_bound(w, certs, sigma)
            arrow_bounds[w] = bound
            out["arrows"].append({"w": w, "status": "ok", "dim_bound": bound, "certificates": [certificate_doc(c) for c in certs]})
        tick("arrows", t0)

    tests: dict = {}
    if test_ws:
        out["ray_tests"] = []
        for w in test_ws:
            res = ray_sufficient_test(sigma, w)
            tests[w] = res
            out["ray_tests"].append({"w": w, "holds": res.holds, "witness": res.witness, "verdict": "certified" if res.holds else "inconclusive"})

    if full and (everything or names & {"divisors", "ray-test", "arrows"}):
        t0 = time.perf_counter()
        s_min = minimal_s_sigma(sigma, req.height_bound)
        flags["s_sigma_certified"] = s_min.certified
        out["s_sigma"] = {"minimal": s_min.elements, "certified": s_min.certified, "height_bound": s_min.height_bound}
        rays = set(ws) | set(s_min.elements)
        if everything or "divisors" in names:
            rays |= set(hb_b.elements)
        if delta is not None:
            rays |= set(delta.rays)
        records = classify_divisors(sigma, sorted(rays), hb_b, s_min, delta)
        docs = []
        for r in records:
            bound = arrow_bounds.get(r.ray_primitive)
            in_delta = r.in_delta
            if in_delta is None and (r.sufficient_condition or bound == 1):
                in_delta = True
            docs.append(
                {
                    "ray": r.ray_primitive,
                    "is_ray_of_sigma": r.is_ray_of_sigma,
                    "in_hilbert_basis_B": r.in_hilbert_basis_B,
                    "bgs_essential": r.bgs_essential,
                    "essential": "unknown" if r.essential is None else r.essential,
                    "sufficient_condition": r.sufficient_condition,
                    "witness": r.witness,
                    "arrow_dim_bound": bound,
                    "in_delta": in_delta,
                }
            )
        out["divisors"] = docs
        tick("divisors", t0)

    if req.fan is not None and names & {"moderate", "crepant"}:
        fan = req.fan_object()
        why = subdivision_violation(fan, sigma)
        verdict: dict = {"valid_subdivision": why is None, "reason": why}
        if why is None:
            if "moderate" in names:
                verdict["moderate"] = is_moderate(fan, sigma)
                verdict["convex_moderate"] = convex_moderate_check(fan, sigma, hb_b.elements)
                verdict["rays_in_hilbert_basis"] = all(r in hb_b for r in fan.rays)
            if "crepant" in names:
                verdict["crepant"] = is_crepant(fan, sigma)
        out["fan_check"] = verdict

    if req.svg_path and delta is not None:
        from .svg import render_svg

        render_svg(delta, req.svg_path)
        out["svg"] = req.svg_path

    out["flags"] = flags
    tick("total", start)
    out["timing_ms"] = timing
    return encode(out)


def _grid_check(delta: Fan, theta, l: int) -> bool:
    """Compare fingerprints with the grid oracle at every chamber of delta."""
    window = complement_window(theta)
    for c in delta.nondegenerate():
        w = general_point(c, theta)
        fp = xi_fingerprint(w, theta)
        grid = xi_grid_oracle(w, l, window, theta)
        for a in grid_points(window, l):
            i = theta.floor_cell(a)
            if i is not None and (i in fp.covered_cells) != (a in grid):
                return False
    return True


def grid_points(window, l: int):
    from .lattice import box_points, normalize

    lo, hi = window
    for p in box_points([Fraction(x) * l for x in lo], [Fraction(x) * l for x in hi]):
        yield normalize(tuple(Fraction(x, l) for x in p))


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"
