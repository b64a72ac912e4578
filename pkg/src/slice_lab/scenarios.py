"""JSON scenarios: validation, dispatch and reports.

A scenario is ``{"kind": ..., "payload": {...}, "seed": optional int}``.
:func:`run_scenario` returns a report dict; ``report["passed"]`` is true
iff every check passed.
"""
from __future__ import annotations

import json
import math
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .campaign import Ranges, instance_payload, parse_instance, run_campaign
from .circle import ChordInstance, chord_identity_batch, chord_identity_check
from .decomposition import (
    compute_params,
    decompose,
    sample_in_neighborhood,
    verify_decomposition,
    weak_neighborhood,
)
from .diameter import combo_diameter_linf, lp_sum_combo_sup, opposite_slice_combo_sup
from .errors import InvalidInput, SliceLabError
from .model import OMEGA, ConvexCombo, combo_point, slice_membership, sup_norm
from .sphere import WeightedMeasureSpace, fresh_coordinate_witness, l1_disjoint_witness

KINDS = (
    "decompose",
    "diameter",
    "shrinkage",
    "remark",
    "sphere-witness",
    "l1-witness",
    "lemma",
    "campaign",
)


class ScenarioError(InvalidInput):
    """Malformed scenario file or payload."""


_scalar = {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"},
                                          "minItems": 2, "maxItems": 2}]}
_space = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["finite-discrete", "c0", "c-omega"]},
        "field": {"enum": ["real", "complex"]},
        "n": {"type": "integer", "minimum": 1},
    },
}
_coords = {"type": "object", "patternProperties": {"^[0-9]+$": _scalar},
           "additionalProperties": False}
_point = {
    "type": "object",
    "required": ["space", "coords"],
    "properties": {"space": _space, "coords": _coords, "tail": _scalar},
}
_functional = {
    "type": "object",
    "required": ["space", "coords"],
    "properties": {"space": _space, "coords": _coords, "omega": _scalar},
}
_combo = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "required": ["lambda", "slice"],
        "properties": {
            "lambda": {"type": "number", "exclusiveMinimum": 0},
            "slice": {
                "type": "object",
                "required": ["functional", "epsilon"],
                "properties": {
                    "functional": _functional,
                    "epsilon": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    },
}
_pos_int = {"type": "integer", "minimum": 1}
_count = {"type": "integer", "minimum": 0}

SCHEMAS = {
    "decompose": {
        "type": "object",
        "required": ["combo", "witnesses"],
        "properties": {
            "combo": _combo,
            "witnesses": {"type": "array", "items": _point},
            "y": _point,
            "samples": _count,
        },
    },
    "diameter": {"type": "object", "required": ["combo"], "properties": {"combo": _combo}},
    "shrinkage": {
        "type": "object",
        "required": ["p", "epsilon"],
        "properties": {
            "p": {"type": "number", "exclusiveMinimum": 1},
            "lambda": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "epsilon": {"oneOf": [{"type": "number", "exclusiveMinimum": 0},
                                  {"type": "array", "items": {"type": "number"},
                                   "minItems": 2, "maxItems": 2}]},
            "samples": _pos_int,
        },
    },
    "remark": {
        "type": "object",
        "required": ["epsilon"],
        "properties": {
            "n": {"type": "integer", "minimum": 2},
            "epsilon": {"type": "number", "exclusiveMinimum": 0},
            "direction": {"type": "array", "items": {"type": "number"}},
            "samples": _pos_int,
        },
    },
    "sphere-witness": {"type": "object", "required": ["combo"], "properties": {"combo": _combo}},
    "l1-witness": {
        "type": "object",
        "required": ["weights", "g", "epsilon", "lambda"],
        "properties": {
            "weights": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "g": {"type": "array", "items": {"type": "array", "items": {"type": "number"}},
                  "minItems": 1},
            "epsilon": {"type": "array", "items": {"type": "number"}},
            "lambda": {"type": "array", "items": {"type": "number"}},
        },
    },
    "lemma": {
        "type": "object",
        "properties": {
            "alpha": {"type": "number"},
            "beta": {"type": "number"},
            "mu": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
            "samples": _pos_int,
        },
    },
    "campaign": {
        "type": "object",
        "properties": {
            "instances": _count,
            "ys_per_instance": _count,
            "ranges": {"type": "object"},
            "tamper": {"type": "boolean"},
        },
    },
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "payload": {"type": "object"},
        "seed": {"type": ["integer", "null"]},
    },
}


def _validate(instance, schema, where):
    try:
        jsonschema.validate(instance, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{where}: invalid field {path}: {exc.message}") from None


def load_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def validate_scenario(scenario):
    _validate(scenario, SCENARIO_SCHEMA, "scenario")
    payload = scenario.get("payload", {})
    _validate(payload, SCHEMAS[scenario["kind"]], f"{scenario['kind']} payload")
    return scenario


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {("omega" if k == OMEGA else str(k)): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return _json_safe(value.item())
    return value


class _Checks:
    def __init__(self):
        self.items = []

    def add(self, name, passed, margin=None, **extra):
        entry = {"name": name, "passed": bool(passed)}
        if margin is not None:
            entry["margin"] = float(margin)
        entry.update(extra)
        self.items.append(entry)


def _coord_label(t):
    return "omega" if t == OMEGA else t


def _params_json(params):
    cases = {}
    for t, case in params.cases.items():
        name = type(case).__name__
        entry = {"case": name}
        if name == "InteriorCase":
            entry["i0"] = case.i0
        elif name == "CirclePlan":
            entry.update(q=case.q, groups=[list(g) for g in case.groups],
                         weights=list(case.weights), thetas=list(case.thetas),
                         shifts=list(case.shifts))
        cases[str(_coord_label(t))] = entry
    return {
        "slack": params.slack,
        "eta": params.eta,
        "support": [_coord_label(t) for t in params.support],
        "max_inv_weight": params.max_inv_weight,
        "interior": [_coord_label(t) for t in params.interior],
        "delta_interior": params.delta_interior,
        "circle": [_coord_label(t) for t in params.circle],
        "min_sq_gap": params.min_sq_gap,
        "rho": params.rho,
        "delta_circle": params.delta_circle,
        "delta": params.delta,
        "omega_cutoff": params.omega_cutoff,
        "cases": cases,
    }


def _run_decompose(payload, seed, checks):
    combo, witnesses, y = parse_instance(payload)
    params = compute_params(combo, witnesses)
    x = combo_point(combo, witnesses)
    U = weak_neighborhood(x, params)
    if y is not None:
        ys = [y]
    elif payload.get("samples"):
        ys = [sample_in_neighborhood(U, [seed or 0, j]) for j in range(payload["samples"])]
    elif seed is not None:
        ys = [sample_in_neighborhood(U, seed)]
    else:
        ys = [x]
    reports = []
    for j, yj in enumerate(ys):
        rep = verify_decomposition(combo, witnesses, yj, decompose(combo, witnesses, params, yj))
        checks.add(f"y{j}.reconstruction", rep.reconstruction_residual <= 1e-9,
                   1e-9 - rep.reconstruction_residual)
        checks.add(f"y{j}.ball", not rep.flagged("ball"), min(rep.ball_margins) + 1e-12)
        checks.add(f"y{j}.slice", not rep.flagged("slice"),
                   min(rep.slice_margins) - rep.required_slice_margin)
        checks.add(f"y{j}.drift", not rep.flagged("drift"), rep.eta - max(rep.drifts))
        out = rep.to_json()
        out["y"] = yj.to_json()
        reports.append(out)
    return {"params": _params_json(params), "x": x.to_json(), "reports": reports}


def _combo_from(payload):
    return ConvexCombo.from_json(payload["combo"])


def _run_diameter(payload, seed, checks):
    res = combo_diameter_linf(_combo_from(payload))
    checks.add("range", 0.0 <= res.value <= 2.0, min(res.value, 2.0 - res.value))
    return res.to_json()


def _run_shrinkage(payload, seed, checks):
    lam = payload.get("lambda", 0.5)
    res = lp_sum_combo_sup(payload["p"], lam, payload["epsilon"],
                           samples=payload.get("samples", 4000), seed=seed or 0)
    if lam < 1.0:
        checks.add("strict_shrinkage", res.beta_estimate > 0, res.beta_estimate)
    return res.to_json()


def _run_remark(payload, seed, checks):
    n = payload.get("n", 2)
    direction = payload.get("direction") or [1.0] + [0.0] * (n - 1)
    res = opposite_slice_combo_sup(n, direction, payload["epsilon"],
                                   samples=payload.get("samples", 2000), seed=seed or 0)
    checks.add("estimate_below_bound", res.sup_estimate <= res.certified_upper_bound,
               res.certified_upper_bound - res.sup_estimate)
    checks.add("off_sphere", res.certified_upper_bound < 1.0, 1.0 - res.certified_upper_bound)
    return res.to_json()


def _run_sphere_witness(payload, seed, checks):
    combo = _combo_from(payload)
    res = fresh_coordinate_witness(combo)
    norm = sup_norm(res.point)
    checks.add("unit_norm", abs(norm - 1.0) <= 1e-12, 1e-12 - abs(norm - 1.0))
    for i, (s, x, xy) in enumerate(zip(combo.slices, res.norming_points, res.shifted)):
        m = slice_membership(s, xy)
        checks.add(f"member{i}", m.inside, m.slice_margin)
        for sign in (1.0, -1.0):
            dev = abs(sup_norm(x + sign * res.direction) - 1.0)
            checks.add(f"unit{i}{'+' if sign > 0 else '-'}", dev <= 1e-12, 1e-12 - dev)
    return res.to_json()


def _run_l1_witness(payload, seed, checks):
    space = WeightedMeasureSpace(payload["weights"])
    res = l1_disjoint_witness(space, payload["g"], payload["epsilon"], payload["lambda"])
    dev = abs(res.combined_norm - 1.0)
    checks.add("unit_norm", dev <= 1e-12, 1e-12 - dev)
    for i, m in enumerate(res.margins):
        checks.add(f"member{i}", m > 0, m)
    return res.to_json()


def _run_lemma(payload, seed, checks):
    if "samples" in payload:
        rng = np.random.default_rng(seed or 0)
        n = payload["samples"]
        alpha = rng.uniform(-np.pi, np.pi, n)
        beta = rng.uniform(-np.pi, np.pi, n)
        mu = rng.uniform(0.0, 0.5, n)
        mu[mu == 0.0] = 0.25
        modulus, residual, bound, cos_res = chord_identity_batch(alpha, beta, mu)
        excess = float(np.max(modulus - bound))
        checks.add("identity", residual.max() <= 1e-12, 1e-12 - residual.max())
        checks.add("bound", excess <= 1e-12, 1e-12 - excess)
        return {"samples": n, "max_identity_residual": float(residual.max()),
                "max_bound_excess": excess, "max_cosine_residual": float(cos_res.max())}
    inst = ChordInstance(payload.get("alpha", 0.0), payload.get("beta", 0.0),
                         payload.get("mu", 0.25))
    res = chord_identity_check(inst)
    checks.add("identity", res.identity_residual <= 1e-12, 1e-12 - res.identity_residual)
    checks.add("bound", res.bound_satisfied, res.bound - res.modulus)
    return {"modulus": res.modulus, "identity_residual": res.identity_residual,
            "bound": res.bound, "distance": inst.distance,
            "cosine_residual": res.cosine_residual}


def _run_campaign(payload, seed, checks):
    ranges = Ranges.from_json(payload.get("ranges", {}))
    res = run_campaign(
        instances=payload.get("instances", 1000),
        seed=seed or 0,
        ys_per_instance=payload.get("ys_per_instance", 10),
        ranges=ranges,
        tamper=payload.get("tamper", False),
    )
    checks.add("pass_rate", res["pass_rate"] == 1.0, res["pass_rate"] - 1.0)
    return res


_DISPATCH = {
    "decompose": _run_decompose,
    "diameter": _run_diameter,
    "shrinkage": _run_shrinkage,
    "remark": _run_remark,
    "sphere-witness": _run_sphere_witness,
    "l1-witness": _run_l1_witness,
    "lemma": _run_lemma,
    "campaign": _run_campaign,
}


def run_scenario(scenario, seed=None):
    """Run a scenario given as a dict or a path to a JSON file."""
    if not isinstance(scenario, dict):
        scenario = load_json(scenario)
    validate_scenario(scenario)
    if seed is None:
        seed = scenario.get("seed")
    payload = scenario.get("payload", {})
    checks = _Checks()
    start = time.perf_counter()
    try:
        results = _DISPATCH[scenario["kind"]](payload, seed, checks)
    except SliceLabError as exc:
        results = None
        checks.add("error", False, detail=f"{type(exc).__name__}: {exc}")
    wall = time.perf_counter() - start
    return {
        "scenario": scenario,
        "kind": scenario["kind"],
        "seed": seed,
        "results": _json_safe(results),
        "checks": _json_safe(checks.items),
        "passed": all(c["passed"] for c in checks.items),
        "wall_time": wall,
        "version": __version__,
    }


def decompose_scenario(combo, witnesses, y=None, seed=None):
    return {"kind": "decompose", "seed": seed, "payload": instance_payload(combo, witnesses, y)}
