"""Random decomposition instances and verification campaigns."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .decomposition import (
    compute_params,
    decompose,
    sample_in_neighborhood,
    verify_decomposition,
    weak_neighborhood,
    witness_shift_bounds,
)
from .errors import InvalidInput, SliceLabError
from .model import (
    OMEGA,
    ConvexCombo,
    Functional,
    Point,
    Slice,
    SpaceModel,
    combo_point,
    pairing,
)

MIN_MARGIN = 0.05


@dataclass(frozen=True)
class Ranges:
    models: tuple = ("finite-discrete", "c0", "c-omega")
    fields: tuple = ("real", "complex")
    n_max: int = 12
    k_min: int = 1
    k_max: int = 5
    support_max: int = 4
    circle_rate: float = 0.5
    margin_max: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.models or not self.fields:
            raise InvalidInput("ranges need at least one model and one field")
        if not 1 <= self.k_min <= self.k_max:
            raise InvalidInput("need 1 <= k_min <= k_max")
        if self.n_max < 1 or self.support_max < 1:
            raise InvalidInput("n_max and support_max must be positive")
        if not MIN_MARGIN < self.margin_max:
            raise InvalidInput(f"margin_max must exceed {MIN_MARGIN}")

    @classmethod
    def from_json(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInput(f"unknown range keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self):
        out = asdict(self)
        out["models"] = list(self.models)
        out["fields"] = list(self.fields)
        return out


def _scalar(rng, space):
    if space.is_real:
        return float(rng.normal())
    return complex(rng.normal(), rng.normal())


def _unit(rng, space):
    if space.is_real:
        return 1.0 if rng.random() < 0.5 else -1.0
    return complex(np.exp(1j * rng.uniform(-math.pi, math.pi)))


def _disk(rng, space, radius=1.0):
    if space.is_real:
        return float(rng.uniform(-radius, radius))
    return complex(radius * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(-math.pi, math.pi)))


def _conj_phase(v):
    if isinstance(v, float):
        return math.copysign(1.0, v)
    return v.conjugate() / abs(v)


def _random_functional(rng, space, m, support_max):
    size = int(rng.integers(1, min(support_max, m) + 1))
    idx = sorted(int(t) for t in rng.choice(m, size=size, replace=False))
    coords = {t: _scalar(rng, space) for t in idx}
    atom = None
    if space.has_omega:
        atom = _scalar(rng, space) if rng.random() < 0.3 else 0.0
    total = sum(abs(v) for v in coords.values()) + (abs(atom) if atom else 0.0)
    coords = {t: v / total for t, v in coords.items()}
    if atom is not None:
        atom = atom / total
    return Functional(space, coords, atom)


def _coordinate_values(rng, space, style, fs, t):
    k = len(fs)
    if style == "circle" and k == 1:
        style = "pinned"
    if style == "pinned":
        return [_unit(rng, space)] * k
    if style == "circle":
        q_max = 2 if space.is_real else min(k, 3)
        q = int(rng.integers(2, q_max + 1))
        units = [1.0, -1.0] if space.is_real else []
        while len(units) < q:
            u = _unit(rng, space)
            if all(abs(u - v) > 1e-3 for v in units):
                units.append(u)
        labels = list(range(q)) + [int(rng.integers(0, q)) for _ in range(k - q)]
        labels = [labels[j] for j in rng.permutation(k)]
        return [units[p] for p in labels]
    out = []
    for f in fs:
        c = f.value(t)
        if style == "norming" and c != 0:
            r = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.3, 1.0))
            out.append(r * _conj_phase(c))
        elif rng.random() < 0.3:
            out.append(_unit(rng, space))
        else:
            out.append(_disk(rng, space))
    return out


def build_instance(seed, ranges: Ranges | None = None):
    """Random (combo, witnesses) with every witness margin at least 0.05.

    With probability ``ranges.circle_rate`` (and k >= 2) one supported
    coordinate of the first functional is forced to be a circle
    coordinate: all witnesses unimodular there, not all equal.
    """
    ranges = ranges or Ranges()
    rng = np.random.default_rng(seed)
    kind = ranges.models[int(rng.integers(len(ranges.models)))]
    field = ranges.fields[int(rng.integers(len(ranges.fields)))]
    k = int(rng.integers(ranges.k_min, ranges.k_max + 1))
    force_circle = ranges.k_max >= 2 and rng.random() < ranges.circle_rate
    if force_circle:
        k = max(k, 2)
    m = int(rng.integers(1, ranges.n_max + 1))
    space = SpaceModel(kind, field, m if kind == "finite-discrete" else None)

    fs = [_random_functional(rng, space, m, ranges.support_max) for _ in range(k)]
    raw = rng.uniform(0.2, 1.0, size=k)
    lambdas = [float(v) for v in raw / raw.sum()]

    coords_list = list(range(m)) + ([OMEGA] if space.has_omega else [])
    styles = {
        t: str(rng.choice(["free", "norming", "pinned", "circle"], p=[0.35, 0.35, 0.15, 0.15]))
        for t in coords_list
    }
    if force_circle:
        supp = fs[0].support()
        styles[supp[int(rng.integers(len(supp)))]] = "circle"

    values = {t: _coordinate_values(rng, space, styles[t], fs, t) for t in coords_list}
    witnesses = []
    for i in range(k):
        coords = {t: values[t][i] for t in range(m)}
        tail = values[OMEGA][i] if space.has_omega else None
        witnesses.append(Point(space, coords, tail))

    slices = []
    for f, z in zip(fs, witnesses):
        margin = float(rng.uniform(MIN_MARGIN + 1e-6, ranges.margin_max))
        eps = 1.0 - complex(pairing(f, z)).real + margin
        slices.append(Slice(f, eps))
    return ConvexCombo.of(lambdas, slices), witnesses


def instance_payload(combo, witnesses, y=None):
    out = {"combo": combo.to_json(), "witnesses": [z.to_json() for z in witnesses]}
    if y is not None:
        out["y"] = y.to_json()
    return out


def parse_instance(payload):
    combo = ConvexCombo.from_json(payload["combo"])
    witnesses = [Point.from_json(z) for z in payload["witnesses"]]
    y = Point.from_json(payload["y"]) if payload.get("y") is not None else None
    return combo, witnesses, y


def generate_instance(seed, ranges: Ranges | None = None):
    """A ``decompose`` scenario (JSON-ready dict) for the given seed."""
    combo, witnesses = build_instance(seed, ranges)
    return {"kind": "decompose", "seed": int(seed), "payload": instance_payload(combo, witnesses)}


def _run_one(job):
    seed, ys_per_instance, ranges, tamper = job
    out = {
        "seed": seed,
        "checks": 0,
        "passed": 0,
        "circle": False,
        "failures": [],
        "min_slice_excess": math.inf,
        "max_residual": 0.0,
        "min_ball_margin": math.inf,
        "max_drift_ratio": 0.0,
        "max_telescoping": 0.0,
        "max_lemma_excess": -math.inf,
    }
    try:
        combo, witnesses = build_instance(seed, ranges)
        params = compute_params(combo, witnesses)
    except SliceLabError as exc:
        out["failures"].append({"seed": seed, "y_index": None, "error": str(exc)})
        return out
    out["circle"] = bool(params.circle)
    for t in params.circle:
        plan = params.cases[t]
        out["max_telescoping"] = max(out["max_telescoping"], abs(sum(plan.shifts)))
    for _, _, modulus, bound in witness_shift_bounds(params, witnesses):
        out["max_lemma_excess"] = max(out["max_lemma_excess"], modulus - bound)

    U = weak_neighborhood(combo_point(combo, witnesses), params)
    for j in range(ys_per_instance):
        out["checks"] += 1
        try:
            y = sample_in_neighborhood(U, [seed, j])
            zbars = decompose(combo, witnesses, params, y)
            if tamper:
                zbars[0] = zbars[0] * 1.1
            rep = verify_decomposition(combo, witnesses, y, zbars)
        except SliceLabError as exc:
            out["failures"].append({"seed": seed, "y_index": j, "error": str(exc)})
            continue
        if rep.passed:
            out["passed"] += 1
        else:
            out["failures"].append(
                {"seed": seed, "y_index": j, "checks": [[c, i] for c, i in rep.failures]}
            )
        out["min_slice_excess"] = min(
            out["min_slice_excess"], min(m - rep.required_slice_margin for m in rep.slice_margins)
        )
        out["max_residual"] = max(out["max_residual"], rep.reconstruction_residual)
        out["min_ball_margin"] = min(out["min_ball_margin"], min(rep.ball_margins))
        out["max_drift_ratio"] = max(out["max_drift_ratio"], max(rep.drifts) / rep.eta)
    return out


def worker_count():
    n = os.cpu_count() or 1
    cap = os.environ.get("SLICE_LAB_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def run_campaign(instances=1000, seed=0, ys_per_instance=10, ranges=None, tamper=False, workers=None):
    """Generate ``instances`` random instances and verify ``ys_per_instance`` decompositions each.

    Instance ``i`` uses seed ``seed + i``; the j-th y of an instance is
    sampled with seed ``[instance_seed, j]``. ``tamper`` scales the first
    output witness by 1.1 before verification (negative-path hook).
    """
    ranges = ranges or Ranges()
    jobs = [(seed + i, ys_per_instance, ranges, tamper) for i in range(instances)]
    workers = workers or worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_one(job) for job in jobs]
    results.sort(key=lambda r: r["seed"])

    checks = sum(r["checks"] for r in results)
    passed = sum(r["passed"] for r in results)
    failures = [f for r in results for f in r["failures"]]

    def agg(key, fn, empty):
        vals = [r[key] for r in results if math.isfinite(r[key])]
        return fn(vals) if vals else empty

    return {
        "instances": instances,
        "seed": seed,
        "ys_per_instance": ys_per_instance,
        "ranges": ranges.to_json(),
        "checks": checks,
        "passed": passed,
        "pass_rate": passed / checks if checks else 1.0,
        "circle_instances": sum(r["circle"] for r in results),
        "worst": {
            "min_slice_margin_excess": agg("min_slice_excess", min, None),
            "max_reconstruction_residual": agg("max_residual", max, 0.0),
            "min_ball_margin": agg("min_ball_margin", min, None),
            "max_drift_over_eta": agg("max_drift_ratio", max, 0.0),
            "max_shift_sum": agg("max_telescoping", max, 0.0),
            "max_chord_bound_excess": agg("max_lemma_excess", max, None),
        },
        "failures": failures,
    }
