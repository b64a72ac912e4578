"""Command-line front end: ``slice-lab <subcommand> ...``.

Every subcommand builds a scenario, runs it and prints the JSON report.
The exit status is 0 iff every check passed, 1 if a check failed and 2
on malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .campaign import Ranges, generate_instance
from .errors import SliceLabError
from .scenarios import load_json, run_scenario


def _emit(payload, pretty, stream=None):
    stream = stream or sys.stdout
    if pretty:
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        text = json.dumps(payload, sort_keys=True)
    stream.write(text + "\n")


def _unwrap(data, kind, key=None):
    """Accept either a full scenario of ``kind`` or its bare payload."""
    if isinstance(data, dict) and "kind" in data:
        if data["kind"] != kind:
            raise SliceLabError(f"expected a {kind} scenario, got {data['kind']!r}")
        return data.get("payload", {}), data.get("seed")
    if key is not None and isinstance(data, list):
        return {key: data}, None
    return data, None


def _scenario_from_args(args):
    cmd = args.command
    if cmd == "run":
        scenario = load_json(args.scenario)
        return scenario
    if cmd == "lemma":
        if args.samples:
            payload = {"samples": args.samples}
        else:
            payload = {"alpha": args.alpha, "beta": args.beta, "mu": args.mu}
        return {"kind": "lemma", "seed": args.seed, "payload": payload}
    if cmd == "decompose":
        payload, seed = _unwrap(load_json(args.instance), "decompose")
        payload = dict(payload)
        if args.y is not None:
            payload["y"] = load_json(args.y)
        elif args.sample is not None:
            payload.pop("y", None)
            seed = args.sample
        return {"kind": "decompose", "seed": seed, "payload": payload}
    if cmd in ("diameter", "sphere-witness"):
        payload, seed = _unwrap(load_json(args.combo), cmd, key="combo")
        return {"kind": cmd, "seed": seed, "payload": payload}
    if cmd == "l1-witness":
        payload, seed = _unwrap(load_json(args.space), cmd)
        return {"kind": cmd, "seed": seed, "payload": payload}
    if cmd == "shrinkage":
        payload = {"p": args.p, "epsilon": args.eps, "lambda": args.lam, "samples": args.samples}
        return {"kind": "shrinkage", "seed": args.seed, "payload": payload}
    if cmd == "remark":
        payload = {"n": args.n, "epsilon": args.eps, "samples": args.samples}
        return {"kind": "remark", "seed": args.seed, "payload": payload}
    if cmd == "campaign":
        payload, seed = _unwrap(load_json(args.config), "campaign")
        if args.seed is not None:
            seed = args.seed
        if "seed" in payload:
            payload = dict(payload)
            seed = payload.pop("seed") if seed is None else seed
        return {"kind": "campaign", "seed": seed, "payload": payload}
    raise AssertionError(cmd)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slice-lab",
        description="Convex combinations of slices of C(K): witnesses, diameters, checks.",
    )
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
        return p

    p = add("run", "run a scenario file")
    p.add_argument("scenario", type=Path)

    p = add("lemma", "check the chord bound for one instance or a random batch")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=0.25)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = add("decompose", "decompose a point near x into slice witnesses")
    p.add_argument("--instance", type=Path, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--y", type=Path, default=None)
    group.add_argument("--sample", type=int, default=None, metavar="SEED")

    p = add("diameter", "sup-norm diameter of a convex combination of slices of l_inf^n")
    p.add_argument("--combo", type=Path, required=True)

    p = add("shrinkage", "sup of the norm over lam S1 + (1 - lam) S2 in R (+)_p R")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)

    p = add("remark", "opposite-slice combination in the Euclidean ball")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)

    p = add("sphere-witness", "unit-norm point of a combination in c0 via a fresh coordinate")
    p.add_argument("--combo", type=Path, required=True)

    p = add("l1-witness", "unit-norm point of a combination of L1 slices via disjoint cells")
    p.add_argument("--space", type=Path, required=True)

    p = add("campaign", "randomized decomposition campaign")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None)

    p = add("generate", "emit a random decompose scenario")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", type=Path, default=None, help="JSON object of instance ranges")
    p.add_argument("--out", type=Path, default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            ranges = Ranges.from_json(load_json(args.config)) if args.config else None
            scenario = generate_instance(args.seed, ranges)
            text = json.dumps(scenario, indent=2, sort_keys=True) + "\n"
            if args.out:
                args.out.write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            return 0
        report = run_scenario(_scenario_from_args(args))
    except (SliceLabError, OSError, KeyError, TypeError) as exc:
        sys.stderr.write(f"slice-lab: error: {exc}\n")
        return 2
    _emit(report, args.pretty)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
