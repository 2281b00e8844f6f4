"""Command-line front end.

Subcommands: simulate, partition, distance, iidtest, test, props. Every
randomized subcommand requires an explicit --seed (reports must be
reproducible; there is no wall-clock default). Reports are JSON documents
embedding the run manifest: subcommand, flags, resolved constants, seed,
tool version and input file digests. Exit codes: 0 success or Accept,
1 Reject (test subcommand), 2 usage or input error, 3 failed partition
certification.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .chain_core import stationary_distribution, validate
from .config import Constants, DEFAULT_CONSTANTS
from .errors import CertificationFailed, ChainTestError
from .fileio import (
    file_digest,
    load_matrix,
    load_probvector,
    load_samples,
    load_trajectory,
    round12,
    save_trajectory,
    write_report,
)
from .identity import TestConfig, identity_test, property_suite, trajectory_budget
from .iid_test import iid_test
from .metrics import chain_distance, ratio_distance
from .partition import partition_states
from .sampling import simulate


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mcident",
        description="Identity testing of reversible Markov chains from a single trajectory",
    )
    ap.add_argument("--version", action="version", version=f"mcident {__version__}")
    ap.add_argument("--config", help="JSON file overriding named constants")
    ap.add_argument(
        "--constants", action="store_true", help="print the resolved constant record and exit"
    )
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("simulate", help="sample a trajectory from a chain")
    p.add_argument("--matrix", required=True)
    p.add_argument("--mu", required=True, help="initial law: file path, 'stationary' or 'uniform'")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("partition", help="partition a chain's state space")
    p.add_argument("--matrix", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--certify", action="store_true", help="enable d <= 12 enumeration checks")
    p.add_argument("--out", required=True)

    p = sub.add_parser("distance", help="distances between two chains")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("iidtest", help="iid identity test of samples against a reference law")
    p.add_argument("--pbar", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--report")

    p = sub.add_parser("test", help="single-trajectory identity test against a reference chain")
    p.add_argument("--reference", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--lazify", choices=("emulate", "assume"), default="assume")
    p.add_argument("--report")

    p = sub.add_parser("props", help="distance behavior suite")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--out")
    return ap


def _constants_from(args) -> Constants:
    if args.config:
        with open(args.config) as fh:
            return Constants.from_dict(json.load(fh))
    return DEFAULT_CONSTANTS


def _manifest(args, constants: Constants, inputs: dict) -> dict:
    flags = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config", "constants") and v is not None
    }
    return {
        "subcommand": args.command,
        "flags": flags,
        "constants": constants.to_dict(),
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "inputs": {name: file_digest(path) for name, path in inputs.items()},
    }


def _cmd_simulate(args, constants) -> int:
    P = load_matrix(args.matrix)
    if args.mu == "stationary":
        mu = stationary_distribution(P)
    elif args.mu == "uniform":
        mu = np.full(P.d, 1.0 / P.d)
    else:
        mu = load_probvector(args.mu)
    traj = simulate(P, mu, args.steps, args.seed)
    save_trajectory(traj, args.out)
    doc = {
        "manifest": _manifest(args, constants, {"matrix": args.matrix}),
        "out": args.out,
        "steps": len(traj),
    }
    write_report(doc)
    return 0


def _cmd_partition(args, constants) -> int:
    P = load_matrix(args.matrix)
    part = partition_states(P, args.beta, args.seed, certify=args.certify, constants=constants)
    certs = json.loads(json.dumps(part.certificates))  # deep copy, JSON-safe
    for c in certs["components"]:
        c["states"] = [i + 1 for i in c["states"]]
    certs["tail"]["states"] = [i + 1 for i in certs["tail"]["states"]]
    doc = {
        "manifest": _manifest(args, constants, {"matrix": args.matrix}),
        "components": [[i + 1 for i in S] for S in part.components],
        "tail": [i + 1 for i in part.tail],
        "certificates": certs,
    }
    write_report(doc, args.out)
    return 0


def _cmd_distance(args, constants) -> int:
    A = load_matrix(args.a)
    B = load_matrix(args.b)
    dist = chain_distance(A, B)
    print(repr(round12(dist)))
    ca, cb = validate(A), validate(B)
    if ca.irreducible and cb.irreducible:
        rd = ratio_distance(
            stationary_distribution(A).entries, stationary_distribution(B).entries
        )
        print(f"stationary_ratio_distance {round12(rd)!r}")
    return 0


def _cmd_iidtest(args, constants) -> int:
    pbar = load_probvector(args.pbar)
    d, samples = load_samples(args.samples)
    if d != pbar.d:
        print(f"samples alphabet {d} != reference alphabet {pbar.d}", file=sys.stderr)
        return 2
    ref = {i: float(pbar.entries[i]) for i in range(pbar.d)}
    verdict = iid_test(samples, ref, args.eps, args.delta, args.seed, constants)
    doc = {
        "manifest": _manifest(args, constants, {"pbar": args.pbar, "samples": args.samples}),
        "decision": verdict.decision,
        "statistic": verdict.statistic,
        "threshold": verdict.threshold,
        "sample_size": verdict.sample_size,
    }
    write_report(doc, args.report)
    return 0


def _cmd_test(args, constants) -> int:
    Pbar = load_matrix(args.reference)
    traj = load_trajectory(args.trajectory)
    cfg = TestConfig(eps=args.eps, constants=constants, seed=args.seed)
    report = identity_test(Pbar, traj, cfg, lazify=args.lazify)
    doc = {
        "manifest": _manifest(
            args, constants, {"reference": args.reference, "trajectory": args.trajectory}
        ),
        "verdict": "Reject" if report.verdict else "Accept",
        "exit_code": report.verdict,
        "trajectory_length": report.trajectory_length,
        "budget_hint": trajectory_budget(
            Pbar.d, float(stationary_distribution(Pbar).entries.min()), args.eps, constants
        ),
        "tested_component": None
        if report.tested_component is None
        else [i + 1 for i in report.tested_component],
        "partition": {
            "components": [[i + 1 for i in S] for S in report.partition_used.components],
            "tail": [i + 1 for i in report.partition_used.tail],
        },
        "per_component": [
            {
                "states": [i + 1 for i in o.states],
                "mass": o.mass,
                "sample_count": o.sample_count,
                "failed": o.failed,
                "decision": None if o.verdict is None else o.verdict.decision,
                "statistic": None if o.verdict is None else o.verdict.statistic,
                "threshold": None if o.verdict is None else o.verdict.threshold,
            }
            for o in report.per_component
        ],
    }
    write_report(doc, args.report)
    return int(report.verdict)


def _cmd_props(args, constants) -> int:
    rep = property_suite(args.seed, pairs=args.pairs)
    doc = {
        "manifest": _manifest(args, constants, {}),
        "passed": rep.passed,
        "checks": rep.checks,
        "violations": [asdict(v) for v in rep.violations],
        "family": [asdict(f) for f in rep.family],
    }
    write_report(doc, args.out)
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "partition": _cmd_partition,
    "distance": _cmd_distance,
    "iidtest": _cmd_iidtest,
    "test": _cmd_test,
    "props": _cmd_props,
}


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        constants = _constants_from(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"bad constants config: {exc}", file=sys.stderr)
        return 2
    if args.constants:
        write_report({"constants": constants.to_dict(), "version": __version__})
        return 0
    if args.command is None:
        ap.print_usage(sys.stderr)
        return 2
    try:
        return _HANDLERS[args.command](args, constants)
    except CertificationFailed as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return 3
    except (ChainTestError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
