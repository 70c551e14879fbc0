"""Command-line interface.

Exit codes: 0 all checks pass, 1 a check or reconstruction failed, 2 usage or
input error, 3 dimension error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from math import comb

import numpy as np

from . import graph as gr
from . import linalg
from . import serialization as ser
from .errors import (
    DimensionMismatch,
    GrassmannError,
    InvalidDimension,
    MalformedInput,
    MixedDimensions,
    ReconstructionFailed,
    RetryExhausted,
)
from .grassmann import ANGLE_TOL, TOL, angles, random_subspace, relation_report, transition_probability
from .operators import random_antiunitary, random_unitary, projective_equal
from .suites import ANCHORS, run_lemma_suite
from .wigner import TransformationOracle, descent_trace, reconstruct_operator, wild_map_demo

SCHEMA = 1

ANCHORS = dict(
    ANCHORS,
    **{
        "angle-range": "principal angles lie in [0, pi/2]",
        "relation-consistency": "Grassmann graph distance k - dim(X ∩ Y)",
        "graph-edge-count": "apartment graph is the Johnson graph J(n, k)",
        "graph-distance-law": "Grassmann graph distance k - dim(X ∩ Y) in apartments",
        "reconstruction-certified": "maps preserving orthogonality and adjacency are induced by isometries",
        "reconstruction-ground-truth": "the inducing operator is unique up to a scalar",
        "descent-star-images": "images of stars lie in a unique star",
        "wild-orthogonality-both": "at n = 2k orthogonality pins X to its complement only",
        "wild-adjacency-violation": "at n = 2k orthogonality preservers need not come from operators",
    },
)


class UsageError(Exception):
    pass


def _record(name, passed, metric, tolerance, **detail):
    rec = {
        "name": name,
        "anchor": ANCHORS[name],
        "passed": bool(passed),
        "metric": float(metric),
        "tolerance": float(tolerance),
    }
    if detail:
        rec["detail"] = detail
    return rec


def _metric_record(name, metric, tolerance, **detail):
    return _record(name, metric <= tolerance, metric, tolerance, **detail)


def _config(args) -> dict:
    return {
        key: getattr(args, key)
        for key in ("command", "n", "k", "seed", "tol_rank", "tol_angle", "pairs", "check_tol")
        if hasattr(args, key)
    }


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc


def _two_subspaces(args):
    if args.inputs:
        if len(args.inputs) != 2:
            raise UsageError("angles/relations take exactly two --in files")
        X, Y = (ser.subspace_from_json(_load_json(p)) for p in args.inputs)
        if X.n != Y.n or X.k != Y.k:
            raise DimensionMismatch(f"inputs have shapes ({X.n}, {X.k}) and ({Y.n}, {Y.k})")
        return X, Y
    rng = np.random.default_rng(args.seed)
    return random_subspace(args.n, args.k, rng), random_subspace(args.n, args.k, rng)


def cmd_angles(args):
    X, Y = _two_subspaces(args)
    th = angles(X, Y)
    rel = relation_report(X, Y, TOL, args.tol_angle)
    checks = [
        _record("angle-range", bool(np.all((th >= 0) & (th <= np.pi / 2))), 0.0, 0.0),
        _record(
            "relation-consistency",
            rel.distance == X.k - rel.intersection_dim and (not rel.ortho_adjacent or rel.adjacent),
            0.0,
            0.0,
        ),
    ]
    payload = {
        "angles": th.tolist(),
        "transition_probability": transition_probability(X, Y),
        "relations": ser.relation_report_to_json(rel),
    }
    if args.command == "relations":
        payload = {"relations": payload["relations"]}
    return checks, payload


def cmd_graph(args):
    if args.inputs:
        data = _load_json(args.inputs[0])
        if not isinstance(data, list):
            raise MalformedInput("graph input must be a JSON list of subspaces")
        vertices = [ser.subspace_from_json(d) for d in data]
        G = gr.build_graph(vertices, args.tol_angle)
        return [], {"graph": ser.graph_to_json(G)}
    apt = gr.orthogonal_apartment(random_unitary(args.n, args.seed).matrix, args.k)
    G = gr.build_graph(apt.members, args.tol_angle)
    n, k = args.n, args.k
    expected_edges = comb(n, k) * k * (n - k) // 2
    law = 0
    for a in range(len(apt.members)):
        dist = gr.bfs_distances(G, a)
        for b in range(len(apt.members)):
            law += dist.get(b) != k - len(set(apt.subsets[a]) & set(apt.subsets[b]))
    checks = [
        _metric_record("graph-edge-count", abs(len(G.edges) - expected_edges), 0, observed=len(G.edges), expected=expected_edges),
        _metric_record("graph-distance-law", law, 0),
    ]
    payload = {"apartment": ser.apartment_to_json(apt), "edges": [list(e) for e in G.edges]}
    return checks, payload


def cmd_verify_lemmas(args):
    if not (1 <= args.k <= 4 and args.k <= args.n <= 10):
        raise UsageError("verify-lemmas runs at desk scale: n <= 10, 1 <= k <= 4, k <= n")
    checks = run_lemma_suite(
        args.n, args.k, args.seed, args.pairs, args.samples, args.check_tol, args.tol_angle
    )
    return checks, {}


def cmd_reconstruct(args):
    truth = None
    if args.inputs:
        entries = ser.table_from_json(_load_json(args.inputs[0]))
        oracle = TransformationOracle.from_table(entries)
        n, k = oracle.n, oracle.k
    else:
        n, k = args.n, args.k
        make = random_antiunitary if args.ground_truth == "antiunitary" else random_unitary
        truth = make(n, args.seed)
        oracle = TransformationOracle.from_operator(truth, k, record=bool(args.table_out))
    if not n > 2 * k > 2:
        raise UsageError(f"reconstruct needs n > 2k > 2, got n={n}, k={k}")
    checks = []
    payload = {"n": n, "k": k}
    try:
        result = reconstruct_operator(oracle, n, k, args.validation, seed=args.seed)
    except ReconstructionFailed as exc:
        payload["failure"] = {"stage": exc.stage, "detail": exc.detail}
        checks.append(_record("reconstruction-certified", False, float("inf"), 1e-6, stage=exc.stage))
        return checks, payload
    payload["reconstruction"] = ser.reconstruction_to_json(result)
    stage = {} if result.certified else {"stage": "validation"}
    checks.append(_metric_record("reconstruction-certified", result.max_residual, 1e-6, **stage))
    if truth is not None:
        match = projective_equal(result.operator, truth)
        payload["ground_truth_match"] = {
            "matched": bool(match.matched),
            "residual": match.residual,
            "endo": truth.endo.value,
        }
        checks.append(
            _record("reconstruction-ground-truth", match.matched, match.residual, 1e-6 * np.sqrt(n))
        )
        trace = descent_trace(
            TransformationOracle.from_operator(truth, k), n, k, args.stars, args.seed, truth
        )
        worst = max(w.ground_truth_angle for w in trace)
        payload["descent"] = [
            {"level": w.level, "members": w.members, "image_span_dim": w.image_span_dim, "ground_truth_angle": w.ground_truth_angle}
            for w in trace
        ]
        checks.append(_metric_record("descent-star-images", worst, 1e-8, witnesses=len(trace)))
    if args.table_out and oracle.record:
        with open(args.table_out, "w") as fh:
            json.dump(ser.table_to_json(oracle.log), fh)
    return checks, payload


def cmd_wild_demo(args):
    n, k = args.n, args.k
    if n != 2 * k or k < 2 or n > 8:
        raise UsageError(f"wild-demo needs n = 2k, k >= 2, n <= 8; got n={n}, k={k}")
    apt = gr.orthogonal_apartment(random_unitary(n, args.seed).matrix, k)
    try:
        demo = wild_map_demo(apt, seed=args.seed)
    except RetryExhausted as exc:
        apt_members = len(apt.members)
        checks = [_record("wild-adjacency-violation", False, 0.0, 0.0, members=apt_members)]
        return checks, {"failure": {"stage": "retry-exhausted", "detail": str(exc)}}
    checks = [
        _metric_record("wild-orthogonality-both", len(demo.orthogonality.violations), 0, pairs=demo.orthogonality.sampled_pairs),
        _record("wild-adjacency-violation", not demo.adjacency.verdict, len(demo.adjacency.violations), 0.0),
    ]
    label, X, Y, fX, fY = demo.witness
    payload = {
        "apartment": ser.apartment_to_json(apt),
        "pairing": [{"in": list(apt.subsets[i]), "out": list(apt.subsets[j])} for i, j in enumerate(demo.table)],
        "orthogonality": demo.orthogonality.to_dict(),
        "adjacency": demo.adjacency.to_dict(),
        "violation": {
            "label": [list(x) if isinstance(x, tuple) else x for x in label],
            "in": [ser.subspace_to_json(X), ser.subspace_to_json(Y)],
            "out": [ser.subspace_to_json(fX), ser.subspace_to_json(fY)],
        },
        "draws": demo.draws,
    }
    return checks, payload


COMMANDS = {
    "angles": cmd_angles,
    "relations": cmd_angles,
    "graph": cmd_graph,
    "verify-lemmas": cmd_verify_lemmas,
    "reconstruct": cmd_reconstruct,
    "wild-demo": cmd_wild_demo,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grasswigner", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-rank", type=float, default=linalg.RANK_RTOL, help="relative rank tolerance")
    p.add_argument("--tol-angle", type=float, default=ANGLE_TOL, help="angle tolerance in radians")
    p.add_argument("--pairs", type=int, default=20, help="sampled pairs per check")
    p.add_argument("--samples", type=int, default=2000, help="Monte-Carlo samples per pair")
    p.add_argument("--check-tol", type=float, default=None, help="override every check tolerance")
    p.add_argument("--in", dest="inputs", action="append", default=[], help="input JSON file")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--ground-truth", choices=("unitary", "antiunitary"), default="unitary")
    p.add_argument("--validation", type=int, default=20, help="validation budget for reconstruct")
    p.add_argument("--stars", type=int, default=5, help="sampled stars per descent level")
    p.add_argument("--table-out", default=None, help="reconstruct: save the queried pairing table")
    return p


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["name", "anchor", "passed", "metric", "tolerance"])
    for c in report["checks"]:
        w.writerow([c["name"], c["anchor"], c["passed"], repr(c["metric"]), repr(c["tolerance"])])
    return buf.getvalue()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    linalg.RANK_RTOL = args.tol_rank
    t0 = time.perf_counter()
    try:
        checks, payload = COMMANDS[args.command](args)
    except (DimensionMismatch, MixedDimensions, InvalidDimension) as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, MalformedInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GrassmannError as exc:
        print(f"failure: {exc!r}", file=sys.stderr)
        return 1
    passed = sum(c["passed"] for c in checks)
    report = {
        "schema": SCHEMA,
        "suite": args.command,
        "config": _config(args),
        "checks": checks,
        "summary": {"total": len(checks), "passed": passed, "failed": len(checks) - passed},
        "passed": passed == len(checks),
        "payload": payload,
        "wall_clock_s": round(time.perf_counter() - t0, 6),
    }
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report["passed"]:
        for c in checks:
            if not c["passed"]:
                print(f"FAILED {c['name']}: metric={c['metric']:.3e} tolerance={c['tolerance']:.3e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
