"""JSON layouts for matrices, subspaces, operators, graphs and reports."""

from __future__ import annotations

import dataclasses

import numpy as np

from . import linalg
from .errors import MalformedInput, RankDeficient
from .graph import GrassmannGraphView, OrthogonalApartment
from .grassmann import RelationReport, Subspace
from .operators import Endo, SemilinearOperator


def cmatrix_to_json(A) -> dict:
    A = linalg.as_cmatrix(A)
    flat = A.reshape(-1)
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "re": flat.real.tolist(),
        "im": flat.imag.tolist(),
    }


def cmatrix_from_json(d) -> np.ndarray:
    try:
        r, c = int(d["rows"]), int(d["cols"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", [0.0] * (r * c)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad matrix record: {exc}") from exc
    if re.shape != (r * c,) or im.shape != (r * c,):
        raise MalformedInput("matrix entry count does not match rows * cols")
    A = (re + 1j * im).reshape(r, c)
    if not np.all(np.isfinite(A)):
        raise MalformedInput("matrix has non-finite entries")
    return A


def subspace_to_json(X: Subspace) -> dict:
    return {"n": X.n, "k": X.k, "frame": cmatrix_to_json(X.frame)}


def subspace_from_json(d) -> Subspace:
    """Load and canonicalise: the frame is re-orthonormalised, rank < k is rejected."""
    try:
        n, k = int(d["n"]), int(d["k"])
        F = cmatrix_from_json(d["frame"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad subspace record: {exc}") from exc
    if F.shape != (n, k):
        raise MalformedInput(f"frame shape {F.shape} does not match n={n}, k={k}")
    try:
        return Subspace.span(F)
    except (RankDeficient, ValueError) as exc:
        raise MalformedInput(f"frame does not span a {k}-dimensional subspace") from exc


def operator_to_json(L: SemilinearOperator) -> dict:
    return {"n": L.n, "endo": L.endo.value, "matrix": cmatrix_to_json(L.matrix)}


def operator_from_json(d) -> SemilinearOperator:
    try:
        return SemilinearOperator(cmatrix_from_json(d["matrix"]), Endo(d["endo"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad operator record: {exc}") from exc


def graph_to_json(G: GrassmannGraphView) -> dict:
    return {
        "n": G.n,
        "k": G.k,
        "vertices": [subspace_to_json(v) for v in G.vertices],
        "edges": [list(e) for e in G.edges],
    }


def apartment_to_json(A: OrthogonalApartment) -> dict:
    return {"basis": cmatrix_to_json(A.basis), "k": A.k, "subsets": [list(s) for s in A.subsets]}


def table_to_json(entries) -> list:
    return [{"in": subspace_to_json(a), "out": subspace_to_json(b)} for a, b in entries]


def table_from_json(data) -> list:
    if not isinstance(data, list):
        raise MalformedInput("pairing table must be a JSON list")
    try:
        return [(subspace_from_json(e["in"]), subspace_from_json(e["out"])) for e in data]
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad pairing-table entry: {exc}") from exc


def relation_report_to_json(r: RelationReport) -> dict:
    return dataclasses.asdict(r)


def reconstruction_to_json(result) -> dict:
    return {
        "certified": bool(result.certified),
        "endo": result.operator.endo.value,
        "max_residual": float(result.max_residual),
        "queries_used": result.queries_used,
        "extraction_queries": result.extraction_queries,
        "validations": result.validations,
        "operator": operator_to_json(result.operator),
    }
