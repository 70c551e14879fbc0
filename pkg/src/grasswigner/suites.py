"""Check suites run by the ``verify-lemmas`` command.

Each check returns a record ``{name, anchor, passed, metric, tolerance}``; a
check passes when ``metric <= tolerance``. Anchors come from the fixed
:data:`ANCHORS` table so every record names the statement it exercises.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from . import graph as gr
from . import linalg
from .errors import NotOrthogonalityPreserving
from .grassmann import (
    ANGLE_TOL,
    TOL,
    Subspace,
    angles,
    commutator_norm,
    compatible_by_angles,
    compatible_by_commutator,
    complex_gaussian,
    intersection_dim,
    is_ortho_adjacent,
    principal_angles,
    random_subspace,
    transition_probability,
)
from .operators import (
    SemilinearOperator,
    induced_map,
    normalize_to_isometry,
    random_isometry,
    random_unitary,
)
from .wigner import sample_pairs

ANCHORS = {
    "principal-angles-variational": "principal angles: recursive minimisation of arccos|<x,y>|",
    "principal-angles-symmetry": "principal angles: symmetric in the two subspaces",
    "unitary-invariance": "principal angles: invariant under unitaries",
    "compatibility-tests-agree": "compatibility: commuting projections iff angles in {0, pi/2}",
    "angle-rank-consistency": "Grassmann graph: dim(X ∩ Y) equals the number of zero angles",
    "transition-probability-range": "transition probability: sum of squared cosines in [0, k]",
    "top-compatible-count": "compatible subsets of cliques: k+1 elements in a top",
    "star-compatible-count": "compatible subsets of cliques: n-k+1 elements in a star",
    "clique-compatible-ortho-adjacent": "compatible subsets of cliques are mutually ortho-adjacent",
    "geodesic-orthogonal-compatible": "geodesics between orthogonal elements are compatible",
    "geodesic-bookkeeping": "geodesics: dim(X ∩ X_j) = k-j and dim(Y ∩ X_j) = k-i+j",
    "geodesic-through-orthogonal": "compatible pairs lie on a geodesic from X to an element orthogonal to X",
    "apartment-distance-law": "Grassmann graph distance k - dim(X ∩ Y) in apartments",
    "isometry-normalization": "orthogonality-preserving semilinear operators are scaled isometries",
    "isometry-normalization-rejects": "non-scalar diagonal operators break orthogonality",
    "induced-map-angle-preservation": "maps induced by isometries preserve all principal angles",
}


def _record(name, metric, tolerance, **detail):
    rec = {
        "name": name,
        "anchor": ANCHORS[name],
        "passed": bool(metric <= tolerance),
        "metric": float(metric),
        "tolerance": float(tolerance),
    }
    if detail:
        rec["detail"] = detail
    return rec


def _unit_columns(k, count, rng):
    A = complex_gaussian((k, count), rng)
    return A / np.linalg.norm(A, axis=0)


def sampled_overlap_excess(X: Subspace, Y: Subspace, samples: int, rng) -> float:
    """Largest ``|<x, y>| - cos(theta)`` over random unit pairs, first two angles.

    For the second angle the samples are drawn orthogonal to the first pair of
    principal vectors.
    """
    pd = principal_angles(X, Y)
    worst = -np.inf
    for level in range(min(2, X.k)):
        Xs, Ys = pd.left_vectors[:, level:], pd.right_vectors[:, level:]
        M = Xs.conj().T @ Ys
        a = _unit_columns(Xs.shape[1], samples, rng)
        b = _unit_columns(Ys.shape[1], samples, rng)
        vals = np.abs(np.sum(a.conj() * (M @ b), axis=0))
        worst = max(worst, float(vals.max() - np.cos(pd.angles[level])))
    return worst


def _rank_dim(A: Subspace, B: Subspace) -> int:
    return linalg.intersect_spans(A.frame, B.frame).shape[1]


def run_lemma_suite(n, k, seed=0, pairs=20, samples=2000, check_tol=None, angle_tol=ANGLE_TOL):
    rng = np.random.default_rng(seed)
    tol = (lambda t: t) if check_tol is None else (lambda t: check_tol)
    out = []

    rand_pairs = [(random_subspace(n, k, rng), random_subspace(n, k, rng)) for _ in range(pairs)]
    excess = max(sampled_overlap_excess(X, Y, samples, rng) for X, Y in rand_pairs)
    out.append(_record("principal-angles-variational", max(excess, 0.0), tol(1e-9)))

    sym = max(float(np.max(np.abs(angles(X, Y) - angles(Y, X)))) for X, Y in rand_pairs)
    out.append(_record("principal-angles-symmetry", sym, tol(1e-10)))

    inv = 0.0
    for X, Y in rand_pairs:
        U = random_unitary(n, rng)
        inv = max(inv, float(np.max(np.abs(angles(induced_map(U, X), induced_map(U, Y)) - angles(X, Y)))))
    out.append(_record("unitary-invariance", inv, tol(1e-8)))

    mixed = sample_pairs(n, k, 5 * pairs, rng)
    disagree = sum(
        compatible_by_commutator(X, Y) != compatible_by_angles(X, Y, angle_tol) for X, Y in mixed
    )
    out.append(_record("compatibility-tests-agree", disagree, tol(0), pairs=len(mixed)))

    mismatch = sum(intersection_dim(X, Y, angle_tol) != _rank_dim(X, Y) for X, Y in mixed)
    out.append(_record("angle-rank-consistency", mismatch, tol(0), pairs=len(mixed)))

    tp_bad = sum(not (-1e-12 <= transition_probability(X, Y) <= k + 1e-12) for X, Y in mixed)
    out.append(_record("transition-probability-range", tp_bad, tol(0)))

    families = []
    if k + 1 <= n:
        U = random_subspace(n, k + 1, rng)
        members, count = gr.max_compatible_in_clique(gr.CliqueDescriptor("top", U), n, seed=rng)
        out.append(_record("top-compatible-count", abs(count - (k + 1)), tol(0), observed=count, expected=k + 1))
        families.append(members)
    if k >= 2:
        S = random_subspace(n, k - 1, rng)
        members, count = gr.max_compatible_in_clique(gr.CliqueDescriptor("star", S), n, seed=rng)
        out.append(
            _record("star-compatible-count", abs(count - (n - k + 1)), tol(0), observed=count, expected=n - k + 1)
        )
        families.append(members)
    if families:
        bad = sum(
            not is_ortho_adjacent(A, B, angle_tol)
            for fam in families
            for A, B in itertools.combinations(fam, 2)
        )
        out.append(_record("clique-compatible-ortho-adjacent", bad, tol(0)))

    if 2 * k <= n:
        worst_comm, bookkeeping = 0.0, 0
        for _ in range(pairs):
            B = linalg.orthonormalize(complex_gaussian((n, n), rng))
            X, Y = Subspace(B[:, :k]), Subspace(B[:, k : 2 * k])
            path = gr.geodesic_between(X, Y)
            for A, C in itertools.combinations(path, 2):
                worst_comm = max(worst_comm, commutator_norm(A, C))
            i = len(path) - 1
            for j, Xj in enumerate(path[1:], start=1):
                bookkeeping += _rank_dim(X, Xj) != k - j
                bookkeeping += _rank_dim(Y, Xj) != k - i + j
        out.append(_record("geodesic-orthogonal-compatible", worst_comm, tol(1e-8)))
        out.append(_record("geodesic-bookkeeping", bookkeeping, tol(0)))

        worst_orth = 0.0
        for _ in range(pairs):
            B = linalg.orthonormalize(complex_gaussian((n, n), rng))
            while True:
                s1 = sorted(rng.choice(n, size=k, replace=False))
                s2 = sorted(rng.choice(n, size=k, replace=False))
                if s1 != s2:
                    break
            X, Y = Subspace(B[:, s1]), Subspace(B[:, s2])
            Z = gr.geodesic_through_to_orthogonal(X, Y)[-1]
            worst_orth = max(worst_orth, float(np.linalg.norm(X.frame.conj().T @ Z.frame)))
        out.append(_record("geodesic-through-orthogonal", worst_orth, tol(1e-8)))

    apt = gr.orthogonal_apartment(random_unitary(n, rng).matrix, k)
    G = gr.build_graph(apt.members, angle_tol)
    law = 0
    for a in range(len(apt.members)):
        dist = gr.bfs_distances(G, a)
        for b in range(len(apt.members)):
            law += dist.get(b) != k - len(set(apt.subsets[a]) & set(apt.subsets[b]))
    out.append(_record("apartment-distance-law", law, tol(0), vertices=comb(n, k)))

    if n >= 3:
        worst = 0.0
        for _ in range(pairs):
            L = random_isometry(n, rng)
            b = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
            W, b_hat = normalize_to_isometry(L.scaled(b))
            worst = max(worst, float(np.linalg.norm(L.matrix * b - b_hat * W.matrix) / (b * np.sqrt(n))))
        out.append(_record("isometry-normalization", worst, tol(1e-8)))

        accepted = 0
        for j in range(n):
            d = np.ones(n)
            d[j] = 2.0
            try:
                normalize_to_isometry(SemilinearOperator(np.diag(d)))
                accepted += 1
            except NotOrthogonalityPreserving:
                pass
        out.append(_record("isometry-normalization-rejects", accepted, tol(0)))

    worst = 0.0
    for X, Y in rand_pairs:
        L = random_isometry(n, rng)
        worst = max(worst, float(np.max(np.abs(angles(induced_map(L, X), induced_map(L, Y)) - angles(X, Y)))))
    out.append(_record("induced-map-angle-preservation", worst, tol(1e-8)))
    return out
