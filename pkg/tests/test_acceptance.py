"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances."""

import itertools
import time

import numpy as np
import pytest

from grasswigner import graph as gr
from grasswigner import grassmann as g
from grasswigner import linalg
from grasswigner.errors import NotOrthogonalityPreserving
from grasswigner.operators import (
    Endo,
    SemilinearOperator,
    normalize_to_isometry,
    projective_equal,
    random_antiunitary,
    random_isometry,
    random_unitary,
)
from grasswigner.wigner import (
    Direction,
    Relation,
    TransformationOracle,
    check_preservation,
    descent_trace,
    reconstruct_operator,
    sample_pairs,
    wild_map_demo,
)


def unit_samples(frame, count, rng):
    """Uniform random unit vectors in the column span of an orthonormal frame."""
    c = rng.normal(size=(frame.shape[1], count)) + 1j * rng.normal(size=(frame.shape[1], count))
    return frame @ (c / np.linalg.norm(c, axis=0))


def test_criterion_1_principal_angles_variational(acceptance):
    rng = np.random.default_rng(1)
    samples = 10**5
    worst_excess, worst_attain = -np.inf, 0.0
    for n, k in [(6, 2), (8, 3)]:
        for _ in range(100):
            X, Y = g.random_subspace(n, k, rng), g.random_subspace(n, k, rng)
            pd = g.principal_angles(X, Y)
            x1, y1 = pd.left_vectors[:, :1], pd.right_vectors[:, :1]
            # level 1: all of X and Y; level 2: orthogonal to the first principal pair
            levels = [
                (X.frame, Y.frame),
                (linalg.intersect_spans(X.frame, linalg.complement_frame(x1)),
                 linalg.intersect_spans(Y.frame, linalg.complement_frame(y1))),
            ]
            for lvl, (Fx, Fy) in enumerate(levels):
                xs, ys = unit_samples(Fx, samples, rng), unit_samples(Fy, samples, rng)
                overlaps = np.abs(np.sum(xs.conj() * ys, axis=0))
                worst_excess = max(worst_excess, overlaps.max() - np.cos(pd.angles[lvl]))
                attained = abs(np.vdot(pd.left_vectors[:, lvl], pd.right_vectors[:, lvl]))
                worst_attain = max(worst_attain, abs(attained - np.cos(pd.angles[lvl])))
    ok = worst_excess <= 1e-9 and worst_attain <= 1e-8
    acceptance(
        "criterion 1: principal angles variational",
        ok,
        f"max excess {worst_excess:.2e} (tol 1e-9), attainment gap {worst_attain:.1e}",
    )
    assert ok


def test_criterion_2_maximal_compatible_counts(acceptance):
    bad = []
    configs = 0
    for n in range(3, 9):
        for k in range(1, n):
            if not 2 * k < n:
                continue
            seed = 100 * n + k
            top = gr.CliqueDescriptor("top", g.random_subspace(n, k + 1, seed))
            _, count = gr.max_compatible_in_clique(top, n, probes=200, seed=seed)
            configs += 1
            if count != k + 1:
                bad.append(("top", n, k, count))
            if k >= 2:
                star = gr.CliqueDescriptor("star", g.random_subspace(n, k - 1, seed + 1))
                _, count = gr.max_compatible_in_clique(star, n, probes=200, seed=seed)
                configs += 1
                if count != n - k + 1:
                    bad.append(("star", n, k, count))
    ok = not bad
    acceptance("criterion 2: maximal compatible counts in tops and stars", ok, f"{configs} cliques, mismatches {bad}")
    assert ok


def test_criterion_3_geodesics_and_compatibility(acceptance):
    rng = np.random.default_rng(3)
    worst_comm = 0.0
    sizes = [(n, k) for k in (2, 3) for n in range(2 * k + 1, 9)] + [(8, 4)]
    for n, k in sizes:
        for _ in range(50):
            B = random_unitary(n, rng).matrix
            X, Y = g.Subspace(B[:, :k]), g.Subspace(B[:, k : 2 * k])
            path = gr.geodesic_between(X, Y)
            assert len(path) == k + 1
            for A, C in itertools.combinations(path, 2):
                worst_comm = max(worst_comm, g.commutator_norm(A, C))
    worst_orth = 0.0
    for t in range(50):
        n, k = sizes[t % len(sizes)]
        if 2 * k >= n:
            n, k = 7, 3
        B = random_unitary(n, rng).matrix
        s1 = rng.choice(n, size=k, replace=False)
        s2 = rng.choice(n, size=k, replace=False)
        while set(s1) == set(s2):
            s2 = rng.choice(n, size=k, replace=False)
        X, Y = g.Subspace(B[:, np.sort(s1)]), g.Subspace(B[:, np.sort(s2)])
        Z = gr.geodesic_through_to_orthogonal(X, Y)[-1]
        worst_orth = max(worst_orth, float(np.linalg.norm(X.frame.conj().T @ Z.frame)))
    ok = worst_comm <= 1e-8 and worst_orth <= 1e-8
    acceptance(
        "criterion 3: geodesic compatibility and orthogonal endpoint",
        ok,
        f"max commutator {worst_comm:.1e}, max |X^H Z| {worst_orth:.1e} (tol 1e-8), k=4 run at n=8",
    )
    assert ok


def test_criterion_4_distance_law(acceptance):
    mismatches = pairs = 0
    for n in range(2, 9):
        B = random_unitary(n, n).matrix
        for k in range(1, n):
            apt = gr.orthogonal_apartment(B, k)
            G = gr.build_graph(apt.members)
            for a in range(len(apt.members)):
                dist = gr.bfs_distances(G, a)
                for b in range(len(apt.members)):
                    pairs += 1
                    overlap = len(set(apt.subsets[a]) & set(apt.subsets[b]))
                    mismatches += dist.get(b) != k - overlap
    ok = mismatches == 0
    acceptance("criterion 4: BFS distance equals k - dim(A ∩ B) in apartments", ok, f"{pairs} pairs, {mismatches} mismatches")
    assert ok


def test_criterion_5_normalize_to_isometry(acceptance):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 9))
        U = random_isometry(n, rng)
        b = float(10 ** rng.uniform(-3, 3))
        Lp, got = normalize_to_isometry(U.scaled(b))
        resid = np.linalg.norm(U.scaled(b).matrix - got * Lp.matrix) / (b * np.sqrt(n))
        worst = max(worst, resid, 0.0 if Lp.endo is U.endo and Lp.is_isometry() else np.inf)
    rejected = 0
    non_examples = [np.diag([1, 2, 1]), np.diag([1, 1, 1, 3]), np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])]
    for M in non_examples:
        for endo in Endo:
            try:
                normalize_to_isometry(SemilinearOperator(M, endo))
            except NotOrthogonalityPreserving:
                rejected += 1
    ok = worst <= 1e-8 and rejected == 2 * len(non_examples)
    acceptance(
        "criterion 5: normalize_to_isometry",
        ok,
        f"max residual/(b sqrt n) {worst:.1e} (tol 1e-8), rejected {rejected}/{2 * len(non_examples)} non-examples",
    )
    assert ok


def test_criterion_6_operator_maps_preserve_relations(acceptance):
    rng = np.random.default_rng(6)
    n, k = 5, 2
    total_pairs = violations = 0
    ops = [random_unitary(n, rng) for _ in range(25)] + [random_antiunitary(n, rng) for _ in range(25)]
    for L in ops:
        f = TransformationOracle.from_operator(L, k)
        for rel in Relation:
            rep = check_preservation(f, rel, Direction.BOTH, sample_pairs(n, k, 500, rng))
            total_pairs += rep.sampled_pairs
            violations += len(rep.violations)
    ok = violations == 0
    acceptance(
        "criterion 6: induced maps preserve all six relations both ways",
        ok,
        f"50 operators x 6 relations, {total_pairs} pairs, {violations} violations",
    )
    assert ok


def test_criterion_7_reconstruction_round_trip(acceptance):
    rng = np.random.default_rng(7)
    failures = []
    worst_resid = worst_ratio = 0.0
    runs = 0
    t0 = time.perf_counter()
    for n, k in [(5, 2), (7, 2), (7, 3), (9, 4)]:
        for _ in range(50):
            L = random_isometry(n, rng)
            f = TransformationOracle.from_operator(L, k)
            res = reconstruct_operator(f, n, k, validation_budget=20, seed=rng)
            m = projective_equal(res.operator, L)
            runs += 1
            worst_resid = max(worst_resid, m.residual)
            worst_ratio = max(worst_ratio, res.extraction_queries / (4 * n))
            if not (res.certified and res.operator.endo is L.endo and m.residual <= 1e-6
                    and res.extraction_queries <= 4 * n
                    and res.queries_used <= res.extraction_queries + 20):
                failures.append((n, k))
    ok = not failures
    acceptance(
        "criterion 7: reconstruction round trip",
        ok,
        f"{runs} runs, {len(failures)} failures, max projective residual {worst_resid:.1e} (tol 1e-6), "
        f"max extraction/4n {worst_ratio:.2f}, {time.perf_counter() - t0:.1f}s",
    )
    assert ok


def test_criterion_8_wild_map_at_half_dimension(acceptance):
    details = []
    ok = True
    for n, k in [(4, 2), (6, 3)]:
        apt = gr.orthogonal_apartment(random_unitary(n, 80 + n).matrix, k)
        demo = wild_map_demo(apt, seed=n)
        f = demo.oracle()
        # independent exhaustive orthogonality check on the apartment, both directions
        o_bad = sum(
            g.is_orthogonal(A, C) != g.is_orthogonal(f(A), f(C))
            for A, C in itertools.combinations(apt.members, 2)
        )
        label, X, Y, fX, fY = demo.witness
        shown = g.is_adjacent(X, Y) and not g.is_adjacent(f(X), f(Y))
        ok &= o_bad == 0 and demo.orthogonality.verdict and shown
        where = "members" if all(any(g.same_subspace(Z, M) for M in apt.members) for Z in (X, Y)) else "off-apartment probe"
        details.append(f"({n},{k}) ortho violations {o_bad}, adjacency broken via {where}")
    acceptance("criterion 8: wild orthogonality preserver at n = 2k", ok, "; ".join(details))
    assert ok


def test_criterion_9_descent_witness(acceptance):
    n, k = 7, 3
    worst = 0.0
    witnesses = 0
    for endo in Endo:
        L = random_isometry(n, 90, endo)
        trace = descent_trace(TransformationOracle.from_operator(L, k), n, k, stars_per_level=20, seed=9, ground_truth=L)
        witnesses += len(trace)
        assert {w.level for w in trace} == set(range(2, k + 1))
        worst = max(worst, max(w.ground_truth_angle for w in trace))
    ok = worst <= 1e-8
    acceptance("criterion 9: descent star images", ok, f"{witnesses} stars, max core distance {worst:.1e} rad (tol 1e-8)")
    assert ok
