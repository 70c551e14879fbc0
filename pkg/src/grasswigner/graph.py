"""Finite views of the Grassmann graph: stars, tops, apartments, geodesics.

The Grassmann graph of C^n is a continuum, so every operation here acts on an
explicit finite family of vertices.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import linalg
from .errors import (
    DegenerateDirection,
    DimensionMismatch,
    DuplicateVertex,
    InsufficientAmbient,
    InvalidDescriptor,
    MaximalityViolation,
    MixedDimensions,
    NotCompatible,
    NotUnitary,
    Unreachable,
)
from .grassmann import (
    ANGLE_TOL,
    TOL,
    Subspace,
    angles,
    compatible_basis,
    complex_gaussian,
    is_adjacent,
    is_compatible,
    is_orthogonal,
    principal_angles,
    same_subspace,
    _rng,
)


@dataclass(frozen=True)
class GrassmannGraphView:
    vertices: tuple
    edges: tuple
    n: int
    k: int
    adjacency: tuple = field(repr=False, default=())

    def neighbors(self, i: int):
        return self.adjacency[i]

    def __len__(self):
        return len(self.vertices)


def build_graph(vertices, angle_tol: float = ANGLE_TOL) -> GrassmannGraphView:
    """Graph on ``vertices`` whose edges are the adjacent pairs, in input order."""
    vertices = tuple(vertices)
    if not vertices:
        raise ValueError("empty vertex family")
    n, k = vertices[0].n, vertices[0].k
    for v in vertices:
        if (v.n, v.k) != (n, k):
            raise MixedDimensions(f"vertex of shape ({v.n}, {v.k}) in a G_{k}(C^{n}) family")
    edges = []
    adj = [[] for _ in vertices]
    for i, j in itertools.combinations(range(len(vertices)), 2):
        nonzero = int(np.count_nonzero(angles(vertices[i], vertices[j]) > angle_tol))
        if nonzero == 0:
            raise DuplicateVertex(f"vertices {i} and {j} coincide")
        if nonzero == 1:
            edges.append((i, j))
            adj[i].append(j)
            adj[j].append(i)
    return GrassmannGraphView(vertices, tuple(edges), n, k, tuple(tuple(a) for a in adj))


def bfs_distances(G: GrassmannGraphView, source: int) -> dict:
    """Distances from ``source`` to every vertex reachable inside the view."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in G.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def graph_distance(G: GrassmannGraphView, a: int, b: int) -> int:
    for idx in (a, b):
        if not 0 <= idx < len(G.vertices):
            raise IndexError(f"vertex index {idx} out of range")
    dist = bfs_distances(G, a)
    if b not in dist:
        raise Unreachable(f"no path from {a} to {b} inside the view")
    return dist[b]


def geodesic_between(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> list:
    """Geodesic ``X = X_0, ..., X_d = Y`` with ``d = k - dim(X ∩ Y)``.

    Step ``j`` swaps the principal vector ``x_i`` of X for its partner ``y_i``
    in Y, taking the non-zero angles in ascending order.
    """
    if (X.n, X.k) != (Y.n, Y.k):
        raise DimensionMismatch("geodesic endpoints must lie in the same Grassmannian")
    pd = principal_angles(X, Y)
    moving = np.flatnonzero(pd.angles > angle_tol)
    if moving.size == 0:
        raise ValueError("X and Y coincide")
    cols = pd.left_vectors.copy()
    path = [X]
    for i in moving[:-1]:
        cols[:, i] = pd.right_vectors[:, i]
        path.append(Subspace.span(cols))
    path.append(Y)
    return path


def geodesic_through_to_orthogonal(
    X: Subspace, Y: Subspace, tol: float = TOL, angle_tol: float = ANGLE_TOL
) -> list:
    """Geodesic from X through Y to some Z orthogonal to X.

    ``Z`` meets Y exactly in ``(X ∩ Y)^⊥ ∩ Y`` and is completed by directions
    orthogonal to ``X + Y``. The path first turns X into Y inside a common
    orthogonal basis, then trades the common part ``X ∩ Y`` for those new
    directions.
    """
    if (X.n, X.k) != (Y.n, Y.k):
        raise DimensionMismatch("X and Y must lie in the same Grassmannian")
    if 2 * X.k > X.n:
        raise InsufficientAmbient(f"2k = {2 * X.k} exceeds n = {X.n}")
    if same_subspace(X, Y, angle_tol):
        raise ValueError("X and Y coincide")
    if not is_compatible(X, Y, tol):
        raise NotCompatible("X and Y are not compatible")
    basis, x_idx, y_idx = compatible_basis(X, Y, angle_tol)
    k = X.k
    m = len(set(x_idx) & set(y_idx))
    d = k - m
    common = list(range(m))
    x_only = list(range(m, m + d))
    y_only = list(range(m + d, m + 2 * d))
    fresh = list(range(m + 2 * d, m + 2 * d + m))

    path = [X]
    current = common + x_only
    for t in range(d):
        current = [y_only[t] if c == x_only[t] else c for c in current]
        path.append(Y if t == d - 1 else Subspace(basis[:, current]))
    for t in range(m):
        current = [fresh[t] if c == common[t] else c for c in current]
        path.append(Subspace(basis[:, current]))
    Z = path[-1]

    if not is_orthogonal(X, Z, tol):
        raise AssertionError("endpoint is not orthogonal to X")
    ZY = linalg.intersect_spans(Z.frame, Y.frame)
    target = basis[:, y_only]
    if ZY.shape[1] != d or linalg.numerical_rank(np.hstack([ZY, target])) != d:
        raise AssertionError("endpoint does not meet Y in (X ∩ Y)^⊥ ∩ Y")
    for A, B in zip(path, path[1:]):
        if not is_adjacent(A, B, angle_tol):
            raise AssertionError("consecutive path vertices are not adjacent")
    return path


def _check_distinct(members, angle_tol):
    for (i, A), (j, B) in itertools.combinations(enumerate(members), 2):
        if same_subspace(A, B, angle_tol):
            raise DuplicateVertex(f"family members {i} and {j} coincide")


def star_family(S: Subspace, directions, tol: float = TOL, angle_tol: float = ANGLE_TOL) -> list:
    """Members ``S + span(d)`` of the star of k-subspaces containing S (k = dim S + 1)."""
    out = []
    for d in directions:
        d = linalg.as_cmatrix(d)
        if d.shape != (S.n, 1):
            raise DimensionMismatch("direction does not live in the ambient space of S")
        r = d - S.frame @ (S.frame.conj().T @ d)
        norm = np.linalg.norm(r)
        if norm <= tol * max(1.0, np.linalg.norm(d)):
            raise DegenerateDirection("direction lies in S")
        out.append(Subspace(np.hstack([S.frame, r / norm])))
    _check_distinct(out, angle_tol)
    return out


def top_family(U: Subspace, dropped, tol: float = TOL, angle_tol: float = ANGLE_TOL) -> list:
    """Members ``U ∩ d^⊥`` of the top of k-subspaces inside U (k = dim U - 1)."""
    out = []
    for d in dropped:
        d = linalg.as_cmatrix(d)
        if d.shape != (U.n, 1):
            raise DimensionMismatch("vector does not live in the ambient space of U")
        c = U.frame.conj().T @ d
        dn = np.linalg.norm(d)
        if dn == 0.0 or np.linalg.norm(d - U.frame @ c) > tol * dn:
            raise DegenerateDirection("dropped vector is not a non-zero vector of U")
        out.append(Subspace(U.frame @ linalg.complement_frame(c)))
    _check_distinct(out, angle_tol)
    return out


@dataclass(frozen=True)
class OrthogonalApartment:
    """All k-subspaces spanned by k-element subsets of one orthonormal basis."""

    basis: np.ndarray
    k: int
    subsets: tuple
    members: tuple

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    def index_of(self, subset) -> int:
        return self.subsets.index(tuple(sorted(subset)))

    def complement_index(self, i: int) -> int:
        rest = tuple(sorted(set(range(self.n)) - set(self.subsets[i])))
        return self.subsets.index(rest)


def orthogonal_apartment(basis, k: int, tol: float = 1e-10) -> OrthogonalApartment:
    B = linalg.as_cmatrix(basis)
    n = B.shape[0]
    if B.shape != (n, n) or np.linalg.norm(B.conj().T @ B - np.eye(n)) > tol:
        raise NotUnitary("apartment basis must be a unitary matrix")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    subsets = tuple(itertools.combinations(range(n), k))
    members = tuple(Subspace(B[:, list(s)]) for s in subsets)
    assert len(members) == comb(n, k)
    return OrthogonalApartment(B, k, subsets, members)


@dataclass(frozen=True)
class CliqueDescriptor:
    """A star (core of dimension k-1) or a top (core of dimension k+1)."""

    kind: str
    core: Subspace

    def __post_init__(self):
        if self.kind not in ("star", "top"):
            raise InvalidDescriptor(f"unknown clique kind {self.kind!r}")
        if self.kind == "star" and self.core.k + 1 > self.core.n:
            raise InvalidDescriptor("star core must have dimension < n")
        if self.kind == "top" and self.core.k < 2:
            raise InvalidDescriptor("top core must have dimension >= 2")

    @property
    def k(self) -> int:
        return self.core.k + 1 if self.kind == "star" else self.core.k - 1

    def contains(self, X: Subspace, tol: float = TOL) -> bool:
        if X.k != self.k or X.n != self.core.n:
            return False
        if self.kind == "star":
            return all(X.contains(v, tol) for v in self.core.frame.T)
        return all(self.core.contains(v, tol) for v in X.frame.T)

    def random_member(self, rng) -> Subspace:
        n = self.core.n
        if self.kind == "star":
            perp = linalg.complement_frame(self.core.frame)
            d = perp @ complex_gaussian((perp.shape[1], 1), rng)
            return star_family(self.core, [d])[0]
        d = self.core.frame @ complex_gaussian((self.core.k, 1), rng)
        return top_family(self.core, [d])[0]


def _structured_member(clique: CliqueDescriptor, rng) -> Subspace:
    """Clique member built from two basis directions of the maximal family."""
    if clique.kind == "star":
        pool = linalg.complement_frame(clique.core.frame)
    else:
        pool = clique.core.frame
    i, j = rng.choice(pool.shape[1], size=2, replace=False)
    a, b = complex_gaussian(2, rng)
    v = a * pool[:, i] + b * pool[:, j]
    if clique.kind == "star":
        return star_family(clique.core, [v])[0]
    return top_family(clique.core, [v])[0]


def extension_probe(
    clique: CliqueDescriptor, members, probes: int = 200, seed=0, tol: float = TOL
) -> int:
    """Count random clique members that would extend ``members`` compatibly.

    Half the candidates are uniformly random members of the clique, half are
    built from pairs of the family's own basis directions.
    """
    rng = _rng(seed)
    extensions = 0
    for t in range(probes):
        cand = clique.random_member(rng) if t % 2 == 0 else _structured_member(clique, rng)
        if not clique.contains(cand, tol):
            continue
        if any(same_subspace(cand, M) for M in members):
            continue
        if all(is_compatible(cand, M, tol) for M in members):
            extensions += 1
    return extensions


def max_compatible_in_clique(
    clique: CliqueDescriptor, n: int, probes: int = 200, seed=0, tol: float = TOL
):
    """A maximal compatible subset of a star or top, with its size.

    For a top the members drop one vector of an orthonormal basis of the core;
    for a star they add one vector of an orthonormal basis of the core's
    orthocomplement. Maximality is certified by the dimension count (those
    vectors form a complete orthonormal basis) and then probed with
    ``probes`` random extension attempts.
    """
    if clique.core.n != n:
        raise InvalidDescriptor(f"clique lives in C^{clique.core.n}, not C^{n}")
    if clique.kind == "top":
        pool = clique.core.frame
        members = top_family(clique.core, list(pool.T))
        spanned = pool
        expected = clique.core.k
    else:
        pool = linalg.complement_frame(clique.core.frame)
        members = star_family(clique.core, list(pool.T))
        spanned = np.hstack([clique.core.frame, pool])
        expected = n
    if linalg.numerical_rank(spanned) != expected:
        raise AssertionError("directions of the family do not exhaust the clique core")
    found = extension_probe(clique, members, probes, seed, tol)
    if found:
        raise MaximalityViolation(f"{found} probe(s) extended the compatible family")
    return members, len(members)
