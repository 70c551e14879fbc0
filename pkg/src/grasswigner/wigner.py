"""Transformations of G_k(C^n): preservation checks and operator reconstruction.

A transformation is only available as a black box (:class:`TransformationOracle`).
When it comes from a unitary or anti-unitary operator, that operator can be
recovered up to a phase from the action on lines: the image of a line ``P``
is the intersection ``f(P + W) ∩ f(P + W')`` for two transversal complements
``W, W'`` orthogonal to ``P``. Images of ``e_1 + e_j`` fix the relative phases
of the columns and the image of ``e_1 + i e_2`` decides between a linear and a
conjugate-linear operator.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    GrassmannError,
    InsufficientAmbient,
    IntersectionNotALine,
    OracleDimensionError,
    OracleLookupError,
    ReconstructionFailed,
    RetryExhausted,
    StarImageNotInStar,
)
from .graph import OrthogonalApartment, star_family
from .grassmann import (
    ANGLE_TOL,
    TOL,
    Subspace,
    _rng,
    angles,
    complex_gaussian,
    is_adjacent,
    is_compatible,
    is_ortho_adjacent,
    is_orthogonal,
    max_angle,
    orthocomplement,
    random_subspace,
    same_subspace,
    transition_probability,
)
from .operators import (
    Endo,
    SemilinearOperator,
    canonical_phase,
    induced_map,
    normalize_to_isometry,
)

SPECTRUM_TOL = 1e-7
VALIDATION_TOL = 1e-6
ENDO_TOL = 1e-6


class TransformationOracle:
    """Black-box map ``G_k(C^n) -> G_k(C^n)`` with a query counter.

    ``domain`` lists the inputs of a finite pairing table; it is ``None`` for
    maps defined on the whole Grassmannian.
    """

    def __init__(self, fn, n: int, k: int, pure: bool = True, domain=None, record: bool = False):
        self._fn = fn
        self.n = n
        self.k = k
        self.pure = pure
        self.domain = domain
        self.queries = 0
        self.record = record
        self.log = []

    def __call__(self, X: Subspace) -> Subspace:
        if (X.n, X.k) != (self.n, self.k):
            raise DimensionMismatch(f"oracle on G_{self.k}(C^{self.n}) queried with ({X.n}, {X.k})")
        self.queries += 1
        Y = self._fn(X)
        if not isinstance(Y, Subspace) or (Y.n, Y.k) != (self.n, self.k):
            raise OracleDimensionError("oracle returned a subspace of the wrong shape")
        if self.record:
            self.log.append((X, Y))
        return Y

    def reset(self):
        self.queries = 0
        self.log = []

    @classmethod
    def from_operator(cls, L: SemilinearOperator, k: int, **kw) -> "TransformationOracle":
        return cls(lambda X: induced_map(L, X), L.n, k, **kw)

    @classmethod
    def from_table(cls, entries, angle_tol: float = ANGLE_TOL, default=None) -> "TransformationOracle":
        """Map given by ``(input, output)`` pairs.

        Unknown inputs go to ``default`` when given, otherwise they raise
        ``OracleLookupError``. With a default the map is total, so ``domain``
        is left as None.
        """
        entries = list(entries)
        if not entries:
            raise ValueError("empty pairing table")
        n, k = entries[0][0].n, entries[0][0].k
        ids = {id(a): b for a, b in entries}

        def lookup(X):
            hit = ids.get(id(X))
            if hit is not None:
                return hit
            for a, b in entries:
                if same_subspace(a, X, angle_tol):
                    return b
            if default is not None:
                return default(X)
            raise OracleLookupError("subspace not in the pairing table")

        return cls(lookup, n, k, domain=None if default else [a for a, _ in entries])


def orthocomplement_composition(f: TransformationOracle) -> TransformationOracle:
    """``X -> f(X)^⊥`` at ``n = 2k``, where it stays inside G_k."""
    if f.n != 2 * f.k:
        raise InsufficientAmbient("orthocomplement composition needs n = 2k")
    return TransformationOracle(lambda X: orthocomplement(f(X)), f.n, f.k, pure=f.pure)


def hashed_random_oracle(n: int, k: int, seed=0) -> TransformationOracle:
    """A map assigning an unrelated random subspace to every input.

    The output depends only on the projector of the input (rounded), so the
    map is well defined on subspaces, yet it is not induced by any operator.
    """

    def fn(X):
        P = np.round(X.projector, 6) + 0.0
        h = hashlib.sha256(P.tobytes() + str(seed).encode()).digest()
        return random_subspace(n, k, int.from_bytes(h[:8], "little"))

    return TransformationOracle(fn, n, k)


class Relation(str, enum.Enum):
    ORTHOGONALITY = "orthogonality"
    ADJACENCY = "adjacency"
    ORTHO_ADJACENCY = "ortho_adjacency"
    COMPATIBILITY = "compatibility"
    ALL_PRINCIPAL_ANGLES = "all_principal_angles"
    TRANSITION_PROBABILITY = "transition_probability"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BOTH = "both"


@dataclass
class PreservationReport:
    relation: Relation
    direction: Direction
    sampled_pairs: int
    violations: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "direction": self.direction.value,
            "sampled_pairs": self.sampled_pairs,
            "violations": [{"pair": list(p), "detail": d} for p, d in self.violations],
            "verdict": self.verdict,
        }


def _predicate(relation: Relation, tol: float, angle_tol: float):
    return {
        Relation.ORTHOGONALITY: lambda X, Y: is_orthogonal(X, Y, tol),
        Relation.ADJACENCY: lambda X, Y: is_adjacent(X, Y, angle_tol),
        Relation.ORTHO_ADJACENCY: lambda X, Y: is_ortho_adjacent(X, Y, angle_tol),
        Relation.COMPATIBILITY: lambda X, Y: is_compatible(X, Y, tol),
    }[relation]


def check_preservation(
    f: TransformationOracle,
    relation,
    direction,
    pairs,
    tol: float = TOL,
    angle_tol: float = ANGLE_TOL,
    spectrum_tol: float = SPECTRUM_TOL,
) -> PreservationReport:
    """Evaluate ``relation`` on every pair and on its image under ``f``.

    Boolean relations are checked as ``xRy => f(x)Rf(y)`` (forward) or
    ``xRy <=> f(x)Rf(y)`` (both). The two numeric relations require the
    value to be reproduced within ``spectrum_tol`` in either mode.
    ``pairs`` may hold ``(X, Y)`` tuples or ``(i, j, X, Y)`` with labels.
    """
    relation, direction = Relation(relation), Direction(direction)
    report = PreservationReport(relation, direction, 0)
    for idx, item in enumerate(pairs):
        label, (X, Y) = ((item[0], item[1]), item[2:]) if len(item) == 4 else ((idx,), item)
        if (X.n, X.k) != (f.n, f.k) or (Y.n, Y.k) != (f.n, f.k):
            raise DimensionMismatch("pair does not live in the oracle's Grassmannian")
        fX, fY = f(X), f(Y)
        report.sampled_pairs += 1
        if relation is Relation.ALL_PRINCIPAL_ANGLES:
            gap = float(np.max(np.abs(angles(X, Y) - angles(fX, fY))))
            if gap > spectrum_tol:
                report.violations.append((label, f"angle spectra differ by {gap:.3e}"))
            continue
        if relation is Relation.TRANSITION_PROBABILITY:
            gap = abs(transition_probability(X, Y) - transition_probability(fX, fY))
            if gap > spectrum_tol:
                report.violations.append((label, f"transition probabilities differ by {gap:.3e}"))
            continue
        R = _predicate(relation, tol, angle_tol)
        before, after = R(X, Y), R(fX, fY)
        if before and not after:
            report.violations.append((label, "related pair maps to an unrelated pair"))
        elif direction is Direction.BOTH and after and not before:
            report.violations.append((label, "unrelated pair maps to a related pair"))
    return report


def sample_pairs(n: int, k: int, count: int, seed=0) -> list:
    """Pairs of k-subspaces cycling through constructed relation types.

    Random pairs alone are almost never related, so the sample rotates
    through random, orthogonal, adjacent, ortho-adjacent and compatible
    pairs (skipping kinds the dimensions do not allow).
    """
    rng = _rng(seed)
    kinds = ["random"]
    if 2 * k <= n:
        kinds.append("orthogonal")
    if k < n:
        kinds += ["adjacent", "ortho_adjacent", "compatible"]
    out = []
    for t in range(count):
        kind = kinds[t % len(kinds)]
        if kind == "random":
            out.append((random_subspace(n, k, rng), random_subspace(n, k, rng)))
            continue
        B = linalg.orthonormalize(complex_gaussian((n, n), rng))
        if kind == "orthogonal":
            out.append((Subspace(B[:, :k]), Subspace(B[:, k : 2 * k])))
        elif kind in ("adjacent", "ortho_adjacent"):
            a = np.pi / 2 if kind == "ortho_adjacent" else rng.uniform(0.1, np.pi / 2 - 0.1)
            v = np.cos(a) * B[:, k - 1] + np.sin(a) * B[:, k]
            Y = Subspace(np.column_stack([B[:, : k - 1], v]))
            out.append((Subspace(B[:, :k]), Y))
        else:
            while True:
                s1 = rng.choice(n, size=k, replace=False)
                s2 = rng.choice(n, size=k, replace=False)
                if set(s1) != set(s2):
                    break
            out.append((Subspace(B[:, np.sort(s1)]), Subspace(B[:, np.sort(s2)])))
    return out


def _line(F1: Subspace, F2: Subspace) -> np.ndarray:
    common = linalg.intersect_spans(F1.frame, F2.frame)
    if common.shape[1] != 1:
        raise IntersectionNotALine(common.shape[1])
    return common[:, 0]


def _complement_directions(p: np.ndarray, count: int) -> np.ndarray:
    """First ``count`` vectors of Gram-Schmidt on ``e_1, e_2, ...`` against ``p``."""
    n = p.shape[0]
    basis = [p / np.linalg.norm(p)]
    for i in range(n):
        if len(basis) == count + 1:
            break
        v = np.zeros(n, dtype=np.complex128)
        v[i] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            basis.append(v / norm)
    return np.column_stack(basis[1:])


def extract_line_map(f: TransformationOracle, P: Subspace, seed=None) -> Subspace:
    """Image of the line P under the line map underlying ``f``.

    Takes ``X = P + W`` and ``X' = P + W'`` with ``W, W'`` of dimension k-1,
    orthogonal to P and to each other, and returns ``f(X) ∩ f(X')``.
    """
    n, k = f.n, f.k
    if P.k != 1 or P.n != n:
        raise DimensionMismatch("P must be a line of the oracle's ambient space")
    if 2 * k >= n:
        raise InsufficientAmbient(f"line extraction needs n > 2k, got n={n}, k={k}")
    p = P.frame[:, 0]
    D = _complement_directions(p, 2 * (k - 1))
    if D.shape[1] < 2 * (k - 1) or linalg.numerical_rank(np.column_stack([p, D])) < 2 * k - 1:
        D = linalg.orthonormalize(
            linalg.complement_frame(P.frame) @ complex_gaussian((n - 1, 2 * (k - 1)), seed)
        )
    W, W2 = D[:, : k - 1], D[:, k - 1 :]
    X = Subspace(np.column_stack([p, W]))
    X2 = Subspace(np.column_stack([p, W2]))
    return Subspace(_line(f(X), f(X2))[:, None])


@dataclass
class ReconstructionResult:
    operator: SemilinearOperator
    certified: bool
    max_residual: float
    queries_used: int
    extraction_queries: int
    validations: int


def _standard_rays(f: TransformationOracle) -> list:
    """Unit vectors spanning ``f_1(span e_j)`` for every j, from n queries.

    Cyclic blocks ``B_t = {t, ..., t+k-1}`` (mod n) meet pairwise in single
    indices: ``B_{j-k+1} ∩ B_j = {j}`` whenever ``n > 2k - 2``.
    """
    n, k = f.n, f.k
    E = np.eye(n, dtype=np.complex128)
    images = [f(Subspace(E[:, [(t + s) % n for s in range(k)]])) for t in range(n)]
    return [_line(images[(j - k + 1) % n], images[j]) for j in range(n)]


def _ray_in_plane(f: TransformationOracle, w: np.ndarray, i: int, j: int, plane: np.ndarray):
    """Coefficients of ``f_1(span w)`` in the basis ``plane`` = (v_i, v_j).

    ``w`` lies in ``span(e_i, e_j)``; it is padded with k-1 further standard
    vectors and the image is cut with the known image plane of ``span(e_i, e_j)``.
    """
    n, k = f.n, f.k
    others = [a for a in range(n) if a not in (i, j)][: k - 1]
    cols = np.column_stack([w] + [np.eye(n, dtype=np.complex128)[:, a] for a in others])
    F = f(Subspace.span(cols))
    common = linalg.intersect_spans(F.frame, linalg.orthonormalize(plane))
    if common.shape[1] != 1:
        raise IntersectionNotALine(common.shape[1])
    coef, *_ = np.linalg.lstsq(plane, common[:, 0], rcond=None)
    return coef


def reconstruct_operator(
    f: TransformationOracle,
    n: int,
    k: int,
    validation_budget: int = 20,
    seed=0,
    half_dimension: bool = False,
) -> ReconstructionResult:
    """Recover the (anti-)unitary operator inducing ``f``, up to a phase.

    Requires ``n > 2k > 2``. ``half_dimension=True`` also admits ``n = 2k``
    for maps known to preserve adjacency in both directions with stars going
    to stars (compose with :func:`orthocomplement_composition` first when
    stars go to tops).

    Raises ``ReconstructionFailed`` tagged with the failing stage; a map that
    survives every stage but disagrees with the recovered operator on the
    validation sample is returned with ``certified=False``.
    """
    if (f.n, f.k) != (n, k):
        raise DimensionMismatch("oracle shape does not match (n, k)")
    if not 2 * k > 2:
        raise InsufficientAmbient("reconstruction needs k >= 2")
    if not (n > 2 * k or (half_dimension and n == 2 * k)):
        raise InsufficientAmbient(f"reconstruction needs n > 2k, got n={n}, k={k}")
    start = f.queries
    E = np.eye(n, dtype=np.complex128)

    try:
        rays = _standard_rays(f)
    except (IntersectionNotALine, OracleLookupError) as exc:
        raise ReconstructionFailed("line-extraction", str(exc)) from exc
    v1 = rays[0]
    lead = v1[np.flatnonzero(np.abs(v1) > 1e-12)[0]]
    v1 = v1 * (np.conj(lead) / abs(lead))
    cols = [v1]
    try:
        for j in range(1, n):
            plane = np.column_stack([v1, rays[j]])
            a, b = _ray_in_plane(f, E[:, 0] + E[:, j], 0, j, plane)
            if min(abs(a), abs(b)) < 1e-8 * max(abs(a), abs(b)):
                raise ReconstructionFailed("normalization", f"degenerate image of e_1 + e_{j + 1}")
            cols.append(rays[j] * (b / a))
        ratios = []
        for j in range(1, n):
            a, b = _ray_in_plane(f, E[:, 0] + 1j * E[:, j], 0, j, np.column_stack([v1, cols[j]]))
            ratios.append(b / a)
    except (IntersectionNotALine, OracleLookupError) as exc:
        raise ReconstructionFailed("line-extraction", str(exc)) from exc

    def decide(r):
        if abs(r - 1j) <= ENDO_TOL:
            return Endo.IDENTITY
        if abs(r + 1j) <= ENDO_TOL:
            return Endo.CONJUGATION
        return None

    endo = decide(ratios[0])
    if endo is None or any(decide(r) is not endo for r in ratios[1:]):
        raise ReconstructionFailed("endo-decision ambiguous", f"phase ratios {np.round(ratios, 6)}")
    extraction = f.queries - start

    try:
        L, _ = normalize_to_isometry(SemilinearOperator(np.column_stack(cols), endo))
    except GrassmannError as exc:
        raise ReconstructionFailed("normalization", str(exc)) from exc
    L = canonical_phase(L)

    rng = _rng(seed)
    if f.domain is not None:
        pick = rng.permutation(len(f.domain))[:validation_budget]
        sample = [f.domain[i] for i in pick]
    else:
        sample = [random_subspace(n, k, rng) for _ in range(validation_budget)]
    worst = 0.0
    try:
        for V in sample:
            worst = max(worst, max_angle(f(V), induced_map(L, V)))
    except OracleLookupError as exc:
        raise ReconstructionFailed("validation", str(exc)) from exc
    return ReconstructionResult(
        operator=L,
        certified=worst <= VALIDATION_TOL,
        max_residual=worst,
        queries_used=f.queries - start,
        extraction_queries=extraction,
        validations=len(sample),
    )


@dataclass
class DescentWitness:
    level: int
    core: Subspace
    image_core: Subspace
    members: int
    image_span_dim: int
    ground_truth_angle: float | None = None


def descent_trace(
    f: TransformationOracle,
    n: int,
    k: int,
    stars_per_level: int = 20,
    seed=0,
    ground_truth: SemilinearOperator | None = None,
    angle_tol: float = ANGLE_TOL,
) -> list:
    """Check, level by level, that the images of a star lie in a single star.

    The level-i map is obtained from level i+1 by intersecting the images of
    two members of the star ``[Y>_{i+1}``. At each level ``i = k, ..., 2``
    random stars with a maximal compatible family of members are mapped and
    the common part of the images must be an (i-1)-subspace; it is the image
    of the star's core. With ``ground_truth`` the angle between that core and
    the operator's image of the original core is recorded.
    """
    if (f.n, f.k) != (n, k):
        raise DimensionMismatch("oracle shape does not match (n, k)")
    if not (n > 2 * k and k > 1):
        raise InsufficientAmbient(f"descent needs n > 2k > 2, got n={n}, k={k}")
    rng = _rng(seed)

    def level_map(i, Y):
        if i == k:
            return f(Y)
        extra = linalg.complement_frame(Y.frame)[:, :2]
        A = level_map(i + 1, Subspace(np.column_stack([Y.frame, extra[:, 0]])))
        B = level_map(i + 1, Subspace(np.column_stack([Y.frame, extra[:, 1]])))
        common = linalg.intersect_spans(A.frame, B.frame)
        if common.shape[1] != i:
            raise StarImageNotInStar(f"level-{i + 1} images of a star share {common.shape[1]} dims")
        return Subspace(common)

    trace = []
    for level in range(k, 1, -1):
        for _ in range(stars_per_level):
            S = random_subspace(n, level - 1, rng)
            directions = list(linalg.complement_frame(S.frame).T)
            images = [level_map(level, M) for M in star_family(S, directions)]
            common = images[0].frame
            for img in images[1:]:
                common = linalg.intersect_spans(common, img.frame)
            if common.shape[1] != level - 1:
                raise StarImageNotInStar(
                    f"level {level}: images share {common.shape[1]} dims, expected {level - 1}"
                )
            span_dim = linalg.numerical_rank(np.hstack([img.frame for img in images]))
            core = Subspace(common)
            gt = None
            if ground_truth is not None:
                gt = max_angle(core, induced_map(ground_truth, S))
            trace.append(DescentWitness(level, S, core, len(images), span_dim, gt))
    return trace


@dataclass
class WildMapDemo:
    """A wild map: pairing table on the apartment members, identity elsewhere."""

    apartment: OrthogonalApartment
    table: list
    orthogonality: PreservationReport
    adjacency: PreservationReport
    draws: int
    witness: tuple | None = None

    def oracle(self) -> TransformationOracle:
        return _wild_oracle(self.apartment, self.table)


def _wild_oracle(apartment: OrthogonalApartment, table) -> TransformationOracle:
    members = apartment.members
    entries = [(members[i], members[table[i]]) for i in range(len(members))]
    return TransformationOracle.from_table(entries, default=lambda X: X)


def _off_apartment_probes(apartment: OrthogonalApartment, table):
    """Pairs (member, non-member adjacent to it) around members that move.

    The non-member rotates one basis vector ``b_i`` of the member by pi/4
    towards a basis vector ``b_j`` outside it.
    """
    B, n = apartment.basis, apartment.n
    for a, subset in enumerate(apartment.subsets):
        if table[a] == a:
            continue
        for i in subset:
            for j in sorted(set(range(n)) - set(subset)):
                v = (B[:, i] + B[:, j]) / np.sqrt(2)
                cols = [B[:, c] if c != i else v for c in subset]
                yield subset, f"rotate b{i} toward b{j}", apartment.members[a], Subspace(np.column_stack(cols))


def wild_map_demo(apartment: OrthogonalApartment, seed=0, max_draws: int = 20) -> WildMapDemo:
    """Orthogonality-preserving bijection at ``n = 2k`` not induced by an operator.

    Members of the apartment are grouped into complementary pairs
    ``{A, A^⊥}``; at n = 2k the complement is the only k-subspace orthogonal
    to A. The pairs are permuted by a random non-identity permutation with a
    random orientation inside each pair, and every subspace outside the
    apartment is fixed. This preserves orthogonality in both directions on
    all of G_k(C^n). Draws are repeated until the map breaks adjacency, which
    no operator-induced map can do: first among apartment members
    (exhaustively), then between moved members and adjacent subspaces
    outside the apartment. At (n, k) = (4, 2) only the latter can succeed,
    since there any two non-complementary members are adjacent.
    """
    n, k = apartment.n, apartment.k
    if n != 2 * k:
        raise InsufficientAmbient(f"wild maps live at n = 2k, got n={n}, k={k}")
    m = len(apartment.members)
    pairs = sorted({tuple(sorted((i, apartment.complement_index(i)))) for i in range(m)})
    if len(pairs) < 2:
        raise RetryExhausted("a single complementary pair admits no non-identity permutation")
    rng = _rng(seed)
    members = apartment.members
    labelled = [
        (apartment.subsets[i], apartment.subsets[j], members[i], members[j])
        for i, j in itertools.combinations(range(m), 2)
    ]
    for draw in range(1, max_draws + 1):
        perm = rng.permutation(len(pairs))
        while np.all(perm == np.arange(len(pairs))):
            perm = rng.permutation(len(pairs))
        flips = rng.integers(2, size=len(pairs))
        table = [0] * m
        for p, (a, b) in enumerate(pairs):
            ta, tb = pairs[perm[p]]
            if flips[p]:
                ta, tb = tb, ta
            table[a], table[b] = ta, tb
        oracle = _wild_oracle(apartment, table)
        ortho = check_preservation(oracle, Relation.ORTHOGONALITY, Direction.BOTH, labelled)
        adj = check_preservation(oracle, Relation.ADJACENCY, Direction.FORWARD, labelled)
        probes = []
        if adj.verdict:
            probes = list(_off_apartment_probes(apartment, table))
            extra_o = check_preservation(oracle, Relation.ORTHOGONALITY, Direction.BOTH, probes)
            extra_a = check_preservation(oracle, Relation.ADJACENCY, Direction.FORWARD, probes)
            ortho.sampled_pairs += extra_o.sampled_pairs
            ortho.violations += extra_o.violations
            adj.sampled_pairs += extra_a.sampled_pairs
            adj.violations += extra_a.violations
        if not adj.verdict:
            label = adj.violations[0][0]
            for item in labelled + probes:
                if (item[0], item[1]) == label:
                    X, Y = item[2], item[3]
                    witness = (label, X, Y, oracle(X), oracle(Y))
                    break
            return WildMapDemo(apartment, table, ortho, adj, draw, witness)
    raise RetryExhausted(f"no adjacency violation in {max_draws} draws at n={n}, k={k}")
