"""Subspaces of C^n, principal angles and the binary relations built on them.

Two tolerances are used throughout:

* ``tol`` (default ``1e-8``) for norm tests such as ``||X^H Y||_F`` and
  ``||[P_X, P_Y]||_F``;
* ``angle_tol`` (default ``1e-7`` rad) for deciding that a principal angle is
  ``0`` or ``pi/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidDimension, NotCompatible

TOL = 1e-8
ANGLE_TOL = 1e-7
FRAME_TOL = 1e-10

HALF_PI = np.pi / 2


@dataclass(frozen=True, eq=False)
class Subspace:
    """A k-dimensional subspace of C^n held by an orthonormal ``(n, k)`` frame.

    Two instances describe the same subspace when their distance is 0; frames
    are only coset representatives, so never compare them directly.
    """

    frame: np.ndarray

    def __post_init__(self):
        F = linalg.as_cmatrix(self.frame)
        n, k = F.shape
        if not 1 <= k <= n:
            raise InvalidDimension(f"need 1 <= k <= n, got n={n}, k={k}")
        err = np.linalg.norm(F.conj().T @ F - np.eye(k))
        if err > FRAME_TOL:
            raise ValueError(f"frame is not orthonormal (defect {err:.2e})")
        F = F.copy()
        F.setflags(write=False)
        object.__setattr__(self, "frame", F)

    @classmethod
    def span(cls, vectors, tol: float | None = None) -> "Subspace":
        """Subspace spanned by the columns of ``vectors`` (must be independent)."""
        return cls(linalg.orthonormalize(vectors, tol))

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def k(self) -> int:
        return self.frame.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def contains(self, v, tol: float = TOL) -> bool:
        v = linalg.as_cmatrix(v)
        resid = v - self.frame @ (self.frame.conj().T @ v)
        return bool(np.linalg.norm(resid) <= tol * max(1.0, np.linalg.norm(v)))

    def __repr__(self):
        return f"Subspace(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class PrincipalDecomposition:
    """Ascending principal angles with paired principal vectors as columns."""

    angles: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray


@dataclass(frozen=True)
class RelationReport:
    orthogonal: bool
    adjacent: bool
    ortho_adjacent: bool
    compatible: bool
    intersection_dim: int
    distance: int


def standard_subspace(n: int, indices) -> Subspace:
    """Span of the standard basis vectors ``e_i`` for ``i`` in ``indices`` (0-based)."""
    return Subspace(np.eye(n, dtype=np.complex128)[:, list(indices)])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(shape, seed) -> np.ndarray:
    """Standard complex Gaussian entries (real and imaginary variance 1/2)."""
    rng = _rng(seed)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_subspace(n: int, k: int, seed=None) -> Subspace:
    """Rotation-invariant random k-subspace of C^n.

    ``seed`` may be an integer or a ``numpy.random.Generator``; an integer
    seed fully determines the frame.
    """
    if not (isinstance(n, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise InvalidDimension("n and k must be integers")
    if not 1 <= k <= n:
        raise InvalidDimension(f"need 1 <= k <= n, got n={n}, k={k}")
    return Subspace(linalg.orthonormalize(complex_gaussian((n, k), seed)))


def _check_ambient(X: Subspace, Y: Subspace):
    if X.n != Y.n:
        raise DimensionMismatch(f"ambient dimensions differ: {X.n} vs {Y.n}")


def _check_same(X: Subspace, Y: Subspace):
    _check_ambient(X, Y)
    if X.k != Y.k:
        raise DimensionMismatch(f"subspace dimensions differ: {X.k} vs {Y.k}")


def _angle_spectrum(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Ascending principal angles between span(A) and span(B), ``A`` the smaller.

    Angles below pi/4 come from the sines (singular values of ``(I - P_B) A``),
    the rest from the cosines, so small angles are not lost to arccos
    cancellation.
    """
    cos = np.clip(linalg.svd(A.conj().T @ B).singular_values, 0.0, 1.0)
    sin = np.clip(linalg.svd(A - B @ (B.conj().T @ A)).singular_values[::-1], 0.0, 1.0)
    small = cos > np.sqrt(0.5)
    return np.where(small, np.arcsin(sin), np.arccos(cos))


def angles(X: Subspace, Y: Subspace) -> np.ndarray:
    """Ascending principal angles; dimensions may differ (``min(kx, ky)`` values)."""
    _check_ambient(X, Y)
    A, B = (X.frame, Y.frame) if X.k <= Y.k else (Y.frame, X.frame)
    return _angle_spectrum(A, B)


def principal_angles(X: Subspace, Y: Subspace) -> PrincipalDecomposition:
    """Principal angles and vectors of two k-subspaces.

    With ``X^H Y = U diag(s) V^H`` the left vectors are ``X U``, the right
    vectors ``Y V`` and ``<x_i, y_i> = s_i`` is real and non-negative.
    """
    _check_same(X, Y)
    res = linalg.svd(X.frame.conj().T @ Y.frame)
    left = X.frame @ res.U
    right = Y.frame @ res.V
    return PrincipalDecomposition(_angle_spectrum(X.frame, Y.frame), left, right)


def transition_probability(X: Subspace, Y: Subspace) -> float:
    """Sum of squared cosines of the principal angles."""
    _check_same(X, Y)
    return float(np.linalg.norm(X.frame.conj().T @ Y.frame) ** 2)


def is_orthogonal(X: Subspace, Y: Subspace, tol: float = TOL) -> bool:
    _check_same(X, Y)
    return bool(np.linalg.norm(X.frame.conj().T @ Y.frame) <= tol)


def intersection_dim(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> int:
    return int(np.count_nonzero(angles(X, Y) <= angle_tol))


def distance(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> int:
    """Grassmann graph distance ``k - dim(X ∩ Y)``."""
    _check_same(X, Y)
    return X.k - intersection_dim(X, Y, angle_tol)


def same_subspace(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> bool:
    if X.n != Y.n or X.k != Y.k:
        return False
    return bool(angles(X, Y)[-1] <= angle_tol)


def max_angle(X: Subspace, Y: Subspace) -> float:
    _check_same(X, Y)
    return float(angles(X, Y)[-1])


def is_adjacent(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> bool:
    """Exactly one principal angle is non-zero, i.e. ``dim(X ∩ Y) = k - 1``."""
    _check_same(X, Y)
    return int(np.count_nonzero(angles(X, Y) > angle_tol)) == 1


def is_ortho_adjacent(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> bool:
    """Adjacent, and the single non-zero angle is pi/2."""
    _check_same(X, Y)
    th = angles(X, Y)
    return int(np.count_nonzero(th > angle_tol)) == 1 and th[-1] >= HALF_PI - angle_tol


def commutator_norm(X: Subspace, Y: Subspace) -> float:
    _check_ambient(X, Y)
    PX, PY = X.projector, Y.projector
    return float(np.linalg.norm(PX @ PY - PY @ PX))


def compatible_by_commutator(X: Subspace, Y: Subspace, tol: float = TOL) -> bool:
    return commutator_norm(X, Y) <= tol


def compatible_by_angles(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL) -> bool:
    th = angles(X, Y)
    return bool(np.all((th <= angle_tol) | (th >= HALF_PI - angle_tol)))


def is_compatible(X: Subspace, Y: Subspace, tol: float = TOL) -> bool:
    """Orthogonal projections onto X and Y commute (dimensions may differ).

    Equivalent to every principal angle being 0 or pi/2; see
    :func:`compatible_by_angles` for that test.
    """
    return compatible_by_commutator(X, Y, tol)


def orthocomplement(X: Subspace) -> Subspace:
    if X.k >= X.n:
        raise InvalidDimension("the whole space has no proper orthocomplement")
    return Subspace(linalg.complement_frame(X.frame))


def relation_report(
    X: Subspace, Y: Subspace, tol: float = TOL, angle_tol: float = ANGLE_TOL
) -> RelationReport:
    _check_same(X, Y)
    th = angles(X, Y)
    nonzero = int(np.count_nonzero(th > angle_tol))
    adjacent = nonzero == 1
    return RelationReport(
        orthogonal=is_orthogonal(X, Y, tol),
        adjacent=adjacent,
        ortho_adjacent=adjacent and bool(th[-1] >= HALF_PI - angle_tol),
        compatible=compatible_by_commutator(X, Y, tol),
        intersection_dim=X.k - nonzero,
        distance=nonzero,
    )


def compatible_basis(X: Subspace, Y: Subspace, angle_tol: float = ANGLE_TOL):
    """Orthonormal basis of C^n in which both X and Y are coordinate subspaces.

    Returns ``(basis, x_idx, y_idx)``. Principal vectors at angle 0 give the
    common part, those at pi/2 split into the private parts of X and Y, and
    the orthocomplement of X + Y fills up the rest.
    """
    _check_same(X, Y)
    if not compatible_by_angles(X, Y, angle_tol):
        raise NotCompatible("subspaces are not compatible")
    pd = principal_angles(X, Y)
    shared = pd.angles <= angle_tol
    common = pd.left_vectors[:, shared]
    x_only = pd.left_vectors[:, ~shared]
    y_only = pd.right_vectors[:, ~shared]
    used = np.hstack([common, x_only, y_only])
    rest = linalg.complement_frame(used)
    basis = np.hstack([used, rest])
    m, d = common.shape[1], x_only.shape[1]
    x_idx = list(range(m)) + list(range(m, m + d))
    y_idx = list(range(m)) + list(range(m + d, m + 2 * d))
    return basis, x_idx, y_idx
