"""Linear and conjugate-linear operators on C^n and the maps they induce.

Only the two continuous field endomorphisms of C are modelled: the identity
and complex conjugation. An operator acts as ``v -> matrix @ sigma(v)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InsufficientAmbient,
    NotOrthogonalityPreserving,
    SingularOperator,
)
from .grassmann import Subspace, _rng, complex_gaussian

ISOMETRY_TOL = 1e-10
WITNESS_TOL = 1e-8


class Endo(str, enum.Enum):
    IDENTITY = "identity"
    CONJUGATION = "conjugation"

    def __call__(self, v):
        return np.conj(v) if self is Endo.CONJUGATION else v


@dataclass(frozen=True, eq=False)
class SemilinearOperator:
    """``matrix`` composed with the field endomorphism ``endo``."""

    matrix: np.ndarray
    endo: Endo = Endo.IDENTITY

    def __post_init__(self):
        M = linalg.as_cmatrix(self.matrix)
        if M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"operator matrix must be square, got {M.shape}")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "endo", Endo(self.endo))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def rank(self) -> int:
        return linalg.numerical_rank(self.matrix)

    def is_isometry(self, tol: float = ISOMETRY_TOL) -> bool:
        return bool(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(self.n)) <= tol)

    def scaled(self, c) -> "SemilinearOperator":
        return SemilinearOperator(c * self.matrix, self.endo)

    def __call__(self, v):
        return apply(self, v)

    def __repr__(self):
        return f"SemilinearOperator(n={self.n}, endo={self.endo.value})"


@dataclass(frozen=True)
class ProjectiveMatch:
    matched: bool
    phase: complex
    residual: float


def apply(L: SemilinearOperator, v) -> np.ndarray:
    """``L.matrix @ sigma(v)``; ``v`` may be a vector or a matrix of columns."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[0] != L.n:
        raise DimensionMismatch(f"vector of length {v.shape[0]} for an operator on C^{L.n}")
    return L.matrix @ L.endo(v)


def induced_map(L: SemilinearOperator, X: Subspace) -> Subspace:
    """The subspace ``L(X)``, orthonormalised."""
    if X.n != L.n:
        raise DimensionMismatch(f"subspace of C^{X.n} for an operator on C^{L.n}")
    if L.rank < L.n:
        raise SingularOperator("operator is not injective")
    return Subspace.span(apply(L, X.frame))


def _haar_matrix(n: int, seed) -> np.ndarray:
    Z = complex_gaussian((n, n), seed)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    # make diag(R) real positive so Q is Haar distributed
    return Q * (d / np.abs(d))


def random_unitary(n: int, seed=None) -> SemilinearOperator:
    """Haar unitary from the QR decomposition of a complex Gaussian matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    return SemilinearOperator(_haar_matrix(n, seed), Endo.IDENTITY)


def random_antiunitary(n: int, seed=None) -> SemilinearOperator:
    """Haar unitary followed by complex conjugation of the argument."""
    if n < 1:
        raise ValueError("n must be positive")
    return SemilinearOperator(_haar_matrix(n, seed), Endo.CONJUGATION)


def random_isometry(n: int, seed=None, endo=None) -> SemilinearOperator:
    """Unitary or anti-unitary; the flag is drawn from ``seed`` when ``endo`` is None."""
    rng = _rng(seed)
    if endo is None:
        endo = Endo.CONJUGATION if rng.integers(2) else Endo.IDENTITY
    return SemilinearOperator(_haar_matrix(n, rng), Endo(endo))


def orthogonality_witnesses(n: int):
    """Orthogonal vector pairs on which an orthogonality preserver is tested.

    The basis pairs ``(e_i, e_j)`` and, for ``i < j``, ``(e_i + e_j, e_i - e_j)``
    and ``(e_i + i e_j, e_i - i e_j)``.
    """
    E = np.eye(n, dtype=np.complex128)
    for i, j in itertools.combinations(range(n), 2):
        yield (i, j, "basis"), E[:, i], E[:, j]
        yield (i, j, "real"), E[:, i] + E[:, j], E[:, i] - E[:, j]
        yield (i, j, "imag"), E[:, i] + 1j * E[:, j], E[:, i] - 1j * E[:, j]


def witness_violations(L: SemilinearOperator, tol: float = WITNESS_TOL) -> list:
    """Witness pairs whose images fail ``|<Lu, Lv>| <= tol ||Lu|| ||Lv||``."""
    bad = []
    for tag, u, v in orthogonality_witnesses(L.n):
        a, b = apply(L, u), apply(L, v)
        scale = np.linalg.norm(a) * np.linalg.norm(b)
        overlap = abs(np.vdot(a, b))
        if overlap > tol * scale:
            bad.append((tag, overlap / scale))
    return bad


def normalize_to_isometry(L: SemilinearOperator, tol: float = WITNESS_TOL):
    """Split an orthogonality-preserving operator as ``L = b * L'`` with ``L'`` isometric.

    Returns ``(L', b)``. ``L'`` is the unitary polar factor of ``L.matrix`` and
    ``b`` the mean singular value; the decomposition is accepted only if
    ``||L - b L'||_F <= tol * b * sqrt(n)``.
    """
    n = L.n
    if n < 3:
        raise InsufficientAmbient("orthogonality preservers are only rigid for n >= 3")
    if L.rank < n:
        raise SingularOperator("operator is not injective")
    bad = witness_violations(L, tol)
    if bad:
        tag, ratio = bad[0]
        raise NotOrthogonalityPreserving(
            f"{len(bad)} witness pair(s) lose orthogonality, first {tag} (cosine {ratio:.3e})"
        )
    res = linalg.svd(L.matrix)
    b = float(np.mean(res.singular_values))
    W = res.U @ res.V.conj().T
    resid = np.linalg.norm(L.matrix - b * W)
    if resid > tol * b * np.sqrt(n):
        raise NotOrthogonalityPreserving(f"not a scaled isometry (residual {resid:.3e})")
    return SemilinearOperator(W, L.endo), b


def canonical_phase(L: SemilinearOperator, tol: float = 1e-12) -> SemilinearOperator:
    """Rescale by a unit scalar so the first non-zero entry of column 0 is real positive."""
    col = L.matrix[:, 0]
    nz = np.flatnonzero(np.abs(col) > tol * max(1.0, np.abs(col).max()))
    if nz.size == 0:
        return L
    z = col[nz[0]]
    return L.scaled(np.conj(z) / abs(z))


def projective_equal(L1: SemilinearOperator, L2: SemilinearOperator, rtol: float = 1e-6):
    """Best unit ``c`` with ``L1 ≈ c L2``; matched iff the residual is at most ``rtol * sqrt(n)``."""
    if L1.n != L2.n:
        raise DimensionMismatch("operators act on different spaces")
    if L1.endo is not L2.endo:
        return ProjectiveMatch(False, 1.0 + 0j, float("inf"))
    t = np.trace(L2.matrix.conj().T @ L1.matrix)
    c = t / abs(t) if abs(t) > 0 else 1.0 + 0j
    resid = float(np.linalg.norm(L1.matrix - c * L2.matrix))
    return ProjectiveMatch(resid <= rtol * np.sqrt(L1.n), complex(c), resid)
