"""Dense complex linear-algebra kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; a subspace frame is
an ``(n, k)`` array whose columns are orthonormal. Every rank decision goes
through :func:`numerical_rank` so that a single relative tolerance governs all
of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, RankDeficient

# relative to the largest singular value
RANK_RTOL = 1e-8

CMatrix = np.ndarray


def as_cmatrix(A) -> CMatrix:
    """Coerce ``A`` to a 2-D ``complex128`` array (vectors become columns)."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got an array with {M.ndim} dims")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = U @ diag(singular_values) @ V.conj().T``."""

    U: CMatrix
    singular_values: np.ndarray
    V: CMatrix

    def reconstruct(self) -> CMatrix:
        return (self.U * self.singular_values) @ self.V.conj().T


def svd(A, full_matrices: bool = False) -> SvdResult:
    """Singular value decomposition with descending singular values.

    Backed by LAPACK's divide-and-conquer driver. ``NoConvergence`` is raised
    when LAPACK reports that the iteration did not converge.
    """
    M = as_cmatrix(A)
    if M.size == 0:
        raise ValueError("svd of an empty matrix")
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return SvdResult(U, s, Vh.conj().T)


def _rank_tol(s: np.ndarray, tol: float | None) -> float:
    if tol is not None:
        if tol < 0:
            raise ValueError("tol must be non-negative")
        return tol
    return RANK_RTOL * (s[0] if s.size else 0.0)


def numerical_rank(A, tol: float | None = None) -> int:
    """Number of singular values strictly above ``tol``.

    The default tolerance is ``1e-8`` times the largest singular value.
    """
    M = as_cmatrix(A)
    if M.size == 0:
        return 0
    s = svd(M).singular_values
    return int(np.count_nonzero(s > _rank_tol(s, tol)))


def orthonormalize(A, tol: float | None = None) -> CMatrix:
    """Orthonormal frame with the same column span as ``A``.

    Modified Gram-Schmidt with one re-orthogonalisation pass, so an already
    orthonormal input comes back unchanged (no phase flips).
    """
    M = as_cmatrix(A)
    n, c = M.shape
    if c == 0:
        return M.copy()
    if numerical_rank(M, tol) < c:
        raise RankDeficient(f"matrix of {c} columns has numerical rank < {c}")
    Q = M.copy()
    for j in range(c):
        v = Q[:, j]
        for _ in range(2):
            if j:
                v = v - Q[:, :j] @ (Q[:, :j].conj().T @ v)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise RankDeficient(f"column {j} vanished during orthogonalisation")
        Q[:, j] = v / norm
    return Q


def projector(frame: CMatrix) -> CMatrix:
    F = as_cmatrix(frame)
    return F @ F.conj().T


def complement_frame(frame: CMatrix, tol: float | None = None) -> CMatrix:
    """Orthonormal frame of the orthogonal complement of ``span(frame)``."""
    F = as_cmatrix(frame)
    n = F.shape[0]
    if F.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    res = svd(F, full_matrices=True)
    r = int(np.count_nonzero(res.singular_values > _rank_tol(res.singular_values, tol)))
    return np.ascontiguousarray(res.U[:, r:])


def span_sum(X: CMatrix, Y: CMatrix, tol: float | None = None) -> CMatrix:
    """Orthonormal frame of ``span(X) + span(Y)``."""
    M = np.hstack([as_cmatrix(X), as_cmatrix(Y)])
    if M.shape[1] == 0:
        return M
    res = svd(M)
    r = int(np.count_nonzero(res.singular_values > _rank_tol(res.singular_values, tol)))
    return np.ascontiguousarray(res.U[:, :r])


def intersect_spans(X: CMatrix, Y: CMatrix, tol: float | None = None) -> CMatrix:
    """Orthonormal frame of ``span(X) ∩ span(Y)`` for orthonormal frames.

    Computed from the null space of ``[X | -Y]``: a null vector ``(a, b)`` gives
    the common vector ``X a = Y b``. Returns an ``(n, 0)`` frame when the
    intersection is trivial.
    """
    X = as_cmatrix(X)
    Y = as_cmatrix(Y)
    if X.shape[0] != Y.shape[0]:
        raise ValueError("frames live in different ambient spaces")
    n, kx = X.shape
    if kx == 0 or Y.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    M = np.hstack([X, -Y])
    res = svd(M, full_matrices=True)
    s = res.singular_values
    c = M.shape[1]
    # right singular vectors beyond min(n, c) have singular value 0
    padded = np.zeros(c)
    padded[: s.size] = s
    null = res.V[:, padded <= _rank_tol(s, tol)]
    if null.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    common = X @ null[:kx, :]
    return orthonormalize(common)
