"""Dense complex matrix kernels.

All routines work on plain numpy arrays. Hermitian inputs are symmetrized
from their upper triangle before use so that round-off asymmetry in the
caller never leaks into eigen-decompositions.
"""

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, RankDeficient, SingularBlock

RANK_TOL = 1e-10
ALIGN_TOL = 1e-10


def hermitize(M):
    """Return the Hermitian matrix built from the upper triangle of ``M``."""
    M = np.asarray(M)
    upper = np.triu(M, 1)
    return upper + upper.conj().T + np.diag(np.real(np.diag(M)))


def is_positive_definite(M) -> bool:
    try:
        np.linalg.cholesky(hermitize(M))
    except np.linalg.LinAlgError:
        return False
    return True


def qr_decompose(A, rank_tol=RANK_TOL):
    """Thin QR factorization with a positive real diagonal in ``R``.

    Parameters
    ----------
    A : ndarray, shape (n, k)
        Complex matrix with ``n >= k`` and full column rank.
    rank_tol : float
        Relative tolerance of the rank test on ``|diag(R)|``.

    Returns
    -------
    Q : ndarray, shape (n, k)
        Matrix with orthonormal columns.
    R : ndarray, shape (k, k)
        Upper triangular factor with strictly positive real diagonal.

    Raises
    ------
    RankDeficient
        If the smallest diagonal magnitude of ``R`` is below
        ``rank_tol`` times the largest one.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    n, k = A.shape
    if n < k:
        raise RankDeficient(f"{n}x{k} matrix cannot have full column rank")
    Q, R = np.linalg.qr(A, mode="reduced")
    d = np.diag(R)
    mag = np.abs(d)
    if mag.max() == 0 or mag.min() <= rank_tol * mag.max():
        raise RankDeficient("matrix is not of full column rank")
    phase = d / mag
    # A = (Q D)(D^* R) with D = diag(phase), D^* R has real positive diagonal
    Q = Q * phase[np.newaxis, :]
    R = phase.conj()[:, np.newaxis] * R
    R[np.diag_indices(k)] = np.real(np.diag(R))
    return Q, R


def complete_basis(Q):
    """Extend the orthonormal columns of ``Q`` to an ``n x n`` unitary matrix.

    The first ``k`` columns of the result are exactly the columns of ``Q``.
    """
    Q = np.asarray(Q, dtype=complex)
    n, k = Q.shape
    full, _ = np.linalg.qr(Q, mode="complete")
    full = full.copy()
    full[:, :k] = Q
    return full


def _hermitian_eig(M):
    w, V = np.linalg.eigh(hermitize(M))
    if w.size and w.min() <= 0:
        raise NotPositiveDefinite(f"smallest eigenvalue {w.min():.3e} is not positive")
    return w, V


def hermitian_sqrt(M):
    """Hermitian positive-definite square root of a PD matrix."""
    w, V = _hermitian_eig(M)
    return (V * np.sqrt(w)) @ V.conj().T


def hermitian_inv_sqrt(M):
    """Hermitian inverse square root ``X`` of a PD matrix, ``X M X = I``.

    Computed from the eigendecomposition of ``M``.

    Raises
    ------
    NotPositiveDefinite
        If ``M`` has a non-positive eigenvalue.
    """
    w, V = _hermitian_eig(M)
    return (V / np.sqrt(w)) @ V.conj().T


def _solve(D, B):
    try:
        if np.linalg.cond(D) > 1.0 / (np.finfo(float).eps * 10):
            raise SingularBlock("block is numerically singular")
        return np.linalg.solve(D, B)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock(str(exc)) from exc


def schur_complement(M, split):
    """Schur complement ``A - B D^{-1} B^H`` of the partition ``[[A, B], [B^H, D]]``.

    Parameters
    ----------
    M : ndarray, shape (n, n)
        Hermitian matrix.
    split : int
        Size of the leading block ``A``.
    """
    M = hermitize(M)
    n = M.shape[0]
    if not 0 < split <= n:
        raise DimensionMismatch(f"split {split} outside (0, {n}]")
    A = M[:split, :split]
    if split == n:
        return A
    B = M[:split, split:]
    D = M[split:, split:]
    return hermitize(A - B @ _solve(D, B.conj().T))


def regress_out(z2, z3, S23, S33):
    """Residual ``z2 - S23 S33^{-1} z3``."""
    z2 = np.asarray(z2, dtype=complex)
    z3 = np.asarray(z3, dtype=complex)
    if z3.size == 0:
        return z2.copy()
    return z2 - np.asarray(S23) @ _solve(np.asarray(S33), z3)


def quadratic_form_inv(x, M):
    """Real value of ``x^H M^{-1} x`` for Hermitian PD ``M``."""
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return 0.0
    return float(np.real(np.vdot(x, _solve(hermitize(M), x))))


def projector(A):
    """Orthogonal projector onto the column span of ``A``."""
    A = np.asarray(A, dtype=complex)
    return A @ np.linalg.solve(A.conj().T @ A, A.conj().T)


def householder_align(src, dst):
    """Unitary ``U`` with ``U src = dst`` for vectors of equal norm.

    A phase rotation makes ``src`` and ``dst`` have a real inner product,
    then a Householder reflection maps one onto the other. Returns the
    identity when the vectors already coincide or are both zero.
    """
    src = np.asarray(src, dtype=complex)
    dst = np.asarray(dst, dtype=complex)
    n = src.size
    eye = np.eye(n, dtype=complex)
    if n == 0:
        return eye
    scale = max(np.linalg.norm(src), np.linalg.norm(dst))
    if scale == 0 or np.linalg.norm(src - dst) <= 1e-15 * scale:
        return eye
    inner = np.vdot(src, dst)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    w = phase * src
    v = w - dst
    vv = np.real(np.vdot(v, v))
    # a residual at roundoff level would give a reflection about a noise direction
    if vv <= (ALIGN_TOL * scale) ** 2:
        return phase * eye
    H = eye - 2.0 * np.outer(v, v.conj()) / vv
    return phase * H
