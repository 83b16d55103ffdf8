"""Maximal invariant statistic and the transformation group acting on ``(z, S)``.

The group consists of pairs ``(G, f)`` with ``G`` block upper triangular
over the (t, r, N - t - r) partition and ``f`` supported on the first
``t`` coordinates, acting as ``(z, S) -> (G z + f, G S G^H)``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .canonical import SufficientStatistic, block_slices
from .distributions import standard_complex_normal
from .errors import DimensionMismatch, InvariantMismatch
from .linalg import (
    hermitian_inv_sqrt,
    hermitian_sqrt,
    householder_align,
    quadratic_form_inv,
    regress_out,
    schur_complement,
)

SPLIT = "split"
FULL = "full"


@dataclass(frozen=True)
class MaximalInvariant:
    """Maximal invariant in either the split (t + r < N) or full (t + r = N) case.

    Split case: ``m1 = z_{2.3}^H S_{2.3}^{-1} z_{2.3}``, ``m2 = z3^H S33^{-1} z3``,
    ``p1 = 1 / (1 + m1 / (1 + m2))`` and ``p2 = 1 / (1 + m2)``.
    Full case: ``m3 = z2^H S22^{-1} z2`` and ``p3 = 1 / (1 + m3)``.
    """

    case: str
    m1: Optional[float] = None
    m2: Optional[float] = None
    m3: Optional[float] = None

    @property
    def p1(self):
        return 1.0 / (1.0 + self.m1 / (1.0 + self.m2))

    @property
    def p2(self):
        return 1.0 / (1.0 + self.m2)

    @property
    def p3(self):
        return 1.0 / (1.0 + self.m3)

    def values(self):
        """Tuple of the defining quadratic forms."""
        return (self.m1, self.m2) if self.case == SPLIT else (self.m3,)


def compute_maximal_invariant(stat: SufficientStatistic) -> MaximalInvariant:
    """Maximal invariant of ``(z, S)`` under the group.

    Raises
    ------
    SingularBlock
        If ``S33`` (split case) or ``S22`` (full case) is singular.
    """
    if stat.full:
        m3 = quadratic_form_inv(stat.z2, stat.S_block(2, 2))
        return MaximalInvariant(FULL, m3=max(m3, 0.0))
    S33 = stat.S_block(3, 3)
    z23 = regress_out(stat.z2, stat.z3, stat.S_block(2, 3), S33)
    S2 = stat.S[stat.t:, stat.t:]
    m1 = quadratic_form_inv(z23, schur_complement(S2, stat.r))
    m2 = quadratic_form_inv(stat.z3, S33)
    return MaximalInvariant(SPLIT, m1=max(m1, 0.0), m2=max(m2, 0.0))


def _quad_batch(x, A):
    """Real ``x^H A^{-1} x`` for stacked vectors and matrices."""
    sol = np.linalg.solve(A, x[..., None])[..., 0]
    return np.real(np.sum(np.conj(x) * sol, axis=-1))


def invariants_batch(z, S, t, r):
    """Vectorized maximal invariant over a leading trial axis.

    Returns a dict with arrays ``m1, m2, p1, p2`` (split case) or
    ``m3, p3`` (full case).
    """
    N = z.shape[-1]
    s1, s2, s3 = block_slices(t, r, N)
    if t + r == N:
        m3 = np.maximum(_quad_batch(z[:, s2], S[:, s2, s2]), 0.0)
        return {"m3": m3, "p3": 1.0 / (1.0 + m3)}
    S33 = S[:, s3, s3]
    S23 = S[:, s2, s3]
    rhs = np.concatenate([z[:, s3, None], np.conj(np.swapaxes(S23, -1, -2))], axis=-1)
    sol = np.linalg.solve(S33, rhs)
    z23 = z[:, s2] - (S23 @ sol[..., :1])[..., 0]
    S_23 = S[:, s2, s2] - S23 @ sol[..., 1:]
    S_23 = 0.5 * (S_23 + np.conj(np.swapaxes(S_23, -1, -2)))
    m1 = np.maximum(_quad_batch(z23, S_23), 0.0)
    m2 = np.maximum(np.real(np.sum(np.conj(z[:, s3]) * sol[..., 0], axis=-1)), 0.0)
    p2 = 1.0 / (1.0 + m2)
    return {"m1": m1, "m2": m2, "p1": 1.0 / (1.0 + m1 * p2), "p2": p2}


@dataclass(frozen=True)
class GroupElement:
    """Group element ``(G, f)``; ``G`` block upper triangular, ``f`` zero past index t."""

    G: np.ndarray
    f: np.ndarray
    t: int
    r: int

    def __post_init__(self):
        G = np.asarray(self.G, dtype=complex)
        f = np.asarray(self.f, dtype=complex).ravel()
        N = f.size
        if G.shape != (N, N):
            raise DimensionMismatch("G must be N x N with N = len(f)")
        s = block_slices(self.t, self.r, N)
        for i in range(3):
            for j in range(i):
                if np.any(G[s[i], s[j]] != 0):
                    raise DimensionMismatch("G must be block upper triangular")
        if np.any(f[self.t:] != 0):
            raise DimensionMismatch("f must vanish beyond the first t entries")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "f", f)

    @property
    def N(self) -> int:
        return self.f.size

    @classmethod
    def identity(cls, t, r, N):
        return cls(np.eye(N, dtype=complex), np.zeros(N, dtype=complex), t, r)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """``self o other``: apply ``self`` first, then ``other``."""
        return GroupElement(other.G @ self.G, other.G @ self.f + other.f, self.t, self.r)

    def diagonal_blocks(self):
        s = block_slices(self.t, self.r, self.N)
        return [self.G[b, b] for b in s if b.stop > b.start]


def apply_group_element(g: GroupElement, stat: SufficientStatistic) -> SufficientStatistic:
    """Action ``(z, S) -> (G z + f, G S G^H)``."""
    if g.N != stat.N or g.t != stat.t or g.r != stat.r:
        raise DimensionMismatch("group element and statistic have different partitions")
    return SufficientStatistic(g.G @ stat.z + g.f, g.G @ stat.S @ g.G.conj().T, stat.t, stat.r)


def _random_unitary(rng, n):
    A = standard_complex_normal(rng, (n, n))
    Q, R = np.linalg.qr(A)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def _random_block(rng, n, condition_cap):
    s = np.exp(rng.uniform(0.0, np.log(condition_cap), size=n))
    return (_random_unitary(rng, n) * s[None, :]) @ _random_unitary(rng, n).conj().T


def random_group_element(t, r, N, rng, condition_cap=10.0, offdiag_scale=1.0):
    """Random group element whose diagonal blocks have condition number <= ``condition_cap``."""
    if condition_cap <= 1:
        raise ValueError("condition_cap must exceed 1")
    s = [b for b in block_slices(t, r, N) if b.stop > b.start]
    G = np.zeros((N, N), dtype=complex)
    for i, bi in enumerate(s):
        G[bi, bi] = _random_block(rng, bi.stop - bi.start, condition_cap)
        for bj in s[i + 1:]:
            G[bi, bj] = offdiag_scale * standard_complex_normal(rng, (bi.stop - bi.start, bj.stop - bj.start))
    f = np.zeros(N, dtype=complex)
    f[:t] = standard_complex_normal(rng, t)
    return GroupElement(G, f, t, r)


def _trailing_whitener(S2, r):
    """``W P`` such that ``W P S2 P^H W = I`` for the (r, rest) split of ``S2``."""
    n = S2.shape[0]
    if n == r:
        return hermitian_inv_sqrt(S2)
    S23 = S2[:r, r:]
    S33 = S2[r:, r:]
    P = np.eye(n, dtype=complex)
    P[:r, r:] = -np.linalg.solve(S33.T, S23.T).T
    W = np.zeros((n, n), dtype=complex)
    W[:r, :r] = hermitian_inv_sqrt(schur_complement(S2, r))
    W[r:, r:] = hermitian_inv_sqrt(S33)
    return W @ P


def _invariants_close(a, b, tol):
    va, vb = np.array(a.values(), float), np.array(b.values(), float)
    return a.case == b.case and np.all(np.abs(va - vb) <= tol * np.maximum(1.0, np.abs(va)))


def reconstruct_group_element(stat_a, stat_b, tol=1e-8) -> GroupElement:
    """Group element mapping ``stat_b`` onto ``stat_a``.

    Constructive proof of maximality: when both statistics share the same
    maximal invariant, builds ``(G, f)`` with ``G z_b + f = z_a`` and
    ``G S_b G^H = S_a``.

    Raises
    ------
    InvariantMismatch
        If the two maximal invariants differ by more than ``tol``.
    """
    if (stat_a.N, stat_a.t, stat_a.r) != (stat_b.N, stat_b.t, stat_b.r):
        raise DimensionMismatch("statistics have different partitions")
    if not _invariants_close(compute_maximal_invariant(stat_a), compute_maximal_invariant(stat_b), tol):
        raise InvariantMismatch("maximal invariants differ; no group element maps one onto the other")
    t, r, N = stat_a.t, stat_a.r, stat_a.N
    S, Sb = stat_a.S, stat_b.S
    z, zb = stat_a.z, stat_b.z

    # trailing block G3 from the aligned whitened vectors
    WP = _trailing_whitener(S[t:, t:], r)
    WPb = _trailing_whitener(Sb[t:, t:], r)
    y, yb = WP @ z[t:], WPb @ zb[t:]
    U1 = np.zeros((N - t, N - t), dtype=complex)
    U1[:r, :r] = householder_align(yb[:r], y[:r])
    U1[r:, r:] = householder_align(yb[r:], y[r:])
    G3 = np.linalg.solve(WP, U1 @ WPb)
    G3[r:, :r] = 0.0

    G1 = hermitian_sqrt(schur_complement(S, t)) @ hermitian_inv_sqrt(schur_complement(Sb, t))
    S3, S3b = S[:t, t:], Sb[:t, t:]
    G2h = np.linalg.solve(Sb[t:, t:], np.linalg.solve(G3, S3.conj().T) - S3b.conj().T @ G1.conj().T)
    G2 = G2h.conj().T

    G = np.zeros((N, N), dtype=complex)
    G[:t, :t] = G1
    G[:t, t:] = G2
    G[t:, t:] = G3
    f = np.zeros(N, dtype=complex)
    f[:t] = z[:t] - G1 @ zb[:t] - G2 @ zb[t:]
    return GroupElement(G, f, t, r)


def whiten(stat, cf):
    """Whitened trailing data ``(w23, S0_23)`` using the true covariance.

    ``V2 = [[V22, -V22 M23 M33^{-1}], [0, M33^{-1/2}]]`` with
    ``V22 = (M22 - M23 M33^{-1} M32)^{-1/2}``, applied to ``z[t:]`` and
    to the trailing block of ``S``.
    """
    t, r = stat.t, stat.r
    M2 = cf.M[t:, t:]
    n = M2.shape[0]
    if n == r:
        V2 = hermitian_inv_sqrt(M2)
    else:
        V2 = np.zeros((n, n), dtype=complex)
        V22 = hermitian_inv_sqrt(schur_complement(M2, r))
        V2[:r, :r] = V22
        V2[:r, r:] = -V22 @ np.linalg.solve(M2[r:, r:].T, M2[:r, r:].T).T
        V2[r:, r:] = hermitian_inv_sqrt(M2[r:, r:])
    w = V2 @ stat.z[t:]
    S0 = V2 @ stat.S[t:, t:] @ V2.conj().T
    return w, S0
