"""Reduction of the detection problem to canonical form.

The unitary rotation ``U`` maps the jammer subspace onto the first ``t``
coordinates and the remaining part of the signal subspace onto the next
``r`` coordinates. Data are then summarized by the primary vector ``z`` and
the scatter matrix ``S`` of the secondary vectors.
"""

from dataclasses import dataclass

import numpy as np

from .distributions import sample_complex_normal, standard_complex_normal
from .errors import DimensionMismatch
from .linalg import complete_basis, hermitize, is_positive_definite, qr_decompose


def block_slices(t, r, N):
    """Index slices of the (t, r, N - t - r) partition."""
    return slice(0, t), slice(t, t + r), slice(t + r, N)


@dataclass(frozen=True)
class CanonicalForm:
    U: np.ndarray
    Q_factor: np.ndarray
    R_factor: np.ndarray
    M: np.ndarray
    t: int
    r: int

    @property
    def N(self) -> int:
        return self.U.shape[0]

    @property
    def m(self) -> int:
        return self.t + self.r

    @property
    def full(self) -> bool:
        return self.m == self.N

    @property
    def E_t(self):
        return np.eye(self.N, self.t, dtype=complex)

    @property
    def E_r(self):
        return np.eye(self.N, dtype=complex)[:, self.t:self.m]

    @property
    def E_m(self):
        return np.eye(self.N, self.m, dtype=complex)

    @property
    def R_J(self):
        return self.R_factor[:self.t, :self.t]

    @property
    def R_0(self):
        return self.R_factor[:self.t, self.t:]

    @property
    def R_1(self):
        return self.R_factor[self.t:, self.t:]

    def M_block(self, i, j):
        s = block_slices(self.t, self.r, self.N)
        return self.M[s[i - 1], s[j - 1]]

    def theta2(self, p):
        """Canonical target coordinates ``R_1 p``."""
        return self.R_1 @ np.asarray(p, dtype=complex)

    def signal_coordinates(self, theta2):
        """Inverse of :meth:`theta2`: the ``p`` with ``R_1 p = theta2``."""
        return np.linalg.solve(self.R_1, np.asarray(theta2, dtype=complex))


@dataclass(frozen=True)
class SufficientStatistic:
    """Primary vector ``z`` and secondary scatter matrix ``S`` in canonical coordinates."""

    z: np.ndarray
    S: np.ndarray
    t: int
    r: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).ravel()
        S = np.asarray(self.S, dtype=complex)
        if S.shape != (z.size, z.size):
            raise DimensionMismatch(f"S has shape {S.shape}, expected {(z.size, z.size)}")
        if self.t + self.r > z.size:
            raise DimensionMismatch("t + r exceeds N")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "S", hermitize(S))

    @property
    def N(self) -> int:
        return self.z.size

    @property
    def full(self) -> bool:
        return self.t + self.r == self.N

    def _slices(self):
        return block_slices(self.t, self.r, self.N)

    @property
    def z1(self):
        return self.z[self._slices()[0]]

    @property
    def z2(self):
        return self.z[self._slices()[1]]

    @property
    def z3(self):
        return self.z[self._slices()[2]]

    def S_block(self, i, j):
        s = self._slices()
        return self.S[s[i - 1], s[j - 1]]

    @property
    def positive_definite(self) -> bool:
        return is_positive_definite(self.S)


def canonicalize(scenario) -> CanonicalForm:
    """Compute the rotation to canonical form for ``scenario``.

    Raises
    ------
    RankDeficient
        If ``[J H]`` is not of full column rank.
    """
    A = np.hstack([scenario.J, scenario.H])
    Q, R = qr_decompose(A)
    U = complete_basis(Q).conj().T
    M = hermitize(U @ scenario.M0 @ U.conj().T)
    return CanonicalForm(U=U, Q_factor=Q, R_factor=R, M=M, t=scenario.t, r=scenario.r)


def transform_data(cf, r_primary, r_secondary) -> SufficientStatistic:
    """Rotate raw data and form the sufficient statistic ``(z, S)``."""
    r_primary = np.asarray(r_primary, dtype=complex).ravel()
    r_secondary = np.asarray(r_secondary, dtype=complex)
    if r_primary.size != cf.N or r_secondary.ndim != 2 or r_secondary.shape[0] != cf.N:
        raise DimensionMismatch("data dimensions do not match the canonical form")
    if r_secondary.shape[1] < cf.N:
        raise DimensionMismatch(f"need K >= N secondary vectors, got {r_secondary.shape[1]}")
    z = cf.U @ r_primary
    Zs = cf.U @ r_secondary
    return SufficientStatistic(z=z, S=Zs @ Zs.conj().T, t=cf.t, r=cf.r)


def transform_batch(cf, r_primary, r_secondary):
    """Vectorized :func:`transform_data` over a leading trial axis.

    Returns ``z`` with shape (B, N) and ``S`` with shape (B, N, N).
    """
    z = r_primary @ cf.U.T
    Zs = np.einsum("ij,bjk->bik", cf.U, r_secondary)
    S = Zs @ np.conj(np.swapaxes(Zs, -1, -2))
    return z, S


@dataclass(frozen=True)
class SignalParams:
    """Target coordinates ``p`` (length r) and jammer coordinates ``q`` (length t)."""

    p: np.ndarray
    q: np.ndarray


def synthesize_data(scenario, cf, signal, hypothesis, rng):
    """Draw one primary vector and ``K`` secondary vectors.

    ``r = H p [H1] + J q + n0`` and ``r_k ~ CN(0, M0)`` i.i.d.
    """
    N, K = scenario.N, scenario.K
    mean = scenario.J @ np.asarray(signal.q, dtype=complex)
    if hypothesis in (1, "H1", "h1"):
        mean = mean + scenario.H @ np.asarray(signal.p, dtype=complex)
    r_primary = sample_complex_normal(mean, scenario.M0, rng)
    r_secondary = sample_complex_normal(np.zeros(N), scenario.M0, rng, size=K).T
    return r_primary, r_secondary


def synthesize_batch(scenario, p, q, n_trials, rng):
    """Draw ``n_trials`` independent data sets.

    ``p`` may be ``None`` (H0); ``q`` is either one t-vector or an
    (n_trials, t) array of per-trial jammer coordinates.
    Returns primary data (B, N) and secondary data (B, N, K).
    """
    N, K = scenario.N, scenario.K
    L = np.linalg.cholesky(scenario.M0)
    q = np.asarray(q, dtype=complex)
    mean = q @ scenario.J.T if q.ndim == 2 else np.broadcast_to(scenario.J @ q, (n_trials, N))
    if p is not None:
        mean = mean + scenario.H @ np.asarray(p, dtype=complex)
    r_primary = mean + standard_complex_normal(rng, (n_trials, N)) @ L.T
    r_secondary = np.einsum("ij,bjk->bik", L, standard_complex_normal(rng, (n_trials, N, K)))
    return r_primary, r_secondary
