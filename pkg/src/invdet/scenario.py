"""Simulated radar environment: subspaces, clutter covariance, SINR and INR scaling."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, DuplicateFrequency, NotPositiveDefinite, ZeroDirection
from .linalg import hermitize, is_positive_definite, qr_decompose, quadratic_form_inv, schur_complement
from .params import Dims

# Candidate jammer frequencies, all in the sidelobe region of a mainlobe at 0.
_JAMMER_CANDIDATES = (0.3, -0.3, 0.4, -0.4, 0.35, -0.35, 0.45, -0.45, 0.25, -0.25)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def build_clutter_covariance(N, sigma_n2=1.0, sigma_c2=0.0, one_lag_corr=0.95):
    """Exponentially correlated clutter plus white noise.

    Returns ``sigma_n2 * I + sigma_c2 * Mc`` with ``Mc[i, j] = rho ** |i - j|``.
    """
    if sigma_n2 <= 0:
        raise DomainError("sigma_n2 must be positive")
    if sigma_c2 < 0:
        raise DomainError("sigma_c2 must be nonnegative")
    if not 0 <= one_lag_corr < 1:
        raise DomainError("one_lag_corr must lie in [0, 1)")
    idx = np.arange(N)
    Mc = float(one_lag_corr) ** np.abs(idx[:, None] - idx[None, :])
    return (sigma_n2 * np.eye(N) + sigma_c2 * Mc).astype(complex)


def build_steering_subspace(N, normalized_frequencies):
    """Matrix of unit-norm Doppler steering vectors, one column per frequency."""
    f = np.asarray(normalized_frequencies, dtype=float).ravel()
    if np.any(np.abs(f) > 0.5):
        raise DomainError("normalized frequencies must lie in [-0.5, 0.5]")
    # -0.5 and 0.5 give the same steering vector
    if np.unique(np.mod(f, 1.0)).size != f.size:
        raise DuplicateFrequency(f"duplicate frequencies in {f.tolist()}")
    n = np.arange(N)[:, None]
    return np.exp(2j * np.pi * n * f[None, :]) / np.sqrt(N)


def default_signal_frequencies(r, N):
    # centered on zero Doppler, spaced by half a Doppler bin
    return [(k - (r - 1) / 2.0) / (2.0 * N) for k in range(r)]


def default_jammer_frequencies(t):
    if t > len(_JAMMER_CANDIDATES):
        raise DomainError(f"no default jammer frequencies for t = {t}")
    return list(_JAMMER_CANDIDATES[:t])


@dataclass(frozen=True)
class Scenario:
    """Problem geometry and nuisance truth.

    ``H`` (N x r) spans the target subspace, ``J`` (N x t) the jammer
    subspace and ``M0`` is the clutter-plus-noise covariance.
    """

    K: int
    H: np.ndarray
    J: np.ndarray
    M0: np.ndarray
    sigma_n2: float = 1.0
    sigma_c2: float = 0.0
    one_lag_corr: float = 0.0
    signal_freqs: tuple = field(default=(), compare=False)
    jammer_freqs: tuple = field(default=(), compare=False)

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=complex))
        J = np.atleast_2d(np.asarray(self.J, dtype=complex))
        if H.shape[0] != J.shape[0]:
            raise DomainError("H and J must have the same number of rows")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "M0", hermitize(np.asarray(self.M0, dtype=complex)))
        Dims(self.N, self.K, self.r, self.t)
        qr_decompose(np.hstack([J, H]))
        if not is_positive_definite(self.M0):
            raise NotPositiveDefinite("M0 must be positive definite")

    @property
    def N(self) -> int:
        return self.H.shape[0]

    @property
    def r(self) -> int:
        return self.H.shape[1]

    @property
    def t(self) -> int:
        return self.J.shape[1]

    @property
    def dims(self) -> Dims:
        return Dims(self.N, self.K, self.r, self.t)

    @classmethod
    def from_settings(cls, N, K, r, t, signal_freqs=None, jammer_freqs=None,
                      cnr_db=30.0, sigma_n2=1.0, one_lag_corr=0.95):
        """Build a scenario from Doppler frequencies and clutter settings."""
        signal_freqs = default_signal_frequencies(r, N) if signal_freqs is None else list(signal_freqs)
        jammer_freqs = default_jammer_frequencies(t) if jammer_freqs is None else list(jammer_freqs)
        if len(signal_freqs) != r or len(jammer_freqs) != t:
            raise DomainError("frequency lists must have lengths r and t")
        if set(signal_freqs) & set(jammer_freqs):
            raise DuplicateFrequency("signal and jammer frequencies overlap")
        sigma_c2 = 0.0 if cnr_db is None else float(sigma_n2 * db_to_linear(cnr_db))
        return cls(
            K=K,
            H=build_steering_subspace(N, signal_freqs),
            J=build_steering_subspace(N, jammer_freqs),
            M0=build_clutter_covariance(N, sigma_n2, sigma_c2, one_lag_corr),
            sigma_n2=float(sigma_n2),
            sigma_c2=sigma_c2,
            one_lag_corr=float(one_lag_corr),
            signal_freqs=tuple(signal_freqs),
            jammer_freqs=tuple(jammer_freqs),
        )


def _sinr_matrix(cf):
    t, r = cf.t, cf.r
    trailing = cf.M[t:, t:]
    if cf.full:
        return trailing
    return schur_complement(trailing, r)


def compute_sinr(scenario, canonical, theta2):
    """Signal-to-interference-plus-noise ratio of the canonical target coordinates.

    ``theta2^H (M22 - M23 M33^{-1} M32)^{-1} theta2``, or
    ``theta2^H M22^{-1} theta2`` when ``t + r = N``.
    """
    theta2 = np.asarray(theta2, dtype=complex).ravel()
    if theta2.size != canonical.r:
        raise DomainError(f"theta2 must have length r = {canonical.r}")
    return max(quadratic_form_inv(theta2, _sinr_matrix(canonical)), 0.0)


def scale_signal_to_sinr(scenario, canonical, direction, target_sinr):
    """Scale ``direction`` (canonical coordinates theta2) to reach ``target_sinr`` (linear)."""
    direction = np.asarray(direction, dtype=complex).ravel()
    if target_sinr < 0:
        raise DomainError("target SINR must be nonnegative")
    base = compute_sinr(scenario, canonical, direction)
    if base <= 0:
        raise ZeroDirection("signal direction has zero SINR")
    return np.sqrt(target_sinr / base) * direction


def scale_jammer_to_inr(scenario, canonical, q_direction, inr_db):
    """Scale the jammer coordinates so that ``||R_J q||^2 / sigma_n2 = 10^(inr_db/10)``.

    ``inr_db = -inf`` (or ``None``) switches the jammer off.
    """
    q_direction = np.asarray(q_direction, dtype=complex).ravel()
    if inr_db is None or np.isneginf(inr_db):
        return np.zeros_like(q_direction)
    theta1 = canonical.R_J @ q_direction
    power = np.real(np.vdot(theta1, theta1))
    if power <= 0:
        raise ZeroDirection("jammer direction is zero")
    target = scenario.sigma_n2 * db_to_linear(inr_db)
    return np.sqrt(target / power) * q_direction
