"""Invariant detector statistics.

Every detector rejects H0 when its *decision statistic* exceeds the
threshold. For the GLRT the decision statistic is ``(1 - p1) / p1``, a
monotone map of the GLRT ratio ``1 / p1``; the energy detector and the
m = N forms of GLRT and 2S-GLRT all use ``z2^H S22^{-1} z2``.
"""

import enum
import logging

import numpy as np

from .distributions import log_noncentral_factor
from .errors import DomainError
from .invariant import FULL, compute_maximal_invariant
from .linalg import hermitian_inv_sqrt, projector

log = logging.getLogger(__name__)

SELF_CHECK_RTOL = 1e-9


class DetectorKind(str, enum.Enum):
    MPID = "mpid"
    LMPID = "lmpid"
    GLRT = "glrt"
    TWO_STEP_GLRT = "2sglrt"
    ED = "ed"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        aliases = {"2sglrt": cls.TWO_STEP_GLRT, "twostepglrt": cls.TWO_STEP_GLRT, "cmpid": cls.GLRT}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown detector {name!r}") from None

    @property
    def clairvoyant(self) -> bool:
        return self is DetectorKind.MPID


def _unit(*ps):
    out = [np.asarray(p, dtype=float) for p in ps]
    for p in out:
        if np.any(p <= 0) or np.any(p > 1):
            raise DomainError("invariant components must lie in (0, 1]")
    return out


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def mpid_statistic(p1, p2, dims, sinr):
    """Likelihood ratio of the split maximal invariant at a known SINR."""
    if sinr < 0:
        raise DomainError("SINR must be nonnegative")
    p1, p2 = _unit(p1, p2)
    return _scalar(np.exp(log_noncentral_factor(p1, dims.dof_p1, dims.r, sinr * p2)))


def mpid_full_statistic(p3, dims, sinr):
    """Likelihood ratio of ``p3`` when ``t + r = N``."""
    (p3,) = _unit(p3)
    n, r = dims.dof_p3
    return _scalar(np.exp(log_noncentral_factor(p3, n, r, sinr)))


def lmpid_statistic(p1, p2, dims):
    """Locally optimum statistic ``a p2 (1 - p1) - p1 p2``; lies in ``[-1, a]``."""
    p1, p2 = _unit(p1, p2)
    return _scalar(dims.a * p2 * (1.0 - p1) - p1 * p2)


def lmpid_full_statistic(p3, dims):
    """m = N form ``(K - r + 1) / r * (1 - p3) - p3``."""
    (p3,) = _unit(p3)
    return _scalar(dims.a * (1.0 - p3) - p3)


def two_step_glrt_statistic(p1, p2):
    """``(1 - p1) / (p1 p2)``."""
    p1, p2 = _unit(p1, p2)
    return _scalar((1.0 - p1) / (p1 * p2))


def whitened_residual(stat, k):
    """``z^H S^{-1/2} P_perp(S^{-1/2} E_k) S^{-1/2} z`` with ``E_k`` the first k unit vectors."""
    X = hermitian_inv_sqrt(stat.S)
    x = X @ stat.z
    A = X[:, :k]
    res = x - projector(A) @ x
    return float(np.real(np.vdot(res, res)))


def glrt_raw(stat):
    """GLRT ratio computed from projections of the whitened primary vector."""
    return (1.0 + whitened_residual(stat, stat.t)) / (1.0 + whitened_residual(stat, stat.t + stat.r))


def two_step_glrt_raw(stat):
    return whitened_residual(stat, stat.t) - whitened_residual(stat, stat.t + stat.r)


def ed_raw(stat):
    """Energy detector through the raw projection form (valid for t + r = N)."""
    return whitened_residual(stat, stat.t)


def _self_check(name, raw, inv):
    if abs(raw - inv) > SELF_CHECK_RTOL * max(abs(inv), 1e-300):
        log.warning("%s: raw form %.17g disagrees with invariant form %.17g", name, raw, inv)
        return False
    return True


def glrt_statistic(stat):
    """GLRT ratio ``1 / p1`` (``1 / p3`` when t + r = N).

    Both the projection form and the invariant form are computed; a
    disagreement beyond ``1e-9`` relative is logged.
    """
    inv = compute_maximal_invariant(stat)
    value = 1.0 + inv.m3 if inv.case == FULL else 1.0 / inv.p1
    _self_check("GLRT", glrt_raw(stat), value)
    return value


def ed_statistic(stat):
    """``z2^H S22^{-1} z2 = (1 - p3) / p3`` for t + r = N."""
    if not stat.full:
        raise DomainError("energy detector requires t + r = N")
    inv = compute_maximal_invariant(stat)
    return inv.m3


def decision_statistic(kind, inv, dims, sinr=None):
    """Thresholded statistic of detector ``kind``.

    Parameters
    ----------
    kind : DetectorKind or str
    inv : MaximalInvariant or dict of arrays
        Either a single invariant or the output of ``invariants_batch``.
    dims : Dims
    sinr : float, optional
        Linear SINR; required by the clairvoyant MPID.
    """
    kind = DetectorKind.parse(kind)
    if not isinstance(inv, dict):
        inv = {k: getattr(inv, k) for k in ("m1", "m2", "m3") if getattr(inv, k) is not None}
    if kind.clairvoyant and sinr is None:
        raise DomainError("the MPID needs the SINR")
    if dims.full:
        m3 = np.asarray(inv["m3"], dtype=float)
        p3 = 1.0 / (1.0 + m3)
        if kind in (DetectorKind.GLRT, DetectorKind.TWO_STEP_GLRT, DetectorKind.ED):
            return _scalar(m3)
        if kind is DetectorKind.LMPID:
            return lmpid_full_statistic(p3, dims)
        return mpid_full_statistic(p3, dims, sinr)
    if kind is DetectorKind.ED:
        raise DomainError("energy detector requires t + r = N")
    m1 = np.asarray(inv["m1"], dtype=float)
    m2 = np.asarray(inv["m2"], dtype=float)
    p2 = 1.0 / (1.0 + m2)
    p1 = 1.0 / (1.0 + m1 * p2)
    if kind is DetectorKind.GLRT:
        return _scalar(m1 * p2)
    if kind is DetectorKind.TWO_STEP_GLRT:
        return _scalar(m1)
    if kind is DetectorKind.LMPID:
        return lmpid_statistic(p1, p2, dims)
    return mpid_statistic(p1, p2, dims, sinr)


def cmpid_direction_check(dims, sinr_grid, n_points=1000, p2_values=(0.1, 0.4, 0.7, 1.0)):
    """Check that the MPID is nonincreasing in ``p1`` at fixed ``p2``.

    Scans ``n_points`` values of ``p1`` in (0, 1] for every SINR in
    ``sinr_grid`` and every ``p2`` in ``p2_values``. A nonincreasing LR in
    ``p1`` means the conditionally optimum test rejects for small ``p1``,
    which is the GLRT.
    """
    p1 = np.linspace(1.0 / n_points, 1.0, n_points)
    for sinr in sinr_grid:
        for p2 in p2_values:
            lr = mpid_statistic(p1, np.full_like(p1, p2), dims, sinr)
            if np.any(np.diff(lr) > 1e-12 * np.maximum(1.0, np.abs(lr[:-1]))):
                return False
    return True
