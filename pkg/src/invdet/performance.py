"""Closed-form false-alarm and detection probabilities, and threshold inversion.

Split case (t + r < N): GLRT, 2S-GLRT and LMPID probabilities are
integrals over the ancillary ``p2 = u`` of complex F probabilities with
noncentrality ``u * SINR``, weighted by the complex beta density of
``p2``. Full case (t + r = N): every practical detector reduces to the
energy detector, whose probabilities are single complex F evaluations.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp

from .detectors import DetectorKind
from .distributions import complex_beta_pdf, complex_f_cdf, complex_f_sf
from .errors import DomainError, NotBracketable
from . import quadrature

INVERSION_RTOL = 1e-10


@dataclass(frozen=True)
class OperatingPoint:
    detector: DetectorKind
    eta: float
    pfa: float
    sinr_db: Optional[float] = None
    pd: Optional[float] = None


def _finite_sum_sf(eta, n, r):
    """``(1 + eta)^(-n) * sum_{l<r} C(n, l) eta^l`` in log space."""
    if eta < 0:
        raise DomainError("threshold must be nonnegative")
    if eta == 0:
        return 1.0
    if math.isinf(eta):
        return 0.0
    l = np.arange(r, dtype=float)
    logc = gammaln(n + 1) - gammaln(l + 1) - gammaln(n - l + 1)
    return float(np.exp(logsumexp(logc + l * math.log(eta)) - n * math.log1p(eta)))


def _p2_weight(dims):
    n2, m2 = dims.dof_p2
    return lambda u: complex_beta_pdf(u, n2, m2)


def pfa_glrt(eta, dims):
    """False-alarm probability of the GLRT decision statistic ``(1 - p1) / p1``."""
    if dims.full:
        return pfa_ed(eta, dims)
    return _finite_sum_sf(eta, dims.r + dims.K - dims.N + dims.t, dims.r)


def pd_glrt(eta, dims, sinr):
    if dims.full:
        return pd_ed(eta, dims, sinr)
    if eta < 0:
        raise DomainError("threshold must be nonnegative")
    if sinr == 0:
        return pfa_glrt(eta, dims)
    w = _p2_weight(dims)
    f = lambda u: complex_f_sf(eta, dims.r, dims.dof_p1, u * sinr) * w(u)
    return _prob(quadrature.integrate(f, 0.0, 1.0))


def pfa_2sglrt(eta, dims):
    """False-alarm probability of ``(1 - p1) / (p1 p2)``."""
    return pd_2sglrt(eta, dims, 0.0)


def pd_2sglrt(eta, dims, sinr):
    if dims.full:
        return pd_ed(eta, dims, sinr)
    if eta < 0:
        raise DomainError("threshold must be nonnegative")
    w = _p2_weight(dims)
    f = lambda u: complex_f_sf(eta * u, dims.r, dims.dof_p1, u * sinr) * w(u)
    return _prob(quadrature.integrate(f, 0.0, 1.0))


def _lmpid_argument(u, eta, a):
    # ratio (u + eta) / (u a - eta); its sign flips at u = eta / a
    return (u + eta) / (u * a - eta)


def _lmpid_split(eta, dims, sinr):
    a = dims.a
    r, n = dims.r, dims.dof_p1
    w = _p2_weight(dims)
    if eta > a:
        return 0.0
    if eta < -1:
        return 1.0
    if eta > 0:
        split = eta / a
        upper = lambda u: complex_f_sf(_lmpid_argument(u, eta, a), r, n, u * sinr) * w(u)
        lower = lambda u: complex_f_cdf(_lmpid_argument(u, eta, a), r, n, u * sinr) * w(u)
        return _prob(quadrature.integrate(upper, split, 1.0) + quadrature.integrate(lower, 0.0, split))
    # -1 <= eta <= 0: the argument is negative (F = 0) for u < -eta
    F = lambda u: complex_f_cdf(_lmpid_argument(u, eta, a), r, n, u * sinr) * w(u)
    kink = min(max(-eta, 0.0), 1.0)
    return _prob(1.0 - quadrature.integrate(F, 0.0, kink) - quadrature.integrate(F, kink, 1.0))


def _lmpid_full_to_ed(eta, dims):
    """Map an m = N LMPID threshold to the equivalent energy-detector threshold."""
    c = dims.a
    if eta < -1:
        return None, 1.0
    if eta >= c:
        return None, 0.0
    return (1.0 + eta) / (c - eta), None


def pfa_lmpid(eta, dims):
    """False-alarm probability of ``a p2 (1 - p1) - p1 p2``, piecewise over eta."""
    return pd_lmpid(eta, dims, 0.0)


def pd_lmpid(eta, dims, sinr):
    if dims.full:
        ed_eta, const = _lmpid_full_to_ed(eta, dims)
        return const if ed_eta is None else pd_ed(ed_eta, dims, sinr)
    return _lmpid_split(eta, dims, sinr)


def pfa_ed(eta, dims):
    """``(1 + eta)^(-K) sum_{l<r} C(K, l) eta^l``."""
    return _finite_sum_sf(eta, dims.K, dims.r)


def pd_ed(eta, dims, sinr):
    if eta < 0:
        raise DomainError("threshold must be nonnegative")
    n, r = dims.dof_p3
    return _prob(complex_f_sf(eta, r, n, sinr))


def _prob(x):
    return float(min(max(x, 0.0), 1.0))


_PFA = {
    DetectorKind.GLRT: pfa_glrt,
    DetectorKind.TWO_STEP_GLRT: pfa_2sglrt,
    DetectorKind.LMPID: pfa_lmpid,
    DetectorKind.ED: pfa_ed,
}
_PD = {
    DetectorKind.GLRT: pd_glrt,
    DetectorKind.TWO_STEP_GLRT: pd_2sglrt,
    DetectorKind.LMPID: pd_lmpid,
    DetectorKind.ED: pd_ed,
}


def has_closed_form(kind, dims) -> bool:
    kind = DetectorKind.parse(kind)
    if kind is DetectorKind.ED:
        return dims.full
    return kind in _PFA


def _check_closed_form(kind, dims):
    kind = DetectorKind.parse(kind)
    if not has_closed_form(kind, dims):
        raise DomainError(f"no closed-form performance for {kind.value} with these dimensions")
    return kind


def pfa(kind, eta, dims):
    kind = _check_closed_form(kind, dims)
    return _PFA[kind](eta, dims)


def pd(kind, eta, dims, sinr):
    kind = _check_closed_form(kind, dims)
    return _PD[kind](eta, dims, sinr)


def support(kind, dims):
    """Interval of thresholds over which the false-alarm probability varies."""
    kind = DetectorKind.parse(kind)
    if kind is DetectorKind.LMPID:
        return -1.0, dims.a
    return 0.0, math.inf


def invert_threshold(kind, dims, target_pfa):
    """Threshold ``eta`` with ``pfa(eta) = target_pfa``.

    Brackets the root on the monotone false-alarm curve, then refines it
    with Brent's method on ``log pfa``.

    Raises
    ------
    NotBracketable
        If ``target_pfa`` is not positive or cannot be bracketed.
    """
    kind = _check_closed_form(kind, dims)
    lo, hi_support = support(kind, dims)
    if target_pfa >= 1:
        return lo
    if not target_pfa > 0:
        raise NotBracketable(f"target Pfa {target_pfa} is not positive")
    f = lambda e: _PFA[kind](e, dims)
    log_target = math.log(target_pfa)

    hi = None
    if math.isinf(hi_support):
        step = 1.0
        for _ in range(200):
            if f(step) < target_pfa:
                hi = step
                break
            lo = step
            step *= 2.0
    else:
        width = hi_support - lo
        for k in range(1, 60):
            cand = hi_support - width * 2.0 ** -k
            value = f(cand)
            if value < target_pfa:
                if value > 0:
                    hi = cand
                break
            lo = cand
    if hi is None:
        raise NotBracketable(f"cannot bracket Pfa = {target_pfa} for {kind.value}")

    g = lambda e: math.log(max(f(e), 1e-300)) - log_target
    if g(lo) <= 0:
        return lo
    eta = brentq(g, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
    if abs(f(eta) - target_pfa) > INVERSION_RTOL * target_pfa:
        raise NotBracketable(f"inversion for {kind.value} did not reach the requested accuracy")
    return eta


def sinr_at_pd(kind, eta, dims, target_pd, sinr_db_range=(-10.0, 40.0)):
    """SINR (dB) at which the detection probability first reaches ``target_pd``.

    Returns ``None`` when ``target_pd`` is not reached inside ``sinr_db_range``.
    """
    kind = _check_closed_form(kind, dims)
    lo, hi = sinr_db_range
    g = lambda db: _PD[kind](eta, dims, 10.0 ** (db / 10.0)) - target_pd
    if g(lo) >= 0:
        return lo
    # scan upward so that very large SINRs are only evaluated when needed
    grid = np.append(np.arange(lo, hi, 1.0), hi)
    for a, b in zip(grid[:-1], grid[1:]):
        if g(b) >= 0:
            return brentq(g, a, b, xtol=1e-6)
    return None
