"""Complex-dof beta and F laws, maximal-invariant densities and samplers.

Conventions
-----------
A complex chi-square with ``n`` complex degrees of freedom is the sum of
``n`` squared moduli of independent standard circular complex normals,
i.e. a Gamma(n, 1) variable. The complex F law ``CF(n, m; delta)`` is the
plain ratio ``a / b`` of independent complex chi-squares with ``n`` and
``m`` complex dof (``a`` noncentral with noncentrality ``delta^2``), and the
complex beta law of ``1 / (1 + F)`` has density proportional to
``x^(m-1) (1-x)^(n-1)`` in this ordering, written ``Cbeta(m, n)``.
"""

import math

import numpy as np
from scipy import stats
from scipy.special import betainc, gammaln, xlog1py, xlogy

from .errors import DomainError, NotPositiveDefinite
from .linalg import hermitize

TAIL_MASS = 1e-12


def _check_dof(*dofs):
    for d in dofs:
        if d < 1 or int(d) != d:
            raise DomainError(f"complex degrees of freedom must be positive integers, got {d}")


def _check_unit(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x > 1):
        raise DomainError(f"{name} must lie in (0, 1]")
    return x


def log_complex_beta_pdf(x, n, m):
    return gammaln(n + m) - gammaln(n) - gammaln(m) + xlogy(n - 1, x) + xlog1py(m - 1, -x)


def complex_beta_pdf(x, n, m):
    """Density of the complex central beta law with ``n, m`` complex dof.

    ``Gamma(n+m) / (Gamma(n) Gamma(m)) * x^(n-1) * (1-x)^(m-1)`` on ``(0, 1]``.
    """
    _check_dof(n, m)
    x = _check_unit(x)
    out = np.exp(log_complex_beta_pdf(x, n, m))
    return out if out.ndim else float(out)


def _poisson_window(lam):
    """Index range of Poisson(lam) weights holding all but ``TAIL_MASS`` of the mass."""
    lam = float(lam)
    if lam <= 0:
        return 0, 0
    cap = lam + 40.0 * math.sqrt(lam + 1.0) + 60.0
    hi = min(cap, stats.poisson.isf(TAIL_MASS, lam) + 1)
    lo = max(0.0, stats.poisson.ppf(TAIL_MASS * 1e-3, lam) - 1)
    return int(lo), int(hi)


def complex_f_cdf(x, n, m, delta2=0.0):
    """CDF of the complex F law ``CF(n, m; delta)`` at ``x``.

    The noncentral law is a Poisson(``delta2``) mixture over the numerator's
    dof; the series is truncated once the neglected Poisson mass drops below
    ``1e-12``. Negative arguments give 0.

    ``x`` and ``delta2`` broadcast against each other.
    """
    return _complex_f(x, n, m, delta2, upper=False)


def complex_f_sf(x, n, m, delta2=0.0):
    """Survival function ``1 - complex_f_cdf`` evaluated without cancellation."""
    return _complex_f(x, n, m, delta2, upper=True)


def _complex_f(x, n, m, delta2, upper):
    _check_dof(n, m)
    x, delta2 = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(delta2, dtype=float))
    if np.any(delta2 < 0):
        raise DomainError("noncentrality must be nonnegative")
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    delta2 = np.atleast_1d(delta2).astype(float)
    pos = np.clip(x, 0.0, None)
    # Beta(n+j, m) variable a/(a+b) vs its complement b/(a+b) ~ Beta(m, n+j)
    y = np.where(np.isinf(pos), 1.0, pos / (1.0 + pos))
    yc = np.where(np.isinf(pos), 0.0, 1.0 / (1.0 + pos))
    lo = _poisson_window(delta2.min())[0]
    hi = _poisson_window(delta2.max())[1]
    j = np.arange(lo, hi + 1, dtype=float)
    lam = delta2[:, None]
    w = np.where(lam > 0, stats.poisson.pmf(j[None, :], np.where(lam > 0, lam, 1.0)),
                 (j[None, :] == 0).astype(float))
    if upper:
        comp = betainc(m, n + j[None, :], yc[:, None])
    else:
        comp = betainc(n + j[None, :], m, y[:, None])
    out = np.sum(w * comp, axis=1)
    out = np.where(x < 0, 1.0 if upper else 0.0, out)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _series_log_terms(n, r):
    """Log of ``C(n, k) (r-1)! / (r+k-1)!`` for ``k = 0..n``."""
    k = np.arange(n + 1, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + gammaln(r) - gammaln(r + k)


def log_noncentral_factor(x, n, r, delta2):
    """Log of ``exp(-delta2 x) * sum_k C(n,k) (r-1)!/(r+k-1)! (delta2 (1-x))^k``.

    This is the ratio between the noncentral and central complex beta
    densities with ``n, r`` complex dof. Evaluated in log space so that
    large noncentralities do not overflow.
    """
    x, delta2 = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(delta2, dtype=float))
    c = _series_log_terms(n, r)
    k = np.arange(n + 1, dtype=float)
    base = delta2[..., None] * (1.0 - x[..., None])
    terms = c + xlogy(k, base)
    top = terms.max(axis=-1, keepdims=True)
    logsum = top[..., 0] + np.log(np.sum(np.exp(terms - top), axis=-1))
    return -delta2 * x + logsum


def noncentral_complex_beta_pdf(x, n, r, delta2):
    """Density of the complex noncentral beta law ``Cbeta(n, r; delta)``."""
    x = _check_unit(x)
    out = np.exp(log_complex_beta_pdf(x, n, r) + log_noncentral_factor(x, n, r, delta2))
    return out if out.ndim else float(out)


def _hyp_index(hypothesis):
    if hypothesis in (0, "H0", "h0"):
        return 0
    if hypothesis in (1, "H1", "h1"):
        return 1
    raise DomainError(f"unknown hypothesis {hypothesis!r}")


def joint_pdf_p1_p2(x, y, dims, sinr, hypothesis):
    """Joint density of the split maximal invariant ``(p1, p2)``.

    Parameters
    ----------
    x, y : float or ndarray
        Evaluation points in ``(0, 1]``.
    dims : Dims
        Problem dimensions with ``t + r < N``.
    sinr : float
        Linear SINR; ignored under H0.
    hypothesis : {0, 1, "H0", "H1"}
    """
    if dims.full:
        raise DomainError("joint (p1, p2) law requires t + r < N")
    x = _check_unit(x, "x")
    y = _check_unit(y, "y")
    n1 = dims.dof_p1
    n2, m2 = dims.dof_p2
    logp = log_complex_beta_pdf(x, n1, dims.r) + log_complex_beta_pdf(y, n2, m2)
    if _hyp_index(hypothesis):
        logp = logp + log_noncentral_factor(x, n1, dims.r, sinr * y)
    out = np.exp(logp)
    return out if out.ndim else float(out)


def pdf_p3(x, dims, sinr, hypothesis):
    """Density of ``p3 = 1 / (1 + z2^H S22^{-1} z2)`` when ``t + r = N``."""
    x = _check_unit(x)
    n, r = dims.dof_p3
    logp = log_complex_beta_pdf(x, n, r)
    if _hyp_index(hypothesis):
        logp = logp + log_noncentral_factor(x, n, r, sinr)
    out = np.exp(logp)
    return out if out.ndim else float(out)


def complex_beta_cdf(x, n, m):
    """CDF of the complex central beta law (the real Beta(n, m) law)."""
    return betainc(n, m, np.clip(x, 0.0, 1.0))


def standard_complex_normal(rng, size):
    """Circular complex normal draws with unit variance (1/2 per real part)."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * np.sqrt(0.5)


def sample_complex_normal(mean, cov, rng, size=None):
    """Draw from ``CN(mean, cov)``.

    Parameters
    ----------
    mean : array_like, shape (n,)
    cov : array_like, shape (n, n)
        Hermitian positive-definite covariance.
    rng : numpy.random.Generator
    size : int or tuple, optional
        Leading batch shape. ``None`` returns a single vector.
    """
    mean = np.asarray(mean, dtype=complex)
    try:
        L = np.linalg.cholesky(hermitize(np.asarray(cov, dtype=complex)))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("covariance must be positive definite") from exc
    n = L.shape[0]
    shape = (n,) if size is None else tuple(np.atleast_1d(size)) + (n,)
    g = standard_complex_normal(rng, shape)
    return mean + g @ L.T


def ks_test(samples, cdf):
    """One-sample Kolmogorov-Smirnov test; returns ``(statistic, pvalue)``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("need at least one sample")
    res = stats.kstest(samples, cdf)
    return float(res.statistic), float(res.pvalue)


def ks_statistic(samples, cdf):
    """Kolmogorov-Smirnov distance between the empirical CDF of ``samples`` and ``cdf``."""
    return ks_test(samples, cdf)[0]
