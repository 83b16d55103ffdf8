"""Monte Carlo engine: threshold calibration, Pd estimation and Pd-vs-SINR curves.

Trials are grouped in fixed-size chunks and every chunk draws from its own
Philox stream keyed by ``(seed, purpose, point, chunk)``. Results are
therefore identical for any number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import performance
from .canonical import canonicalize, synthesize_batch, transform_batch
from .detectors import DetectorKind, decision_statistic
from .errors import DomainError, InsufficientTrials
from .invariant import invariants_batch
from .scenario import db_to_linear, scale_jammer_to_inr, scale_signal_to_sinr

CHUNK = 2048

_H0 = 1
_H1 = 2


def stream(seed, purpose, point, chunk):
    ss = np.random.SeedSequence([int(seed), purpose, point, chunk])
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce a Pd-vs-SINR experiment.

    ``signal_direction`` and ``jammer_direction`` are the canonical target
    coordinates theta2 and the jammer coordinates q before power scaling;
    both default to all-ones vectors.
    """

    scenario: object
    detectors: List[DetectorKind]
    pfa: float = 1e-2
    sinr_grid_db: List[float] = field(default_factory=lambda: [0.0])
    trials_threshold: int = 200_000
    trials_pd: int = 5000
    seed: int = 0
    inr_db: Optional[float] = 30.0
    monte_carlo: bool = True
    threads: int = 1
    signal_direction: Optional[np.ndarray] = None
    jammer_direction: Optional[np.ndarray] = None

    def __post_init__(self):
        self.detectors = [DetectorKind.parse(d) for d in self.detectors]
        if not 0 < self.pfa < 1:
            raise DomainError("pfa must lie in (0, 1)")
        grid = np.asarray(self.sinr_grid_db, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise DomainError("SINR grid must be nonempty and strictly increasing")
        self.canonical = canonicalize(self.scenario)
        self.dims = self.scenario.dims
        for d in self.detectors:
            if d is DetectorKind.ED and not self.dims.full:
                raise DomainError("the energy detector is only defined for t + r = N")
        r, t = self.dims.r, self.dims.t
        if self.signal_direction is None:
            self.signal_direction = np.ones(r, dtype=complex)
        if self.jammer_direction is None:
            self.jammer_direction = np.ones(t, dtype=complex)
        self.q_base = scale_jammer_to_inr(self.scenario, self.canonical, self.jammer_direction, self.inr_db)


@dataclass(frozen=True)
class CurveRow:
    sinr_db: float
    eta: float
    pd_closed: Optional[float]
    pd_mc: Optional[float]
    pd_stderr: Optional[float]


@dataclass
class PerformanceCurve:
    detector: DetectorKind
    rows: List[CurveRow]
    eta: Optional[float] = None
    achieved_pfa: Optional[float] = None


def binomial_stderr(p, n):
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _signal_coordinates(spec, sinr):
    if sinr <= 0:
        return None
    theta2 = scale_signal_to_sinr(spec.scenario, spec.canonical, spec.signal_direction, sinr)
    return spec.canonical.signal_coordinates(theta2)


def _chunk_invariants(spec, hypothesis, point, chunk, n, sinr):
    rng = stream(spec.seed, hypothesis, point, chunk)
    # jammer with fixed power and a fresh random phase in every trial
    phase = np.exp(2j * np.pi * rng.uniform(size=n))
    q = phase[:, None] * spec.q_base[None, :]
    p = _signal_coordinates(spec, sinr) if hypothesis == _H1 else None
    r_primary, r_secondary = synthesize_batch(spec.scenario, p, q, n, rng)
    z, S = transform_batch(spec.canonical, r_primary, r_secondary)
    return invariants_batch(z, S, spec.dims.t, spec.dims.r)


def simulate_invariants(spec, n_trials, hypothesis=_H0, sinr=0.0, point=0):
    """Maximal invariants of ``n_trials`` synthesized trials, in trial order."""
    sizes = [min(CHUNK, n_trials - i) for i in range(0, n_trials, CHUNK)]
    work = lambda c: _chunk_invariants(spec, hypothesis, point, c, sizes[c], sinr)
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(c) for c in range(len(sizes))]
    if not parts:
        return {}
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def order_statistic_threshold(stats, pfa):
    """The ceil(n * pfa)-th largest value of ``stats``."""
    stats = np.asarray(stats, dtype=float)
    k = int(math.ceil(stats.size * pfa))
    if k < 1:
        raise InsufficientTrials("need at least one exceedance")
    return float(np.partition(stats, stats.size - k)[stats.size - k])


def calibrate_threshold_mc(spec, detector, sinr=None, h0=None):
    """Empirical threshold from H0 trials at the spec's false-alarm probability.

    ``h0`` may carry precomputed H0 invariants to share trials across
    detectors.
    """
    if spec.trials_threshold * spec.pfa < 100 - 1e-9:
        raise InsufficientTrials(
            f"{spec.trials_threshold} trials give fewer than 100 expected false alarms at Pfa={spec.pfa}")
    if h0 is None:
        h0 = simulate_invariants(spec, spec.trials_threshold)
    stats = decision_statistic(detector, h0, spec.dims, sinr)
    return order_statistic_threshold(stats, spec.pfa)


def estimate_pd(spec, detector, eta, sinr_db, h1=None, point=0):
    """Fraction of H1 trials at ``sinr_db`` whose statistic exceeds ``eta``.

    Returns ``(pd, stderr)``.
    """
    if not math.isfinite(eta):
        raise DomainError("threshold must be finite")
    sinr = float(db_to_linear(sinr_db))
    if h1 is None:
        h1 = simulate_invariants(spec, spec.trials_pd, _H1, sinr, point)
    stats = decision_statistic(detector, h1, spec.dims, sinr)
    pd = float(np.mean(stats > eta))
    return pd, binomial_stderr(pd, stats.size)


def run_experiment(spec) -> List[PerformanceCurve]:
    """Pd-vs-SINR curves for every detector of ``spec``.

    Thresholds come from closed-form inversion when available and from
    Monte Carlo calibration otherwise (the clairvoyant MPID, recalibrated
    at every SINR). Monte Carlo Pd is added when ``spec.monte_carlo`` is
    set; the MPID is always simulated.
    """
    if not spec.detectors:
        return []
    dims = spec.dims
    grid = [float(x) for x in spec.sinr_grid_db]
    need_mc = spec.monte_carlo or any(d.clairvoyant for d in spec.detectors)
    h0 = simulate_invariants(spec, spec.trials_threshold) if need_mc else None
    h1 = {}
    if need_mc:
        for i, db in enumerate(grid):
            h1[i] = simulate_invariants(spec, spec.trials_pd, _H1, float(db_to_linear(db)), point=i)

    curves = []
    for det in spec.detectors:
        closed = performance.has_closed_form(det, dims)
        eta = performance.invert_threshold(det, dims, spec.pfa) if closed else None
        achieved = None
        if eta is not None and h0 is not None:
            achieved = float(np.mean(decision_statistic(det, h0, dims) > eta))
        rows = []
        for i, db in enumerate(grid):
            sinr = float(db_to_linear(db))
            row_eta = eta if closed else calibrate_threshold_mc(spec, det, sinr, h0)
            pd_closed = performance.pd(det, row_eta, dims, sinr) if closed else None
            pd_mc = stderr = None
            if spec.monte_carlo or not closed:
                pd_mc, stderr = estimate_pd(spec, det, row_eta, db, h1[i], point=i)
            rows.append(CurveRow(db, row_eta, pd_closed, pd_mc, stderr))
        curves.append(PerformanceCurve(det, rows, eta, achieved))
    return curves
