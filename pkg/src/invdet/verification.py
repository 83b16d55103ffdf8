"""Property suites: invariance, maximality, distributions and identities.

Each suite returns a :class:`SuiteResult`. When a property fails, the
first failing instance is serialized so that it can be replayed.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .canonical import SufficientStatistic, canonicalize, synthesize_batch, transform_batch
from .detectors import (
    DetectorKind,
    decision_statistic,
    ed_raw,
    glrt_raw,
    lmpid_statistic,
    mpid_statistic,
    two_step_glrt_raw,
)
from .distributions import complex_beta_cdf, ks_test, standard_complex_normal
from .invariant import (
    apply_group_element,
    compute_maximal_invariant,
    invariants_batch,
    random_group_element,
    reconstruct_group_element,
)
from .params import Dims
from .scenario import Scenario

SUITES = ("invariance", "maximality", "distributions", "identities")

INVARIANCE_RTOL = 1e-8
MAXIMALITY_RTOL = 1e-6
IDENTITY_RTOL = 1e-9
DERIVATIVE_RTOL = 1e-4
DERIVATIVE_STEP = 1e-6
KS_LEVEL = 0.01
KS_SAMPLES = 10_000
KS_SEEDS = 20
KS_MAX_FAILURES = 1


@dataclass
class SuiteResult:
    suite: str
    trials: int
    failures: int = 0
    max_error: float = 0.0
    checks: dict = field(default_factory=dict)
    failing_instance: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, error, tol, instance):
        self.max_error = max(self.max_error, float(error))
        if not error <= tol:
            self.failures += 1
            if self.failing_instance is None:
                self.failing_instance = instance()

    def to_dict(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "trials": self.trials,
            "failures": self.failures,
            "max_error": self.max_error,
            "checks": self.checks,
            "failing_instance": self.failing_instance,
        }


def _complex_to_json(a):
    a = np.asarray(a)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def serialize_stat(stat):
    return {"t": stat.t, "r": stat.r, "z": _complex_to_json(stat.z), "S": _complex_to_json(stat.S)}


def serialize_group_element(g):
    return {"G": _complex_to_json(g.G), "f": _complex_to_json(g.f)}


def random_dims(rng, max_n=8, full=None):
    """Random admissible dimensions; ``full`` forces (or excludes) t + r = N."""
    N = int(rng.integers(2, max_n + 1))
    if full is None:
        full = bool(rng.integers(2))
    if not full and N < 3:
        N = 3
    t = int(rng.integers(1, N if full else N - 1))
    r = N - t if full else int(rng.integers(1, N - t))
    K = N + int(rng.integers(1, 9))
    return Dims(N, K, r, t)


def random_statistic(rng, dims):
    """``(z, S)`` drawn from a random canonical covariance with K secondary vectors."""
    N, K = dims.N, dims.K
    A = standard_complex_normal(rng, (N, N)) + 2.0 * np.eye(N)
    X = A @ standard_complex_normal(rng, (N, K))
    z = A @ standard_complex_normal(rng, N) + standard_complex_normal(rng, N)
    return SufficientStatistic(z, X @ X.conj().T, dims.t, dims.r)


def _rel(a, b):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _statistics(stat, dims, sinr=1.0):
    """Every detector statistic defined for ``dims``."""
    inv = compute_maximal_invariant(stat)
    kinds = [k for k in DetectorKind if k is not DetectorKind.ED or dims.full]
    return np.array([decision_statistic(k, inv, dims, sinr) for k in kinds])


def invariance_suite(trials=1000, seed=0):
    """Maximal invariant and detector statistics are unchanged by random group elements."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("invariance", trials)
    for _ in range(trials):
        dims = random_dims(rng)
        stat = random_statistic(rng, dims)
        g = random_group_element(dims.t, dims.r, dims.N, rng)
        moved = apply_group_element(g, stat)
        v0 = np.array(compute_maximal_invariant(stat).values())
        v1 = np.array(compute_maximal_invariant(moved).values())
        err = max(_rel(v1, v0), _rel(_statistics(moved, dims), _statistics(stat, dims)))
        res.record(err, INVARIANCE_RTOL,
                   lambda: {"stat": serialize_stat(stat), "g": serialize_group_element(g)})
    return res


def maximality_suite(trials=200, seed=0):
    """A reconstructed group element maps one statistic onto another with equal invariants."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("maximality", trials)
    for _ in range(trials):
        dims = random_dims(rng)
        stat_b = random_statistic(rng, dims)
        g = random_group_element(dims.t, dims.r, dims.N, rng)
        stat_a = apply_group_element(g, stat_b)
        h = reconstruct_group_element(stat_a, stat_b)
        back = apply_group_element(h, stat_b)
        err = max(_rel(back.z, stat_a.z), _rel(back.S, stat_a.S))
        res.record(err, MAXIMALITY_RTOL,
                   lambda: {"stat_a": serialize_stat(stat_a), "stat_b": serialize_stat(stat_b)})
    return res


def _ks_samples(scenario, n, seed):
    cf = canonicalize(scenario)
    rng = np.random.default_rng(seed)
    q = np.zeros(scenario.t, dtype=complex)
    r_primary, r_secondary = synthesize_batch(scenario, None, q, n, rng)
    z, S = transform_batch(cf, r_primary, r_secondary)
    return invariants_batch(z, S, scenario.t, scenario.r)


def distribution_laws(split_dims, full_dims):
    """The H0 laws checked by the distribution suite, as ``(name, key, dims, n, m)``."""
    n2, m2 = split_dims.dof_p2
    n3, m3 = full_dims.dof_p3
    return [
        ("p2", "p2", split_dims, n2, m2),
        ("p1|p2", "p1", split_dims, split_dims.dof_p1, split_dims.r),
        ("p3", "p3", full_dims, n3, m3),
    ]


def distributions_suite(trials=KS_SAMPLES, seed=0, seeds=KS_SEEDS):
    """KS tests of the H0 invariant laws at the 1% level over ``seeds`` seeds.

    The conditional law of ``p1`` given ``p2`` does not depend on ``p2``
    under H0, so it is tested on the marginal samples of ``p1``. At most
    one rejection per law is tolerated.
    """
    split = Scenario.from_settings(N=8, K=12, r=2, t=4)
    full = Scenario.from_settings(N=6, K=12, r=2, t=4)
    res = SuiteResult("distributions", trials * seeds)
    cache = {}
    for name, key, dims, n, m in distribution_laws(split.dims, full.dims):
        scenario = full if dims.full else split
        rejected, worst = 0, 1.0
        for s in range(seeds):
            ck = (dims.full, s)
            if ck not in cache:
                cache[ck] = _ks_samples(scenario, trials, [seed, s])
            _, pvalue = ks_test(cache[ck][key], lambda x: complex_beta_cdf(x, n, m))
            worst = min(worst, pvalue)
            rejected += pvalue < KS_LEVEL
        res.checks[name] = {"rejections": int(rejected), "min_pvalue": worst, "law": [n, m]}
        if rejected > KS_MAX_FAILURES:
            res.failures += 1
            if res.failing_instance is None:
                res.failing_instance = {"law": name, "seed": seed, "rejections": int(rejected)}
    return res


def random_invariants(rng, n):
    """Points drawn uniformly on ``(0, 1]^2``."""
    return 1.0 - rng.uniform(size=n), 1.0 - rng.uniform(size=n)


def lmpid_derivative_errors(dims, p1, p2, h=DERIVATIVE_STEP):
    """Relative error of the forward difference ``(MPID(h) - 1) / h`` against the LMPID statistic."""
    fd = (mpid_statistic(p1, p2, dims, h) - 1.0) / h
    exact = lmpid_statistic(p1, p2, dims)
    return np.abs(fd - exact) / np.abs(exact)


def identities_suite(trials=1000, seed=0):
    """Projection forms equal invariant forms, and the MPID derivative at zero is the LMPID."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("identities", trials)
    for _ in range(trials):
        dims = random_dims(rng)
        stat = random_statistic(rng, dims)
        inv = compute_maximal_invariant(stat)
        if dims.full:
            pairs = [(ed_raw(stat), (1 - inv.p3) / inv.p3), (glrt_raw(stat), 1.0 / inv.p3)]
        else:
            pairs = [(glrt_raw(stat), 1.0 / inv.p1),
                     (two_step_glrt_raw(stat), (1 - inv.p1) / (inv.p1 * inv.p2))]
        err = max(abs(a - b) / abs(b) for a, b in pairs)
        res.record(err, IDENTITY_RTOL, lambda: {"stat": serialize_stat(stat)})

    dims = Dims(8, 12, 2, 4)
    p1, p2 = random_invariants(rng, trials)
    errs = lmpid_derivative_errors(dims, p1, p2)
    bad = int(np.sum(~(errs <= DERIVATIVE_RTOL)))
    res.checks["lmpid_derivative"] = {"failures": bad, "max_error": float(np.max(errs))}
    if bad:
        res.failures += bad
        if res.failing_instance is None:
            i = int(np.argmax(errs))
            res.failing_instance = {"p1": float(p1[i]), "p2": float(p2[i]), "dims": [8, 12, 2, 4]}
    return res


_RUNNERS = {
    "invariance": invariance_suite,
    "maximality": maximality_suite,
    "distributions": distributions_suite,
    "identities": identities_suite,
}


def run_suite(name, trials=None, seed=0):
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    kwargs = {"seed": seed}
    if trials is not None:
        kwargs["trials"] = trials
    return _RUNNERS[name](**kwargs)
