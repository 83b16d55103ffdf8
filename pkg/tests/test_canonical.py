import numpy as np
import pytest

from invdet.canonical import (
    SignalParams,
    SufficientStatistic,
    canonicalize,
    synthesize_batch,
    synthesize_data,
    transform_batch,
    transform_data,
)
from invdet.distributions import standard_complex_normal
from invdet.errors import DimensionMismatch
from invdet.scenario import Scenario


def basis_scenario(N=6, t=2, r=3, K=8):
    E = np.eye(N, dtype=complex)
    return Scenario(K=K, H=E[:, t:t + r], J=E[:, :t], M0=np.eye(N))


class TestCanonicalize:
    def test_already_canonical(self):
        cf = canonicalize(basis_scenario())
        np.testing.assert_allclose(cf.U, np.eye(6), atol=1e-15)
        np.testing.assert_allclose(cf.R_factor, np.eye(5), atol=1e-15)

    def test_defining_identities(self, fig1_scenario):
        cf = canonicalize(fig1_scenario)
        np.testing.assert_allclose(cf.U @ fig1_scenario.J, cf.E_t @ cf.R_J, atol=1e-10)
        np.testing.assert_allclose(cf.U @ fig1_scenario.H, cf.E_t @ cf.R_0 + cf.E_r @ cf.R_1, atol=1e-10)
        np.testing.assert_allclose(cf.U @ cf.U.conj().T, np.eye(8), atol=1e-12)

    def test_full_case(self, full_scenario):
        cf = canonicalize(full_scenario)
        np.testing.assert_allclose(cf.U @ cf.Q_factor, np.eye(6), atol=1e-12)

    def test_rotated_covariance(self, fig1_scenario):
        cf = canonicalize(fig1_scenario)
        np.testing.assert_allclose(cf.M, cf.U @ fig1_scenario.M0 @ cf.U.conj().T, atol=1e-9)

    def test_signal_coordinates_round_trip(self, fig1_scenario):
        cf = canonicalize(fig1_scenario)
        p = np.array([1.0 - 2j, 0.5j])
        np.testing.assert_allclose(cf.signal_coordinates(cf.theta2(p)), p, atol=1e-12)


class TestTransform:
    def test_identity_rotation(self, rng):
        sc = basis_scenario()
        cf = canonicalize(sc)
        r = standard_complex_normal(rng, 6)
        R = standard_complex_normal(rng, (6, 8))
        stat = transform_data(cf, r, R)
        np.testing.assert_allclose(stat.z, r, atol=1e-14)
        np.testing.assert_allclose(stat.S, R @ R.conj().T, atol=1e-13)

    def test_zero_secondary(self, fig1_scenario, rng):
        cf = canonicalize(fig1_scenario)
        stat = transform_data(cf, standard_complex_normal(rng, 8), np.zeros((8, 12)))
        np.testing.assert_array_equal(stat.S, 0)
        assert not stat.positive_definite

    def test_norm_preservation(self, fig1_scenario, rng):
        cf = canonicalize(fig1_scenario)
        r = standard_complex_normal(rng, 8)
        R = standard_complex_normal(rng, (8, 12))
        stat = transform_data(cf, r, R)
        assert np.linalg.norm(stat.z) == pytest.approx(np.linalg.norm(r), rel=1e-12)
        assert np.trace(stat.S).real == pytest.approx(np.sum(np.abs(R) ** 2), rel=1e-12)
        assert stat.positive_definite
        np.testing.assert_array_equal(stat.S, stat.S.conj().T)

    def test_too_few_secondary(self, fig1_scenario, rng):
        with pytest.raises(DimensionMismatch):
            transform_data(canonicalize(fig1_scenario), np.zeros(8), np.zeros((8, 7)))

    def test_batch_matches_single(self, fig1_scenario, rng):
        cf = canonicalize(fig1_scenario)
        r = standard_complex_normal(rng, (3, 8))
        R = standard_complex_normal(rng, (3, 8, 12))
        z, S = transform_batch(cf, r, R)
        for b in range(3):
            stat = transform_data(cf, r[b], R[b])
            np.testing.assert_allclose(z[b], stat.z, atol=1e-12)
            np.testing.assert_allclose(S[b], stat.S, atol=1e-11)


class TestSynthesize:
    def test_mean_clt_bound(self, rng):
        sc = basis_scenario(N=5, t=2, r=2, K=5)
        r, _ = synthesize_batch(sc, None, np.zeros(2), 100_000, rng)
        assert np.linalg.norm(r.mean(axis=0)) <= 4 * np.sqrt(5 / 1e5)

    def test_huge_signal_dominates(self, fig1_scenario, rng):
        cf = canonicalize(fig1_scenario)
        p = np.array([1e6, -1e6j])
        r, _ = synthesize_data(fig1_scenario, cf, SignalParams(p, np.zeros(4)), "H1", rng)
        Hp = fig1_scenario.H @ p
        assert np.linalg.norm(r - Hp) / np.linalg.norm(Hp) < 1e-3

    def test_seed_determinism(self, fig1_scenario):
        cf = canonicalize(fig1_scenario)
        sig = SignalParams(np.ones(2), np.ones(4))
        a = synthesize_data(fig1_scenario, cf, sig, "H1", np.random.default_rng(5))
        b = synthesize_data(fig1_scenario, cf, sig, "H1", np.random.default_rng(5))
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    def test_shapes(self, fig1_scenario, rng):
        r, R = synthesize_batch(fig1_scenario, np.ones(2), rng.standard_normal((7, 4)), 7, rng)
        assert r.shape == (7, 8) and R.shape == (7, 8, 12)


def test_statistic_blocks():
    z = np.arange(6, dtype=complex)
    S = np.diag(np.arange(1, 7)).astype(complex)
    stat = SufficientStatistic(z, S, 2, 3)
    np.testing.assert_array_equal(stat.z1, [0, 1])
    np.testing.assert_array_equal(stat.z2, [2, 3, 4])
    np.testing.assert_array_equal(stat.z3, [5])
    np.testing.assert_array_equal(stat.S_block(3, 3), [[6]])
    assert not stat.full


def test_statistic_shape_guard():
    with pytest.raises(DimensionMismatch):
        SufficientStatistic(np.zeros(3), np.eye(4), 1, 1)
