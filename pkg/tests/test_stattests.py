from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakpca.chisq import chi2_quantile, chi2_sf
from weakpca.distributions import EllipticalSpec, RngStream, sample_angular_gaussian, sample_elliptical, sample_sphere
from weakpca.errors import DimensionError, DomainError
from weakpca.linalg import spike_power, sym_eigen
from weakpca.shape import tyler_shape
from weakpca.stattests import anderson_lrt, oracle_sign_test, run_methods, sign_statistic, sign_test, tyler_lrt
from weakpca import validation

from conftest import pilot, random_spd

seeds = st.integers(0, 2**31 - 1)
CHI2_5_95 = chi2_quantile(0.95, 5)


def spiked_data(seed, n=300, p=6, family="gaussian"):
    V = spike_power(p, np.eye(p)[0], 1.0, 1.0)
    spec = EllipticalSpec.gaussian(V) if family == "gaussian" else EllipticalSpec.student(V, 2.0)
    return sample_elliptical(spec, n, RngStream(seed))


class TestSignStatistic:
    def test_hand_example(self):
        u = np.array([[1.0, 1.0]]) / math.sqrt(2)
        assert sign_statistic(u, np.eye(2), np.array([1.0, 0.0])) == pytest.approx(2.0, abs=1e-14)

    def test_zero_when_signs_along_theta0(self):
        theta = np.array([0.6, 0.8, 0.0])
        U = np.vstack([theta, -theta, theta])
        assert sign_statistic(U, np.eye(3), theta) == pytest.approx(0.0, abs=1e-28)

    @given(seeds)
    def test_sign_flip_invariance(self, seed):
        rng = np.random.default_rng(seed)
        U = sample_sphere(4, rng, 40)
        V = random_spd(rng, 4)
        theta = sample_sphere(4, rng)
        assert sign_statistic(U, V, theta) == pytest.approx(sign_statistic(U, V, -theta), rel=1e-12, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            sign_statistic(sample_sphere(3, RngStream(1), 10), np.eye(3), np.eye(4)[0])


class TestOutcomeInvariants:
    @given(seeds, st.sampled_from([0.01, 0.05, 0.1]))
    def test_pvalue_and_decision(self, seed, alpha):
        res = sign_test(spiked_data(seed % 1000), np.eye(6)[0], alpha)
        assert res.df == 5 and res.statistic >= 0
        assert res.p_value == pytest.approx(chi2_sf(res.statistic, 5), abs=1e-15)
        assert res.reject == (res.statistic > chi2_quantile(1 - alpha, 5)) == (res.p_value < alpha)

    def test_bad_alpha(self):
        with pytest.raises(DomainError):
            sign_test(spiked_data(1), np.eye(6)[0], alpha=1.5)


class TestSignTest:
    def test_symmetric_sample_gives_zero(self):
        theta = np.eye(3)[0]
        X = np.vstack([np.diag([3.0, 1.0, 1.0]), -np.diag([3.0, 1.0, 1.0])] * 3)
        res = sign_test(X, theta)
        assert res.statistic == pytest.approx(0.0, abs=1e-20)
        assert res.p_value == pytest.approx(1.0)

    @given(seeds)
    def test_row_rescaling_invariance(self, seed):
        X = spiked_data(seed % 1000, n=100)
        c = np.random.default_rng(seed).uniform(0.01, 100.0, size=(100, 1))
        theta = np.eye(6)[0]
        assert sign_test(c * X, theta).statistic == pytest.approx(sign_test(X, theta).statistic, rel=1e-9)
        assert tyler_lrt(c * X, theta).statistic == pytest.approx(tyler_lrt(X, theta).statistic, rel=1e-9)

    @given(seeds)
    def test_orthogonal_equivariance(self, seed):
        X = spiked_data(seed % 1000, n=150, p=4)
        O, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((4, 4)))
        theta = np.eye(4)[0]
        assert abs(sign_test(X @ O.T, O @ theta).statistic - sign_test(X, theta).statistic) <= 1e-8

    def test_zero_row_rejected(self):
        X = spiked_data(2, n=50)
        X[7] = 0.0
        with pytest.raises(DomainError):
            sign_test(X, np.eye(6)[0])

    def test_center_subtracts_location(self):
        X = spiked_data(3, n=200)
        mu = np.arange(6.0)
        assert sign_test(X + mu, np.eye(6)[0], center=mu).statistic == pytest.approx(
            sign_test(X, np.eye(6)[0]).statistic, rel=1e-9
        )

    def test_second_eigenvector(self):
        V = np.diag([3.0, 2.0, 0.5, 0.5])
        X = sample_elliptical(EllipticalSpec.gaussian(V), 2000, RngStream(4))
        assert not sign_test(X, np.eye(4)[1], j=2).reject
        assert sign_test(X, np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2), j=2).reject

    def test_single_spike_variant(self):
        X = spiked_data(5, n=500)
        res = sign_test(X, np.eye(6)[0], single_spike=True)
        assert res.method == "sign" and res.statistic >= 0
        with pytest.raises(DomainError):
            sign_test(X, np.eye(6)[1], j=2, single_spike=True)

    def test_null_rejection_rate(self):
        # p = 6, n = 2000, angular Gaussian under a single-spike null
        rec = pilot("fig2_null_ks_w0")
        assert abs(rec["value"]["rejection_frequency"] - 0.05) <= 0.02


@pytest.mark.parametrize("w", [0, 1, 2, 3])
def test_null_distribution_ks(w):
    from weakpca.montecarlo import build_scatter

    rec = pilot(f"fig2_null_ks_w{w}")
    theta0 = np.eye(6)[0]
    scatter = build_scatter("fig2", 6, 2000, w, 0, theta0)
    stats = validation.null_sign_statistics(scatter, 2000, 2000, theta0=theta0, seed=rec["seed"], tag=30 + w)
    ks = validation.ks_statistic_chi2(stats, 5)
    assert ks == pytest.approx(rec["value"]["ks"], rel=1e-9)
    assert ks < 1.63 / math.sqrt(2000)


class TestTylerLRT:
    def test_zero_at_own_eigenvector(self):
        X = spiked_data(6)
        from weakpca.distributions import spatial_signs

        theta = sym_eigen(tyler_shape(spatial_signs(X))).eigenvectors[:, 0]
        assert tyler_lrt(X, theta).statistic == pytest.approx(0.0, abs=1e-9)

    @given(seeds)
    def test_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        theta = sample_sphere(6, rng)
        assert tyler_lrt(spiked_data(seed % 1000, n=80), theta).statistic >= 0

    def test_close_to_sign_test_under_null(self):
        rec = pilot("equivalence_n2000")
        gaps = validation.equivalence_gaps(2000, M=rec["params"]["M"], seed=rec["seed"])
        assert gaps.mean_abs_lrt_gap == pytest.approx(rec["value"]["lrt_gap"], rel=1e-9)
        assert gaps.mean_abs_lrt_gap < 0.2


class TestAnderson:
    def test_zero_at_covariance_eigenvector(self):
        X = spiked_data(7)
        theta = sym_eigen(X.T @ X / len(X)).eigenvectors[:, 0]
        assert anderson_lrt(X, theta).statistic == pytest.approx(0.0, abs=1e-9)

    def test_needs_more_rows_than_columns(self):
        with pytest.raises(DomainError):
            anderson_lrt(np.eye(3), np.eye(3)[0])

    def test_size_gaussian_and_t2(self):
        from weakpca import montecarlo as mc

        cfg = mc.with_replications(mc.preset(2, ws=(0,), distributions=("gaussian", "t2"), methods=("anderson",)), 2000)
        rows = {r.distribution: r.rejection_frequency for r in mc.run_scenario(cfg)}
        assert abs(rows["gaussian"] - 0.05) <= 0.02
        assert abs(rows["t2"] - 0.05) > 0.03


class TestOracle:
    def test_ks_and_gap(self):
        rec = pilot("equivalence_n5000")
        gaps = validation.equivalence_gaps(5000, M=rec["params"]["M"], seed=rec["seed"])
        assert gaps.mean_abs_oracle_gap == pytest.approx(rec["value"]["oracle_gap"], rel=1e-9)
        assert gaps.mean_abs_oracle_gap < 0.2

    def test_oracle_null_law(self):
        from scipy import stats

        V0 = spike_power(6, np.eye(6)[0], 1.0, 1.0)
        values = [
            oracle_sign_test(sample_angular_gaussian(V0, 5000, RngStream(41, r)), V0, np.eye(6)[0]).statistic
            for r in range(2000)
        ]
        assert stats.kstest(values, "chi2", args=(5,)).pvalue > 0.01

    def test_uniform_mean(self):
        values = [oracle_sign_test(sample_sphere(6, RngStream(42, r), 200), np.eye(6), np.eye(6)[0]).statistic for r in range(5000)]
        assert abs(np.mean(values) - 5.0) <= 0.2


def test_run_methods_matches_individual_tests():
    X = spiked_data(9, n=400)
    theta = np.eye(6)[0]
    V0 = sym_eigen(spike_power(6, theta, 1.0, 1.0))
    res = run_methods(X, theta, ("sign", "tyler_lrt", "anderson", "sign_oracle"), null_shape=V0)
    assert res["sign"].statistic == pytest.approx(sign_test(X, theta).statistic, rel=1e-12)
    assert res["tyler_lrt"].statistic == pytest.approx(tyler_lrt(X, theta).statistic, rel=1e-12)
    assert res["anderson"].statistic == pytest.approx(anderson_lrt(X, theta).statistic, rel=1e-12)
    with pytest.raises(DomainError):
        run_methods(X, theta, ("bogus",))
