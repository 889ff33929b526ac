from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakpca import validation
from weakpca.distributions import RngStream, sample_angular_gaussian, sample_sphere
from weakpca.errors import DomainError
from weakpca.lecam import (
    Perturbation,
    RegimeTag,
    SpikeModel,
    build_alt_shape,
    build_null_shape,
    central_sequence,
    fisher_information,
    gamma_n,
    lan_quadratic,
    log_likelihood_ratio,
    make_perturbation,
    nu_n,
    upsilon_matrix,
)

from conftest import pilot

seeds = st.integers(0, 2**31 - 1)
E6 = np.eye(6)


def model6(delta=1.0, xi=1.0):
    return SpikeModel(6, E6[0], xi, delta)


class TestGamma:
    def test_value(self):
        assert gamma_n(model6()) == pytest.approx(6 / 11, abs=1e-15)

    @given(st.integers(2, 20), st.floats(0.01, 0.99), st.floats(0.1, 5.0))
    def test_identity(self, p, frac, xi):
        delta = frac * p / xi
        m = SpikeModel(p, np.eye(p)[0], xi, delta)
        g = gamma_n(m)
        assert 0 < g < 1
        assert p * delta * xi / g == pytest.approx(p + (p - 1) * delta * xi, rel=1e-13)

    def test_small_delta_limit(self):
        m = model6(delta=1e-9)
        assert gamma_n(m) / m.deltaxi == pytest.approx(1.0, abs=1e-8)


class TestShapes:
    def test_null_spectrum(self):
        lam = np.sort(np.linalg.eigvalsh(build_null_shape(model6())))[::-1]
        assert lam[0] == pytest.approx(11 / 6, abs=1e-14)
        assert np.allclose(lam[1:], 5 / 6, atol=1e-14)

    def test_vanishing_spike(self):
        assert np.allclose(build_null_shape(model6(delta=1e-14)), np.eye(6), atol=1e-13)

    @given(seeds, st.floats(0.0, 1.9))
    def test_alt_shares_spectrum(self, seed, ell):
        rng = np.random.default_rng(seed)
        m = model6(delta=rng.uniform(0.05, 2.0))
        pert = make_perturbation(m.theta0, rng.standard_normal(6), ell, 1.0)
        V1 = build_alt_shape(m, pert)
        assert np.trace(V1) == pytest.approx(6.0, abs=1e-12)
        assert np.allclose(np.linalg.eigvalsh(V1), np.linalg.eigvalsh(build_null_shape(m)), atol=1e-12)

    def test_alt_rejects_bad_perturbation(self):
        with pytest.raises(DomainError):
            build_alt_shape(model6(), Perturbation(E6[1], 0.5))

    def test_invalid_model(self):
        with pytest.raises(DomainError):
            SpikeModel(6, E6[0], 1.0, 6.0)


class TestPerturbation:
    def test_zero(self):
        pert = make_perturbation(E6[0], E6[1], 0.0, 0.3)
        assert np.array_equal(pert.tau, np.zeros(6))

    def test_angle(self):
        pert = make_perturbation(E6[0], E6[1], 2.0, 0.1)
        a = 2 * math.asin(0.1)
        assert a == pytest.approx(0.200335, abs=1e-6)
        theta1 = E6[0] + pert.nu * pert.tau
        assert np.allclose(theta1, [math.cos(a), math.sin(a), 0, 0, 0, 0], atol=1e-15)

    @given(seeds, st.floats(0.01, 3.0), st.floats(0.0, 1.0))
    def test_constraints(self, seed, nu, frac):
        rng = np.random.default_rng(seed)
        theta0 = sample_sphere(5, rng)
        ell = frac * 2.0 / nu
        pert = make_perturbation(theta0, rng.standard_normal(5), ell, nu)
        pert.check(theta0)
        assert pert.norm == pytest.approx(ell, abs=1e-12)
        assert np.linalg.norm(theta0 + nu * pert.tau) == pytest.approx(1.0, abs=1e-12)

    def test_too_large(self):
        with pytest.raises(DomainError):
            make_perturbation(E6[0], E6[1], 3.0, 1.0)


class TestRegimes:
    def test_from_rate(self):
        assert RegimeTag.from_rate(0).kind == "classical"
        assert RegimeTag.from_rate(0.25).kind == "weak"
        assert RegimeTag.from_rate(0.5).kind == "critical"
        assert RegimeTag.from_rate(0.75).kind == "degenerate"
        assert RegimeTag.from_rate(0.5).delta(10000) == pytest.approx(0.01)

    def test_inconsistent(self):
        with pytest.raises(DomainError):
            RegimeTag("weak", 0.6)

    def test_nu(self):
        m = model6()
        assert nu_n(m, 100) == pytest.approx(1 / (10 * 6 / 11))
        assert nu_n(m, 100, critical_shortcut=True) == 1.0


class TestLikelihoodRatio:
    def test_zero_perturbation(self):
        m = model6()
        U = sample_angular_gaussian(build_null_shape(m), 50, RngStream(1))
        assert log_likelihood_ratio(U, m, make_perturbation(m.theta0, E6[1], 0.0, 0.5)) == 0.0

    def test_matches_logpdf(self):
        assert validation.llr_logpdf_discrepancy(200) <= 1e-9

    @given(seeds)
    def test_antisymmetry(self, seed):
        rng = np.random.default_rng(seed)
        m0 = model6(delta=0.7)
        pert = make_perturbation(m0.theta0, rng.standard_normal(6), 1.0, 0.4)
        theta1 = m0.theta0 + pert.nu * pert.tau
        m1 = SpikeModel(6, theta1 / np.linalg.norm(theta1), m0.xi, m0.delta)
        back = Perturbation((m0.theta0 - m1.theta0) / pert.nu, pert.nu)
        U = sample_angular_gaussian(build_null_shape(m0), 30, rng)
        assert log_likelihood_ratio(U, m1, back) == pytest.approx(-log_likelihood_ratio(U, m0, pert), abs=1e-10)


class TestCentralSequence:
    def test_axis_sample_vanishes(self):
        m = SpikeModel(4, np.eye(4)[0], 1.0, 1e-300)
        U = np.vstack([np.eye(4), -np.eye(4)])
        assert np.allclose(upsilon_matrix(U, m), 0.0, atol=1e-13)
        assert np.allclose(central_sequence(U, m), 0.0, atol=1e-13)

    @given(seeds)
    def test_orthogonal_to_theta0(self, seed):
        m = model6(delta=0.3)
        U = sample_angular_gaussian(build_null_shape(m), 40, np.random.default_rng(seed))
        for kind in ("classical", "weak"):
            assert abs(central_sequence(U, m, kind) @ m.theta0) < 1e-12

    def test_classical_needs_xi_below_p(self):
        m = SpikeModel(2, np.eye(2)[0], 3.0, 0.5)
        with pytest.raises(DomainError):
            central_sequence(sample_sphere(2, RngStream(3), 10), m, "classical")

    def test_information_factor(self):
        G = fisher_information("i", 6, 1.0, E6[0])
        assert G[1, 1] == pytest.approx(1.65)

    def test_covariances(self):
        rec = pilot("delta_cov_max_dev")
        C, T = validation.central_sequence_covariance(5000, M=2000, seed=rec["seed"])
        assert np.abs(C - T).max() == pytest.approx(rec["value"], rel=1e-9)
        assert np.abs(C - T).max() <= 0.05
        rec = pilot("upsilon_cov_max_dev")
        C, T = validation.upsilon_covariance(5000, M=2000, p=3, seed=rec["seed"])
        assert np.abs(C - T).max() == pytest.approx(rec["value"], rel=1e-9)
        assert np.abs(C - T).max() <= 0.05


class TestQuadratic:
    @pytest.mark.parametrize("kind", ["i", "ii", "iii"])
    def test_zero_tau(self, kind):
        stat = np.eye(6) if kind == "iii" else np.ones(6)
        assert lan_quadratic(kind, np.zeros(6), E6[0], 1.0, stat) == 0.0

    def test_degenerate_raises(self):
        with pytest.raises(DomainError):
            lan_quadratic("iv", np.zeros(6), E6[0], 1.0, np.zeros(6))

    @pytest.mark.parametrize("kind,ell", [("classical", 1), ("classical", 2), ("weak", 1), ("weak", 2)])
    def test_remainder_shrinks(self, kind, ell):
        rec = pilot(f"lan_remainder_{kind}_ell{ell}")
        small, large = (validation.lan_remainder_median(kind, n, ell, M=1000, seed=rec["seed"]) for n in (1000, 10000))
        assert [small, large] == pytest.approx(rec["value"], rel=1e-9)
        assert large < small

    def test_degenerate_llr_shrinks(self):
        rec = pilot("degenerate_q95_ell1.0")
        assert rec["value"][1] < rec["value"][0]
