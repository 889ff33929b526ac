from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakpca.errors import DomainError
from weakpca.power import PowerQuery, asymptotic_power, format_number, noncentrality, power_csv, power_from_ncp, theoretical_curve


@pytest.mark.parametrize("regime", ["i", "ii", "iii", "iv"])
def test_zero_tau(regime):
    q = PowerQuery(6, 0.05, 1.0, 0.0, regime)
    assert noncentrality(q) == 0.0
    assert abs(asymptotic_power(q) - 0.05) <= 1e-10


def test_classical_value():
    assert noncentrality(PowerQuery(6, 0.05, 1.0, 1.0, "i")) == pytest.approx(1.65, abs=1e-14)


def test_critical_value():
    assert noncentrality(PowerQuery(6, 0.05, 1.0, 1.0, "iii")) == pytest.approx(0.140625, abs=1e-15)


def test_degenerate_is_flat():
    assert asymptotic_power(PowerQuery(6, 0.05, 1.0, 3.0, "iv")) == 0.05


def test_classical_needs_xi_below_p():
    with pytest.raises(DomainError):
        PowerQuery(6, 0.05, 6.0, 1.0, "i")
    with pytest.raises(DomainError):
        PowerQuery(6, 0.05, 1.0, 2.5, "iii")


def test_increasing_in_ncp():
    values = [power_from_ncp(x, 6, 0.05) for x in np.linspace(0, 40, 81)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_continuity():
    for x in np.linspace(0, 30, 31):
        assert abs(power_from_ncp(x + 1e-6, 6, 0.05) - power_from_ncp(x, 6, 0.05)) < 1e-4


def test_against_direct_simulation():
    draws = np.random.default_rng(17).noncentral_chisquare(5, 1.65, 10**7)
    from weakpca.chisq import chi2_quantile

    assert abs(np.mean(draws > chi2_quantile(0.95, 5)) - power_from_ncp(1.65, 6, 0.05)) < 3e-3


@given(st.floats(0.01, 5.9), st.floats(0.01, 5.9))
def test_weak_curve_ignores_xi(xi_a, xi_b):
    a = [r.power for r in theoretical_curve(6, 0.05, xi_a, "ii")]
    b = [r.power for r in theoretical_curve(6, 0.05, xi_b, "ii")]
    assert a == b


@given(st.floats(0.01, 5.99))
def test_classical_dominates_weak(xi):
    a = theoretical_curve(6, 0.05, xi, "i")
    b = theoretical_curve(6, 0.05, xi, "ii")
    assert all(x.power >= y.power for x, y in zip(a, b))


def test_critical_ncp_non_monotone():
    xi = 1.3
    grid = np.linspace(0, 2 * xi, 401)
    ncp = np.array([noncentrality(PowerQuery(6, 0.05, xi, t, "iii")) for t in grid])
    zero = np.sqrt(2) * xi
    assert noncentrality(PowerQuery(6, 0.05, xi, zero, "iii")) == pytest.approx(0.0, abs=1e-14)
    k = int(np.argmax(ncp[grid < zero]))
    assert 0 < grid[k] < zero and ncp[k] > ncp[0]


def test_curve_starts_at_alpha_and_csv():
    rows = theoretical_curve(6, 0.05, 1.0, "weak")
    assert rows[0].power == 0.05 and rows[0].regime == "ii"
    text = power_csv(rows)
    assert text.splitlines()[0] == "regime,p,xi,alpha,ell,ncp,power"
    assert text.splitlines()[1] == "ii,6,1,0.05,0,0,0.05"
    assert text.endswith("\n") and len(text.splitlines()) == 6


def test_format_number():
    assert format_number(3.0) == "3"
    assert format_number(0.1) == "0.1"
    assert format_number(True) == "1"
    assert float(format_number(1 / 3)) == 1 / 3
