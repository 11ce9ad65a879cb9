import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qubit_decoherence.bath import (
    BathSpectrum, DiscreteBath, QuadratureError, QuadratureSpec, adaptive_integrate,
    discrete_mode_sum, mode_sum, spectral_integral, thermal_factor,
)


def damping(w, t):
    return (1 - np.cos(w * t)) / w ** 2


def damping_small(w, t):
    return 0.5 * t * t * np.ones_like(w)


def test_thermal_factor_examples():
    assert thermal_factor(5.0, 0.0) == 1.0
    assert thermal_factor(2.0, 1.0) == pytest.approx((np.e ** 2 + 1) / (np.e ** 2 - 1), rel=1e-14)
    assert thermal_factor(2.0, 1.0) == pytest.approx(1.31304, abs=1e-5)
    assert thermal_factor(1e-8, 1.0) == pytest.approx(2e8, rel=1e-12)


def test_thermal_factor_continuous_at_series_switch():
    kT = 0.5
    w = 2 * kT * 1e-4
    below = thermal_factor(w * (1 - 1e-12), kT)
    above = thermal_factor(w * (1 + 1e-12), kT)
    assert abs(below - above) / above < 1e-9


def test_thermal_factor_rejects_zero_frequency():
    with pytest.raises(ValueError):
        thermal_factor(0.0, 1.0)


def test_zero_kernel(table1_bath):
    assert spectral_integral(table1_bath(1), lambda w, t: np.zeros_like(w), 1.0) == 0.0


@pytest.mark.parametrize("n, expected", [
    (1, 0.5 * np.log(1 + 900.0)),
    (2, 30.0 - (1 / 30.0) / (1 / 900.0 + 1)),
    (3, 900.0 - np.real((1 / 30.0 - 1j) ** -2)),
])
def test_damping_closed_forms(table1_bath, n, expected):
    value = spectral_integral(table1_bath(n), damping, 1.0, small_omega=damping_small)
    assert value == pytest.approx(1e-6 * expected, rel=1e-8)


def test_reference_values(table1_bath):
    assert spectral_integral(table1_bath(1), damping, 1.0) == pytest.approx(3.40176e-6, rel=1e-5)
    assert spectral_integral(table1_bath(2), damping, 1.0) == pytest.approx(2.99667e-5, rel=1e-5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phase_closed_form(table1_bath, n):
    # int w^(n-2) e^(-s w) (sin w t - w t) dw
    s, t = 1 / 30.0, 1.3
    if n == 1:
        expected = np.arctan(t / s) - t / s
    else:
        from math import gamma
        expected = gamma(n - 1) * np.imag((s - 1j * t) ** (1 - n)) - t * gamma(n) * s ** (-n)
    value = spectral_integral(table1_bath(n), lambda w, tt: (np.sin(w * tt) - w * tt) / w ** 2, t)
    assert value == pytest.approx(1e-6 * expected, rel=1e-8)


def test_tail_cut_doubling(table1_bath):
    for n in (1, 2, 3):
        a = spectral_integral(table1_bath(n), damping, 1.0, QuadratureSpec(tail_cut=60))
        b = spectral_integral(table1_bath(n), damping, 1.0, QuadratureSpec(tail_cut=120))
        assert abs(a - b) <= 1e-9 * abs(b)


@given(st.floats(1e-9, 1e-3), st.floats(0.1, 10))
def test_linear_in_J(J, scale):
    b1 = BathSpectrum(J, 1.5, 20.0)
    v1 = spectral_integral(b1, damping, 0.8)
    v2 = spectral_integral(b1.with_coupling(scale * J), damping, 0.8)
    assert v2 == pytest.approx(scale * v1, rel=1e-8)


def test_vector_valued_kernel(table1_bath):
    bath = table1_bath(2)
    both = spectral_integral(bath, lambda w, t: np.stack([damping(w, t), np.sin(w * t)], axis=-1), 0.7)
    assert both[0] == pytest.approx(spectral_integral(bath, damping, 0.7), rel=1e-8)
    assert both[1] == pytest.approx(spectral_integral(bath, lambda w, t: np.sin(w * t), 0.7), rel=1e-8)


@pytest.mark.parametrize("kT", [0.0, 0.05, 0.7, 4.0])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_correlation_closed_form_matches_quadrature(kT, n):
    bath = BathSpectrum(1e-6, n, 30.0, kT)
    taus = np.array([0.0, 0.3, 1.7])
    corr, sin = bath.correlation(taus)
    # both transforms cancel strongly for n=3 at tau > 0, so they get an absolute floor
    q = QuadratureSpec(abs_tol=1e-13)
    for k, tau in enumerate(taus):
        c = spectral_integral(bath, lambda w, t: thermal_factor(w, kT) * np.cos(w * tau), 0.0, q)
        s = spectral_integral(bath, lambda w, t: np.sin(w * tau), 0.0, q)
        assert corr[k] == pytest.approx(c, rel=1e-8, abs=1e-13)
        assert sin[k] == pytest.approx(s, rel=1e-8, abs=1e-13)


def test_discrete_mode_sums():
    assert discrete_mode_sum([], damping, 1.0) == 0.0
    assert discrete_mode_sum([(1.0, 1e-6)], damping, np.pi) == pytest.approx(2e-6, rel=1e-14)
    one = discrete_mode_sum([(1.3, 2e-6)], damping, 0.4)
    two = discrete_mode_sum([(1.3, 2e-6), (1.3, 2e-6)], damping, 0.4)
    assert two == pytest.approx(2 * one, rel=1e-15)


def test_discrete_bath_correlation_and_dispatch():
    db = DiscreteBath(((0.7, 1e-4), (1.6, 2e-4)), temperature=0.3)
    corr, sin = db.correlation([0.5])
    w, g2 = db.frequencies, db.couplings
    assert corr[0] == pytest.approx(np.sum(g2 / np.tanh(w / 0.6) * np.cos(0.5 * w)), rel=1e-14)
    assert sin[0] == pytest.approx(np.sum(g2 * np.sin(0.5 * w)), rel=1e-14)
    assert mode_sum(db, damping, 0.9) == pytest.approx(np.sum(g2 * damping(w, 0.9)), rel=1e-14)
    assert db.with_coupling(1e-5).couplings.tolist() == [1e-5, 1e-5]
    assert db.scaled(2.0).couplings[1] == pytest.approx(4e-4)


def test_adaptive_integrate_and_budget():
    val, err = adaptive_integrate(lambda x: np.exp(-x) * np.cos(40 * x), 0.0, 10.0, 1.0, rel_tol=1e-12)
    exact = (1 - np.exp(-10) * (np.cos(400) - 40 * np.sin(400))) / (1 + 1600)
    assert val == pytest.approx(exact, rel=1e-11)
    with pytest.raises(QuadratureError) as info:
        adaptive_integrate(lambda x: np.abs(x - 0.3123) ** -0.5, 0.0, 1.0, 1.0, rel_tol=1e-14, max_panels=8)
    assert info.value.estimate is not None


def test_validation():
    for kwargs in (dict(J=-1, n=1, omega_c=1), dict(J=1, n=0, omega_c=1), dict(J=1, n=1, omega_c=0),
                   dict(J=1, n=1, omega_c=1, temperature=-1)):
        with pytest.raises(ValueError):
            BathSpectrum(**kwargs)
    with pytest.raises(ValueError):
        DiscreteBath(((0.0, 1.0),))
    with pytest.raises(ValueError):
        DiscreteBath(((1.0, -1.0),))
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0)
