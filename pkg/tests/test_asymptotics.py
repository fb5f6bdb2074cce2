import math

import numpy as np
import pytest

from quartspec.asymptotics import (
    c_constants,
    constants_from_primitives,
    make_constants,
    omega_order,
    predict_beta,
    predict_lambda,
    predict_rho3,
    reduced_char,
    remainder_analysis,
)

_SQRT2 = math.sqrt(2.0)


def _a_value(n):
    return _SQRT2 * math.pi * n + math.pi / (2.0 * _SQRT2)


def test_omega_order_valid_in_every_sector():
    for kappa in range(1, 9):
        ctx = omega_order(kappa)
        assert sorted(ctx.omegas, key=lambda w: (w.real, w.imag)) == sorted(
            [1, -1, 1j, -1j], key=lambda w: (w.real, w.imag)
        )
        # ordering must hold throughout the open sector, not just midway
        for frac in (0.1, 0.5, 0.9):
            rho = np.exp(1j * math.pi * (kappa - frac) / 8.0)
            parts = [(rho * w).real for w in ctx.omegas]
            assert all(a < b for a, b in zip(parts, parts[1:]))
        assert ctx.big_omega.shape == (4, 4)
        assert abs(np.linalg.det(ctx.big_omega)) > 1e-12
        for j in range(4):
            for k in range(4):
                assert ctx.big_omega[j, k] == ctx.omegas[k] ** j


def test_omega_order_first_sector_concrete():
    ctx = omega_order(1)
    assert ctx.omegas == (-1, 1j, -1j, 1)
    with pytest.raises(ValueError):
        omega_order(0)
    with pytest.raises(ValueError):
        omega_order(9)


def test_c_constant_reference_entry():
    # hand evaluation for the first sector: c_(0)04 = 1/8
    c0, c1 = c_constants(omega_order(1))
    assert c0[0, 3] == pytest.approx(0.125, abs=1e-14)
    assert c0.shape == (4, 4) and c1.shape == (4, 4)


def test_predict_lambda_zero_coefficients():
    ac = make_constants(0.0, 0.0, 0.0, 0.0)
    assert predict_lambda(2, 1, ac) == pytest.approx((1.5 * math.pi) ** 4)
    a1 = _a_value(1)
    assert predict_lambda(1, 1, ac) == pytest.approx(-(a1 ** 4))
    assert predict_lambda(3, 1, ac) == pytest.approx(-(a1 ** 4))


def test_problem1_problem3_split_by_sigma():
    # the only k-dependence of the odd problems is the sign of sigma
    ac = make_constants(1.5, 1.0, 2.0, 1.0)
    for n in (1, 4, 9):
        gap = predict_lambda(1, n, ac) - predict_lambda(3, n, ac)
        want = -4.0 * _SQRT2 * ac.sigma * _a_value(n)
        assert gap == pytest.approx(want, rel=1e-12)


def test_rho3_fourth_power_tracks_lambda3():
    ac = make_constants(1.5, 1.0, 2.0, 1.0)
    rel = {}
    for n in (5, 20):
        lam = predict_lambda(3, n, ac)
        rel[n] = abs(predict_rho3(n, ac) ** 4 - lam) / abs(lam)
    assert rel[20] < 5e-8
    assert rel[20] < rel[5]


def test_predict_beta_values():
    ac0 = make_constants(0.0, 0.0, 0.0, 0.0)
    for k in (1, 2, 3):
        assert predict_beta(k, 7, -123.0, ac0) == pytest.approx(492.0)
    ac = make_constants(1.5, 1.0, 2.0, 1.0)
    lam = 1.0
    # frozen hand value: k = 2, corr = (t0 + 2 theta)/(4 pi^2 n^2) = 1/pi^2
    assert predict_beta(2, 1, lam, ac) == pytest.approx(
        -4.0 * (1.0 + 1.0 / math.pi ** 2), rel=1e-12
    )
    # odd problems share one correction and decay like n^-2
    assert predict_beta(1, 3, lam, ac) == predict_beta(3, 3, lam, ac)
    d3 = predict_beta(1, 3, lam, ac) / (-4.0 * lam) - 1.0
    d6 = predict_beta(1, 6, lam, ac) / (-4.0 * lam) - 1.0
    assert d3 / d6 == pytest.approx(4.0, rel=1e-12)


def test_prediction_index_validation():
    ac = make_constants(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        predict_lambda(4, 1, ac)
    with pytest.raises(ValueError):
        predict_lambda(1, 0, ac)
    with pytest.raises(ValueError):
        predict_rho3(0, ac)
    with pytest.raises(ValueError):
        predict_beta(5, 1, 1.0, ac)


def test_reduced_char_exact_zero_locations():
    # with zero coefficients d(rho) = -4i - 4 exp(-(1+i) rho), vanishing
    # exactly on the arg = pi/4 ray at the A_n spacings
    ac = make_constants(0.0, 0.0, 0.0, 0.0)
    w = np.exp(1j * math.pi / 4.0)
    for n in range(1, 6):
        assert abs(reduced_char(w * _a_value(n), ac)) < 1e-12


def test_reduced_char_plus_over_derivative_is_minus_one():
    ac = make_constants(0.0, 0.0, 0.0, 0.0)
    rho = np.exp(1j * math.pi / 4.0) * _a_value(3)
    h = 1e-6 * rho / abs(rho)
    deriv = (reduced_char(rho + h, ac) - reduced_char(rho - h, ac)) / (2.0 * h)
    ratio = reduced_char(rho, ac, plus=True) / deriv
    assert ratio == pytest.approx(-1.0, rel=1e-6)


def test_reduced_char_domain_guards():
    ac = make_constants(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        reduced_char(0.0, ac)
    with pytest.raises(ValueError):
        reduced_char(-2.0, ac)  # cross term grows outside the sector


def test_remainder_analysis_decaying_tail():
    j = np.arange(1, 21, dtype=float)
    pred = j ** 4
    num = pred + 1.0 / j
    rep = remainder_analysis(num, pred, power=1)
    assert np.allclose(rep.kappa_hat, 1.0 / j ** 2)
    assert rep.l2_consistent
    assert rep.tail_max == pytest.approx(1.0 / 11.0 ** 2)


def test_remainder_analysis_growing_tail_flagged():
    j = np.arange(1, 21, dtype=float)
    pred = np.zeros_like(j)
    rep = remainder_analysis(j ** 2, pred, power=1)
    assert not rep.l2_consistent
    assert rep.growth_ratio > 1.0


def test_remainder_analysis_uses_window_position():
    # indices are positions inside the window, not global mode numbers
    pred = np.zeros(10)
    num = np.arange(1.0, 11.0)
    rep = remainder_analysis(num, pred, power=1)
    assert np.allclose(rep.kappa_hat, 1.0)


def test_remainder_analysis_validation():
    with pytest.raises(ValueError):
        remainder_analysis([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        remainder_analysis(np.zeros(6), np.zeros(5))


def test_constants_from_mixed_preset(prims):
    ac = constants_from_primitives(prims("mixed"))
    assert ac.theta == pytest.approx(1.5, rel=1e-12)
    assert ac.t0 == pytest.approx(1.0, rel=1e-12)
    assert ac.t1 == pytest.approx(2.0, rel=1e-12)
    assert ac.sigma == pytest.approx(1.0, rel=1e-12)
