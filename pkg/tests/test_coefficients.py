import numpy as np
import pytest

from quartspec.coefficients import (
    DEFAULT_GRID,
    CoefficientSet,
    SET_PRESETS,
    build_primitives,
    component_samples,
    eval_primitive,
    preset_set,
)


def test_component_presets_zero_and_const():
    z = component_samples("zero", 11)
    assert z.shape == (11,)
    assert np.all(z == 0)
    c = component_samples("const:2.5", 11)
    assert np.allclose(c, 2.5)


def test_component_linear_matches_grid():
    n = 101
    v = component_samples("linear:1,3", n)
    x = np.linspace(0.0, 1.0, n)
    assert np.allclose(v, 1.0 + 3.0 * x)


def test_component_step_midpoint_value():
    n = 101
    v = component_samples("step:0.5,2", n)
    x = np.linspace(0.0, 1.0, n)
    assert np.all(v[x < 0.5] == 0.0)
    assert np.all(v[x > 0.5] == 2.0)
    # the on-grid jump sample carries the midpoint value
    assert v[50] == 1.0


def test_component_rejects_garbage():
    with pytest.raises(ValueError):
        component_samples("step:0.5", 11)
    with pytest.raises(ValueError):
        component_samples("sawtooth", 11)
    with pytest.raises(ValueError):
        component_samples("const:abc", 11)


def test_coefficient_set_validation():
    good = np.zeros(5)
    with pytest.raises(ValueError):
        CoefficientSet(tau2=good, tau1=np.zeros(4), r0=good)
    with pytest.raises(ValueError):
        CoefficientSet(tau2=np.array([np.nan] * 5), tau1=good, r0=good)
    with pytest.raises(ValueError):
        CoefficientSet(tau2=np.zeros((5, 1)), tau1=good, r0=good)
    cs = CoefficientSet(tau2=good, tau1=good, r0=good)
    assert cs.grid_size == 5
    assert np.allclose(cs.xgrid, np.linspace(0, 1, 5))


def test_all_set_presets_build():
    for name in SET_PRESETS:
        p = build_primitives(preset_set(name, grid_size=501))
        assert p.grid_size == 501
        assert np.isfinite(p.theta)


def test_preset_default_grid():
    cs = preset_set("zero")
    assert cs.grid_size == DEFAULT_GRID


def test_sigma0_vanishes_at_both_ends():
    p = build_primitives(preset_set("dirac"))
    assert abs(p.sigma0[0]) < 1e-14
    assert abs(p.sigma0[-1]) < 1e-12


def test_primitive_closed_forms_mixed():
    # tau2 = 1 + x, tau1 = 1, r0 = unit step at 1/2
    p = build_primitives(preset_set("mixed"))
    assert abs(p.theta - 1.5) < 1e-10
    assert abs(p.t0 - 1.0) < 1e-14
    assert abs(p.t1 - 2.0) < 1e-14
    assert abs(p.sigma - 1.0) < 1e-10
    x = p.x
    assert np.allclose(p.sigma1, x, atol=1e-12)
    # int_0^x r0 = max(x - 1/2, 0); c0 = -1/2.  The midpoint convention at
    # the jump node leaves one O(h) sample there but keeps totals exact.
    expect = np.maximum(x - 0.5, 0.0) - 0.5 * x
    dev = np.abs(p.sigma0 - expect)
    assert dev.max() < p.h
    off_jump = np.abs(x - 0.5) > 2.0 * p.h
    assert dev[off_jump].max() < 1e-10


def test_tau2_antiderivatives():
    p = build_primitives(preset_set("linear"))  # tau2 = 1 + x
    x = p.x
    t1 = x + 0.5 * x ** 2
    assert np.allclose(p.tau2_int1, t1, atol=1e-9)
    # second table integrates tau2 * (int tau2), i.e. (int tau2)^2 / 2
    assert np.allclose(p.tau2_int2, 0.5 * t1 ** 2, atol=1e-9)


def test_eval_primitive_interpolates():
    p = build_primitives(preset_set("mixed"))
    for xq in (0.0, 0.3101, 0.5, 0.77, 1.0):
        v = eval_primitive(p, "sigma1", xq)
        assert abs(v - xq) < 1e-9
    with pytest.raises(ValueError):
        eval_primitive(p, "sigma1", 1.5)
    with pytest.raises(ValueError):
        eval_primitive(p, "nosuch", 0.5)
