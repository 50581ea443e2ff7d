import math

import numpy as np
import pytest

from wronskian_scatter import potentials as pot
from wronskian_scatter.errors import InvalidParams, NumericalOverflow
from wronskian_scatter.integrator import (IntegrationConfig, discrete_wavenumber, propagate_pair,
                                          rk4_matrix, rk4_step)
from wronskian_scatter.validation import observed_order

from conftest import BUILTINS


def test_rk4_step_cosine():
    y, _ = rk4_step((1.0, 0.0), 0.0, 0.01, lambda x: 1.0)
    assert abs(y - math.cos(0.01)) < 1e-12


def test_rk4_step_linear_exact():
    assert rk4_step((0.0, 1.0), 3.7, 0.25, lambda x: 0.0) == (0.25, 1.0)


def test_rk4_step_hyperbolic():
    y, _ = rk4_step((1.0, 0.0), 0.0, 0.01, lambda x: -1.0)
    assert abs(y - math.cosh(0.01)) < 1e-12


def test_rk4_step_leftward():
    y, p = rk4_step((1.0, 0.0), 0.0, -0.01, lambda x: 1.0)
    assert abs(y - math.cos(0.01)) < 1e-12
    assert abs(p - math.sin(0.01)) < 1e-12


def test_rk4_step_overflow():
    with pytest.raises(NumericalOverflow):
        rk4_step((1e308, 1e308), 0.0, 1.0, lambda x: -10.0)


def test_matrix_form_matches_scalar_step():
    q = lambda x: 2.0 * (1.0 - 2.0 * math.exp(-x * x))
    x, h = 0.3, 0.01
    m = rk4_matrix(q(x), q(x + h / 2), q(x + h), h)
    for state in ((1.0, 0.0), (0.0, 1.0), (0.4, -1.3)):
        expect = rk4_step(state, x, h, q)
        got = m @ np.array(state)
        assert got == pytest.approx(expect, abs=1e-15)


def test_unimodular_matrix_has_unit_determinant():
    m = rk4_matrix(np.array([20.0, -3.0]), np.array([19.0, -2.5]), np.array([18.0, -2.0]), 0.05, True)
    assert np.linalg.det(m) == pytest.approx([1.0, 1.0], abs=1e-15)


def test_discrete_wavenumber_close_to_continuum():
    # phase error of RK4 per unit length is k (kh)^4 / 120
    k = math.sqrt(20.0)
    kt = discrete_wavenumber(20.0, 0.01)
    assert abs(kt - k) == pytest.approx(k * (k * 0.01) ** 4 / 120, rel=0.05)


def test_config_validation():
    with pytest.raises(InvalidParams):
        IntegrationConfig(h=0)
    with pytest.raises(InvalidParams):
        IntegrationConfig(max_steps_per_side=5)
    with pytest.raises(InvalidParams):
        IntegrationConfig(x0=30.0)


def test_initial_conditions_at_anchor():
    tr = propagate_pair(pot.gaussian_barrier(2), 1.0)
    a = tr.anchor
    assert (tr.c[a], tr.cp[a], tr.s[a], tr.sp[a]) == (1.0, 0.0, 0.0, 1.0)
    assert tr.x[a] == 0.0


@pytest.mark.parametrize("unimodular", [True, False])
def test_free_particle_matches_trig(unimodular):
    tr = propagate_pair(pot.free(), 0.5, IntegrationConfig(unimodular=unimodular))
    assert np.max(np.abs(tr.c - np.cos(tr.x))) < 1e-9
    assert np.max(np.abs(tr.s - np.sin(tr.x))) < 1e-9
    assert tr.x[0] == pytest.approx(-5.0) and tr.x[-1] == pytest.approx(5.0)


def test_parity_synthesis_is_exact_mirror():
    tr = propagate_pair(pot.sech2_well(2.0), 0.7)
    a = tr.anchor
    assert np.array_equal(tr.c[:a][::-1], tr.c[a + 1:])
    assert np.array_equal(tr.cp[:a][::-1], -tr.cp[a + 1:])
    assert np.array_equal(tr.s[:a][::-1], -tr.s[a + 1:])
    assert np.array_equal(tr.sp[:a][::-1], tr.sp[a + 1:])


def test_two_sided_integration_agrees_with_mirror():
    cfg = IntegrationConfig(use_parity=False)
    tr = propagate_pair(pot.gaussian_barrier(2.0), 1.0, cfg)
    a = tr.anchor
    assert np.allclose(tr.c[:a][::-1], tr.c[a + 1:], rtol=0, atol=1e-13)
    assert np.allclose(tr.s[:a][::-1], -tr.s[a + 1:], rtol=0, atol=1e-13)


@pytest.mark.parametrize("model", BUILTINS, ids=lambda m: m.family.value)
@pytest.mark.parametrize("eps", [0.25, 1.0, 10.0])
def test_wronskian_conservation(model, eps):
    tr = propagate_pair(model, eps, IntegrationConfig(x_max=10.0))
    assert np.max(np.abs(tr.wronskian_cs() - 1.0)) <= 1e-8


def test_classical_rk4_loses_wronskian_at_high_energy():
    # motivation for unit-determinant steps: (kh)^6/72 per step
    tr = propagate_pair(pot.free(), 10.0, IntegrationConfig(x_max=10.0, unimodular=False))
    assert np.max(np.abs(tr.wronskian_cs() - 1.0)) > 1e-8


def test_global_order_four():
    p = observed_order(pot.free(), 0.5, 0.01)
    assert 3.5 <= p <= 4.5


def test_determinism():
    a = propagate_pair(pot.square_barrier(2, 1), 1.3)
    b = propagate_pair(pot.square_barrier(2, 1), 1.3)
    for name in ("x", "c", "cp", "s", "sp"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_jump_inside_step_is_split():
    # width 0.955 puts the edges strictly between nodes of h=0.01
    model = pot.square_barrier(2.0, 0.955)
    tr = propagate_pair(model, 1.0, IntegrationConfig(x_max=2.0))
    assert np.max(np.abs(tr.wronskian_cs() - 1.0)) < 1e-12


def test_overflow_in_deep_tunnelling():
    with pytest.raises(NumericalOverflow):
        propagate_pair(pot.square_barrier(5000.0, 10.0), 0.01, IntegrationConfig(x_max=6.0))
