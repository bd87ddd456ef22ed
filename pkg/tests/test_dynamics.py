import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delaydiff.dynamics import (
    DifferentiatorSpec,
    ObserverState,
    baseline_rhs,
    initial_state,
    two_step_rhs,
)
from delaydiff.errors import DivergenceError, InvalidInputError
from delaydiff.gains import ConstantGain, GainSchedule
from delaydiff.signals import SignalSpec, Sine, measure

REF_K = (4, 6, 4, 1)
finite = st.floats(-10, 10)


def spec(delta=0.5, delta_g=0.0, eps=1.0):
    return DifferentiatorSpec(k=REF_K, delta=delta, schedule=ConstantGain(eps), delta_g=delta_g)


def test_baseline_equilibrium():
    x = np.array([0.3, 0, 0, 0])
    np.testing.assert_array_equal(baseline_rhs(x, 0.3, REF_K, 0.01), np.zeros(4))


def test_baseline_direct_substitution():
    np.testing.assert_array_equal(baseline_rhs([0, 0], 1.0, [2, 1], 1.0), [2, 1])


def test_baseline_injection_linear_in_innovation():
    x = np.array([0.0, 0.0, 0.0, 0.0])
    one = baseline_rhs(x, 0.5, REF_K, 0.1)
    two = baseline_rhs(x, 1.0, REF_K, 0.1)
    np.testing.assert_allclose(two, 2 * one)


def test_two_step_rhs_example():
    d = two_step_rhs(initial_state(spec()), 1.0, spec(), 1.0)
    np.testing.assert_allclose(d.x2, [7.520833333333333, 8.125, 4.5, 1.0], rtol=1e-15)
    np.testing.assert_array_equal(d.x1, [4, 6, 4, 1])


def test_zero_innovation_gives_integrator_chains():
    s = spec()
    state = ObserverState([1.0, 2.0, 3.0, 4.0], [0.5, -1.0, 2.0, 7.0])
    d = two_step_rhs(state, 1.0, s, 0.05)
    np.testing.assert_array_equal(d.x1, [2, 3, 4, 0])
    np.testing.assert_array_equal(d.x2, [-1, 2, 7, 0])


@given(x=st.lists(finite, min_size=4, max_size=4), m=finite, eps=st.floats(0.01, 1.0))
def test_zero_delay_stages_identical(x, m, eps):
    s = spec(delta=0.0)
    d = two_step_rhs(ObserverState(x, x), m, s, eps)
    np.testing.assert_array_equal(d.x1, d.x2)


@given(x1=st.lists(finite, min_size=4, max_size=4), x2=st.lists(finite, min_size=4, max_size=4), m=finite)
def test_stage_one_matches_baseline_exactly(x1, x2, m):
    s = spec()
    d = two_step_rhs(ObserverState(x1, x2), m, s, 0.1)
    np.testing.assert_array_equal(d.x1, baseline_rhs(x1, m, REF_K, 0.1))


@given(
    a=st.lists(finite, min_size=8, max_size=8),
    b=st.lists(finite, min_size=8, max_size=8),
    ma=finite,
    mb=finite,
)
def test_rhs_linearity(a, b, ma, mb):
    s = spec()
    za, zb = np.array(a), np.array(b)
    fa = two_step_rhs(ObserverState.unpack(za), ma, s, 0.5).pack()
    fb = two_step_rhs(ObserverState.unpack(zb), mb, s, 0.5).pack()
    fab = two_step_rhs(ObserverState.unpack(za + zb), ma + mb, s, 0.5).pack()
    np.testing.assert_allclose(fab, fa + fb, atol=1e-9 * (1 + np.max(np.abs(fa)) + np.max(np.abs(fb))))


def test_divergence_detected():
    bad = ObserverState([np.nan, 0, 0, 0], [0, 0, 0, 0])
    with pytest.raises(DivergenceError) as info:
        two_step_rhs(bad, 0.0, spec(), 1.0, t=3.5)
    assert info.value.time == 3.5


def test_initial_state_policies():
    s = spec()
    zero = initial_state(s)
    assert not zero.x1.any() and not zero.x2.any()
    seeded = initial_state(s, m0=0.7, policy="seeded")
    np.testing.assert_array_equal(seeded.x1, [0.7, 0, 0, 0])
    np.testing.assert_array_equal(seeded.x2, [0.7, 0, 0, 0])
    m0 = measure(SignalSpec(Sine(), delta=0.5), 0.0)
    assert m0 == pytest.approx(-0.479425538604203)
    with pytest.raises(InvalidInputError):
        initial_state(s, policy="random")


def test_spec_validation():
    with pytest.raises(InvalidInputError):
        DifferentiatorSpec(k=(0, 1), delta=0.5, schedule=ConstantGain(0.1))
    with pytest.raises(InvalidInputError):
        DifferentiatorSpec(k=REF_K, delta=-0.5, schedule=ConstantGain(0.1))
    s = DifferentiatorSpec(k=REF_K, delta=0.5, delta_g=0.1, schedule=GainSchedule(100, 7, 1))
    assert s.n == 4 and math.isclose(s.delta_eff, 0.6)
