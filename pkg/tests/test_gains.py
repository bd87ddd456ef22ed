import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delaydiff.errors import GainRangeError, InvalidInputError
from delaydiff.gains import (
    ConstantGain,
    GainSchedule,
    GainVector,
    eval_schedule,
    injection_gains,
    second_step_gains,
    verify_hurwitz,
)

REF_K = [4, 6, 4, 1]


def gains_by_fractions(k, eps, delta):
    """Exact rational evaluation of the factorial sum, term by term."""
    k = [Fraction(v) for v in k]
    eps, delta = Fraction(eps), Fraction(delta)
    n = len(k)
    return [
        sum(delta ** (j - i) * k[j - 1] / (math.factorial(j - i) * eps**j) for j in range(i, n + 1))
        for i in range(1, n + 1)
    ]


def test_reference_gains_are_hurwitz_with_quadruple_root():
    check = verify_hurwitz(REF_K)
    assert check.stable
    # (s+1)^4; a quadruple root is only resolved to ~eps_machine^(1/4)
    np.testing.assert_allclose(check.roots, -np.ones(4), atol=1e-3)


def test_imaginary_roots_rejected():
    check = verify_hurwitz([0, 1])
    assert not check.stable
    np.testing.assert_allclose(sorted(check.roots.imag), [-1, 1])


@pytest.mark.parametrize("k", [[-1], [], [1.0, float("nan")], [1.0, float("inf")]])
def test_invalid_gain_vectors(k):
    with pytest.raises(InvalidInputError):
        verify_hurwitz(k)


def test_second_step_gains_collapse_at_zero_delay():
    np.testing.assert_array_equal(second_step_gains(REF_K, 1.0, 0.0), [4, 6, 4, 1])


def test_second_step_gains_structure():
    g = second_step_gains(REF_K, 1.0, 0.5)
    expected = [float(v) for v in gains_by_fractions(REF_K, 1, Fraction(1, 2))]
    np.testing.assert_allclose(g, expected, rtol=1e-15)
    np.testing.assert_allclose(g, [7.520833333333333, 8.125, 4.5, 1.0], rtol=1e-15)


@given(
    k=st.lists(st.floats(0.1, 10), min_size=2, max_size=6),
    eps=st.floats(1e-3, 1.0),
    delta=st.floats(0.0, 1.0),
)
def test_last_gain_is_uncorrected(k, eps, delta):
    g = second_step_gains(k, eps, delta)
    assert g[-1] == k[-1] / eps ** len(k)


@given(k=st.lists(st.floats(0.1, 10), min_size=2, max_size=6), eps=st.floats(1e-3, 1.0))
def test_collapse_property(k, eps):
    g = second_step_gains(k, eps, 0.0)
    expected = [k[i - 1] / eps**i for i in range(1, len(k) + 1)]
    np.testing.assert_allclose(g, expected, rtol=4 * np.finfo(float).eps)
    np.testing.assert_array_equal(g, injection_gains(k, eps))


@given(
    k=st.lists(st.floats(0.1, 10), min_size=2, max_size=6),
    eps=st.floats(1e-2, 1.0),
    delta=st.floats(0.0, 1.0),
)
def test_scaling_identity(k, eps, delta):
    # g_i * eps^i is a polynomial in delta/eps with coefficients k_j/(j-i)!
    n = len(k)
    g = second_step_gains(k, eps, delta)
    r = delta / eps
    for i in range(1, n + 1):
        coeffs = [k[j - 1] / math.factorial(j - i) for j in range(n, i - 1, -1)]
        poly = np.polyval(coeffs, r)
        assert g[i - 1] * eps**i == pytest.approx(poly, rel=1e-10)


def test_second_step_gains_rejects_bad_eps_and_overflow():
    with pytest.raises(InvalidInputError):
        second_step_gains(REF_K, 0.0, 0.1)
    with pytest.raises(InvalidInputError):
        second_step_gains(REF_K, 0.1, -0.1)
    with pytest.raises(GainRangeError) as info:
        second_step_gains([1.0, 1.0, 1.0], 1e-120, 1.0)
    assert info.value.index == 1


def test_schedule_reference_values():
    sched = GainSchedule(R0=100, p=7, t_max=1)
    assert eval_schedule(sched, 1.0) == 100
    assert eval_schedule(sched, 5.0) == 100
    assert eval_schedule(GainSchedule(100, 7, 1, R_min=1e-3), 0.0) == 1e-3
    assert eval_schedule(sched, 0.5) == pytest.approx(100 * 0.5**7)


def test_schedule_rejects_negative_time_and_bad_params():
    sched = GainSchedule(R0=100, p=7, t_max=1)
    with pytest.raises(InvalidInputError):
        eval_schedule(sched, -0.1)
    with pytest.raises(InvalidInputError):
        GainSchedule(R0=100, p=0.5, t_max=1)
    with pytest.raises(InvalidInputError):
        ConstantGain(0.0)


@given(
    R0=st.floats(0.1, 1e3),
    p=st.floats(1, 10),
    t_max=st.floats(0.1, 5),
    ts=st.lists(st.floats(0, 10), min_size=2, max_size=20),
)
def test_schedule_monotone_and_floored(R0, p, t_max, ts):
    sched = GainSchedule(R0, p, t_max)
    ts = sorted(ts)
    r = sched.rate(np.array(ts))
    assert np.all(np.diff(r) >= 0)
    assert np.all(r >= sched.R_min)
    assert sched.rate(t_max) == sched.rate(t_max + 1.0) == sched.peak_rate


def _stable_polynomial(real_roots, pairs):
    poly = np.array([1.0])
    for a in real_roots:
        poly = np.convolve(poly, [1.0, a])
    for zeta, w in pairs:
        poly = np.convolve(poly, [1.0, 2 * zeta * w, w * w])
    return poly


@settings(max_examples=1000, deadline=None)
@given(
    real_roots=st.lists(st.floats(0.2, 5.0), min_size=0, max_size=4),
    pairs=st.lists(st.tuples(st.floats(0.1, 1.0), st.floats(0.2, 5.0)), min_size=0, max_size=2),
)
def test_hurwitz_gate_randomized(real_roots, pairs):
    poly = _stable_polynomial(real_roots, pairs)
    if len(poly) < 3:
        real_roots = real_roots + [1.0, 2.0]
        poly = _stable_polynomial(real_roots, pairs)
    k = list(poly[1:])
    assert verify_hurwitz(k).stable
    flipped = k[:-1] + [-k[-1]]
    assert not verify_hurwitz(flipped).stable


def test_gain_vector_is_immutable_and_sized():
    gv = GainVector((4, 6, 4, 1))
    assert gv.n == 4
    assert list(gv.polynomial()) == [1, 4, 6, 4, 1]
    with pytest.raises(Exception):
        gv.k = (1, 2)
