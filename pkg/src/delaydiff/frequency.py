"""Closed-form Laplace-domain responses of the two-step differentiator.

Each function documents whether the measurement's ``exp(-s*delta)`` factor
is included. Polynomials are evaluated by Horner's scheme in ``s*eps`` so
that the mixed scales of ``eps`` and ``delta`` do not cost precision.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import InvalidInputError, PoleProximityError
from .gains import GainsLike, as_gains

POLE_TOL = 1e-300


def _horner(coeffs, x):
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _denominator(k, se):
    # (s eps)^n + k_1 (s eps)^(n-1) + ... + k_n
    d = _horner((1.0,) + k, se)
    if np.any(np.abs(d) < POLE_TOL):
        raise PoleProximityError("evaluation point is on a pole of the observer")
    return d


def _check_eps(eps):
    if not eps > 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")


def stage1_tf(s, k: GainsLike, eps: float):
    """First-stage position estimate over the delayed input, exp factor excluded.

    ``(k_1 (s eps)^(n-1) + ... + k_n) / ((s eps)^n + k_1 (s eps)^(n-1) + ... + k_n)``
    """
    _check_eps(eps)
    k = as_gains(k).k
    se = np.asarray(s, dtype=complex) * eps
    return _horner(k, se) / _denominator(k, se)


def innovation_tf(s, k: GainsLike, eps: float):
    """Innovation over the delayed input, ``(s eps)^n / D``; exp factor excluded."""
    _check_eps(eps)
    k = as_gains(k).k
    se = np.asarray(s, dtype=complex) * eps
    return se ** len(k) / _denominator(k, se)


def stage2_numerator_coeffs(i: int, k: GainsLike, eps: float, delta_eff: float) -> np.ndarray:
    """Coefficients of N_i in powers of ``s eps``, highest power first.

    The coefficient of ``(s eps)^(n-m)`` is
    ``sum_{j=m}^{n} k_j (delta_eff/eps)^(j-m) / (j-m)!``.
    """
    k = as_gains(k).k
    n = len(k)
    ratio = delta_eff / eps
    return np.array(
        [
            sum(k[j - 1] * ratio ** (j - m) / math.factorial(j - m) for j in range(m, n + 1))
            for m in range(i, n + 1)
        ]
    )


def stage2_tf(i: int, s, k: GainsLike, eps: float, delta_eff: float, delay: Optional[float] = None):
    """Second-stage state ``x_{i,2}`` over the UNDELAYED input, exp factor included.

    ``s^(i-1) N_i(s) / D(s) * exp(-s * delay)`` where the gains use
    ``delta_eff`` and ``delay`` (default ``delta_eff``) is the measurement delay.
    """
    _check_eps(eps)
    gv = as_gains(k)
    if not 1 <= i <= gv.n:
        raise InvalidInputError(f"output index must be in 1..{gv.n}, got {i}")
    delay = delta_eff if delay is None else delay
    s = np.asarray(s, dtype=complex)
    se = s * eps
    num = _horner(stage2_numerator_coeffs(i, gv, eps, delta_eff), se)
    return s ** (i - 1) * num / _denominator(gv.k, se) * np.exp(-s * delay)


def baseline_tf(i: int, s, k: GainsLike, eps: float, delay: float):
    """Baseline state ``x_i`` over the undelayed input, exp factor included."""
    return stage2_tf(i, s, k, eps, 0.0, delay=delay)


def taylor_truncation(i: int, s, delta: float, n: int):
    """``exp(-s delta) * sum_{m=0}^{n-i} (s delta)^m / m! - 1``.

    This is the exact relative deviation of the eps -> 0 second-stage response
    from the ideal differentiator ``s^(i-1)``.
    """
    x = np.asarray(s, dtype=complex) * delta
    partial = _horner([1.0 / math.factorial(m) for m in range(n - i, -1, -1)], x)
    return np.exp(-x) * partial - 1.0


def ideal_tf(i: int, s):
    """Ideal ``(i-1)``-th differentiator ``s^(i-1)``."""
    return np.asarray(s, dtype=complex) ** (i - 1)


def bode_grid(i: int, omegas, k: GainsLike, eps: float, delta_eff: float, delay: Optional[float] = None):
    """Magnitude and unwrapped phase (degrees) of ``stage2_tf`` on ``s = j omega``."""
    h = stage2_tf(i, 1j * np.asarray(omegas, dtype=float), k, eps, delta_eff, delay)
    return np.abs(h), np.degrees(np.unwrap(np.angle(h)))
