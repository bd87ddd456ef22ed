"""Two-step high-gain differentiation of delayed measurements.

A first high-gain stage reconstructs the delayed signal and its
derivatives; a second stage reuses the first stage's innovation with
Taylor-corrected gains to estimate the present, undelayed derivatives.
"""

from .dynamics import DifferentiatorSpec, ObserverState, baseline_rhs, initial_state, two_step_rhs
from .errors import (
    AnalysisError,
    BufferUnderflowError,
    ConfigError,
    DelayDiffError,
    DivergenceError,
    GainRangeError,
    InvalidInputError,
    PoleProximityError,
    StabilityError,
    StabilityWarning,
)
from .gains import (
    ConstantGain,
    GainSchedule,
    GainVector,
    eval_schedule,
    injection_gains,
    second_step_gains,
    verify_hurwitz,
)
from .integrator import IntegratorConfig, Trace, integrate, step_once
from .signals import DelayBuffer, NoiseSpec, NoiseStream, Polynomial, SignalSpec, Sine, SumOfSines, measure, truth

__version__ = "0.1.0"
