"""Step-response and tracking metrics computed from a simulation trace.

Conventions: rise time is 10% -> 90% of the target, settling uses a +-2%
band, overshoot is measured against the target and the steady-state value
is the mean of the last 10% of the trace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NoRiseError, ParameterError

RISE_LOW = 0.1
RISE_HIGH = 0.9
SETTLING_BAND = 0.02
STEADY_WINDOW = 0.1


@dataclass(frozen=True)
class StepMetrics:
    rise_time: float
    settling_time: float | None  # None when the response never settles
    overshoot_abs: float
    overshoot_pct: float
    steady_state_value: float
    steady_state_error: float
    window_transient: bool = False  # final window wider than the settling band

    @property
    def settled(self) -> bool:
        return self.settling_time is not None


def _crossing_time(t, y, level):
    """First upward crossing of ``level``, linearly interpolated; None if absent."""
    above = np.flatnonzero(y >= level)
    if above.size == 0:
        return None
    i = int(above[0])
    if i == 0:
        return None
    y0, y1 = y[i - 1], y[i]
    return float(t[i - 1] + (level - y0) / (y1 - y0) * (t[i] - t[i - 1]))


def step_metrics(trace, target: float) -> StepMetrics:
    """Step metrics of the force column of ``trace`` against ``target``.

    Raises
    ------
    NoRiseError
        The response does not start below 10% and cross 90% of the target.
    """
    if target == 0 or not math.isfinite(target):
        raise ParameterError("step target must be finite and nonzero")
    t = trace.t
    F = np.asarray(trace.F, dtype=float)
    if F.size < 2:
        raise DegenerateInputError("trace too short for step metrics")
    sign = 1.0 if target > 0 else -1.0
    mag = abs(target)
    y = sign * F / mag  # normalized, rising towards 1

    t10 = _crossing_time(t, y, RISE_LOW)
    t90 = _crossing_time(t, y, RISE_HIGH)
    if t10 is None or t90 is None:
        raise NoRiseError("response never rises from below 10% through 90% of the target")

    err = np.abs(y - 1.0)
    outside = np.flatnonzero(err > SETTLING_BAND)
    if outside.size == 0:
        settling = 0.0
    elif outside[-1] == len(y) - 1:
        settling = None
    else:
        i = int(outside[-1])
        e0, e1 = err[i], err[i + 1]
        settling = float(t[i] + (e0 - SETTLING_BAND) / (e0 - e1) * (t[i + 1] - t[i]))

    overshoot_abs = max(0.0, float(np.max(y)) - 1.0) * mag
    window = max(1, int(math.ceil(STEADY_WINDOW * len(F))))
    tail = F[-window:]
    steady = float(np.mean(tail))
    transient = bool(np.ptp(tail) > SETTLING_BAND * mag)
    return StepMetrics(
        rise_time=t90 - t10,
        settling_time=settling,
        overshoot_abs=overshoot_abs,
        overshoot_pct=100.0 * overshoot_abs / mag,
        steady_state_value=steady,
        steady_state_error=abs(target - steady),
        window_transient=transient,
    )


def tracking_rms(trace) -> float:
    """Root-mean-square of the tracking error ``r - F``."""
    e = np.asarray(trace.e, dtype=float)
    if e.size == 0:
        raise DegenerateInputError("empty trace")
    return float(np.sqrt(np.mean(e**2)))


def control_energy(trace) -> float:
    """Discrete integral ``sum(u**2) * Ts`` of the control effort."""
    u = np.asarray(trace.u, dtype=float)
    if u.size == 0:
        raise DegenerateInputError("empty trace")
    return float(np.sum(u**2) * trace.Ts)


def metrics_dict(trace, target: float | None = None) -> dict:
    """Metrics JSON payload; step fields are null without a step target."""
    out = {
        "rise_time_s": None,
        "settling_time_s": None,
        "overshoot_n": None,
        "overshoot_pct": None,
        "steady_state_n": None,
        "steady_state_error_n": None,
        "tracking_rms_n": tracking_rms(trace),
        "control_energy": control_energy(trace),
    }
    if target is not None:
        m = step_metrics(trace, target)
        out.update(
            rise_time_s=m.rise_time,
            settling_time_s=m.settling_time,
            overshoot_n=m.overshoot_abs,
            overshoot_pct=m.overshoot_pct,
            steady_state_n=m.steady_state_value,
            steady_state_error_n=m.steady_state_error,
        )
    return out
