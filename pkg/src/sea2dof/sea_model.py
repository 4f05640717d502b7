"""Identified plant of the cable-driven series elastic actuator.

Motor velocity follows ``G(s) = 69788 / (s^2 + 39.2 s + 840)`` (rad/s per
volt). Integrating velocity, reducing through the gearhead and winch and
stretching the spring gives the force plant

    P(s) = G(s) * (1/s) * (r / Kg) * Ks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .lti import TransferFunction
from .poly import Polynomial

ROUNDED_PLANT_GAIN = 183440.0


@dataclass(frozen=True)
class SeaParams:
    """Plant constants; the defaults are the identified hardware values.

    ``use_paper_gain`` replaces the exact numerator product (about 183443)
    by the rounded 183440 used in the published plant, for regression runs.
    """

    motor_num: tuple = (69788.0,)
    motor_den: tuple = (1.0, 39.2, 840.0)
    Kg: float = 3.5  # gear reduction ratio
    Ks: float = 460.0  # spring constant, N/m
    r: float = 0.02  # winch radius, m
    use_paper_gain: bool = False

    def __post_init__(self):
        for name in ("Kg", "Ks", "r"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be positive, got {val}")
        object.__setattr__(self, "motor_num", tuple(float(c) for c in self.motor_num))
        object.__setattr__(self, "motor_den", tuple(float(c) for c in self.motor_den))

    @property
    def force_gain(self) -> float:
        """Newtons of spring force per radian of motor rotation."""
        return self.r * self.Ks / self.Kg


def motor_tf(params: SeaParams = SeaParams()) -> TransferFunction:
    """Control voltage to motor velocity."""
    return TransferFunction(Polynomial(params.motor_num), Polynomial(params.motor_den))


def plant_tf(params: SeaParams = SeaParams()) -> TransferFunction:
    """Control voltage to cable tension force."""
    G = motor_tf(params)
    den = G.den * Polynomial([1.0, 0.0])
    if params.use_paper_gain:
        return TransferFunction(Polynomial([ROUNDED_PLANT_GAIN]), den)
    return TransferFunction(G.num * params.force_gain, den)

