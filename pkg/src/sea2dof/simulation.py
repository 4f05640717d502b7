"""Fixed-step simulation of the 2-DOF force loop.

Each sample the loop measures ``F[k]``, adds sensor noise, computes
``u[k] = C1 r[k] - C2 (F[k] + n[k])`` from the current controller state and
holds ``u[k] + d[k]`` on the plant for one period. The plant is discretized
by zero-order hold (exact for a held input), the controller by Tustin.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DivergenceError, ParameterError
from .lti import (
    TransferFunction,
    controller_statespace,
    discretize_zoh,
    to_statespace,
    tustin_statespace,
)
from .sea_model import SeaParams, plant_tf
from .synthesis import PidGains, design_2dof, pid_controller, verify_internal_stability

DEFAULT_TS = 1e-3
DEFAULT_SIGMA_D = 0.01  # control volts
DEFAULT_SIGMA_N = 0.05  # newtons

REFERENCE_KINDS = ("step", "sine", "chirp")
DISCRETIZATIONS = ("zoh", "tustin")

# independent noise streams drawn from one seed
DISTURBANCE_STREAM = 0
NOISE_STREAM = 1

_TWO_POW_53 = 2.0**-53


@dataclass(frozen=True)
class Signal:
    Ts: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.Ts > 0:
            raise ParameterError("sample period must be positive")
        x = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ParameterError("signal samples must be finite")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.Ts


@dataclass(frozen=True)
class ReferenceSpec:
    kind: str = "step"
    amplitude: float = 10.0
    frequency: float = 0.5  # sine, Hz
    f0: float = 0.0  # chirp start, Hz
    f1: float = 2.0  # chirp end, Hz
    T: float = 10.0  # chirp sweep time, s

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise ParameterError(f"unknown reference kind {self.kind!r}")
        if not math.isfinite(self.amplitude):
            raise ParameterError("reference amplitude must be finite")
        if self.kind == "chirp" and not self.T > 0:
            raise ParameterError("chirp sweep time T must be positive")
        if self.kind == "sine" and not (math.isfinite(self.frequency) and self.frequency >= 0):
            raise ParameterError("sine frequency must be nonnegative")


@dataclass(frozen=True)
class TwoDofSpec:
    rho: float
    lam: float
    k: float


@dataclass(frozen=True)
class ExplicitController:
    C1: TransferFunction
    C2: TransferFunction


ControllerSpec = Union[TwoDofSpec, PidGains, ExplicitController]


@dataclass(frozen=True)
class ScenarioConfig:
    plant: Union[SeaParams, TransferFunction] = field(default_factory=SeaParams)
    controller: ControllerSpec = TwoDofSpec(3.0, 10.0, 2.0)
    reference: ReferenceSpec = ReferenceSpec()
    duration: float = 5.0
    Ts: float = DEFAULT_TS
    sigma_d: float = DEFAULT_SIGMA_D
    sigma_n: float = DEFAULT_SIGMA_N
    d_offset: float = 0.0  # constant input disturbance, volts
    seed: int = 0
    plant_discretization: str = "zoh"
    controller_discretization: str = "tustin"

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ParameterError(f"duration must be positive, got {self.duration}")
        if not (math.isfinite(self.Ts) and self.Ts > 0):
            raise ParameterError(f"Ts must be positive, got {self.Ts}")
        for name in ("sigma_d", "sigma_n"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0):
                raise ParameterError(f"{name} must be nonnegative, got {val}")
        if not math.isfinite(self.d_offset):
            raise ParameterError("d_offset must be finite")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ParameterError("seed must be an unsigned 64-bit integer")
        for name in ("plant_discretization", "controller_discretization"):
            if getattr(self, name) not in DISCRETIZATIONS:
                raise ParameterError(f"{name} must be one of {DISCRETIZATIONS}")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.Ts))

    def plant_transfer(self) -> TransferFunction:
        if isinstance(self.plant, SeaParams):
            return plant_tf(self.plant)
        return self.plant

    def controller_transfers(self) -> tuple[TransferFunction, TransferFunction]:
        c = self.controller
        if isinstance(c, TwoDofSpec):
            design = design_2dof(self.plant_transfer(), c.rho, c.lam, c.k)
            return design.C1, design.C2
        if isinstance(c, PidGains):
            return pid_controller(c)
        if isinstance(c, ExplicitController):
            return c.C1, c.C2
        raise ParameterError(f"unsupported controller spec {type(c).__name__}")


@dataclass(frozen=True)
class SimTrace:
    Ts: float
    r: np.ndarray
    F: np.ndarray
    u: np.ndarray
    d: np.ndarray
    n: np.ndarray

    COLUMNS = ("t", "r", "F", "u", "d", "n", "e")

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.F)) * self.Ts

    @property
    def e(self) -> np.ndarray:
        return self.r - self.F

    def __len__(self):
        return len(self.F)

    def to_csv(self, path_or_buffer) -> None:
        """Write ``t,r,F,u,d,n,e`` rows with 9 significant digits, LF endings."""
        text = trace_csv(self)
        if hasattr(path_or_buffer, "write"):
            path_or_buffer.write(text)
        else:
            with open(path_or_buffer, "w", newline="\n", encoding="ascii") as fh:
                fh.write(text)


def format_number(x: float) -> str:
    """Positional decimal with 9 significant digits (no exponent)."""
    return np.format_float_positional(
        float(x) + 0.0, precision=9, unique=False, fractional=False, trim="-"
    )


def trace_csv(trace: SimTrace) -> str:
    cols = [trace.t, trace.r, trace.F, trace.u, trace.d, trace.n, trace.e]
    lines = [",".join(SimTrace.COLUMNS)]
    for row in zip(*cols):
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def make_reference(spec: ReferenceSpec, Ts: float, duration: float) -> Signal:
    """Sample a step, sine or linear chirp reference at ``t = i * Ts``.

    The chirp's instantaneous frequency ramps linearly from ``f0`` to ``f1``
    over ``T`` seconds and keeps ramping afterwards.
    """
    if not (Ts > 0 and duration > 0):
        raise ParameterError("Ts and duration must be positive")
    count = int(round(duration / Ts))
    t = np.arange(count) * Ts
    A = spec.amplitude
    if spec.kind == "step":
        x = np.full(count, float(A))
    elif spec.kind == "sine":
        x = A * np.sin(2.0 * np.pi * spec.frequency * t)
    else:
        phase = spec.f0 * t + (spec.f1 - spec.f0) * t**2 / (2.0 * spec.T)
        x = A * np.sin(2.0 * np.pi * phase)
    return Signal(Ts, x)


def gaussian_noise(seed: int, sigma: float, count: int, Ts: float, stream: int = 0) -> Signal:
    """Reproducible white Gaussian samples with standard deviation ``sigma``.

    Generator: Philox4x64-10 (counter-based) keyed by ``(seed, stream)``,
    counter starting at zero. Each 64-bit output ``w`` becomes a uniform
    ``u = (w >> 11) * 2**-53``; consecutive pairs ``(u1, u2)`` feed Box-Muller,
    ``sqrt(-2 ln(1 - u1)) * (cos, sin)(2 pi u2)``, cosine branch first.
    """
    if not (math.isfinite(sigma) and sigma >= 0):
        raise ParameterError("sigma must be nonnegative")
    if count < 0:
        raise ParameterError("count must be nonnegative")
    if sigma == 0.0 or count == 0:
        return Signal(Ts, np.zeros(count))
    n_pairs = (count + 1) // 2
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    raw = bitgen.random_raw(2 * n_pairs)
    u = (raw >> np.uint64(11)).astype(np.float64) * _TWO_POW_53
    out = np.empty(2 * n_pairs)
    # libm via math keeps the transform independent of numpy's SIMD dispatch
    for i in range(n_pairs):
        radius = math.sqrt(-2.0 * math.log(1.0 - u[2 * i]))
        angle = 2.0 * math.pi * u[2 * i + 1]
        out[2 * i] = radius * math.cos(angle)
        out[2 * i + 1] = radius * math.sin(angle)
    return Signal(Ts, sigma * out[:count])


def _discretize(ss, Ts, method):
    return discretize_zoh(ss, Ts) if method == "zoh" else tustin_statespace(ss, Ts)


def simulate_loop(
    P: TransferFunction,
    C1: TransferFunction,
    C2: TransferFunction,
    r: np.ndarray,
    d: np.ndarray,
    n: np.ndarray,
    Ts: float,
    plant_discretization: str = "zoh",
    controller_discretization: str = "tustin",
) -> SimTrace:
    """Step the sampled loop over given reference, disturbance and noise arrays."""
    if not P.strictly_proper:
        raise ParameterError("simulated plant must be strictly proper")
    r = np.asarray(r, dtype=float)
    d = np.asarray(d, dtype=float)
    n = np.asarray(n, dtype=float)
    if not (len(r) == len(d) == len(n)):
        raise ParameterError("r, d and n must have equal length")
    plant = _discretize(to_statespace(P), Ts, plant_discretization)
    ctrl = _discretize(controller_statespace(C1, C2), Ts, controller_discretization)

    Ap, bp, cp = plant.A, plant.B[:, 0], plant.C[0]
    Ac, Bc, cc = ctrl.A, ctrl.B, ctrl.C[0]
    dr, dy = float(ctrl.D[0, 0]), float(ctrl.D[0, 1])
    br, by = Bc[:, 0], Bc[:, 1]

    count = len(r)
    F = np.empty(count)
    u = np.empty(count)
    x = np.zeros(plant.n_states)
    xc = np.zeros(ctrl.n_states)
    # overflow is caught by the finiteness check below
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(count):
            Fi = float(cp @ x)
            y = Fi + n[i]
            ui = float(cc @ xc) + dr * r[i] + dy * y
            if not (math.isfinite(Fi) and math.isfinite(ui)):
                raise DivergenceError(i)
            F[i] = Fi
            u[i] = ui
            xc = Ac @ xc + br * r[i] + by * y
            x = Ap @ x + bp * (ui + d[i])
    return SimTrace(Ts, r.copy(), F, u, d.copy(), n.copy())


def run_closed_loop(cfg: ScenarioConfig) -> SimTrace:
    """Simulate one scenario; deterministic in ``cfg`` (including the seed)."""
    P = cfg.plant_transfer()
    C1, C2 = cfg.controller_transfers()
    report = verify_internal_stability(P, C1, C2)
    if not report.stable:
        warnings.warn("closed loop is not internally stable; simulating anyway", RuntimeWarning)
    count = cfg.n_samples
    r = make_reference(cfg.reference, cfg.Ts, cfg.duration).samples
    d = gaussian_noise(cfg.seed, cfg.sigma_d, count, cfg.Ts, DISTURBANCE_STREAM).samples + cfg.d_offset
    n = gaussian_noise(cfg.seed, cfg.sigma_n, count, cfg.Ts, NOISE_STREAM).samples
    return simulate_loop(
        P, C1, C2, r, d, n, cfg.Ts, cfg.plant_discretization, cfg.controller_discretization
    )
