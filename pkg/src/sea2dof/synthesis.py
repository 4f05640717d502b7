"""Two-degree-of-freedom force controller design and the PID baseline.

Loop topology (measurement noise ``n`` enters before the feedback block,
input disturbance ``d`` at the plant input)::

    u = C1 * F_ref - C2 * (F + n)
    F = P * (u + d)

Design of ``C1``, ``C2`` for a plant ``b/a`` of order ``n``:

1. ``d_rho``: Hurwitz factor of ``rho^2 a(-s) a(s) + b(-s) b(s)``.
2. ``d_lambda_k``: Hurwitz factor of ``-k^2 s^2 a(-s) a(s) + lambda^2 b(-s) b(s)``.
3. ``C2 = q/p`` with ``a p + b q = d_rho d_lambda_k``, ``deg p = n + 1``,
   ``p(0) = 0`` (integral action) and ``deg q <= n``.
4. ``C1 = d_rho(0)/b(0) * d_lambda_k / p``.

The reference transfer then reduces to ``d_rho(0)/b(0) * b / d_rho``.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field

import numpy as np

from .errors import CoprimenessError, ParameterError, SingularLoopError
from .lti import TransferFunction
from .poly import (
    DEFAULT_TOL,
    Polynomial,
    paraconjugate,
    relative_coeff_error,
    roots,
    spectral_factor,
)

S = Polynomial([1.0, 0.0])


@dataclass(frozen=True)
class TwoDofController:
    C1: TransferFunction
    C2: TransferFunction
    d_rho: Polynomial
    d_lambda_k: Polynomial
    p: Polynomial
    q: Polynomial
    rho: float
    lam: float
    k: float
    bezout_residual: float = float("nan")
    condition_number: float = float("nan")

    def reference_model(self, plant: TransferFunction) -> TransferFunction:
        """Reduced reference transfer ``d_rho(0)/b(0) * b / d_rho``."""
        b = plant.num
        return TransferFunction(b * (self.d_rho(0.0) / b(0.0)), self.d_rho)

    def to_dict(self) -> dict:
        return {
            "c1": self.C1.to_dict(),
            "c2": self.C2.to_dict(),
            "d_rho": self.d_rho.to_list(),
            "d_lambda_k": self.d_lambda_k.to_list(),
            "p": self.p.to_list(),
            "q": self.q.to_list(),
            "rho": self.rho,
            "lambda": self.lam,
            "k": self.k,
        }


@dataclass(frozen=True)
class PidGains:
    Kp: float
    Ki: float = 0.0
    Kd: float = 0.0
    N: float = 100.0  # derivative filter pole, rad/s

    def __post_init__(self):
        for name in ("Kp", "Ki", "Kd", "N"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"PID gain {name} must be finite")
        if not self.N > 0:
            raise ParameterError(f"derivative filter coefficient N must be positive, got {self.N}")


@dataclass(frozen=True)
class ClosedLoopTFs:
    T_ref: TransferFunction  # F_ref -> F
    T_dist: TransferFunction  # d -> F
    T_noise: TransferFunction  # n -> F
    T_u_ref: TransferFunction  # F_ref -> u
    characteristic: Polynomial


@dataclass(frozen=True)
class Cancellation:
    kind: str
    plant_root: complex
    controller_root: complex
    unstable: bool


@dataclass
class StabilityReport:
    characteristic: Polynomial | None
    roots: np.ndarray
    stable: bool
    singular: bool = False
    cancellations: list[Cancellation] = field(default_factory=list)
    feedforward_poles: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "singular": self.singular,
            "closed_loop_poles": [[float(r.real), float(r.imag)] for r in self.roots],
            "cancellations": [
                {
                    "kind": c.kind,
                    "plant_root": [c.plant_root.real, c.plant_root.imag],
                    "controller_root": [c.controller_root.real, c.controller_root.imag],
                    "unstable": c.unstable,
                }
                for c in self.cancellations
            ],
        }


def _check_weight(name, value):
    if not (isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value) and value > 0):
        raise ParameterError(f"design weight {name} must be positive, got {value!r}")


def _common_roots(a: Polynomial, b: Polynomial, rtol: float):
    if a.degree < 1 or b.degree < 1:
        return []
    ra, rb = roots(a), roots(b)
    out = []
    for x in rb:
        dist = np.abs(ra - x)
        if dist.min() <= rtol * max(1.0, abs(x)):
            out.append(complex(x))
    return out


def solve_diophantine(a: Polynomial, b: Polynomial, c: Polynomial):
    """Solve ``a p + b q = c`` with ``p = s p'``, ``deg p' = deg c - deg a - 1``,
    ``deg q <= deg a``.

    The unknown coefficients of ``p'`` and ``q`` are stacked into a square
    Sylvester-type system; columns are equilibrated before the LU solve.

    Returns ``(p, q, cond)`` with ``cond`` the 2-norm condition number of the
    equilibrated matrix.
    """
    n = a.degree
    sa = (a * S).coeffs  # deg n+1
    bc = b.coeffs
    db = b.degree
    np_ = c.degree - (n + 1)  # degree of p'
    if np_ < 0:
        raise ParameterError("target polynomial degree too low for a type-1 controller")
    size = c.degree + 1
    n_unknown = (np_ + 1) + (n + 1)
    if n_unknown != size:
        raise ParameterError(
            f"Diophantine system is not square ({size} equations, {n_unknown} unknowns)"
        )
    M = np.zeros((size, size))
    for j in range(np_ + 1):
        M[j : j + n + 2, j] = sa
    for j in range(n + 1):
        row = (size - 1) - (n - j + db)
        M[row : row + db + 1, np_ + 1 + j] = bc
    scale = np.max(np.abs(M), axis=0)
    if np.any(scale == 0):
        raise CoprimenessError("Diophantine matrix has an empty column")
    Ms = M / scale
    cond = float(np.linalg.cond(Ms))
    if not np.isfinite(cond) or cond > 1e14:
        raise CoprimenessError(
            f"plant numerator and denominator are not coprime (condition number {cond:.3e})"
        )
    x = np.linalg.solve(Ms, c.coeffs) / scale
    p = Polynomial(np.concatenate([x[: np_ + 1], [0.0]]))
    q = Polynomial(x[np_ + 1 :])
    return p, q, cond


def design_2dof(
    P: TransferFunction, rho: float, lam: float, k: float, tol: float = DEFAULT_TOL
) -> TwoDofController:
    """Design the 2-DOF controller for plant ``P`` with weights ``rho``, ``lam``, ``k``.

    ``rho`` trades control effort against tracking error, ``lam`` weighs
    disturbance against reference and ``k`` weighs noise against reference.

    Raises
    ------
    ParameterError
        A weight is not strictly positive.
    CoprimenessError
        The plant numerator and denominator share a root (including
        ``b(0) = 0``, which would cancel the controller integrator).
    SpectralFactorizationError
        Propagated from either factorization step.
    """
    _check_weight("rho", rho)
    _check_weight("lambda", lam)
    _check_weight("k", k)
    rho, lam, k = float(rho), float(lam), float(k)
    a, b = P.den, P.num
    if b.is_zero:
        raise CoprimenessError("plant numerator is identically zero")
    if abs(b(0.0)) <= tol * float(np.max(np.abs(b.coeffs))):
        raise CoprimenessError("b(0) = 0: plant zero at the origin cancels the integrator")
    common = _common_roots(a, b, 1e-6)
    if common:
        raise CoprimenessError(f"plant numerator and denominator share roots {common}")

    aa = paraconjugate(a) * a
    bb = paraconjugate(b) * b
    d_rho = spectral_factor(aa * rho**2 + bb, tol)
    d_lambda_k = spectral_factor(-(S * S * aa) * k**2 + bb * lam**2, tol)

    c = d_rho * d_lambda_k
    p, q, cond = solve_diophantine(a, b, c)
    residual = relative_coeff_error(a * p + b * q, c)

    gain = d_rho(0.0) / b(0.0)
    C1 = TransferFunction(d_lambda_k * gain, p)
    C2 = TransferFunction(q, p)
    return TwoDofController(
        C1=C1,
        C2=C2,
        d_rho=d_rho,
        d_lambda_k=d_lambda_k,
        p=p,
        q=q,
        rho=rho,
        lam=lam,
        k=k,
        bezout_residual=residual,
        condition_number=cond,
    )


def pid_controller(g: PidGains) -> tuple[TransferFunction, TransferFunction]:
    """Parallel PID with first-order derivative filter, ``C1 = C2``.

    ``C(s) = Kp + Ki/s + Kd N s / (s + N)``; absent terms do not add poles.
    """
    terms = [TransferFunction(Polynomial([g.Kp]), Polynomial([1.0]))]
    if g.Ki != 0.0:
        terms.append(TransferFunction(Polynomial([g.Ki]), S))
    if g.Kd != 0.0:
        terms.append(TransferFunction(Polynomial([g.Kd * g.N, 0.0]), Polynomial([1.0, g.N])))
    num, den = terms[0].num, terms[0].den
    for t in terms[1:]:
        num = num * t.den + t.num * den
        den = den * t.den
    C = TransferFunction(num, den)
    return C, C


def closed_loop(P: TransferFunction, C1: TransferFunction, C2: TransferFunction) -> ClosedLoopTFs:
    """Closed-loop transfers as explicit (unreduced) rational functions."""
    nP, dP = P.num, P.den
    n1, d1 = C1.num, C1.den
    n2, d2 = C2.num, C2.den
    char = dP * d2 + nP * n2
    scale = max(
        float(np.max(np.abs((dP * d2).coeffs))), float(np.max(np.abs((nP * n2).coeffs)))
    )
    if char.is_zero or float(np.max(np.abs(char.coeffs))) <= 1e-12 * scale:
        raise SingularLoopError("1 + P C2 is identically zero")
    return ClosedLoopTFs(
        T_ref=TransferFunction(nP * n1 * d2, d1 * char),
        T_dist=TransferFunction(nP * d2, char),
        T_noise=TransferFunction(-(nP * n2), char),
        T_u_ref=TransferFunction(n1 * dP * d2, d1 * char),
        characteristic=char,
    )


def verify_internal_stability(
    P: TransferFunction,
    C1: TransferFunction,
    C2: TransferFunction,
    margin: float = 0.0,
    cancel_tol: float = 1e-6,
) -> StabilityReport:
    """Closed-loop poles, stability verdict and near pole-zero cancellations.

    Stability needs every root of ``a p2 + b q2`` and every pole of ``C1``
    not shared with ``C2`` to lie left of ``-margin``. Never raises.
    """
    try:
        char = closed_loop(P, C1, C2).characteristic
    except SingularLoopError:
        return StabilityReport(None, np.zeros(0, dtype=complex), stable=False, singular=True)
    rts = roots(char) if char.degree >= 1 else np.zeros(0, dtype=complex)
    stable = bool(np.all(rts.real < -margin))

    cancellations = []

    def scan(kind, plant_rts, ctrl_rts):
        for pr in plant_rts:
            for cr in ctrl_rts:
                if abs(pr - cr) <= cancel_tol * max(1.0, abs(pr)):
                    cancellations.append(
                        Cancellation(kind, complex(pr), complex(cr), bool(pr.real >= -margin))
                    )

    scan("plant pole / C2 zero", P.poles(), C2.zeros())
    scan("plant zero / C2 pole", P.zeros(), C2.poles())
    if any(c.unstable for c in cancellations):
        stable = False

    ff = []
    c2_poles = C2.poles()
    for pole in C1.poles():
        shared = c2_poles.size and np.min(np.abs(c2_poles - pole)) <= cancel_tol * max(1.0, abs(pole))
        if not shared:
            ff.append(pole)
    ff = np.asarray(ff, dtype=complex)
    if ff.size and np.any(ff.real >= -margin):
        stable = False
    return StabilityReport(char, rts, stable, False, cancellations, ff)


def controller_from_dict(data: dict) -> tuple[TransferFunction, TransferFunction]:
    """``(C1, C2)`` from the exported controller JSON schema."""
    return TransferFunction.from_dict(data["c1"]), TransferFunction.from_dict(data["c2"])
