"""SISO transfer functions, state-space realizations and discretization."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    ImproperSystemError,
    ParameterError,
    SingularSubstitutionError,
)
from .poly import Polynomial, poly_divmod, roots

INF = math.inf


@dataclass(frozen=True)
class TransferFunction:
    """Proper rational function ``num(s) / den(s)``.

    No pole-zero cancellation is ever performed implicitly.
    """

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        num = Polynomial(self.num)
        den = Polynomial(self.den)
        if den.is_zero:
            raise DegenerateInputError("transfer function denominator is the zero polynomial")
        if not num.is_zero and num.degree > den.degree:
            raise ImproperSystemError(
                f"improper transfer function: deg num {num.degree} > deg den {den.degree}"
            )
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def order(self) -> int:
        return self.den.degree

    @property
    def strictly_proper(self) -> bool:
        return self.num.is_zero or self.num.degree < self.den.degree

    def __call__(self, s):
        return self.num(s) / self.den(s)

    def __mul__(self, other):
        if isinstance(other, TransferFunction):
            return TransferFunction(self.num * other.num, self.den * other.den)
        if np.isscalar(other):
            return TransferFunction(self.num * float(other), self.den)
        return NotImplemented

    __rmul__ = __mul__

    def poles(self) -> np.ndarray:
        return roots(self.den) if self.den.degree >= 1 else np.zeros(0, dtype=complex)

    def zeros(self) -> np.ndarray:
        if self.num.is_zero or self.num.degree < 1:
            return np.zeros(0, dtype=complex)
        return roots(self.num)

    def to_dict(self) -> dict:
        return {"num": self.num.to_list(), "den": self.den.to_list()}

    @classmethod
    def from_dict(cls, data: dict) -> TransferFunction:
        return cls(Polynomial(data["num"]), Polynomial(data["den"]))

    def __str__(self):
        return f"({self.num}) / ({self.den})"


def tf_new(num, den) -> TransferFunction:
    return TransferFunction(Polynomial(num), Polynomial(den))


def cancel(tf: TransferFunction, factor: Polynomial) -> tuple[TransferFunction, float]:
    """Divide numerator and denominator by a common ``factor``.

    Returns the reduced transfer function and the larger of the two relative
    division remainders, which measures how exact the cancellation was.
    """
    qn, rn = poly_divmod(tf.num, factor)
    qd, rd = poly_divmod(tf.den, factor)
    resid = max(
        float(np.max(np.abs(rn.coeffs))) / max(float(np.max(np.abs(tf.num.coeffs))), 1e-300),
        float(np.max(np.abs(rd.coeffs))) / float(np.max(np.abs(tf.den.coeffs))),
    )
    return TransferFunction(qn, qd), resid


@dataclass(frozen=True)
class StateSpace:
    """Continuous realization ``x' = A x + B u``, ``y = C x + D u``.

    Single output; ``B`` may carry several input columns.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0] if A.size else 0
        A = A.reshape(n, n)
        B = np.asarray(self.B, dtype=float).reshape(n, -1) if n else np.zeros((0, np.size(self.D)))
        C = np.asarray(self.C, dtype=float).reshape(1, n)
        D = np.asarray(self.D, dtype=float).reshape(1, -1)
        if B.shape[1] != D.shape[1]:
            raise ParameterError("B and D disagree on the number of inputs")
        for name, val in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, name, val)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.D.shape[1]


@dataclass(frozen=True)
class DiscreteStateSpace(StateSpace):
    """Sampled realization ``x[k+1] = Ad x[k] + Bd u[k]``, ``y[k] = Cd x[k] + Dd u[k]``."""

    Ts: float = 1e-3

    def __post_init__(self):
        super().__post_init__()
        if not self.Ts > 0:
            raise ParameterError("sample period must be positive")

    # Ad, Bd, Cd, Dd naming
    Ad = property(lambda self: self.A)
    Bd = property(lambda self: self.B)
    Cd = property(lambda self: self.C)
    Dd = property(lambda self: self.D)


def to_statespace(tf: TransferFunction) -> StateSpace:
    """Controllable canonical form of a proper transfer function.

    ``A`` is the companion matrix of the monic denominator (first row
    ``-a1 ... -an``), ``B = e1``; a biproper transfer function is split into
    a direct term ``D`` and a strictly proper remainder first.
    """
    return _canonical(tf.den, [tf.num], controllable=True)


def controller_statespace(C1: TransferFunction, C2: TransferFunction) -> StateSpace:
    """Two-input realization of ``u = C1 r - C2 y`` with inputs ``[r, y]``.

    When both blocks share a denominator (the 2-DOF design and the PID
    baseline both do) the common modes, including the integrator, are
    realized once.
    """
    if _same_denominator(C1.den, C2.den):
        den = C2.den
        scale = den.leading / C1.den.leading
        nums = [C1.num * scale, -C2.num]
    else:
        den = C1.den * C2.den
        nums = [C1.num * C2.den, -(C2.num * C1.den)]
    return _canonical(den, nums, controllable=False)


def _same_denominator(d1: Polynomial, d2: Polynomial) -> bool:
    if d1.degree != d2.degree:
        return False
    a = d1.coeffs / d1.leading
    b = d2.coeffs / d2.leading
    return bool(np.allclose(a, b, rtol=1e-12, atol=0.0))


def _canonical(den: Polynomial, nums, controllable: bool) -> StateSpace:
    lead = den.leading
    a = den.coeffs / lead
    n = den.degree
    D = np.zeros(len(nums))
    R = np.zeros((n, len(nums)))
    for i, num in enumerate(nums):
        num = Polynomial(num) / lead
        if num.is_zero:
            continue
        if num.degree > n:
            raise ImproperSystemError("improper transfer function")
        if num.degree == n:
            D[i] = num.leading
            num = Polynomial(np.polysub(num.coeffs, D[i] * a)[1:]) if n else Polynomial([0.0])
        if n:
            R[:, i] = np.concatenate([np.zeros(n - len(num.coeffs)), num.coeffs])[-n:]
    A = np.zeros((n, n))
    if n:
        A[0, :] = -a[1:]
        A[1:, :-1] += np.eye(n - 1)
    if controllable:
        if len(nums) != 1:
            raise ParameterError("controllable form is single-input")
        B = np.zeros((n, 1))
        if n:
            B[0, 0] = 1.0
        return StateSpace(A, B, R.T, D)
    C = np.zeros((1, n))
    if n:
        C[0, 0] = 1.0
    return StateSpace(A.T, R, C, D)


def ss_to_tf(ss: StateSpace, input_index: int = 0) -> TransferFunction:
    """Transfer function of one input channel (Faddeev-LeVerrier recursion).

    Works unchanged for discrete realizations, giving the z-domain transfer.
    """
    n = ss.n_states
    d = float(ss.D[0, input_index])
    if n == 0:
        return TransferFunction(Polynomial([d]), Polynomial([1.0]))
    A = ss.A
    b = ss.B[:, input_index]
    c = ss.C[0]
    # char poly s^n + c1 s^(n-1) + ... and adjugate coefficient matrices
    coef = [1.0]
    M = np.eye(n)
    num_strict = [float(c @ M @ b)]
    for k in range(1, n + 1):
        AM = A @ M
        ck = -np.trace(AM) / k
        coef.append(ck)
        if k < n:
            M = AM + ck * np.eye(n)
            num_strict.append(float(c @ M @ b))
    den = np.array(coef)
    num = np.polyadd(np.array(num_strict), d * den)
    return TransferFunction(Polynomial(num), Polynomial(den))


def expm(M: np.ndarray, rtol: float = 1e-16) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a truncated Taylor series.

    The matrix is scaled by ``2**-j`` until its 1-norm is at most 1/2, the
    series is summed until a term is below ``rtol`` relative to the partial
    sum, and the result is squared ``j`` times.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    norm = float(np.max(np.sum(np.abs(M), axis=0)))
    j = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    X = M / (2.0**j)
    total = np.eye(n)
    term = np.eye(n)
    for k in range(1, 60):
        term = term @ X / k
        total = total + term
        if np.max(np.abs(term)) <= rtol * np.max(np.abs(total)):
            break
    for _ in range(j):
        total = total @ total
    return total


def discretize_zoh(ss: StateSpace, Ts: float) -> DiscreteStateSpace:
    """Exact zero-order-hold discretization via the augmented exponential.

    ``exp([[A, B], [0, 0]] * Ts) = [[Ad, Bd], [0, I]]``.
    """
    if not Ts > 0:
        raise ParameterError(f"sample period must be positive, got {Ts}")
    n, m = ss.n_states, ss.n_inputs
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = ss.A
    aug[:n, n:] = ss.B
    E = expm(aug * Ts)
    return DiscreteStateSpace(E[:n, :n], E[:n, n:], ss.C.copy(), ss.D.copy(), Ts=Ts)


def tustin_statespace(ss: StateSpace, Ts: float) -> DiscreteStateSpace:
    """Bilinear discretization of a realization, ``s <- (2/Ts)(z-1)/(z+1)``."""
    if not Ts > 0:
        raise ParameterError(f"sample period must be positive, got {Ts}")
    n = ss.n_states
    if n == 0:
        return DiscreteStateSpace(ss.A, ss.B, ss.C, ss.D.copy(), Ts=Ts)
    half = Ts / 2.0
    W = np.eye(n) - half * ss.A
    if np.linalg.cond(W) > 1e14:
        raise SingularSubstitutionError(f"pole at s = 2/Ts = {2.0 / Ts:g}")
    Winv = np.linalg.inv(W)
    Ad = Winv @ (np.eye(n) + half * ss.A)
    Bd = Winv @ ss.B * Ts
    Cd = ss.C @ Winv
    Dd = ss.D + half * (ss.C @ Winv @ ss.B)
    return DiscreteStateSpace(Ad, Bd, Cd, Dd, Ts=Ts)


def discretize_tustin(tf: TransferFunction, Ts: float) -> DiscreteStateSpace:
    """Tustin (bilinear) discretization of a transfer function."""
    if not Ts > 0:
        raise ParameterError(f"sample period must be positive, got {Ts}")
    s_crit = 2.0 / Ts
    den = tf.den
    mag = float(np.polyval(np.abs(den.coeffs), s_crit))
    if abs(den(s_crit)) <= 1e-12 * mag:
        raise SingularSubstitutionError(f"pole at s = 2/Ts = {s_crit:g}")
    return tustin_statespace(to_statespace(tf), Ts)


def freq_response(tf: TransferFunction, omegas) -> np.ndarray:
    """``tf(j w)`` on a grid; exact poles on the grid give ``inf`` magnitude."""
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    s = 1j * w
    num = tf.num(s)
    den = tf.den(s)
    out = np.empty(w.shape, dtype=complex)
    pole = den == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~pole] = num[~pole] / den[~pole]
    out[pole] = complex(INF, 0.0)
    return out


def discrete_freq_response(dss: DiscreteStateSpace, omegas, input_index: int = 0) -> np.ndarray:
    """Response ``H(exp(j w Ts))`` of one input channel of a sampled system."""
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    n = dss.n_states
    b = dss.B[:, input_index]
    d = dss.D[0, input_index]
    out = np.empty(w.shape, dtype=complex)
    for i, wi in enumerate(w):
        z = np.exp(1j * wi * dss.Ts)
        if n:
            out[i] = dss.C[0] @ np.linalg.solve(z * np.eye(n) - dss.A, b) + d
        else:
            out[i] = d
    return out


def dc_gain(tf: TransferFunction) -> float:
    """``tf(0)``, resolving an exact removable ``0/0`` by cancelling powers of s.

    Returns ``math.inf`` when the denominator vanishes at zero but the
    (reduced) numerator does not.
    """
    num = tf.num.coeffs
    den = tf.den.coeffs
    if tf.num.is_zero:
        return 0.0
    while num[-1] == 0.0 and den[-1] == 0.0:
        num = num[:-1]
        den = den[:-1]
    if den[-1] == 0.0:
        return INF
    return float(num[-1] / den[-1])
