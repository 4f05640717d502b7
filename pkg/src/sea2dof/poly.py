"""Real polynomials in the Laplace variable ``s``.

Coefficients are stored in descending-degree order throughout the package
(``coeffs[0]`` multiplies the highest power), the same convention as
``numpy.polyval``.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import (
    DegenerateInputError,
    MarginalFactorizationError,
    NotEvenError,
    NotNonnegativeError,
)

DEFAULT_TOL = 1e-8


class Polynomial:
    """Immutable real polynomial with descending-degree coefficients.

    Leading zeros are stripped on construction, so ``coeffs[0]`` is nonzero
    unless the polynomial is the canonical zero polynomial ``[0.0]``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        if isinstance(coeffs, Polynomial):
            self._c = coeffs._c
            return
        c = np.array(coeffs, dtype=float, ndmin=1)
        if c.ndim != 1:
            raise DegenerateInputError("polynomial coefficients must be a 1-D sequence")
        if not np.all(np.isfinite(c)):
            raise DegenerateInputError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[nz[0]:].copy() if nz.size else np.zeros(1)
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def is_zero(self) -> bool:
        return len(self._c) == 1 and self._c[0] == 0.0

    @property
    def leading(self) -> float:
        return float(self._c[0])

    def coeff(self, power: int) -> float:
        """Coefficient of ``s**power`` (zero outside the stored range)."""
        if power < 0 or power > self.degree:
            return 0.0
        return float(self._c[self.degree - power])

    def __call__(self, s):
        return np.polyval(self._c, s)

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return Polynomial(np.polyadd(self._c, other._c))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return Polynomial(np.polysub(self._c, other._c))

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Polynomial(-self._c)

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return Polynomial(self._c / float(scalar))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __len__(self):
        return len(self._c)

    def __repr__(self):
        return f"Polynomial({self._c.tolist()!r})"

    def __str__(self):
        terms = []
        for power, c in zip(range(self.degree, -1, -1), self._c):
            if c == 0.0 and self.degree > 0:
                continue
            mag = abs(c)
            if power == 0:
                body = f"{mag:g}"
            else:
                coef = "" if mag == 1.0 else f"{mag:g}*"
                body = coef + ("s" if power == 1 else f"s^{power}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def derivative(self) -> Polynomial:
        return Polynomial(np.polyder(self._c)) if self.degree > 0 else Polynomial([0.0])

    def to_list(self) -> list[float]:
        return [float(c) for c in self._c]


def _as_poly(x):
    if isinstance(x, Polynomial):
        return x
    if np.isscalar(x) and isinstance(x, (int, float, np.integer, np.floating)):
        return Polynomial([float(x)])
    return NotImplemented


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Product of two polynomials (coefficient convolution)."""
    if p.is_zero or q.is_zero:
        return Polynomial([0.0])
    return Polynomial(np.convolve(p.coeffs, q.coeffs))


def paraconjugate(p: Polynomial) -> Polynomial:
    """Return ``p(-s)``: odd-power coefficients change sign."""
    c = p.coeffs.copy()
    powers = np.arange(p.degree, -1, -1)
    c[powers % 2 == 1] *= -1.0
    return Polynomial(c)


def poly_divmod(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Polynomial long division, ``num = quotient * den + remainder``."""
    if den.is_zero:
        raise DegenerateInputError("division by the zero polynomial")
    if num.degree < den.degree:
        return Polynomial([0.0]), num
    q, r = np.polydiv(num.coeffs, den.coeffs)
    return Polynomial(q), Polynomial(r)


def poly_from_roots(rts, leading: float = 1.0) -> Polynomial:
    """Real polynomial ``leading * prod(s - r)``; imaginary round-off is dropped."""
    rts = np.asarray(rts, dtype=complex)
    c = np.poly(rts) if rts.size else np.ones(1)
    return Polynomial(leading * np.real(c))


def companion_matrix(p: Polynomial) -> np.ndarray:
    """Companion matrix of the monic normalization of ``p``.

    First row holds the negated monic coefficients, ones on the subdiagonal;
    its characteristic polynomial is ``p / p.leading``.
    """
    if p.degree < 1:
        raise DegenerateInputError("companion matrix needs degree >= 1")
    c = p.coeffs / p.coeffs[0]
    n = p.degree
    comp = np.zeros((n, n))
    comp[0, :] = -c[1:]
    comp[1:, :-1] += np.eye(n - 1)
    return comp


def roots(p: Polynomial) -> np.ndarray:
    """All ``deg p`` roots (with multiplicity) as a complex array.

    Trailing zero coefficients give exact zero roots; the rest come from the
    eigenvalues of the companion matrix.
    """
    p = Polynomial(p)
    if p.degree < 1:
        raise DegenerateInputError("roots of a constant or zero polynomial are undefined")
    c = p.coeffs
    n_zero = len(c) - 1 - int(np.flatnonzero(c)[-1])
    core = Polynomial(c[: len(c) - n_zero])
    out = np.zeros(p.degree, dtype=complex)
    if core.degree >= 1:
        out[: core.degree] = np.linalg.eigvals(companion_matrix(core))
    return out


def is_hurwitz(p: Polynomial, margin: float = 0.0) -> bool:
    """True iff every root of ``p`` has real part below ``-margin``."""
    return bool(np.all(roots(p).real < -margin))


def relative_coeff_error(p: Polynomial, ref: Polynomial) -> float:
    """``||p - ref|| / ||ref||`` over zero-padded coefficient vectors."""
    diff = np.polysub(p.coeffs, ref.coeffs)
    denom = np.linalg.norm(ref.coeffs)
    if denom == 0.0:
        return float(np.linalg.norm(diff))
    return float(np.linalg.norm(diff) / denom)


def spectral_factor(E: Polynomial, tol: float = DEFAULT_TOL) -> Polynomial:
    """Hurwitz spectral factor ``d`` of an even polynomial, ``d(-s) d(s) = E(s)``.

    The even polynomial is rewritten in ``x = s**2``; each root ``x`` yields
    the symmetric root pair ``+-sqrt(x)`` and the left-half-plane member is
    kept. The factor is scaled so its leading coefficient is positive.

    Parameters
    ----------
    E : Polynomial
        Even polynomial of degree ``2m`` with ``(-1)**m * E.leading > 0``.
    tol : float
        Relative tolerance for the evenness test; the imaginary-axis test
        uses ``sqrt(tol)`` because axis roots of a nonnegative spectrum have
        even multiplicity and split by O(sqrt(eps)) under round-off.

    Raises
    ------
    NotEvenError
        An odd-power coefficient exceeds ``tol`` times the largest magnitude.
    NotNonnegativeError
        ``E(jw)`` is negative at ``w = 0`` or ``w -> inf``.
    MarginalFactorizationError
        A root lies on (or within tolerance of) the imaginary axis.
    """
    E = Polynomial(E)
    if E.is_zero:
        raise DegenerateInputError("cannot factor the zero polynomial")
    c = E.coeffs
    scale = float(np.max(np.abs(c)))
    powers = np.arange(E.degree, -1, -1)
    odd = np.abs(c[powers % 2 == 1])
    if odd.size and odd.max() > tol * scale:
        raise NotEvenError(f"polynomial is not even (odd coefficient {odd.max():.3e})")
    if E.degree % 2 == 1:
        # leading coefficient is odd-power and already nonzero
        raise NotEvenError("polynomial has odd degree")
    m = E.degree // 2
    lead = (-1) ** m * E.leading
    if lead <= 0.0:
        raise NotNonnegativeError("(-1)^m times the leading coefficient must be positive")
    if E.coeff(0) < 0.0:
        raise NotNonnegativeError("E(0) is negative")
    d0 = math.sqrt(lead)
    if m == 0:
        return Polynomial([d0])

    # even coefficients, descending in x = s^2
    q = Polynomial(c[::2])
    xs = roots(q)
    rs = np.sqrt(xs)  # principal root: Re >= 0
    root_scale = max(1.0, float(np.max(np.abs(rs))))
    axis_tol = math.sqrt(tol)
    for r in rs:
        if abs(r) <= tol * root_scale or r.real <= axis_tol * abs(r):
            raise MarginalFactorizationError(
                f"root {complex(r):.6g} lies on the imaginary axis; no strictly stable factor"
            )
    return poly_from_roots(-rs, leading=d0)
