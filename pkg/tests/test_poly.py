import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sea2dof.errors import (
    DegenerateInputError,
    MarginalFactorizationError,
    NotEvenError,
    NotNonnegativeError,
)
from sea2dof.poly import (
    Polynomial,
    companion_matrix,
    is_hurwitz,
    paraconjugate,
    poly_divmod,
    poly_mul,
    relative_coeff_error,
    roots,
    spectral_factor,
)

SQ2 = math.sqrt(2.0)
PLANT_DEN = [1.0, 39.2, 840.0, 0.0]


def quad_roots(b, c):
    # oracle: quadratic formula for s^2 + b s + c
    disc = complex(b * b - 4 * c)
    return {(-b + disc**0.5) / 2, (-b - disc**0.5) / 2}


def assert_root_sets(actual, expected, tol=1e-9):
    actual = sorted(actual, key=lambda z: (round(z.real, 6), z.imag))
    expected = sorted(expected, key=lambda z: (round(z.real, 6), z.imag))
    np.testing.assert_allclose(actual, expected, atol=tol)


def test_construction_strips_leading_zeros():
    assert Polynomial([0.0, 0.0, 1.0, 2.0]).coeffs.tolist() == [1.0, 2.0]
    assert Polynomial([]).is_zero
    assert Polynomial([0.0]).degree == 0


def test_nonfinite_rejected():
    with pytest.raises(DegenerateInputError):
        Polynomial([1.0, float("nan")])
    with pytest.raises(DegenerateInputError):
        Polynomial([float("inf")])


def test_coefficients_are_immutable():
    p = Polynomial([1.0, 2.0])
    with pytest.raises(ValueError):
        p.coeffs[0] = 3.0


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ([1, 1], [1, -1], [1, 0, -1]),
        (PLANT_DEN, [1], PLANT_DEN),
        ([1, SQ2], [-1, SQ2], [-1, 0, 2]),
    ],
)
def test_poly_mul(p, q, expected):
    np.testing.assert_allclose(poly_mul(Polynomial(p), Polynomial(q)).coeffs, expected, atol=1e-15)


def test_zero_absorbs():
    assert poly_mul(Polynomial([0.0]), Polynomial(PLANT_DEN)).is_zero


@pytest.mark.parametrize(
    "p, expected",
    [([1, 1], [-1, 1]), (PLANT_DEN, [-1, 39.2, -840, 0]), ([5], [5])],
)
def test_paraconjugate(p, expected):
    assert paraconjugate(Polynomial(p)) == Polynomial(expected)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=10))
def test_paraconjugate_involution(coeffs):
    p = Polynomial(coeffs)
    assert paraconjugate(paraconjugate(p)) == p


def test_paraconjugate_product_is_even():
    p = Polynomial([2.0, 3.0, 5.0, 7.0])
    e = paraconjugate(p) * p
    assert all(e.coeff(i) == 0 for i in range(1, e.degree + 1, 2))


def test_roots_examples():
    assert_root_sets(roots(Polynomial([1, 0, -1])), [1, -1])
    assert_root_sets(roots(Polynomial([1, 39.2, 840])), quad_roots(39.2, 840))
    assert_root_sets(roots(Polynomial(PLANT_DEN)), {0} | quad_roots(39.2, 840))


def test_quadratic_root_values():
    r = roots(Polynomial([1, 39.2, 840]))
    np.testing.assert_allclose(sorted(r.imag), [-21.3504, 21.3504], atol=1e-4)
    np.testing.assert_allclose(r.real, [-19.6, -19.6])


def test_roots_degenerate():
    with pytest.raises(DegenerateInputError):
        roots(Polynomial([3.0]))
    with pytest.raises(DegenerateInputError):
        roots(Polynomial([0.0]))


def test_companion_characteristic_polynomial():
    p = Polynomial([2.0, -3.0, 5.0, 7.0])
    np.testing.assert_allclose(np.poly(companion_matrix(p)), p.coeffs / 2.0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=9).filter(lambda c: abs(c[0]) > 1e-2))
def test_root_residual(coeffs):
    p = Polynomial(coeffs)
    scale = np.max(np.abs(p.coeffs))
    for r in roots(p):
        # residual scaled by |r|^deg so large roots are not penalized for magnitude
        mag = max(1.0, abs(r)) ** p.degree
        assert abs(p(r)) / (scale * mag) < 1e-7


@pytest.mark.parametrize(
    "coeffs, margin, expected",
    [([1, 1], 0.0, True), ([1, -1], 0.0, False), ([1, 39.2, 840], 0.0, True), ([1, 39.2, 840], 20.0, False)],
)
def test_is_hurwitz(coeffs, margin, expected):
    assert is_hurwitz(Polynomial(coeffs), margin) is expected


def test_is_hurwitz_constant():
    with pytest.raises(DegenerateInputError):
        is_hurwitz(Polynomial([1.0]))


def test_divmod_roundtrip():
    n = Polynomial([1.0, 2.0, 3.0, 4.0])
    d = Polynomial([1.0, -1.0])
    q, r = poly_divmod(n, d)
    assert relative_coeff_error(q * d + r, n) < 1e-15


def test_spectral_factor_first_order():
    # (sqrt2 - s)(sqrt2 + s) = 2 - s^2
    d = spectral_factor(Polynomial([-1.0, 0.0, 2.0]))
    np.testing.assert_allclose(d.coeffs, [1.0, SQ2], atol=1e-12)


def test_spectral_factor_quartic():
    # s^4 + 1: left-half-plane roots exp(+-3j pi/4)
    d = spectral_factor(Polynomial([1.0, 0, 0, 0, 1.0]))
    np.testing.assert_allclose(d.coeffs, [1.0, SQ2, 1.0], atol=1e-12)


def test_spectral_factor_positive_leading_and_scale():
    # 9 (2 - s^2) -> 3 (s + sqrt2)
    d = spectral_factor(Polynomial([-9.0, 0.0, 18.0]))
    np.testing.assert_allclose(d.coeffs, [3.0, 3.0 * SQ2], atol=1e-12)


def test_spectral_factor_marginal_origin():
    with pytest.raises(MarginalFactorizationError):
        spectral_factor(Polynomial([-1.0, 0.0, 0.0]))


def test_spectral_factor_marginal_axis_pair():
    d = Polynomial([1.0, 0.0, 4.0]) * Polynomial([1.0, 3.0])
    with pytest.raises(MarginalFactorizationError):
        spectral_factor(paraconjugate(d) * d)


def test_spectral_factor_not_even():
    with pytest.raises(NotEvenError):
        spectral_factor(Polynomial([1.0, 1.0, 1.0]))
    with pytest.raises(NotEvenError):
        spectral_factor(Polynomial([1.0, 0.0]))


def test_spectral_factor_sign_condition():
    # s^2 + 1 has (-1)^1 * 1 < 0
    with pytest.raises(NotNonnegativeError):
        spectral_factor(Polynomial([1.0, 0.0, 1.0]))
    with pytest.raises(NotNonnegativeError):
        spectral_factor(Polynomial([1.0, 0.0, 0.0, 0.0, -1.0]))


def hurwitz_polys():
    root_re = st.floats(0.2, 20.0)
    root_im = st.floats(0.0, 20.0)
    pair = st.tuples(root_re, root_im)
    return st.tuples(st.lists(pair, min_size=1, max_size=3), st.floats(0.1, 10.0))


@settings(max_examples=200, deadline=None)
@given(hurwitz_polys())
def test_spectral_factor_reconstruction_property(data):
    pairs, lead = data
    d = Polynomial([lead])
    for re, im in pairs:
        if im == 0.0:
            d = d * Polynomial([1.0, re])
        else:
            d = d * Polynomial([1.0, 2 * re, re * re + im * im])
    E = paraconjugate(d) * d
    f = spectral_factor(E)
    assert is_hurwitz(f, 0.0)
    assert f.leading > 0
    assert relative_coeff_error(paraconjugate(f) * f, E) < 1e-8
    assert relative_coeff_error(f, d) < 1e-6
