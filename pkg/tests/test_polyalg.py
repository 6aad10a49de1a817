import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wienerstein.errors import OutOfRange, SingularVandermonde
from wienerstein.polyalg import (Poly, VandermondeSystem, compensated_horner, derivative_at_zero,
                                 elementary_symmetric, newton_girard, p_polynomial,
                                 poly_from_roots, q_polynomial, theta, vandermonde_solve)
from wienerstein.spectrum import TargetSpectrum

small = st.floats(-2, 2, allow_nan=False)


def test_theta_product_normal_exact():
    th = theta(TargetSpectrum((0.5, -0.5)))
    ref = oracles.theta_exact([Fraction(1, 2), Fraction(-1, 2)])
    assert th == {r: float(v) for r, v in ref.items()}
    assert th[2] == 1 / 16 and th[4] == -0.5 and th[6] == 1.0


def _unit(alphas):
    n = math.sqrt(math.fsum(a * a for a in alphas))
    return tuple(a / n for a in alphas)


@pytest.mark.parametrize("alphas", [(0.6, 0.8), _unit((0.1, -0.3, 0.7)), _unit((2, -1, 0.5, 3))])
def test_theta_matches_exact_rational_expansion(alphas):
    t = TargetSpectrum(alphas)
    ref = oracles.theta_exact([Fraction(a) for a in t.coeffs])
    th = theta(t)
    for r, v in ref.items():
        assert th[r] == pytest.approx(float(v), rel=1e-13, abs=1e-15)


def test_q_is_square_of_p():
    t = TargetSpectrum((0.6, 0.8))
    x = np.linspace(-2, 2, 17)
    assert np.allclose(q_polynomial(t)(x), p_polynomial(t)(x) ** 2, rtol=1e-13, atol=1e-15)


def test_p_leading_and_zero_root():
    p = p_polynomial(TargetSpectrum((0.6, 0.8)))
    assert p.degree == 3 and p.coeff(3) == 1.0 and p.coeff(0) == 0.0
    assert derivative_at_zero(p, 3) == 6.0


@given(st.lists(small, min_size=0, max_size=7), st.integers(0, 7))
def test_elementary_symmetric_vs_bruteforce(vals, k):
    if k > len(vals):
        with pytest.raises(OutOfRange):
            elementary_symmetric(vals, k)
        return
    assert elementary_symmetric(vals, k) == pytest.approx(
        oracles.elementary_bruteforce(vals, k), rel=1e-11, abs=1e-11)


def test_elementary_symmetric_examples():
    assert elementary_symmetric([1, 2, 3], 2) == 11.0
    assert elementary_symmetric([], 0) == 1.0


@given(st.lists(small, min_size=1, max_size=6))
def test_newton_girard_roundtrip(vals):
    e = [elementary_symmetric(vals, k) for k in range(1, len(vals) + 1)]
    s = newton_girard(e, to="power_sums")
    ref = [sum(v ** k for v in vals) for k in range(1, len(vals) + 1)]
    assert np.allclose(s, ref, rtol=1e-9, atol=1e-9)
    back = newton_girard(s, to="elementary")
    assert np.allclose(back, e, rtol=1e-8, atol=1e-8)


@given(st.lists(small, min_size=1, max_size=6), small)
def test_poly_from_roots_vanishes(roots, x):
    p = poly_from_roots(roots)
    assert p(x) == pytest.approx(math.prod(x - r for r in roots), rel=1e-10, abs=1e-10)
    for r in roots:
        assert abs(p(r)) <= 1e-9 * max(1.0, max(abs(v) for v in p.coeffs))


def test_compensated_horner_near_multiple_root():
    # (x - 1)^7 in expanded form; near x = 1 the plain scheme loses every digit
    p = poly_from_roots([1.0] * 7)
    x = 1.0 + 1e-3
    exact = Fraction(x) - 1
    exact = float(exact ** 7)
    naive = np.polynomial.polynomial.polyval(x, p.coeffs)
    assert abs(naive - exact) > 1e3 * abs(exact)
    assert abs(compensated_horner(p.coeffs, x) - exact) < 1e-6 * abs(exact)


def test_poly_derivative_and_mul():
    p = Poly((1.0, 2.0, 3.0))
    assert p.derivative().coeffs == (2.0, 6.0)
    assert (p * Poly((0.0, 1.0))).coeffs == (0.0, 1.0, 2.0, 3.0)
    assert Poly((0.0, 0.0)).degree == -1


@given(st.lists(st.floats(0.1, 1.0), min_size=2, max_size=4, unique=True),
       st.lists(st.floats(-2, 2), min_size=4, max_size=4))
@settings(max_examples=60)
def test_vandermonde_vs_numpy(nodes, rhs):
    signs = [1, -1, 1, -1]
    nodes = [n * s for n, s in zip(nodes, signs)]
    if min(abs(a - b) for i, a in enumerate(nodes) for b in nodes[i + 1:]) < 0.05:
        return
    sys = VandermondeSystem(tuple(nodes), tuple(rhs[:len(nodes)]))
    ref = oracles.vandermonde_numpy(nodes, rhs[:len(nodes)])
    assert np.allclose(vandermonde_solve(sys), ref, rtol=1e-8, atol=1e-8)


def test_vandermonde_recovers_ones_on_target():
    t = TargetSpectrum((0.5, -0.5))
    v = vandermonde_solve(VandermondeSystem(t.coeffs, [t.power_sum(r) for r in (2, 3)]))
    assert tuple(int(round(x)) for x in v) == (1, 1)


def test_vandermonde_singular():
    with pytest.raises(SingularVandermonde):
        VandermondeSystem((0.5, 0.5), (1.0, 1.0))
    with pytest.raises(SingularVandermonde):
        vandermonde_solve(VandermondeSystem((0.0, 0.5), (1.0, 1.0)))
