import math

import numpy as np
import pytest

import oracles
from wienerstein.errors import BadInput
from wienerstein.spectrum import (BaseLaw, GammaMixtureSpec, Spectrum, TargetSpectrum,
                                  chaos_target_as_gamma)
from wienerstein.stein_ops import (DifferentialOperator, apply, build_gamma_mixture_operator,
                                   build_malliavin_operator, cf_ode_residual,
                                   characteristic_function, malliavin_coefficients,
                                   mc_characterization_residual, operators_proportional)
from wienerstein.targets import BUILTIN_TARGETS
from wienerstein.testfunctions import Polynomial, catalog

PN = TargetSpectrum((0.5, -0.5))


def test_golden_single_gamma():
    lam, q = 0.3, 4
    op = build_gamma_mixture_operator(GammaMixtureSpec.from_arrays([lam], [q], [0.5], [0.5]))
    assert op.coeffs == ((0.0, 1.0), (-2 * lam * q * lam, -2 * lam))


def test_golden_product_normal():
    op = build_gamma_mixture_operator(chaos_target_as_gamma(PN, [1, 1]))
    assert op.coeffs == ((0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


@pytest.mark.parametrize("lams,ms,shapes,rates", [
    ([0.3], [4], [0.5], [0.5]),
    ([0.5, -0.5], [1, 1], [0.5, 0.5], [0.5, 0.5]),
    ([0.7, -0.2, 0.4], [1, 2, 3], [0.5, 1.5, 2.0], [1.0, 0.5, 3.0]),
    ([1.5, -0.25, 0.5, -1.0], [2, 1, 1, 4], [0.3, 0.5, 1.0, 2.5], [2.0, 0.5, 0.75, 1.25]),
])
def test_fourier_operator_vs_symbolic(lams, ms, shapes, rates):
    op = build_gamma_mixture_operator(GammaMixtureSpec.from_arrays(lams, ms, shapes, rates))
    ref = oracles.fourier_operator_sympy(lams, ms, shapes, rates)
    np.testing.assert_allclose(op.as_array(), np.array(ref), rtol=1e-12, atol=1e-13)


def test_apply_examples():
    zero = DifferentialOperator(((0.0, 0.0), (0.0, 0.0)))
    assert apply(zero, catalog()[3], 1.3) == 0.0
    xonly = DifferentialOperator(((0.0, 1.0),))
    assert apply(xonly, Polynomial((1.0,), "1"), 3.0) == 3.0
    op = build_gamma_mixture_operator(chaos_target_as_gamma(PN, [1, 1]))
    assert apply(op, Polynomial((0.0, 0.0, 1.0), "x^2"), 1.0) == -3.0


def test_apply_linear_in_function():
    op = build_malliavin_operator(BUILTIN_TARGETS["three_point"])
    f, g = catalog()[3], catalog()[6]
    x = np.linspace(-2, 2, 9)
    from wienerstein.testfunctions import LinearCombination
    h = LinearCombination(((2.0, f), (-0.5, g)))
    np.testing.assert_allclose(apply(op, h, x), 2 * apply(op, f, x) - 0.5 * apply(op, g, x),
                               rtol=1e-12, atol=1e-12)


def test_constant_function_gives_zero_for_pure_derivative_part():
    op = build_gamma_mixture_operator(chaos_target_as_gamma(PN, [1, 1]))
    c = Polynomial((1.0,), "1")
    # only the order-0 term survives: x * 1
    np.testing.assert_array_equal(apply(op, c, np.array([-1.0, 0.0, 2.0])), [-1.0, 0.0, 2.0])


def test_proportionality():
    op = build_malliavin_operator(PN)
    assert operators_proportional(op.scaled(2.0), op) == (True, 2.0)
    other = build_malliavin_operator(TargetSpectrum((0.6, 0.8)))
    assert operators_proportional(op, other)[0] is False


@pytest.mark.parametrize("name", sorted(BUILTIN_TARGETS))
def test_malliavin_proportional_to_fourier(name):
    t = BUILTIN_TARGETS[name]
    m = build_malliavin_operator(t)
    f = build_gamma_mixture_operator(chaos_target_as_gamma(t, [1] * t.q))
    ok, c = operators_proportional(f, m)
    assert ok and c == pytest.approx(-(2.0 ** t.q), rel=1e-10)


def test_malliavin_coefficients_product_normal():
    a, b = malliavin_coefficients(PN)
    # P(x) = x^3 - x/4
    assert a[1:] == [-0.25, 0.0, 0.25]
    # b_2 = a_2 k_2 + a_3 k_3 / 2 = 0 and b_3 = a_3 k_2
    assert b[2] == 0.0 and b[3] == 0.25


def test_malliavin_rejects_other_base():
    t = TargetSpectrum((0.6, 0.8), BaseLaw((1.0, 0.5, 1.0, 1.0)))
    with pytest.raises(BadInput):
        build_malliavin_operator(t)


def test_cf_at_zero_and_oracle():
    spec = GammaMixtureSpec.from_arrays([0.7, -0.3], [1, 2], [0.5, 1.5], [1.0, 2.0])
    assert characteristic_function(spec, 0.0) == 1.0
    for xi in (-2.0, 0.4, 1.7):
        ref = np.prod([oracles.gamma_cf_levy_khintchine(c.weight, c.multiplicity * c.shape,
                                                        c.rate, xi) for c in spec.components])
        assert abs(characteristic_function(spec, xi) - ref) < 1e-8


def test_cf_residual_single_component():
    spec = GammaMixtureSpec.from_arrays([0.9], [3], [0.5], [0.5])
    assert cf_ode_residual(spec, np.linspace(-20, 20, 401)) <= 1e-12


def test_cf_residual_mixture():
    spec = GammaMixtureSpec.from_arrays([1.5, -0.25, 0.5], [2, 1, 1], [0.3, 0.5, 1.0],
                                        [2.0, 0.5, 0.75])
    assert cf_ode_residual(spec, np.linspace(-30, 30, 1001)) <= 1e-10


def test_cf_residual_rejects_nonfinite_grid():
    spec = GammaMixtureSpec.from_arrays([0.9], [1], [0.5], [0.5])
    with pytest.raises(BadInput):
        cf_ode_residual(spec, [0.0, math.inf])


def test_mc_residual_right_law_is_small():
    op = build_malliavin_operator(PN)
    rows = mc_characterization_residual(op, PN, catalog(), 100_000, seed=1)
    assert all(abs(r.z) < 4.5 for r in rows)


def test_mc_residual_detects_wrong_law():
    op = build_malliavin_operator(PN)
    rows = mc_characterization_residual(op, Spectrum((1.0,)), catalog(), 100_000, seed=1)
    assert max(abs(r.z) for r in rows) >= 6


def test_mc_residual_needs_enough_samples():
    with pytest.raises(BadInput):
        mc_characterization_residual(build_malliavin_operator(PN), PN, catalog(), 999)


def test_malliavin_coefficients_two_weights():
    l1, l2 = 0.6, 0.8
    a, b = malliavin_coefficients(TargetSpectrum((l1, l2)))
    assert a[1:] == pytest.approx([l1 * l2, -(l1 + l2) / 2, 0.25], rel=1e-14)
    assert b[3] == pytest.approx((l1 ** 2 + l2 ** 2) / 2, rel=1e-14)
    assert b[2] == pytest.approx(-l1 * l2 * (l1 + l2), rel=1e-13)
