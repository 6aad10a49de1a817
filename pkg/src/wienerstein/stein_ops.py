"""Stein differential operators for Gamma mixtures and second-chaos targets.

Every operator here has coefficients that are affine in ``x``: the term of
order ``l`` is ``(c_l + s_l x) phi^{(l)}(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cumulants import chaos_cumulant
from .errors import BadInput, BranchCut
from .polyalg import elementary_symmetric_all, p_polynomial
from .spectrum import GammaMixtureSpec, TargetSpectrum
from .testfunctions import TestFunction


@dataclass(frozen=True)
class DifferentialOperator:
    """``sum_l (c_l + s_l x) phi^{(l)}(x)`` stored as ``coeffs[l] = (c_l, s_l)``."""

    coeffs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple((float(c) + 0.0, float(s) + 0.0) for c, s in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float).reshape(-1, 2)

    def scaled(self, factor: float) -> "DifferentialOperator":
        return DifferentialOperator(tuple((factor * c, factor * s) for c, s in self.coeffs))

    def to_json(self) -> dict:
        return {"order": self.order,
                "coeffs": [{"l": l, "const": c, "x": s} for l, (c, s) in enumerate(self.coeffs)]}

    def to_latex(self) -> str:
        terms = []
        for l, (c, s) in enumerate(self.coeffs):
            if c == 0.0 and s == 0.0:
                continue
            parts = []
            if s != 0.0:
                parts.append(f"{s:.12g}x")
            if c != 0.0:
                parts.append(f"{c:+.12g}" if parts else f"{c:.12g}")
            factor = "".join(parts)
            deriv = r"\varphi(x)" if l == 0 else rf"\varphi^{{({l})}}(x)"
            terms.append(rf"\left({factor}\right){deriv}")
        return " + ".join(reversed(terms)) if terms else "0"


def build_gamma_mixture_operator(spec: GammaMixtureSpec) -> DifferentialOperator:
    """Operator characterising ``sum_i lambda_i (Gamma(m_i alpha_i, mu_i) - m_i alpha_i/mu_i)``."""
    d = spec.d
    r = list(spec.ratios)
    shifts = [c.mean_shift for c in spec.components]
    e_all = elementary_symmetric_all(r)
    e_minus = [elementary_symmetric_all(r[:k] + r[k + 1:]) for k in range(d)]
    coeffs = [(0.0, 1.0)]
    for l in range(1, d):
        const = math.fsum(shifts[k] * (e_all[l] - e_minus[k][l]) for k in range(d))
        sign = (-1) ** l
        coeffs.append((sign * const, sign * e_all[l]))
    top = (-1) ** d * e_all[d]
    coeffs.append((top * spec.shift, top))
    return DifferentialOperator(tuple(coeffs))


def malliavin_coefficients(t: TargetSpectrum) -> tuple[list[float], list[float]]:
    """Return ``(a, b)`` indexed so that ``a[l]`` and ``b[l]`` match their subscripts.

    ``a_l = P^{(l)}(0) / (l! 2^{l-1})`` and
    ``b_l = sum_{r=l}^{q+1} a_r kappa_{r-l+2}(F_inf) / (r-l+1)!``.
    """
    q = t.q
    p = p_polynomial(t)
    a = [0.0] + [p.coeff(l) / 2.0 ** (l - 1) for l in range(1, q + 2)]
    ts = t.as_spectrum()
    kap = {r: chaos_cumulant(ts, r) for r in range(2, q + 2)}
    b = [0.0, 0.0] + [
        math.fsum(a[r] * kap[r - l + 2] / math.factorial(r - l + 1) for r in range(l, q + 2))
        for l in range(2, q + 2)]
    return a, b


def build_malliavin_operator(t: TargetSpectrum) -> DifferentialOperator:
    """``sum_{l=2}^{q+1} (b_l - a_{l-1} x) f^{(q+2-l)} - a_{q+1} x f``."""
    if not t.base_law.is_chisq1:
        raise BadInput("the cumulant-coefficient operator needs chi-square blocks", field="base_law")
    q = t.q
    a, b = malliavin_coefficients(t)
    coeffs = [(0.0, 0.0)] * (q + 1)
    coeffs[0] = (0.0, -a[q + 1])
    for l in range(2, q + 2):
        coeffs[q + 2 - l] = (b[l], -a[l - 1])
    return DifferentialOperator(tuple(coeffs))


def apply(op: DifferentialOperator, f: TestFunction, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for l, (c, s) in enumerate(op.coeffs):
        if c == 0.0 and s == 0.0:
            continue
        out = out + (c + s * x) * f.derivative(l, x)
    return out[()]


def operators_proportional(a: DifferentialOperator, b: DifferentialOperator,
                           rtol: float = 1e-10) -> tuple[bool, float | None]:
    """Check ``a = c b`` entrywise for some nonzero ``c``; returns ``(flag, c)``."""
    if a.order != b.order:
        return False, None
    xa, xb = a.as_array().ravel(), b.as_array().ravel()
    i = int(np.argmax(np.abs(xb)))
    if xb[i] == 0.0 or xa[i] == 0.0:
        return False, None
    c = xa[i] / xb[i]
    scale = np.max(np.abs(xa))
    ok = bool(np.all(np.abs(xa - c * xb) <= rtol * scale))
    return (True, float(c)) if ok else (False, None)


@dataclass(frozen=True)
class ResidualRow:
    function: str
    mean: float
    stderr: float

    @property
    def z(self) -> float:
        return self.mean / self.stderr if self.stderr > 0 else (0.0 if self.mean == 0 else math.inf)


def mc_characterization_residual(op: DifferentialOperator, law, fs: Sequence[TestFunction],
                                 n: int, seed: int = 0, workers: int = 1) -> list[ResidualRow]:
    """Monte Carlo estimate of ``E[op f(F)]`` for each test function."""
    from .sampling import sample_law

    if n < 10_000:
        raise BadInput("Monte Carlo characterisation needs n >= 1e4", field="samples")
    x = sample_law(law, n, seed, workers=workers).values
    rows = []
    for f in fs:
        v = apply(op, f, x)
        rows.append(ResidualRow(f.name, float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(n))))
    return rows


def characteristic_function(spec: GammaMixtureSpec, xi):
    """``exp(-i xi shift) prod_j (1 - i (lambda_j/mu_j) xi)^{-m_j alpha_j}`` (principal branch)."""
    xi = np.asarray(xi, dtype=float)
    out = np.exp(-1j * xi * spec.shift)
    for c in spec.components:
        out = out * (1.0 - 1j * c.ratio * xi) ** (-c.multiplicity * c.shape)
    return out[()]


def _check_branch(spec: GammaMixtureSpec, xi: np.ndarray):
    for c in spec.components:
        z = 1.0 - 1j * c.ratio * xi
        if np.any((z.real <= 0) & (z.imag == 0)):
            raise BranchCut("1 - i (lambda/mu) xi meets the negative real axis")


def cf_ode_residual(spec: GammaMixtureSpec, xi_grid) -> float:
    """Max relative residual of the first-order ODE satisfied by the characteristic function.

    With ``nu_k = mu_k / lambda_k`` the ODE reads
    ``prod(nu_k - i xi) phi' = [-i shift prod(nu_k - i xi)
    + i sum_k m_k alpha_k prod_{l != k}(nu_l - i xi)] phi``.
    The derivative is taken factor by factor (product rule) and the
    polynomials in ``i xi`` are expanded through their elementary symmetric
    coefficients, so both sides are computed along separate routes.
    """
    xi = np.asarray(xi_grid, dtype=float).ravel()
    if not np.all(np.isfinite(xi)):
        raise BadInput("xi grid must be finite", field="xi_grid")
    _check_branch(spec, xi)
    comps = spec.components
    d = spec.d
    factors = [(1.0 - 1j * c.ratio * xi) ** (-c.multiplicity * c.shape) for c in comps]
    expo = np.exp(-1j * xi * spec.shift)
    phi = expo * np.prod(factors, axis=0)
    dphi = -1j * spec.shift * phi
    for k, c in enumerate(comps):
        a = c.multiplicity * c.shape
        dk = a * 1j * c.ratio * (1.0 - 1j * c.ratio * xi) ** (-a - 1)
        others = np.prod([factors[j] for j in range(d) if j != k], axis=0) if d > 1 else 1.0
        dphi = dphi + expo * dk * others

    z = 1j * xi

    def vieta(nus):
        # prod_k (nu_k - z) = sum_j (-1)^j e_{n-j}(nu) z^j
        e = elementary_symmetric_all(nus)
        n = len(nus)
        return sum((-1) ** j * e[n - j] * z ** j for j in range(n + 1))

    nu = [c.rate / c.weight for c in comps]
    full = vieta(nu)
    lhs = full * dphi
    parts = [1j * c.multiplicity * c.shape * vieta(nu[:k] + nu[k + 1:]) * phi
             for k, c in enumerate(comps)]
    first = -1j * spec.shift * full * phi
    rhs = first + sum(parts)
    scale = np.abs(lhs) + np.abs(first) + sum(np.abs(p) for p in parts)
    scale = np.where(scale > 0, scale, 1.0)
    return float(np.max(np.abs(lhs - rhs) / scale))
