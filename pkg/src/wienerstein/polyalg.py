"""Real univariate polynomials, symmetric functions and Vandermonde solves.

Coefficient lists are stored lowest degree first, so ``coeffs[r]`` multiplies
``x**r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadInput, OutOfRange, SingularVandermonde

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def compensated_horner(coeffs: Sequence[float], x):
    """Evaluate ``sum coeffs[r] x**r`` with a compensated Horner scheme.

    Accurate as if computed in twice the working precision. ``x`` may be a
    scalar or an array.
    """
    x = np.asarray(x, dtype=float)
    if len(coeffs) == 0:
        return np.zeros_like(x)[()]
    s = np.full_like(x, coeffs[-1])
    c = np.zeros_like(x)
    for a in reversed(coeffs[:-1]):
        p, pi = _two_prod(s, x)
        s, sigma = _two_sum(p, a)
        c = c * x + (pi + sigma)
    return (s + c)[()]


@dataclass(frozen=True)
class Poly:
    """Polynomial with real coefficients, trailing zeros trimmed."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        vals = [float(c) for c in self.coeffs]
        if not all(math.isfinite(c) for c in vals):
            raise BadInput("polynomial coefficients must be finite", field="coeffs")
        while vals and vals[-1] == 0.0:
            vals.pop()
        object.__setattr__(self, "coeffs", tuple(vals))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, r: int) -> float:
        return self.coeffs[r] if 0 <= r < len(self.coeffs) else 0.0

    def __call__(self, x):
        return compensated_horner(self.coeffs, x)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.coeffs or not other.coeffs:
            return Poly(())
        return Poly(tuple(np.convolve(self.coeffs, other.coeffs)))

    def derivative(self) -> "Poly":
        return Poly(tuple(r * c for r, c in enumerate(self.coeffs) if r > 0))

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "degree": self.degree}


def elementary_symmetric_all(values: Sequence[float]) -> list[float]:
    """All elementary symmetric polynomials ``e_0, ..., e_n`` of ``values``."""
    e = [1.0] + [0.0] * len(values)
    for i, v in enumerate(values):
        for k in range(i + 1, 0, -1):
            e[k] += v * e[k - 1]
    return e


def elementary_symmetric(values: Sequence[float], k: int) -> float:
    """``e_k(values)``, the sum over k-subsets of products; ``e_0 = 1``."""
    if k < 0 or k > len(values):
        raise OutOfRange(f"order k={k} outside 0..{len(values)}", field="k")
    if k == 0:
        return 1.0
    e = [1.0] + [0.0] * k
    for i, v in enumerate(values):
        for j in range(min(i + 1, k), 0, -1):
            e[j] += v * e[j - 1]
    return e[k]


def poly_from_roots(roots: Sequence[float], include_zero_root: bool = False) -> Poly:
    """Monic polynomial ``x**flag * prod (x - r)``."""
    d = len(roots)
    e = elementary_symmetric_all(roots)
    # Vieta: coefficient of x^k in prod (x - r) is (-1)^(d-k) e_{d-k}
    coeffs = [(-1) ** (d - k) * e[d - k] for k in range(d + 1)]
    if include_zero_root:
        coeffs = [0.0] + coeffs
    return Poly(tuple(coeffs))


def p_polynomial(t) -> Poly:
    """``P(x) = x prod_i (x - alpha_i)`` for the target weights."""
    return poly_from_roots(t.coeffs, include_zero_root=True)


def q_polynomial(t) -> Poly:
    """``Q = P**2``; ``coeffs[r]`` is the weight of the r-th power sum in the discrepancy."""
    p = p_polynomial(t)
    return p * p


def theta(t) -> dict[int, float]:
    """Map ``r -> coefficient of x^r in Q`` for ``r = 2..2q+2``."""
    qp = q_polynomial(t)
    return {r: qp.coeff(r) for r in range(2, 2 * len(t.coeffs) + 3)}


def derivative_at_zero(p: Poly, l: int) -> float:
    """``p^{(l)}(0) = l! * coeffs[l]``."""
    if l < 0:
        raise OutOfRange("derivative order must be >= 0", field="l")
    return math.factorial(l) * p.coeff(l)


def power_sums_from_elementary(e: Sequence[float]) -> list[float]:
    """Power sums ``(s_1..s_d)`` from ``(e_1..e_d)`` by Newton-Girard."""
    d = len(e)
    ee = [1.0] + [float(x) for x in e]
    s = [0.0] * (d + 1)
    for k in range(1, d + 1):
        acc = (-1) ** (k - 1) * k * ee[k]
        for i in range(1, k):
            acc += (-1) ** (i - 1) * ee[i] * s[k - i]
        s[k] = acc
    return s[1:]


def elementary_from_power_sums(s: Sequence[float]) -> list[float]:
    """Inverse of :func:`power_sums_from_elementary`: ``k e_k = sum (-1)^(i-1) e_{k-i} s_i``."""
    d = len(s)
    ss = [0.0] + [float(x) for x in s]
    e = [1.0] + [0.0] * d
    for k in range(1, d + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * ss[i]
        e[k] = acc / k
    return e[1:]


def newton_girard(values: Sequence[float], to: str = "power_sums") -> list[float]:
    """Convert between elementary symmetric polynomials and power sums.

    ``to="power_sums"`` reads ``values`` as ``(e_1..e_d)``; ``to="elementary"``
    reads them as ``(s_1..s_d)``.
    """
    if to == "power_sums":
        return power_sums_from_elementary(values)
    if to == "elementary":
        return elementary_from_power_sums(values)
    raise BadInput(f"unknown conversion direction {to!r}", field="to")


@dataclass(frozen=True)
class VandermondeSystem:
    """``M V = rhs`` with ``M[r, i] = nodes[i] ** (first_power + r)``."""

    nodes: tuple[float, ...]
    rhs: tuple[float, ...]
    first_power: int = 2

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        rhs = tuple(float(x) for x in self.rhs)
        if len(nodes) != len(rhs):
            raise BadInput("nodes and rhs must have equal length", field="rhs")
        if len(set(nodes)) != len(nodes):
            raise SingularVandermonde("Vandermonde nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "rhs", rhs)

    def matrix(self) -> np.ndarray:
        x = np.asarray(self.nodes)
        powers = np.arange(self.first_power, self.first_power + len(x))
        return x[None, :] ** powers[:, None]


def _bjorck_pereyra_primal(x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``sum_j x_j**i z_j = b_i`` (i = 0..n) by Bjorck-Pereyra elimination."""
    z = b.astype(float).copy()
    n = len(x) - 1
    for k in range(n):
        for i in range(n, k, -1):
            z[i] -= x[k] * z[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            z[i] /= x[i] - x[i - k - 1]
        for i in range(k, n):
            z[i] -= z[i + 1]
    return z


def vandermonde_solve(sys: VandermondeSystem, rtol: float = 1e-9) -> np.ndarray:
    """Solve the shifted-power Vandermonde system.

    Rows use powers ``first_power .. first_power+q-1``; the shift is removed
    by solving for ``nodes**first_power * V`` and dividing back.
    """
    x = np.asarray(sys.nodes)
    b = np.asarray(sys.rhs)
    if sys.first_power and np.any(x == 0.0):
        raise SingularVandermonde("zero node with shifted powers makes the system singular")
    w = _bjorck_pereyra_primal(x, b)
    v = w / x ** sys.first_power
    m = sys.matrix()
    resid = np.max(np.abs(m @ v - b)) if len(b) else 0.0
    scale = np.max(np.abs(b)) if len(b) else 0.0
    if not np.all(np.isfinite(v)) or resid > rtol * max(scale, np.finfo(float).tiny):
        cond = float(np.linalg.cond(m))
        raise SingularVandermonde(
            f"Vandermonde residual {resid:.3e} exceeds {rtol:g} * |rhs| (condition ~ {cond:.3e})",
            condition=cond)
    return v
