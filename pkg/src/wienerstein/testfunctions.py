"""Test functions with closed-form derivatives of every order.

The catalog is fixed and versioned: changing it changes the Monte Carlo
tables produced by ``stein-check``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite_e

CATALOG_VERSION = "1"


class TestFunction:
    """A smooth function ``phi`` together with ``phi^{(k)}`` in closed form."""

    __test__ = False  # keep pytest from collecting this class
    name = "f"

    def derivative(self, k: int, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.derivative(0, x)


@dataclass(frozen=True, eq=False)
class Polynomial(TestFunction):
    coeffs: tuple[float, ...]
    name: str = "poly"

    def derivative(self, k, x):
        c = np.polynomial.polynomial.polyder(np.asarray(self.coeffs, dtype=float), k) \
            if k else np.asarray(self.coeffs, dtype=float)
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), c)


@dataclass(frozen=True, eq=False)
class Sine(TestFunction):
    omega: float = 1.0
    name: str = "sin"

    def derivative(self, k, x):
        return self.omega ** k * np.sin(self.omega * np.asarray(x, dtype=float) + k * math.pi / 2)


def _hermite_e(n, z):
    c = np.zeros(n + 1)
    c[n] = 1.0
    return hermite_e.hermeval(z, c)


@dataclass(frozen=True, eq=False)
class GaussianBump(TestFunction):
    """``exp(-(x - center)^2 / (2 width^2))``; derivatives via probabilists' Hermite polynomials."""

    center: float = 0.0
    width: float = 1.0
    name: str = "gauss"

    def derivative(self, k, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return (-1) ** k * self.width ** (-k) * _hermite_e(k, z) * np.exp(-0.5 * z * z)


@dataclass(frozen=True, eq=False)
class GaussianTimesX(TestFunction):
    """``x exp(-x^2/2) = -d/dx exp(-x^2/2)``."""

    name: str = "x_gauss"

    def derivative(self, k, x):
        x = np.asarray(x, dtype=float)
        return (-1) ** k * _hermite_e(k + 1, x) * np.exp(-0.5 * x * x)


@dataclass(frozen=True, eq=False)
class Lorentzian(TestFunction):
    """``1 / (1 + x^2) = Im 1/(x - i)``."""

    name: str = "lorentz"

    def derivative(self, k, x):
        z = np.asarray(x, dtype=float) - 1j
        return ((-1) ** k * math.factorial(k) * z ** (-(k + 1))).imag


@dataclass(frozen=True, eq=False)
class LinearCombination(TestFunction):
    terms: tuple[tuple[float, TestFunction], ...]
    name: str = "combo"

    def derivative(self, k, x):
        return sum(w * f.derivative(k, x) for w, f in self.terms)


def catalog() -> list[TestFunction]:
    return [
        Polynomial((0.0, 1.0), name="x"),
        Polynomial((0.0, 0.0, 1.0), name="x^2"),
        Polynomial((0.0, 0.0, 0.0, 1.0), name="x^3"),
        Sine(1.0, name="sin(x)"),
        Sine(2.0, name="sin(2x)"),
        GaussianBump(name="exp(-x^2/2)"),
        GaussianTimesX(name="x*exp(-x^2/2)"),
        Lorentzian(name="1/(1+x^2)"),
    ]


def by_name(name: str) -> TestFunction:
    for f in catalog():
        if f.name == name:
            return f
    raise KeyError(name)
