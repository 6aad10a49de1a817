"""Cumulants of the generalized Rosenblatt variable and of its two-atom limit.

``kappa_m(Z) = (1/2) (m-1)! A^m C_m`` where ``C_m`` is a sum over sign
patterns ``sigma in {1,2}^m`` of integrals over ``(0,1)^m`` of products of
powers of consecutive differences ``s_j - s_{j-1}``. Indices are cyclic
(``s_0 = s_m``) and ``sigma'_j = 3 - sigma_j``.

For a fixed pattern and a fixed ordering of the ``s_j`` the integrand is a
product of powers of gaps between order statistics. Integrating out the
position and the overall span of the points leaves
``1 / ((S+1)(S+2))`` times an integral over the unit simplex of the inner
gaps, where ``S = m - 2 + sum_j e_j``. That simplex integral is a single
Beta function for ``m = 3``; for ``m = 4`` one variable is integrated in
closed form and the other by adaptive quadrature.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import betaln, hyp2f1

from .errors import DomainError, QuadratureBudgetExceeded
from .spectrum import TargetSpectrum


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function through log-Gamma."""
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"Beta function needs positive arguments, got ({a}, {b})", field="beta")
    return math.exp(betaln(a, b))


@dataclass(frozen=True)
class RosenblattParams:
    gamma1: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}", field="rho")
        g1, g2 = self.gamma1, self.gamma2
        if not -1.0 < g1 < -0.5:
            raise DomainError(f"gamma1 must lie in (-1, -1/2), got {g1}", field="gamma1")
        if not -1.0 < g2 < -0.5:
            raise DomainError(f"derived gamma2 = {g2} leaves (-1, -1/2)", field="gamma1")
        if not g1 + g2 > -1.5:
            raise DomainError(f"gamma1 + gamma2 = {g1 + g2} must exceed -3/2", field="gamma1")

    @property
    def gamma2(self) -> float:
        return (self.gamma1 + 0.5) / self.rho - 0.5

    @property
    def epsilon(self) -> float:
        """Distance ``-gamma1 - 1/2`` to the limit."""
        return -self.gamma1 - 0.5


@dataclass(frozen=True)
class YRhoTarget:
    rho: float
    a_rho: float
    b_rho: float

    def target(self) -> TargetSpectrum:
        r2 = math.sqrt(2.0)
        return TargetSpectrum((self.a_rho / r2, self.b_rho / r2))

    def cumulant(self, m: int) -> float:
        return 2.0 ** (m / 2 - 1) * (self.a_rho ** m + self.b_rho ** m) * math.factorial(m - 1)


def y_rho(rho: float) -> YRhoTarget:
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho}", field="rho")
    u, v = 1.0 / (rho + 1.0), 1.0 / (2.0 * math.sqrt(rho))
    den = math.sqrt(2.0 * u * u + 1.0 / (2.0 * rho))
    return YRhoTarget(rho, (u + v) / den, (u - v) / den)


def amplitude(p: RosenblattParams) -> float:
    g1, g2 = p.gamma1, p.gamma2
    s = g1 + g2
    mix = (beta_fn(g1 + 1, -s - 1) * beta_fn(g2 + 1, -s - 1)
           + beta_fn(g1 + 1, -2 * g1 - 1) * beta_fn(g2 + 1, -2 * g2 - 1))
    return math.sqrt((s + 2) * (2 * s + 3)) / math.sqrt(mix)


@dataclass(frozen=True)
class IntegrationConfig:
    rtol: float = 1e-8
    max_subintervals: int = 200


def _simplex_integral_4(a, b02, b13, cfg: IntegrationConfig):
    """``int u1^a1 u2^a2 u3^a3 (u1+u2)^b02 (u2+u3)^b13 du1 du2`` over ``u1+u2+u3 = 1``.

    With ``t = u1 + u2`` and ``u1 = t v`` the factor ``u2 + u3`` becomes
    ``1 - t v`` and the ``v`` integral is ``B(a1+1, a2+1) 2F1(-b13, a1+1; a1+a2+2; t)``.
    """
    a1, a2, a3 = a
    c = a1 + a2 + b02 + 1.0

    def f(t):
        return t ** c * (1.0 - t) ** a3 * hyp2f1(-b13, a1 + 1.0, a1 + a2 + 2.0, t)

    # a poor estimate surfaces through err, so scipy's own warning is redundant
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=max(cfg.rtol / 10, 1e-13),
                                  limit=cfg.max_subintervals)
    pref = beta_fn(a1 + 1.0, a2 + 1.0)
    return pref * val, pref * err


def _edge_data(g, sigma):
    m = len(sigma)
    sp = [3 - x for x in sigma]
    e, up, down = [], [], []
    for j in range(m):
        a, b = g[sp[j - 1]], g[sigma[j]]
        ej = a + b + 1.0
        e.append(ej)
        up.append(beta_fn(a + 1.0, -ej))  # s_j > s_{j-1}
        down.append(beta_fn(b + 1.0, -ej))  # s_j < s_{j-1}
    return e, up, down


def c_m(p: RosenblattParams, m: int, cfg: IntegrationConfig = IntegrationConfig()
        ) -> tuple[float, float]:
    """``C_m(gamma1, gamma2, 1, 1)`` and an error estimate, for ``m = 2, 3, 4``."""
    if m not in (2, 3, 4):
        raise DomainError(f"order m must be 2, 3 or 4, got {m}", field="m")
    g = {1: p.gamma1, 2: p.gamma2}
    total, err = 0.0, 0.0
    cache: dict = {}
    for sigma in itertools.product((1, 2), repeat=m):
        e, up, down = _edge_data(g, sigma)
        S = m - 2 + sum(e)
        outer = 1.0 / ((S + 1.0) * (S + 2.0))
        for perm in itertools.permutations(range(m)):
            pos = [0] * m
            for rank, idx in enumerate(perm):
                pos[idx] = rank
            coef = 1.0
            span = {}
            for j in range(m):
                coef *= up[j] if pos[j] > pos[j - 1] else down[j]
                key = tuple(sorted((pos[j], pos[j - 1])))
                span[key] = span.get(key, 0.0) + e[j]
            if m == 2:
                J, dJ = 1.0, 0.0
            elif m == 3:
                J = beta_fn(span.get((0, 1), 0.0) + 1, span.get((1, 2), 0.0) + 1)
                dJ = 0.0
            else:
                a = (span.get((0, 1), 0.0), span.get((1, 2), 0.0), span.get((2, 3), 0.0))
                key = a + (span.get((0, 2), 0.0), span.get((1, 3), 0.0))
                if key not in cache:
                    cache[key] = _simplex_integral_4(a, key[3], key[4], cfg)
                J, dJ = cache[key]
            total += coef * outer * J
            err += coef * outer * dJ
    err += 1e-14 * abs(total)
    if err > cfg.rtol * abs(total) * 10:
        raise QuadratureBudgetExceeded(
            f"C_{m} error estimate {err:.3e} exceeds tolerance", error_estimate=err)
    return total, err


def rosenblatt_cumulant(p: RosenblattParams, m: int,
                        cfg: IntegrationConfig = IntegrationConfig()) -> tuple[float, float]:
    """``kappa_m(Z)`` and its propagated error estimate."""
    c, dc = c_m(p, m, cfg)
    f = 0.5 * math.factorial(m - 1) * amplitude(p) ** m
    return f * c, f * dc


@dataclass(frozen=True)
class RateRow:
    gamma1: float
    m: int
    kappa_z: float
    kappa_y: float
    gap: float
    error: float


@dataclass(frozen=True)
class RateResult:
    rows: tuple[RateRow, ...]
    slopes: dict  # m -> fitted log-log slope of gap against -gamma1 - 1/2


def default_grid(j_min: int = 3, j_max: int = 8) -> list[float]:
    return [-0.5 - 2.0 ** -j for j in range(j_min, j_max + 1)]


def rate_experiment(rho: float, gamma1_grid: Sequence[float], orders: Sequence[int] = (3,),
                    cfg: IntegrationConfig = IntegrationConfig()) -> RateResult:
    y = y_rho(rho)
    rows = []
    for g1 in gamma1_grid:
        p = RosenblattParams(float(g1), rho)
        for m in orders:
            kz, err = rosenblatt_cumulant(p, m, cfg)
            ky = y.cumulant(m)
            rows.append(RateRow(float(g1), m, kz, ky, abs(kz - ky), err))
    slopes = {}
    for m in orders:
        pts = [(-r.gamma1 - 0.5, r.gap) for r in rows if r.m == m and r.gap > 0]
        if len(pts) >= 2:
            x, yv = np.log([q[0] for q in pts]), np.log([q[1] for q in pts])
            slopes[m] = float(np.polyfit(x, yv, 1)[0])
    return RateResult(tuple(rows), slopes)
