"""Exact and empirical cumulants.

For ``F = sum_k alpha_k W_k`` with i.i.d. ``W``, additivity and homogeneity
give ``kappa_r(F) = kappa_r(W) * sum_k alpha_k**r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadInput, InsufficientSamples, OrderTooLow
from .spectrum import Spectrum, chisq1_cumulant

MAX_EMPIRICAL_ORDER = 8
MIN_EMPIRICAL_SAMPLES = 1000


@dataclass(frozen=True)
class CumulantVector:
    """Cumulants ``kappa_2..kappa_R``; ``stderr`` is set for empirical vectors."""

    values: tuple[float, ...]
    provenance: str = "exact"
    sample_size: int | None = None
    seed: int | None = None
    stderr: tuple[float, ...] | None = None

    @property
    def R(self) -> int:
        return len(self.values) + 1

    def __getitem__(self, r: int) -> float:
        """Cumulant of order ``r`` (``r >= 2``)."""
        if r < 2 or r > self.R:
            raise KeyError(r)
        return self.values[r - 2]


def chaos_cumulant(s: Spectrum, r: int) -> float:
    """``2^(r-1) (r-1)! sum alpha_k^r`` for a second-chaos spectrum."""
    if r < 2:
        raise OrderTooLow(f"cumulant order must be >= 2, got {r}", field="r")
    if not s.base_law.is_chisq1:
        raise BadInput("chaos_cumulant needs the centered chi-square base law", field="base_law")
    return chisq1_cumulant(r) * s.power_sum(r)


def weighted_sum_cumulant(s: Spectrum, r: int) -> float:
    """``kappa_r(W) * sum alpha_k^r`` for the spectrum's base law."""
    if r < 2:
        raise OrderTooLow(f"cumulant order must be >= 2, got {r}", field="r")
    return s.base_law.kappa(r) * s.power_sum(r)


def exact_cumulants(s: Spectrum, R: int) -> CumulantVector:
    return CumulantVector(tuple(weighted_sum_cumulant(s, r) for r in range(2, R + 1)))


def moments_from_cumulants(kappas: Sequence[float]) -> list[float]:
    """Raw moments ``m_0..m_n`` from cumulants ``kappa_1..kappa_n``.

    Uses ``m_n = sum_{k=1}^{n} C(n-1, k-1) kappa_k m_{n-k}``.
    """
    kap = [0.0] + [float(k) for k in kappas]
    n = len(kappas)
    m = [1.0] + [0.0] * n
    for j in range(1, n + 1):
        m[j] = math.fsum(math.comb(j - 1, k - 1) * kap[k] * m[j - k] for k in range(1, j + 1))
    return m


def _cumulants_and_jacobian(m: np.ndarray):
    """Cumulants ``kappa_1..kappa_n`` from raw moments ``m_0..m_n`` plus d kappa / d m.

    ``jac[j, i]`` is the derivative of ``kappa_j`` with respect to ``m_i``.
    """
    n = len(m) - 1
    kap = np.zeros(n + 1)
    jac = np.zeros((n + 1, n + 1))
    for j in range(1, n + 1):
        kap[j] = m[j]
        jac[j, j] = 1.0
        for k in range(1, j):
            c = math.comb(j - 1, k - 1)
            kap[j] -= c * kap[k] * m[j - k]
            jac[j] -= c * jac[k] * m[j - k]
            jac[j, j - k] -= c * kap[k]
    return kap, jac


def cumulants_from_moments(m: Sequence[float]) -> list[float]:
    """Cumulants ``kappa_1..kappa_n`` from raw moments ``m_0..m_n`` (``m_0 = 1``)."""
    kap, _ = _cumulants_and_jacobian(np.asarray(m, dtype=float))
    return list(kap[1:])


def empirical_cumulants(samples, R: int, seed: int | None = None,
                        chunk_size: int = 1 << 16) -> CumulantVector:
    """Plug-in cumulants ``kappa_2..kappa_R`` with delta-method standard errors.

    Moments are accumulated over fixed-size chunks in a left fold, so the
    result does not depend on how the samples were produced.
    """
    if R < 2 or R > MAX_EMPIRICAL_ORDER:
        raise BadInput(f"empirical order R must be in 2..{MAX_EMPIRICAL_ORDER}", field="R")
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < MIN_EMPIRICAL_SAMPLES:
        raise InsufficientSamples(
            f"need at least {MIN_EMPIRICAL_SAMPLES} samples, got {n}", field="samples")
    center = float(np.mean(x))
    powers = np.arange(1, R + 1)
    sums = np.zeros(R + 1)
    for start in range(0, n, chunk_size):
        y = x[start:start + chunk_size] - center
        sums[1:] += (y[:, None] ** powers[None, :]).sum(axis=0)
    m = np.concatenate([[1.0], sums[1:] / n])
    kap, jac = _cumulants_and_jacobian(m)
    # influence function of kappa_r: sum_i jac[r, i] (y^i - m_i)
    var = np.zeros(R + 1)
    for start in range(0, n, chunk_size):
        y = x[start:start + chunk_size] - center
        yp = y[:, None] ** powers[None, :] - m[1:][None, :]
        infl = yp @ jac[2:, 1:].T
        var[2:] += (infl ** 2).sum(axis=0)
    stderr = np.sqrt(var[2:] / n / n)
    return CumulantVector(tuple(float(v) for v in kap[2:]), provenance="empirical",
                          sample_size=n, seed=seed, stderr=tuple(float(e) for e in stderr))
