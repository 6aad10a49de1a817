"""Stein discrepancy between a weighted sum and a second-chaos target.

The discrepancy has three equivalent expressions: a sum of ``Q(alpha_k)``
(the product form, used as reference), a combination of power sums weighted
by the coefficients of ``Q``, and a combination of cumulants.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .cumulants import weighted_sum_cumulant
from .errors import MissingBaseCumulant, ZeroBaseCumulant
from .polyalg import theta
from .spectrum import Spectrum, TargetSpectrum, reorder_decreasing


@dataclass(frozen=True)
class DiscrepancyReport:
    delta_product: float
    delta_theta_powersum: float
    delta_cumulant: float | None
    cumulant_gaps: tuple[float, ...]
    bound_rhs: float
    cumulant_form_defined: bool = True

    def to_json(self) -> dict:
        out = asdict(self)
        out["cumulant_gaps"] = list(self.cumulant_gaps)
        return out


def _q_value(a: float, target: tuple[float, ...]) -> float:
    prod = 1.0
    for b in target:
        prod *= (a - b) ** 2
    return a * a * prod


def delta_product(s: Spectrum, t: TargetSpectrum) -> float:
    """``sum_k alpha_k^2 prod_i (alpha_k - alpha_inf_i)^2``."""
    return math.fsum(_q_value(a, t.coeffs) for a in s.coeffs)


def delta_theta_powersum(s: Spectrum, t: TargetSpectrum) -> float:
    return math.fsum(th * s.power_sum(r) for r, th in theta(t).items())


def delta_cumulant(s: Spectrum, t: TargetSpectrum) -> float:
    """Cumulant form; raises when the base law cannot supply a nonzero ``kappa_r(W)``."""
    terms = []
    for r, th in theta(t).items():
        try:
            kw = s.base_law.kappa(r)
        except MissingBaseCumulant as exc:
            raise ZeroBaseCumulant(str(exc), field="base_law") from exc
        if kw == 0.0:
            raise ZeroBaseCumulant(
                f"kappa_{r}(W) = 0, cumulant form of the discrepancy is undefined",
                field="base_law")
        terms.append(th / kw * weighted_sum_cumulant(s, r))
    return math.fsum(terms)


def cumulant_gaps(s: Spectrum, t: TargetSpectrum) -> tuple[float, ...]:
    """``|kappa_r(F_n) - kappa_r(F_inf)|`` for ``r = 2..q+1``."""
    tt = t.as_spectrum()
    return tuple(abs(weighted_sum_cumulant(s, r) - weighted_sum_cumulant(tt, r))
                 for r in range(2, t.q + 2))


def delta(s: Spectrum, t: TargetSpectrum, require_cumulant_form: bool = False) -> DiscrepancyReport:
    """Compute the discrepancy by every available formula.

    When the base law has a vanishing or missing cumulant of order up to
    ``2q+2`` the cumulant form is skipped (``cumulant_form_defined=False``)
    unless ``require_cumulant_form`` is set, in which case it raises.
    """
    dp = delta_product(s, t)
    dt = delta_theta_powersum(s, t)
    try:
        dc = delta_cumulant(s, t)
        defined = True
    except ZeroBaseCumulant:
        if require_cumulant_form:
            raise
        dc, defined = None, False
    gaps = cumulant_gaps(s, t)
    return DiscrepancyReport(dp, dt, dc, gaps, math.sqrt(dp) + math.fsum(gaps), defined)


def delta_tail(s: Spectrum, t: TargetSpectrum, p: int) -> float:
    """Tail discrepancy ``sum_{k >= p} Q(alpha_max(k))`` with 1-based ``p``.

    The spectrum is reordered by decreasing absolute value first.
    """
    if p < 1:
        raise ValueError("p is 1-based and must be >= 1")
    ordered = reorder_decreasing(s).coeffs
    return math.fsum(_q_value(a, t.coeffs) for a in ordered[p - 1:])
