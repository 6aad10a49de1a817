"""Constructive matching of a spectrum against the eigenvalues of a target.

``thresholds`` computes every constant that depends only on the target.
``match`` reorders the spectrum, pairs its leading coefficients with their
nearest target eigenvalues, settles the matched prefix length and checks the
multiplicities through a Vandermonde solve on the power sums.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .discrepancy import cumulant_gaps, delta_product
from .errors import BadInput
from .polyalg import VandermondeSystem, theta, vandermonde_solve
from .spectrum import Spectrum, TargetSpectrum, reorder_decreasing

ZERO_TOL = 1e-12
ENERGY_TOL = 1e-9

MATCHED = "Matched"
THRESHOLD_NOT_MET = "ThresholdNotMet"
MULTIPLICITY_AMBIGUOUS = "MultiplicityAmbiguous"


@dataclass(frozen=True)
class TargetThresholds:
    theta2: float
    theta_tail_sum: float
    lower_bound: float
    vartheta: float
    varkappa: float
    L: int
    varrho: float
    M: float
    U_default: float

    @property
    def K(self) -> float:
        """``2 sum_{r>=3} |Theta_r| / |Theta_2|``, the factor in the prefix residual bound."""
        return 2.0 * self.theta_tail_sum / abs(self.theta2)

    def to_json(self) -> dict:
        return asdict(self)


def _extreme_gaps(sq: Sequence[float]) -> tuple[float, float]:
    """Smallest positive and largest negative value of ``1 - sum n_i sq_i`` over ``n >= 0``.

    Every vector with ``sum n_i sq_i <= 1 + max(sq)`` is visited, which is
    enough to see both extremes. The coordinate with the smallest square is
    solved in closed form instead of being enumerated.
    """
    order = sorted(range(len(sq)), key=lambda i: sq[i], reverse=True)
    vals = [sq[i] for i in order]
    last = vals[-1]
    cap = 1.0 + max(vals)
    best_pos, best_neg = math.inf, -math.inf

    def visit(i, partial):
        nonlocal best_pos, best_neg
        if i == len(vals) - 1:
            rem = 1.0 - partial
            k = max(0, math.floor(rem / last))
            for kk in (k - 1, k, k + 1, k + 2):
                if kk < 0:
                    continue
                g = rem - kk * last
                if g > ZERO_TOL:
                    best_pos = min(best_pos, g)
                elif g < -ZERO_TOL:
                    best_neg = max(best_neg, g)
            return
        n = 0
        while partial + n * vals[i] <= cap:
            visit(i + 1, partial + n * vals[i])
            n += 1

    visit(0, 0.0)
    return best_pos, best_neg


def separation_constant(t: TargetSpectrum | Sequence[float]) -> float:
    """``M = 1 / min_x prod_i (x - a_i)^2 / d(x, a)^2``.

    On the set of points nearest to ``a_i`` the ratio equals
    ``prod_{j != i} (x - a_j)^2``, a polynomial, so its minimum there is
    attained at a cell boundary or at a critical point inside the cell.
    """
    a = np.sort(np.asarray(t.coeffs if hasattr(t, "coeffs") else t, dtype=float))
    q = a.size
    best = math.inf
    for i in range(q):
        lo = -math.inf if i == 0 else 0.5 * (a[i - 1] + a[i])
        hi = math.inf if i == q - 1 else 0.5 * (a[i] + a[i + 1])
        others = np.delete(a, i)
        g = np.polynomial.Polynomial.fromroots(others)
        cands = [a[i]]
        cands += [x for x in (lo, hi) if math.isfinite(x)]
        for c in g.deriv().roots():
            if abs(c.imag) < 1e-12 and lo <= c.real <= hi:
                cands.append(c.real)
        for x in cands:
            best = min(best, float(np.prod((x - others) ** 2)))
    return 1.0 / best


def thresholds(t: TargetSpectrum) -> TargetThresholds:
    th = theta(t)
    theta2 = th[2]
    tail = math.fsum(abs(v) for r, v in th.items() if r >= 3)
    lb = abs(theta2) / (2.0 * tail)
    sq = [c * c for c in t.coeffs]
    vartheta, varkappa = _extreme_gaps(sq)
    amin = min(sq)
    L = math.floor((1.0 - vartheta) / amin + 1e-9)
    varrho = min(vartheta, abs(varkappa))
    M = separation_constant(t)
    K = 2.0 * tail / abs(theta2)
    U = min(abs(theta2) / 2.0, varrho * abs(theta2) / 4.0,
            varrho ** 2 / (4.0 * (L + 1) * M * K * K))
    return TargetThresholds(theta2, tail, lb, vartheta, varkappa, L, varrho, M, U)


@dataclass(frozen=True)
class Assignment:
    k: int  # 1-based position after reordering
    alpha: float
    matched: float
    target_index: int  # 0-based index into the target coefficients
    residual: float


@dataclass(frozen=True)
class MatchReport:
    status: str
    ell: int
    assignments: tuple[Assignment, ...]
    nu: tuple[int, ...]
    residual_sq_sum: float
    tail_energy: float
    vandermonde_v: tuple[int, ...]
    vandermonde_raw: tuple[float, ...]
    rounding_gap: float
    delta: float
    residual_bound: float
    cumulant_gaps: tuple[float, ...]
    scale: float
    thresholds: TargetThresholds
    message: str = ""

    def to_json(self) -> dict:
        out = asdict(self)
        out["thresholds"] = self.thresholds.to_json()
        for key in ("nu", "vandermonde_v", "vandermonde_raw", "cumulant_gaps"):
            out[key] = list(out[key])
        out["assignments"] = [asdict(a) for a in self.assignments]
        return out


def nearest_index(x: float, targets: Sequence[float]) -> int:
    """Index of the nearest target value; ties go to the smaller index."""
    best, best_d = 0, abs(x - targets[0])
    for i in range(1, len(targets)):
        d = abs(x - targets[i])
        if d < best_d:
            best, best_d = i, d
    return best


def match(s: Spectrum, t: TargetSpectrum) -> MatchReport:
    """Run the matching diagnostic; the outcome is carried in ``status``.

    ``s`` and ``t`` must carry the same energy. Both are rescaled to unit
    energy first and every reported quantity except ``cumulant_gaps`` is in
    those units (``scale`` is the factor applied).
    """
    es, et = s.energy, t.energy
    if abs(es - et) > ENERGY_TOL * et:
        raise BadInput(f"spectrum energy {es!r} differs from target energy {et!r}",
                       field="coeffs")
    scale = 1.0 / math.sqrt(et)
    tu = TargetSpectrum(tuple(c * scale for c in t.coeffs), t.base_law) if et != 1.0 else t
    su = Spectrum(tuple(c * scale for c in s.coeffs), s.base_law)
    gaps = cumulant_gaps(s, t)
    thr = thresholds(tu)
    ordered = reorder_decreasing(su).coeffs
    targets = tu.coeffs
    q = tu.q
    dl = delta_product(su, tu)
    bound = thr.M * thr.K ** 2 * dl

    def report(status, ell, msg=""):
        assigns = []
        nu = [0] * q
        for k in range(ell):
            j = nearest_index(ordered[k], targets)
            nu[j] += 1
            assigns.append(Assignment(k + 1, ordered[k], targets[j], j,
                                      abs(ordered[k] - targets[j])))
        resid = math.fsum(a.residual ** 2 for a in assigns)
        tail = min(1.0, math.fsum(c * c for c in ordered[ell:]))
        raw, rounded, gap = (), (), math.nan
        if status != THRESHOLD_NOT_MET:
            xi = [su.power_sum(r) for r in range(2, q + 2)]
            v = vandermonde_solve(VandermondeSystem(targets, xi, first_power=2))
            raw = tuple(float(x) for x in v)
            rounded = tuple(int(round(x)) for x in v)
            gap = float(np.max(np.abs(v - np.round(v))))
            energy = math.fsum(n * c * c for n, c in zip(nu, targets))
            ok = (rounded == tuple(nu) and gap < 1.0 / 3.0
                  and abs(energy - 1.0) <= ENERGY_TOL and all(n == 1 for n in nu))
            if ok:
                status = MATCHED
            else:
                status = MULTIPLICITY_AMBIGUOUS
                msg = (f"multiplicities {tuple(nu)}, Vandermonde {rounded} "
                       f"(rounding gap {gap:.3g}), matched energy {energy:.12g}")
        return MatchReport(status, ell, tuple(assigns), tuple(nu), resid, tail, rounded, raw,
                           gap, dl, bound, gaps, scale, thr, msg)

    def matched_gap(ell):
        return 1.0 - math.fsum(targets[nearest_index(c, targets)] ** 2 for c in ordered[:ell])

    lb = thr.lower_bound
    prefix = 0
    while prefix < min(thr.L, len(ordered)) and abs(ordered[prefix]) >= lb:
        prefix += 1
    if prefix == 0:
        return report(THRESHOLD_NOT_MET, 0, "no coefficient clears the lower bound")

    half = thr.varrho / 2.0
    ell = prefix
    g = matched_gap(ell)
    if g > half:
        if prefix == thr.L and len(ordered) > thr.L and abs(ordered[thr.L]) >= lb:
            ell = thr.L + 1
            g = matched_gap(ell)
        if abs(g) >= half:
            return report(THRESHOLD_NOT_MET, ell, f"matched energy gap {g:.6g} after extension")
    elif g < -half:
        while ell > 1 and g < -half:
            ell -= 1
            g = matched_gap(ell)
        if abs(g) >= half:
            return report(THRESHOLD_NOT_MET, ell, f"matched energy gap {g:.6g} after descent")
    return report(MATCHED, ell)


@dataclass(frozen=True)
class IndependenceHint:
    kind: str  # "LikelyIndependent" or "DependentWithWitness"
    witness: tuple[int, ...] | None = None
    relation: str | None = None  # "zero": sum c a^2 = 0, "unit": sum n a^2 = 1
    bound: int = 20

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness) if self.witness else None,
                "relation": self.relation, "bound": self.bound}


def rational_independence_hint(t: TargetSpectrum, bound: int = 20,
                               max_candidates: int = 5_000_000) -> IndependenceHint:
    """Bounded search for integer relations among the squared target weights.

    A witness proves dependence; its absence at the bound is only a hint.
    The bound is lowered automatically when ``(2B+1)^q`` would exceed
    ``max_candidates``.
    """
    sq = np.array([c * c for c in t.coeffs])
    q = sq.size
    B = bound
    while B > 1 and (2 * B + 1) ** q > max_candidates:
        B -= 1
    rng_ = np.arange(-B, B + 1)
    grid = np.array(list(itertools.product(rng_, repeat=q)), dtype=np.int64)
    nz = np.any(grid != 0, axis=1)
    first = grid[np.arange(len(grid)), np.argmax(grid != 0, axis=1)]
    grid = grid[nz & (first > 0)]
    vals = grid @ sq
    scale = np.abs(grid) @ sq
    hit = np.abs(vals) <= 1e-10 * scale
    if np.any(hit):
        best = min(grid[hit].tolist(), key=lambda c: (sum(abs(x) for x in c), c))
        return IndependenceHint("DependentWithWitness", tuple(int(x) for x in best), "zero", B)
    pos = np.array(list(itertools.product(range(B + 1), repeat=q)), dtype=np.int64)
    pos = pos[~np.all(pos == 1, axis=1)]
    hit = np.abs(pos @ sq - 1.0) <= 1e-10
    if np.any(hit):
        best = min(pos[hit].tolist(), key=lambda c: (sum(c), c))
        return IndependenceHint("DependentWithWitness", tuple(int(x) for x in best), "unit", B)
    return IndependenceHint("LikelyIndependent", None, None, B)
