"""Coefficient sequences of weighted sums of i.i.d. variables.

A :class:`Spectrum` holds the weights ``alpha_k`` of ``F = sum_k alpha_k W_k``
together with the law of the building block ``W``. With the default block
``W = N^2 - 1`` the variable lives in the second Wiener chaos.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AllZero, BadInput, MissingBaseCumulant

NORMALIZATION_TOL = 1e-12


def chisq1_cumulant(r: int) -> float:
    """Cumulant of order ``r`` of ``N^2 - 1``: ``2^(r-1) (r-1)!`` (zero for r = 1)."""
    if r < 1:
        raise BadInput(f"cumulant order must be >= 1, got {r}", field="r")
    if r == 1:
        return 0.0
    return float(2 ** (r - 1) * math.factorial(r - 1))


@dataclass(frozen=True)
class BaseLaw:
    """Law of the i.i.d. building block.

    ``cumulants`` is ``None`` for the centered chi-square with one degree of
    freedom, otherwise the tuple ``(kappa_2, ..., kappa_R)``.
    """

    cumulants: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.cumulants is not None:
            vals = tuple(float(c) for c in self.cumulants)
            if not vals:
                raise BadInput("custom base law needs at least kappa_2", field="base_law")
            if not all(math.isfinite(c) for c in vals):
                raise BadInput("base law cumulants must be finite", field="base_law")
            object.__setattr__(self, "cumulants", vals)

    @property
    def is_chisq1(self) -> bool:
        return self.cumulants is None

    @property
    def max_order(self) -> float:
        return math.inf if self.cumulants is None else len(self.cumulants) + 1

    def kappa(self, r: int) -> float:
        if self.cumulants is None:
            return chisq1_cumulant(r)
        if r == 1:
            return 0.0
        if r < 1 or r > len(self.cumulants) + 1:
            raise MissingBaseCumulant(
                f"base law provides cumulants up to order {len(self.cumulants) + 1}, "
                f"order {r} requested", field="base_law")
        return self.cumulants[r - 2]

    def to_json(self):
        if self.cumulants is None:
            return "centered_chisq1"
        return {"cumulants": list(self.cumulants)}

    @classmethod
    def from_json(cls, obj) -> "BaseLaw":
        if obj is None or obj == "centered_chisq1":
            return CHISQ1
        if isinstance(obj, dict) and "cumulants" in obj:
            return cls(tuple(obj["cumulants"]))
        raise BadInput(f"unrecognised base_law {obj!r}", field="base_law")


CHISQ1 = BaseLaw()


def _as_coeffs(coeffs, name="coeffs") -> tuple[float, ...]:
    try:
        vals = tuple(float(c) for c in coeffs)
    except (TypeError, ValueError) as exc:
        raise BadInput(f"{name} must be a list of numbers", field=name) from exc
    if not vals:
        raise BadInput(f"{name} must be nonempty", field=name)
    if not all(math.isfinite(c) for c in vals):
        raise BadInput(f"{name} must be finite", field=name)
    return vals


def sum_of_squares(coeffs: Sequence[float]) -> float:
    return math.fsum(c * c for c in coeffs)


@dataclass(frozen=True)
class Spectrum:
    """Weights ``alpha_k`` of an approximating variable ``F = sum alpha_k W_k``."""

    coeffs: tuple[float, ...]
    base_law: BaseLaw = field(default=CHISQ1)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    def __len__(self):
        return len(self.coeffs)

    @property
    def energy(self) -> float:
        """Sum of squared weights."""
        return sum_of_squares(self.coeffs)

    def power_sum(self, r: int) -> float:
        return math.fsum(c ** r for c in self.coeffs)

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "base_law": self.base_law.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Spectrum":
        if isinstance(obj, (list, tuple)):
            return cls(tuple(obj))
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise BadInput("spectrum JSON needs a 'coeffs' list", field="coeffs")
        return cls(tuple(obj["coeffs"]), BaseLaw.from_json(obj.get("base_law")))


@dataclass(frozen=True)
class TargetSpectrum:
    """The ``q >= 2`` nonzero, pairwise distinct weights of the limit law.

    Two normalisations are accepted: unit sum of squares, or unit variance
    (``kappa_2(W) * sum alpha^2 = 1``; for chi-square blocks this is sum
    ``alpha^2 = 1/2``, e.g. the product-normal target ``(1/2, -1/2)``).
    """

    coeffs: tuple[float, ...]
    base_law: BaseLaw = field(default=CHISQ1)

    def __post_init__(self):
        vals = _as_coeffs(self.coeffs)
        object.__setattr__(self, "coeffs", vals)
        if len(vals) < 2:
            raise BadInput("target needs q >= 2 coefficients", field="coeffs")
        if any(c == 0.0 for c in vals):
            raise BadInput("target coefficients must be nonzero", field="coeffs")
        if len(set(vals)) != len(vals):
            raise BadInput("target coefficients must be pairwise distinct", field="coeffs")
        ss = sum_of_squares(vals)
        variance = ss * self.base_law.kappa(2)
        if abs(ss - 1.0) > NORMALIZATION_TOL and abs(variance - 1.0) > NORMALIZATION_TOL:
            raise BadInput(
                f"target must have unit sum of squares or unit variance "
                f"(sum of squares = {ss!r})", field="coeffs")

    @property
    def q(self) -> int:
        return len(self.coeffs)

    @property
    def energy(self) -> float:
        return sum_of_squares(self.coeffs)

    def power_sum(self, r: int) -> float:
        return math.fsum(c ** r for c in self.coeffs)

    def as_spectrum(self) -> Spectrum:
        return Spectrum(self.coeffs, self.base_law)

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "base_law": self.base_law.to_json(), "q": self.q}

    @classmethod
    def from_json(cls, obj) -> "TargetSpectrum":
        if isinstance(obj, (list, tuple)):
            return cls(tuple(obj))
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise BadInput("target JSON needs a 'coeffs' list", field="coeffs")
        t = cls(tuple(obj["coeffs"]), BaseLaw.from_json(obj.get("base_law")))
        if "q" in obj and int(obj["q"]) != t.q:
            raise BadInput(f"q={obj['q']} does not match {t.q} coefficients", field="q")
        return t


@dataclass(frozen=True)
class GammaComponent:
    weight: float  # lambda_i
    multiplicity: int  # m_i
    shape: float  # alpha_i
    rate: float  # mu_i

    def __post_init__(self):
        if not math.isfinite(self.weight) or self.weight == 0.0:
            raise BadInput("gamma component weight must be finite and nonzero", field="weight")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise BadInput("multiplicity must be a positive integer", field="multiplicity")
        if not self.shape > 0 or not math.isfinite(self.shape):
            raise BadInput("shape must be positive", field="shape")
        if not self.rate > 0 or not math.isfinite(self.rate):
            raise BadInput("rate must be positive", field="rate")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))

    @property
    def ratio(self) -> float:
        """``lambda / mu``."""
        return self.weight / self.rate

    @property
    def mean_shift(self) -> float:
        """``lambda m alpha / mu``, the mean of ``lambda * Gamma(m alpha, mu)``."""
        return self.weight * self.multiplicity * self.shape / self.rate


@dataclass(frozen=True)
class GammaMixtureSpec:
    """``F = sum_i lambda_i (Gamma(m_i alpha_i, mu_i) - m_i alpha_i / mu_i)``."""

    components: tuple[GammaComponent, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise BadInput("gamma mixture needs d >= 1 components", field="components")
        object.__setattr__(self, "components", comps)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(c.ratio for c in self.components)

    @property
    def shift(self) -> float:
        """``<m alpha, lambda / mu>``."""
        return math.fsum(c.mean_shift for c in self.components)

    @classmethod
    def from_arrays(cls, weights, multiplicities, shapes, rates) -> "GammaMixtureSpec":
        if not (len(weights) == len(multiplicities) == len(shapes) == len(rates)):
            raise BadInput("gamma mixture arrays must have equal length", field="components")
        return cls(tuple(GammaComponent(float(w), m, float(a), float(r))
                         for w, m, a, r in zip(weights, multiplicities, shapes, rates)))

    def to_json(self) -> dict:
        return {"gamma_mixture": [
            {"weight": c.weight, "multiplicity": c.multiplicity, "shape": c.shape, "rate": c.rate}
            for c in self.components]}

    @classmethod
    def from_json(cls, obj) -> "GammaMixtureSpec":
        rows = obj.get("gamma_mixture") if isinstance(obj, dict) else None
        if not isinstance(rows, list):
            raise BadInput("gamma mixture JSON needs a 'gamma_mixture' list", field="gamma_mixture")
        try:
            return cls(tuple(GammaComponent(float(r["weight"]), r.get("multiplicity", 1),
                                            float(r["shape"]), float(r["rate"])) for r in rows))
        except KeyError as exc:
            raise BadInput(f"gamma component missing {exc}", field=str(exc)) from exc


def normalize(s: Spectrum, energy: float = 1.0) -> Spectrum:
    """Rescale so that the squared weights sum to ``energy`` (default 1).

    Inputs already normalised to within rounding are returned unchanged, which
    makes the operation idempotent.
    """
    ss = s.energy
    if ss == 0.0:
        raise AllZero("cannot normalize a spectrum whose coefficients are all zero",
                      field="coeffs")
    if abs(ss - energy) <= 1e-14 * energy:
        return s
    scale = math.sqrt(energy / ss)
    return Spectrum(tuple(c * scale for c in s.coeffs), s.base_law)


def reorder_decreasing(s: Spectrum) -> Spectrum:
    """Sort by decreasing absolute value; ties keep their original order."""
    return Spectrum(tuple(sorted(s.coeffs, key=abs, reverse=True)), s.base_law)


def chaos_target_as_gamma(t, multiplicities: Sequence[int]) -> GammaMixtureSpec:
    """Gamma-mixture form of ``sum_i lambda_i (chi^2(m_i) - m_i)``.

    ``t`` is a :class:`TargetSpectrum`, a :class:`Spectrum` or a plain
    sequence of weights ``lambda_i``.
    """
    weights = t.coeffs if hasattr(t, "coeffs") else tuple(float(x) for x in t)
    if len(multiplicities) != len(weights):
        raise BadInput("need one multiplicity per coefficient", field="multiplicities")
    return GammaMixtureSpec.from_arrays(weights, list(multiplicities),
                                        [0.5] * len(weights), [0.5] * len(weights))
