"""Sampling of chaos and Gamma-mixture laws and empirical Wasserstein distances."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .discrepancy import delta_product
from .errors import BadInput, SamplerUnavailable, SizeMismatch
from .spectrum import GammaMixtureSpec, Spectrum, TargetSpectrum


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    law: str
    seed: int

    @property
    def size(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class WassersteinEstimate:
    p: int
    point: float
    replicates: tuple[float, ...]
    stderr: float

    def to_json(self) -> dict:
        return {"p": self.p, "point": self.point, "stderr": self.stderr,
                "replicates": list(self.replicates)}


def _law_tag(law) -> str:
    if isinstance(law, GammaMixtureSpec):
        return "gamma_mixture:" + ",".join(
            f"{c.weight!r}/{c.multiplicity}/{c.shape!r}/{c.rate!r}" for c in law.components)
    return "chaos:" + ",".join(repr(c) for c in law.coeffs)


def sample_chaos(s: Spectrum | TargetSpectrum, n: int, seed: int = 0,
                 workers: int = 1) -> SampleBatch:
    """Draws of ``sum_k alpha_k (N_k^2 - 1)``; coordinate ``k`` uses RNG stream ``k``.

    Two spectra sampled with the same seed therefore share their Gaussians
    coordinate by coordinate.
    """
    if not s.base_law.is_chisq1:
        raise SamplerUnavailable("only chi-square blocks can be sampled", field="base_law")
    if n < 1:
        raise BadInput("sample size must be positive", field="samples")
    out = np.zeros(n)
    for k, a in enumerate(s.coeffs):
        z = rng.normals(seed, k, n, workers)
        out += a * (z * z - 1.0)
    return SampleBatch(out, _law_tag(s), seed)


def sample_gamma_mixture(spec: GammaMixtureSpec, n: int, seed: int = 0,
                         workers: int = 1) -> SampleBatch:
    """Draws of ``sum_i lambda_i (G_i - m_i alpha_i / mu_i)``, ``G_i ~ Gamma(m_i alpha_i, mu_i)``."""
    if n < 1:
        raise BadInput("sample size must be positive", field="samples")
    out = np.zeros(n)
    for i, c in enumerate(spec.components):
        g = rng.gammas(seed, i, n, c.multiplicity * c.shape, c.rate, workers)
        out += c.weight * (g - c.multiplicity * c.shape / c.rate)
    return SampleBatch(out, _law_tag(spec), seed)


def sample_law(law, n: int, seed: int = 0, workers: int = 1) -> SampleBatch:
    if isinstance(law, GammaMixtureSpec):
        return sample_gamma_mixture(law, n, seed, workers)
    if isinstance(law, (Spectrum, TargetSpectrum)):
        return sample_chaos(law, n, seed, workers)
    raise SamplerUnavailable(f"no sampler for {type(law).__name__}", field="law")


def empirical_wasserstein(a, b, p: int = 2) -> float:
    """Exact ``W_p`` between two empirical measures of equal size (sorted coupling)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size != b.size:
        raise SizeMismatch(f"batch sizes differ ({a.size} vs {b.size})", field="samples")
    if p not in (1, 2):
        raise BadInput("p must be 1 or 2", field="p")
    d = np.abs(a - b)
    if p == 1:
        return float(np.mean(d))
    return float(math.sqrt(np.mean(d * d)))


def _summarize(p, values) -> WassersteinEstimate:
    vals = tuple(float(v) for v in values)
    r = len(vals)
    se = float(np.std(vals, ddof=1) / math.sqrt(r)) if r > 1 else math.nan
    return WassersteinEstimate(p, float(np.mean(vals)), vals, se)


def wasserstein_p(a: SampleBatch | Sequence[SampleBatch], b: SampleBatch | Sequence[SampleBatch],
                  p: int = 2) -> WassersteinEstimate:
    """Empirical ``W_p`` for one batch pair or a list of replicate pairs."""
    aa = [a] if isinstance(a, SampleBatch) else list(a)
    bb = [b] if isinstance(b, SampleBatch) else list(b)
    if len(aa) != len(bb):
        raise SizeMismatch("need the same number of replicate batches on both sides",
                           field="replicates")
    return _summarize(p, [empirical_wasserstein(x.values, y.values, p) for x, y in zip(aa, bb)])


def replicate_seeds(seed: int, r: int, common: bool = False) -> tuple[int, int]:
    """Seeds of replicate ``r`` for the two sides; equal when ``common`` is set."""
    sa = rng.derive_seed(seed, r, 0)
    return (sa, sa) if common else (sa, rng.derive_seed(seed, r, 1))


def estimate_wasserstein(law_a, law_b, p: int = 2, samples: int = 1_000_000,
                         replicates: int = 20, seed: int = 0, workers: int = 1,
                         common: bool = False) -> WassersteinEstimate:
    """Replicated empirical ``W_p`` between two laws over ``replicates`` seed pairs."""
    if replicates < 2:
        raise BadInput("need at least 2 replicates for a standard error", field="replicates")
    vals = []
    for r in range(replicates):
        sa, sb = replicate_seeds(seed, r, common)
        xa = sample_law(law_a, samples, sa, workers).values
        xb = sample_law(law_b, samples, sb, workers).values
        vals.append(empirical_wasserstein(xa, xb, p))
    return _summarize(p, vals)


@dataclass(frozen=True)
class BoundConfig:
    samples: int = 1_000_000
    replicates: int = 20
    seed: int = 0
    workers: int = 1
    p: int = 2
    common: bool = False  # share Gaussians between the two sides of each replicate


@dataclass(frozen=True)
class BoundRow:
    param: float
    delta: float
    w2: float
    ratio: float
    stderr: float
    replicates: tuple[float, ...] = field(default=(), repr=False)


def bound_experiment(family: Sequence[tuple[float, Spectrum]], t: TargetSpectrum,
                     config: BoundConfig = BoundConfig()) -> list[BoundRow]:
    """For each ``(param, spectrum)`` estimate ``W_p`` to the target and compare with ``sqrt(Delta)``.

    ``ratio`` is ``inf`` when the discrepancy vanishes.
    """
    if config.replicates < 2:
        raise BadInput("need at least 2 replicates for a standard error", field="replicates")
    rows = []
    for param, s in family:
        d = delta_product(s, t)
        est = estimate_wasserstein(s, t, config.p, config.samples, config.replicates,
                                   config.seed, config.workers, config.common)
        ratio = est.point / math.sqrt(d) if d > 0 else math.inf
        rows.append(BoundRow(float(param), d, est.point, ratio, est.stderr, est.replicates))
    return rows


def perturbation_family(t: TargetSpectrum, deltas: Sequence[float]) -> list[tuple[float, Spectrum]]:
    """Spectra converging to ``t``.

    The first eigenvalue moves by ``delta``, the others by ``delta/2``, and
    two tail terms of size ``delta`` are appended. Each member is rescaled to the energy of ``t``, so the discrepancy and
    all cumulant gaps vanish as ``delta -> 0``.
    """
    out = []
    for dl in deltas:
        raw = [a + dl * (1 if i == 0 else 0.5) for i, a in enumerate(t.coeffs)] + [dl, dl]
        ss = math.fsum(c * c for c in raw)
        scale = math.sqrt(t.energy / ss)
        out.append((float(dl), Spectrum(tuple(c * scale for c in raw), t.base_law)))
    return out
