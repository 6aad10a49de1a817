import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from wienerstein.discrepancy import delta_product
from wienerstein.errors import BadInput
from wienerstein.matching import (MATCHED, MULTIPLICITY_AMBIGUOUS, THRESHOLD_NOT_MET,
                                  _extreme_gaps, match, nearest_index,
                                  rational_independence_hint, separation_constant, thresholds)
from wienerstein.polyalg import theta
from wienerstein.spectrum import Spectrum, TargetSpectrum
from wienerstein.targets import BUILTIN_TARGETS

PN = TargetSpectrum((0.5, -0.5))
UNIT_TARGETS = ["pythagorean", "three_point", "y_rho_half"]


def test_product_normal_thresholds():
    th = thresholds(PN)
    assert th.theta2 == 1 / 16
    assert th.theta_tail_sum == 1.5
    assert th.lower_bound == pytest.approx(1 / 48, rel=1e-15)
    assert (th.vartheta, th.varkappa, th.L, th.varrho) == (0.25, -0.25, 3, 0.25)
    assert th.M == 4.0
    assert th.K == 48.0
    assert th.U_default == pytest.approx(min(1 / 32, 1 / 256, 0.25 ** 2 / (4 * 4 * 4 * 48 ** 2)))


def test_pythagorean_thresholds():
    th = thresholds(BUILTIN_TARGETS["pythagorean"])
    assert th.vartheta == pytest.approx(0.28, abs=1e-15)
    assert th.varkappa == pytest.approx(-0.08, abs=1e-15)
    assert th.L == 2


@pytest.mark.parametrize("sq", [
    (Fraction(1, 4), Fraction(1, 4)),
    (Fraction(9, 25), Fraction(16, 25)),
    (Fraction(1, 3), Fraction(2, 3)),
    (Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)),
    (Fraction(49, 83), Fraction(25, 83), Fraction(9, 83)),
    (Fraction(7, 10), Fraction(3, 10)),
])
def test_extreme_gaps_vs_bruteforce(sq):
    pos, neg = oracles.gaps_bruteforce(sq, box=int(2 / min(sq)) + 2)
    got = _extreme_gaps([float(v) for v in sq])
    assert got[0] == pytest.approx(float(pos), abs=1e-14)
    assert got[1] == pytest.approx(float(neg), abs=1e-14)


def test_extreme_gaps_irrational():
    sq = [0.5 + 0.5 / math.sqrt(2) - 0.3, 0.3, 0.5 - 0.5 / math.sqrt(2)]
    box = int(2 / min(sq)) + 2
    pos, neg = math.inf, -math.inf
    import itertools
    for n in itertools.product(range(box + 1), repeat=3):
        g = 1 - sum(a * b for a, b in zip(n, sq))
        if g > 1e-12:
            pos = min(pos, g)
        elif g < -1e-12:
            neg = max(neg, g)
    got = _extreme_gaps(sq)
    assert got == pytest.approx((pos, neg), abs=1e-13)


@pytest.mark.parametrize("name", sorted(BUILTIN_TARGETS))
def test_L_at_least_q_minus_one(name):
    t = BUILTIN_TARGETS[name]
    assert thresholds(t).L >= t.q - 1


def test_L_example_equal_weights():
    t = TargetSpectrum((2 ** -0.5, -(2 ** -0.5)))
    assert thresholds(t).L == 1


@pytest.mark.parametrize("coeffs", [(0.5, -0.5), (0.6, 0.8), (0.7, -0.5, 0.3), (-1.2, 0.1, 0.4, 0.9)])
def test_separation_constant_vs_grid(coeffs):
    # the grid misses the exact cell boundaries, so it can only overestimate
    exact, grid = 1.0 / separation_constant(coeffs), oracles.separation_grid(coeffs)
    assert exact <= grid * (1 + 1e-12)
    assert exact == pytest.approx(grid, rel=1e-3)


@pytest.mark.parametrize("name", sorted(BUILTIN_TARGETS))
def test_separation_inequality(name):
    a = np.array(BUILTIN_TARGETS[name].coeffs)
    M = thresholds(BUILTIN_TARGETS[name]).M
    x = np.linspace(-3, 3, 10_000)
    prod = np.prod((x[:, None] - a[None, :]) ** 2, axis=1)
    d2 = np.min((x[:, None] - a[None, :]) ** 2, axis=1)
    assert np.all(d2 <= M * prod * (1 + 1e-9))


@pytest.mark.parametrize("name", UNIT_TARGETS)
def test_lower_bound_inequality(name):
    t = BUILTIN_TARGETS[name]
    th = thresholds(t)
    r = np.random.default_rng(7)
    seen = 0
    while seen < 200:
        eps = 10 ** r.uniform(-4, 0)
        raw = np.concatenate([np.array(t.coeffs) + eps * r.normal(size=t.q),
                              eps * r.normal(size=r.integers(0, 6))])
        raw /= math.sqrt(np.sum(raw ** 2))
        s = Spectrum(tuple(raw))
        if delta_product(s, t) <= th.theta2 / 2:
            seen += 1
            assert np.max(np.abs(raw)) >= th.lower_bound


def test_nearest_index_ties():
    assert nearest_index(0.0, (0.5, -0.5)) == 0
    assert nearest_index(-0.3, (0.5, -0.5)) == 1


def test_match_target_itself():
    rep = match(PN.as_spectrum(), PN)
    assert rep.status == MATCHED
    assert rep.nu == (1, 1) and rep.vandermonde_v == (1, 1)
    assert rep.residual_sq_sum == 0.0 and rep.delta == 0.0
    assert rep.scale == pytest.approx(math.sqrt(2))


def test_match_non_convergent_example():
    rep = match(Spectrum((0.5, 0.5)), PN)
    assert rep.status == MULTIPLICITY_AMBIGUOUS
    assert rep.delta == 0.0
    assert rep.cumulant_gaps == (0.0, 2.0)
    assert rep.nu == (2, 0)


def test_match_threshold_not_met():
    rep = match(Spectrum(tuple([0.01] * 5000)), PN)
    assert rep.status == THRESHOLD_NOT_MET


def test_match_energy_mismatch():
    with pytest.raises(BadInput):
        match(Spectrum((1.0,)), PN)


@pytest.mark.parametrize("name", ["product_normal", "pythagorean", "three_point"])
def test_small_discrepancy_is_matched(name):
    t = BUILTIN_TARGETS[name]
    th = thresholds(TargetSpectrum(tuple(c / math.sqrt(t.energy) for c in t.coeffs)))
    r = np.random.default_rng(3)
    hits = 0
    for _ in range(200):
        eps = 10 ** r.uniform(-9, -5)
        raw = np.concatenate([np.array(t.coeffs) + eps * r.normal(size=t.q),
                              eps * r.normal(size=3)])
        raw *= math.sqrt(t.energy / np.sum(raw ** 2))
        s = Spectrum(tuple(raw))
        rep = match(s, t)
        if rep.delta <= th.U_default:
            hits += 1
            assert rep.status == MATCHED
            assert rep.residual_sq_sum <= rep.residual_bound
    assert hits >= 20


def test_residual_bound_on_matched_cases():
    t = BUILTIN_TARGETS["pythagorean"]
    r = np.random.default_rng(5)
    for _ in range(300):
        eps = 10 ** r.uniform(-4, -1)
        raw = np.concatenate([np.array(t.coeffs) + eps * r.normal(size=2), eps * r.normal(size=2)])
        raw /= math.sqrt(np.sum(raw ** 2))
        rep = match(Spectrum(tuple(raw)), t)
        if rep.status == MATCHED:
            assert rep.residual_sq_sum <= rep.residual_bound


def test_report_json_roundtrip():
    import json
    rep = match(PN.as_spectrum(), PN)
    obj = json.loads(json.dumps(rep.to_json()))
    # thresholds are reported for the unit-energy target (1/sqrt2, -1/sqrt2)
    assert obj["status"] == MATCHED and obj["thresholds"]["L"] == 1


def test_independence_hints():
    assert rational_independence_hint(PN).witness == (1, -1)
    h = rational_independence_hint(TargetSpectrum((math.sqrt(1 / 3), math.sqrt(2 / 3))))
    assert h.witness == (2, -1) and h.relation == "zero"
    h = rational_independence_hint(BUILTIN_TARGETS["three_point"])
    assert h.kind == "DependentWithWitness"
    coeffs = BUILTIN_TARGETS["three_point"].coeffs
    assert abs(sum(w * c * c for w, c in zip(h.witness, coeffs))) < 1e-12
    # squared weights 1/sqrt2 and 1 - 1/sqrt2
    t = TargetSpectrum((2 ** -0.25, -math.sqrt(1 - 2 ** -0.5)))
    h = rational_independence_hint(t)
    assert h.kind == "LikelyIndependent"


def test_theta_consistency():
    th = thresholds(PN)
    assert th.theta_tail_sum == math.fsum(abs(v) for r, v in theta(PN).items() if r >= 3)


@pytest.mark.parametrize("name", ["pythagorean", "three_point"])
def test_small_uniform_perturbation(name):
    t = BUILTIN_TARGETS[name]
    eps = 1e-3
    raw = np.array(t.coeffs) + eps
    s = Spectrum(tuple(raw / math.sqrt(np.sum(raw ** 2))))
    rep = match(s, t)
    assert rep.status == MATCHED and rep.nu == (1,) * t.q and rep.ell == t.q
    assert rep.residual_sq_sum <= t.q * (2 * eps) ** 2
    assert rep.tail_energy == 0.0
