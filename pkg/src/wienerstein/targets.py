"""Named targets used by the characterisation checks and the CLI."""
from __future__ import annotations

import math

from .baitaqqu import y_rho
from .spectrum import TargetSpectrum


def _unit(coeffs):
    norm = math.sqrt(math.fsum(c * c for c in coeffs))
    return TargetSpectrum(tuple(c / norm for c in coeffs))


BUILTIN_TARGETS = {
    "product_normal": TargetSpectrum((0.5, -0.5)),
    "pythagorean": TargetSpectrum((0.6, 0.8)),
    "three_point": _unit((0.7, -0.5, 0.3)),
    "y_rho_half": y_rho(0.5).target(),
}


def get_target(name: str) -> TargetSpectrum:
    from .errors import BadInput

    try:
        return BUILTIN_TARGETS[name]
    except KeyError:
        raise BadInput(f"unknown built-in target {name!r}; choose from "
                       f"{sorted(BUILTIN_TARGETS)}", field="target") from None
