"""Maximally flat 3-tap droop compensator running at the output rate.

``C(z^M) = c0 + c1 z^-M + c2 z^-2M`` with c0 = c2 and c1 = 1 - 2 c0. The
single-stage coefficients depend on M; once the comb is derated they reduce
to the M -> inf values c0 = -N/24, a function of N alone.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .response import CombSpec, comb_response, derated_response

# The 3-tap maximally flat form is a narrow-band design.
NARROWBAND_MIN_L = 5


@dataclass(frozen=True)
class CompensatorCoeffs:
    c0: Fraction
    c1: Fraction
    c2: Fraction

    def __post_init__(self):
        if self.c0 != self.c2:
            raise ValueError("compensator must be symmetric (c0 == c2)")
        if self.c0 + self.c1 + self.c2 != 1:
            raise ValueError("compensator DC gain must be exactly 1")

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.c0), float(self.c1), float(self.c2)

    def response(self, omega):
        """C at output-rate frequency omega (z^M = exp(j omega))."""
        c0, c1, c2 = self.as_floats()
        z1 = np.exp(-1j * np.asarray(omega, dtype=float))
        return c0 + c1 * z1 + c2 * z1**2


def _from_c0(c0: Fraction) -> CompensatorCoeffs:
    return CompensatorCoeffs(c0, 1 - 2 * c0, c0)


def maxflat_coeffs(order: int, decim: int) -> CompensatorCoeffs:
    """M-dependent coefficients for a conventional comb.

    c0 = -(N/32) * (1 - M^-2) / (1 - 2^-2)
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if decim < 2:
        raise ValueError(f"decimation factor must be >= 2, got {decim}")
    c0 = -Fraction(order, 32) * (1 - Fraction(1, decim**2)) / (1 - Fraction(1, 4))
    return _from_c0(c0)


def maxflat_coeffs_derated(order: int) -> CompensatorCoeffs:
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    return _from_c0(-Fraction(order, 24))


def narrowband_ok(post_decim: int) -> bool:
    return post_decim >= NARROWBAND_MIN_L


def compensated_response(order: int, decim: int, post_decim: int, two_stage: bool, omega, warn: bool = True):
    """Composite C * H (single stage) or C * G (two stage, derated comb)."""
    if warn and not narrowband_ok(post_decim):
        warnings.warn(
            f"3-tap maximally flat compensator is a narrow-band design (L > 4); got L = {post_decim}",
            stacklevel=2,
        )
    spec = CombSpec(order, decim)
    if two_stage:
        return maxflat_coeffs_derated(order).response(omega) * derated_response(spec, omega)
    return maxflat_coeffs(order, decim).response(omega) * comb_response(spec, omega)
