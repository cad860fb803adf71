"""Derating-filter coefficients for N-th order comb decimators.

The derating filter is the symmetric 3-tap FIR

    D_N(z) = (1 + b_N z^-1 + z^-2) / (2 + b_N),    b_N = 24/N - 2

placed in the integrator (input-rate) half of the comb. Everything here is
exact: ``b_N`` is a :class:`fractions.Fraction`, the integer taps are scaled
by ``A_N = N / gcd(24, N)`` and the normalisation is carried separately.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

MAX_ORDER = 11


class InvalidOrder(ValueError):
    """Order for which the 3-tap derating filter is not defined (N >= 12)."""


class DegenerateOrder(ValueError):
    """N = 0: b_0 is infinite and the derating filter is a pure unit delay."""


class ValidityClass(enum.Enum):
    DEGENERATE = "degenerate"
    STRICTLY_VALID = "strictly-valid"
    VALID = "valid"
    INVALID = "invalid"


def validity_class(order: int) -> ValidityClass:
    """Classify an order by the sign and size of b_N.

    ``STRICTLY_VALID`` (b_N >= 2) keeps D_N free of unit-circle zeros except
    at theta = pi; ``VALID`` (0 < b_N < 2) still guarantees |D_N| <= 1.
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if order == 0:
        return ValidityClass.DEGENERATE
    b = Fraction(24, order) - 2
    if b >= 2:
        return ValidityClass.STRICTLY_VALID
    if b > 0:
        return ValidityClass.VALID
    return ValidityClass.INVALID


def _check_order(order: int) -> None:
    if order == 0:
        raise DegenerateOrder("N = 0 has b_0 -> inf; use the pure delay D_0(z) = z^-1")
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if order > MAX_ORDER:
        raise InvalidOrder(f"order out of validity range (N < 12), got N = {order}")


def derating_coeff(order: int) -> Fraction:
    """Return b_N = 24/N - 2 in lowest terms."""
    _check_order(order)
    return Fraction(24, order) - 2


@dataclass(frozen=True)
class DeratingSpec:
    order: int
    b: Fraction
    scale_A: int
    int_taps: tuple[int, int, int]
    norm: int
    extra_bits: int

    @property
    def taps(self) -> tuple[Fraction, Fraction, Fraction]:
        """Normalised taps (DC gain exactly 1)."""
        return tuple(Fraction(t, self.norm) for t in self.int_taps)  # type: ignore[return-value]

    @property
    def is_degenerate(self) -> bool:
        return self.order == 0


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 0 else 0


def derating_spec(order: int) -> DeratingSpec:
    b = derating_coeff(order)
    scale = order // math.gcd(24, order)
    centre = scale * b
    assert centre.denominator == 1
    norm = scale * (2 + b)
    assert norm.denominator == 1 and norm == 24 // math.gcd(24, order)
    taps = (scale, int(centre), scale)
    return DeratingSpec(
        order=order,
        b=b,
        scale_A=scale,
        int_taps=taps,
        norm=int(norm),
        extra_bits=_ceil_log2(int(norm)),
    )


def degenerate_spec() -> DeratingSpec:
    """The N = 0 stand-in: taps (0, 1, 0), i.e. D_0(z) = z^-1.

    ``b`` has no finite value; it is stored as 0 and must not be used.
    """
    return DeratingSpec(order=0, b=Fraction(0), scale_A=1, int_taps=(0, 1, 0), norm=1, extra_bits=0)


def spec_for(order: int) -> DeratingSpec:
    """Like :func:`derating_spec` but maps N = 0 to the pure-delay filter."""
    if order == 0:
        return degenerate_spec()
    return derating_spec(order)


def table1() -> list[tuple[int, Fraction, int, int]]:
    """Rows (N, b_N, A_N, W_b) for N = 1..11."""
    rows = []
    for n in range(1, MAX_ORDER + 1):
        s = derating_spec(n)
        rows.append((n, s.b, s.scale_A, s.extra_bits))
    return rows
