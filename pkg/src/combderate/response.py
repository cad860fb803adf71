"""Closed-form frequency responses of comb decimators and their derated forms.

Frequencies follow the output-rate convention: the decimator output runs at
1 Hz regardless of M, so an output-rate angular frequency ``omega`` is
evaluated at ``z = exp(j * omega / M)`` on the input side. The pass band is
``[0, pi / L]`` and the first folding band sits at ``omega = 2 pi``.

All evaluators accept scalars or numpy arrays for ``omega``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coeffs import MAX_ORDER, InvalidOrder, spec_for

VARIANTS = (
    "conventional",
    "derated",
    "sharpened",
    "sharpened-derated",
    "cascade",
    "cascade-derated",
)

DEFAULT_M = tuple(range(4, 33, 4))
DEFAULT_GRID_DENSITY = 1024

# The bifurcated-zero preset splits each folding-band zero where the outer
# comb amplitude equals +-BIFURCATION_LEVEL. The level has to stay below the
# smallest comb sidelobe (about 1/M) for every fold to split; 1/64 covers
# M <= 64. The branch weight follows from w * level**2 = w - 1.
BIFURCATION_LEVEL = 1 / 64
BIFURCATION_WEIGHT = 1 / (1 - BIFURCATION_LEVEL**2)
CASCADE_PRESETS = {"3+1": (3, 1), "2+0": (2, 0)}

_SINGULAR = 1e-12


@dataclass(frozen=True)
class CombSpec:
    order: int
    decim: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"comb order must be >= 1, got {self.order}")
        if self.decim < 2:
            raise ValueError(f"decimation factor must be >= 2, got {self.decim}")


@dataclass(frozen=True)
class BandContext:
    post_decim: int = 2

    def __post_init__(self):
        if self.post_decim < 2:
            raise ValueError(f"post-decimation factor L must be >= 2, got {self.post_decim}")

    @property
    def band_edge(self) -> float:
        return np.pi / self.post_decim


@dataclass
class FrequencyResponse:
    grid: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have the same shape")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def magnitude_db(self) -> np.ndarray:
        # exact nulls are floored at -300 dB so CSV output stays finite
        return 20 * np.log10(np.maximum(self.magnitude, 1e-15))


@dataclass
class DeviationCurve:
    variant: str
    order: int
    m_values: list[int]
    deviation_db: list[float] = field(default_factory=list)
    post_decim: int = 2

    def __post_init__(self):
        if len(self.m_values) != len(self.deviation_db):
            raise ValueError("m_values and deviation_db must have equal length")

    @property
    def spread(self) -> float:
        return max(self.deviation_db) - min(self.deviation_db)


def _moving_average(theta, length: int):
    """Response of (1/K) * sum_{n<K} z^-n at z = exp(j theta), K = ``length``."""
    theta = np.asarray(theta, dtype=float)
    half = theta / 2
    den = np.sin(half)
    singular = np.abs(den) < _SINGULAR
    with np.errstate(divide="ignore", invalid="ignore"):
        amp = np.sin(length * half) / (length * den)
    if np.any(singular):
        # Dirichlet-kernel sum instead of the 0/0 quotient
        ks = length - 1 - 2 * np.arange(length)
        th = np.atleast_1d(theta)[np.atleast_1d(singular)]
        dir_amp = np.cos(np.outer(th, ks) / 2).sum(axis=1) / length
        amp = np.array(amp, dtype=float, ndmin=1)
        amp[np.atleast_1d(singular)] = dir_amp
        amp = amp.reshape(theta.shape)
    return amp * np.exp(-0.5j * (length - 1) * theta)


def comb_response(spec: CombSpec, omega):
    """H_{N,M}(exp(j omega / M)), normalised to unit DC gain."""
    return _moving_average(np.asarray(omega, dtype=float) / spec.decim, spec.decim) ** spec.order


def sinc_limit(order: int, omega):
    """(sin(omega/2) / (omega/2)) ** N, the M -> inf limit of the comb amplitude."""
    return np.sinc(np.asarray(omega, dtype=float) / (2 * np.pi)) ** order


def _derating_amplitude(order: int, theta):
    if order > MAX_ORDER:
        raise InvalidOrder(f"order out of validity range (N < 12), got N = {order}")
    if order == 0:
        return np.ones_like(np.asarray(theta, dtype=float))
    b = float(spec_for(order).b)
    return (b + 2 * np.cos(theta)) / (2 + b)


def derating_response(order: int, decim: int, omega):
    """D_N(exp(j omega / M)) in exact cosine form; N = 0 is the unit delay."""
    theta = np.asarray(omega, dtype=float) / decim
    return _derating_amplitude(order, theta) * np.exp(-1j * theta)


def derated_response(spec: CombSpec, omega):
    """G_{N,M} = H_{N,M} * D_N."""
    return comb_response(spec, omega) * derating_response(spec.order, spec.decim, omega)


def sharpened_response(decim: int, omega, derated: bool = False):
    """Sharpened comb 3 z^-M H^2 - 2 z^-1 H^3 with H the order-2 comb.

    The two delays equalise the branch group delays at 3M - 2 input samples.
    When derated the H^2 branch carries D_4 and the H^3 branch D_6; both add
    one sample, so alignment is kept.
    """
    omega = np.asarray(omega, dtype=float)
    theta = omega / decim
    base = comb_response(CombSpec(2, decim), omega)
    low = 3 * np.exp(-1j * decim * theta) * base**2
    high = 2 * np.exp(-1j * theta) * base**3
    if derated:
        low = low * derating_response(4, decim, omega)
        high = high * derating_response(6, decim, omega)
    return low - high


def cascade_response(stages: Sequence[tuple[int, int]], decim: int, omega, derated: bool = False):
    """Product of normalised comb stages with staggered lengths.

    Each stage ``(order, length_offset)`` is a moving average of length
    ``decim + length_offset`` raised to ``order``; when derated it is also
    multiplied by ``D_order``.
    """
    if not stages:
        raise ValueError("cascade needs at least one stage")
    omega = np.asarray(omega, dtype=float)
    theta = omega / decim
    out = np.ones_like(omega, dtype=complex)
    for order, offset in stages:
        if order < 0:
            raise ValueError(f"stage order must be >= 0, got {order}")
        length = decim + offset
        if length < 2:
            raise ValueError(f"stage length M + offset must be >= 2, got {length}")
        out = out * _moving_average(theta, length) ** order
        if derated:
            out = out * derating_response(order, decim, omega)
    return out


def bifurcated_response(
    decim: int,
    omega,
    derated: bool = False,
    inner: int = 3,
    outer: int = 1,
    weight: float = BIFURCATION_WEIGHT,
):
    """Two-branch comb with split zeros: w*H_inner - (w-1)*z^-d*H_outer.

    Factoring out H_outer leaves w*H_{inner-outer} - (w-1), whose zeros lie
    where the lower-order comb amplitude equals +-sqrt((w-1)/w), i.e. in
    pairs on either side of every folding frequency. ``w`` close to 1 keeps
    the result a small perturbation of H_inner. Derating multiplies each
    branch by the D of its own order (D_0 being the unit delay).
    """
    if (inner - outer) % 2:
        raise ValueError("inner and outer orders must differ by an even number")
    if not 0 <= outer < inner:
        raise ValueError("need 0 <= outer < inner")
    omega = np.asarray(omega, dtype=float)
    theta = omega / decim
    delay = (inner - outer) // 2 * (decim - 1)
    hi = weight * _moving_average(theta, decim) ** inner
    lo = (weight - 1) * np.exp(-1j * delay * theta) * _moving_average(theta, decim) ** outer
    if derated:
        hi = hi * derating_response(inner, decim, omega)
        lo = lo * derating_response(outer, decim, omega)
    return hi - lo


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")


def variant_response(variant: str, order: int, decim: int, omega):
    """Dispatch on the variant label; ``order`` is ignored by the sharpened forms."""
    _check_variant(variant)
    derated = variant.endswith("derated")
    if variant in ("conventional", "derated"):
        spec = CombSpec(order, decim)
        return derated_response(spec, omega) if derated else comb_response(spec, omega)
    if variant.startswith("sharpened"):
        return sharpened_response(decim, omega, derated)
    return bifurcated_response(decim, omega, derated, inner=order, outer=order - 2)


def variant_limit(variant: str, order: int, omega):
    """|response| as M -> inf (every D tends to 1 there)."""
    _check_variant(variant)
    s = sinc_limit(1, omega)
    if variant in ("conventional", "derated"):
        return np.abs(s**order)
    if variant.startswith("sharpened"):
        return np.abs(3 * s**4 - 2 * s**6)
    w = BIFURCATION_WEIGHT
    return np.abs(w * s**order - (w - 1) * s ** (order - 2))


def passband_deviation(variant: str, order: int, decim: int, post_decim: int = 2) -> float:
    """Deviation in dB at the band edge pi/L relative to the M -> inf limit."""
    edge = BandContext(post_decim).band_edge
    mag = abs(complex(variant_response(variant, order, decim, edge)))
    ref = float(variant_limit(variant, order, edge))
    return 20 * np.log10(mag) - 20 * np.log10(ref)


def passband_deviation_linear(variant: str, order: int, decim: int, post_decim: int = 2) -> float:
    edge = BandContext(post_decim).band_edge
    mag = abs(complex(variant_response(variant, order, decim, edge)))
    return mag - float(variant_limit(variant, order, edge))


def deviation_sweep(
    variant: str, order: int, m_values: Sequence[int] = DEFAULT_M, post_decim: int = 2
) -> DeviationCurve:
    m_values = list(m_values)
    if not m_values:
        raise ValueError("empty M sweep")
    if variant.startswith("sharpened"):
        order = 2
    devs = [passband_deviation(variant, order, m, post_decim) for m in m_values]
    return DeviationCurve(variant, order, m_values, devs, post_decim)


def frequency_grid(decim: int, density: int = DEFAULT_GRID_DENSITY, span: float | None = None):
    """Uniform grid on [0, span*pi] with ``density`` points per unit of omega/pi."""
    if density < 2:
        raise ValueError("grid density must be >= 2")
    if span is None:
        span = min(decim, 8)
    npts = int(round(density * span)) + 1
    return np.linspace(0.0, span * np.pi, npts)


def evaluate(variant: str, order: int, decim: int, grid) -> FrequencyResponse:
    return FrequencyResponse(grid, variant_response(variant, order, decim, grid), label=variant)


@dataclass(frozen=True)
class StopbandReport:
    order: int
    decim: int
    dominates: bool
    worst_ratio: float
    nonvanishing: bool


def stopband_dominance(spec: CombSpec, grid=None, post_decim: int = 2, npoints: int = 4096) -> StopbandReport:
    """Check |G| <= |H| beyond the band edge, with |D_N| < 1 except where
    omega/M is a multiple of 2 pi (there D_N has unit gain).

    ``nonvanishing`` reports whether D_N stays away from zero on the grid
    apart from theta = pi, which holds for the strictly valid orders.
    """
    edge = BandContext(post_decim).band_edge
    if grid is None:
        grid = np.linspace(edge, spec.decim * np.pi, npoints + 1)[1:]
    grid = np.asarray(grid, dtype=float)
    grid = grid[grid > edge]
    h = np.abs(comb_response(spec, grid))
    g = np.abs(derated_response(spec, grid))
    d = _derating_amplitude(spec.order, grid / spec.decim)
    theta = np.mod(grid / spec.decim, 2 * np.pi)
    at_dc = np.isclose(theta, 0.0, atol=1e-12) | np.isclose(theta, 2 * np.pi, atol=1e-12)
    ok = bool(np.all(g <= h)) and bool(np.all(np.abs(d[~at_dc]) < 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(h > 0, g / h, 0.0)
    at_nyq = np.isclose(theta, np.pi, atol=1e-9)
    nonvanishing = bool(np.all(d[~at_nyq] > 1e-12))
    return StopbandReport(spec.order, spec.decim, ok, float(ratio.max()) if ratio.size else 0.0, nonvanishing)
