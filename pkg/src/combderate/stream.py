"""Bit-exact integer model of the derated comb decimator.

Structure: N integrators -> 3-tap derating FIR -> keep every M-th sample ->
N first differences at the output rate. Every register has the same
two's-complement width and wraps modulo 2**total_bits; as long as the final
output fits, the wrapped intermediate values do not matter.

The FIR sits at the integrator input by default (``fir_position="input"``);
``"output"`` moves it between the integrators and the decimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .coeffs import derating_spec

# Widest register the vectorised int64 path can wrap exactly.
_MAX_FAST_BITS = 62


class InputRangeError(ValueError):
    """A sample does not fit in the declared input word length."""


@dataclass(frozen=True)
class WordLengthPlan:
    order: int
    decim: int
    input_bits: int
    comb_growth_bits: int
    derate_bits: int
    total_bits: int
    derated: bool = True

    @property
    def gain(self) -> int:
        g = self.decim**self.order
        if self.derated:
            g *= derating_spec(self.order).norm
        return g


def plan_wordlength(order: int, decim: int, input_bits: int, derated: bool = True) -> WordLengthPlan:
    """Uniform register width: B_in + N*ceil(log2 M) + W_b.

    W_b comes from the derating filter and does not depend on M. For an
    underated chain the derate term is zero.
    """
    wb = derating_spec(order).extra_bits  # raises for N outside 1..11
    if decim < 2:
        raise ValueError(f"decimation factor must be >= 2, got {decim}")
    if input_bits < 1:
        raise ValueError(f"input word length must be >= 1, got {input_bits}")
    growth = order * math.ceil(math.log2(decim))
    derate = wb if derated else 0
    return WordLengthPlan(order, decim, input_bits, growth, derate, input_bits + growth + derate, derated)


def validate_samples(samples: Iterable[int], input_bits: int) -> np.ndarray:
    """Return samples as an int array; every |x| must be < 2**(B_in - 1)."""
    values = [int(v) for v in samples]
    limit = 1 << (input_bits - 1)
    for i, v in enumerate(values):
        if abs(v) >= limit:
            raise InputRangeError(f"sample {i} = {v} does not fit in {input_bits} bits (|x| < {limit})")
    dtype = np.int64 if input_bits <= 63 else object
    return np.array(values, dtype=dtype)


def read_samples(fh: TextIO) -> list[int]:
    out = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise InputRangeError(f"line {lineno}: not a signed decimal integer: {line!r}") from None
    return out


def write_samples(fh: TextIO, samples: Iterable[int]) -> None:
    for v in samples:
        fh.write(f"{int(v)}\n")


def _wrap(value: int, bits: int) -> int:
    half = 1 << (bits - 1)
    return ((value + half) & ((1 << bits) - 1)) - half


@dataclass
class FilterChainState:
    integrators: list[int]
    fir_delay: list[int]
    differentiators: list[int]
    phase: int = 0

    @classmethod
    def zeros(cls, order: int) -> "FilterChainState":
        return cls([0] * order, [0, 0], [0] * order, 0)


@dataclass
class CombDecimator:
    """Streaming integer CIC with optional derating FIR.

    ``process_sample`` is the reference behaviour; ``process_block`` gives
    the same results with numpy and carries the state across calls.
    """

    plan: WordLengthPlan
    fir_position: str = "input"
    state: FilterChainState = field(init=False)

    def __post_init__(self):
        if self.fir_position not in ("input", "output"):
            raise ValueError("fir_position must be 'input' or 'output'")
        self.state = FilterChainState.zeros(self.plan.order)
        self.taps = derating_spec(self.plan.order).int_taps if self.plan.derated else None

    @property
    def bits(self) -> int:
        return self.plan.total_bits

    def reset(self) -> None:
        self.state = FilterChainState.zeros(self.plan.order)

    def _fir(self, x: int) -> int:
        if self.taps is None:
            return x
        d = self.state.fir_delay
        t0, t1, t2 = self.taps
        y = _wrap(t0 * x + t1 * d[0] + t2 * d[1], self.bits)
        d[1], d[0] = d[0], x
        return y

    def process_sample(self, x: int) -> int | None:
        st, bits = self.state, self.bits
        v = int(x)
        if self.fir_position == "input":
            v = self._fir(v)
        for i in range(len(st.integrators)):
            v = st.integrators[i] = _wrap(st.integrators[i] + v, bits)
        if self.fir_position == "output":
            v = self._fir(v)
        st.phase = (st.phase + 1) % self.plan.decim
        if st.phase != 0:
            return None
        for i in range(len(st.differentiators)):
            prev = st.differentiators[i]
            st.differentiators[i] = v
            v = _wrap(v - prev, bits)
        return v

    def process_block(self, samples) -> np.ndarray:
        if self.bits > _MAX_FAST_BITS:
            out = [y for y in (self.process_sample(x) for x in samples) if y is not None]
            return np.array(out, dtype=object)
        # int64 arithmetic wraps mod 2**64, a multiple of 2**bits, so reducing
        # once per stage gives the same residues as wrapping every operation.
        st, bits = self.state, self.bits
        x = np.asarray(samples, dtype=np.int64)
        if self.fir_position == "input":
            x = self._fir_block(x)
        for i in range(len(st.integrators)):
            x = np.cumsum(x, dtype=np.int64) + np.int64(st.integrators[i])
            x = _wrap_array(x, bits)
            if x.size:
                st.integrators[i] = int(x[-1])
        if self.fir_position == "output":
            x = self._fir_block(x)
        m = self.plan.decim
        first = (m - 1 - st.phase) % m
        v = x[first::m]
        st.phase = (st.phase + x.size) % m
        for i in range(len(st.differentiators)):
            prev = np.concatenate(([st.differentiators[i]], v[:-1])).astype(np.int64)
            if v.size:
                st.differentiators[i] = int(v[-1])
            v = _wrap_array(v - prev, bits)
        return v

    def _fir_block(self, x: np.ndarray) -> np.ndarray:
        if self.taps is None:
            return x
        d = self.state.fir_delay
        ext = np.concatenate((np.array([d[1], d[0]], dtype=np.int64), x))
        t0, t1, t2 = (np.int64(t) for t in self.taps)
        y = t0 * ext[2:] + t1 * ext[1:-1] + t2 * ext[:-2]
        if x.size:
            d[0], d[1] = int(ext[-1]), int(ext[-2])
        return _wrap_array(y, self.bits)


def _wrap_array(x: np.ndarray, bits: int) -> np.ndarray:
    half = np.int64(1 << (bits - 1))
    mask = np.int64((1 << bits) - 1)
    return ((x + half) & mask) - half


def run_chain(samples, order: int, decim: int, derated: bool, plan: WordLengthPlan | None = None,
              fir_position: str = "input") -> np.ndarray:
    """Decimated output of a fresh chain; one sample per M inputs."""
    if plan is None:
        plan = plan_wordlength(order, decim, 16, derated)
    if (plan.order, plan.decim, plan.derated) != (order, decim, derated):
        raise ValueError("word-length plan does not match the requested chain")
    return CombDecimator(plan, fir_position).process_block(samples)


def impulse_response(order: int, decim: int, derated: bool) -> list[int]:
    """Full-rate integer taps: ones(M) convolved N times, then with the FIR taps."""
    taps = [1]
    box = [1] * decim
    for _ in range(order):
        taps = _convolve(taps, box)
    if derated:
        taps = _convolve(taps, list(derating_spec(order).int_taps))
    return taps


def _convolve(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def direct_fir_oracle(samples, order: int, decim: int, derated: bool) -> np.ndarray:
    """Ground truth: explicit convolution, then keep indices = M-1 (mod M).

    Accumulation is exact. int64 is used only when the worst-case output is
    provably representable; otherwise Python integers.
    """
    taps = impulse_response(order, decim, derated)
    x = [int(v) for v in samples]
    peak = max((abs(v) for v in x), default=0)
    exact_int64 = peak * sum(taps) < (1 << 62)
    dtype = np.int64 if exact_int64 else object
    xa = np.array(x, dtype=dtype)
    idx = np.arange(decim - 1, len(x), decim)
    if not idx.size:
        return np.zeros(0, dtype=dtype)
    # y[n] = sum_k taps[k] * x[n - k] for the kept n only
    out = np.zeros(idx.size, dtype=dtype)
    padded = np.concatenate((np.zeros(len(taps) - 1, dtype=dtype), xa))
    for k, t in enumerate(taps):
        out = out + t * padded[idx + len(taps) - 1 - k]
    return out


def integrators_wrap(samples, order: int, plan: WordLengthPlan) -> bool:
    """True if an exact (unbounded) integrator would leave the register range.

    Evaluated for the default FIR-at-input placement.
    """
    v = np.array([int(s) for s in samples], dtype=object)
    if plan.derated:
        t0, t1, t2 = derating_spec(order).int_taps
        pad = np.concatenate((np.zeros(2, dtype=object), v))
        v = t0 * pad[2:] + t1 * pad[1:-1] + t2 * pad[:-2]
    half = 1 << (plan.total_bits - 1)
    for _ in range(order):
        v = np.cumsum(v)
        if v.size and (max(v) >= half or min(v) < -half):
            return True
    return False


def empirical_response(order: int, decim: int, derated: bool, omegas, amplitude_bits: int = 28,
                       n_out: int = 4096) -> np.ndarray:
    """Magnitude response measured by driving the integer chain with sinusoids.

    A quantised cosine and sine probe are run separately and recombined into
    a complex exponential, which is then demodulated at the probe frequency.
    Results are normalised by the chain gain, so they compare directly with
    the closed forms.
    """
    plan = plan_wordlength(order, decim, amplitude_bits + 2, derated)
    amp = float(1 << amplitude_bits) - 1
    settle = order + 3
    n = np.arange((settle + n_out) * decim)
    keep = np.arange(decim - 1, n.size, decim)[settle:]
    out = []
    for omega in np.atleast_1d(np.asarray(omegas, dtype=float)):
        theta = omega / decim
        xc = np.rint(amp * np.cos(theta * n)).astype(np.int64)
        xs = np.rint(amp * np.sin(theta * n)).astype(np.int64)
        yc = run_chain(xc, order, decim, derated, plan)[settle:].astype(float)
        ys = run_chain(xs, order, decim, derated, plan)[settle:].astype(float)
        z = (yc + 1j * ys) * np.exp(-1j * theta * keep)
        out.append(abs(z.mean()) / (amp * plan.gain))
    return np.array(out)
