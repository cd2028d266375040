"""Fixed-length midpoint quantizer plus the variable-length codes used by the
baselines.

Bit strings are plain ``str`` objects over ``{"0", "1"}``, most significant
bit first. An index ``k`` of a ``B``-bit code is ``format(k, f"0{B}b")``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EncodingError, ParameterError, ProtocolError


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ParameterError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def _check_bits(B: int) -> None:
    if int(B) != B or B < 1:
        raise ParameterError(f"B must be an integer >= 1, got {B}")


def to_bits(index: int, width: int) -> str:
    return format(index, f"0{width}b")


def from_bits(s: str) -> int:
    if not s or s.strip("01"):
        raise ProtocolError(f"not a bit string: {s!r}")
    return int(s, 2)


def midpoint(index: int, n_bins: int, iv: Interval) -> float:
    return iv.lo + (index + 0.5) * iv.width / n_bins


def nearest_bin(x: float, n_bins: int, iv: Interval) -> int:
    """Index of the bin midpoint closest to ``x``; ties go to the lower bin and
    points outside the interval saturate to the end bins."""
    if not math.isfinite(x):
        raise EncodingError(f"cannot quantize non-finite value {x!r}")
    u = (x - iv.lo) / iv.width * n_bins
    if u <= 0:
        return 0
    if u >= n_bins:
        return n_bins - 1
    k = math.ceil(u) - 1
    # settle floating-point ambiguity against the decoded midpoints themselves
    best, best_d = k, abs(midpoint(k, n_bins, iv) - x)
    for cand in (k - 1, k + 1):
        if 0 <= cand < n_bins:
            d = abs(midpoint(cand, n_bins, iv) - x)
            if d < best_d or (d == best_d and cand < best):
                best, best_d = cand, d
    return best


def enc(x: float, B: int, iv: Interval) -> str:
    """B-bit label of the bin midpoint of ``iv`` nearest to ``x``."""
    _check_bits(B)
    return to_bits(nearest_bin(x, 2**B, iv), B)


def dec(s: str, B: int, iv: Interval) -> float:
    _check_bits(B)
    if len(s) != B:
        raise ProtocolError(f"expected {B} bits, got {len(s)}")
    return midpoint(from_bits(s), 2**B, iv)


def error_bound(B: int, iv: Interval) -> float:
    """Worst-case |dec(enc(x)) - x| for x inside ``iv``."""
    _check_bits(B)
    return iv.width / 2 ** (B + 1)


# -- Fed-SEL style: a fixed grid over the whole reward range -----------------


def range_bins(lo: float, hi: float, bin_length: float) -> int:
    """Number of equal bins of length at most ``bin_length`` covering [lo, hi]."""
    if not bin_length > 0:
        raise ParameterError("bin_length must be positive")
    return max(1, math.ceil((hi - lo) / bin_length))


def index_bits(n_bins: int) -> int:
    """Fixed code length for ``n_bins`` symbols, never less than one bit."""
    return max(1, (int(n_bins) - 1).bit_length())


# -- QuBan style: signed grid offsets with a prefix code -----------------------


def codeword_length(k: int) -> int:
    """Length of the codeword for signed offset ``k``: 1 + 2*ceil(log2(1 + |k|))."""
    d = abs(int(k))
    return 1 if d == 0 else 2 * d.bit_length() + 1


def codeword_lengths(ks: np.ndarray) -> np.ndarray:
    d = np.abs(np.asarray(ks, dtype=np.int64))
    # ceil(log2(1 + d)) equals the bit length of d
    bitlen = np.zeros_like(d)
    nz = d > 0
    bitlen[nz] = np.floor(np.log2(d[nz])).astype(np.int64) + 1
    return np.where(nz, 2 * bitlen + 1, 1)


def encode_offset(k: int) -> str:
    """``0`` for k = 0, else ``1``, a sign bit (1 = negative) and the Elias-gamma
    code of |k|."""
    k = int(k)
    if k == 0:
        return "0"
    d = abs(k)
    body = format(d, "b")
    return "1" + ("1" if k < 0 else "0") + "0" * (len(body) - 1) + body


def decode_offsets(s: str) -> list:
    """Inverse of concatenated :func:`encode_offset` codewords."""
    out, pos, n = [], 0, len(s)
    while pos < n:
        if s[pos] == "0":
            out.append(0)
            pos += 1
            continue
        if pos + 2 > n:
            raise ProtocolError("truncated offset codeword")
        negative = s[pos + 1] == "1"
        pos += 2
        zeros = 0
        while pos < n and s[pos] == "0":
            zeros += 1
            pos += 1
        if pos + zeros + 1 > n:
            raise ProtocolError("truncated Elias-gamma body")
        d = int(s[pos : pos + zeros + 1], 2)
        pos += zeros + 1
        out.append(-d if negative else d)
    return out


def stochastic_offsets(values: np.ndarray, center: float, step: float, rng: np.random.Generator) -> np.ndarray:
    """Unbiased randomized rounding of ``(values - center) / step`` to integers."""
    v = (np.asarray(values, dtype=float) - center) / step
    if not np.all(np.isfinite(v)):
        raise EncodingError("cannot quantize non-finite samples")
    lower = np.floor(v)
    up = rng.random(v.shape) < (v - lower)
    return (lower + up).astype(np.int64)


def nearest_offsets(values: np.ndarray, center: float, step: float) -> np.ndarray:
    """Deterministic rounding to the nearest grid point, ties toward -inf."""
    v = (np.asarray(values, dtype=float) - center) / step
    if not np.all(np.isfinite(v)):
        raise EncodingError("cannot quantize non-finite samples")
    return (np.ceil(v - 0.5)).astype(np.int64)
