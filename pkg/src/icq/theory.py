"""Closed-form constants and complexity bounds, with brute-force checks.

The sample bound sums, over every suboptimal arm,

    410 alpha c^2 sigma^2 / gap^2 * ln(256 c^2 sigma^2 sqrt(4 K delta) / gap^2) + 1

(``102 alpha sigma^2 / gap^2 * ln(64 sigma^2 sqrt(4 K delta) / gap^2) + 1`` for
unquantized elimination). The logarithm is taken as printed, with
``sqrt(4 K delta)``; when its argument is at most 1 the log is clamped at 0 and
an :class:`~icq.core.ICQWarning` is emitted. ``log_form="corrected"`` uses
``sqrt(4 K / delta)`` instead, the dependence the derivation produces.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .confidence import u_prime
from .core import ICQWarning
from .errors import DomainError, ParameterError, SearchExhaustedError

MAX_ORACLE_ROUNDS = 1000


def _check_alpha(B: int, alpha: int) -> None:
    if int(B) != B or B < 1:
        raise ParameterError(f"B must be an integer >= 1, got {B}")
    if alpha < 2:
        raise ParameterError(f"alpha must be >= 2, got {alpha}")
    if alpha >= 4**B:
        raise DomainError(f"the constant needs alpha < 2^(2B) = {4 ** B}, got alpha={alpha}")


def c_constant(B: int, alpha: int) -> float:
    """(1 + 2/2^B) * 2^B / (2^B - sqrt(alpha)), the constant in U <= 2c U'."""
    _check_alpha(B, alpha)
    q = 2.0**B
    return (1.0 + 2.0 / q) * q / (q - math.sqrt(alpha))


def c_constant_tight(B: int, alpha: int) -> float:
    """(1 + 1/2^B) * 2^B / (2^B - sqrt(alpha)).

    The unrolled recursion only carries a (1 + 2^-B) factor, so this smaller
    constant already satisfies U <= 2c U' on the same domain.
    """
    _check_alpha(B, alpha)
    q = 2.0**B
    return (1.0 + 1.0 / q) * q / (q - math.sqrt(alpha))


def delta_max(K: int, alpha: int, a: float, b: float, sigma: float) -> float:
    """Largest delta for which the U <= 2c U' relation is guaranteed at i = 1."""
    return 4.0 * K * alpha**2 * math.exp(-((b - a) ** 2) / (2.0 * sigma**2))


def lambert_w_minus1(y: float) -> float:
    """Lower real branch of the Lambert W function by bisection.

    x e^x is strictly decreasing on (-inf, -1], so the root is bracketed
    between e/(e-1) ln(-y) - 1 and -1.
    """
    y = float(y)
    edge = -math.exp(-1.0)
    if not (edge * (1.0 + 1e-12) <= y < 0.0):
        raise DomainError(f"W_-1 is real only for -1/e <= y < 0, got {y}")
    if y <= edge:
        return -1.0
    lo = math.e / (math.e - 1.0) * math.log(-y) - 1.0
    hi = -1.0
    # f(x) = x e^x - y is positive at lo and non-positive at hi
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) - y > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _log_clamped(arg: float) -> float:
    if arg <= 1.0:
        warnings.warn(
            f"log argument {arg:.4g} <= 1; the logarithm is clamped at 0 and the bound is loose",
            ICQWarning,
            stacklevel=3,
        )
        return 0.0
    return math.log(arg)


LOG_FORMS = ("printed", "corrected")


def _delta_factor(K: int, delta: float, log_form: str) -> float:
    if log_form == "printed":
        return math.sqrt(4.0 * K * delta)
    if log_form == "corrected":
        return math.sqrt(4.0 * K / delta)
    raise ParameterError(f"log_form must be one of {LOG_FORMS}, got {log_form!r}")


def per_arm_term(
    gap: float, sigma: float, K: int, delta: float, B: int, alpha: int, log_form: str = "printed"
) -> float:
    """Quantized per-arm sample term; infinite for a zero gap."""
    f = _delta_factor(K, delta, log_form)
    if gap <= 0:
        return math.inf
    c = c_constant(B, alpha)
    r = c * c * sigma * sigma / (gap * gap)
    return 410.0 * alpha * r * _log_clamped(256.0 * r * f) + 1.0


def per_arm_term_unquantized(
    gap: float, sigma: float, K: int, delta: float, alpha: int, log_form: str = "printed"
) -> float:
    f = _delta_factor(K, delta, log_form)
    if gap <= 0:
        return math.inf
    r = sigma * sigma / (gap * gap)
    return 102.0 * alpha * r * _log_clamped(64.0 * r * f) + 1.0


def _suboptimal(gaps: Sequence[float]) -> list:
    """Drop one zero gap (the best arm); every other arm counts."""
    gaps = [float(g) for g in gaps]
    if any(g < 0 for g in gaps):
        raise ParameterError("gaps must be nonnegative")
    if 0.0 not in gaps:
        raise ParameterError("gaps must include the best arm's zero gap")
    rest = list(gaps)
    rest.remove(0.0)
    return rest


@dataclass
class BoundReport:
    c: float
    sample_bound: float
    round_bound: float
    bit_bound: float
    delta_ok: bool
    per_arm_Tj: list = field(default_factory=list)
    per_arm_terms: list = field(default_factory=list)
    unquantized_bound: float = math.nan


def t_j_oracle(delta_j: float, sigma: float, K: int, delta: float, B: int, alpha: int) -> int:
    """Smallest t_i = alpha^i with U'(i) <= gap / (8c), by direct search."""
    if not delta_j > 0:
        raise ParameterError("the gap must be positive")
    target = delta_j / (8.0 * c_constant(B, alpha))
    for i in range(1, MAX_ORACLE_ROUNDS + 1):
        t = alpha**i
        try:
            if u_prime(t, delta, K, sigma) <= target:
                return t
        except OverflowError:
            break
    raise SearchExhaustedError(f"no round up to {i} reaches U' <= {target:.3g}")


def sample_bound(
    gaps: Sequence[float],
    sigma: float,
    K: int,
    delta: float,
    B: int,
    alpha: int,
    span: float = 1.0,
    log_form: str = "printed",
) -> BoundReport:
    """Evaluate the quantized complexity bounds for one instance.

    ``gaps`` lists every arm's gap, the best arm's 0 included. ``span`` is the
    reward range b - a used by the smallness condition on delta. A second zero
    gap makes every bound infinite.
    """
    c = c_constant(B, alpha)
    sub = _suboptimal(gaps)
    terms = [per_arm_term(g, sigma, K, delta, B, alpha, log_form) for g in sub]
    samples = sum(terms)
    rounds = sum(math.log(x + 1.0, alpha) for x in terms)
    tj = [t_j_oracle(g, sigma, K, delta, B, alpha) if g > 0 else None for g in sub]
    unq = sum(per_arm_term_unquantized(g, sigma, K, delta, alpha, log_form) for g in sub)
    return BoundReport(
        c=c,
        sample_bound=samples,
        round_bound=rounds,
        bit_bound=B * rounds,
        delta_ok=delta < delta_max(K, alpha, 0.0, span, sigma),
        per_arm_Tj=tj,
        per_arm_terms=terms,
        unquantized_bound=unq,
    )
