"""Confidence widths for raw and quantized means.

``u_prime`` is the sub-Gaussian width of an empirical mean over ``t`` samples;
``u_next`` inflates it by the quantization error carried over from the
previous round, starting from the full reward range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ParameterError
from .quantizer import Interval


def u_prime(t: int, delta: float, K: int, sigma: float) -> float:
    """sigma * sqrt(2 ln(4 K t^2 / delta) / t)."""
    if t < 1:
        raise ParameterError(f"t must be >= 1, got {t}")
    if not 0 < delta:
        raise ParameterError("delta must be positive")
    if not sigma > 0:
        raise ParameterError("sigma must be positive")
    arg = 4.0 * K * float(t) * float(t) / delta
    if arg <= 1.0:
        raise DomainError(f"log argument 4Kt^2/delta = {arg} must exceed 1")
    return sigma * math.sqrt(2.0 * math.log(arg) / t)


def u_next(u_prime_i: float, u_prev: float, B: int) -> float:
    return (u_prime_i + u_prev) / 2.0**B + u_prime_i


def u_unrolled(u_primes: list, B: int, initial: float) -> float:
    """Closed form of the recursion after ``len(u_primes)`` rounds:

    (1 + 2^-B) * sum_j 2^{-B(i-j)} U'(j) + 2^{-B i} * initial
    """
    i = len(u_primes)
    r = 2.0**-B
    total = sum(r ** (i - j) * up for j, up in enumerate(u_primes, start=1))
    return (1.0 + r) * total + r**i * initial


def quant_interval(lcb_prev: float, ucb_prev: float, u_prime_i: float) -> Interval:
    return Interval(lcb_prev - u_prime_i, ucb_prev + u_prime_i)


def lcb_ucb(mu_tilde: float, u_i: float) -> tuple:
    return mu_tilde - u_i, mu_tilde + u_i


@dataclass
class ArmBelief:
    mu_tilde: float
    lcb: float
    ucb: float
    active: bool = True

    @classmethod
    def centered(cls, mu_tilde: float, width: float) -> "ArmBelief":
        lo, hi = lcb_ucb(mu_tilde, width)
        return cls(mu_tilde, lo, hi)

    def update(self, mu_tilde: float, width: float) -> None:
        self.mu_tilde = mu_tilde
        self.lcb, self.ucb = lcb_ucb(mu_tilde, width)


@dataclass
class ConfidenceState:
    """Round counter and the running inflated width U(i).

    Learner and agents each own one of these and advance them with the same
    arguments, so their quantization intervals agree bit for bit.
    """

    delta: float
    K: int
    sigma_cb: float
    B: int
    u_prev: float
    round: int = 0
    last_u_prime: float = math.nan

    def advance(self, t: int) -> tuple:
        """Move to the next round with cumulative pull count ``t``; returns
        ``(U'(i), U(i))``."""
        up = u_prime(t, self.delta, self.K, self.sigma_cb)
        self.u_prev = u_next(up, self.u_prev, self.B)
        self.round += 1
        self.last_u_prime = up
        return up, self.u_prev

    def peek_u_prime(self, t: int) -> float:
        return u_prime(t, self.delta, self.K, self.sigma_cb)
