"""Batched successive elimination with four uplink schemes.

Every algorithm shares the same round structure: the learner broadcasts the
active set and the batch size ``b_i``, each active agent pulls its arm ``b_i``
times and sends one report, the learner turns the reports into confidence
intervals and drops every arm whose UCB is at or below the largest LCB.
Only the content of the reports and the width of the intervals differ:

* ICQ-SE: a ``B``-bit midpoint code over an interval built from the previous
  round's decoded estimate, with the recursively inflated width U(i).
* unquantized SE: the exact empirical mean and width U'(i).
* Fed-SEL style: the empirical mean snapped to a grid of cells of length
  at most U'(i) spanning the whole reward range; width 1.5 U'(i).
* QuBan style: every sample is rounded (randomly, without bias) to a grid of
  step ``epsilon`` centered at the learner's current estimate and sent as a
  variable-length offset code; the width uses sigma inflated in quadrature by
  epsilon / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .confidence import ArmBelief, ConfidenceState, lcb_ucb, quant_interval, u_prime
from .core import (
    Algorithm,
    BanditInstance,
    RewardModel,
    TrialConfig,
    TrialMetrics,
    trial_streams,
)
from .errors import ParameterError, ScheduleError
from .protocol import UplinkMessage, schedule_b, schedule_t, split_payload
from .quantizer import (
    Interval,
    codeword_lengths,
    dec,
    enc,
    encode_offset,
    index_bits,
    midpoint,
    nearest_bin,
    nearest_offsets,
    range_bins,
    stochastic_offsets,
    to_bits,
)

# width multiplier for the Fed-SEL baseline: U' plus half a cell of length U'
FED_SEL_SLACK = 0.5


def eliminate(S: Iterable[int], beliefs: Mapping[int, ArmBelief]) -> set:
    """Drop every arm whose UCB does not exceed the best LCB among ``S``."""
    S = list(S)
    top = max(beliefs[j].lcb for j in S)
    return {m for m in S if beliefs[m].ucb > top}


@dataclass
class AgentState:
    """One agent: its arm, its private streams and its running statistics."""

    arm: int
    model: RewardModel
    rng: np.random.Generator = field(repr=False)
    dither: np.random.Generator = field(repr=False)
    pulls_total: int = 0
    running_sum: float = 0.0
    mirror_mu_tilde: float = math.nan
    conf: Optional[ConfidenceState] = None
    # the latest batch: exact draws and the size/sum of any normal remainder
    last_exact: np.ndarray = field(default=None, repr=False)
    last_rest: int = 0
    last_rest_sum: float = 0.0

    @property
    def mu_hat(self) -> float:
        return self.running_sum / self.pulls_total

    def pull(self, n: int, exact_limit: int) -> None:
        exact = min(n, exact_limit)
        draws = self.model.sample(self.rng, exact)
        rest = n - exact
        rest_sum = 0.0
        if rest > 0:
            rest_sum = float(self.rng.normal(rest * self.model.mean, math.sqrt(rest * self.model.variance)))
        self.last_exact, self.last_rest, self.last_rest_sum = draws, rest, rest_sum
        self.running_sum += float(draws.sum()) + rest_sum
        self.pulls_total += n


@dataclass
class LearnerState:
    active: list
    beliefs: dict
    conf: Optional[ConfidenceState] = None
    round: int = 0


@dataclass
class RoundRecord:
    round: int
    t: int
    pulls: int
    active: tuple
    mu_hat: dict
    mu_tilde: dict
    u_prime: float
    width: float
    eliminated: tuple
    intervals_agree: bool = True
    intervals: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    rounds: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    def active_sets(self) -> list:
        return [set(r.active) for r in self.rounds]


@dataclass
class _Report:
    mu_tilde: dict
    width: float
    u_prime: float
    bits: int
    n_messages: int
    messages: list = field(default_factory=list)
    intervals_agree: bool = True
    intervals: dict = field(default_factory=dict)


# -- channels -----------------------------------------------------------------


class _Channel:
    def __init__(self, instance: BanditInstance, config: TrialConfig, log: bool, trace: bool):
        self.instance = instance
        self.config = config
        self.log = log
        self.trace = trace
        self.K = instance.K
        self.sigma = instance.sigma_cb

    def setup(self, agents: list, learner: LearnerState, rng: np.random.Generator) -> None:
        for j in range(self.K):
            learner.beliefs[j] = ArmBelief(math.nan, -math.inf, math.inf)

    def exchange(self, i: int, t: int, active: list, agents: list, learner: LearnerState) -> _Report:
        raise NotImplementedError


class _Unquantized(_Channel):
    def exchange(self, i, t, active, agents, learner):
        up = u_prime(t, self.config.delta, self.K, self.sigma)
        return _Report({j: agents[j].mu_hat for j in active}, up, up, 0, len(active))


class _Icq(_Channel):
    def setup(self, agents, learner, rng):
        cfg = self.config
        self.bootstrap = not self.instance.bounded
        if self.bootstrap:
            # widths are set by the first-round bootstrap
            init_width, init = math.inf, [math.nan] * self.K
        else:
            a, b = self.instance.support
            init_width = b - a
            init = [float(x) for x in rng.uniform(a, b, size=self.K)]
        learner.conf = ConfidenceState(cfg.delta, self.K, self.sigma, cfg.B, init_width)
        for j in range(self.K):
            learner.beliefs[j] = ArmBelief.centered(init[j], init_width)
            # the initial guesses travel on the unconstrained downlink
            agents[j].mirror_mu_tilde = init[j]
            agents[j].conf = ConfidenceState(cfg.delta, self.K, self.sigma, cfg.B, init_width)

    def exchange(self, i, t, active, agents, learner):
        if self.bootstrap and i == 1:
            return self._bootstrap_round(t, active, agents, learner)
        B = self.config.B
        up = learner.conf.peek_u_prime(t)
        mu_tilde, messages, agree, intervals = {}, [], True, {}
        for j in active:
            ag = agents[j]
            a_lcb, a_ucb = lcb_ucb(ag.mirror_mu_tilde, ag.conf.u_prev)
            a_iv = quant_interval(a_lcb, a_ucb, ag.conf.peek_u_prime(t))
            s = enc(ag.mu_hat, B, a_iv)
            ag.mirror_mu_tilde = dec(s, B, a_iv)
            ag.conf.advance(t)

            belief = learner.beliefs[j]
            iv = quant_interval(belief.lcb, belief.ucb, up)
            agree = agree and iv == a_iv
            mu_tilde[j] = dec(s, B, iv)
            if self.log:
                messages.append(UplinkMessage(i, j, s))
            if self.trace:
                intervals[j] = iv
        _, width = learner.conf.advance(t)
        return _Report(mu_tilde, width, up, B * len(active), len(active), messages, agree, intervals)

    def _bootstrap_round(self, t, active, agents, learner):
        boot = bootstrap_unbounded([agents[j].last_exact for j in active], t, self.config, self.K, self.sigma)
        mu_tilde, messages = {}, []
        for j, mt, ks in zip(active, boot.mu_tilde, boot.offsets):
            mu_tilde[j] = mt
            agents[j].mirror_mu_tilde = mt
            agents[j].conf.u_prev = boot.u1
            agents[j].conf.round = 1
            if self.log:
                messages += split_payload(1, j, [encode_offset(k) for k in ks])
        learner.conf.u_prev = boot.u1
        learner.conf.round = 1
        learner.conf.last_u_prime = boot.u_prime
        return _Report(mu_tilde, boot.u1, boot.u_prime, boot.bits, len(active), messages)


class _FedSel(_Channel):
    def setup(self, agents, learner, rng):
        if not self.instance.bounded:
            raise ParameterError("the Fed-SEL baseline needs bounded rewards")
        super().setup(agents, learner, rng)
        a, b = self.instance.support
        self.range = Interval(a, b)

    def exchange(self, i, t, active, agents, learner):
        up = u_prime(t, self.config.delta, self.K, self.sigma)
        n_bins = range_bins(self.range.lo, self.range.hi, up)
        nbits = index_bits(n_bins)
        mu_tilde, messages = {}, []
        for j in active:
            k = nearest_bin(agents[j].mu_hat, n_bins, self.range)
            mu_tilde[j] = midpoint(k, n_bins, self.range)
            if self.log:
                messages.append(UplinkMessage(i, j, to_bits(k, nbits)))
        width = up * (1.0 + FED_SEL_SLACK)
        return _Report(mu_tilde, width, up, nbits * len(active), len(active), messages)


class _Quban(_Channel):
    def setup(self, agents, learner, rng):
        super().setup(agents, learner, rng)
        start = 0.5 * sum(self.instance.support) if self.instance.bounded else 0.0
        self.center = [start] * self.K
        self.decoded_sum = [0.0] * self.K
        eps = self.config.epsilon
        self.sigma_eff = math.sqrt(self.sigma**2 + (eps / 2.0) ** 2)

    def exchange(self, i, t, active, agents, learner):
        eps = self.config.epsilon
        bits, mu_tilde, messages = 0, {}, []
        for j in active:
            ag = agents[j]
            c = self.center[j]
            ks = stochastic_offsets(ag.last_exact, c, eps, ag.dither)
            lengths = codeword_lengths(ks)
            total = len(ks) * c + eps * float(ks.sum())
            nbits = int(lengths.sum())
            if ag.last_rest:
                total_rest, bits_rest = _quban_remainder(ag, c, eps, lengths)
                total += total_rest
                nbits += bits_rest
            self.decoded_sum[j] += total
            mu_tilde[j] = self.decoded_sum[j] / t
            bits += nbits
            if self.log:
                messages += split_payload(i, j, [encode_offset(k) for k in ks])
        for j in active:
            self.center[j] = mu_tilde[j]
        up = u_prime(t, self.config.delta, self.K, self.sigma)
        width = u_prime(t, self.config.delta, self.K, self.sigma_eff)
        return _Report(mu_tilde, width, up, bits, len(active), messages)


def _quban_remainder(ag: AgentState, center: float, eps: float, lengths: np.ndarray) -> tuple:
    """Decoded sum and bit count for the part of a batch summarized by the CLT.

    Randomized rounding adds zero-mean noise with conditional variance
    eps^2 p(1-p), p the fractional grid position; its average and the mean
    codeword length are taken from the exact part of the same batch.
    """
    v = (ag.last_exact - center) / eps
    frac = v - np.floor(v)
    var_q = eps**2 * float(np.mean(frac * (1.0 - frac)))
    noise = float(ag.dither.normal(0.0, math.sqrt(ag.last_rest * var_q))) if var_q > 0 else 0.0
    return ag.last_rest_sum + noise, int(round(ag.last_rest * float(lengths.mean())))


_CHANNELS = {
    Algorithm.ICQ_SE: _Icq,
    Algorithm.UNQUANTIZED_SE: _Unquantized,
    Algorithm.FED_SEL: _FedSel,
    Algorithm.QUBAN_SE: _Quban,
}


@dataclass
class BootstrapResult:
    mu_tilde: list
    offsets: list
    u_prime: float
    e1: float
    u1: float
    bits: int


def bootstrap_unbounded(
    first_round: Sequence[np.ndarray],
    t1: int,
    config: TrialConfig,
    K: int,
    sigma: float,
) -> BootstrapResult:
    """First-round estimates for unbounded rewards.

    Each sample is rounded to the nearest point of a grid of step
    ``config.epsilon`` around 0 and sent as an offset code, so every decoded
    mean is within epsilon / 2 of the empirical mean. With
    e1 = epsilon / 2 + U'(1) the first-round width is U(1) = U'(1) + e1, after
    which the bounded-reward recursion takes over.
    """
    eps = config.epsilon
    up = u_prime(t1, config.delta, K, sigma)
    e1 = eps / 2.0 + up
    mu_tilde, offsets, bits = [], [], 0
    for samples in first_round:
        if len(samples) != t1:
            raise ParameterError("the bootstrap round needs every first-round sample")
        ks = nearest_offsets(samples, 0.0, eps)
        offsets.append(ks)
        mu_tilde.append(eps * float(ks.mean()))
        bits += int(codeword_lengths(ks).sum())
    return BootstrapResult(mu_tilde, offsets, up, e1, up + e1, bits)


# -- driver -------------------------------------------------------------------


def run_trial(
    instance: BanditInstance,
    config: TrialConfig,
    record: bool = False,
    log_messages: bool = False,
) -> tuple:
    """Run one trial; returns ``(TrialMetrics, Trajectory or None)``.

    ``record`` keeps per-round state. ``log_messages`` also keeps every uplink
    message (in the trajectory); for the per-sample baseline this forces every
    pull to be simulated individually so that the log is complete.
    """
    K = instance.K
    record = record or log_messages
    channel = _CHANNELS[config.algorithm](instance, config, log_messages, record)
    if config.algorithm is Algorithm.ICQ_SE and not instance.bounded and config.alpha > config.exact_batch_limit:
        raise ParameterError("the bootstrap round must be simulated sample by sample")
    limit = config.exact_batch_limit
    if log_messages and config.algorithm is Algorithm.QUBAN_SE:
        limit = 2**62
    streams = trial_streams(config.seed, K)
    agents = [AgentState(j, instance.models[j], streams.rewards[j], streams.agents[j]) for j in range(K)]
    learner = LearnerState(active=list(range(K)), beliefs={})
    channel.setup(agents, learner, streams.learner)

    traj = Trajectory() if record else None
    best = set(instance.best_arms)
    samples = bits = n_msgs = rounds = 0
    best_eliminated = False
    conclusive = False
    for i in range(1, config.max_rounds + 1):
        try:
            t = schedule_t(config.alpha, i)
            b = schedule_b(config.alpha, i)
        except ScheduleError:
            break
        active = learner.active
        for j in active:
            agents[j].pull(b, limit)
        rep = channel.exchange(i, t, active, agents, learner)
        for j in active:
            learner.beliefs[j].update(rep.mu_tilde[j], rep.width)
        survivors = sorted(eliminate(active, learner.beliefs))
        removed = tuple(j for j in active if j not in survivors)
        for j in removed:
            learner.beliefs[j].active = False
        best_eliminated = best_eliminated or any(j in best for j in removed)

        samples += len(active) * b
        bits += rep.bits
        n_msgs += rep.n_messages
        rounds = i
        learner.round = i
        if traj is not None:
            traj.rounds.append(
                RoundRecord(
                    round=i,
                    t=t,
                    pulls=b,
                    active=tuple(active),
                    mu_hat={j: agents[j].mu_hat for j in active},
                    mu_tilde=dict(rep.mu_tilde),
                    u_prime=rep.u_prime,
                    width=rep.width,
                    eliminated=removed,
                    intervals_agree=rep.intervals_agree,
                    intervals=rep.intervals,
                )
            )
            traj.messages.extend(rep.messages)
        learner.active = survivors
        if len(survivors) == 1:
            conclusive = True
            break

    recommended = learner.active[0] if conclusive else None
    metrics = TrialMetrics(
        samples=samples,
        rounds=rounds,
        uplink_bits=bits if channel.__class__ is not _Unquantized else None,
        recommended=recommended,
        correct=recommended in best if conclusive else False,
        inconclusive=not conclusive,
        best_eliminated=best_eliminated,
        messages=n_msgs,
    )
    return metrics, traj


def run_icq_se(instance: BanditInstance, config: TrialConfig, log_messages: bool = False) -> tuple:
    return run_trial(instance, _with(config, Algorithm.ICQ_SE), True, log_messages)


def run_se_unquantized(instance: BanditInstance, config: TrialConfig) -> TrialMetrics:
    return run_trial(instance, _with(config, Algorithm.UNQUANTIZED_SE))[0]


def run_fed_sel(instance: BanditInstance, config: TrialConfig) -> TrialMetrics:
    return run_trial(instance, _with(config, Algorithm.FED_SEL))[0]


def run_quban_se(instance: BanditInstance, config: TrialConfig, epsilon: Optional[float] = None) -> TrialMetrics:
    cfg = _with(config, Algorithm.QUBAN_SE, epsilon)
    return run_trial(instance, cfg)[0]


def _with(config: TrialConfig, algorithm: Algorithm, epsilon: Optional[float] = None) -> TrialConfig:
    from dataclasses import replace

    changes = {"algorithm": algorithm}
    if epsilon is not None:
        changes["epsilon"] = epsilon
    if config.algorithm is algorithm and epsilon is None:
        return config
    return replace(config, **changes)
