"""Bandit instances, reward models, trial configuration and seeded streams."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ParameterError

# Batches larger than this are summed as `limit` exact draws plus a Gaussian
# remainder with the model's exact mean and variance.
DEFAULT_EXACT_BATCH_LIMIT = 4096


class ICQWarning(UserWarning):
    """Emitted when a configuration leaves the range covered by the bounds."""


@dataclass(frozen=True)
class BoundedBeta:
    """Beta(gamma, 1 - gamma) rewards on [0, 1]; the mean is gamma."""

    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")

    @property
    def mean(self) -> float:
        return self.gamma

    @property
    def variance(self) -> float:
        # a*b / ((a+b)^2 (a+b+1)) with a + b = 1
        return self.gamma * (1.0 - self.gamma) / 2.0

    @property
    def bounded(self) -> bool:
        return True

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.beta(self.gamma, 1.0 - self.gamma, size=n)


@dataclass(frozen=True)
class Gaussian:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0.0:
            raise ParameterError(f"std must be positive, got {self.std}")

    @property
    def variance(self) -> float:
        return self.std**2

    @property
    def bounded(self) -> bool:
        return False

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mean, self.std, size=n)


RewardModel = Union[BoundedBeta, Gaussian]


@dataclass(frozen=True)
class BanditInstance:
    """K arms plus the sub-Gaussian scale used by the confidence widths.

    ``support`` is ``(a, b)`` when every arm is bounded and ``None`` otherwise.
    """

    models: tuple
    sigma_cb: float
    support: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if len(self.models) < 2:
            raise ParameterError("a bandit instance needs at least two arms")
        if not self.sigma_cb > 0:
            raise ParameterError("sigma_cb must be positive")
        all_bounded = all(m.bounded for m in self.models)
        if self.support is not None:
            a, b = self.support
            if not a < b:
                raise ParameterError(f"support must satisfy a < b, got {self.support}")
            if not all_bounded:
                raise ParameterError("support given for an instance with unbounded arms")
            if any(not a <= mu <= b for mu in self.means):
                raise ParameterError("every mean must lie inside the support")
            object.__setattr__(self, "support", (float(a), float(b)))
        elif all_bounded:
            raise ParameterError("bounded instances must declare their support")

    @property
    def K(self) -> int:
        return len(self.models)

    @property
    def means(self) -> list:
        return [m.mean for m in self.models]

    @property
    def bounded(self) -> bool:
        return self.support is not None

    @property
    def best_arms(self) -> list:
        top = max(self.means)
        return [j for j, mu in enumerate(self.means) if mu == top]

    @property
    def degenerate(self) -> bool:
        """True when no single arm has the strictly largest mean."""
        return len(self.best_arms) > 1


class InstanceKind(str, enum.Enum):
    BETA_RANDOM = "beta"
    GAUSSIAN_RANDOM_MEANS = "gaussian"
    GAUSSIAN_HARDNESS = "hardness"


GAUSSIAN_STD = 0.125


def make_instance(
    kind: Union[InstanceKind, str],
    K: int,
    seed: int,
    gap: Optional[float] = None,
) -> BanditInstance:
    """Draw one of the three experiment families.

    ``gap`` is the mean of the single distinguished arm for the hardness family
    and is ignored otherwise.
    """
    kind = InstanceKind(kind)
    if not isinstance(K, (int, np.integer)) or K < 2:
        raise ParameterError(f"K must be an integer >= 2, got {K!r}")
    rng = np.random.default_rng(seed)

    if kind is InstanceKind.BETA_RANDOM:
        gammas = rng.uniform(0.0, 1.0, size=K)
        # uniform() may return exactly 0.0, which is not a valid Beta parameter
        gammas = np.clip(gammas, 1e-12, 1.0 - 1e-12)
        models = [BoundedBeta(float(g)) for g in gammas]
        return BanditInstance(models, sigma_cb=0.5, support=(0.0, 1.0))

    if kind is InstanceKind.GAUSSIAN_RANDOM_MEANS:
        n = rng.normal(0.0, 3.0)
        lo, hi = min(0.0, n), max(0.0, n)
        means = rng.uniform(lo, hi, size=K)
        models = [Gaussian(float(mu), GAUSSIAN_STD) for mu in means]
        return BanditInstance(models, sigma_cb=GAUSSIAN_STD)

    if gap is None or not 0.0 <= gap <= 1.0:
        raise ParameterError(f"hardness gap must lie in [0, 1], got {gap!r}")
    means = [0.0] * K
    means[int(rng.integers(K))] = float(gap)
    models = [Gaussian(mu, GAUSSIAN_STD) for mu in means]
    return BanditInstance(models, sigma_cb=GAUSSIAN_STD)


def gaps(instance: BanditInstance) -> list:
    top = max(instance.means)
    return [top - mu for mu in instance.means]


def sample_reward(instance: BanditInstance, arm: int, rng: np.random.Generator) -> float:
    check_arm_index(arm, instance.K)
    return float(instance.models[arm].sample(rng, 1)[0])


def batch_sum(
    model: RewardModel,
    n: int,
    rng: np.random.Generator,
    exact_limit: int = DEFAULT_EXACT_BATCH_LIMIT,
) -> float:
    """Sum of ``n`` i.i.d. rewards.

    Up to ``exact_limit`` draws are simulated one by one; any remainder is
    replaced by a normal variate with the remainder's exact mean and variance
    (exact in distribution for Gaussian arms).
    """
    exact = min(n, exact_limit)
    total = float(model.sample(rng, exact).sum()) if exact else 0.0
    rest = n - exact
    if rest > 0:
        total += float(rng.normal(rest * model.mean, math.sqrt(rest * model.variance)))
    return total


class Algorithm(str, enum.Enum):
    ICQ_SE = "icq-se"
    UNQUANTIZED_SE = "unquantized-se"
    FED_SEL = "fed-sel"
    QUBAN_SE = "quban-se"


@dataclass(frozen=True)
class TrialConfig:
    """Everything a single trial needs besides the bandit instance.

    ``epsilon`` is the QuBan-style grid step; for ICQ-SE on unbounded rewards it
    is the step of the first-round bootstrap quantizer.
    """

    delta: float
    B: int = 3
    alpha: int = 2
    algorithm: Algorithm = Algorithm.ICQ_SE
    epsilon: float = 2.0
    max_rounds: int = 60
    seed: int = 0
    exact_batch_limit: int = DEFAULT_EXACT_BATCH_LIMIT

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not 0.0 < self.delta < 1.0:
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if int(self.B) != self.B or self.B < 1:
            raise ParameterError(f"B must be an integer >= 1, got {self.B}")
        if int(self.alpha) != self.alpha or self.alpha < 2:
            raise ParameterError(f"alpha must be an integer >= 2, got {self.alpha}")
        if not self.epsilon > 0:
            raise ParameterError("epsilon must be positive")
        if self.max_rounds < 1:
            raise ParameterError("max_rounds must be >= 1")
        if self.exact_batch_limit < 1:
            raise ParameterError("exact_batch_limit must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")
        if self.algorithm is Algorithm.ICQ_SE and self.alpha >= 4**self.B:
            warnings.warn(
                f"alpha={self.alpha} >= 2^(2B)={4 ** self.B}: ICQ-SE stays sound but "
                "the U <= 2cU' relation and the sample-complexity bound do not apply",
                ICQWarning,
                stacklevel=3,
            )

    @property
    def label(self) -> str:
        if self.algorithm is Algorithm.ICQ_SE:
            return f"icq-se(B={self.B})"
        if self.algorithm is Algorithm.QUBAN_SE:
            return f"quban-se(eps={self.epsilon:g})"
        return self.algorithm.value


@dataclass
class TrialMetrics:
    """Outcome of one trial.

    ``uplink_bits`` is ``None`` for the unquantized baseline and
    ``recommended`` is ``None`` when the round cap tripped.
    """

    samples: int
    rounds: int
    uplink_bits: Optional[int]
    recommended: Optional[int]
    correct: bool
    inconclusive: bool = False
    best_eliminated: bool = False
    messages: int = 0


@dataclass
class TrialStreams:
    """Independent generators for one trial: per-arm rewards, per-arm agent
    randomness (dithering) and the learner's own draws."""

    rewards: list
    agents: list
    learner: np.random.Generator = field(repr=False)


def trial_streams(seed: int, K: int) -> TrialStreams:
    children = np.random.SeedSequence(int(seed)).spawn(2 * K + 1)
    gens = [np.random.default_rng(c) for c in children]
    return TrialStreams(rewards=gens[:K], agents=gens[K : 2 * K], learner=gens[2 * K])


def derive_seeds(base_seed: int, index: int) -> tuple:
    """(instance_seed, trial_seed) for trial ``index`` of a sweep."""
    words = np.random.SeedSequence([int(base_seed), int(index)]).generate_state(4, dtype=np.uint32)
    inst = int(words[0]) << 32 | int(words[1])
    trial = int(words[2]) << 32 | int(words[3])
    return inst, trial


def check_arm_index(arm: int, K: int) -> None:
    if not 0 <= arm < K:
        raise ParameterError(f"arm {arm} out of range for K={K}")
