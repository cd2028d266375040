"""Monte Carlo sweeps over delta, gap, alpha or B, and their CSV files.

Trial ``k`` of a sweep draws its instance and its reward streams from seeds
that depend only on ``(base_seed, k)``, so every algorithm and every x value
sees the same instances and the same reward sequences.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .algorithms import run_trial
from .core import Algorithm, InstanceKind, TrialConfig, derive_seeds, make_instance
from .errors import ICQError, ParameterError, TrialError

# abscissae of the delta sweeps: log(1/delta) at ten points
LOG_INV_DELTA_GRID = (
    2.99573227355399,
    4.60517018598809,
    5.29831736654804,
    6.90775527898214,
    7.60090245954208,
    9.21034037197618,
    9.90348755253613,
    11.5129254649702,
    12.2060726455302,
    13.8155105579643,
)
GAP_GRID = tuple(float(x) for x in np.linspace(0.1, 1.0, 20))
ALPHA_GRID = tuple(range(2, 10))
B_GRID = tuple(range(1, 10))

CSV_COLUMNS = (
    "family",
    "algorithm",
    "x_name",
    "x",
    "n_trials",
    "mean_samples",
    "mean_rounds",
    "mean_bits",
    "error_rate",
    "inconclusive_rate",
)


class XAxis(str, enum.Enum):
    LOG_INV_DELTA = "log_inv_delta"
    GAP = "gap"
    ALPHA = "alpha"
    B = "B"


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a family, an x axis and the algorithms to compare.

    ``algorithms`` are :class:`TrialConfig` templates; the x value overrides
    the matching field (or the instance gap for the ``gap`` axis, which is
    the gap of the hardness family). ``gap`` is the hardness gap when it is not
    the swept quantity.
    """

    family: InstanceKind
    x_axis: XAxis
    x_values: tuple
    algorithms: tuple
    n_trials: int = 4000
    base_seed: int = 0
    K: int = 5
    gap: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "family", InstanceKind(self.family))
        object.__setattr__(self, "x_axis", XAxis(self.x_axis))
        object.__setattr__(self, "x_values", tuple(self.x_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.n_trials < 1:
            raise ParameterError("n_trials must be >= 1")
        if not self.x_values:
            raise ParameterError("x_values must be nonempty")
        if list(self.x_values) != sorted(self.x_values):
            raise ParameterError("x_values must be sorted")
        if not self.algorithms:
            raise ParameterError("at least one algorithm is needed")
        if self.x_axis is XAxis.GAP and self.family is not InstanceKind.GAUSSIAN_HARDNESS:
            raise ParameterError("the gap axis only applies to the hardness family")
        if self.family is InstanceKind.GAUSSIAN_HARDNESS and self.x_axis is not XAxis.GAP and self.gap is None:
            raise ParameterError("the hardness family needs a gap")


@dataclass
class SweepResult:
    family: str
    algorithm: str
    x_name: str
    x: float
    n_trials: int
    mean_samples: float
    mean_rounds: float
    mean_bits: float
    error_rate: float
    inconclusive_rate: float
    # not part of the CSV
    best_eliminated_rate: float = field(default=math.nan, compare=False)


def _point_config(template: TrialConfig, x_axis: XAxis, x) -> TrialConfig:
    if x_axis is XAxis.LOG_INV_DELTA:
        return replace(template, delta=math.exp(-x))
    if x_axis is XAxis.ALPHA:
        return replace(template, alpha=int(x))
    if x_axis is XAxis.B:
        return replace(template, B=int(x))
    return template


def _label(template: TrialConfig, x_axis: XAxis) -> str:
    if x_axis is XAxis.B and template.algorithm is Algorithm.ICQ_SE:
        return Algorithm.ICQ_SE.value
    return template.label


def _run_point(spec: SweepSpec, config: TrialConfig, x, label: str, trials: Sequence[int]) -> list:
    gap = float(x) if spec.x_axis is XAxis.GAP else spec.gap
    out = []
    for k in trials:
        inst_seed, trial_seed = derive_seeds(spec.base_seed, k)
        try:
            inst = make_instance(spec.family, spec.K, inst_seed, gap)
            metrics, _ = run_trial(inst, replace(config, seed=trial_seed))
        except ICQError as exc:
            raise TrialError(
                f"trial failed at {spec.x_axis.value}={x}, algorithm={label}, trial={k}, seed={trial_seed}: {exc}"
            ) from exc
        out.append(metrics)
    return out


def aggregate(spec: SweepSpec, label: str, x, metrics: list) -> SweepResult:
    n = len(metrics)
    done = [m for m in metrics if not m.inconclusive]

    def mean(values):
        return float(np.mean(values)) if values else math.nan

    bits = [m.uplink_bits for m in done if m.uplink_bits is not None]
    return SweepResult(
        family=spec.family.value,
        algorithm=label,
        x_name=spec.x_axis.value,
        x=float(x),
        n_trials=n,
        mean_samples=mean([m.samples for m in done]),
        mean_rounds=mean([m.rounds for m in done]),
        mean_bits=mean(bits) if len(bits) == len(done) else math.nan,
        error_rate=sum(not m.correct for m in done) / n,
        inconclusive_rate=(n - len(done)) / n,
        best_eliminated_rate=sum(m.best_eliminated for m in metrics) / n,
    )


def run_sweep(spec: SweepSpec, n_jobs: int = 1, keep_trials: bool = False):
    """Run every (x, algorithm) point; returns a list of :class:`SweepResult`.

    With ``keep_trials`` the per-trial metrics come back too, as a dict keyed
    by ``(x, label)``. ``n_jobs > 1`` splits the trials of each point across
    processes; aggregation is by trial index, so results do not depend on it.
    """
    results, per_trial = [], {}
    for x in spec.x_values:
        for template in spec.algorithms:
            config = _point_config(template, spec.x_axis, x)
            label = _label(template, spec.x_axis)
            metrics = _run_trials(spec, config, x, label, n_jobs)
            results.append(aggregate(spec, label, x, metrics))
            if keep_trials:
                per_trial[(x, label)] = metrics
    return (results, per_trial) if keep_trials else results


def _run_trials(spec: SweepSpec, config: TrialConfig, x, label: str, n_jobs: int) -> list:
    indices = range(spec.n_trials)
    if n_jobs == 1 or spec.n_trials < 2:
        return _run_point(spec, config, x, label, indices)
    from joblib import Parallel, delayed

    chunks = [c.tolist() for c in np.array_split(np.arange(spec.n_trials), 4 * abs(n_jobs)) if len(c)]
    parts = Parallel(n_jobs=n_jobs)(delayed(_run_point)(spec, config, x, label, c) for c in chunks)
    return [m for part in parts for m in part]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(results: Iterable[SweepResult], path) -> None:
    """Write one row per result; ``path`` may also be an open text stream."""
    if hasattr(path, "write"):
        _write_rows(results, path)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(results, fh)


def _write_rows(results, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])


def read_csv(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                SweepResult(
                    family=row["family"],
                    algorithm=row["algorithm"],
                    x_name=row["x_name"],
                    x=float(row["x"]),
                    n_trials=int(row["n_trials"]),
                    mean_samples=float(row["mean_samples"]),
                    mean_rounds=float(row["mean_rounds"]),
                    mean_bits=float(row["mean_bits"]),
                    error_rate=float(row["error_rate"]),
                    inconclusive_rate=float(row["inconclusive_rate"]),
                )
            )
    return out


# -- the sweeps of the experiments -------------------------------------------


def comparison_algorithms(bounded: bool, B_values=(2, 3), epsilons=(0.5, 2.0), alpha: int = 2) -> tuple:
    """Unquantized SE, QuBan-style, ICQ-SE and (bounded only) Fed-SEL templates."""
    algos = [TrialConfig(delta=0.1, alpha=alpha, algorithm=Algorithm.UNQUANTIZED_SE)]
    algos += [TrialConfig(delta=0.1, alpha=alpha, algorithm=Algorithm.QUBAN_SE, epsilon=e) for e in epsilons]
    algos += [TrialConfig(delta=0.1, alpha=alpha, B=b, algorithm=Algorithm.ICQ_SE) for b in B_values]
    if bounded:
        algos.append(TrialConfig(delta=0.1, alpha=alpha, algorithm=Algorithm.FED_SEL))
    return tuple(algos)


def delta_sweep(family="beta", n_trials=4000, base_seed=0, x_values=LOG_INV_DELTA_GRID, algorithms=None) -> SweepSpec:
    family = InstanceKind(family)
    if algorithms is None:
        algorithms = comparison_algorithms(bounded=family is InstanceKind.BETA_RANDOM)
    gap = 0.5 if family is InstanceKind.GAUSSIAN_HARDNESS else None
    return SweepSpec(family, XAxis.LOG_INV_DELTA, x_values, algorithms, n_trials, base_seed, gap=gap)


def hardness_sweep(delta=0.1, n_trials=4000, base_seed=0, x_values=GAP_GRID, algorithms=None) -> SweepSpec:
    if algorithms is None:
        algorithms = comparison_algorithms(bounded=False, B_values=(3,))
    algorithms = tuple(replace(a, delta=delta) for a in algorithms)
    return SweepSpec(InstanceKind.GAUSSIAN_HARDNESS, XAxis.GAP, x_values, algorithms, n_trials, base_seed)


def alpha_sweep(B=1, delta=0.05, family="beta", n_trials=4000, base_seed=0, x_values=ALPHA_GRID) -> SweepSpec:
    template = TrialConfig(delta=delta, B=B, alpha=2)
    gap = 0.5 if InstanceKind(family) is InstanceKind.GAUSSIAN_HARDNESS else None
    return SweepSpec(family, XAxis.ALPHA, x_values, (template,), n_trials, base_seed, gap=gap)


def bits_sweep(alpha=2, delta=0.05, family="beta", n_trials=4000, base_seed=0, x_values=B_GRID) -> SweepSpec:
    template = TrialConfig(delta=delta, B=max(1, min(x_values)), alpha=alpha)
    gap = 0.5 if InstanceKind(family) is InstanceKind.GAUSSIAN_HARDNESS else None
    return SweepSpec(family, XAxis.B, x_values, (template,), n_trials, base_seed, gap=gap)
