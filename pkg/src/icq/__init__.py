"""Best-arm identification with quantized uplinks: ICQ-SE and baselines."""

from .algorithms import (
    AgentState,
    LearnerState,
    RoundRecord,
    Trajectory,
    bootstrap_unbounded,
    eliminate,
    run_fed_sel,
    run_icq_se,
    run_quban_se,
    run_se_unquantized,
    run_trial,
)
from .confidence import ArmBelief, ConfidenceState, lcb_ucb, quant_interval, u_next, u_prime, u_unrolled
from .core import (
    Algorithm,
    BanditInstance,
    BoundedBeta,
    Gaussian,
    ICQWarning,
    InstanceKind,
    TrialConfig,
    TrialMetrics,
    derive_seeds,
    gaps,
    make_instance,
    sample_reward,
)
from .errors import (
    DomainError,
    EncodingError,
    ICQError,
    ParameterError,
    ProtocolError,
    ScheduleError,
    SearchExhaustedError,
    TrialError,
)
from .harness import SweepResult, SweepSpec, XAxis, read_csv, run_sweep, write_csv
from .protocol import UplinkMessage, account_bits, pack, read_log, schedule_b, schedule_t, unpack, write_log
from .quantizer import Interval, dec, enc, error_bound
from .theory import BoundReport, c_constant, delta_max, lambert_w_minus1, sample_bound, t_j_oracle

__version__ = "0.1.0"
