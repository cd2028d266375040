"""Command line entry point: ``icq <subcommand> [options]``.

Every option can also come from a JSON object passed with ``--config``; keys
are option names with dashes written as underscores (``{"trials": 500,
"max_rounds": 40}``). Flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import replace

from . import harness
from .algorithms import run_trial
from .core import Algorithm, ICQWarning, InstanceKind, TrialConfig, derive_seeds, gaps, make_instance
from .errors import ICQError
from .protocol import account_bits, write_log
from .theory import LOG_FORMS, sample_bound


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--trials", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0, help="base seed of the sweep")
    p.add_argument("--K", type=int, default=5, help="number of arms")
    p.add_argument("--max-rounds", type=int, default=60)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (joblib)")
    p.add_argument("--out", help="CSV path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icq", description="Best-arm identification over bit-limited uplinks.")
    sub = parser.add_subparsers(dest="command", required=True)
    families = [k.value for k in InstanceKind]

    p = sub.add_parser("run", help="one algorithm at one delta")
    _common(p)
    p.add_argument("--family", choices=families, default="beta")
    p.add_argument("--algo", choices=[a.value for a in Algorithm], default="icq-se")
    p.add_argument("--B", type=int, default=3)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--eps", type=float, default=2.0, help="grid step of the per-sample quantizer")
    p.add_argument("--gap", type=float, default=0.5, help="gap of the hardness family")
    p.add_argument("--dump-wire", metavar="PATH", help="write the uplink log of trial 0 to PATH")

    p = sub.add_parser("sweep-delta", help="all algorithms over the log(1/delta) grid")
    _common(p)
    p.add_argument("--family", choices=families, default="beta")
    p.add_argument("--alpha", type=int, default=2)

    p = sub.add_parser("sweep-hardness", help="all algorithms over the gap grid")
    _common(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--alpha", type=int, default=2)

    p = sub.add_parser("sweep-alpha", help="ICQ-SE over alpha = 2..9")
    _common(p)
    p.add_argument("--family", choices=families, default="beta")
    p.add_argument("--B", type=int, default=1)
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("sweep-bits", help="ICQ-SE over B = 1..9")
    _common(p)
    p.add_argument("--family", choices=families, default="beta")
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("bounds", help="evaluate the closed-form complexity bounds")
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--gaps", type=float, nargs="+", help="every arm's gap, best arm's 0 included")
    p.add_argument("--family", choices=families, help="draw the gaps from this family instead")
    p.add_argument("--seed", type=int, default=0, help="instance seed when --family is used")
    p.add_argument("--gap", type=float, default=0.5, help="gap of the hardness family")
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--sigma", type=float, help="sub-Gaussian scale (default: the family's)")
    p.add_argument("--span", type=float, default=1.0, help="reward range b - a")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--B", type=int, default=3)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--log-form", choices=LOG_FORMS, default="printed")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    parser.set_defaults(_subparsers=sub.choices)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    with open(args.config) as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        parser.error("--config must hold a JSON object")
    known = vars(args)
    unknown = sorted(k for k in values if k not in known or k in ("command", "config", "_subparsers"))
    if unknown:
        parser.error(f"unknown config keys: {', '.join(unknown)}")
    # re-parse so explicit flags override the file
    args._subparsers[args.command].set_defaults(**values)
    return parser.parse_args(argv)


def _emit(results, out) -> None:
    harness.write_csv(results, out if out else sys.stdout)


def _cmd_run(args) -> None:
    config = TrialConfig(
        delta=args.delta,
        B=args.B,
        alpha=args.alpha,
        algorithm=args.algo,
        epsilon=args.eps,
        max_rounds=args.max_rounds,
    )
    gap = args.gap if InstanceKind(args.family) is InstanceKind.GAUSSIAN_HARDNESS else None
    spec = harness.SweepSpec(
        args.family, harness.XAxis.LOG_INV_DELTA, (-math.log(args.delta),), (config,), args.trials, args.seed, args.K, gap
    )
    _emit(harness.run_sweep(spec, n_jobs=args.jobs), args.out)
    if args.dump_wire:
        inst_seed, trial_seed = derive_seeds(args.seed, 0)
        inst = make_instance(args.family, args.K, inst_seed, gap)
        metrics, traj = run_trial(inst, replace(config, seed=trial_seed), log_messages=True)
        with open(args.dump_wire, "wb") as fh:
            write_log(traj.messages, fh)
        print(
            f"wrote {len(traj.messages)} frames, {account_bits(traj.messages)} payload bits to {args.dump_wire}",
            file=sys.stderr,
        )


def _cmd_sweep(args) -> None:
    if args.command == "sweep-delta":
        algos = harness.comparison_algorithms(
            bounded=InstanceKind(args.family) is InstanceKind.BETA_RANDOM, alpha=args.alpha
        )
        spec = harness.delta_sweep(args.family, args.trials, args.seed, algorithms=algos)
    elif args.command == "sweep-hardness":
        algos = harness.comparison_algorithms(bounded=False, B_values=(3,), alpha=args.alpha)
        spec = harness.hardness_sweep(args.delta, args.trials, args.seed, algorithms=algos)
    elif args.command == "sweep-alpha":
        spec = harness.alpha_sweep(args.B, args.delta, args.family, args.trials, args.seed)
    else:
        spec = harness.bits_sweep(args.alpha, args.delta, args.family, args.trials, args.seed)
    spec = replace(spec, K=args.K, algorithms=tuple(replace(a, max_rounds=args.max_rounds) for a in spec.algorithms))
    _emit(harness.run_sweep(spec, n_jobs=args.jobs), args.out)


def _cmd_bounds(args) -> None:
    sigma = args.sigma
    if args.gaps:
        g = args.gaps
        K = len(g)
    elif args.family:
        inst = make_instance(args.family, args.K, args.seed, args.gap)
        g, K = gaps(inst), inst.K
        sigma = sigma if sigma is not None else inst.sigma_cb
    else:
        raise SystemExit("bounds: give --gaps or --family")
    if sigma is None:
        sigma = 0.5
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ICQWarning)
        rep = sample_bound(g, sigma, K, args.delta, args.B, args.alpha, span=args.span, log_form=args.log_form)
    rows = [
        ("c", rep.c),
        ("sample_bound", rep.sample_bound),
        ("unquantized_bound", rep.unquantized_bound),
        ("round_bound", rep.round_bound),
        ("bit_bound", rep.bit_bound),
        ("delta_ok", rep.delta_ok),
        ("per_arm_terms", " ".join(f"{x:.6g}" for x in rep.per_arm_terms)),
        ("per_arm_Tj", " ".join(str(x) for x in rep.per_arm_Tj)),
    ]
    if args.format == "csv":
        print("quantity,value")
        for k, v in rows:
            print(f"{k},{v!r}" if isinstance(v, float) else f"{k},{v}")
    else:
        width = max(len(k) for k, _ in rows)
        for k, v in rows:
            print(f"{k:<{width}}  {v:.6g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, sys.argv[1:] if argv is None else list(argv))
    try:
        if args.command == "run":
            _cmd_run(args)
        elif args.command == "bounds":
            _cmd_bounds(args)
        else:
            _cmd_sweep(args)
    except (ICQError, OSError) as exc:
        print(f"icq: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
