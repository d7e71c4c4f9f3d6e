"""Command line front end.

Subcommands: simulate (Monte-Carlo campaigns), profile (error-order
collection), plan (partition boundary selection), code (layout export),
report (figures from results/profiles). Every flag can also be supplied via
an environment variable POLARFLIP_<FLAG> (dashes as underscores); explicit
flags win over the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from polarflip.construction import (
    PartitionPlan,
    build_code,
    construct_reliability,
    load_code,
    save_code,
)
from polarflip.errors import ContractViolation, InsufficientDataError, PlanningError
from polarflip.harness import DECODERS, SimConfig, run_campaign
from polarflip.profiling import cached_profile, save_profile, select_partition_indices

ENV_PREFIX = "POLARFLIP_"


def _env(name: str, cast, default):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    if cast is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return cast(raw)


def _opt(args, name: str, cast, default):
    """Explicit flag > environment > built-in default."""
    v = getattr(args, name.replace("-", "_"))
    return v if v is not None else _env(name, cast, default)


def _snr_points(start: float, stop: float, step: float):
    if step <= 0:
        raise ContractViolation(f"snr step must be positive, got {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise ContractViolation(f"empty SNR sweep from {start} to {stop}")
    return [round(start + k * step, 6) for k in range(count)]


def _add_code_args(p):
    p.add_argument("--code-file", help="JSON layout to load instead of constructing")
    p.add_argument("--n", type=int, help="log2 block length (default 10)")
    p.add_argument("--k", type=int, help="payload bits (default 512)")
    p.add_argument("--crc", type=int, help="total CRC bits (default 16)")
    p.add_argument("--design-snr", type=float, help="construction Eb/N0 in dB (default 2.5)")


def _add_sim_args(p):
    _add_code_args(p)
    p.add_argument("--decoder", choices=DECODERS, required=True)
    p.add_argument("--tmax", type=int, help="flip attempts per CRC failure (default 10)")
    p.add_argument("--partitions", type=int, help="expected partition count")
    p.add_argument("--plan-file", help="JSON with partition boundaries (rho)")
    p.add_argument("--auto-plan", action="store_const", const=True, default=None,
                   help="derive partition boundaries by profiling first")
    p.add_argument("--plan-snr", type=float, help="profiling SNR for --auto-plan")
    p.add_argument("--snr-start", type=float, required=True)
    p.add_argument("--snr-stop", type=float)
    p.add_argument("--snr-step", type=float)
    p.add_argument("--min-errors", type=int, help="stop a point after this many frame errors")
    p.add_argument("--max-frames", type=int, help="hard frame cap per point")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--cache-dir", help="profile cache directory for --auto-plan")
    p.add_argument("--out", help="results file (default results.csv)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--figures", help="also render figures into this directory")


def _sim_config(args) -> SimConfig:
    start = args.snr_start
    stop = _opt(args, "snr-stop", float, start)
    step = _opt(args, "snr-step", float, 0.5)
    return SimConfig(
        decoder=args.decoder,
        snr_points=_snr_points(start, stop, step),
        n=_opt(args, "n", int, 10),
        K=_opt(args, "k", int, 512),
        C=_opt(args, "crc", int, 16),
        design_snr_db=_opt(args, "design-snr", float, 2.5),
        code_file=_opt(args, "code-file", str, None),
        t_max=_opt(args, "tmax", int, 10),
        partitions=_opt(args, "partitions", int, None),
        plan_file=_opt(args, "plan-file", str, None),
        auto_plan=bool(_opt(args, "auto-plan", bool, False)),
        plan_profile_snr=_opt(args, "plan-snr", float, None),
        cache_dir=_opt(args, "cache-dir", str, None),
        min_errors=_opt(args, "min-errors", int, 400),
        max_frames=_opt(args, "max-frames", int, 10_000_000),
        seed=_opt(args, "seed", int, 1),
        workers=_opt(args, "workers", int, 1),
        batch_size=_opt(args, "batch-size", int, 4096),
        out=_opt(args, "out", str, "results.csv"),
        format=_opt(args, "format", str, "csv"),
    )


def _cmd_simulate(args) -> int:
    config = _sim_config(args)
    records = run_campaign(config)
    for rec in records:
        print(f"{rec.decoder} @ {rec.ebn0_db:g} dB: fer={rec.fer:.3e} "
              f"ber={rec.ber:.3e} frames={rec.frames} iters={rec.avg_iterations:.3f} "
              f"complexity={rec.avg_norm_complexity:.3f} [{rec.wall_time:.1f}s]")
    print(f"results written to {config.out}")
    figures_dir = _opt(args, "figures", str, None)
    if figures_dir:
        from polarflip.report import render_report

        for path in render_report(config.out, out_dir=figures_dir,
                                  kinds=("fer", "complexity")):
            print(f"figure written to {path}")
    return 0


def _resolve_cli_code(args):
    code_file = _opt(args, "code-file", str, None)
    if code_file:
        return load_code(code_file)
    n = _opt(args, "n", int, 10)
    K = _opt(args, "k", int, 512)
    C = _opt(args, "crc", int, 16)
    snr = _opt(args, "design-snr", float, 2.5)
    rel = construct_reliability(n, snr, rate=K / (1 << n))
    return build_code(n, K, C, rel, design_snr_db=snr)


def _cmd_profile(args) -> int:
    code = _resolve_cli_code(args)
    profile = cached_profile(
        code,
        ebn0_db=args.snr,
        min_failures=_opt(args, "min-failures", int, 2000),
        max_frames=_opt(args, "max-frames", int, 2_000_000),
        seed=_opt(args, "seed", int, 1),
        workers=_opt(args, "workers", int, 1),
        cache_dir=_opt(args, "cache-dir", str, None),
    )
    out = _opt(args, "out", str, "profile.json")
    save_profile(profile, out)
    print(f"{profile.total_failures} failures over {profile.total_frames} frames; "
          f"single-error share {profile.e1_share:.3f}")
    print(f"profile written to {out}")
    return 0


def _cmd_plan(args) -> int:
    from polarflip.profiling import load_profile

    code = _resolve_cli_code(args)
    profile = load_profile(args.profile)
    P = args.partitions
    rho = select_partition_indices(profile, P, code.frozen_set)
    plan = PartitionPlan(P=P, rho=tuple(rho), crc_bits_per_partition=code.C // P)
    rel = code.reliability
    if rel is None:
        # layouts loaded from disk carry no ordering; rebuild it
        rel = construct_reliability(code.n, code.design_snr_db, rate=code.K / code.N)
    planned = build_code(code.n, code.K, code.C, rel, plan,
                         design_snr_db=code.design_snr_db)
    out = _opt(args, "out", str, "plan.json")
    save_code(planned, out)
    print(f"boundaries {rho} written to {out}")
    return 0


def _cmd_code(args) -> int:
    code = _resolve_cli_code(args)
    out = _opt(args, "out", str, "code.json")
    save_code(code, out)
    print(f"layout written to {out}")
    return 0


def _cmd_report(args) -> int:
    from polarflip.report import FIGURE_KINDS, render_report

    kinds = tuple(args.kinds.split(",")) if args.kinds else FIGURE_KINDS
    written = render_report(
        results_path=getattr(args, "in"),
        profile_paths=args.profile or (),
        out_dir=_opt(args, "out-dir", str, "figures"),
        kinds=kinds,
    )
    if not written:
        print("nothing to render: no input matched the requested kinds", file=sys.stderr)
        return 2
    for path in written:
        print(f"figure written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarflip",
        description="Polar code simulation toolkit: SC, SC-Flip and partitioned flip decoding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Monte-Carlo campaign over an SNR sweep")
    _add_sim_args(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("profile", help="collect an error-order profile by genie decoding")
    _add_code_args(p)
    p.add_argument("--snr", type=float, required=True, help="profiling Eb/N0 in dB")
    p.add_argument("--min-failures", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("plan", help="derive partition boundaries from a profile")
    _add_code_args(p)
    p.add_argument("--profile", required=True, help="profile JSON from the profile command")
    p.add_argument("--partitions", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("code", help="construct a code layout and save it as JSON")
    _add_code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_code)

    p = sub.add_parser("report", help="render figures from results and profiles")
    p.add_argument("--in", dest="in", help="results CSV/JSON from simulate")
    p.add_argument("--profile", action="append", help="profile JSON (repeatable)")
    p.add_argument("--out-dir")
    p.add_argument("--kinds", help="comma separated subset of fer,order_dist,e1_cdf,complexity")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ContractViolation, PlanningError, InsufficientDataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
