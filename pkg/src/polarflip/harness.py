"""Seeded Monte-Carlo campaigns: FER/BER/complexity over an SNR sweep.

Reproducibility contract: frame i at a given master seed always sees the same
payload and noise, no matter how frames are batched or spread over workers.
Each frame derives its own generator from (seed, frame index), and stopping
decisions happen only at batch boundaries, so campaign results are a pure
function of the config.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from polarflip.channel import ChannelParams, transmit
from polarflip.construction import (
    CodeSpec,
    PartitionPlan,
    assemble_frame,
    build_code,
    construct_reliability,
    load_code,
    polar_transform,
)
from polarflip.errors import ContractViolation, PlanningError
from polarflip.flip import _partition_passes, pscf_decode, sc_flip_decode
from polarflip.profiling import cached_profile, select_partition_indices
from polarflip.sc import DecoderWorkspace, sc_decode, sc_oracle_decode

DECODERS = ("sc", "scflip", "pscf", "oracle")

CSV_COLUMNS = [
    "decoder", "N", "K", "C", "P", "tmax", "ebn0_db", "frames", "frame_errors",
    "bit_errors", "fer", "ber", "avg_iterations", "avg_norm_complexity",
    "undetected_errors", "seed",
]

_INT_COLUMNS = {"N", "K", "C", "P", "tmax", "frames", "frame_errors", "bit_errors",
                "undetected_errors", "seed"}
_FLOAT_COLUMNS = {"ebn0_db", "fer", "ber", "avg_iterations", "avg_norm_complexity"}


@dataclass
class SimConfig:
    """Everything a campaign depends on; file paths are resolved at run time."""

    decoder: str
    snr_points: Sequence[float]
    n: int = 10
    K: int = 512
    C: int = 16
    design_snr_db: float = 2.5
    code_file: Optional[str] = None
    t_max: int = 10
    partitions: Optional[int] = None
    plan_file: Optional[str] = None
    auto_plan: bool = False
    plan_profile_snr: Optional[float] = None
    plan_min_failures: int = 1500
    plan_max_frames: int = 1_000_000
    cache_dir: Optional[str] = None
    min_errors: int = 400
    max_frames: int = 10_000_000
    seed: int = 1
    workers: int = 1
    batch_size: int = 4096
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ContractViolation(f"unknown decoder {self.decoder!r}, pick from {DECODERS}")
        if self.min_errors <= 0 or self.max_frames <= 0 or self.batch_size <= 0:
            raise ContractViolation("stopping rule and batch size must be positive")
        if self.workers < 1:
            raise ContractViolation("workers must be >= 1")
        if not self.snr_points:
            raise ContractViolation("need at least one SNR point")
        if self.format not in ("csv", "json"):
            raise ContractViolation(f"unknown output format {self.format!r}")


@dataclass
class SimRecord:
    decoder: str
    N: int
    K: int
    C: int
    P: int
    tmax: int
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    avg_iterations: float
    avg_norm_complexity: float
    undetected_errors: int
    seed: int
    wall_time: float = field(default=0.0, compare=False)


def resolve_code(config: SimConfig) -> CodeSpec:
    """Build or load the CodeSpec a config describes, including its plan."""
    if config.code_file:
        code = load_code(config.code_file)
    else:
        N = 1 << config.n
        rel = construct_reliability(config.n, config.design_snr_db, rate=config.K / N)
        plan = None
        want_p = config.partitions or 1
        if config.plan_file:
            with open(config.plan_file) as fh:
                doc = json.load(fh)
            rho = [int(r) for r in doc.get("rho") or []]
            if not rho:
                raise PlanningError(f"{config.plan_file} holds no partition boundaries")
            plan = PartitionPlan(P=len(rho), rho=tuple(rho),
                                 crc_bits_per_partition=config.C // len(rho))
        elif config.auto_plan and want_p > 1:
            base = build_code(config.n, config.K, config.C, rel,
                              design_snr_db=config.design_snr_db)
            prof_snr = (config.plan_profile_snr if config.plan_profile_snr is not None
                        else config.design_snr_db)
            profile = cached_profile(
                base, prof_snr, config.plan_min_failures, config.plan_max_frames,
                seed=config.seed ^ 0x5EED, workers=config.workers,
                cache_dir=config.cache_dir,
            )
            rho = select_partition_indices(profile, want_p, base.frozen_set)
            plan = PartitionPlan(P=want_p, rho=tuple(rho),
                                 crc_bits_per_partition=config.C // want_p)
        elif want_p > 1:
            raise PlanningError(
                f"partitions={want_p} needs --plan-file or --auto-plan to place boundaries"
            )
        code = build_code(config.n, config.K, config.C, rel, plan,
                          design_snr_db=config.design_snr_db)

    if config.partitions is not None and code.P != config.partitions:
        raise ContractViolation(
            f"requested {config.partitions} partitions but the plan has {code.P}"
        )
    if config.decoder == "scflip" and code.P != 1:
        raise ContractViolation("scflip runs on the monolithic layout; use pscf for P > 1")
    if config.decoder in ("scflip", "pscf") and code.C == 0:
        raise ContractViolation(f"{config.decoder} needs CRC bits, C is 0")
    return code


def _run_frames(code: CodeSpec, decoder: str, t_max: int, ebn0_db: float,
                seed: int, lo: int, hi: int):
    """Decode frames [lo, hi); returns raw tallies. Safe to run in any process."""
    params = ChannelParams(ebn0_db=ebn0_db, rate=code.K / code.N)
    ws = DecoderWorkspace(code.n)
    info = code.info_positions
    n_parts = len(code.partition_ranges())
    errors = bits = undetected = 0
    iters_sum = 0
    visits_sum = 0
    for i in range(lo, hi):
        rng = np.random.default_rng([seed, i])
        payload = rng.integers(0, 2, size=code.K, dtype=np.uint8)
        u = assemble_frame(code, payload)
        y = transmit(polar_transform(u), params, rng)

        if decoder == "sc":
            ws.reset()
            u_hat, _, visits = sc_decode(code, y, ws=ws)
            wrong = not np.array_equal(u_hat, u)
            crc_ok = wrong and code.C > 0 and all(
                _partition_passes(code, j, u_hat) for j in range(n_parts)
            )
            iterations = 1
        elif decoder == "oracle":
            outcome = sc_oracle_decode(code, y, u, ws=ws)
            # one correction comes free; more than one defeats the oracle
            wrong = outcome.error_order >= 2
            crc_ok = False
            u_hat = u  # genie output equals the transmitted frame
            iterations, visits = 1, code.N
        else:
            decode = sc_flip_decode if decoder == "scflip" else pscf_decode
            result = decode(code, y, t_max, ws=ws)
            u_hat = result.u_hat
            wrong = not np.array_equal(u_hat, u)
            crc_ok = result.success and wrong
            iterations, visits = result.iterations, result.leaf_visits

        if wrong:
            errors += 1
            bits += int(np.count_nonzero(u_hat[info] != payload))
            if crc_ok:
                undetected += 1
        iters_sum += iterations
        visits_sum += visits
    return (hi - lo, errors, bits, iters_sum, visits_sum, undetected)


def _sweep_point(code, config: SimConfig, ebn0_db: float, pool) -> SimRecord:
    frames = errors = bits = undetected = 0
    iters_sum = visits_sum = 0
    while frames < config.max_frames:
        take = min(config.batch_size, config.max_frames - frames)
        if pool is None:
            chunks = [_run_frames(code, config.decoder, config.t_max, ebn0_db,
                                  config.seed, frames, frames + take)]
        else:
            step = (take + config.workers - 1) // config.workers
            futs = [
                pool.submit(_run_frames, code, config.decoder, config.t_max, ebn0_db,
                            config.seed, frames + k, min(frames + k + step, frames + take))
                for k in range(0, take, step)
            ]
            chunks = [f.result() for f in futs]
        for f, e, b, it, v, und in chunks:
            frames += f
            errors += e
            bits += b
            iters_sum += it
            visits_sum += v
            undetected += und
        if errors >= config.min_errors:
            break
    return SimRecord(
        decoder=config.decoder,
        N=code.N, K=code.K, C=code.C, P=code.P, tmax=config.t_max,
        ebn0_db=float(ebn0_db),
        frames=frames,
        frame_errors=errors,
        bit_errors=bits,
        fer=errors / frames,
        ber=bits / (frames * code.K) if code.K else 0.0,
        avg_iterations=iters_sum / frames,
        avg_norm_complexity=visits_sum / (frames * code.N),
        undetected_errors=undetected,
        seed=config.seed,
    )


def run_campaign(config: SimConfig):
    """Run every SNR point of a config; returns one SimRecord per point.

    Writes results to config.out when set, in config.format.
    """
    code = resolve_code(config)
    records = []
    pool = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for snr in config.snr_points:
            t0 = time.perf_counter()
            rec = _sweep_point(code, config, float(snr), pool)
            rec.wall_time = time.perf_counter() - t0
            records.append(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    if config.out:
        emit_results(records, config.format, config.out)
    return records


def _sig6(v: float) -> str:
    return f"{v:.6g}"


def _row_values(rec: SimRecord):
    vals = []
    for col in CSV_COLUMNS:
        v = getattr(rec, col)
        vals.append(_sig6(float(v)) if col in _FLOAT_COLUMNS else str(v))
    return vals


def emit_results(records, format: str = "csv", path=None):
    """Serialize records; CSV column order is part of the public schema."""
    if format not in ("csv", "json"):
        raise ContractViolation(f"unknown output format {format!r}")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(_row_values(rec))
        text = buf.getvalue()
    else:
        docs = []
        for rec in records:
            d = {}
            for col in CSV_COLUMNS:
                v = getattr(rec, col)
                d[col] = float(_sig6(float(v))) if col in _FLOAT_COLUMNS else v
            docs.append(d)
        text = json.dumps(docs, indent=1) + "\n"
    if path is None:
        return text
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def load_results(path):
    """Parse a results file (CSV or JSON) back into SimRecords."""
    with open(path) as fh:
        text = fh.read()
    rows = []
    if text.lstrip().startswith("["):
        for doc in json.loads(text):
            rows.append({col: doc[col] for col in CSV_COLUMNS})
    else:
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != CSV_COLUMNS:
            raise ContractViolation(
                f"{path} header {reader.fieldnames} does not match the results schema"
            )
        rows.extend(reader)
    records = []
    for row in rows:
        kw = {}
        for col in CSV_COLUMNS:
            v = row[col]
            if col in _INT_COLUMNS:
                kw[col] = int(v)
            elif col in _FLOAT_COLUMNS:
                kw[col] = float(v)
            else:
                kw[col] = v
        records.append(SimRecord(**kw))
    return records
