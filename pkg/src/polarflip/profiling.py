"""Error-order profiling and partition planning.

A profile answers two questions about a code at one operating point: how
often does plain SC fail because of exactly one bad decision (versus several),
and where in the codeword does that first bad decision land. Partition
boundaries are then quantiles of that first-error distribution, so each
partition owns an equal share of the correctable failures.
"""

from __future__ import annotations

import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from polarflip.channel import ChannelParams, transmit
from polarflip.construction import CodeSpec, code_hash, polar_transform
from polarflip.errors import ContractViolation, InsufficientDataError, PlanningError
from polarflip.sc import DecoderWorkspace, sc_oracle_decode


@dataclass(frozen=True)
class ErrorProfile:
    """Tally of genie-measured failure orders and first-error positions."""

    code_id: str
    ebn0_db: float
    seed: int
    total_frames: int
    total_failures: int
    order_tallies: np.ndarray   # index = error order; entry 0 counts clean frames
    e1_histogram: np.ndarray    # first-error position counts over order-1 frames

    def __post_init__(self):
        tallies = np.asarray(self.order_tallies, dtype=np.int64)
        hist = np.asarray(self.e1_histogram, dtype=np.int64)
        object.__setattr__(self, "order_tallies", tallies)
        object.__setattr__(self, "e1_histogram", hist)
        e1 = int(tallies[1]) if tallies.shape[0] > 1 else 0
        if int(hist.sum()) != e1:
            raise ContractViolation(
                f"e1 histogram mass {int(hist.sum())} != order-1 tally {e1}"
            )
        if int(tallies.sum()) != self.total_frames:
            raise ContractViolation("order tallies do not add up to total frames")
        if int(tallies[1:].sum()) != self.total_failures:
            raise ContractViolation("failure tallies do not add up to total failures")

    @property
    def e1_share(self) -> float:
        """Fraction of failures needing exactly one correction."""
        if self.total_failures == 0:
            return float("nan")
        e1 = int(self.order_tallies[1]) if self.order_tallies.shape[0] > 1 else 0
        return e1 / self.total_failures

    def e1_cdf(self) -> np.ndarray:
        """Normalized cumulative first-error distribution (inclusive, ends at 1)."""
        total = self.e1_histogram.sum()
        if total == 0:
            raise InsufficientDataError("profile holds no order-1 events", 0, 1)
        return np.cumsum(self.e1_histogram) / total


def _profile_chunk(code: CodeSpec, ebn0_db: float, seed: int, lo: int, hi: int):
    N = code.N
    params = ChannelParams(ebn0_db=ebn0_db, rate=code.K / N)
    nonfrozen = np.flatnonzero(code.frozen_mask == 0)
    ws = DecoderWorkspace(code.n)
    tallies = np.zeros(N + 1, dtype=np.int64)
    hist = np.zeros(N, dtype=np.int64)
    u = np.zeros(N, dtype=np.uint8)
    for i in range(lo, hi):
        rng = np.random.default_rng([seed, i])
        # CRC plays no role here: every non-frozen position is random payload
        u[nonfrozen] = rng.integers(0, 2, size=nonfrozen.shape[0], dtype=np.uint8)
        x = polar_transform(u)
        y = transmit(x, params, rng)
        outcome = sc_oracle_decode(code, y, u, ws=ws)
        tallies[outcome.error_order] += 1
        if outcome.error_order == 1:
            hist[outcome.corrections[0]] += 1
    return tallies, hist


def profile_errors(code: CodeSpec, ebn0_db: float, min_failures: int, max_frames: int,
                   seed: int = 0, workers: int = 1, batch_size: int = 4096) -> ErrorProfile:
    """Monte-Carlo error-order profile via genie decoding.

    Runs whole batches until at least min_failures failures accumulate or
    max_frames is hit, whichever comes first; results depend only on the seed
    and the per-frame index, never on batch size or worker count.
    """
    if min_failures <= 0 or max_frames <= 0:
        raise ContractViolation("stopping bounds must be positive")
    N = code.N
    tallies = np.zeros(N + 1, dtype=np.int64)
    hist = np.zeros(N, dtype=np.int64)
    frames = 0

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frames < max_frames:
            take = min(batch_size, max_frames - frames)
            if pool is None:
                t, h = _profile_chunk(code, ebn0_db, seed, frames, frames + take)
                tallies += t
                hist += h
            else:
                step = (take + workers - 1) // workers
                futs = [
                    pool.submit(_profile_chunk, code, ebn0_db, seed,
                                frames + k, min(frames + k + step, frames + take))
                    for k in range(0, take, step)
                ]
                for fut in futs:
                    t, h = fut.result()
                    tallies += t
                    hist += h
            frames += take
            if int(tallies[1:].sum()) >= min_failures:
                break
    finally:
        if pool is not None:
            pool.shutdown()

    failures = int(tallies[1:].sum())
    if failures == 0:
        raise InsufficientDataError(
            f"no decoding failures in {frames} frames at {ebn0_db} dB",
            collected=0, required=min_failures,
        )
    top = int(np.flatnonzero(tallies)[-1])
    return ErrorProfile(
        code_id=code_hash(code),
        ebn0_db=ebn0_db,
        seed=seed,
        total_frames=frames,
        total_failures=failures,
        order_tallies=tallies[: top + 1].copy(),
        e1_histogram=hist,
    )


def select_partition_indices(profile: ErrorProfile, P: int, frozen_set,
                             min_e1_events: int = 1000) -> list:
    """Quantile partition boundaries over the first-error distribution.

    Boundary q is the smallest index m whose left-of-m mass reaches q/P of
    the total, which lands boundaries at the low edge of any zero-mass run.
    """
    if P < 1:
        raise ContractViolation(f"P must be >= 1, got {P}")
    hist = profile.e1_histogram
    N = hist.shape[0]
    frozen_idx = np.fromiter((int(i) for i in frozen_set), dtype=np.int64) \
        if frozen_set else np.array([], dtype=np.int64)
    if frozen_idx.size and hist[frozen_idx].any():
        bad = int(frozen_idx[np.flatnonzero(hist[frozen_idx])[0]])
        raise PlanningError(f"profile has first-error mass at frozen index {bad}")
    total = int(hist.sum())
    if total < min_e1_events:
        raise InsufficientDataError(
            f"only {total} order-1 events collected, need {min_e1_events} to plan",
            collected=total, required=min_e1_events,
        )
    if P == 1:
        return [N]

    csum = np.concatenate(([0], np.cumsum(hist, dtype=np.int64)))  # csum[m] = mass left of m
    rho = []
    prev = 0
    for q in range(1, P):
        m = int(np.searchsorted(csum * P, q * total, side="left"))
        if m <= prev:
            m = prev + 1
            warnings.warn(
                f"quantile {q}/{P} collides with the previous boundary; advancing to {m}",
                stacklevel=2,
            )
        if m > N - (P - q):
            raise PlanningError(
                f"profile too degenerate to place boundary {q} of {P} below index {N}"
            )
        rho.append(m)
        prev = m
    rho.append(N)
    return rho


@dataclass(frozen=True)
class PartitionSuccessModel:
    """Pr(exactly i errors fall in partition j), rows = partitions."""

    probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "probabilities", np.atleast_2d(np.asarray(self.probabilities, dtype=np.float64))
        )


def predict_pscf_success(model: PartitionSuccessModel) -> float:
    """Probability that a failed SC frame is correctable partition-by-partition.

    Assumes partitions fail independently and that one error per partition is
    fixable; the no-error-anywhere term is removed since that frame never
    failed in the first place.
    """
    p = model.probabilities
    sums = p.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        bad = int(np.flatnonzero(np.abs(sums - 1.0) > 1e-9)[0])
        raise ContractViolation(
            f"partition {bad} probabilities sum to {sums[bad]:.12g}, expected 1"
        )
    p0 = p[:, 0]
    p1 = p[:, 1] if p.shape[1] > 1 else np.zeros_like(p0)
    return float(np.prod(p0 + p1) - np.prod(p0))


def save_profile(profile: ErrorProfile, path) -> None:
    doc = {
        "code_hash": profile.code_id,
        "ebn0_db": profile.ebn0_db,
        "seed": profile.seed,
        "frames": profile.total_frames,
        "failures": profile.total_failures,
        "order_tallies": [int(v) for v in profile.order_tallies],
        "e1_histogram": [int(v) for v in profile.e1_histogram],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_profile(path) -> ErrorProfile:
    with open(path) as fh:
        doc = json.load(fh)
    return ErrorProfile(
        code_id=doc["code_hash"],
        ebn0_db=float(doc["ebn0_db"]),
        seed=int(doc["seed"]),
        total_frames=int(doc["frames"]),
        total_failures=int(doc["failures"]),
        order_tallies=np.asarray(doc["order_tallies"], dtype=np.int64),
        e1_histogram=np.asarray(doc["e1_histogram"], dtype=np.int64),
    )


def cached_profile(code: CodeSpec, ebn0_db: float, min_failures: int, max_frames: int,
                   seed: int = 0, workers: int = 1,
                   cache_dir: Optional[str] = None) -> ErrorProfile:
    """profile_errors with a transparent on-disk cache.

    The cache key covers everything the result depends on, so a hit is
    byte-identical to recomputing.
    """
    if cache_dir is None:
        return profile_errors(code, ebn0_db, min_failures, max_frames, seed, workers)
    key = f"{code_hash(code)}_snr{ebn0_db:g}_seed{seed}_f{min_failures}_m{max_frames}.json"
    path = os.path.join(cache_dir, key)
    if os.path.exists(path):
        return load_profile(path)
    profile = profile_errors(code, ebn0_db, min_failures, max_frames, seed, workers)
    os.makedirs(cache_dir, exist_ok=True)
    save_profile(profile, path)
    return profile
