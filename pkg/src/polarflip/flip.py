"""CRC-aided flip decoding: monolithic SC-Flip and its partitioned variant.

Both decoders run plain SC first and only spend extra work when a CRC fails.
The candidate list for re-decoding is drawn once from the failing pass: the
least reliable hard decisions, judged by |leaf LLR|. A re-decode restarts at
the flipped index instead of from scratch, so its cost is only the tail of
the codeword (or of the partition), which is what leaf_visits measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from polarflip.construction import CodeSpec
from polarflip.crc import crc_check
from polarflip.errors import ContractViolation
from polarflip.sc import DecoderWorkspace, sc_decode


@dataclass(frozen=True)
class FlipCandidateSet:
    """(leaf index, |LLR|) pairs, weakest decision first; ties go to the lower index."""

    entries: tuple


@dataclass(frozen=True)
class FlipResult:
    u_hat: np.ndarray
    success: bool
    iterations: int            # SC passes: the initial one plus one per flip attempt
    leaf_visits: int           # leaves decided while the decoder was still trying
    terminated_early: bool = False
    failed_partition: Optional[int] = None
    completion_visits: int = 0  # leaves decided only to fill u_hat after giving up


def count_complexity(result: FlipResult, N: int) -> float:
    """Decoding work normalized so that one clean SC pass costs exactly 1.0."""
    if N <= 0:
        raise ContractViolation(f"N must be positive, got {N}")
    return result.leaf_visits / N


def build_candidates(code: CodeSpec, leaf_llr, t_max: int, partition: int = 0,
                     include_crc_bits: bool = True) -> FlipCandidateSet:
    """Rank a partition's non-frozen decisions by reliability, keep the weakest t_max."""
    lo, hi = code.partition_ranges()[partition]
    pool = np.flatnonzero(code.frozen_mask[lo:hi] == 0) + lo
    if not include_crc_bits and code.C > 0:
        pool = np.setdiff1d(pool, code.crc_positions[partition], assume_unique=True)
    mags = np.abs(np.asarray(leaf_llr)[pool])
    order = np.argsort(mags, kind="stable")[: max(t_max, 0)]
    return FlipCandidateSet(
        entries=tuple((int(pool[k]), float(mags[k])) for k in order)
    )


def _partition_passes(code: CodeSpec, j: int, u_hat) -> bool:
    payload = u_hat[code.info_in_partition(j)]
    remainder = u_hat[code.crc_positions[j]]
    return crc_check(code.crc_configs[j], payload, remainder)


def _require_crc(code: CodeSpec, t_max: int) -> None:
    if code.C <= 0 or not code.crc_configs:
        raise ContractViolation("flip decoding needs a CRC; this code has none")
    if t_max < 0:
        raise ContractViolation(f"t_max must be >= 0, got {t_max}")


def sc_flip_decode(code: CodeSpec, y, t_max: int,
                   ws: Optional[DecoderWorkspace] = None,
                   include_crc_candidates: bool = True) -> FlipResult:
    """SC with up to t_max single-bit flip retries, validated by the frame CRC.

    Wants the monolithic layout (one partition). When every retry fails the
    returned decisions are the unflipped first-pass ones.
    """
    if code.P != 1:
        raise ContractViolation("sc_flip_decode expects a monolithic (P=1) layout")
    _require_crc(code, t_max)
    if ws is None:
        ws = DecoderWorkspace(code.n)
    ws.reset()

    sc_decode(code, y, ws=ws)
    iterations = 1
    if _partition_passes(code, 0, ws.u_hat):
        return FlipResult(ws.u_hat.copy(), True, iterations, ws.leaf_visits)

    cand = build_candidates(code, ws.leaf_llr, t_max, 0, include_crc_candidates)
    original = ws.u_hat.copy()
    for f, _mag in cand.entries:
        # each attempt is equivalent to a fresh pass with a single flip at f;
        # decisions before f must therefore match the first pass
        ws.u_hat[:f] = original[:f]
        sc_decode(code, y, forced_flips=(f,), start_index=f, ws=ws)
        iterations += 1
        if _partition_passes(code, 0, ws.u_hat):
            return FlipResult(ws.u_hat.copy(), True, iterations, ws.leaf_visits)

    ws.u_hat[:] = original
    return FlipResult(ws.u_hat.copy(), False, iterations, ws.leaf_visits)


def pscf_decode(code: CodeSpec, y, t_max: int,
                ws: Optional[DecoderWorkspace] = None,
                include_crc_candidates: bool = True) -> FlipResult:
    """Partitioned flip decoding with per-partition CRCs and early termination.

    Partitions decode in order; a partition that fails its CRC gets up to
    t_max flip retries confined to its own index range. If it still fails,
    decoding stops there (later partitions are SC-filled once so u_hat is
    complete, but that work is tracked separately from the decoder's own).
    """
    _require_crc(code, t_max)
    if ws is None:
        ws = DecoderWorkspace(code.n)
    ws.reset()

    iterations = 1
    completion_visits = 0
    terminated = False
    failed_partition = None

    for j, (lo, hi) in enumerate(code.partition_ranges()):
        sc_decode(code, y, start_index=lo, end_index=hi, ws=ws)
        if _partition_passes(code, j, ws.u_hat):
            continue

        cand = build_candidates(code, ws.leaf_llr, t_max, j, include_crc_candidates)
        original = ws.u_hat[lo:hi].copy()
        recovered = False
        for f, _mag in cand.entries:
            ws.u_hat[lo:f] = original[: f - lo]
            sc_decode(code, y, forced_flips=(f,), start_index=f, end_index=hi, ws=ws)
            iterations += 1
            if _partition_passes(code, j, ws.u_hat):
                recovered = True
                break
        if recovered:
            continue

        ws.u_hat[lo:hi] = original
        terminated = True
        failed_partition = j
        if hi < code.N:
            before = ws.leaf_visits
            sc_decode(code, y, start_index=hi, end_index=code.N, ws=ws)
            completion_visits = ws.leaf_visits - before
        break

    return FlipResult(
        u_hat=ws.u_hat.copy(),
        success=not terminated,
        iterations=iterations,
        leaf_visits=ws.leaf_visits - completion_visits,
        terminated_early=terminated,
        failed_partition=failed_partition,
        completion_visits=completion_visits,
    )
