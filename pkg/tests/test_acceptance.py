"""Acceptance gate for the whole package.

Everything here runs on PC(1024, 512) with 16 CRC bits, reliability ordering
computed at 2.5 dB, T_max 10 for the flip decoders, and hard-coded seeds.
Monte-Carlo checks use generous tolerance windows; the property checks are
exact. Expect several minutes of single-core runtime.
"""

import numpy as np
import pytest

from polarflip import (
    PartitionPlan,
    build_code,
    construct_reliability,
    profile_errors,
    select_partition_indices,
)
from polarflip.harness import _run_frames

from .conftest import record_criterion

N_LOG = 10
K = 512
C = 16
DESIGN_SNR = 2.5
PROFILE_SEED = 101
CAMPAIGN_SEED = 1
BATCH = 16384


# ---------------------------------------------------------------- fixtures


@pytest.fixture(scope="session")
def codes():
    rel = construct_reliability(N_LOG, DESIGN_SNR)
    base = build_code(N_LOG, K, C, rel, design_snr_db=DESIGN_SNR)
    profile = profile_errors(base, 2.5, min_failures=2000, max_frames=400_000,
                             seed=PROFILE_SEED)
    rho2 = select_partition_indices(profile, 2, base.frozen_set)
    rho4 = select_partition_indices(profile, 4, base.frozen_set)
    p2 = build_code(N_LOG, K, C, rel, PartitionPlan(2, tuple(rho2), C // 2),
                    design_snr_db=DESIGN_SNR)
    p4 = build_code(N_LOG, K, C, rel, PartitionPlan(4, tuple(rho4), C // 4),
                    design_snr_db=DESIGN_SNR)
    return {"rel": rel, "base": base, "profile": profile, "p2": p2, "p4": p4,
            "rho2": rho2, "rho4": rho4}


@pytest.fixture(scope="session")
def sweep(codes):
    """Memoized Monte-Carlo point runner shared by all criteria.

    Stops on whole batches once min_errors frame errors accumulate, exactly
    like the harness, and always draws frame i from (seed, i).
    """
    cache = {}

    def run(code_key: str, decoder: str, t_max: int, snr: float,
            min_errors: int = 500, max_frames: int = 2_500_000):
        key = (code_key, decoder, t_max, snr, min_errors, max_frames)
        if key in cache:
            return cache[key]
        code = codes[code_key]
        frames = errors = bits = iters = visits = 0
        while frames < max_frames and errors < min_errors:
            take = min(BATCH, max_frames - frames)
            f, e, b, it, v, _ = _run_frames(code, decoder, t_max, snr,
                                            CAMPAIGN_SEED, frames, frames + take)
            frames += f
            errors += e
            bits += b
            iters += it
            visits += v
        point = {
            "fer": errors / frames,
            "frames": frames,
            "errors": errors,
            "iters": iters / frames,
            "cx": visits / (frames * code.N),
        }
        cache[key] = point
        return point

    return run


def crossing_db(points, target_fer):
    """Linear interpolation of log10(FER) against Eb/N0 at the target rate."""
    xs = sorted(points)
    ys = [np.log10(points[x]) for x in xs]
    t = np.log10(target_fer)
    for (x1, y1), (x2, y2) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if y1 >= t >= y2:
            return x1 + (x2 - x1) * (y1 - t) / (y1 - y2)
    raise AssertionError(f"FER {target_fer} not bracketed by {points}")


# ---------------------------------------------------------------- criteria


def test_criterion_single_error_dominance(codes):
    prof = codes["profile"]
    share = prof.e1_share
    ok = prof.total_failures >= 2000 and 0.90 <= share <= 0.99
    record_criterion(
        "single-error dominance at 2.5 dB",
        ok,
        f"{prof.total_failures} failures, order-1 share {share:.4f} (want 0.90..0.99)",
    )
    assert ok


def test_criterion_single_error_share_grows_with_snr(codes):
    shares = {}
    counts = {}
    for snr in (1.0, 1.5, 2.0):
        p = profile_errors(codes["base"], snr, min_failures=1000,
                           max_frames=200_000, seed=PROFILE_SEED)
        shares[snr] = p.e1_share
        counts[snr] = p.total_failures
    shares[2.5] = codes["profile"].e1_share
    counts[2.5] = codes["profile"].total_failures
    seq = [shares[s] for s in (1.0, 1.5, 2.0, 2.5)]
    ok = all(a <= b for a, b in zip(seq, seq[1:])) and min(counts.values()) >= 1000
    record_criterion(
        "single-error share grows with SNR",
        ok,
        "share " + " -> ".join(f"{v:.3f}" for v in seq)
        + f" over 1.0..2.5 dB (min failures {min(counts.values())})",
    )
    assert ok


def test_criterion_fer_ordering(sweep):
    grid = (1.0, 1.5, 2.0, 2.5)
    sc = {s: sweep("base", "sc", 0, s) for s in grid}
    oracle = {s: sweep("base", "oracle", 0, s) for s in grid}
    flip = {s: sweep("base", "scflip", 10, s) for s in grid}
    ordered = all(
        oracle[s]["fer"] <= flip[s]["fer"] <= sc[s]["fer"] for s in grid
    )
    enough = all(
        min(sc[s]["errors"], oracle[s]["errors"], flip[s]["errors"]) >= 400
        for s in grid
    )
    gain_25 = sc[2.5]["fer"] / flip[2.5]["fer"]
    ok = ordered and enough and gain_25 >= 2.0
    record_criterion(
        "FER ordering oracle <= scflip <= sc",
        ok,
        f"ordered at {grid}, scflip beats sc {gain_25:.1f}x at 2.5 dB (want >= 2x)",
    )
    assert ok


def test_criterion_partition_gain_at_matched_iterations(sweep):
    # match the average iteration count at 1.5 dB first
    ref_iters = sweep("base", "scflip", 10, 1.5, min_errors=1500,
                      max_frames=6 * BATCH)["iters"]
    t_match, best = None, None
    for t in range(10, 16):
        it = sweep("p2", "pscf", t, 1.5, min_errors=1500,
                   max_frames=6 * BATCH)["iters"]
        if best is None or abs(it - ref_iters) < best:
            t_match, best = t, abs(it - ref_iters)

    grid = (2.5, 2.7, 2.9)
    flip = {s: sweep("base", "scflip", 10, s) for s in grid}
    pscf = {s: sweep("p2", "pscf", t_match, s) for s in grid}
    window = [s for s in grid if 1e-4 <= flip[s]["fer"] <= 1e-2]
    dominated = all(pscf[s]["fer"] <= flip[s]["fer"] for s in window)
    gain = crossing_db({s: flip[s]["fer"] for s in grid}, 1e-3) \
        - crossing_db({s: pscf[s]["fer"] for s in grid}, 1e-3)
    ok = bool(window) and dominated and 0.05 <= gain <= 0.25
    record_criterion(
        "partitioned gain at matched iterations",
        ok,
        f"t_match={t_match} (iters {ref_iters:.2f}), P=2 never worse over {window}, "
        f"gain at FER 1e-3: {gain:.3f} dB (want 0.05..0.25)",
    )
    assert ok


def test_criterion_complexity_reduction(sweep):
    grid = (1.0, 1.25, 1.5)
    # budgets picked so each partitioned config reaches the monolithic FER
    t2, t4 = 4, 3
    flip = {s: sweep("base", "scflip", 10, s, min_errors=1000) for s in grid}
    p2 = {s: sweep("p2", "pscf", t2, s, min_errors=1000) for s in grid}
    p4 = {s: sweep("p4", "pscf", t4, s, min_errors=1000) for s in grid}

    equivalent = all(
        p[s]["fer"] <= flip[s]["fer"] * 1.05 for p in (p2, p4) for s in grid
    )
    r2 = max(flip[s]["cx"] / p2[s]["cx"] for s in grid)
    r4 = max(flip[s]["cx"] / p4[s]["cx"] for s in grid)
    worst_p2 = max(p2[s]["cx"] for s in grid)
    best_p4 = min(p4[s]["cx"] for s in grid)
    ok = equivalent and r2 >= 2.0 and r4 >= 3.5 and worst_p2 <= 1.7 and best_p4 <= 1.05
    record_criterion(
        "complexity reduction at equivalent FER",
        ok,
        f"speedup up to {r2:.2f}x (P=2, want >= 2) and {r4:.2f}x (P=4, want >= 3.5); "
        f"P=2 worst load {worst_p2:.2f} (<= 1.7), P=4 best load {best_p4:.2f} (<= 1.05)",
    )
    assert ok


def test_criterion_complexity_converges_to_sc(sweep):
    cxs = {
        "sc": sweep("base", "sc", 0, 3.0, min_errors=1, max_frames=2 * BATCH)["cx"],
        "oracle": sweep("base", "oracle", 0, 3.0, min_errors=1, max_frames=2 * BATCH)["cx"],
        "scflip": sweep("base", "scflip", 10, 3.0, min_errors=1, max_frames=2 * BATCH)["cx"],
        "pscf P=2": sweep("p2", "pscf", 10, 3.0, min_errors=1, max_frames=2 * BATCH)["cx"],
        "pscf P=4": sweep("p4", "pscf", 10, 3.0, min_errors=1, max_frames=2 * BATCH)["cx"],
    }
    ok = all(abs(v - 1.0) <= 0.02 for v in cxs.values())
    record_criterion(
        "complexity converges to one SC pass at 3.0 dB",
        ok,
        ", ".join(f"{k}={v:.4f}" for k, v in cxs.items()) + " (all within 2% of 1)",
    )
    assert ok


def test_criterion_property_suite():
    from polarflip import (
        ChannelParams,
        assemble_frame,
        encode,
        polar_transform,
        pscf_decode,
        sc_decode,
        sc_flip_decode,
        transmit,
    )

    from . import test_construction, test_crc, test_harness, test_profiling, test_sc
    from .reference import naive_sc_decode

    checks = []

    # involution and linearity at full scale (10^4 vectors, N up to 1024)
    test_construction.test_transform_is_self_inverse_and_linear()
    checks.append("transform involution+linearity 10^4")

    # optimized vs naive SC on 10^4 frames across N in {8, 16, 64}
    rng = np.random.default_rng(77)
    for n, reps in ((3, 3400), (4, 3300), (6, 3300)):
        code = build_code(n, (1 << n) // 2, 0, construct_reliability(n, DESIGN_SNR))
        frozen = set(code.frozen_set)
        params = ChannelParams(ebn0_db=1.0, rate=0.5)
        for _ in range(reps):
            u = assemble_frame(code, rng=rng)
            y = transmit(encode(code, u), params, rng)
            u_hat, leaf_llr, _ = sc_decode(code, y)
            ref_u, ref_llr, _ = naive_sc_decode(frozen, y)
            assert np.array_equal(u_hat, ref_u)
            assert np.allclose(leaf_llr, ref_llr, rtol=1e-12, atol=0)
    checks.append("naive SC equivalence 10^4")

    # partitioned decoder with P=1 is sc-flip, 10^3 frames
    rng = np.random.default_rng(78)
    code = build_code(8, 128, 8, construct_reliability(8, DESIGN_SNR))
    params = ChannelParams(ebn0_db=1.5, rate=code.K / code.N)
    for _ in range(1000):
        u = assemble_frame(code, rng=rng)
        y = transmit(encode(code, u), params, rng)
        a = sc_flip_decode(code, y, t_max=8)
        b = pscf_decode(code, y, t_max=8)
        assert np.array_equal(a.u_hat, b.u_hat)
        assert (a.success, a.iterations, a.leaf_visits) == \
            (b.success, b.iterations, b.leaf_visits)
    checks.append("pscf(P=1) == scflip 10^3")

    test_sc.test_restart_reproduces_full_pass()
    checks.append("restart prefix stability")
    test_sc.test_root_partial_sums_reencode_the_decisions()
    checks.append("re-encode consistency")
    test_crc.test_single_bit_errors_always_detected()
    test_crc.test_bursts_up_to_width_always_detected()
    checks.append("CRC single-bit+burst exhaustive w4/w8")
    test_profiling.test_synthetic_profiles_always_yield_valid_plans()
    test_profiling.test_plateau_snaps_to_smallest_index()
    checks.append("plan invariants on synthetic profiles")
    test_harness.test_worker_count_does_not_change_results()
    checks.append("worker-count invariance")

    record_criterion("property suite", True, "; ".join(checks))
