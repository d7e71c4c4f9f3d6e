"""Successive-cancellation decoding kernel.

The tree recursion runs over flat per-stage arrays: stage s (leaves are stage
0, the channel is stage n) occupies indices [2^s, 2^{s+1}) of the alpha and
beta arrays. alpha holds the LLRs of the node currently being worked at each
stage; beta holds the completed partial sums of a left child waiting for its
sibling. The layout supports restarting mid-codeword, which the flip decoders
use heavily: restarting at leaf j only requires rebuilding the pending left
partial sums along j's root path, everything else is recomputed on the way
down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from polarflip.construction import CodeSpec
from polarflip.errors import ContractViolation


def f_op(a, b):
    """Min-sum check update: sgn(a) sgn(b) min(|a|, |b|)."""
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def g_op(a, b, beta_l):
    """Variable update: b + (1 - 2 beta_l) a."""
    return b + (1.0 - 2.0 * np.asarray(beta_l, dtype=np.float64)) * a


def combine(beta_l, beta_r) -> np.ndarray:
    """Partial-sum merge: (beta_l xor beta_r, beta_r)."""
    bl = np.atleast_1d(np.asarray(beta_l, dtype=np.uint8))
    br = np.atleast_1d(np.asarray(beta_r, dtype=np.uint8))
    if bl.shape != br.shape:
        raise ContractViolation(f"partial-sum halves differ in shape: {bl.shape} vs {br.shape}")
    return np.concatenate([bl ^ br, br])


@njit(cache=True)
def _transform_into(u_hat, base, size, out):
    # out[:size] = butterfly transform of u_hat[base : base + size]
    for j in range(size):
        out[j] = u_hat[base + j]
    h = 1
    while h < size:
        b = 0
        while b < size:
            for j in range(h):
                out[b + j] ^= out[b + h + j]
            b += 2 * h
        h *= 2


@njit(cache=True)
def _decode_range(n, frozen, alpha, beta, u_hat, leaf_llr, scratch,
                  start, end, flip_mask, oracle, u_true, corrections):
    ncorr = 0
    visits = 0
    for i in range(start, end):
        if i == start:
            if i > 0:
                # stages where leaf i sits in a right subtree need the left
                # sibling's partial sums, recovered from decided leaves
                for s in range(n):
                    if (i >> s) & 1:
                        size = 1 << s
                        base = (i >> (s + 1)) << (s + 1)
                        _transform_into(u_hat, base, size, scratch)
                        for j in range(size):
                            beta[size + j] = scratch[j]
            shi = n - 1
        else:
            shi = 0
            while ((i >> shi) & 1) == 0:
                shi += 1
        for s in range(shi, -1, -1):
            off = 1 << s
            opp = off << 1
            if (i >> s) & 1:
                for j in range(off):
                    a = alpha[opp + j]
                    b = alpha[opp + off + j]
                    if beta[off + j]:
                        alpha[off + j] = b - a
                    else:
                        alpha[off + j] = b + a
            else:
                for j in range(off):
                    a = alpha[opp + j]
                    b = alpha[opp + off + j]
                    sgn = 1.0
                    if a < 0.0:
                        sgn = -sgn
                        a = -a
                    if b < 0.0:
                        sgn = -sgn
                        b = -b
                    alpha[off + j] = sgn * (a if a < b else b)
        llr = alpha[1]
        leaf_llr[i] = llr
        if frozen[i]:
            u = 0
        else:
            u = 0 if llr >= 0.0 else 1
            if oracle:
                if u != u_true[i]:
                    corrections[ncorr] = i
                    ncorr += 1
                    u = u_true[i]
            elif flip_mask[i]:
                u ^= 1
        u_hat[i] = u
        visits += 1
        scratch[0] = u
        s = 0
        while (i >> s) & 1:
            off = 1 << s
            for j in range(off):
                scratch[off + j] = scratch[j]
                scratch[j] ^= beta[off + j]
            s += 1
        off = 1 << s
        for j in range(off):
            beta[off + j] = scratch[j]
    return visits, ncorr


class DecoderWorkspace:
    """Per-worker scratch state for SC decoding; never share across threads."""

    def __init__(self, n: int):
        N = 1 << n
        self.n = n
        self.N = N
        self.alpha = np.zeros(2 * N, dtype=np.float64)
        self.beta = np.zeros(2 * N, dtype=np.uint8)
        self.u_hat = np.zeros(N, dtype=np.uint8)
        self.leaf_llr = np.zeros(N, dtype=np.float64)
        self.leaf_visits = 0
        self._scratch = np.zeros(N, dtype=np.uint8)
        self._flip_mask = np.zeros(N, dtype=np.uint8)
        self._no_truth = np.zeros(N, dtype=np.uint8)
        self._corrections = np.zeros(N, dtype=np.int64)

    def load_channel(self, y) -> None:
        self.alpha[self.N:] = y

    def reset(self) -> None:
        self.leaf_visits = 0

    @property
    def root_partial_sums(self) -> np.ndarray:
        """Partial sums propagated to the root; after a full pass this is the re-encoded u_hat."""
        return self.beta[self.N:]


@dataclass(frozen=True)
class OracleOutcome:
    """What the genie saw: which decisions it had to fix."""

    success: bool
    corrections: tuple
    error_order: int


def _prepare(code: CodeSpec, y, ws: Optional[DecoderWorkspace]):
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != code.N:
        raise ContractViolation(f"y has length {y.shape[0]}, code length is {code.N}")
    if ws is None:
        ws = DecoderWorkspace(code.n)
    elif ws.N != code.N:
        raise ContractViolation(f"workspace sized for N={ws.N}, code has N={code.N}")
    ws.load_channel(y)
    return y, ws


def sc_decode(code: CodeSpec, y, forced_flips=(), start_index: int = 0,
              ws: Optional[DecoderWorkspace] = None, end_index: Optional[int] = None):
    """Successive cancellation over leaves [start_index, end_index).

    Decisions before start_index are taken from the workspace as-is, so a
    nonzero start requires that the workspace already holds a valid prefix.
    Returns (u_hat, leaf_llr, leaf_visits) as live views of the workspace;
    leaf_visits is the workspace's running total since its last reset.
    """
    _, ws = _prepare(code, y, ws)
    end = code.N if end_index is None else int(end_index)
    start = int(start_index)
    if not 0 <= start <= end <= code.N:
        raise ContractViolation(f"bad decode range [{start}, {end}) for N={code.N}")
    for f in forced_flips:
        f = int(f)
        if not 0 <= f < code.N:
            raise ContractViolation(f"flip index {f} out of range")
        if code.frozen_mask[f]:
            raise ContractViolation(f"cannot flip frozen index {f}")
        ws._flip_mask[f] = 1
    try:
        visits, _ = _decode_range(
            code.n, code.frozen_mask, ws.alpha, ws.beta, ws.u_hat, ws.leaf_llr,
            ws._scratch, start, end, ws._flip_mask, False, ws._no_truth,
            ws._corrections,
        )
    finally:
        for f in forced_flips:
            ws._flip_mask[int(f)] = 0
    ws.leaf_visits += int(visits)
    return ws.u_hat, ws.leaf_llr, ws.leaf_visits


def sc_oracle_decode(code: CodeSpec, y, u_true,
                     ws: Optional[DecoderWorkspace] = None) -> OracleOutcome:
    """Genie-aided pass: every wrong decision is recorded and corrected in place.

    Always succeeds by construction; error_order counts the corrections. An
    error_order of 0 means plain SC would have decoded this frame correctly.
    """
    _, ws = _prepare(code, y, ws)
    u_true = np.ascontiguousarray(u_true, dtype=np.uint8)
    if u_true.shape[0] != code.N:
        raise ContractViolation(f"u_true has length {u_true.shape[0]}, code length is {code.N}")
    if np.any(u_true & code.frozen_mask):
        raise ContractViolation("u_true carries nonzero frozen bits")
    visits, ncorr = _decode_range(
        code.n, code.frozen_mask, ws.alpha, ws.beta, ws.u_hat, ws.leaf_llr,
        ws._scratch, 0, code.N, ws._flip_mask, True, u_true, ws._corrections,
    )
    ws.leaf_visits += int(visits)
    corr = tuple(int(c) for c in ws._corrections[:ncorr])
    return OracleOutcome(success=True, corrections=corr, error_order=int(ncorr))
