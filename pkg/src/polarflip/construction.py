"""Code construction: bit-channel reliability, frozen/info/CRC layout, encoding.

Reliability ordering comes from Gaussian-approximation density evolution of a
binary-input AWGN channel at a design SNR. Layouts place payload bits on the
most reliable channels; CRC remainder bits take the most reliable leftovers,
partition by partition, so a partitioned layout moves CRC bits (never payload
bits) relative to the monolithic one.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from polarflip.crc import CrcConfig, crc_remainder, default_crc_config
from polarflip.errors import ContractViolation, PlanningError

_LN_PI = math.log(math.pi)
_PHI_SPLIT = 10.0


def _phi_ln(x: float) -> float:
    # ln of the mean-to-erasure proxy used by the density-evolution recursion,
    # two-regime form; the crossover mismatch near x=10 is ~2% and only
    # perturbs orderings of channels that are far from the frozen boundary.
    if x < _PHI_SPLIT:
        return -0.4527 * x**0.86 + 0.0218
    return 0.5 * (_LN_PI - math.log(x)) - 0.25 * x + math.log1p(-10.0 / (7.0 * x))


def _check_node_mean(mu: float) -> float:
    """Mean update for the degraded (check-side) channel half."""
    if mu <= 0.0:
        return 0.0
    lt = _phi_ln(mu)
    et = math.exp(lt)  # underflows to 0 for large mu, the log form below stays exact
    target = lt + math.log(2.0 - et)
    lo, hi = 0.0, mu
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _phi_ln(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def construct_reliability(n: int, design_snr_db: float, rate: float = 0.5) -> np.ndarray:
    """Order the 2^n bit-channels from least to most reliable.

    Density evolution by Gaussian approximation: the channel LLR mean at the
    design point is propagated through the polarization tree, doubling on the
    upgraded half and shrinking on the degraded half. ``design_snr_db`` is an
    Eb/N0 figure converted at ``rate`` (default 1/2, override with the actual
    K/N when constructing other rates).

    Returns a permutation of [0, 2^n); ties break toward the lower index.
    """
    if n < 1:
        raise ContractViolation(f"n must be >= 1, got {n}")
    if not 0.0 < rate <= 1.0:
        raise ContractViolation(f"rate must be in (0, 1], got {rate}")
    sigma_sq = 1.0 / (2.0 * rate * 10.0 ** (design_snr_db / 10.0))
    mu = [2.0 / sigma_sq]
    for _ in range(n):
        nxt = []
        for m in mu:
            nxt.append(_check_node_mean(m))
            nxt.append(2.0 * m)
        mu = nxt
    # position in the doubled list spells the leaf index MSB-first, so the
    # all-degraded path lands on index 0 and the all-upgraded path on 2^n - 1
    return np.argsort(np.asarray(mu), kind="stable")


@njit(cache=True)
def _butterfly(x):
    size = x.shape[0]
    h = 1
    while h < size:
        b = 0
        while b < size:
            for j in range(h):
                x[b + j] ^= x[b + h + j]
            b += 2 * h
        h *= 2


def polar_transform(bits) -> np.ndarray:
    """Butterfly transform x = u G over GF(2), natural order, self-inverse."""
    x = np.array(bits, dtype=np.uint8)
    n_bits = x.shape[0]
    if n_bits == 0 or (n_bits & (n_bits - 1)) != 0:
        raise ContractViolation(f"length must be a power of two, got {n_bits}")
    _butterfly(x)
    return x


@dataclass(frozen=True)
class PartitionPlan:
    """Where a codeword is cut for partitioned decoding.

    rho holds the exclusive upper bound of each partition, so partition j
    covers [rho[j-1], rho[j]) with rho[-1] == N implied by construction.
    """

    P: int
    rho: tuple
    crc_bits_per_partition: int

    def __post_init__(self):
        if self.P < 1:
            raise ContractViolation(f"partition count must be >= 1, got {self.P}")
        rho = tuple(int(r) for r in self.rho)
        object.__setattr__(self, "rho", rho)
        if len(rho) != self.P:
            raise ContractViolation(f"expected {self.P} boundaries, got {len(rho)}")
        if rho[0] <= 0 or any(b <= a for a, b in zip(rho, rho[1:])):
            raise ContractViolation(f"boundaries must be strictly increasing and positive: {rho}")

    @property
    def N(self) -> int:
        return self.rho[-1]

    def ranges(self):
        lo = 0
        for hi in self.rho:
            yield (lo, hi)
            lo = hi


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """A fully laid-out code: who is frozen, who carries payload, who carries CRC."""

    n: int
    K: int
    C: int
    design_snr_db: float
    frozen_set: frozenset
    info_positions: np.ndarray  # ascending; payload bit k lives at info_positions[k]
    crc_positions: tuple  # one ascending index array per partition
    crc_configs: tuple  # one CrcConfig per partition, empty tuple when C == 0
    partition_plan: Optional[PartitionPlan] = None
    reliability: Optional[np.ndarray] = None  # construction metadata; None when file-loaded
    frozen_mask: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        # decoders hit these every frame, precompute once
        ranges = self.partition_ranges()
        pos = self.info_positions
        per_part = tuple(pos[(pos >= lo) & (pos < hi)] for lo, hi in ranges)
        object.__setattr__(self, "_info_per_partition", per_part)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def P(self) -> int:
        return 1 if self.partition_plan is None else self.partition_plan.P

    def partition_ranges(self):
        if self.partition_plan is None:
            return [(0, self.N)]
        return list(self.partition_plan.ranges())

    def info_in_partition(self, j: int) -> np.ndarray:
        return self._info_per_partition[j]


def _layout_crc(reliability, info_set, lo, hi, count, j):
    """Pick the `count` most reliable non-info indices of [lo, hi)."""
    picked = []
    for idx in reliability[::-1]:  # most reliable first
        idx = int(idx)
        if lo <= idx < hi and idx not in info_set:
            picked.append(idx)
            if len(picked) == count:
                break
    if len(picked) < count:
        raise PlanningError(
            f"partition {j} spanning [{lo}, {hi}) has only {len(picked)} assignable "
            f"indices for {count} CRC bits"
        )
    return np.array(sorted(picked), dtype=np.int64)


def build_code(
    n: int,
    K: int,
    C: int,
    reliability,
    plan: Optional[PartitionPlan] = None,
    design_snr_db: float = 2.5,
    crc_polynomial: Optional[int] = None,
    crc_init: int = 0,
) -> CodeSpec:
    """Assign frozen/info/CRC roles to all N bit positions.

    Payload goes on the K most reliable channels regardless of partitioning.
    Each partition then reserves its C/P most reliable remaining positions for
    CRC bits and everything else freezes, so changing the plan only relocates
    CRC bits. With no plan the whole codeword is one partition.
    """
    N = 1 << n
    reliability = np.asarray(reliability, dtype=np.int64)
    if reliability.shape[0] != N or set(reliability.tolist()) != set(range(N)):
        raise ContractViolation("reliability must be a permutation of [0, N)")
    if K < 0 or C < 0 or K + C > N:
        raise ContractViolation(f"need K + C <= N, got K={K} C={C} N={N}")

    P = 1 if plan is None else plan.P
    if plan is not None:
        if plan.N != N:
            raise ContractViolation(f"plan covers {plan.N} positions, code has {N}")
        if C % P != 0:
            raise ContractViolation(f"partition count {P} must divide C={C}")
    per_part = C // P

    info = np.sort(reliability[N - K:]) if K else np.array([], dtype=np.int64)
    info_set = set(info.tolist())

    ranges = [(0, N)] if plan is None else list(plan.ranges())
    crc_positions = []
    for j, (lo, hi) in enumerate(ranges):
        if per_part == 0:
            crc_positions.append(np.array([], dtype=np.int64))
        else:
            crc_positions.append(_layout_crc(reliability, info_set, lo, hi, per_part, j))

    used = info_set.union(*(set(c.tolist()) for c in crc_positions))
    frozen = frozenset(range(N)) - frozenset(used)
    mask = np.zeros(N, dtype=np.uint8)
    mask[sorted(frozen)] = 1

    if per_part > 0:
        if crc_polynomial is None:
            cfg = default_crc_config(per_part)
        else:
            cfg = CrcConfig(width=per_part, polynomial=crc_polynomial, init=crc_init)
        configs = tuple(cfg for _ in ranges)
    else:
        configs = tuple()

    return CodeSpec(
        n=n,
        K=K,
        C=C,
        design_snr_db=design_snr_db,
        frozen_set=frozen,
        info_positions=info,
        crc_positions=tuple(crc_positions),
        crc_configs=configs,
        partition_plan=plan,
        reliability=reliability,
        frozen_mask=mask,
    )


def encode(code: CodeSpec, u) -> np.ndarray:
    """x = u G over GF(2). Frozen positions of u must be zero."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[0] != code.N:
        raise ContractViolation(f"u has length {u.shape[0]}, code length is {code.N}")
    if np.any(u & code.frozen_mask):
        bad = int(np.flatnonzero(u & code.frozen_mask)[0])
        raise ContractViolation(f"frozen position {bad} carries a nonzero bit")
    return polar_transform(u)


def assemble_frame(code: CodeSpec, payload=None, rng=None) -> np.ndarray:
    """Scatter payload into the info positions and fill per-partition CRCs.

    With payload None a uniform random payload is drawn from rng.
    """
    if payload is None:
        if rng is None:
            raise ContractViolation("need either a payload or an rng to draw one")
        payload = rng.integers(0, 2, size=code.K, dtype=np.uint8)
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape[0] != code.K:
        raise ContractViolation(f"payload has {payload.shape[0]} bits, K is {code.K}")

    u = np.zeros(code.N, dtype=np.uint8)
    u[code.info_positions] = payload
    for j, (lo, hi) in enumerate(code.partition_ranges()):
        if code.C == 0:
            break
        part_payload = u[code.info_in_partition(j)]
        u[code.crc_positions[j]] = crc_remainder(code.crc_configs[j], part_payload)
    return u


def code_hash(code: CodeSpec) -> str:
    """Stable short id over the layout (not the reliability metadata)."""
    blob = json.dumps(_layout_dict(code), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _layout_dict(code: CodeSpec) -> dict:
    d = {
        "n": code.n,
        "K": code.K,
        "C": code.C,
        "design_snr_db": code.design_snr_db,
        "frozen": sorted(int(i) for i in code.frozen_set),
        "info": [int(i) for i in code.info_positions],
        "crc": [[int(i) for i in arr] for arr in code.crc_positions],
    }
    if code.partition_plan is not None:
        d["rho"] = list(code.partition_plan.rho)
    return d


def save_code(code: CodeSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(_layout_dict(code), fh, indent=1)
        fh.write("\n")


def load_code(path, crc_polynomial: Optional[int] = None, crc_init: int = 0) -> CodeSpec:
    """Rebuild a CodeSpec from its JSON layout file."""
    with open(path) as fh:
        d = json.load(fh)
    n, K, C = int(d["n"]), int(d["K"]), int(d["C"])
    N = 1 << n
    frozen = frozenset(int(i) for i in d["frozen"])
    info = np.array(sorted(int(i) for i in d["info"]), dtype=np.int64)
    crc = tuple(np.array(sorted(int(i) for i in part), dtype=np.int64) for part in d["crc"])
    plan = None
    if "rho" in d and d["rho"]:
        rho = tuple(int(r) for r in d["rho"])
        plan = PartitionPlan(P=len(rho), rho=rho, crc_bits_per_partition=C // max(len(rho), 1))

    all_idx = set(range(N))
    claimed = set(frozen) | set(info.tolist()) | {int(i) for part in crc for i in part}
    if claimed != all_idx or len(frozen) + len(info) + sum(len(p) for p in crc) != N:
        raise ContractViolation(f"layout in {path} does not tile [0, {N}) disjointly")
    if len(info) != K or sum(len(p) for p in crc) != C:
        raise ContractViolation(f"layout in {path} disagrees with its own K/C header")

    per_part = C // len(crc) if crc else 0
    if per_part > 0:
        if crc_polynomial is None:
            cfg = default_crc_config(per_part)
        else:
            cfg = CrcConfig(width=per_part, polynomial=crc_polynomial, init=crc_init)
        configs = tuple(cfg for _ in crc)
    else:
        configs = tuple()

    mask = np.zeros(N, dtype=np.uint8)
    mask[sorted(frozen)] = 1
    return CodeSpec(
        n=n,
        K=K,
        C=C,
        design_snr_db=float(d.get("design_snr_db", 2.5)),
        frozen_set=frozen,
        info_positions=info,
        crc_positions=crc,
        crc_configs=configs,
        partition_plan=plan,
        reliability=None,
        frozen_mask=mask,
    )
