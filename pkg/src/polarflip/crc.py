"""Cyclic redundancy checks over GF(2), bit-serial, most-significant bit first.

No input/output reflection and no final xor; the register starts at a
configurable init value (0 by default). With init 0 the remainder of a
message with its own remainder appended is 0, which is the property the
decoders rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from polarflip.errors import ContractViolation

# widths with a conventional generator polynomial (leading term implicit);
# width 1 is a plain parity bit
DEFAULT_POLYNOMIALS = {
    16: 0x1021,
    8: 0x07,
    4: 0x3,
    2: 0x3,
    1: 0x1,
}


@dataclass(frozen=True)
class CrcConfig:
    """Generator setup for one CRC: remainder width, polynomial, init register."""

    width: int
    polynomial: int
    init: int = 0

    def __post_init__(self):
        if not 1 <= self.width <= 32:
            raise ContractViolation(f"crc width must be in [1, 32], got {self.width}")
        if not 0 <= self.polynomial < (1 << self.width):
            raise ContractViolation(
                f"polynomial 0x{self.polynomial:x} does not fit in {self.width} bits "
                "(the leading coefficient is implicit)"
            )
        if not 0 <= self.init < (1 << self.width):
            raise ContractViolation(f"init 0x{self.init:x} does not fit in {self.width} bits")


def default_crc_config(width: int) -> CrcConfig:
    """Return the stock polynomial for a supported width (16, 8 or 4)."""
    try:
        poly = DEFAULT_POLYNOMIALS[width]
    except KeyError:
        raise ContractViolation(
            f"no default polynomial for width {width}; pass one explicitly"
        ) from None
    return CrcConfig(width=width, polynomial=poly, init=0)


@njit(cache=True)
def _crc_register(bits, width, poly, init):
    # long division, one message bit per step; register holds the running remainder
    reg = init
    mask = (1 << width) - 1
    top = width - 1
    for i in range(bits.shape[0]):
        fb = ((reg >> top) & 1) ^ bits[i]
        reg = (reg << 1) & mask
        if fb:
            reg ^= poly
    return reg


def _as_bits(bits) -> np.ndarray:
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ContractViolation("bit sequence must be one-dimensional")
    return arr


def crc_remainder(cfg: CrcConfig, bits) -> np.ndarray:
    """Remainder of bits * x^width mod the generator, as width bits MSB first."""
    reg = _crc_register(_as_bits(bits), cfg.width, cfg.polynomial, cfg.init)
    out = np.empty(cfg.width, dtype=np.uint8)
    for k in range(cfg.width):
        out[k] = (reg >> (cfg.width - 1 - k)) & 1
    return out


def crc_check(cfg: CrcConfig, payload_bits, remainder_bits) -> bool:
    """True iff the recomputed remainder over payload_bits equals remainder_bits."""
    rem = _as_bits(remainder_bits)
    if rem.shape[0] != cfg.width:
        raise ContractViolation(
            f"remainder has {rem.shape[0]} bits, config width is {cfg.width}"
        )
    reg = _crc_register(_as_bits(payload_bits), cfg.width, cfg.polynomial, cfg.init)
    want = 0
    for k in range(cfg.width):
        want = (want << 1) | int(rem[k])
    return reg == want
