"""BPSK over AWGN and the channel LLRs handed to the decoders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polarflip.errors import ContractViolation


@dataclass(frozen=True)
class ChannelParams:
    """Operating point of the binary-input AWGN channel.

    rate is the information rate K/N (CRC bits excluded) used to convert
    per-information-bit energy into per-symbol energy.
    """

    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ContractViolation(f"rate must be in (0, 1], got {self.rate}")
        var = 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))
        object.__setattr__(self, "_variance", var)
        object.__setattr__(self, "_sigma", float(np.sqrt(var)))

    @property
    def noise_variance(self) -> float:
        return self._variance


def transmit(x, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Modulate codeword bits, add noise, return channel LLRs 2r/sigma^2."""
    x = np.asarray(x, dtype=np.uint8)
    s = 1.0 - 2.0 * x.astype(np.float64)
    s += params._sigma * rng.standard_normal(x.shape[0])
    s *= 2.0 / params._variance
    return s
