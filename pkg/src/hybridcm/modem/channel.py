"""AWGN channel and SNR bookkeeping.

sigma2 is the total complex noise variance (sigma2/2 per real dimension),
so sigma2 = 10 ** (-snr_db / 10) for unit-power signals.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError


@dataclass(frozen=True)
class ChannelParams:
    snr_db: float
    sigma2: float
    ebn0_db: float | None = None
    code_rate: float | None = None
    bits_per_symbol: int | None = None

    @classmethod
    def from_snr_db(cls, snr_db):
        return cls(snr_db=snr_db, sigma2=10.0 ** (-snr_db / 10.0))

    @classmethod
    def from_ebn0_db(cls, ebn0_db, code_rate, bits_per_symbol):
        snr_db, sigma2 = snr_convert(ebn0_db, code_rate, bits_per_symbol)
        return cls(snr_db=snr_db, sigma2=sigma2, ebn0_db=ebn0_db,
                   code_rate=code_rate, bits_per_symbol=bits_per_symbol)


def snr_convert(ebn0_db, code_rate, bits_per_symbol):
    """Eb/N0 (dB) -> (snr_db, sigma2) for a rate-R, m-bit/symbol system."""
    if code_rate <= 0.0 or code_rate > 1.0:
        raise ContractError("code rate must lie in (0, 1]")
    if bits_per_symbol < 1:
        raise ContractError("bits per symbol must be >= 1")
    snr_db = ebn0_db + 10.0 * math.log10(code_rate * bits_per_symbol)
    return snr_db, 10.0 ** (-snr_db / 10.0)


def awgn(x, sigma2, rng):
    """Add circular complex Gaussian noise of total variance sigma2."""
    if sigma2 < 0.0:
        raise ContractError("noise variance must be non-negative")
    x = np.asarray(x, dtype=np.complex128)
    if sigma2 == 0.0:
        return x.copy()
    scale = math.sqrt(sigma2 / 2.0)
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return x + scale * noise
