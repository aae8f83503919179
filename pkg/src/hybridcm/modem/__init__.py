from .channel import ChannelParams, awgn, snr_convert
from .interleave import Interleaver, deinterleave, interleave, make_interleaver
from .qam import (
    QamConstellation,
    make_gray_qam,
    qam_bit_llrs,
    qam_hard_decide,
    qam_modulate,
)

__all__ = [
    "ChannelParams", "awgn", "snr_convert",
    "Interleaver", "deinterleave", "interleave", "make_interleaver",
    "QamConstellation", "make_gray_qam", "qam_bit_llrs", "qam_hard_decide",
    "qam_modulate",
]
