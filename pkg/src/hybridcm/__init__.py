"""Hybrid coded modulation: a learned inner modulator/demodulator over a
5G-NR LDPC outer code, with a Gray-QAM baseline and Monte Carlo tooling."""

__version__ = "0.1.0"
