import math

import numpy as np
import pytest

from hybridcm.errors import ContractError
from hybridcm.harness import run_uncoded_baseline
from hybridcm.harness.link import SimConfig, run_coded_link
from hybridcm.ldpc5g import LdpcCode
from hybridcm.modem import make_gray_qam, snr_convert


@pytest.fixture(scope="module")
def code():
    return LdpcCode()


def quick_cfg(**overrides):
    base = dict(system="qam", M=16, ebn0_grid=[3.0], min_block_errors=20,
                max_blocks=400, chunk_blocks=100, master_seed=3)
    base.update(overrides)
    return SimConfig(**base)


class TestCodedLink:
    def test_deterministic(self, code):
        r1 = run_coded_link(quick_cfg(), code=code)
        r2 = run_coded_link(quick_cfg(), code=code)
        assert r1 == r2

    def test_shard_count_invariance(self, code):
        r1 = run_coded_link(quick_cfg(shards=1), code=code)
        r2 = run_coded_link(quick_cfg(shards=3), code=code)
        assert r1 == r2

    def test_noiseless_chain_error_free(self, code):
        cfg = quick_cfg(ebn0_grid=[40.0], min_block_errors=5, max_blocks=60,
                        chunk_blocks=30)
        row = run_coded_link(cfg, code=code)[0]
        assert row.bit_errors == 0 and row.block_errors == 0
        assert row.truncated  # the stop rule was unreachable
        assert row.avg_spa_iters == 1.0

    def test_snr_bookkeeping_exact(self, code):
        rows = run_coded_link(quick_cfg(ebn0_grid=[2.5, 3.0]), code=code)
        for row in rows:
            assert row.snr_db == snr_convert(row.ebn0_db, 0.5, 4)[0]
            assert row.ber == row.bit_errors / (row.blocks * 528)
            assert row.bler == row.block_errors / row.blocks
            assert row.block_errors <= row.blocks
            assert row.bit_errors <= row.blocks * 528

    def test_grid_validation(self):
        with pytest.raises(ContractError):
            SimConfig(system="qam", M=16, ebn0_grid=[3.0, 2.0])
        with pytest.raises(ContractError):
            SimConfig(system="qam", M=16, ebn0_grid=[3.0], min_block_errors=0)

    def test_dnn_requires_checkpoint(self):
        with pytest.raises(ContractError):
            run_coded_link(SimConfig(system="dnn", M=16, ebn0_grid=[3.0]))


def pam_gray_ber(M, snr_db):
    """Exact hard-decision Gray BER for square M-QAM on AWGN.

    Per-axis decision regions integrate the Gaussian exactly via erf;
    independent of the simulation path.
    """
    const = make_gray_qam(M)
    m = const.m
    half = m // 2
    sigma_d = math.sqrt(10.0 ** (-snr_db / 10.0) / 2.0)
    # per-axis levels in label order (I axis): label -> level
    axis_labels = np.arange(2 ** half)
    levels = np.array([const.points[l << half].real for l in axis_labels])
    order = np.argsort(levels)
    sorted_levels = levels[order]
    bounds = (sorted_levels[:-1] + sorted_levels[1:]) / 2.0

    def interval_prob(mean, lo, hi):
        def cdf(v):
            if v == math.inf:
                return 1.0
            if v == -math.inf:
                return 0.0
            return 0.5 * (1.0 + math.erf((v - mean) / (sigma_d * math.sqrt(2))))
        return cdf(hi) - cdf(lo)

    total = 0.0
    for ki, k in enumerate(order):          # transmitted level index
        for ji, j in enumerate(order):      # decided level index
            lo = bounds[ji - 1] if ji > 0 else -math.inf
            hi = bounds[ji] if ji < len(bounds) else math.inf
            p = interval_prob(sorted_levels[ki], lo, hi)
            diff_bits = bin(int(axis_labels[k]) ^ int(axis_labels[j])).count("1")
            total += p * diff_bits
    # average over equiprobable levels, per transmitted bit (half per axis)
    return total / (2 ** half) / half


class TestUncodedBaseline:
    def test_16qam_matches_analytic_at_three_points(self):
        grid = [8.0, 10.0, 12.0]
        rows = run_uncoded_baseline(16, grid, n_symbols=300_000, master_seed=9)
        for row in rows:
            exact = pam_gray_ber(16, row.snr_db)
            n_bits = row.blocks * 4
            se = math.sqrt(exact * (1 - exact) / n_bits)
            assert abs(row.ber - exact) < 3 * se + 1e-12

    def test_4qam_matches_q_function(self):
        rows = run_uncoded_baseline(4, [4.0, 6.0], n_symbols=300_000, master_seed=4)
        for row in rows:
            sigma_d = math.sqrt(10.0 ** (-row.snr_db / 10.0) / 2.0)
            exact = 0.5 * math.erfc((1.0 / math.sqrt(2.0)) / (sigma_d * math.sqrt(2.0)))
            se = math.sqrt(exact * (1 - exact) / (row.blocks * 2))
            assert abs(row.ber - exact) < 3 * se

    def test_monotone_in_ebn0(self):
        rows = run_uncoded_baseline(16, [6.0, 8.0, 10.0, 12.0],
                                    n_symbols=150_000, master_seed=2)
        bers = [r.ber for r in rows]
        assert all(a > b for a, b in zip(bers, bers[1:]))

    def test_uncoded_uses_rate_one_conversion(self):
        row = run_uncoded_baseline(16, [5.0], n_symbols=1000)[0]
        assert row.snr_db == snr_convert(5.0, 1.0, 4)[0]
