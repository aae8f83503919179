"""End-to-end Monte Carlo link simulation.

Per grid point the chain is: random 528-bit message -> systematic encode ->
puncture -> interleave -> demux into m-bit groups -> modulate (Gray QAM or
the learned constellation) -> AWGN -> per-bit LLRs (exact demapper, or
decoder net + probability-to-LLR) -> mux -> deinterleave -> depuncture ->
sum-product decode -> count message-bit and block errors.

Blocks are processed in fixed-size chunks; chunk index (not worker count)
seeds the random streams, and the stop rule is evaluated on cumulative
counters in chunk order, so totals are invariant to the shard count and
the merge is order-independent.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError
from ..ldpc5g import LdpcCode, spa_decode
from ..modem import (
    awgn,
    make_gray_qam,
    make_interleaver,
    interleave,
    deinterleave,
    qam_bit_llrs,
    qam_hard_decide,
    snr_convert,
)
from ..neuralmod import llr_from_prob, load_checkpoint, nn_demodulate
from ..rngstreams import rng_streams

CODE_RATE = 0.5
MSG_BITS = 528
TX_BITS = 1056


@dataclass
class SimConfig:
    system: str                       # "qam" | "dnn"
    M: int
    ebn0_grid: list
    checkpoint: object = None         # path or ModelCheckpoint for "dnn"
    min_block_errors: int = 100
    max_blocks: int = 100_000
    spa_max_iter: int = 50
    spa_early_exit: bool = True
    interleaver_seed: int = None
    master_seed: int = 0
    shards: int = 1
    chunk_blocks: int = 1000
    demapper: str = "exact"          # "exact" | "maxlog" (QAM ablation only)
    identity_interleaver: bool = False

    def __post_init__(self):
        if self.system not in ("qam", "dnn"):
            raise ContractError(f"system must be 'qam' or 'dnn', got {self.system!r}")
        if self.min_block_errors <= 0 or self.max_blocks <= 0:
            raise ContractError("stop rules must be positive")
        grid = [float(v) for v in self.ebn0_grid]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ContractError("Eb/N0 grid must be strictly increasing")
        self.ebn0_grid = grid
        if self.demapper not in ("exact", "maxlog"):
            raise ContractError(f"unknown demapper {self.demapper!r}")
        if self.interleaver_seed is None:
            self.interleaver_seed = self.master_seed + 1


@dataclass
class SimResult:
    ebn0_db: float
    snr_db: float
    blocks: int
    bit_errors: int
    block_errors: int
    ber: float
    bler: float
    avg_spa_iters: float
    truncated: bool = field(default=False, compare=False)

    CSV_FIELDS = ("ebn0_db", "snr_db", "blocks", "bit_errors",
                  "block_errors", "ber", "bler", "avg_spa_iters")


class _System:
    """Modulation + demodulation halves shared by all grid points."""

    def __init__(self, cfg):
        self.m = int(np.log2(cfg.M))
        if 2 ** self.m != cfg.M:
            raise ContractError(f"M={cfg.M} is not a power of two")
        if TX_BITS % self.m:
            raise ContractError(f"{TX_BITS} bits do not demux into {self.m}-bit groups")
        self.n_sym = TX_BITS // self.m
        self._weights = 1 << np.arange(self.m - 1, -1, -1)
        self.max_log = cfg.demapper == "maxlog"
        if cfg.system == "qam":
            self.const = make_gray_qam(cfg.M)
            self.points = self.const.points
            self.ckpt = None
        else:
            if cfg.checkpoint is None:
                raise ContractError("dnn system requires a checkpoint")
            ckpt = cfg.checkpoint
            if isinstance(ckpt, str):
                ckpt = load_checkpoint(ckpt)
            if ckpt.M != cfg.M:
                raise ContractError(
                    f"checkpoint is for M={ckpt.M}, config asks for M={cfg.M}")
            self.ckpt = ckpt
            self.points = ckpt.constellation.points

    def modulate(self, frames):
        """(B, 1056) interleaved bits -> (B, n_sym) complex symbols."""
        groups = frames.reshape(-1, self.m)
        labels = groups @ self._weights
        return self.points[labels].reshape(frames.shape[0], self.n_sym)

    def demodulate(self, y, sigma2):
        """(B, n_sym) received -> (B, 1056) LLRs, llr > 0 favors bit 0."""
        flat = y.reshape(-1)
        if self.ckpt is None:
            llr = qam_bit_llrs(flat, self.const, sigma2, max_log=self.max_log)
        else:
            p = nn_demodulate(flat, sigma2, self.ckpt.constellation, self.ckpt.dec)
            llr = llr_from_prob(p)
        return llr.reshape(y.shape[0], TX_BITS)


def _chunk_sizes(max_blocks, chunk_blocks):
    full, rem = divmod(max_blocks, chunk_blocks)
    return [chunk_blocks] * full + ([rem] if rem else [])


def run_coded_link(cfg, code=None, progress=None):
    """Simulate every grid point; returns a list of SimResult rows."""
    code = code or LdpcCode()
    system = _System(cfg)
    pi = make_interleaver(TX_BITS, cfg.interleaver_seed,
                          identity=cfg.identity_interleaver)
    results = []
    for pidx, ebn0 in enumerate(cfg.ebn0_grid):
        snr_db, sigma2 = snr_convert(ebn0, CODE_RATE, system.m)
        row = _run_point(cfg, code, system, pi, pidx, ebn0, snr_db, sigma2)
        results.append(row)
        if progress is not None:
            progress(row)
    return results


def _run_point(cfg, code, system, pi, pidx, ebn0, snr_db, sigma2):
    sizes = _chunk_sizes(cfg.max_blocks, cfg.chunk_blocks)

    def simulate(chunk_idx):
        n_blocks = sizes[chunk_idx]
        msg_rng = rng_streams(cfg.master_seed, chunk_idx, f"message:{pidx}")
        noise_rng = rng_streams(cfg.master_seed, chunk_idx, f"noise:{pidx}")
        msgs = msg_rng.integers(0, 2, size=(n_blocks, MSG_BITS), dtype=np.uint8)
        tx = code.rate_match(code.encode_batch(msgs))
        symbols = system.modulate(interleave(tx, pi))
        y = awgn(symbols, sigma2, noise_rng)
        llrs = deinterleave(system.demodulate(y, sigma2), pi)
        bits, _, iters = spa_decode(code.depuncture(llrs), code.H,
                                    max_iter=cfg.spa_max_iter,
                                    early_exit=cfg.spa_early_exit)
        errs = bits[:, :MSG_BITS] != msgs
        return (n_blocks, int(errs.sum()), int(errs.any(axis=1).sum()),
                int(iters.sum()))

    blocks = bit_errors = block_errors = iter_sum = 0
    stopped = False
    if cfg.shards <= 1:
        for ci in range(len(sizes)):
            nb, be, ble, its = simulate(ci)
            blocks += nb
            bit_errors += be
            block_errors += ble
            iter_sum += its
            if block_errors >= cfg.min_block_errors:
                stopped = True
                break
    else:
        with ThreadPoolExecutor(max_workers=cfg.shards) as pool:
            ci = 0
            while ci < len(sizes) and not stopped:
                wave = list(range(ci, min(ci + cfg.shards, len(sizes))))
                outs = list(pool.map(simulate, wave))
                # merge in chunk order; discard anything past the stop point
                for nb, be, ble, its in outs:
                    blocks += nb
                    bit_errors += be
                    block_errors += ble
                    iter_sum += its
                    if block_errors >= cfg.min_block_errors:
                        stopped = True
                        break
                ci = ci + len(wave)

    return SimResult(
        ebn0_db=ebn0,
        snr_db=snr_db,
        blocks=blocks,
        bit_errors=bit_errors,
        block_errors=block_errors,
        ber=bit_errors / (blocks * MSG_BITS),
        bler=block_errors / blocks,
        avg_spa_iters=iter_sum / blocks,
        truncated=not stopped,
    )


def run_uncoded_baseline(M, ebn0_grid, n_symbols=200_000, master_seed=0):
    """Hard-decision uncoded Gray-QAM BER per grid point.

    Uncoded, so Eb/N0 converts with rate 1; rows reuse the results schema
    with blocks = symbols, block_errors = symbol errors, and
    ber = bit errors / (symbols * m).
    """
    const = make_gray_qam(M)
    m = const.m
    results = []
    for pidx, ebn0 in enumerate(ebn0_grid):
        snr_db, sigma2 = snr_convert(ebn0, 1.0, m)
        bit_rng = rng_streams(master_seed, 0, f"uncoded-bits:{pidx}")
        noise_rng = rng_streams(master_seed, 0, f"uncoded-noise:{pidx}")
        labels = bit_rng.integers(0, M, size=n_symbols)
        y = awgn(const.points[labels], sigma2, noise_rng)
        detected = qam_hard_decide(y, const)
        diff = const.bits_of_labels(labels) ^ const.bits_of_labels(detected)
        bit_errors = int(diff.sum())
        sym_errors = int((detected != labels).sum())
        results.append(SimResult(
            ebn0_db=float(ebn0), snr_db=snr_db, blocks=n_symbols,
            bit_errors=bit_errors, block_errors=sym_errors,
            ber=bit_errors / (n_symbols * m), bler=sym_errors / n_symbols,
            avg_spa_iters=0.0))
    return results
