"""Command-line front end.

Subcommands: train, eval, uncoded, gmi, constellation, plot, ldpc-selftest,
gradcheck. Exit codes: 0 success, 1 contract violation (including usage
errors), 2 I/O or data-file errors.
"""

import argparse
import json
import sys

import numpy as np

from ..errors import ContractError, ParseError, TrainingDivergedError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ContractError(message)


def _parse_grid(text):
    try:
        start, step, stop = (float(v) for v in text.split(":"))
    except ValueError:
        raise ContractError(f"grid must be start:step:stop, got {text!r}") from None
    if step <= 0:
        raise ContractError("grid step must be positive")
    grid = []
    v = start
    while v <= stop + 1e-9:
        grid.append(round(v, 10))
        v += step
    if not grid:
        raise ContractError(f"empty grid from {text!r}")
    return grid


def build_parser():
    p = _Parser(prog="hybridcm",
                description="Learned coded modulation over a 5G-NR LDPC code")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a modulator/demodulator pair")
    t.add_argument("--config", required=True, help="JSON training config")
    t.add_argument("--out", required=True, help="output checkpoint path")
    t.add_argument("--resume", help="stage-1 checkpoint to fine-tune")
    t.add_argument("--stage1-only", action="store_true",
                   help="stop after pretraining")
    t.add_argument("--quiet", action="store_true")

    e = sub.add_parser("eval", help="coded-link Monte Carlo sweep")
    e.add_argument("--system", required=True, choices=["qam", "dnn"])
    e.add_argument("--checkpoint", help="model checkpoint (dnn only)")
    e.add_argument("--mod", required=True, type=int, help="modulation order M")
    e.add_argument("--ebn0", required=True, help="start:step:stop in dB")
    e.add_argument("--min-block-errors", type=int, default=100)
    e.add_argument("--max-blocks", type=int, default=100_000)
    e.add_argument("--spa-iters", type=int, default=50)
    e.add_argument("--no-early-exit", action="store_true",
                   help="always run the full SPA iteration budget")
    e.add_argument("--shards", type=int, default=1)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--interleaver-seed", type=int)
    e.add_argument("--out", required=True, help="results CSV path")
    e.add_argument("--quiet", action="store_true")

    u = sub.add_parser("uncoded", help="uncoded hard-decision QAM baseline")
    u.add_argument("--mod", required=True, type=int)
    u.add_argument("--ebn0", required=True)
    u.add_argument("--symbols", type=int, default=200_000)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--out", required=True)

    g = sub.add_parser("gmi", help="Monte Carlo rate estimate at one SNR")
    g.add_argument("--system", required=True, choices=["qam", "dnn"])
    g.add_argument("--checkpoint")
    g.add_argument("--mod", type=int)
    g.add_argument("--snr-db", required=True, type=float)
    g.add_argument("--symbols", type=int, default=100_000)
    g.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("constellation", help="export points to CSV")
    c.add_argument("--system", required=True, choices=["qam", "dnn"])
    c.add_argument("--checkpoint")
    c.add_argument("--mod", type=int)
    c.add_argument("--out", required=True)

    pl = sub.add_parser("plot", help="render CSVs to a self-contained SVG")
    pl.add_argument("--in", dest="inputs", required=True, action="append",
                    help="input CSV (repeatable)")
    pl.add_argument("--out", required=True)

    sub.add_parser("ldpc-selftest", help="encoder/decoder sanity checks")

    gc = sub.add_parser("gradcheck", help="finite-difference loss validation")
    gc.add_argument("--tolerance", type=float, default=1e-5)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except (ContractError, TrainingDivergedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args):
    if args.command == "train":
        return _cmd_train(args)
    if args.command == "eval":
        return _cmd_eval(args)
    if args.command == "uncoded":
        return _cmd_uncoded(args)
    if args.command == "gmi":
        return _cmd_gmi(args)
    if args.command == "constellation":
        return _cmd_constellation(args)
    if args.command == "plot":
        return _cmd_plot(args)
    if args.command == "ldpc-selftest":
        return _cmd_ldpc_selftest()
    if args.command == "gradcheck":
        return _cmd_gradcheck(args.tolerance)
    raise ContractError(f"unknown command {args.command!r}")


def _cmd_train(args):
    from ..neuralmod import TrainConfig, save_checkpoint, stage1_checkpoint, train_two_stage
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config}: {exc}") from None
    cfg = TrainConfig.from_dict(doc)

    def progress(stage, epoch, loss, val):
        if not args.quiet:
            print(f"stage {stage} epoch {epoch:4d}  loss {loss:+.5f}  "
                  f"val rate {val:.5f} bits/sym", flush=True)

    if args.stage1_only:
        ckpt = stage1_checkpoint(cfg, progress=progress)
    else:
        ckpt = train_two_stage(cfg, resume_from=args.resume, progress=progress)
    save_checkpoint(ckpt, args.out)
    if not args.quiet:
        print(f"saved checkpoint to {args.out} "
              f"(val rate {ckpt.meta['val_gmi']:.5f} bits/sym)")
    return 0


def _cmd_eval(args):
    from .exports import write_results_csv, write_run_record
    from .link import SimConfig, run_coded_link
    cfg = SimConfig(
        system=args.system, M=args.mod, ebn0_grid=_parse_grid(args.ebn0),
        checkpoint=args.checkpoint, min_block_errors=args.min_block_errors,
        max_blocks=args.max_blocks, spa_max_iter=args.spa_iters,
        spa_early_exit=not args.no_early_exit, shards=args.shards,
        master_seed=args.seed, interleaver_seed=args.interleaver_seed)

    def progress(row):
        if not args.quiet:
            flag = " (truncated)" if row.truncated else ""
            print(f"Eb/N0 {row.ebn0_db:7.4f} dB  blocks {row.blocks:7d}  "
                  f"BER {row.ber:.4e}  BLER {row.bler:.4e}{flag}", flush=True)

    rows = run_coded_link(cfg, progress=progress)
    write_results_csv(rows, args.out)
    record = {k: v for k, v in vars(cfg).items() if k != "checkpoint"}
    record["checkpoint"] = args.checkpoint
    write_run_record(args.out + ".run.json", record,
                     seeds={"master": cfg.master_seed,
                            "interleaver": cfg.interleaver_seed},
                     outputs=[args.out])
    return 0


def _cmd_uncoded(args):
    from .exports import write_results_csv
    from .link import run_uncoded_baseline
    rows = run_uncoded_baseline(args.mod, _parse_grid(args.ebn0),
                                n_symbols=args.symbols, master_seed=args.seed)
    write_results_csv(rows, args.out)
    return 0


def _cmd_gmi(args):
    from .gmi import estimate_gmi
    if args.system == "qam" and args.mod is None:
        raise ContractError("--mod is required for the QAM system")
    if args.system == "dnn" and args.checkpoint is None:
        raise ContractError("--checkpoint is required for the dnn system")
    est = estimate_gmi(args.system, args.snr_db, args.symbols, args.seed,
                       M=args.mod, checkpoint=args.checkpoint)
    print(f"rate {est.bits_per_symbol:.6f} bits/symbol "
          f"(std error {est.std_error:.2e}, {est.n_symbols} symbols)")
    return 0


def _cmd_constellation(args):
    from .exports import export_constellation
    if args.system == "qam":
        if args.mod is None:
            raise ContractError("--mod is required for the QAM system")
        export_constellation("qam", args.out, M=args.mod)
    else:
        if args.checkpoint is None:
            raise ContractError("--checkpoint is required for the dnn system")
        export_constellation(args.checkpoint, args.out)
    return 0


def _cmd_plot(args):
    from .svgplot import emit_plot
    emit_plot(args.inputs, args.out)
    return 0


def _cmd_ldpc_selftest():
    from ..ldpc5g import LdpcCode, spa_decode
    code = LdpcCode()
    rng = np.random.default_rng(0)
    msgs = rng.integers(0, 2, size=(1000, code.k), dtype=np.uint8)
    cws = code.encode_batch(msgs)
    syn = code.syndrome(cws)
    if syn.any():
        print("FAIL: nonzero syndrome among 1000 random encodes")
        return 1
    print("ok: 1000 random encodes all have zero syndrome")
    llrs = 20.0 * (1.0 - 2.0 * cws[0].astype(np.float64))
    bits, converged, iters = spa_decode(llrs, code.H)
    if not converged or iters != 1 or not np.array_equal(bits, cws[0]):
        print("FAIL: noiseless decode did not converge in one iteration")
        return 1
    print("ok: noiseless +-20 LLR frame decodes exactly in 1 iteration")
    return 0


def _cmd_gradcheck(tolerance):
    from ..diffkit import Tape, grad_check
    from .. import diffkit as dk
    from ..neuralmod import (
        DecoderNet, EncoderNet, bce_loss, enumerate_constellation,
        feature_map, gmi_loss,
    )
    worst_overall = 0.0
    for M, loss_kind in ((4, "gmi"), (4, "bce"), (16, "gmi"), (16, "bce")):
        m = int(np.log2(M))
        rng = np.random.default_rng(M + (0 if loss_kind == "gmi" else 1))
        enc = EncoderNet(m, [8, 8], rng)
        dec = DecoderNet(M, m, [16], rng)
        n = 4
        labels = rng.integers(0, M, size=n)
        bits = ((labels[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
        sigma2 = 0.5
        noise = np.sqrt(sigma2 / 2.0) * rng.standard_normal((n, 2))

        def build():
            points, _, _ = enumerate_constellation(enc, mode="train")
            x = dk.gather_rows(points, labels)
            y = dk.add(x, dk.Tensor(noise))
            if loss_kind == "gmi":
                return gmi_loss(bits, y, sigma2, points, dec, mode="train")
            psi = feature_map(y, sigma2, points)
            return bce_loss(bits, dec.forward(psi, mode="train"))

        params = enc.parameters() + dec.parameters()
        err = grad_check(build, params)
        worst_overall = max(worst_overall, err)
        status = "ok" if err < tolerance else "FAIL"
        print(f"{status}: {loss_kind} loss M={M}: max rel error {err:.3e}")
    if worst_overall >= tolerance:
        return 1
    print(f"all gradient checks below {tolerance:g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
