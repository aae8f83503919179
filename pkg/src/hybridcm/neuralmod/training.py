"""Two-stage training of the modulator/demodulator pair.

Stage 1 pairs the encoder with a small decoder, small batches, and AdamW
with decoupled weight decay; it finds a workable constellation shape.
Stage 2 throws the stage-1 decoder away, draws a larger decoder at random,
keeps the pretrained encoder, and fine-tunes both with Adam and large
batches. Bits are random and independent (no outer code); each enumerated
batch repeats all 2^m labels with fresh noise at the fixed training SNR.
Epochs end with a held-out rate estimate; each stage keeps its best-scoring
parameters, and the estimate can optionally drive early stopping (off by
default so the learning-rate decay always runs to completion).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .. import diffkit as dk
from ..errors import ContractError, TrainingDivergedError
from ..rngstreams import rng_streams
from .checkpoint import ModelCheckpoint, load_checkpoint
from .losses import bce_loss, gmi_loss, gmi_samples_np
from .networks import (
    DecoderNet,
    EncoderNet,
    enumerate_constellation,
    feature_map,
    frozen_constellation,
    labels_pm1,
    nn_demodulate,
)

TABLE_PRESETS = {
    16: dict(enc_hidden=[16, 64, 32], dec1_hidden=[128], dec2_hidden=[128],
             train_snr_db=7.0, batch1=16 * 20, batch2=16 * 1600,
             samples_per_epoch=16 * 4800, weight_decay1=0.01),
    64: dict(enc_hidden=[64, 128, 128, 128], dec1_hidden=[128],
             dec2_hidden=[64, 128], train_snr_db=11.5, batch1=64 * 20,
             batch2=64 * 1600, samples_per_epoch=64 * 3200, weight_decay1=0.2),
}


@dataclass
class TrainConfig:
    M: int
    enc_hidden: list
    dec1_hidden: list
    dec2_hidden: list
    train_snr_db: float
    batch1: int
    batch2: int
    samples_per_epoch: int
    weight_decay1: float
    loss_kind: str = "gmi"            # "gmi" | "bce"
    lr_max: float = 0.1
    lr_min: float = 0.001
    lr_shape: str = "steps"           # "steps" | "linear" | "cosine"
    max_epochs1: int = 120
    max_epochs2: int = 60
    patience: int = None              # early stop disabled: it would cut the
                                      # lr decay short; best-val params are
                                      # restored at stage end regardless
    batch_mode: str = "enumerated"    # "enumerated" | "random"
    val_reps: int = 500               # validation set is M * val_reps samples
    seed: int = 0

    def __post_init__(self):
        m = int(np.log2(self.M))
        if 2 ** m != self.M:
            raise ContractError(f"M={self.M} is not a power of two")
        if self.loss_kind not in ("gmi", "bce"):
            raise ContractError(f"loss kind must be 'gmi' or 'bce', got {self.loss_kind!r}")
        if self.batch_mode not in ("enumerated", "random"):
            raise ContractError(f"unknown batch mode {self.batch_mode!r}")
        for name, b in (("batch1", self.batch1), ("batch2", self.batch2)):
            if b % self.M:
                raise ContractError(f"{name}={b} must be a multiple of M={self.M}")
        if self.samples_per_epoch % self.batch1 or self.samples_per_epoch % self.batch2:
            raise ContractError("samples_per_epoch must be divisible by both batch sizes")

    @property
    def m(self):
        return int(np.log2(self.M))

    @property
    def sigma2(self):
        return 10.0 ** (-self.train_snr_db / 10.0)

    @classmethod
    def for_modulation(cls, M, **overrides):
        if M not in TABLE_PRESETS:
            raise ContractError(f"no preset for M={M}; construct TrainConfig directly")
        return cls(M=M, **{**TABLE_PRESETS[M], **overrides})

    @classmethod
    def from_dict(cls, doc):
        """Build from a JSON document that mirrors the field names.

        A document carrying all architecture fields is taken literally;
        otherwise M selects the preset and the remaining keys override it.
        """
        doc = dict(doc)
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ContractError(f"unknown config fields: {sorted(unknown)}")
        if "M" not in doc:
            raise ContractError("config must carry M")
        required = {"M", *TABLE_PRESETS[16]}
        if required <= set(doc):
            return cls(**doc)
        return cls.for_modulation(doc.pop("M"), **doc)


def _bits_of_labels(labels, m):
    shifts = np.arange(m - 1, -1, -1)
    return ((np.asarray(labels)[:, None] >> shifts) & 1).astype(np.uint8)


def _draw_labels(cfg, batch, rng):
    if cfg.batch_mode == "enumerated":
        return np.tile(np.arange(cfg.M), batch // cfg.M)
    return rng.integers(0, cfg.M, size=batch)


def _snapshot(nets):
    blob = []
    for net in nets:
        for t in net.weights + net.biases:
            blob.append(t.data.copy())
        for bn in net.bns:
            if bn is not None:
                blob.extend([bn.gamma.data.copy(), bn.beta.data.copy(),
                             bn.run_mean.copy(), bn.run_var.copy()])
    return blob


def _restore(nets, blob):
    it = iter(blob)
    for net in nets:
        for t in net.weights + net.biases:
            t.data = next(it).copy()
        for bn in net.bns:
            if bn is not None:
                bn.gamma.data = next(it).copy()
                bn.beta.data = next(it).copy()
                bn.run_mean = next(it).copy()
                bn.run_var = next(it).copy()


def _val_gmi(enc, dec, cfg, val_labels, val_noise):
    """Held-out rate estimate with frozen (inference) statistics."""
    const = frozen_constellation(enc)
    y = const.points[val_labels] + val_noise
    p = nn_demodulate(y, cfg.sigma2, const, dec)
    bits = _bits_of_labels(val_labels, cfg.m)
    from .networks import feature_map_np
    psi = feature_map_np(y, cfg.sigma2, const.points)
    return float(np.mean(gmi_samples_np(bits, p, psi)))


def _run_stage(stage, enc, dec, cfg, batch, max_epochs, optimizer, lam,
               progress=None):
    steps_per_epoch = cfg.samples_per_epoch // batch
    total_steps = steps_per_epoch * max_epochs
    noise_rng = rng_streams(cfg.seed, stage, "train-noise")
    label_rng = rng_streams(cfg.seed, stage, "train-labels")
    val_rng = rng_streams(cfg.seed, stage, "val-noise")

    val_labels = np.tile(np.arange(cfg.M), cfg.val_reps)
    val_noise = np.sqrt(cfg.sigma2 / 2.0) * (
        val_rng.standard_normal(val_labels.size)
        + 1j * val_rng.standard_normal(val_labels.size))

    params = enc.parameters() + dec.parameters()
    best_val = -np.inf
    best_blob = _snapshot([enc, dec])
    stale = 0
    step = 0
    scale = np.sqrt(cfg.sigma2 / 2.0)
    last_loss = np.nan

    for epoch in range(max_epochs):
        for _ in range(steps_per_epoch):
            labels = _draw_labels(cfg, batch, label_rng)
            bits = _bits_of_labels(labels, cfg.m)
            noise = scale * noise_rng.standard_normal((batch, 2))
            try:
                with dk.Tape() as tape:
                    points, _, _ = enumerate_constellation(enc, mode="train")
                    x = dk.gather_rows(points, labels)
                    y = dk.add(x, dk.Tensor(noise))
                    if cfg.loss_kind == "gmi":
                        loss = gmi_loss(bits, y, cfg.sigma2, points, dec, mode="train")
                    else:
                        psi = feature_map(y, cfg.sigma2, points)
                        p = dec.forward(psi, mode="train")
                        loss = bce_loss(bits, p)
                last_loss = float(loss.data)
                if not np.isfinite(last_loss):
                    raise ContractError("non-finite loss")
                dk.backward(tape, loss)
                optimizer.lr = dk.lr_schedule(step, total_steps, cfg.lr_max,
                                              cfg.lr_min, cfg.lr_shape)
                grads = [t.grad for _, t in params]
                dk.adamw_step(optimizer, [(n, t.data) for n, t in params],
                              grads, lam=lam)
            except ContractError as exc:
                raise TrainingDivergedError(
                    f"stage {stage} diverged at epoch {epoch} step {step}: {exc}"
                ) from exc
            step += 1
        val = _val_gmi(enc, dec, cfg, val_labels, val_noise)
        if progress is not None:
            progress(stage, epoch, last_loss, val)
        if val > best_val + 1e-6:
            best_val = val
            best_blob = _snapshot([enc, dec])
            stale = 0
        else:
            stale += 1
            if cfg.patience is not None and stale >= cfg.patience:
                break
    _restore([enc, dec], best_blob)
    return best_val, last_loss


def train_two_stage(cfg, resume_from=None, progress=None):
    """Run both stages and return the frozen, validated checkpoint.

    ``resume_from`` may name a stage-1 checkpoint, in which case stage 1 is
    skipped and its encoder is fine-tuned directly.
    """
    if resume_from is not None:
        prior = load_checkpoint(resume_from) if isinstance(resume_from, str) else resume_from
        if prior.M != cfg.M:
            raise ContractError(f"resume checkpoint has M={prior.M}, config M={cfg.M}")
        if prior.meta.get("stage") not in (1, 2):
            raise ContractError("resume checkpoint lacks a valid stage marker")
        enc = prior.enc
    else:
        enc = EncoderNet(cfg.m, cfg.enc_hidden, rng_streams(cfg.seed, 1, "init-enc"))
        dec1 = DecoderNet(cfg.M, cfg.m, cfg.dec1_hidden,
                          rng_streams(cfg.seed, 1, "init-dec"))
        opt1 = dk.OptimizerState(weight_decay=cfg.weight_decay1)
        _run_stage(1, enc, dec1, cfg, cfg.batch1, cfg.max_epochs1, opt1,
                   lam=cfg.weight_decay1, progress=progress)

    dec2 = DecoderNet(cfg.M, cfg.m, cfg.dec2_hidden,
                      rng_streams(cfg.seed, 2, "init-dec"))
    opt2 = dk.OptimizerState()
    val_gmi, final_loss = _run_stage(2, enc, dec2, cfg, cfg.batch2,
                                     cfg.max_epochs2, opt2, lam=0.0,
                                     progress=progress)

    const = frozen_constellation(enc)
    const.validate()
    meta = {
        "seed": cfg.seed,
        "stage": 2,
        "loss_kind": cfg.loss_kind,
        "train_snr_db": cfg.train_snr_db,
        "final_loss": final_loss,
        "val_gmi": val_gmi,
    }
    return ModelCheckpoint(M=cfg.M, enc=enc, dec=dec2, constellation=const,
                           meta=meta)


def stage1_checkpoint(cfg, progress=None):
    """Train only the first stage; useful for later resume."""
    enc = EncoderNet(cfg.m, cfg.enc_hidden, rng_streams(cfg.seed, 1, "init-enc"))
    dec1 = DecoderNet(cfg.M, cfg.m, cfg.dec1_hidden,
                      rng_streams(cfg.seed, 1, "init-dec"))
    opt1 = dk.OptimizerState(weight_decay=cfg.weight_decay1)
    val_gmi, final_loss = _run_stage(1, enc, dec1, cfg, cfg.batch1,
                                     cfg.max_epochs1, opt1,
                                     lam=cfg.weight_decay1, progress=progress)
    const = frozen_constellation(enc)
    const.validate()
    meta = {"seed": cfg.seed, "stage": 1, "loss_kind": cfg.loss_kind,
            "train_snr_db": cfg.train_snr_db, "final_loss": final_loss,
            "val_gmi": val_gmi}
    return ModelCheckpoint(M=cfg.M, enc=enc, dec=dec1, constellation=const,
                           meta=meta)
