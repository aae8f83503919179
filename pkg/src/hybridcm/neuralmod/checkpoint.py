"""Checkpoint persistence: JSON with exact float round-trip.

Schema (version 1):
  {version, M,
   arch: {enc_hidden: [...], dec_hidden: [...]},
   weights: {layer-name: {shape: [...], data: [...]}},
   bn: {layer-name: {gamma, beta, run_mean, run_var, momentum, eps}},
   norm: {eta_re, eta_im, sigma},
   constellation: [{label, re, im}, ...],
   meta: {seed, stage, loss_kind, train_snr_db, final_loss}}

Floats are serialized with Python's shortest exact repr, so a reload
reproduces inference bit for bit; load re-derives the constellation from
the stored weights and refuses checkpoints whose snapshot or normalization
statistics disagree.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import CheckpointError
from .networks import Constellation, DecoderNet, EncoderNet, frozen_constellation

FORMAT_VERSION = 1
_VALIDATE_TOL = 1e-9


@dataclass
class ModelCheckpoint:
    M: int
    enc: EncoderNet
    dec: DecoderNet
    constellation: Constellation
    meta: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @property
    def m(self):
        return self.enc.m


def _net_weights(net):
    out = {}
    for li in range(net.n_layers):
        for tag, t in (("W", net.weights[li]), ("b", net.biases[li])):
            out[f"{net.name}_l{li}/{tag}"] = {
                "shape": list(t.data.shape),
                "data": t.data.reshape(-1).tolist(),
            }
    return out


def _net_bn(net):
    out = {}
    for li in range(net.n_layers):
        bn = net.bns[li]
        if bn is None:
            continue
        out[f"{net.name}_l{li}"] = {
            "gamma": bn.gamma.data.tolist(),
            "beta": bn.beta.data.tolist(),
            "run_mean": bn.run_mean.tolist(),
            "run_var": bn.run_var.tolist(),
            "momentum": bn.momentum,
            "eps": bn.eps,
        }
    return out


def save_checkpoint(ckpt, path):
    doc = {
        "version": ckpt.version,
        "M": ckpt.M,
        "arch": {"enc_hidden": ckpt.enc.hidden, "dec_hidden": ckpt.dec.hidden},
        "weights": {**_net_weights(ckpt.enc), **_net_weights(ckpt.dec)},
        "bn": {**_net_bn(ckpt.enc), **_net_bn(ckpt.dec)},
        "norm": {
            "eta_re": ckpt.constellation.eta.real,
            "eta_im": ckpt.constellation.eta.imag,
            "sigma": math.sqrt(ckpt.constellation.sigma2),
        },
        "constellation": [
            {"label": i, "re": p.real, "im": p.imag}
            for i, p in enumerate(ckpt.constellation.points)
        ],
        "meta": dict(ckpt.meta),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _restore_net(net, weights, bn, where):
    for li in range(net.n_layers):
        for tag, t in (("W", net.weights[li]), ("b", net.biases[li])):
            key = f"{net.name}_l{li}/{tag}"
            if key not in weights:
                raise CheckpointError(f"{where}: missing weight {key}")
            rec = weights[key]
            arr = np.asarray(rec["data"], dtype=np.float64)
            if list(t.data.shape) != list(rec["shape"]) or arr.size != t.data.size:
                raise CheckpointError(f"{where}: shape mismatch for {key}")
            t.data = arr.reshape(t.data.shape)
        st = net.bns[li]
        if st is None:
            continue
        key = f"{net.name}_l{li}"
        if key not in bn:
            raise CheckpointError(f"{where}: missing batch-norm block {key}")
        rec = bn[key]
        try:
            st.gamma.data = np.asarray(rec["gamma"], dtype=np.float64)
            st.beta.data = np.asarray(rec["beta"], dtype=np.float64)
            st.run_mean = np.asarray(rec["run_mean"], dtype=np.float64)
            st.run_var = np.asarray(rec["run_var"], dtype=np.float64)
            st.momentum = float(rec["momentum"])
            st.eps = float(rec["eps"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CheckpointError(f"{where}: corrupted batch-norm {key}: {exc}") from None
        if st.gamma.data.shape != (st.width,) or st.run_var.shape != (st.width,):
            raise CheckpointError(f"{where}: batch-norm width mismatch in {key}")


def load_checkpoint(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"{path}: not valid JSON: {exc}") from None
    if doc.get("version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format version {doc.get('version')!r}, expected {FORMAT_VERSION}")
    try:
        M = int(doc["M"])
        enc_hidden = [int(v) for v in doc["arch"]["enc_hidden"]]
        dec_hidden = [int(v) for v in doc["arch"]["dec_hidden"]]
        norm = doc["norm"]
        const_rows = doc["constellation"]
        meta = doc.get("meta", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"{path}: corrupted field: {exc}") from None
    m = int(np.log2(M))
    if 2 ** m != M:
        raise CheckpointError(f"{path}: M={M} is not a power of two")

    rng = np.random.default_rng(0)  # shapes only; weights are overwritten
    enc = EncoderNet(m, enc_hidden, rng)
    dec = DecoderNet(M, m, dec_hidden, rng)
    _restore_net(enc, doc["weights"], doc.get("bn", {}), path)
    _restore_net(dec, doc["weights"], doc.get("bn", {}), path)

    if len(const_rows) != M:
        raise CheckpointError(f"{path}: constellation has {len(const_rows)} points, expected {M}")
    pts = np.zeros(M, dtype=np.complex128)
    for row in const_rows:
        pts[int(row["label"])] = float(row["re"]) + 1j * float(row["im"])
    stored = Constellation(pts, float(norm["eta_re"]) + 1j * float(norm["eta_im"]),
                           float(norm["sigma"]) ** 2)

    derived = frozen_constellation(enc)
    if np.max(np.abs(derived.points - stored.points)) > _VALIDATE_TOL:
        raise CheckpointError(f"{path}: stored constellation does not match the weights")
    if (abs(derived.eta - stored.eta) > _VALIDATE_TOL
            or abs(math.sqrt(derived.sigma2) - math.sqrt(stored.sigma2)) > _VALIDATE_TOL):
        raise CheckpointError(f"{path}: normalization statistics do not match the weights")
    try:
        stored.validate()
    except ValueError as exc:
        raise CheckpointError(f"{path}: {exc}") from None

    return ModelCheckpoint(M=M, enc=enc, dec=dec, constellation=stored, meta=meta)
