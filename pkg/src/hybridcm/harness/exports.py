"""CSV export/import and run records.

Results CSV carries exactly the columns
ebn0_db,snr_db,blocks,bit_errors,block_errors,ber,bler,avg_spa_iters
with floats at full double precision (17 significant digits).
Constellation CSV is label_bits,re,im with the label as an m-char
bit string.
"""

import csv
import datetime
import json

import numpy as np

from ..errors import ContractError, ParseError
from ..modem import make_gray_qam
from ..neuralmod import load_checkpoint
from .link import SimResult

RESULTS_HEADER = list(SimResult.CSV_FIELDS)
CONSTELLATION_HEADER = ["label_bits", "re", "im"]


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_results_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, f)) for f in SimResult.CSV_FIELDS])


def read_results_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty CSV")
        if header != RESULTS_HEADER:
            raise ParseError(f"{path}: unexpected header {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(RESULTS_HEADER):
                raise ParseError(f"{path}: wrong field count", line=lineno)
            try:
                rows.append(SimResult(
                    ebn0_db=float(rec[0]), snr_db=float(rec[1]),
                    blocks=int(rec[2]), bit_errors=int(rec[3]),
                    block_errors=int(rec[4]), ber=float(rec[5]),
                    bler=float(rec[6]), avg_spa_iters=float(rec[7])))
            except ValueError as exc:
                raise ParseError(f"{path}: {exc}", line=lineno) from None
    return rows


def export_constellation(source, path, M=None):
    """Write label_bits,re,im rows for a checkpoint or the QAM baseline.

    ``source`` is a checkpoint path / ModelCheckpoint, or the string "qam"
    (with M given).
    """
    if source == "qam":
        if M is None:
            raise ContractError("QAM export requires M")
        const = make_gray_qam(M)
        points, m = const.points, const.m
    else:
        ckpt = load_checkpoint(source) if isinstance(source, str) else source
        points, m = ckpt.constellation.points, ckpt.constellation.m
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CONSTELLATION_HEADER)
        for label, p in enumerate(points):
            w.writerow([format(label, f"0{m}b"), _fmt(p.real), _fmt(p.imag)])


def read_constellation_csv(path):
    labels, pts = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty CSV")
        if header != CONSTELLATION_HEADER:
            raise ParseError(f"{path}: unexpected header {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 3:
                raise ParseError(f"{path}: wrong field count", line=lineno)
            try:
                labels.append(rec[0])
                pts.append(complex(float(rec[1]), float(rec[2])))
            except ValueError as exc:
                raise ParseError(f"{path}: {exc}", line=lineno) from None
    return labels, np.asarray(pts)


def write_run_record(path, config_doc, seeds, outputs):
    """Everything needed to re-run bit for bit: config, seeds, outputs."""
    from .. import __version__
    doc = {
        "config": config_doc,
        "seeds": seeds,
        "software_version": __version__,
        "timestamp_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": list(outputs),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
