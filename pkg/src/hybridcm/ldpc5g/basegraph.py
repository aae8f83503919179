"""Base-graph loading and lifting into a sparse parity-check matrix.

The shipped table is base graph 1 for the lifting-size set containing
Z_c = 24. Only the top-left 24 x 46 submatrix is used: 22 systematic
columns plus 24 parity columns at Z_c = 24 give generated length 1104
and 528 message bits, the rate-1/2 configuration this package targets.
"""

from importlib import resources

import numpy as np

from ..errors import ContractError, ParseError

BG1_ROWS = 46
BG1_COLS = 68
SYSTEMATIC_COLS = 22
MAX_SHIFT = 384
LIFT_SET = (3, 6, 12, 24, 48, 96, 192, 384)

USED_ROWS = 24
USED_COLS = 46
DEFAULT_ZC = 24


class BaseGraph:
    """Grid of cyclic-shift exponents, already reduced mod Z_c."""

    def __init__(self, entries, zc, graph_id="BG1", shift_set=1):
        self.entries = dict(entries)  # (row, col) -> shift in [0, zc)
        self.zc = zc
        self.graph_id = graph_id
        self.shift_set = shift_set
        for (r, c), s in self.entries.items():
            if not (0 <= r < BG1_ROWS and 0 <= c < BG1_COLS):
                raise ContractError(f"entry ({r},{c}) outside {BG1_ROWS}x{BG1_COLS}")
            if not (0 <= s < zc):
                raise ContractError(f"shift {s} at ({r},{c}) not in [0,{zc})")

    @property
    def n_rows(self):
        return BG1_ROWS

    @property
    def n_cols(self):
        return BG1_COLS

    @property
    def n_systematic(self):
        return SYSTEMATIC_COLS


def load_base_graph(source=None, zc=DEFAULT_ZC):
    """Parse a `row col shift` table into a BaseGraph.

    ``source`` is a path or an open text file; None loads the shipped BG1
    table. Shifts are validated against the full-size set bound (384) and
    reduced mod ``zc``.
    """
    if zc not in LIFT_SET:
        raise ContractError(f"Z_c {zc} not in the shipped lifting set {LIFT_SET}")
    if source is None:
        with resources.files("hybridcm.ldpc5g").joinpath("data/bg1_set1.txt").open() as fh:
            return _parse(fh, zc)
    if hasattr(source, "read"):
        return _parse(source, zc)
    with open(source, "r", encoding="utf-8") as fh:
        return _parse(fh, zc)


def _parse(fh, zc):
    entries = {}
    count = 0
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'row col shift', got {line!r}", line=lineno)
        try:
            r, c, s = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", line=lineno) from None
        if not (0 <= r < BG1_ROWS and 0 <= c < BG1_COLS):
            raise ParseError(f"position ({r},{c}) outside base graph", line=lineno)
        if not (0 <= s < MAX_SHIFT):
            raise ParseError(f"shift {s} outside [0,{MAX_SHIFT})", line=lineno)
        if (r, c) in entries:
            raise ParseError(f"duplicate entry for ({r},{c})", line=lineno)
        entries[(r, c)] = s % zc
        count += 1
    if count == 0:
        raise ParseError("no entries found in base-graph table")
    used_cols = {c for (_, c) in entries}
    sys_cols = {c for c in used_cols if c < SYSTEMATIC_COLS}
    if len(sys_cols) != SYSTEMATIC_COLS:
        raise ParseError(
            f"expected {SYSTEMATIC_COLS} systematic columns, found {len(sys_cols)}")
    return BaseGraph(entries, zc)


def serialize_base_graph(bg):
    """Canonical text form: sorted entries, reduced shifts, no comments."""
    lines = [f"{r} {c} {s}" for (r, c), s in sorted(bg.entries.items())]
    return "\n".join(lines) + "\n"


class ParityCheckMatrix:
    """Sparse binary H stored as per-row sorted column-index lists.

    Also carries the flat edge arrays the message-passing decoder uses:
    edges sorted by row with ``row_ptr`` boundaries, plus the permutation
    into column-sorted order with ``col_ptr`` boundaries.
    """

    def __init__(self, n_rows, n_cols, row_cols):
        if len(row_cols) != n_rows:
            raise ContractError("row list count does not match n_rows")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.row_cols = []
        for r, cols in enumerate(row_cols):
            arr = np.asarray(sorted(cols), dtype=np.int64)
            if arr.size and (arr.min() < 0 or arr.max() >= n_cols):
                raise ContractError(f"row {r} has column index outside [0,{n_cols})")
            if arr.size != len(set(arr.tolist())):
                raise ContractError(f"row {r} has duplicate column indices")
            self.row_cols.append(arr)
        degrees = np.array([len(c) for c in self.row_cols], dtype=np.int64)
        self.edge_col = (np.concatenate(self.row_cols)
                         if degrees.sum() else np.zeros(0, dtype=np.int64))
        self.edge_row = np.repeat(np.arange(n_rows, dtype=np.int64), degrees)
        self.row_ptr = np.concatenate(([0], np.cumsum(degrees)))
        # stable sort keeps row order within each column: deterministic sweeps
        self.col_perm = np.argsort(self.edge_col, kind="stable")
        col_degrees = np.bincount(self.edge_col, minlength=n_cols)
        self.col_ptr = np.concatenate(([0], np.cumsum(col_degrees)))
        self.n_edges = int(self.edge_col.size)

    def syndrome(self, bits):
        """H c^T over GF(2); accepts a single frame or a (B, n) batch."""
        bits = np.asarray(bits)
        squeeze = bits.ndim == 1
        if squeeze:
            bits = bits[None, :]
        if bits.shape[1] != self.n_cols:
            raise ContractError(
                f"syndrome: frame length {bits.shape[1]} != {self.n_cols}")
        vals = bits[:, self.edge_col].astype(np.int64)
        sums = np.add.reduceat(vals, self.row_ptr[:-1], axis=1)
        syn = (sums % 2).astype(np.uint8)
        return syn[0] if squeeze else syn

    def to_dense(self):
        H = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        H[self.edge_row, self.edge_col] = 1
        return H


def expand(bg, zc=DEFAULT_ZC, used_rows=USED_ROWS, used_cols=USED_COLS):
    """Lift the truncated base graph into the binary parity-check matrix.

    Block (i, j) with exponent e becomes the Z_c x Z_c identity cyclically
    shifted by e: row r of the block has its one at column (r + e) mod Z_c.
    """
    if zc != bg.zc:
        raise ContractError(f"Z_c {zc} does not match the loaded table ({bg.zc})")
    row_cols = [[] for _ in range(used_rows * zc)]
    for (i, j), e in sorted(bg.entries.items()):
        if i >= used_rows or j >= used_cols:
            continue
        for r in range(zc):
            row_cols[i * zc + r].append(j * zc + (r + e) % zc)
    return ParityCheckMatrix(used_rows * zc, used_cols * zc, row_cols)
