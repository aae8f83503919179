import io

import numpy as np
import pytest

from hybridcm.errors import ContractError, ParseError
from hybridcm.ldpc5g import (
    ParityCheckMatrix,
    expand,
    load_base_graph,
    serialize_base_graph,
)
from hybridcm.ldpc5g.basegraph import BG1_COLS, BG1_ROWS


def test_shipped_table_dimensions():
    bg = load_base_graph()
    rows = {r for (r, _) in bg.entries}
    cols = {c for (_, c) in bg.entries}
    assert max(rows) == BG1_ROWS - 1 and max(cols) == BG1_COLS - 1
    assert len(bg.entries) == 316
    assert bg.zc == 24
    # exactly 22 systematic columns are used
    assert len({c for c in cols if c < 22}) == 22


def test_shifts_reduced_mod_zc():
    bg = load_base_graph()
    assert all(0 <= s < 24 for s in bg.entries.values())


def test_empty_file_rejected():
    with pytest.raises(ParseError):
        load_base_graph(io.StringIO("# nothing here\n"))


def test_malformed_line_carries_line_number():
    with pytest.raises(ParseError, match="line 2"):
        load_base_graph(io.StringIO("0 0 5\n0 1\n"))


def test_oversized_shift_rejected():
    with pytest.raises(ParseError, match="384"):
        load_base_graph(io.StringIO("0 0 384\n"))


def test_duplicate_entry_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        load_base_graph(io.StringIO("0 0 5\n0 0 7\n"))


def test_serialize_round_trip_is_canonical():
    bg = load_base_graph()
    text = serialize_base_graph(bg)
    bg2 = load_base_graph(io.StringIO(text))
    assert bg2.entries == bg.entries
    assert serialize_base_graph(bg2) == text


def test_expand_zero_exponent_is_identity_block():
    bg = load_base_graph()
    (r0, c0) = next((rc for rc, s in sorted(bg.entries.items()) if s == 0))
    H = expand(bg)
    zc = bg.zc
    block = H.to_dense()[r0 * zc:(r0 + 1) * zc, c0 * zc:(c0 + 1) * zc]
    assert np.array_equal(block, np.eye(zc, dtype=np.uint8))


def test_expand_single_block_cyclic_shift():
    from hybridcm.ldpc5g.basegraph import BaseGraph
    bg = BaseGraph({(0, 0): 1}, zc=3)
    H = expand(bg, zc=3, used_rows=1, used_cols=1)
    dense = H.to_dense()
    for r in range(3):
        assert dense[r, (r + 1) % 3] == 1
    assert dense.sum() == 3


def test_expand_nonzero_count():
    bg = load_base_graph()
    H = expand(bg)
    used = sum(1 for (r, c) in bg.entries if r < 24 and c < 46)
    assert H.n_edges == used * bg.zc


def test_every_lifted_block_is_cyclic_identity_or_zero():
    bg = load_base_graph()
    H = expand(bg)
    dense = H.to_dense()
    zc = bg.zc
    rng = np.random.default_rng(0)
    for _ in range(20):
        i = rng.integers(0, 24)
        j = rng.integers(0, 46)
        block = dense[i * zc:(i + 1) * zc, j * zc:(j + 1) * zc]
        if (i, j) in bg.entries:
            e = bg.entries[(i, j)]
            assert np.array_equal(block, np.roll(np.eye(zc, dtype=np.uint8), e, axis=1))
        else:
            assert not block.any()


def test_expand_zc_mismatch_rejected():
    bg = load_base_graph()
    with pytest.raises(ContractError):
        expand(bg, zc=12)


def test_pcm_validation():
    with pytest.raises(ContractError):
        ParityCheckMatrix(1, 3, [[0, 0]])   # duplicate
    with pytest.raises(ContractError):
        ParityCheckMatrix(1, 3, [[0, 5]])   # out of range
    with pytest.raises(ContractError):
        ParityCheckMatrix(2, 3, [[0, 1]])   # row count mismatch


def test_syndrome_shapes_and_single_flip():
    H = ParityCheckMatrix(2, 3, [[0, 1], [1, 2]])
    assert np.array_equal(H.syndrome([0, 0, 0]), [0, 0])
    assert np.array_equal(H.syndrome([1, 1, 1]), [0, 0])
    syn = H.syndrome([0, 1, 0])
    assert syn.sum() == 2  # column degree of bit 1
