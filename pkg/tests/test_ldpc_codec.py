import numpy as np
import pytest

from hybridcm.errors import ContractError
from hybridcm.ldpc5g import LdpcCode


@pytest.fixture(scope="module")
def code():
    return LdpcCode()


def test_dimensions(code):
    assert code.k == 528
    assert code.n_generated == 1104
    assert code.n_tx == 1056
    assert code.k / code.n_tx == 0.5  # exact rate identity


def test_all_zero_message(code):
    cw = code.encode(np.zeros(528, dtype=np.uint8))
    assert not cw.any()


def test_random_encodes_have_zero_syndrome(code):
    rng = np.random.default_rng(42)
    msgs = rng.integers(0, 2, size=(1000, 528), dtype=np.uint8)
    cws = code.encode_batch(msgs)
    assert not code.syndrome(cws).any()
    assert np.array_equal(cws[:, :528], msgs)  # systematic


def test_linearity(code):
    rng = np.random.default_rng(3)
    m1 = rng.integers(0, 2, 528, dtype=np.uint8)
    m2 = rng.integers(0, 2, 528, dtype=np.uint8)
    assert np.array_equal(code.encode(m1) ^ code.encode(m2), code.encode(m1 ^ m2))


def test_encode_batch_matches_single(code):
    rng = np.random.default_rng(4)
    msgs = rng.integers(0, 2, size=(5, 528), dtype=np.uint8)
    batch = code.encode_batch(msgs)
    for i in range(5):
        assert np.array_equal(batch[i], code.encode(msgs[i]))


def test_wrong_message_length(code):
    with pytest.raises(ContractError):
        code.encode(np.zeros(100, dtype=np.uint8))
    with pytest.raises(ContractError):
        code.encode_batch(np.zeros((2, 100), dtype=np.uint8))


def test_rate_match(code):
    cw = np.arange(1104) % 2
    tx = code.rate_match(cw)
    assert tx.shape == (1056,)
    assert tx[0] == cw[48]  # bit 48 of the codeword is bit 0 of the frame
    with pytest.raises(ContractError):
        code.rate_match(np.zeros(1056))


def test_depuncture(code):
    llrs = np.random.default_rng(0).standard_normal(1056)
    full = code.depuncture(llrs)
    assert full.shape == (1104,)
    assert not full[:48].any()          # zeros exactly at punctured slots
    assert full[48] == llrs[0]
    assert np.abs(full).sum() == pytest.approx(np.abs(llrs).sum())
    with pytest.raises(ContractError):
        code.depuncture(np.zeros(1104))


def test_puncture_depuncture_round_trip(code):
    rng = np.random.default_rng(1)
    cw = code.encode(rng.integers(0, 2, 528, dtype=np.uint8)).astype(np.float64)
    tx = code.rate_match(cw)
    rebuilt = code.depuncture(tx)
    assert np.array_equal(rebuilt[48:], cw[48:])


def test_all_zero_depuncture(code):
    out = code.depuncture(np.zeros(1056))
    assert out.shape == (1104,) and not out.any()


def test_syndrome_single_flip_weight(code):
    cw = np.zeros(1104, dtype=np.uint8)
    for bit in (0, 300, 1103):
        cw[bit] = 1
        syn = code.syndrome(cw)
        col_degree = int((code.H.edge_col == bit).sum())
        assert syn.sum() == col_degree
        cw[bit] = 0


def test_syndrome_length_mismatch(code):
    with pytest.raises(ContractError):
        code.syndrome(np.zeros(1000, dtype=np.uint8))
