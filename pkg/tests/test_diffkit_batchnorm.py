import numpy as np
import pytest

from hybridcm import diffkit as dk
from hybridcm.errors import ContractError


def test_two_sample_column_normalizes():
    st = dk.BatchNormState(1)
    x = dk.Tensor([[1.0], [3.0]])
    out = dk.batch_norm(x, st, "train")
    assert np.allclose(out.data[:, 0], [-1.0, 1.0], atol=1e-2)  # eps-corrected


def test_running_mean_ema():
    st = dk.BatchNormState(1, momentum=0.1)
    x = dk.Tensor([[1.0], [3.0]])  # batch mean 2
    dk.batch_norm(x, st, "train")
    assert st.run_mean[0] == pytest.approx(0.2)


def test_infer_identity_with_unit_stats():
    st = dk.BatchNormState(3, eps=1e-12)
    x = dk.Tensor(np.random.default_rng(0).standard_normal((5, 3)))
    out = dk.batch_norm(x, st, "infer")
    assert np.allclose(out.data, x.data, atol=1e-9)


def test_train_needs_two_samples():
    st = dk.BatchNormState(2)
    with pytest.raises(ContractError):
        dk.batch_norm(dk.Tensor(np.ones((1, 2))), st, "train")


def test_train_output_statistics_match_gamma_beta():
    rng = np.random.default_rng(2)
    st = dk.BatchNormState(4, eps=1e-12)
    st.gamma.data = np.array([1.0, 2.0, 0.5, 3.0])
    st.beta.data = np.array([0.0, -1.0, 2.0, 0.25])
    x = dk.Tensor(rng.standard_normal((64, 4)) * 5 + 1)
    out = dk.batch_norm(x, st, "train")
    assert np.allclose(out.data.mean(axis=0), st.beta.data, atol=1e-6)
    assert np.allclose(out.data.var(axis=0), st.gamma.data ** 2, atol=1e-6)


def test_train_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    st = dk.BatchNormState(2)
    x = dk.Tensor(rng.standard_normal((6, 2)))
    st.gamma.data = rng.uniform(0.5, 1.5, 2)
    st.beta.data = rng.standard_normal(2)
    target = rng.standard_normal((6, 2))

    def build():
        out = dk.batch_norm(x, st, "train")
        diff = dk.sub(out, dk.Tensor(target))
        return dk.tsum(dk.mul(diff, diff))

    params = [("x", x), ("gamma", st.gamma), ("beta", st.beta)]
    assert dk.grad_check(build, params, h=1e-6) < 1e-7


def test_infer_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    st = dk.BatchNormState(2)
    st.run_mean = rng.standard_normal(2)
    st.run_var = rng.uniform(0.5, 2.0, 2)
    x = dk.Tensor(rng.standard_normal((3, 2)))

    def build():
        out = dk.batch_norm(x, st, "infer")
        return dk.tsum(dk.mul(out, out))

    params = [("x", x), ("gamma", st.gamma), ("beta", st.beta)]
    assert dk.grad_check(build, params, h=1e-6) < 1e-7


def test_bad_mode_and_bad_momentum():
    with pytest.raises(ContractError):
        dk.batch_norm(dk.Tensor(np.ones((2, 1))), dk.BatchNormState(1), "test")
    with pytest.raises(ContractError):
        dk.BatchNormState(1, momentum=1.5)
    with pytest.raises(ContractError):
        dk.BatchNormState(1, eps=0.0)
