import numpy as np
import pytest

from hybridcm import diffkit as dk
from hybridcm.errors import ContractError


def test_adam_first_step_bias_corrected():
    st = dk.OptimizerState(lr=0.1)
    w = np.array([0.0])
    dk.adam_step(st, [("w", w)], [np.array([1.0])])
    assert w[0] == pytest.approx(-0.1, rel=1e-6)
    assert st.t == 1


def test_zero_gradient_zero_update():
    st = dk.OptimizerState(lr=0.1)
    w = np.array([1.5])
    dk.adam_step(st, [("w", w)], [np.array([0.0])])
    assert w[0] == 1.5


def test_equal_gradients_equal_updates():
    st = dk.OptimizerState(lr=0.05)
    a, b = np.array([1.0]), np.array([1.0])
    g = np.array([0.7])
    dk.adam_step(st, [("a", a), ("b", b)], [g.copy(), g.copy()])
    assert a[0] == b[0]


def test_adamw_zero_decay_reduces_to_adam():
    st1, st2 = dk.OptimizerState(lr=0.01), dk.OptimizerState(lr=0.01)
    w1, w2 = np.array([2.0]), np.array([2.0])
    g = np.array([0.3])
    for _ in range(5):
        dk.adam_step(st1, [("w", w1)], [g])
        dk.adamw_step(st2, [("w", w2)], [g], lam=0.0)
    assert w1[0] == w2[0]


def test_adamw_pure_decay_term():
    st = dk.OptimizerState(lr=0.1)
    w = np.array([1.0])
    dk.adamw_step(st, [("w", w)], [np.array([0.0])], lam=0.01)
    assert w[0] == pytest.approx(1.0 - 0.001, rel=1e-12)


def test_adamw_accepts_large_coefficient():
    st = dk.OptimizerState(lr=0.1, weight_decay=0.2)
    w = np.array([1.0])
    dk.adamw_step(st, [("w", w)], [np.array([0.1])])
    assert np.isfinite(w[0]) and w[0] < 1.0


def test_non_finite_gradient_rejected_with_name():
    st = dk.OptimizerState()
    w = np.array([1.0])
    with pytest.raises(ContractError, match="enc/W"):
        dk.adam_step(st, [("enc/W", w)], [np.array([np.nan])])
    assert st.t == 0 and w[0] == 1.0  # step not applied


def test_negative_decay_rejected():
    with pytest.raises(ContractError):
        dk.OptimizerState(weight_decay=-0.1)
    with pytest.raises(ContractError):
        dk.adamw_step(dk.OptimizerState(), [("w", np.array([1.0]))],
                      [np.array([0.0])], lam=-1.0)


class TestLrSchedule:
    def test_endpoints(self):
        assert dk.lr_schedule(0, 1000) == 0.1
        assert dk.lr_schedule(1000, 1000) == 0.001

    def test_sixty_percent_is_middle_step(self):
        assert dk.lr_schedule(600, 1000) == pytest.approx(0.01)

    def test_monotone_non_increasing(self):
        for shape in ("steps", "linear", "cosine"):
            vals = [dk.lr_schedule(s, 500, shape=shape) for s in range(501)]
            assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
            assert vals[0] == pytest.approx(0.1)
            assert vals[-1] == pytest.approx(0.001)

    def test_bad_range_rejected(self):
        with pytest.raises(ContractError):
            dk.lr_schedule(0, 10, lr_max=0.001, lr_min=0.1)
        with pytest.raises(ContractError):
            dk.lr_schedule(11, 10)


def test_grad_check_quadratic_is_exact():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3))
    A = A + A.T
    x = dk.Tensor(rng.standard_normal((1, 3)))

    def build():
        return dk.tsum(dk.mul(dk.matmul(x, dk.Tensor(A)), x))

    assert dk.grad_check(build, [("x", x)]) < 1e-10
