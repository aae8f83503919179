import numpy as np
import pytest

from hybridcm.errors import ContractError
from hybridcm.modem import (
    make_gray_qam,
    qam_bit_llrs,
    qam_hard_decide,
    qam_modulate,
)


def brute_force_llrs(y, const, sigma2):
    """Independent double-loop oracle over every point and bit."""
    out = np.zeros(const.m)
    for i in range(const.m):
        num = 0.0
        den = 0.0
        for label, x in enumerate(const.points):
            w = np.exp(-abs(y - x) ** 2 / sigma2)
            if (label >> (const.m - 1 - i)) & 1:
                den += w
            else:
                num += w
        out[i] = np.log(num) - np.log(den)
    return out


def test_qpsk_points():
    const = make_gray_qam(4)
    expected = {(1 + 1j), (1 - 1j), (-1 + 1j), (-1 - 1j)}
    got = {complex(round(p.real * np.sqrt(2), 9), round(p.imag * np.sqrt(2), 9))
           for p in const.points}
    assert got == expected


def test_16qam_outer_magnitude():
    const = make_gray_qam(16)
    assert np.max(np.abs(const.points)) == pytest.approx(np.sqrt(18 / 10), rel=1e-12)
    corner = max(const.points, key=lambda p: (p.real, p.imag))
    assert corner.real == pytest.approx(0.9486832980505138, rel=1e-12)
    assert corner.imag == pytest.approx(0.9486832980505138, rel=1e-12)


@pytest.mark.parametrize("M", [4, 16, 64])
def test_unit_power(M):
    const = make_gray_qam(M)
    assert np.mean(np.abs(const.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert len(set(np.round(const.points, 12).tolist())) == M


@pytest.mark.parametrize("M", [4, 16, 64])
def test_gray_property_one_bit_between_axis_neighbors(M):
    const = make_gray_qam(M)
    pts = const.points
    d_min = min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:])
    for la, a in enumerate(pts):
        for lb, b in enumerate(pts):
            if lb <= la:
                continue
            if abs(abs(a - b) - d_min) < 1e-9:
                assert bin(la ^ lb).count("1") == 1


def test_modulate_lookup_and_bijection():
    const = make_gray_qam(4)
    assert qam_modulate([0, 0], const) == const.points[0]
    points = {qam_modulate(bits, const) for bits in const.bits_of_labels(np.arange(4))}
    assert len(points) == 4


def test_modulate_wrong_width():
    with pytest.raises(ContractError):
        qam_modulate([0, 1, 0], make_gray_qam(4))


def test_zero_received_gives_zero_llrs():
    const = make_gray_qam(4)
    llrs = qam_bit_llrs(0.0 + 0.0j, const, 0.5)
    assert np.allclose(llrs, 0.0, atol=1e-12)


def test_qpsk_closed_form():
    const = make_gray_qam(4)
    rng = np.random.default_rng(8)
    for _ in range(25):
        y = complex(*rng.standard_normal(2))
        s2 = float(rng.uniform(0.05, 2.0))
        llrs = qam_bit_llrs(y, const, s2)[0]
        assert llrs[0] == pytest.approx(2.0 * np.sqrt(2.0) * y.real / s2, abs=1e-9)
        assert llrs[1] == pytest.approx(2.0 * np.sqrt(2.0) * y.imag / s2, abs=1e-9)


@pytest.mark.parametrize("M", [16, 64])
def test_matches_brute_force_oracle(M):
    const = make_gray_qam(M)
    rng = np.random.default_rng(M)
    ys = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    s2 = 0.3
    fast = qam_bit_llrs(ys, const, s2)
    for j, y in enumerate(ys):
        assert np.allclose(fast[j], brute_force_llrs(y, const, s2), atol=1e-9)


@pytest.mark.parametrize("M", [4, 16, 64])
def test_llr_sign_matches_transmitted_bit_at_high_snr(M):
    const = make_gray_qam(M)
    llrs = qam_bit_llrs(const.points, const, 1e-3)
    bits = const.bits_of_labels(np.arange(M))
    # llr > 0 iff the transmitted bit is 0, for every point and bit
    assert np.all((llrs > 0) == (bits == 0))


def test_sigma_must_be_positive():
    with pytest.raises(ContractError):
        qam_bit_llrs(0j, make_gray_qam(4), 0.0)


def test_unsupported_order():
    with pytest.raises(ContractError):
        make_gray_qam(32)


def test_hard_decision_loopback():
    const = make_gray_qam(64)
    labels = np.arange(64)
    assert np.array_equal(qam_hard_decide(const.points, const), labels)
