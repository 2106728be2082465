"""Wavelet and DCT kernels: hand values, oracles, inversion, energy."""

import numpy as np
import pytest
import scipy.fft

from roimark.exceptions import ValidationError
from roimark.transforms import (
    dct2,
    dwt2,
    dwt2_two_level,
    idct2,
    idwt2,
    idwt2_two_level,
)


def _naive_dwt2(x):
    """Per-tile loop transcription of the 2x2 butterfly."""
    h, w = x.shape
    ll = np.zeros((h // 2, w // 2))
    lh = np.zeros_like(ll)
    hl = np.zeros_like(ll)
    hh = np.zeros_like(ll)
    for i in range(h // 2):
        for j in range(w // 2):
            a, b = x[2 * i, 2 * j], x[2 * i, 2 * j + 1]
            c, d = x[2 * i + 1, 2 * j], x[2 * i + 1, 2 * j + 1]
            ll[i, j] = (a + b + c + d) / 2
            lh[i, j] = (a + c - b - d) / 2
            hl[i, j] = (a + b - c - d) / 2
            hh[i, j] = (a - b - c + d) / 2
    return ll, lh, hl, hh


# ---------------------------------------------------------------------------
# single-level DWT

def test_dwt2_constant_block():
    ll, lh, hl, hh = dwt2(np.full((8, 8), 0.3))
    np.testing.assert_allclose(ll, 0.6, atol=1e-15)
    for band in (lh, hl, hh):
        np.testing.assert_allclose(band, 0.0, atol=1e-15)


def test_dwt2_single_tile_hand_values():
    ll, lh, hl, hh = dwt2(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert (ll[0, 0], lh[0, 0], hl[0, 0], hh[0, 0]) == (0.5, 0.5, 0.5, 0.5)


def test_dwt2_matches_naive_loop():
    rng = np.random.default_rng(0)
    x = rng.random((16, 12))
    for got, want in zip(dwt2(x), _naive_dwt2(x)):
        np.testing.assert_allclose(got, want, atol=1e-15)


def test_dwt2_energy_preserved():
    rng = np.random.default_rng(1)
    x = rng.random((64, 64))
    bands = dwt2(x)
    assert sum(float((b**2).sum()) for b in bands) == pytest.approx(
        float((x**2).sum()), rel=1e-12
    )


def test_dwt2_rejects_odd_sides():
    with pytest.raises(ValidationError):
        dwt2(np.zeros((7, 8)))


def test_idwt2_inverts_dwt2():
    rng = np.random.default_rng(2)
    x = rng.random((128, 128))
    assert np.abs(idwt2(*dwt2(x)) - x).max() <= 1e-9


def test_idwt2_zero_subbands():
    z = np.zeros((4, 4))
    np.testing.assert_array_equal(idwt2(z, z, z, z), np.zeros((8, 8)))


def test_idwt2_constant_ll_only():
    v = 0.35
    ll = np.full((4, 4), 2 * v)
    z = np.zeros((4, 4))
    np.testing.assert_allclose(idwt2(ll, z, z, z), v, atol=1e-15)


def test_idwt2_rejects_shape_mismatch():
    with pytest.raises(ValidationError):
        idwt2(np.zeros((4, 4)), np.zeros((4, 4)), np.zeros((4, 4)), np.zeros((2, 2)))


# ---------------------------------------------------------------------------
# two-level pyramid

def test_two_level_shapes_and_roundtrip():
    rng = np.random.default_rng(3)
    x = rng.random((128, 128))
    p = dwt2_two_level(x)
    assert p.lh1.shape == (64, 64)
    for band in p.level2_details():
        assert band.shape == (32, 32)
    assert np.abs(idwt2_two_level(p) - x).max() <= 1e-9


def test_two_level_constant_gives_4v_ll():
    p = dwt2_two_level(np.full((128, 128), 0.2))
    np.testing.assert_allclose(p.ll2, 0.8, atol=1e-12)


def test_two_level_rejects_bad_size():
    with pytest.raises(ValidationError):
        dwt2_two_level(np.zeros((126, 126)))


def test_two_level_batched_matches_loop():
    rng = np.random.default_rng(4)
    stack = rng.random((5, 16, 16))
    batched = dwt2_two_level(stack)
    for i in range(5):
        single = dwt2_two_level(stack[i])
        np.testing.assert_array_equal(batched.hh2[i], single.hh2)


# ---------------------------------------------------------------------------
# DCT

def test_dct2_constant_block():
    c = dct2(np.full((8, 8), 0.5))
    assert c[0, 0] == pytest.approx(4.0, abs=1e-12)
    c[0, 0] = 0.0
    assert np.abs(c).max() <= 1e-12


def test_dct2_delta_matches_basis_formula():
    delta = np.zeros((8, 8))
    delta[0, 0] = 1.0
    got = dct2(delta)
    scale = np.where(np.arange(8) == 0, np.sqrt(1 / 8), np.sqrt(2 / 8))
    want = np.outer(
        scale * np.cos(np.pi * np.arange(8) / 16),
        scale * np.cos(np.pi * np.arange(8) / 16),
    )
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_dct2_matches_scipy_ortho():
    rng = np.random.default_rng(5)
    x = rng.random((8, 8))
    np.testing.assert_allclose(dct2(x), scipy.fft.dctn(x, type=2, norm="ortho"), atol=1e-12)
    np.testing.assert_allclose(idct2(x), scipy.fft.idctn(x, type=2, norm="ortho"), atol=1e-12)


def test_dct2_parseval():
    rng = np.random.default_rng(6)
    x = rng.random((8, 8))
    assert float((dct2(x) ** 2).sum()) == pytest.approx(float((x**2).sum()), rel=1e-12)


def test_idct2_inverts_dct2():
    rng = np.random.default_rng(7)
    x = rng.random((8, 8))
    assert np.abs(idct2(dct2(x)) - x).max() <= 1e-12


def test_dct2_batched_matches_loop():
    rng = np.random.default_rng(8)
    stack = rng.random((6, 8, 8))
    batched = dct2(stack)
    for i in range(6):
        np.testing.assert_array_equal(batched[i], dct2(stack[i]))


def test_dct2_rejects_wrong_shape():
    with pytest.raises(ValidationError):
        dct2(np.zeros((4, 4)))


def test_transforms_are_linear():
    rng = np.random.default_rng(9)
    x, y = rng.random((8, 8)), rng.random((8, 8))
    a, b = 1.7, -0.4
    np.testing.assert_allclose(
        dct2(a * x + b * y), a * dct2(x) + b * dct2(y), atol=1e-9
    )
    got = dwt2(a * x + b * y)
    for band, bx, by in zip(got, dwt2(x), dwt2(y)):
        np.testing.assert_allclose(band, a * bx + b * by, atol=1e-9)
