import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oilbrush.errors import OutOfBounds
from oilbrush.raster import (
    SOBEL_DERIV, SOBEL_SMOOTH, connected_components, hsv_to_rgb, hue_distance,
    mean_filter, pixel, rgb_to_hsv, sobel_gradient, sobel_xy,
)


def px(rgb):
    return rgb_to_hsv(np.array([[rgb]], dtype=np.uint8))[0, 0]


@pytest.mark.parametrize(
    "rgb, hsv",
    [
        ((255, 0, 0), (0.0, 1.0, 255.0)),
        ((128, 128, 128), (0.0, 0.0, 128.0)),
        ((0, 255, 0), (2 * math.pi / 3, 1.0, 255.0)),
        ((0, 0, 255), (4 * math.pi / 3, 1.0, 255.0)),
        ((0, 0, 0), (0.0, 0.0, 0.0)),
    ],
)
def test_rgb_to_hsv_reference_colors(rgb, hsv):
    np.testing.assert_allclose(px(rgb), hsv, atol=1e-12)


def test_hsv_roundtrip_exhaustive():
    # all 2^24 colors, 2^20 at a time
    base = np.arange(1 << 24, dtype=np.uint32)
    for chunk in np.array_split(base, 16):
        rgb = np.stack([(chunk >> 16) & 255, (chunk >> 8) & 255, chunk & 255], axis=-1).astype(np.uint8)
        hsv = rgb_to_hsv(rgb)
        assert hsv[:, 0].min() >= 0 and hsv[:, 0].max() < 2 * math.pi
        assert np.array_equal(hsv_to_rgb(hsv), rgb)


def test_hue_distance_circular_and_literal():
    assert hue_distance(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)
    assert hue_distance(0.1, 2 * math.pi - 0.1, circular=False) == pytest.approx(2 * math.pi - 0.2)


def brute_correlate(img, kernel):
    """Edge-replicated 2-D correlation by explicit loops."""
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    pad = np.pad(img, ((ry, ry), (rx, rx)), mode="edge")
    out = np.zeros_like(img, dtype=np.float64)
    for y in range(img.shape[0]):
        for x in range(img.shape[1]):
            acc = 0.0
            for j in range(kh):
                for i in range(kw):
                    acc += kernel[j, i] * pad[y + j, x + i]
            out[y, x] = acc
    return out


def test_sobel_constant_is_zero():
    assert np.all(sobel_gradient(np.full((20, 30), 77.0)) == 0)


def test_sobel_ramp_matches_kernel_sum():
    ramp = np.tile(np.arange(40, dtype=np.float64), (30, 1))
    kx = np.outer(SOBEL_SMOOTH, SOBEL_DERIV)
    oracle = brute_correlate(ramp, kx)
    # hand sum: smoothing weights total 16, derivative taps give sum(d_i * i) = 8
    assert oracle[10, 10] == 128.0
    mag = sobel_gradient(ramp)
    np.testing.assert_allclose(mag[2:-2, 2:-2], 128.0)


def test_sobel_matches_brute_force_on_random():
    rng = np.random.default_rng(3)
    img = rng.uniform(0, 255, (17, 23))
    gx, gy = sobel_xy(img)
    np.testing.assert_allclose(gx, brute_correlate(img, np.outer(SOBEL_SMOOTH, SOBEL_DERIV)), atol=1e-9)
    np.testing.assert_allclose(gy, brute_correlate(img, np.outer(SOBEL_DERIV, SOBEL_SMOOTH)), atol=1e-9)


def test_sobel_vertical_step_edge():
    img = np.zeros((40, 40))
    img[:, 20:] = 255
    mag = sobel_gradient(img)
    band = mag[:, 18:22]
    assert band.max() == mag.max()
    assert np.all(mag[:, :16] == 0) and np.all(mag[:, 24:] == 0)


def test_mean_filter_constant_and_impulse():
    np.testing.assert_allclose(mean_filter(np.full((12, 9), 3.5)), 3.5)
    img = np.zeros((15, 15))
    img[7, 7] = 25.0
    out = mean_filter(img)
    expected = np.zeros_like(img)
    expected[5:10, 5:10] = 1.0
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_mean_filter_matches_brute_force_and_preserves_mass():
    rng = np.random.default_rng(11)
    img = np.zeros((24, 24))
    img[2:-2, 2:-2] = rng.uniform(0, 100, (20, 20))  # zero band: replication adds nothing
    out = mean_filter(img)
    np.testing.assert_allclose(out, brute_correlate(img, np.full((5, 5), 1 / 25)), atol=1e-9)
    assert out.mean() == pytest.approx(img.mean(), rel=1e-6)


pairs = arrays(np.float64, (12, 12), elements=st.floats(-100, 100))


@settings(max_examples=25, deadline=None)
@given(pairs, pairs, st.floats(-3, 3), st.floats(-3, 3))
def test_filters_are_linear(x, y, a, b):
    for f in (mean_filter, lambda z: sobel_xy(z)[0], lambda z: sobel_xy(z)[1]):
        lhs = f(a * x + b * y)
        rhs = a * f(x) + b * f(y)
        np.testing.assert_allclose(lhs, rhs, atol=1e-6 * (1 + np.abs(rhs).max()))


def test_connected_components_examples():
    assert connected_components(np.zeros((5, 5), dtype=bool)) == []
    diag = np.zeros((5, 5), dtype=bool)
    diag[1, 1] = diag[2, 2] = True
    assert len(connected_components(diag, connectivity=4)) == 2
    assert len(connected_components(diag, connectivity=8)) == 1
    block = np.zeros((20, 20), dtype=bool)
    block[10:13, 10:13] = True
    (comp,) = connected_components(block)
    assert comp.size == 9 and comp.centroid == (11, 11)


@settings(max_examples=40, deadline=None)
@given(arrays(np.bool_, (15, 17)))
def test_components_partition_mask(mask):
    comps = connected_components(mask)
    assert sum(c.size for c in comps) == int(mask.sum())


def test_pixel_read_rejects_out_of_range():
    img = np.zeros((4, 5))
    assert pixel(img, 4, 3) == 0
    for x, y in [(-1, 0), (0, -1), (5, 0), (0, 4)]:
        with pytest.raises(OutOfBounds):
            pixel(img, x, y)
