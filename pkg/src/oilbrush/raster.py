"""Raster helpers shared by the rest of the package.

Rasters are plain numpy arrays indexed ``[y, x]`` (row-major). Color rasters
are ``uint8`` with shape ``(H, W, 3)``; HSV rasters are ``float64`` with
channels ``(h, s, v)`` where ``h`` is in radians on ``[0, 2*pi)``, ``s`` in
``[0, 1]`` and ``v`` in ``[0, 255]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import OutOfBounds

TWO_PI = 2.0 * math.pi

SOBEL_SMOOTH = np.array([1.0, 4.0, 6.0, 4.0, 1.0])
SOBEL_DERIV = np.array([-1.0, -2.0, 0.0, 2.0, 1.0])

# 4- and 8-connectivity structuring elements for labeling
_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


class HsvPixel(NamedTuple):
    h: float
    s: float
    v: float


@dataclass(frozen=True)
class Component:
    label: int
    size: int
    centroid: tuple[int, int]  # (x, y), rounded half-up


def round_half_up(v):
    """Round to the nearest integer, halves going up. Works on scalars and arrays."""
    if isinstance(v, np.ndarray):
        return np.floor(v + 0.5).astype(np.int64)
    return int(math.floor(v + 0.5))


def check_bounds(shape, x: int, y: int) -> None:
    h, w = shape[:2]
    if not (0 <= x < w and 0 <= y < h):
        raise OutOfBounds(f"pixel ({x}, {y}) outside {w}x{h} raster")


def pixel(img: np.ndarray, x: int, y: int):
    """Bounds-checked pixel read; negative indices are an error, not a wrap."""
    check_bounds(img.shape, x, y)
    return img[y, x]


def load_rgb(path) -> np.ndarray:
    with Image.open(Path(path)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def save_rgb(path, img: np.ndarray) -> None:
    Image.fromarray(np.ascontiguousarray(img, dtype=np.uint8), mode="RGB").save(
        Path(path), format="PNG"
    )


def to_gray(rgb: np.ndarray) -> np.ndarray:
    """ITU-R BT.601 luma as float64 in [0, 255]."""
    rgb = rgb.astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    d = mx - mn
    safe_d = np.where(d > 0, d, 1.0)

    hue = np.zeros_like(mx)
    is_r = (mx == r) & (d > 0)
    is_g = (mx == g) & (d > 0) & ~is_r
    is_b = (d > 0) & ~is_r & ~is_g
    hue = np.where(is_r, np.mod((g - b) / safe_d, 6.0), hue)
    hue = np.where(is_g, (b - r) / safe_d + 2.0, hue)
    hue = np.where(is_b, (r - g) / safe_d + 4.0, hue)
    hue = hue * (math.pi / 3.0)
    hue = np.where(hue >= TWO_PI, hue - TWO_PI, hue)

    sat = np.where(mx > 0, d / np.where(mx > 0, mx, 1.0), 0.0)
    return np.stack([hue, sat, mx], axis=-1)


def hsv_to_rgb_float(hsv: np.ndarray) -> np.ndarray:
    hsv = np.asarray(hsv, dtype=np.float64)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    hp = np.mod(h, TWO_PI) / (math.pi / 3.0)
    c = v * s
    x = c * (1.0 - np.abs(np.mod(hp, 2.0) - 1.0))
    m = v - c
    sector = np.minimum(np.floor(hp).astype(np.int64), 5)
    zero = np.zeros_like(c)
    # (r, g, b) before adding m, per 60-degree sector
    table = [
        (c, x, zero),
        (x, c, zero),
        (zero, c, x),
        (zero, x, c),
        (x, zero, c),
        (c, zero, x),
    ]
    out = np.empty(h.shape + (3,), dtype=np.float64)
    for ch in range(3):
        out[..., ch] = np.choose(sector, [t[ch] for t in table]) + m
    return out


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    rgb = hsv_to_rgb_float(hsv)
    return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def hue_distance(h1, h2, circular: bool = True):
    d = np.abs(np.asarray(h1, dtype=np.float64) - np.asarray(h2, dtype=np.float64))
    if circular:
        d = np.mod(d, TWO_PI)
        d = np.minimum(d, TWO_PI - d)
    return d


def sobel_xy(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """5x5 Sobel derivatives (unnormalized), edge-replicated borders.

    ``gx`` is positive where intensity increases with x (rightwards),
    ``gy`` where it increases with y (downwards).
    """
    gray = np.asarray(gray, dtype=np.float64)
    gx = ndimage.correlate1d(gray, SOBEL_DERIV, axis=1, mode="nearest")
    gx = ndimage.correlate1d(gx, SOBEL_SMOOTH, axis=0, mode="nearest")
    gy = ndimage.correlate1d(gray, SOBEL_DERIV, axis=0, mode="nearest")
    gy = ndimage.correlate1d(gy, SOBEL_SMOOTH, axis=1, mode="nearest")
    return gx, gy


def sobel_gradient(gray: np.ndarray) -> np.ndarray:
    gx, gy = sobel_xy(gray)
    return np.hypot(gx, gy)


def mean_filter(img: np.ndarray, window: int = 5) -> np.ndarray:
    return ndimage.uniform_filter(
        np.asarray(img, dtype=np.float64), size=window, mode="nearest"
    )


def label_components(mask: np.ndarray, connectivity: int = 4) -> tuple[np.ndarray, list[Component]]:
    """Label the true pixels of ``mask``; returns the label raster and one Component per region."""
    mask = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(mask, structure=_STRUCTURES[connectivity])
    if n == 0:
        return labels, []
    ys, xs = np.nonzero(labels)
    lab = labels[ys, xs]
    sizes = np.bincount(lab, minlength=n + 1)
    cx = np.bincount(lab, weights=xs, minlength=n + 1)
    cy = np.bincount(lab, weights=ys, minlength=n + 1)
    comps = []
    for i in range(1, n + 1):
        size = int(sizes[i])
        centroid = (round_half_up(cx[i] / size), round_half_up(cy[i] / size))
        comps.append(Component(label=i, size=size, centroid=centroid))
    return labels, comps


def connected_components(mask: np.ndarray, connectivity: int = 4) -> list[Component]:
    return label_components(mask, connectivity)[1]
