"""Edge tangent flow: gradient field rotated by 90 degrees, then modulus-weighted smoothing."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import check_bounds, round_half_up, sobel_xy

DEFAULT_RADIUS = 5
DEFAULT_ITERATIONS = 3


@dataclass(frozen=True)
class EtfField:
    angle: np.ndarray  # radians in [0, pi), a line direction
    modulus: np.ndarray  # gradient magnitude, >= 0


def canonical_angle(a):
    """Map angles onto [0, pi)."""
    out = np.mod(a, math.pi)
    return np.where(out >= math.pi, 0.0, out)


def disk_kernel(radius: int) -> np.ndarray:
    r = int(radius)
    ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
    return (xs * xs + ys * ys <= r * r).astype(np.float64)


def smooth_directions(
    angle: np.ndarray, modulus: np.ndarray, radius: int, iterations: int
) -> np.ndarray:
    """Average directions mod pi over a disk, each neighbor weighted by its modulus.

    Averaging happens on doubled angles so that a and a + pi agree. Pixels
    whose window carries no net direction keep their angle.
    """
    if iterations <= 0 or radius <= 0:
        return angle.copy()
    kernel = disk_kernel(radius)
    weight = ndimage.correlate(modulus, kernel, mode="nearest")
    cur = angle.copy()
    for _ in range(iterations):
        c = ndimage.correlate(modulus * np.cos(2.0 * cur), kernel, mode="nearest")
        s = ndimage.correlate(modulus * np.sin(2.0 * cur), kernel, mode="nearest")
        mag = np.hypot(c, s)
        ok = (weight > 0) & (mag > 1e-12 * np.maximum(weight, 1.0))
        new = canonical_angle(0.5 * np.arctan2(s, c))
        cur = np.where(ok, new, cur)
    return cur


def compute_etf(
    gray: np.ndarray,
    radius: int = DEFAULT_RADIUS,
    iterations: int = DEFAULT_ITERATIONS,
) -> EtfField:
    gx, gy = sobel_xy(gray)
    modulus = np.hypot(gx, gy)
    tangent = canonical_angle(np.arctan2(gy, gx) + math.pi / 2.0)
    angle = smooth_directions(tangent, modulus, radius, iterations)
    return EtfField(angle=angle, modulus=modulus)


def constant_field(shape: tuple[int, int], angle: float, modulus: np.ndarray | None = None) -> EtfField:
    """Every pixel points along ``angle`` (radians); for direction ablations."""
    a = float(canonical_angle(angle))
    mod = np.zeros(shape) if modulus is None else modulus
    return EtfField(angle=np.full(shape, a), modulus=mod)


def random_field(
    shape: tuple[int, int], rng: np.random.Generator, modulus: np.ndarray | None = None
) -> EtfField:
    angle = rng.uniform(0.0, math.pi, size=shape)
    mod = np.zeros(shape) if modulus is None else modulus
    return EtfField(angle=canonical_angle(angle), modulus=mod)


def direction_at(field: EtfField, anchor: tuple[float, float]) -> float:
    x = round_half_up(anchor[0])
    y = round_half_up(anchor[1])
    check_bounds(field.angle.shape, x, y)
    return float(field.angle[y, x])


def angular_error(a, b):
    """Absolute difference between two line directions, mod pi, in [0, pi/2]."""
    d = np.mod(np.asarray(a) - np.asarray(b), math.pi)
    return np.minimum(d, math.pi - d)
