"""Per-anchor stroke parameters: ETF direction, searched extents, anchor color."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .etf import EtfField, direction_at
from .raster import HsvPixel, TWO_PI, check_bounds, round_half_up

T_HUE = math.pi / 3.0
T_VALUE = 15.0
STEP = 1.0


@dataclass(frozen=True)
class SearchLimits:
    min_width: float
    max_width: float
    min_length: float
    max_length: float

    @classmethod
    def for_probability(cls, p: float, p_max: float) -> "SearchLimits":
        if not (0.0 < p <= p_max):
            raise ValueError(f"need 0 < p <= p_max, got p={p}, p_max={p_max}")
        return cls(
            min_width=p_max ** -0.5,
            max_width=p ** -0.5,
            min_length=3.0 * p_max ** -0.5,
            max_length=3.0 * p ** -0.5,
        )

    def clamp_length(self, v: float) -> float:
        return min(max(v, self.min_length), self.max_length)

    def clamp_width(self, v: float) -> float:
        return min(max(v, self.min_width), self.max_width)


@dataclass(frozen=True)
class StrokeParams:
    x: float
    y: float
    theta: float
    l1: float  # along theta
    l2: float  # along theta + pi
    w1: float  # along theta + pi/2
    w2: float  # along theta - pi/2
    color: HsvPixel

    @property
    def length(self) -> float:
        return self.l1 + self.l2

    @property
    def width(self) -> float:
        return self.w1 + self.w2

    @property
    def area(self) -> float:
        return self.length * self.width


@njit(cache=True)
def _walk(hue, val, x0, y0, ca, sa, step, t_h, t_v, circular, max_len):
    h, w = hue.shape
    xr = int(math.floor(x0 + 0.5))
    yr = int(math.floor(y0 + 0.5))
    h0 = hue[yr, xr]
    v0 = val[yr, xr]
    n = 0
    while True:
        n += 1
        length = n * step
        if length >= max_len:
            return length
        px = int(math.floor(x0 + length * ca + 0.5))
        py = int(math.floor(y0 + length * sa + 0.5))
        if px < 0 or py < 0 or px >= w or py >= h:
            return length
        dh = abs(hue[py, px] - h0)
        if circular:
            dh = dh % (2.0 * math.pi)
            dh = min(dh, 2.0 * math.pi - dh)
        if not (dh < t_h and abs(val[py, px] - v0) < t_v):
            return length


def search_length(
    anchor: tuple[float, float],
    alpha: float,
    hsv: np.ndarray,
    t_h: float = T_HUE,
    t_v: float = T_VALUE,
    delta: float = STEP,
    *,
    circular_hue: bool = True,
    max_length: float = math.inf,
) -> float:
    """Walk from ``anchor`` along ``alpha`` while hue and value stay close to the anchor's.

    The n-th probe sits at ``anchor + n*delta*(cos alpha, sin alpha)`` and reads
    the nearest pixel. The returned length counts the probe that failed (or
    left the image). ``max_length`` stops the walk early; any value at or
    above the cap clamps to the same extent.
    """
    x0, y0 = float(anchor[0]), float(anchor[1])
    check_bounds(hsv.shape, round_half_up(x0), round_half_up(y0))
    hue = np.ascontiguousarray(hsv[..., 0])
    val = np.ascontiguousarray(hsv[..., 2])
    return float(
        _walk(hue, val, x0, y0, math.cos(alpha), math.sin(alpha), float(delta),
              float(t_h), float(t_v), bool(circular_hue), float(max_length))
    )


class StrokeSearcher:
    """Holds the contiguous H and V planes so many anchors can be searched cheaply."""

    def __init__(self, hsv: np.ndarray, etf: EtfField, p_max: float,
                 t_h: float = T_HUE, t_v: float = T_VALUE, delta: float = STEP,
                 circular_hue: bool = True):
        self.hsv = hsv
        self.hue = np.ascontiguousarray(hsv[..., 0])
        self.val = np.ascontiguousarray(hsv[..., 2])
        self.etf = etf
        self.p_max = p_max
        self.t_h = float(t_h)
        self.t_v = float(t_v)
        self.delta = float(delta)
        self.circular = bool(circular_hue)

    def _len(self, x0, y0, alpha, cap):
        return _walk(self.hue, self.val, x0, y0, math.cos(alpha), math.sin(alpha),
                     self.delta, self.t_h, self.t_v, self.circular, cap)

    def build(self, anchor: tuple[float, float], p: float) -> StrokeParams:
        x0, y0 = float(anchor[0]), float(anchor[1])
        xr, yr = round_half_up(x0), round_half_up(y0)
        check_bounds(self.hsv.shape, xr, yr)
        lim = SearchLimits.for_probability(p, self.p_max)
        theta = direction_at(self.etf, (x0, y0))
        half = math.pi / 2.0
        l1 = lim.clamp_length(self._len(x0, y0, theta, lim.max_length))
        l2 = lim.clamp_length(self._len(x0, y0, theta + math.pi, lim.max_length))
        w1 = lim.clamp_width(self._len(x0, y0, theta + half, lim.max_width))
        w2 = lim.clamp_width(self._len(x0, y0, theta - half, lim.max_width))
        h, s, v = (float(c) for c in self.hsv[yr, xr])
        return StrokeParams(x=x0, y=y0, theta=theta, l1=l1, l2=l2, w1=w1, w2=w2,
                            color=HsvPixel(h % TWO_PI, s, v))


def build_stroke(
    anchor: tuple[float, float],
    p: float,
    etf: EtfField,
    hsv: np.ndarray,
    p_max: float,
    **search_kw,
) -> StrokeParams:
    return StrokeSearcher(hsv, etf, p_max, **search_kw).build(anchor, p)
