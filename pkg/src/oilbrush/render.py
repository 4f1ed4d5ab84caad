"""Brush template stamping, area-ordered compositing and hole padding."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from PIL import Image
from scipy import ndimage

from .density import DensityMap
from .errors import DegenerateStroke, TemplateError
from .raster import hsv_to_rgb_float, label_components
from .stroke import StrokeParams, StrokeSearcher

MAX_PAD_ROUNDS = 10


@dataclass(frozen=True)
class StrokeTemplate:
    texture: np.ndarray  # (th, tw) float64 gray, long axis horizontal
    mask: np.ndarray  # (th, tw) bool footprint

    def __post_init__(self):
        if self.texture.shape != self.mask.shape:
            raise TemplateError("texture and mask shapes differ")
        if not self.mask.any():
            raise TemplateError("template mask is empty")
        if self.g_m <= 0:
            raise TemplateError("template foreground mean must be positive")

    @property
    def g_m(self) -> float:
        return float(self.texture[self.mask].mean())

    @classmethod
    def from_image(cls, im: Image.Image) -> "StrokeTemplate":
        la = np.asarray(im.convert("LA"), dtype=np.float64)
        mask = la[..., 1] > 0
        tex = la[..., 0].copy()
        if mask.any() and not mask.all():
            # background takes the nearest foreground gray so bilinear
            # lookups at the footprint edge never blend in the fill color
            _, (iy, ix) = ndimage.distance_transform_edt(~mask, return_indices=True)
            tex = tex[iy, ix]
        return cls(texture=tex, mask=mask)

    @classmethod
    def load(cls, path=None) -> "StrokeTemplate":
        """Read a gray+alpha PNG; alpha > 0 is the footprint. ``None`` loads the bundled brush."""
        if path is None:
            ref = resources.files("oilbrush") / "data" / "brush.png"
            with resources.as_file(ref) as p, Image.open(p) as im:
                return cls.from_image(im)
        try:
            with Image.open(Path(path)) as im:
                return cls.from_image(im)
        except OSError as exc:
            raise TemplateError(f"cannot read template {path}: {exc}") from exc


@dataclass
class Stamp:
    x0: int  # canvas column of the local origin
    y0: int
    mask: np.ndarray  # (h, w) bool
    value: np.ndarray  # (h, w) uint8, V channel
    rgb: np.ndarray  # (h, w, 3) uint8


@dataclass
class Canvas:
    color: np.ndarray  # (H, W, 3) uint8
    covered: np.ndarray  # (H, W) bool

    @classmethod
    def blank(cls, shape: tuple[int, int]) -> "Canvas":
        h, w = shape
        return cls(color=np.full((h, w, 3), 255, dtype=np.uint8),
                   covered=np.zeros((h, w), dtype=bool))

    def copy(self) -> "Canvas":
        return Canvas(self.color.copy(), self.covered.copy())

    @property
    def uncovered(self) -> int:
        return int((~self.covered).sum())


def _bilinear(img: np.ndarray, tx: np.ndarray, ty: np.ndarray) -> np.ndarray:
    th, tw = img.shape
    tx = np.clip(tx, 0.0, tw - 1.0)
    ty = np.clip(ty, 0.0, th - 1.0)
    x0 = np.minimum(np.floor(tx).astype(np.int64), tw - 2 if tw > 1 else 0)
    y0 = np.minimum(np.floor(ty).astype(np.int64), th - 2 if th > 1 else 0)
    x1 = np.minimum(x0 + 1, tw - 1)
    y1 = np.minimum(y0 + 1, th - 1)
    fx = tx - x0
    fy = ty - y0
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def value_gain(t: np.ndarray, v: float) -> float:
    """Gain c with mean(min(255, c*t)) == v.

    Without saturation this is v / mean(t), the plain recoloring factor; when
    bright pixels clip at 255 the gain grows just enough to keep the mean.
    """
    n = t.size
    if n == 0 or v <= 0:
        return 0.0
    s = np.sort(t)[::-1]
    tail = np.concatenate([np.cumsum(s[::-1])[::-1], [0.0]])  # tail[j] = sum(s[j:])
    positive = int((s > 0).sum())
    if v >= 255.0 * positive / n:
        return math.inf
    for j in range(positive):  # j = number of saturated pixels
        c = (n * v - 255.0 * j) / tail[j]
        if (j == 0 or c * s[j - 1] >= 255.0) and c * s[j] <= 255.0:
            return c
    return math.inf


def render_stroke(sp: StrokeParams, tpl: StrokeTemplate) -> Stamp:
    """Resize, rotate and recolor the template for one stroke.

    Every canvas pixel center is mapped back into the stroke frame
    (u along theta, v along theta + pi/2, anchor at (l2, w2)) and from there
    into template coordinates; texture is sampled bilinearly, the mask by
    nearest neighbor.
    """
    length, width = sp.length, sp.width
    if round(length) <= 0 or round(width) <= 0:
        raise DegenerateStroke(f"stroke {length}x{width} rounds to zero size")
    ct, st = math.cos(sp.theta), math.sin(sp.theta)
    # stroke-frame corners relative to the anchor
    us = np.array([-sp.l2, sp.l1, sp.l1, -sp.l2])
    vs = np.array([-sp.w2, -sp.w2, sp.w1, sp.w1])
    cx = sp.x + us * ct - vs * st
    cy = sp.y + us * st + vs * ct
    x0, x1 = int(math.floor(cx.min())), int(math.ceil(cx.max()))
    y0, y1 = int(math.floor(cy.min())), int(math.ceil(cy.max()))
    ys, xs = np.mgrid[y0 : y1 + 1, x0 : x1 + 1]
    dx = xs - sp.x
    dy = ys - sp.y
    u = dx * ct + dy * st + sp.l2
    v = -dx * st + dy * ct + sp.w2
    inside = (u >= 0) & (u < length) & (v >= 0) & (v < width)

    th, tw = tpl.mask.shape
    tx = u / length * tw - 0.5
    ty = v / width * th - 0.5
    mi = np.clip(np.floor(ty + 0.5).astype(np.int64), 0, th - 1)
    mj = np.clip(np.floor(tx + 0.5).astype(np.int64), 0, tw - 1)
    mask = inside & tpl.mask[mi, mj]

    tex = _bilinear(tpl.texture, tx[mask], ty[mask])
    gain = value_gain(tex, sp.color.v)
    vals = np.minimum(255.0, tex * gain) if math.isfinite(gain) else np.where(tex > 0, 255.0, 0.0)
    value = np.zeros(mask.shape, dtype=np.uint8)
    value[mask] = np.floor(vals + 0.5).astype(np.uint8)

    base = hsv_to_rgb_float(np.array([sp.color.h, sp.color.s, 1.0]))
    rgb = np.zeros(mask.shape + (3,), dtype=np.uint8)
    rgb[mask] = np.clip(np.floor(value[mask][:, None] * base[None, :] + 0.5), 0, 255).astype(np.uint8)
    return Stamp(x0=x0, y0=y0, mask=mask, value=value, rgb=rgb)


def composite(canvas: Canvas, stamp: Stamp) -> None:
    """Opaque overwrite of the stamp's footprint, clipped to the canvas."""
    H, W = canvas.covered.shape
    h, w = stamp.mask.shape
    cx0, cy0 = max(stamp.x0, 0), max(stamp.y0, 0)
    cx1, cy1 = min(stamp.x0 + w, W), min(stamp.y0 + h, H)
    if cx0 >= cx1 or cy0 >= cy1:
        return
    sx, sy = cx0 - stamp.x0, cy0 - stamp.y0
    m = stamp.mask[sy : sy + cy1 - cy0, sx : sx + cx1 - cx0]
    region = canvas.color[cy0:cy1, cx0:cx1]
    region[m] = stamp.rgb[sy : sy + cy1 - cy0, sx : sx + cx1 - cx0][m]
    canvas.covered[cy0:cy1, cx0:cx1] |= m


def painting_order(strokes: Sequence[StrokeParams]) -> list[int]:
    """Largest area first; equal areas keep their input order."""
    return sorted(range(len(strokes)), key=lambda i: -strokes[i].area)


def paint(
    strokes: Sequence[StrokeParams],
    tpl: StrokeTemplate,
    canvas_size: tuple[int, int],
    *,
    canvas: Canvas | None = None,
    progress: Callable[[int, Canvas], None] | None = None,
    progress_every: int = 0,
) -> Canvas:
    """Composite strokes from the largest to the smallest. ``canvas_size`` is (H, W)."""
    canvas = Canvas.blank(canvas_size) if canvas is None else canvas
    for n, i in enumerate(painting_order(strokes), start=1):
        composite(canvas, render_stroke(strokes[i], tpl))
        if progress is not None and progress_every > 0 and n % progress_every == 0:
            progress(n, canvas)
    return canvas


def hole_anchors(uncovered: np.ndarray) -> list[tuple[int, int]]:
    """One anchor per 4-connected hole: its centroid, or the member pixel nearest it.

    A non-convex hole can have its centroid on a painted pixel; a stroke
    there may never reach the hole, so the anchor moves onto the hole.
    """
    labels, comps = label_components(uncovered, connectivity=4)
    if not comps:
        return []
    ys, xs = np.nonzero(labels)  # row-major order
    lab = labels[ys, xs]
    order = np.argsort(lab, kind="stable")
    starts = np.searchsorted(lab[order], np.arange(1, len(comps) + 1))
    out = []
    for c, start in zip(comps, starts):
        cx, cy = c.centroid
        if labels[cy, cx] == c.label:
            out.append((cx, cy))
            continue
        idx = order[start : start + c.size]
        d2 = (xs[idx] - cx) ** 2 + (ys[idx] - cy) ** 2
        j = idx[int(np.argmin(d2))]
        out.append((int(xs[j]), int(ys[j])))
    return out


@dataclass
class PadResult:
    canvas: Canvas
    rounds: int
    strokes: list[StrokeParams] = field(default_factory=list)
    history: list[int] = field(default_factory=list)  # uncovered count before each round
    fallback_pixels: int = 0


def pad_holes(
    canvas: Canvas,
    searcher: StrokeSearcher,
    density: DensityMap,
    source_rgb: np.ndarray,
    tpl: StrokeTemplate,
    max_rounds: int = MAX_PAD_ROUNDS,
) -> PadResult:
    """Fill uncovered pixels with strokes anchored at hole centroids (see ``hole_anchors``).

    Each round paints the new strokes on a separate blank canvas and copies
    only into pixels that are still uncovered. Pixels left after
    ``max_rounds`` take the source image color.
    """
    out = canvas.copy()
    result = PadResult(canvas=out, rounds=0)
    while result.rounds < max_rounds and not out.covered.all():
        result.history.append(out.uncovered)
        new = [searcher.build(a, density.at(*a)) for a in hole_anchors(~out.covered)]
        pad = paint(new, tpl, out.covered.shape)
        fill = pad.covered & ~out.covered
        out.color[fill] = pad.color[fill]
        out.covered |= fill
        result.strokes.extend(new)
        result.rounds += 1
    if not out.covered.all():
        rest = ~out.covered
        result.fallback_pixels = int(rest.sum())
        out.color[rest] = source_rgb[rest]
        out.covered[rest] = True
    return result
