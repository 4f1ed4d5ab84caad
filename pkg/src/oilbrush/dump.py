"""Intermediate artifacts written by ``--dump-intermediates``."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable

import numpy as np
from PIL import Image, ImageDraw

from .density import AnchorSet, DensityMap
from .etf import EtfField
from .stroke import StrokeParams


def density_png(dm: DensityMap, path: Path) -> None:
    """Linear map [0, p_max] -> [0, 255]."""
    g = np.clip(np.floor(dm.probs / dm.p_max * 255.0 + 0.5), 0, 255).astype(np.uint8)
    Image.fromarray(g, mode="L").save(path)


def anchors_csv(anchors: AnchorSet, path: Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y", "p"])
        for (x, y), p in zip(anchors.anchors, anchors.probs):
            w.writerow([f"{x:.4f}", f"{y:.4f}", f"{p:.6g}"])


def anchors_png(anchors: AnchorSet, shape: tuple[int, int], path: Path) -> None:
    h, w = shape
    im = Image.new("RGB", (w, h), (255, 255, 255))
    d = ImageDraw.Draw(im)
    for x, y in anchors.anchors:
        d.point((float(x), float(y)), fill=(0, 0, 0))
    im.save(path)


def etf_png(field: EtfField, path: Path, spacing: int = 8) -> None:
    """Short segments along the local flow on a sparse grid."""
    h, w = field.angle.shape
    im = Image.new("RGB", (w, h), (255, 255, 255))
    d = ImageDraw.Draw(im)
    half = spacing * 0.4
    for y in range(spacing // 2, h, spacing):
        for x in range(spacing // 2, w, spacing):
            a = field.angle[y, x]
            dx, dy = half * math.cos(a), half * math.sin(a)
            d.line([(x - dx, y - dy), (x + dx, y + dy)], fill=(0, 0, 0))
    im.save(path)


def strokes_csv(strokes: Iterable[StrokeParams], path: Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y", "theta", "l1", "l2", "w1", "w2", "h", "s", "v"])
        for s in strokes:
            w.writerow([f"{s.x:.4f}", f"{s.y:.4f}", f"{s.theta:.6f}",
                        f"{s.l1:.4f}", f"{s.l2:.4f}", f"{s.w1:.4f}", f"{s.w2:.4f}",
                        f"{s.color.h:.6f}", f"{s.color.s:.6f}", f"{s.color.v:.1f}"])


def read_strokes_csv(path: Path) -> list[dict[str, float]]:
    with open(path, newline="") as f:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(f)]
