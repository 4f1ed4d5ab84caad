"""Regenerate the bundled brush template (src/oilbrush/data/brush.png).

The output is a gray+alpha PNG: alpha marks the footprint, gray carries a
bristle texture that runs along the long (horizontal) axis.
"""
import argparse
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

OUT = Path(__file__).resolve().parents[1] / "src" / "oilbrush" / "data" / "brush.png"


def make(width=240, height=64, seed=7):
    rng = np.random.default_rng(seed)
    xs = (np.arange(width) + 0.5) / width
    ys = (np.arange(height) + 0.5) / height

    # half-thickness profile: full body, short tapered ends with ragged bristle tips
    end = np.minimum(xs, 1.0 - xs) / 0.06
    taper = np.sqrt(np.clip(end, 0.0, 1.0))
    wobble = ndimage.gaussian_filter1d(rng.normal(size=width), 6, mode="wrap")
    wobble /= np.abs(wobble).max()
    profile = taper * (0.93 + 0.05 * wobble)
    row_off = np.abs(ys - 0.5) * 2.0
    tips = ndimage.gaussian_filter1d(rng.uniform(size=height), 1.0)
    tips = (tips - tips.min()) / (tips.max() - tips.min())
    tip_len = 0.02 + 0.03 * tips  # ragged bristle tips at both ends
    reach = (np.minimum(xs[None, :], 1.0 - xs[None, :]) > tip_len[:, None] * row_off[:, None])
    mask = (row_off[:, None] <= profile[None, :]) & reach
    mask[height // 2 - 1 : height // 2 + 1, 1:-1] = True

    # bristle streaks: fast variation across, slow along the stroke
    streak = ndimage.gaussian_filter(rng.normal(size=(height, width)), sigma=(0.8, 14.0), mode="reflect")
    streak /= np.abs(streak).max()
    shade = 0.06 * np.cos(np.pi * (xs - 0.3))[None, :]
    tex = 190.0 + 40.0 * streak + 190.0 * shade
    tex = np.clip(tex, 120.0, 245.0)

    gray = np.where(mask, np.round(tex), 0).astype(np.uint8)
    alpha = np.where(mask, 255, 0).astype(np.uint8)
    return Image.fromarray(np.stack([gray, alpha], axis=-1), mode="LA")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    make(seed=args.seed).save(args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
