"""Probability density map, anchor count, rejection sampling and Lloyd relaxation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import SamplingStall
from .raster import mean_filter, round_half_up, sobel_gradient

N_LLOYD = 15
P_MIN_RATIO = 0.01
STALL_FACTOR = 1000


@dataclass(frozen=True)
class DensityMap:
    probs: np.ndarray  # (H, W) float64, values in [p_min, p_max]
    p_min: float
    p_max: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    def at(self, x: float, y: float) -> float:
        """Probability at the rounded (and border-clamped) position."""
        h, w = self.probs.shape
        xi = min(max(round_half_up(x), 0), w - 1)
        yi = min(max(round_half_up(y), 0), h - 1)
        return float(self.probs[yi, xi])


@dataclass(frozen=True)
class AnchorSet:
    anchors: np.ndarray  # (k, 2) float64, columns x, y
    probs: np.ndarray  # (k,) probability at the rounded anchor

    @property
    def k(self) -> int:
        return len(self.anchors)


def check_p_max(p_max: float) -> None:
    if not (0.0 < p_max <= 1.0):
        raise ValueError(f"p_max must lie in (0, 1], got {p_max}")


def normalize(g: np.ndarray, p_max: float) -> DensityMap:
    check_p_max(p_max)
    p_min = p_max * P_MIN_RATIO
    lo, hi = float(g.min()), float(g.max())
    if hi == lo:
        probs = np.full(g.shape, p_min)
    else:
        probs = p_min + (g - lo) * ((p_max - p_min) / (hi - lo))
        # guard the interval against rounding in the affine map
        probs = np.clip(probs, p_min, p_max)
    return DensityMap(probs=probs, p_min=p_min, p_max=p_max)


def build_density_map(gray: np.ndarray, p_max: float) -> DensityMap:
    """Smoothed gradient magnitude, min-max normalized to [p_max/100, p_max]."""
    return normalize(mean_filter(sobel_gradient(gray)), p_max)


def anchor_count(dm: DensityMap) -> int:
    return max(1, round_half_up(float(dm.probs.sum())))


def _probs_at(dm: DensityMap, anchors: np.ndarray) -> np.ndarray:
    h, w = dm.shape
    xi = np.clip(round_half_up(anchors[:, 0]), 0, w - 1)
    yi = np.clip(round_half_up(anchors[:, 1]), 0, h - 1)
    return dm.probs[yi, xi]


def rejection_sample(
    dm: DensityMap,
    k: int,
    seed: int | np.random.Generator,
    *,
    fill_on_stall: bool = True,
    batch: int = 65536,
) -> AnchorSet:
    """Draw ``k`` distinct pixels, each proposal uniform and kept iff u <= I_p.

    Proposals are generated in vectorized batches but consumed strictly in
    order, so the result equals the one-at-a-time loop for the same stream.
    If ``STALL_FACTOR * k`` proposals do not complete the quota the remaining
    anchors are the highest-probability unsampled pixels (row-major ties), or
    ``SamplingStall`` is raised when ``fill_on_stall`` is False.
    """
    probs = dm.probs.ravel()
    n_pix = probs.size
    if not (1 <= k <= n_pix):
        raise ValueError(f"k must be in [1, {n_pix}], got {k}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    taken = np.zeros(n_pix, dtype=bool)
    chosen: list[np.ndarray] = []
    n_chosen = 0
    budget = STALL_FACTOR * k
    used = 0
    while n_chosen < k and used < budget:
        m = min(batch, budget - used)
        idx = rng.integers(0, n_pix, size=m)
        u = rng.random(m)
        accepted = idx[u <= probs[idx]]
        # first occurrence within the batch, in proposal order, not taken before
        _, first = np.unique(accepted, return_index=True)
        first.sort()
        fresh = accepted[first]
        fresh = fresh[~taken[fresh]]
        fresh = fresh[: k - n_chosen]
        taken[fresh] = True
        chosen.append(fresh)
        n_chosen += len(fresh)
        used += m

    if n_chosen < k:
        if not fill_on_stall:
            raise SamplingStall(f"sampled {n_chosen} of {k} anchors in {budget} proposals")
        order = np.argsort(-probs, kind="stable")
        rest = order[~taken[order]][: k - n_chosen]
        chosen.append(rest)

    flat = np.concatenate(chosen) if chosen else np.empty(0, dtype=np.int64)
    w = dm.shape[1]
    anchors = np.stack([flat % w, flat // w], axis=1).astype(np.float64)
    return AnchorSet(anchors=anchors, probs=probs[flat].copy())


@njit(cache=True)
def _assign_grid(cx, cy, h, w, cell):
    """Nearest centroid per pixel (ties -> lowest index), exact, grid-accelerated."""
    k = cx.shape[0]
    gw = int(math.ceil(w / cell))
    gh = int(math.ceil(h / cell))
    ncell = gw * gh
    counts = np.zeros(ncell + 1, dtype=np.int64)
    cell_of = np.empty(k, dtype=np.int64)
    for i in range(k):
        gx = min(max(int(math.floor(cx[i] / cell)), 0), gw - 1)
        gy = min(max(int(math.floor(cy[i] / cell)), 0), gh - 1)
        c = gy * gw + gx
        cell_of[i] = c
        counts[c + 1] += 1
    for c in range(ncell):
        counts[c + 1] += counts[c]
    members = np.empty(k, dtype=np.int64)
    fill = counts[:-1].copy()
    for i in range(k):  # ascending index within each cell
        c = cell_of[i]
        members[fill[c]] = i
        fill[c] += 1

    labels = np.empty((h, w), dtype=np.int64)
    dist2 = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        py = float(y)
        pgy = min(int(math.floor(py / cell)), gh - 1)
        for x in range(w):
            px = float(x)
            pgx = min(int(math.floor(px / cell)), gw - 1)
            best = np.inf
            best_i = -1
            r = 0
            while True:
                x_lo = pgx - r
                x_hi = pgx + r
                y_lo = pgy - r
                y_hi = pgy + r
                for gy in range(max(y_lo, 0), min(y_hi, gh - 1) + 1):
                    on_edge_row = gy == y_lo or gy == y_hi
                    step = 1 if on_edge_row else x_hi - x_lo
                    gx = x_lo
                    while gx <= x_hi:
                        if 0 <= gx < gw:
                            c = gy * gw + gx
                            for j in range(counts[c], counts[c + 1]):
                                i = members[j]
                                dx = px - cx[i]
                                dy = py - cy[i]
                                d = dx * dx + dy * dy
                                if d < best or (d == best and i < best_i):
                                    best = d
                                    best_i = i
                        if step == 0:
                            break
                        gx += step
                covers_all = x_lo <= 0 and y_lo <= 0 and x_hi >= gw - 1 and y_hi >= gh - 1
                if covers_all:
                    break
                if best_i >= 0:
                    # distance from the pixel to the outside of the scanned block
                    bound = min(
                        px - x_lo * cell if x_lo > 0 else np.inf,
                        (x_hi + 1) * cell - px if x_hi < gw - 1 else np.inf,
                        py - y_lo * cell if y_lo > 0 else np.inf,
                        (y_hi + 1) * cell - py if y_hi < gh - 1 else np.inf,
                    )
                    if bound * bound > best * (1.0 + 1e-9) + 1e-9:
                        break
                r += 1
            labels[y, x] = best_i
            dist2[y, x] = best
    return labels, dist2


def assign_nearest(centroids: np.ndarray, shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Label every pixel with its nearest centroid; returns (labels, squared distances)."""
    h, w = shape
    k = len(centroids)
    cell = max(1.0, math.sqrt(h * w / max(k, 1)))
    c = np.ascontiguousarray(centroids, dtype=np.float64)
    return _assign_grid(c[:, 0].copy(), c[:, 1].copy(), h, w, cell)


def assign_nearest_brute(centroids: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Reference O(HWk) assignment; argmin picks the lowest index on ties."""
    h, w = shape
    ys, xs = np.mgrid[0:h, 0:w]
    px = xs.ravel().astype(np.float64)[:, None]
    py = ys.ravel().astype(np.float64)[:, None]
    dx = px - centroids[None, :, 0]
    dy = py - centroids[None, :, 1]
    d = dx * dx + dy * dy
    return d.argmin(axis=1).reshape(h, w)


def quantization_energy(centroids: np.ndarray, weights: np.ndarray) -> float:
    _, d2 = assign_nearest(centroids, weights.shape)
    return float((weights * d2).sum())


def _update_centroids(labels, weights, prev):
    k = len(prev)
    h, w = weights.shape
    ys, xs = np.mgrid[0:h, 0:w]
    lab = labels.ravel()
    wt = weights.ravel()
    mass = np.bincount(lab, weights=wt, minlength=k)
    sx = np.bincount(lab, weights=wt * xs.ravel(), minlength=k)
    sy = np.bincount(lab, weights=wt * ys.ravel(), minlength=k)
    out = prev.copy()
    nz = mass > 0
    out[nz, 0] = sx[nz] / mass[nz]
    out[nz, 1] = sy[nz] / mass[nz]
    return out


def voronoi_relax(
    anchors: AnchorSet,
    weights: DensityMap,
    iterations: int = N_LLOYD,
    energies: list[float] | None = None,
) -> AnchorSet:
    """Weighted Lloyd iterations over the pixel grid.

    Each pass assigns pixels to their nearest centroid and moves every
    centroid to the I_p-weighted mean of its pixels. A cluster that receives
    no weight keeps its position. When ``energies`` is given it receives the
    weighted quantization energy before the first and after every pass.
    """
    if anchors.k < 1:
        raise ValueError("need at least one anchor")
    wmap = weights.probs
    cent = anchors.anchors.astype(np.float64).copy()
    labels, d2 = assign_nearest(cent, wmap.shape)
    if energies is not None:
        energies.append(float((wmap * d2).sum()))
    for it in range(iterations):
        cent = _update_centroids(labels, wmap, cent)
        if energies is not None or it < iterations - 1:
            labels, d2 = assign_nearest(cent, wmap.shape)
            if energies is not None:
                energies.append(float((wmap * d2).sum()))
    return AnchorSet(anchors=cent, probs=_probs_at(weights, cent))
