import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.spatial import cKDTree

from oilbrush.density import (
    AnchorSet, DensityMap, anchor_count, assign_nearest, assign_nearest_brute,
    build_density_map, rejection_sample, voronoi_relax,
)
from oilbrush.errors import SamplingStall
from oilbrush.raster import to_gray

from conftest import astronaut512


def dmap(probs, p_max=None):
    probs = np.asarray(probs, dtype=np.float64)
    p_max = float(probs.max()) if p_max is None else p_max
    return DensityMap(probs=probs, p_min=p_max / 100, p_max=p_max)


def lloyd_1d_oracle(n, centers, iters=200):
    """Plain-Python Lloyd on the pixel row 0..n-1 with unit weights."""
    c = list(centers)
    for _ in range(iters):
        members = [[] for _ in c]
        for x in range(n):
            d = [abs(x - ci) for ci in c]
            members[d.index(min(d))].append(x)
        c = [sum(m) / len(m) if m else ci for m, ci in zip(members, c)]
    return c


def test_constant_input_gives_p_min():
    dm = build_density_map(np.full((30, 40), 90.0), 0.25)
    assert np.all(dm.probs == 0.25 / 100)
    assert dm.p_min == 0.0025


def test_density_spans_interval():
    gray = to_gray(astronaut512())[:128, :128]
    dm = build_density_map(gray, 1 / 9)
    assert dm.probs.min() == dm.p_min == pytest.approx(1 / 900)
    assert dm.probs.max() == dm.p_max == 1 / 9


@pytest.mark.parametrize("p_max", [0.0, -0.1, 1.5])
def test_density_rejects_bad_p_max(p_max):
    with pytest.raises(ValueError):
        build_density_map(np.zeros((4, 4)), p_max)


def test_anchor_count_examples():
    assert anchor_count(dmap(np.full((100, 100), 0.25))) == 2500
    assert anchor_count(dmap(np.full((10, 10), 0.0025), p_max=0.25)) == 1


def test_anchor_count_scales_with_p_max():
    gray = to_gray(astronaut512())
    s = build_density_map(gray, 1 / 4).probs.sum()
    k1 = anchor_count(build_density_map(gray, 1 / 4))
    k4 = anchor_count(build_density_map(gray, 1 / 16))
    assert abs(k1 - 4 * k4) <= 2
    assert k4 == round(s / 4)


def test_fig3_scale_order_of_magnitude():
    k = anchor_count(build_density_map(to_gray(astronaut512()), 1 / 4))
    assert 1000 <= k <= 30000


def test_rejection_all_ones_samples_every_pixel():
    a = rejection_sample(dmap(np.ones((7, 9))), 63, seed=1)
    pts = {(int(x), int(y)) for x, y in a.anchors}
    assert len(pts) == 63 and a.k == 63


def test_rejection_sampling_is_uniform_on_constant_map():
    a = rejection_sample(dmap(np.full((64, 64), 0.2)), 1600, seed=5)
    bx = (a.anchors[:, 0] // 16).astype(int)
    by = (a.anchors[:, 1] // 16).astype(int)
    counts = np.bincount(by * 4 + bx, minlength=16)
    assert stats.chisquare(counts).pvalue > 0.01


def test_rejection_two_region_binomial():
    p_max = 0.25
    probs = np.full((256, 256), p_max / 100)
    probs[:, :128] = p_max
    q = p_max / (p_max + p_max / 100)
    k = 1000
    a = rejection_sample(dmap(probs, p_max), k, seed=2)
    left = int((a.anchors[:, 0] < 128).sum())
    assert abs(left - k * q) <= 3 * math.sqrt(k * q * (1 - q))


def test_rejection_distinct_and_deterministic():
    rng = np.random.default_rng(0)
    dm = dmap(rng.uniform(0.01, 0.3, (50, 60)))
    a = rejection_sample(dm, 400, seed=9)
    b = rejection_sample(dm, 400, seed=9)
    assert np.array_equal(a.anchors, b.anchors)
    assert len({tuple(p) for p in a.anchors}) == 400
    np.testing.assert_array_equal(a.probs, dm.probs[a.anchors[:, 1].astype(int), a.anchors[:, 0].astype(int)])


def test_rejection_stall_guard():
    probs = np.full((10, 10), 1e-12)
    probs[3, 4] = 0.5
    probs[0, 7] = 0.5
    dm = dmap(probs, 0.5)
    with pytest.raises(SamplingStall):
        rejection_sample(dm, 5, seed=0, fill_on_stall=False)
    a = rejection_sample(dm, 5, seed=0)
    pts = [tuple(map(int, p)) for p in a.anchors]
    assert len(set(pts)) == 5
    assert (7, 0) in pts and (4, 3) in pts


def test_rejection_rejects_k_out_of_range():
    with pytest.raises(ValueError):
        rejection_sample(dmap(np.ones((2, 2))), 5, seed=0)


def test_relax_single_centroid_goes_to_center_of_mass():
    dm = dmap(np.full((21, 31), 0.1))
    out = voronoi_relax(AnchorSet(np.array([[3.0, 4.0]]), np.array([0.1])), dm, iterations=1)
    np.testing.assert_allclose(out.anchors[0], [15.0, 10.0])


def test_relax_two_centroids_on_a_row():
    expected = lloyd_1d_oracle(100, [0.0, 99.0])
    assert expected == [24.5, 74.5]
    dm = dmap(np.full((1, 100), 0.5))
    init = AnchorSet(np.array([[0.0, 0.0], [99.0, 0.0]]), np.array([0.5, 0.5]))
    out = voronoi_relax(init, dm, iterations=15)
    np.testing.assert_allclose(out.anchors[:, 0], expected)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 30), st.integers(0, 2**31), st.booleans())
def test_grid_assignment_equals_brute_force(h, w, k, seed, integral):
    rng = np.random.default_rng(seed)
    cent = rng.uniform(0, [w - 1 if w > 1 else 0.0, h - 1 if h > 1 else 0.0], (k, 2))
    if integral:  # integer centroids and duplicates force exact distance ties
        cent = np.round(cent)
        cent[k // 2] = cent[0]
    labels, d2 = assign_nearest(cent, (h, w))
    brute = assign_nearest_brute(cent, (h, w))
    assert np.array_equal(labels, brute)


def test_lloyd_energy_non_increasing():
    rng = np.random.default_rng(4)
    for _ in range(5):
        dm = dmap(rng.uniform(0.001, 0.2, (48, 48)))
        init = rejection_sample(dm, int(rng.integers(5, 80)), seed=int(rng.integers(1 << 30)))
        energies = []
        voronoi_relax(init, dm, 15, energies=energies)
        assert len(energies) == 16
        assert all(b <= a * (1 + 1e-12) for a, b in zip(energies, energies[1:]))


def test_relax_preserves_count_and_bounds_and_is_deterministic():
    gray = to_gray(astronaut512())[100:228, 200:328]
    dm = build_density_map(gray, 1 / 9)
    k = anchor_count(dm)
    init = rejection_sample(dm, k, seed=3)
    a = voronoi_relax(init, dm)
    b = voronoi_relax(init, dm)
    assert a.k == k
    assert np.array_equal(a.anchors, b.anchors)
    assert a.anchors.min() >= 0 and a.anchors[:, 0].max() <= 127 and a.anchors[:, 1].max() <= 127
    xi = np.floor(a.anchors[:, 0] + 0.5).astype(int)
    yi = np.floor(a.anchors[:, 1] + 0.5).astype(int)
    np.testing.assert_array_equal(a.probs, dm.probs[yi, xi])


@pytest.mark.parametrize("p", [1 / 16, 1 / 36, 1 / 100])
def test_nearest_neighbor_spacing_on_uniform_map(p):
    dm = dmap(np.full((160, 160), p))
    a = voronoi_relax(rejection_sample(dm, anchor_count(dm), seed=1), dm)
    d, _ = cKDTree(a.anchors).query(a.anchors, k=2)
    ratio = np.median(d[:, 1]) / p ** -0.5
    assert 0.7 <= ratio <= 1.3
