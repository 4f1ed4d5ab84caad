import math
from functools import lru_cache

import numpy as np
import pytest
from PIL import Image

from oilbrush.render import StrokeTemplate

CORPUS_NAMES = [
    "astronaut", "coffee", "chelsea", "rocket", "immunohistochemistry",
    "hubble_deep_field", "camera", "coins", "grass", "colorwheel",
]


def _square(img: np.ndarray, size: int) -> np.ndarray:
    if img.ndim == 2:
        img = np.stack([img] * 3, axis=-1)
    img = img[..., :3].astype(np.uint8)
    h, w = img.shape[:2]
    s = min(h, w)
    y0, x0 = (h - s) // 2, (w - s) // 2
    im = Image.fromarray(img[y0 : y0 + s, x0 : x0 + s])
    return np.asarray(im.resize((size, size), Image.BILINEAR))


@lru_cache(maxsize=None)
def corpus(size: int = 256) -> tuple[tuple[str, np.ndarray], ...]:
    import skimage.data

    return tuple((n, _square(getattr(skimage.data, n)(), size)) for n in CORPUS_NAMES)


@lru_cache(maxsize=None)
def astronaut512() -> np.ndarray:
    import skimage.data

    return np.ascontiguousarray(skimage.data.astronaut()[..., :3])


def edge_image(h=64, w=64, edge_x=32, left=0, right=255) -> np.ndarray:
    img = np.full((h, w, 3), left, dtype=np.uint8)
    img[:, edge_x:] = right
    return img


def circles_gray(size=201) -> np.ndarray:
    """Cone gray = distance from the center; iso-lines are concentric circles."""
    c = (size - 1) / 2.0
    ys, xs = np.mgrid[0:size, 0:size]
    return np.hypot(xs - c, ys - c)


def circle_tangent(size=201) -> np.ndarray:
    c = (size - 1) / 2.0
    ys, xs = np.mgrid[0:size, 0:size]
    return np.mod(np.arctan2(ys - c, xs - c) + math.pi / 2.0, math.pi)


def blobs_rgb(size=96, seed=0) -> np.ndarray:
    """Piecewise-constant color discs on a colored background."""
    rng = np.random.default_rng(seed)
    img = np.empty((size, size, 3), dtype=np.uint8)
    img[:] = rng.integers(0, 256, 3)
    ys, xs = np.mgrid[0:size, 0:size]
    for _ in range(8):
        cx, cy = rng.uniform(0, size, 2)
        r = rng.uniform(6, size / 3)
        img[(xs - cx) ** 2 + (ys - cy) ** 2 <= r * r] = rng.integers(0, 256, 3)
    return img


@pytest.fixture(scope="session")
def template():
    return StrokeTemplate.load()


@pytest.fixture
def solid_template():
    return StrokeTemplate(texture=np.full((8, 24), 255.0), mask=np.ones((8, 24), dtype=bool))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
