"""End-to-end painting: density -> anchors -> ETF -> strokes -> paint -> pad."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import dump
from .density import (AnchorSet, DensityMap, N_LLOYD, anchor_count, build_density_map,
                      rejection_sample, voronoi_relax)
from .errors import ConfigError, FormatError, InputError, OutputError
from .etf import (DEFAULT_ITERATIONS, DEFAULT_RADIUS, EtfField, compute_etf, constant_field,
                  random_field)
from .raster import rgb_to_hsv, save_rgb, sobel_gradient, to_gray
from .render import MAX_PAD_ROUNDS, Canvas, StrokeTemplate, pad_holes, paint
from .stroke import T_HUE, T_VALUE, StrokeParams, StrokeSearcher

log = logging.getLogger(__name__)

LEVELS = {2: 1 / 4, 3: 1 / 9, 4: 1 / 16, 5: 1 / 25, 6: 1 / 36}
INPUT_FORMATS = {"PNG", "JPEG"}

# independent random streams derived from the one user seed
STREAM_SAMPLING = 0
STREAM_DIRECTION = 1


def level_to_p_max(level: int) -> float:
    if level not in LEVELS:
        raise ConfigError(f"fineness level must be one of {sorted(LEVELS)}, got {level}")
    return LEVELS[level]


@dataclass
class PipelineConfig:
    p_max: float = 1 / 4
    seed: int = 0
    etf_radius: int = DEFAULT_RADIUS
    etf_iterations: int = DEFAULT_ITERATIONS
    t_h: float = T_HUE
    t_v: float = T_VALUE
    lloyd_iterations: int = N_LLOYD
    direction: str = "etf"  # "etf", "constant:<degrees>" or "random"
    template_path: str | None = None
    dump_dir: str | None = None
    progress_every: int = 0
    circular_hue: bool = True
    max_pad_rounds: int = MAX_PAD_ROUNDS

    @classmethod
    def from_level(cls, level: int, **kw) -> "PipelineConfig":
        return cls(p_max=level_to_p_max(level), **kw)

    def validate(self) -> None:
        if not (0.0 < self.p_max <= 1.0):
            raise ConfigError(f"p_max must lie in (0, 1], got {self.p_max}")
        if self.etf_radius < 0 or self.etf_iterations < 0 or self.lloyd_iterations < 0:
            raise ConfigError("radius and iteration counts must be non-negative")
        if self.t_h <= 0 or self.t_v <= 0:
            raise ConfigError("thresholds must be positive")
        if self.max_pad_rounds < 0 or self.progress_every < 0:
            raise ConfigError("max_pad_rounds and progress_every must be non-negative")
        self.direction_mode()

    def direction_mode(self) -> tuple[str, float | None]:
        d = self.direction.strip().lower()
        if d in ("etf", "random"):
            return d, None
        if d.startswith("constant:"):
            try:
                return "constant", math.radians(float(d.split(":", 1)[1]))
            except ValueError:
                pass
        raise ConfigError(f"direction must be etf, constant:<deg> or random, got {self.direction!r}")


@dataclass
class RunSummary:
    width: int
    height: int
    p_max: float
    k: int
    strokes: int
    padding_strokes: int
    padding_rounds: int
    fallback_pixels: int
    wall_time: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Painting:
    image: np.ndarray
    summary: RunSummary
    density: DensityMap
    anchors: AnchorSet
    etf: EtfField
    strokes: list[StrokeParams]
    padding_strokes: list[StrokeParams] = field(default_factory=list)
    pre_padding: Canvas | None = None
    padding_history: list[int] = field(default_factory=list)


def direction_field(config: PipelineConfig, gray: np.ndarray) -> EtfField:
    mode, angle = config.direction_mode()
    if mode == "etf":
        return compute_etf(gray, config.etf_radius, config.etf_iterations)
    modulus = sobel_gradient(gray)
    if mode == "constant":
        return constant_field(gray.shape, angle, modulus)
    rng = np.random.default_rng([config.seed, STREAM_DIRECTION])
    return random_field(gray.shape, rng, modulus)


def paint_image(rgb: np.ndarray, config: PipelineConfig, template: StrokeTemplate | None = None) -> Painting:
    """Run the whole painting process on an in-memory RGB array."""
    config.validate()
    t0 = time.perf_counter()
    tpl = template if template is not None else StrokeTemplate.load(config.template_path)
    dump_dir = Path(config.dump_dir) if config.dump_dir else None
    if dump_dir is not None:
        dump_dir.mkdir(parents=True, exist_ok=True)

    gray = to_gray(rgb)
    hsv = rgb_to_hsv(rgb)
    dm = build_density_map(gray, config.p_max)
    k = anchor_count(dm)
    rng = np.random.default_rng([config.seed, STREAM_SAMPLING])
    sampled = rejection_sample(dm, k, rng)
    anchors = voronoi_relax(sampled, dm, config.lloyd_iterations)
    log.info("K=%d anchors relaxed in %.2fs", k, time.perf_counter() - t0)

    etf = direction_field(config, gray)
    searcher = StrokeSearcher(hsv, etf, config.p_max, t_h=config.t_h, t_v=config.t_v,
                              circular_hue=config.circular_hue)
    strokes = [searcher.build(a, float(p)) for a, p in zip(anchors.anchors, anchors.probs)]

    progress = None
    if dump_dir is not None and config.progress_every > 0:
        def progress(n, canvas):
            save_rgb(dump_dir / f"progress_{n}.png", canvas.color)

    canvas = paint(strokes, tpl, gray.shape, progress=progress,
                   progress_every=config.progress_every)
    padded = pad_holes(canvas, searcher, dm, rgb, tpl, config.max_pad_rounds)

    if dump_dir is not None:
        dump.density_png(dm, dump_dir / "density.png")
        dump.anchors_csv(anchors, dump_dir / "anchors.csv")
        dump.anchors_png(anchors, gray.shape, dump_dir / "anchors.png")
        dump.etf_png(etf, dump_dir / "etf.png")
        dump.strokes_csv(strokes + padded.strokes, dump_dir / "strokes.csv")

    h, w = gray.shape
    summary = RunSummary(
        width=w, height=h, p_max=config.p_max, k=k,
        strokes=len(strokes) + len(padded.strokes),
        padding_strokes=len(padded.strokes),
        padding_rounds=padded.rounds,
        fallback_pixels=padded.fallback_pixels,
        wall_time=time.perf_counter() - t0,
    )
    return Painting(image=padded.canvas.color, summary=summary, density=dm, anchors=anchors,
                    etf=etf, strokes=strokes, padding_strokes=padded.strokes,
                    pre_padding=canvas, padding_history=padded.history)


def load_input(path) -> np.ndarray:
    path = Path(path)
    try:
        im = Image.open(path)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except UnidentifiedImageError as exc:
        raise FormatError(f"{path} is not a recognized image") from exc
    with im:
        if im.format not in INPUT_FORMATS:
            raise FormatError(f"{path}: unsupported format {im.format}; use PNG or JPEG")
        try:
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
        except OSError as exc:
            raise InputError(f"cannot decode {path}: {exc}") from exc


def run(config: PipelineConfig, input_path, output_path) -> RunSummary:
    t0 = time.perf_counter()
    config.validate()
    rgb = load_input(input_path)
    result = paint_image(rgb, config)
    try:
        save_rgb(output_path, result.image)
    except (OSError, ValueError) as exc:
        raise OutputError(f"cannot write {output_path}: {exc}") from exc
    result.summary.wall_time = time.perf_counter() - t0
    return result.summary
