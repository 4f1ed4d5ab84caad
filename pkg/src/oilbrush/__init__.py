"""Oil-painting stylization with adaptively sampled, template-rendered brush strokes."""
from .density import (AnchorSet, DensityMap, anchor_count, build_density_map,
                      rejection_sample, voronoi_relax)
from .etf import EtfField, compute_etf, direction_at
from .pipeline import PipelineConfig, RunSummary, paint_image, run
from .render import Canvas, StrokeTemplate, pad_holes, paint, render_stroke
from .stroke import SearchLimits, StrokeParams, build_stroke, search_length

__version__ = "0.1.0"
