"""``oilbrush`` command line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, FormatError, InputError, OutputError, TemplateError
from .pipeline import LEVELS, PipelineConfig, level_to_p_max, run

EXIT_OK = 0
EXIT_CONFIG = 2  # also argparse's usage-error code
EXIT_INPUT = 3
EXIT_FORMAT = 4
EXIT_OUTPUT = 5


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oilbrush",
        description="Render a photograph as an oil painting made of template brush strokes.",
    )
    p.add_argument("--input", required=True, help="PNG or JPEG input image")
    p.add_argument("--output", required=True, help="output PNG path")
    fine = p.add_mutually_exclusive_group()
    fine.add_argument("--p-max", type=float, default=None,
                      help="maximum sampling probability in (0, 1] (default 0.25)")
    fine.add_argument("--level", type=int, choices=sorted(LEVELS), default=None,
                      help="fineness level; p_max = 1/level^2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--template", default=None, help="gray+alpha PNG brush template")
    p.add_argument("--etf-radius", type=int, default=PipelineConfig.etf_radius)
    p.add_argument("--etf-iters", type=int, default=PipelineConfig.etf_iterations)
    p.add_argument("--lloyd-iters", type=int, default=PipelineConfig.lloyd_iterations)
    p.add_argument("--direction", default="etf", help="etf | constant:<deg> | random")
    p.add_argument("--literal-hue", action="store_true",
                   help="compare hues by plain absolute difference instead of circular distance")
    p.add_argument("--dump-intermediates", metavar="DIR", default=None)
    p.add_argument("--progress-every", type=int, default=0, metavar="M",
                   help="with --dump-intermediates, save the canvas every M strokes")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    if args.level is not None:
        p_max = level_to_p_max(args.level)
    elif args.p_max is not None:
        p_max = args.p_max
    else:
        p_max = PipelineConfig.p_max
    return PipelineConfig(
        p_max=p_max,
        seed=args.seed,
        etf_radius=args.etf_radius,
        etf_iterations=args.etf_iters,
        lloyd_iterations=args.lloyd_iters,
        direction=args.direction,
        template_path=args.template,
        dump_dir=args.dump_intermediates,
        progress_every=args.progress_every,
        circular_hue=not args.literal_hue,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        summary = run(config, args.input, args.output)
    except (ConfigError, TemplateError) as exc:
        print(f"oilbrush: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"oilbrush: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FormatError as exc:
        print(f"oilbrush: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OutputError as exc:
        print(f"oilbrush: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    print(json.dumps(summary.as_dict()))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
