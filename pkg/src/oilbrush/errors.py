class OilbrushError(Exception):
    """Base class for all errors raised by oilbrush."""


class OutOfBounds(OilbrushError, IndexError):
    pass


class SamplingStall(OilbrushError):
    """Rejection sampling exhausted its proposal budget."""


class DegenerateStroke(OilbrushError):
    """A stroke whose resized footprint has zero extent."""


class TemplateError(OilbrushError):
    pass


class ConfigError(OilbrushError, ValueError):
    pass


class InputError(OilbrushError):
    """The input image cannot be read."""


class FormatError(OilbrushError):
    """The input file is not a PNG or JPEG image."""


class OutputError(OilbrushError):
    """The output image cannot be written."""
