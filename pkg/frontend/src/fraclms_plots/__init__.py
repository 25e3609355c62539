"""Figure rendering for fraclms result files."""

__version__ = "0.1.0"

from .render import FigureKind, FigureSpec, Scale, SchemaError, render  # noqa: F401
