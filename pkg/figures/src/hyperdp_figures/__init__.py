"""Render hyperdp CSV outputs into publication-style figures."""

__version__ = "0.1.0"

from .spec import FigureSpec, SchemaError
from .render import render, render_error_curve, render_region_map
