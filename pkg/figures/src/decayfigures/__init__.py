"""Regenerates the standard decay plots from simulator CSV output."""

from .recipes import (
    LINE_STYLES,
    STANDARD_FIGURES,
    CurveSpec,
    FigureRecipe,
    recipe_from_manifest,
    standard_recipe,
)
from .render import CurveReport, RenderReport, read_trace_csv, render

__version__ = "0.1.0"

__all__ = [
    "LINE_STYLES",
    "STANDARD_FIGURES",
    "CurveSpec",
    "CurveReport",
    "FigureRecipe",
    "RenderReport",
    "read_trace_csv",
    "recipe_from_manifest",
    "render",
    "standard_recipe",
    "__version__",
]
