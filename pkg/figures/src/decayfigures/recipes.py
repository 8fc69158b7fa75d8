"""Standard figure recipes and their construction from a run manifest.

A recipe names the curves of one plot: which trace CSV feeds each curve,
which quantity is on the y axis (nonescape probability P or log decay rate
g), and which dash pattern each scenario gets.  Curves are black and
distinguished by line style only, so the style mapping must cover every
input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

LINE_STYLES = {
    "solid": "-",
    "dashed": "--",
    "dashdot": "-.",
    "dotted": ":",
}


@dataclass(frozen=True)
class CurveSpec:
    label: str
    csv: Path
    style: str

    def __post_init__(self) -> None:
        if self.style not in LINE_STYLES:
            known = ", ".join(LINE_STYLES)
            raise ValueError(
                f"curve {self.label!r}: unknown line style {self.style!r}; choose one of: {known}"
            )


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    y_quantity: Literal["P", "g"]
    curves: tuple[CurveSpec, ...]
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.y_quantity not in ("P", "g"):
            raise ValueError(f"y quantity must be 'P' or 'g', got {self.y_quantity!r}")
        if not self.curves:
            raise ValueError(f"figure {self.figure_id!r} has no curves")
        labels = [c.label for c in self.curves]
        if len(set(labels)) != len(labels):
            raise ValueError(f"figure {self.figure_id!r} repeats a curve label: {labels}")


# Scenario label -> dash pattern per figure.  Mixed bundles draw the free
# curve solid; barrier curves take dashed, dot-dashed, dotted in listed
# parameter order.
#
# Style note for fig4 (and fig6, which follows the same convention): with
# three barrier curves next to a solid free curve, the reverse dash
# assignment (heaviest barrier dashed, lightest dotted) is an equally
# common convention and the two orderings are easy to conflate.  This
# module fixes the listed-order mapping - h=10 dashed, h=20 dot-dashed,
# h=30 dotted - so regenerated figures are deterministic.
STANDARD_FIGURES: dict[str, tuple[str, tuple[tuple[str, str], ...]]] = {
    "fig1": ("P", (("h10_w0.6", "solid"),)),
    "fig2": (
        "g",
        (("h10_w0.6", "solid"), ("h20_w0.6", "dashed"), ("h30_w0.6", "dashdot")),
    ),
    "fig3": (
        "g",
        (("h15_w0.6", "solid"), ("h15_w0.8", "dashed"), ("h15_w1.8", "dashdot")),
    ),
    "fig4": (
        "g",
        (
            ("nobarrier", "solid"),
            ("h10_w0.2", "dashed"),
            ("h20_w0.2", "dashdot"),
            ("h30_w0.2", "dotted"),
        ),
    ),
    "fig5": ("P", (("nobarrier", "solid"), ("h10_w0.2", "dashed"))),
    "fig6": (
        "g",
        (
            ("nobarrier", "solid"),
            ("h10_w0.2", "dashed"),
            ("h10_w0.4", "dashdot"),
            ("h10_w0.6", "dotted"),
        ),
    ),
}


def standard_recipe(figure_id: str, csv_by_label: dict[str, Path]) -> FigureRecipe:
    """Build the standard recipe for figure_id, resolving CSVs by scenario label."""
    if figure_id not in STANDARD_FIGURES:
        known = ", ".join(STANDARD_FIGURES)
        raise ValueError(f"unknown figure {figure_id!r}; choose one of: {known}")
    y_quantity, style_table = STANDARD_FIGURES[figure_id]
    curves = []
    for label, style in style_table:
        if label not in csv_by_label:
            have = ", ".join(sorted(csv_by_label)) or "none"
            raise ValueError(
                f"figure {figure_id!r} needs scenario {label!r}; manifest provides: {have}"
            )
        curves.append(CurveSpec(label=label, csv=csv_by_label[label], style=style))
    return FigureRecipe(figure_id=figure_id, y_quantity=y_quantity, curves=tuple(curves))


def recipe_from_manifest(manifest_path: str | Path) -> FigureRecipe:
    """Read a run manifest and build the matching standard recipe.

    The manifest's command field identifies the bundle ("preset fig4");
    CSV paths are resolved relative to the manifest's directory.
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text())
    except OSError:
        raise ValueError(f"cannot read manifest {manifest_path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{manifest_path}: not valid JSON ({exc})") from None
    command = str(manifest.get("command", ""))
    tokens = command.split()
    if len(tokens) != 2 or tokens[0] != "preset" or tokens[1] not in STANDARD_FIGURES:
        raise ValueError(
            f"{manifest_path}: command {command!r} does not name a standard figure preset"
        )
    csv_by_label = {
        run["name"]: manifest_path.parent / run["csv"] for run in manifest.get("runs", [])
    }
    return standard_recipe(tokens[1], csv_by_label)
