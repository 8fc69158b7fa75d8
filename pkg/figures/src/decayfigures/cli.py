"""Command-line front end: figures --manifest PATH --out DIR.

Reads a run manifest produced by the simulator's preset command, builds
the matching standard recipe, and writes <figure_id>.svg into the output
directory.  Exit codes: 0 success, 1 render failure (bad or empty CSV),
2 usage error (missing manifest, bundle that is not a standard figure).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .recipes import recipe_from_manifest
from .render import render

EXIT_OK = 0
EXIT_RENDER_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="regenerate a standard decay plot from simulator CSV output",
    )
    parser.add_argument("--manifest", required=True, help="run manifest (manifest.json)")
    parser.add_argument("--out", default="figures_out", help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        recipe = recipe_from_manifest(args.manifest)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_path = Path(args.out) / f"{recipe.figure_id}.svg"
    try:
        report = render(recipe, out_path)
    except ValueError as exc:
        print(f"render failure: {exc}", file=sys.stderr)
        return EXIT_RENDER_FAILURE
    print(f"wrote {report.path} ({len(report.curves)} curves)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
