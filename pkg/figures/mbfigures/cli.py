"""Standalone figure regeneration: ``mixonium-figures <recipe>|all
<artifact root> [--out DIR]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from .recipes import RECIPES, render_recipe
from .schema import SchemaError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mixonium-figures",
        description="Regenerate publication figures from trajectory "
                    "artifact directories")
    parser.add_argument("recipe",
                        help="recipe name or 'all' ("
                             + ", ".join(sorted(RECIPES)) + ")")
    parser.add_argument("root", help="artifact root directory")
    parser.add_argument("--out", default="figures_out",
                        help="output directory for rendered images")
    args = parser.parse_args(argv)

    names = sorted(RECIPES) if args.recipe == "all" else [args.recipe]
    status = 0
    for name in names:
        try:
            out, fig = render_recipe(name, Path(args.root), Path(args.out))
            plt.close(fig)
            print(f"rendered {name} -> {out}")
        except SchemaError as exc:
            print(f"error rendering {name}: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
