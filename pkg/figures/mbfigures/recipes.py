"""Named figure recipes: which artifact directories and observables make
up each multi-panel figure."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import render
from .schema import SchemaError, load_areas, load_run, load_summary


@dataclass(frozen=True)
class FigureRecipe:
    """One renderable figure: a directory of artifacts, the observable to
    draw, optional frame selection and the output file stem."""

    name: str
    kind: str                       # frames | areas | zeta
    subdir: str = "."
    observable: str = "pulses"
    frames: list[int] | None = None
    splits: dict[str, str] = field(default_factory=dict)  # label -> subdir


RECIPES = {
    # closed-form pulse frames and excited-state frames, pure state
    "fig2-pulses": FigureRecipe("fig2-pulses", "frames", "fig2", "pulses"),
    "fig2-rho33": FigureRecipe("fig2-rho33", "frames", "fig2", "rho33"),
    # interaction parameter against coherence for four population splits
    "fig3-zeta": FigureRecipe("fig3-zeta", "zeta", "fig3", splits={
        "split 0.2": "split_0.6", "split 0.4": "split_0.7",
        "split 0.6": "split_0.8", "split 0.8": "split_0.9"}),
    # closed forms at partial coherence
    "fig5-pulses-low": FigureRecipe("fig5-pulses-low", "frames",
                                    "fig5_lam0.2", "pulses"),
    "fig5-rho33-high": FigureRecipe("fig5-rho33-high", "frames",
                                    "fig5_lam0.8", "rho33"),
    "fig5-rho33-low": FigureRecipe("fig5-rho33-low", "frames",
                                   "fig5_lam0.2", "rho33"),
    # matched flat-top run: frames and area evolution
    "fig6-pulses": FigureRecipe("fig6-pulses", "frames", "fig6", "pulses"),
    "fig7-areas": FigureRecipe("fig7-areas", "areas", "fig6"),
    # mismatched pure-state run: frames and area evolution
    "fig8-pulses": FigureRecipe("fig8-pulses", "frames", "fig8", "pulses"),
    "fig8-areas": FigureRecipe("fig8-areas", "areas", "fig8"),
    # mismatched partially coherent long run
    "fig9-pulses": FigureRecipe("fig9-pulses", "frames", "fig9", "pulses"),
    "fig10-areas": FigureRecipe("fig10-areas", "areas", "fig9"),
    "fig10-rho33": FigureRecipe("fig10-rho33", "frames", "fig9", "rho33"),
}


def render_recipe(name: str, root: Path, out_dir: Path):
    """Render one named recipe from artifacts under ``root``; returns the
    written file path and the figure."""
    if name not in RECIPES:
        raise SchemaError(f"unknown recipe {name!r}; choices: "
                          + ", ".join(sorted(RECIPES)))
    recipe = RECIPES[name]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"{recipe.name}.png"
    if recipe.kind == "frames":
        run = load_run(Path(root) / recipe.subdir, recipe.frames)
        fig = render.render_frames(run, recipe.observable, out)
    elif recipe.kind == "areas":
        directory = Path(root) / recipe.subdir
        areas = load_areas(directory)
        from .schema import load_manifest
        kappa = load_manifest(directory)["derived"]["kappa"]
        fig = render.render_area_plot(areas, kappa, out)
    elif recipe.kind == "zeta":
        summaries = {label: load_summary(Path(root) / recipe.subdir / sub)
                     for label, sub in recipe.splits.items()}
        fig = render.render_zeta_curves(summaries, out)
    else:
        raise SchemaError(f"unknown recipe kind {recipe.kind!r}")
    return out, fig
