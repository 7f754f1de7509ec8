"""Figure regeneration for trajectory artifacts (CSV/JSON) written by the
mixonium simulator CLI."""

from .recipes import RECIPES, FigureRecipe, render_recipe
from .render import render_area_plot, render_frames, render_zeta_curves
from .schema import RunData, SchemaError, load_areas, load_run, load_summary

__version__ = "0.1.0"
