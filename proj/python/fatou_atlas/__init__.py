"""Polynomial dynamics on the raster: Julia sets, external rays, Fatou trees and puzzles."""

from ._core import (
    FatouError,
    Polynomial,
    Puzzle,
    Raster,
    __version__,
    classify_grid,
    classify_parameter,
    critical_points,
    escape_radius,
    fa_resit_closed_form,
    family_fa,
    family_fc,
    fc_free_critical,
    find_cycles,
    green_function,
    julia_samples,
    limb_diameters,
    map_angle,
    periodic_angles,
    residu_iteratif,
    shape_of,
    trace_equipotential,
    trace_external_ray,
    tree_report,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
