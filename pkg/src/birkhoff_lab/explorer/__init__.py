"""Figure pipelines, the conjecture fuzz harness and regression fixtures."""
from .fixtures import FixtureResult, regression_fixtures
from .fuzz import FuzzReport, fuzz_monoid_conjecture, revalidate_violation
from .raster import (
    CrossSectionSpec,
    PixelClass,
    Raster,
    StarCheck,
    TetraPlaneSpec,
    raster_cross_section,
    raster_tetrahedron_slice,
    star_shape_check,
    write_raster,
)
from .scatter import ScatterResult, eigenvalue_scatter, simplex_grid, write_scatter

__all__ = [
    "CrossSectionSpec",
    "FixtureResult",
    "FuzzReport",
    "PixelClass",
    "Raster",
    "ScatterResult",
    "StarCheck",
    "TetraPlaneSpec",
    "eigenvalue_scatter",
    "fuzz_monoid_conjecture",
    "raster_cross_section",
    "raster_tetrahedron_slice",
    "regression_fixtures",
    "revalidate_violation",
    "simplex_grid",
    "star_shape_check",
    "write_raster",
    "write_scatter",
]
