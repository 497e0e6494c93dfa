"""braidvol: complex volume of knots from braid words via cluster mutations.

The pipeline: parse a braid word whose closure is a knot, drive cluster
mutations (braiding operators) along it, solve the periodicity condition
x[1] = x[m+1] through a singular delta -> 0 degeneration, and sum extended
Rogers dilogarithms over the per-crossing octahedral decomposition.  The
total equals i (Vol + i CS) of the knot complement.

Submodules: ``cluster`` (seeds and mutations), ``braid`` (braid words and
braiding operators), ``geometry`` (dilogarithms and flattened tetrahedra),
``solver`` (periodicity Newton solver and delta limits), ``verify`` (exact
rational identity suite), ``kernels`` (numba-compiled hot paths), ``cli``.
The exact identity layer never needs the solver; ``solver`` and ``cli`` are
imported on demand only.
"""

from .cluster import (
    ClusterSeed,
    DegenerateSeedError,
    ExchangeMatrix,
    SingularYError,
    build_exchange_matrix,
    mutate,
    mutate_y,
    permute,
    y_from_x,
)
from .braid import (
    BraidParseError,
    BraidWord,
    ClusterTrajectory,
    MultiComponentError,
    apply_R_closed,
    apply_R_comp,
    apply_R_y,
    parse_braid,
    run_pattern,
    window_center,
)
from .geometry import (
    VolumeResult,
    bloch_wigner,
    build_octahedron,
    complex_volume,
    crossing_dilog,
    dilog,
    extended_rogers,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterSeed",
    "ExchangeMatrix",
    "DegenerateSeedError",
    "SingularYError",
    "build_exchange_matrix",
    "mutate",
    "mutate_y",
    "permute",
    "y_from_x",
    "BraidWord",
    "BraidParseError",
    "MultiComponentError",
    "ClusterTrajectory",
    "parse_braid",
    "apply_R_closed",
    "apply_R_comp",
    "apply_R_y",
    "run_pattern",
    "window_center",
    "dilog",
    "bloch_wigner",
    "extended_rogers",
    "build_octahedron",
    "crossing_dilog",
    "complex_volume",
    "VolumeResult",
    "__version__",
]
