"""Global Vertex detection on closed planar contours.

The View Area Representation (VAR) of a contour assigns to every boundary
point the total distance to the rest of the boundary. Its derivatives and
a family of distance-integral descriptors give a curvature estimate that
survives boundary noise, and co-localized zero crossings of the first and
third derivatives of VAR mark the Global Vertices.
"""

__version__ = "0.1.0"

from .contour import ClosedContour, from_polyline, resample_uniform, trace_boundary
from .descriptors import DescriptorProfile, compute_profile
from .laii import laii_profile, laii_vertices, rasterize
from .local_algebra import LocalBehavior, classify, oplus, otimes, zero_crossings
from .perturb import NoiseConfig, noising, noising_step, smooth
from .shapes import ShapeSpec, fd_curvature, generate, parse_shape
from .vertices import VertexSet, detect, label, union_scenarios

__all__ = [
    "ClosedContour",
    "DescriptorProfile",
    "LocalBehavior",
    "NoiseConfig",
    "ShapeSpec",
    "VertexSet",
    "classify",
    "compute_profile",
    "detect",
    "fd_curvature",
    "from_polyline",
    "generate",
    "label",
    "laii_profile",
    "laii_vertices",
    "noising",
    "noising_step",
    "oplus",
    "otimes",
    "parse_shape",
    "rasterize",
    "resample_uniform",
    "smooth",
    "trace_boundary",
    "union_scenarios",
    "zero_crossings",
]
