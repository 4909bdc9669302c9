"""Local Area Integral Invariant baseline.

The LAII value at a boundary point is the fraction of a fixed-radius disk
centred there that lies inside the shape; it is about 1/2 on straight
boundary, smaller at convex corners and larger at concave ones.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .contour import ClosedContour, signed_area
from .errors import SampleOutsideRaster, ScaleTooSmallWarning
from .vertices import CONCAVE, CONVEX, Vertex, VertexSet

DEFAULT_RADIUS = 15
DEFAULT_EXTENT = 256  # pixels spanned by the longer bounding-box side


@dataclass(frozen=True, eq=False)
class Raster:
    """Binary image plus the world-to-pixel map ``pixel = (p - origin) * scale``.

    Pixel ``(row, col)`` has its centre at pixel coordinates ``(x, y) = (col, row)``.
    """

    mask: np.ndarray
    scale: float
    origin: np.ndarray

    def to_pixels(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.origin) * self.scale

    def to_world(self, pixels) -> np.ndarray:
        return np.asarray(pixels, dtype=float) / self.scale + self.origin

    @property
    def shape(self):
        return self.mask.shape


def default_scale(contour: ClosedContour, extent: float = DEFAULT_EXTENT) -> float:
    p = np.asarray(contour.points)
    return extent / float(np.max(p.max(axis=0) - p.min(axis=0)))


def fill_polygon(pixels, shape) -> np.ndarray:
    """Even-odd scanline fill of a polygon given in pixel coordinates; a pixel
    is foreground when its centre is inside."""
    h, w = shape
    p = np.asarray(pixels, dtype=float)
    x0, y0 = p[:, 0], p[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    mask = np.zeros(shape, dtype=bool)
    cols = np.arange(w, dtype=float)
    for row in range(h):
        y = float(row)
        hit = ((y0 <= y) & (y < y1)) | ((y1 <= y) & (y < y0))
        if not hit.any():
            continue
        xs = x0[hit] + (y - y0[hit]) * (x1[hit] - x0[hit]) / (y1[hit] - y0[hit])
        xs.sort()
        mask[row] = np.searchsorted(xs, cols, side="right") % 2 == 1
    return mask


def rasterize(contour: ClosedContour, scale: float | None = None, margin: int | None = None) -> Raster:
    """Binary image of the contour interior at ``scale`` pixels per unit.

    ``margin`` (default radius + 5) pixels of background surround the
    bounding box so disks centred on the boundary stay inside the image.
    """
    scale = default_scale(contour) if scale is None else float(scale)
    margin = DEFAULT_RADIUS + 5 if margin is None else int(margin)
    p = np.asarray(contour.points, dtype=float)
    lo, hi = p.min(axis=0), p.max(axis=0)
    # half-pixel shift: bounding-box extremes land on pixel borders, not centres
    origin = lo - (margin + 0.5) / scale
    size = np.ceil((hi - lo) * scale).astype(int) + 2 * margin + 1
    raster_shape = (int(size[1]), int(size[0]))
    mask = fill_polygon((p - origin) * scale, raster_shape)
    area_px = abs(signed_area(p)) * scale**2
    if min((hi - lo) * scale) < 4 or mask.sum() < 0.5 * area_px:
        warnings.warn(
            f"scale {scale:g} px/unit is too coarse for this contour; thin features collapse",
            ScaleTooSmallWarning,
            stacklevel=2,
        )
    return Raster(mask, scale, origin)


@dataclass(frozen=True, eq=False)
class LaiiProfile:
    fraction: np.ndarray
    radius: float
    shape: tuple
    disk_count: int
    samples: np.ndarray  # pixel coordinates of the disk centres

    @property
    def n(self) -> int:
        return len(self.fraction)


def _outward_normals(samples):
    t = np.roll(samples, -1, axis=0) - np.roll(samples, 1, axis=0)
    t /= np.maximum(np.hypot(t[:, 0], t[:, 1]), 1e-300)[:, None]
    right = np.column_stack([t[:, 1], -t[:, 0]])
    return right if signed_area(samples) > 0 else -right


def laii_profile(raster, samples, radius: float = DEFAULT_RADIUS, offset: float = 0.0) -> LaiiProfile:
    """Disk-area ratio at each sample (pixel coordinates ``(x, y)``).

    ``offset`` moves each disk centre that many pixels outward along the
    sample normal; pass 0.5 for samples taken at boundary pixel centres
    (as produced by tracing), whose true edge lies half a pixel further out.
    """
    mask = raster.mask if isinstance(raster, Raster) else np.asarray(raster) != 0
    if radius < 2:
        raise ValueError("disk radius must be at least 2 pixels")
    s = np.asarray(samples, dtype=float)
    h, w = mask.shape
    if np.any(s[:, 0] < 0) or np.any(s[:, 0] > w - 1) or np.any(s[:, 1] < 0) or np.any(s[:, 1] > h - 1):
        raise SampleOutsideRaster("a boundary sample lies outside the raster")
    centres = s + offset * _outward_normals(s) if offset else s
    k = int(math.ceil(radius)) + 1
    dy, dx = np.mgrid[-k:k + 1, -k:k + 1]
    disk = dx**2 + dy**2 <= radius**2
    fraction = np.empty(len(s))
    padded = np.pad(mask, k + 1)
    for i, (cx, cy) in enumerate(centres):
        bx, by = int(round(cx)), int(round(cy))
        inside = (dx + bx - cx) ** 2 + (dy + by - cy) ** 2 <= radius**2
        patch = padded[by + 1: by + 2 * k + 2, bx + 1: bx + 2 * k + 2]
        fraction[i] = np.count_nonzero(patch & inside) / np.count_nonzero(inside)
    return LaiiProfile(fraction, float(radius), mask.shape, int(disk.sum()), s)


def laii_vertices(profile: LaiiProfile, window: int, source: str = "laii") -> VertexSet:
    """Strict local extrema of the fraction over +/-``window`` samples.

    An extremum must beat every neighbour in the window by the pixel
    aliasing floor ``2 sqrt(radius) / disk_count`` (the disk rim crosses
    about ``4 radius`` boundary pixels, each contributing up to half a pixel
    of quantization error). Minima are convex, maxima concave.
    """
    f = profile.fraction
    n = len(f)
    tol = max(1.0, 2.0 * math.sqrt(profile.radius)) / profile.disk_count
    is_min = np.ones(n, dtype=bool)
    is_max = np.ones(n, dtype=bool)
    for off in range(1, window + 1):
        for nb in (np.roll(f, off), np.roll(f, -off)):
            is_min &= f <= nb - tol
            is_max &= f >= nb + tol
    out = []
    for i in range(n):
        if is_min[i] or is_max[i]:
            out.append(Vertex(float(i), window, CONVEX if is_min[i] else CONCAVE, sources=(source,)))
    return VertexSet(tuple(out), n, window)
