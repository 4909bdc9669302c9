"""Closed planar contours: ingestion, orientation, uniform resampling, frames.

A :class:`ClosedContour` is an ordered loop of points; the closing segment
from the last point back to the first is implied. Orientation is always
normalized to counterclockwise (positive shoelace area), so the inward
normal of every sample is its tangent rotated a quarter turn to the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage, optimize
from scipy.spatial.distance import pdist

from .errors import (
    DegenerateTangent,
    FewerThanThreePoints,
    InputError,
    MultipleComponents,
    NoForeground,
    NTooSmall,
    TouchesBorder,
    ZeroPerimeter,
)

MIN_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class ClosedContour:
    """Ordered closed loop of 2D points.

    Attributes:
        points: (N, 2) read-only float array, counterclockwise.
        perimeter: polygonal length of the loop.
        uniform: True when produced by :func:`resample_uniform`, i.e. every
            chord (closing one included) has length ``ds``.
    """

    points: np.ndarray
    perimeter: float
    uniform: bool = False

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def ds(self) -> float:
        return self.perimeter / self.n

    @property
    def signed_area(self) -> float:
        return signed_area(self.points)

    @property
    def ccw(self) -> bool:
        return self.signed_area > 0

    def __len__(self) -> int:
        return self.n

    def roll(self, k: int) -> "ClosedContour":
        """Same loop with the start index moved forward by ``k`` samples."""
        return _make(np.roll(self.points, -k, axis=0), self.perimeter, self.uniform)

    def transformed(self, matrix=None, offset=(0.0, 0.0)) -> "ClosedContour":
        """Apply ``p -> matrix @ p + offset``; ``matrix`` must be a similarity
        with positive determinant so that orientation is kept."""
        m = np.eye(2) if matrix is None else np.asarray(matrix, dtype=float)
        pts = self.points @ m.T + np.asarray(offset, dtype=float)
        scale = math.sqrt(abs(np.linalg.det(m)))
        return _make(pts, self.perimeter * scale, self.uniform)


class Frames(NamedTuple):
    """Per-sample unit tangents and inward normals, both (N, 2)."""

    tangent: np.ndarray
    normal: np.ndarray


def _make(points, perimeter, uniform):
    pts = np.array(points, dtype=float)
    pts.flags.writeable = False
    return ClosedContour(pts, float(perimeter), uniform)


def uniform_contour(points, ds: float) -> ClosedContour:
    """Wrap points already known to have equal chords ``ds`` (CCW)."""
    pts = np.asarray(points, dtype=float)
    return _make(pts, len(pts) * ds, True)


def signed_area(points) -> float:
    """Shoelace area; positive for counterclockwise loops."""
    p = np.asarray(points, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_length(points) -> float:
    p = np.asarray(points, dtype=float)
    return float(np.sum(np.hypot(*(np.roll(p, -1, axis=0) - p).T)))


def from_polyline(points) -> ClosedContour:
    """Build a contour from an ordered point list.

    Consecutive duplicates (including a repeated closing point) are
    dropped and the loop is reoriented to counterclockwise, keeping the
    first point first.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise InputError(f"expected an (M, 2) coordinate array, got shape {p.shape}")
    if len(p) == 0:
        raise FewerThanThreePoints("empty point list")
    keep = np.ones(len(p), dtype=bool)
    keep[1:] = np.any(p[1:] != p[:-1], axis=1)
    p = p[keep]
    while len(p) > 1 and np.all(p[-1] == p[0]):
        p = p[:-1]
    if len(np.unique(p, axis=0)) < 3:
        raise FewerThanThreePoints(f"need at least 3 distinct points, got {len(np.unique(p, axis=0))}")
    perimeter = polygon_length(p)
    if not perimeter > 0:
        raise ZeroPerimeter("polyline has zero length")
    if signed_area(p) < 0:
        p = np.concatenate([p[:1], p[:0:-1]])
    return _make(p, perimeter, False)


def _walk(pts, d, n, where=None):
    """Place ``n`` points forward along the closed polyline ``pts`` starting
    at ``pts[0]``, each at chord distance ``d`` from its predecessor.

    Returns the points and the unwrapped arc position of the ``n``-th step.
    If ``where`` is a list, (segment, parameter) pairs are appended to it.
    """
    m = len(pts)
    xs = pts[:, 0].tolist()
    ys = pts[:, 1].tolist()
    seg = [math.hypot(xs[(k + 1) % m] - xs[k], ys[(k + 1) % m] - ys[k]) for k in range(m)]
    d2 = d * d
    px, py = xs[0], ys[0]
    k, t0, arc_k = 0, 0.0, 0.0  # segment index (unwrapped), param, arc at segment start
    out = [(px, py)]
    if where is not None:
        where.append((0, 0.0))
    limit = m * (n + 2) + 10
    for step in range(n):
        while True:
            kk = k % m
            ax, ay = xs[kk], ys[kk]
            ux, uy = xs[(kk + 1) % m] - ax, ys[(kk + 1) % m] - ay
            wx, wy = ax - px, ay - py
            qa = ux * ux + uy * uy
            qb = wx * ux + wy * uy
            qc = wx * wx + wy * wy - d2
            disc = qb * qb - qa * qc
            if disc >= 0.0:
                t = (-qb + math.sqrt(disc)) / qa
                # tolerate round-off when the target lands on a polygon vertex
                if t0 - 1e-12 <= t <= 1.0 + 1e-12:
                    t = min(max(t, t0), 1.0)
                    break
            arc_k += seg[kk]
            k += 1
            t0 = 0.0
            if k > limit:
                raise ZeroPerimeter("resampling walk did not terminate")
        px, py = ax + t * ux, ay + t * uy
        t0 = t
        if step < n - 1:
            out.append((px, py))
            if where is not None:
                where.append((k % m, t))
    return np.array(out), arc_k + t0 * seg[k % m]


def resample_uniform(contour: ClosedContour, n: int, where: list | None = None) -> ClosedContour:
    """Resample to ``n`` points with equal chord lengths.

    Points are placed on the input polygon (linear interpolation along its
    segments) starting at its first point; the common chord length is the
    root of the closure condition that the ``n``-th chord lands back on the
    start. The result is a fixed point: resampling it again with the same
    ``n`` returns the same points.

    On polygons much coarser than ``n`` with sharp corners the closure can
    jump over its root; then the points are spaced by equal arc length.
    """
    if n < MIN_SAMPLES:
        raise NTooSmall(f"need at least {MIN_SAMPLES} samples, got {n}")
    pts = np.asarray(contour.points, dtype=float)
    lam = polygon_length(pts)
    if not lam > 0:
        raise ZeroPerimeter("contour has zero length")

    def closure(d):
        return _walk(pts, d, n)[1] - lam

    hi = lam / n
    lo = 0.5 * hi
    while closure(lo) >= 0:
        lo *= 0.5
        if lo < 1e-12 * hi:
            raise ZeroPerimeter("cannot bracket the resampling chord length")
    g_hi = closure(hi)
    if g_hi <= 1e-12 * lam:
        # chords equal arcs up to round-off (points fall on straight runs)
        d = hi
    else:
        d = optimize.brentq(closure, lo, hi, xtol=1e-15 * lam, rtol=4 * np.finfo(float).eps, maxiter=200)
    out, _ = _walk(pts, d, n, where)
    closing = math.dist(out[-1], out[0])
    if abs(closing - d) > 1e-9 * d:
        # the closure condition jumps over its root (coarse polygons with
        # sharp corners): no equal-chord loop exists, use equal arcs instead
        if where is not None:
            where.clear()
        return _equal_arcs(pts, n, lam, where)
    return _make(out, n * d, True)


def _equal_arcs(pts, n, lam, where=None):
    seg = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = lam * np.arange(n) / n
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(pts) - 1)
    t = (s - cum[k]) / seg[k]
    out = pts[k] + t[:, None] * (np.roll(pts, -1, axis=0)[k] - pts[k])
    if where is not None:
        where.extend(zip(k.tolist(), t.tolist()))
    return _make(out, lam, True)


def frames(contour: ClosedContour) -> Frames:
    """Unit tangents by circular central differences and left (inward) normals."""
    p = contour.points
    diff = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
    norm = np.hypot(diff[:, 0], diff[:, 1])
    if np.any(norm <= 1e-12 * max(contour.ds, 1e-300)):
        bad = int(np.argmin(norm))
        raise DegenerateTangent(f"coincident neighbours around sample {bad}")
    t = diff / norm[:, None]
    nrm = np.column_stack([-t[:, 1], t[:, 0]])
    if not contour.ccw:
        nrm = -nrm
    return Frames(t, nrm)


def diameter(contour: ClosedContour) -> float:
    """Largest pairwise sample distance."""
    return float(pdist(contour.points).max())


def locate(contour: ClosedContour, point) -> float:
    """Fractional sample index of the contour position closest to ``point``."""
    p = contour.points
    q = np.asarray(point, dtype=float)
    a = p
    u = np.roll(p, -1, axis=0) - p
    t = np.clip(np.einsum("ij,ij->i", q - a, u) / np.einsum("ij,ij->i", u, u), 0.0, 1.0)
    proj = a + t[:, None] * u
    k = int(np.argmin(np.hypot(*(proj - q).T)))
    return float((k + t[k]) % contour.n)


# -- raster boundary tracing ------------------------------------------------

# clockwise on screen (row axis pointing down), starting west
_MOORE = [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]


def trace_boundary(raster, threshold: float = 128) -> np.ndarray:
    """Moore-neighbour trace of the single foreground blob in ``raster``.

    Foreground is ``raster >= threshold``. Returns the ordered loop of
    boundary pixel centres as (x, y) = (column, row) pairs, oriented
    counterclockwise in that frame.
    """
    img = np.asarray(raster) >= threshold
    if img.ndim != 2:
        raise InputError("raster must be two-dimensional")
    if not img.any():
        raise NoForeground("raster has no foreground pixels")
    if img[0].any() or img[-1].any() or img[:, 0].any() or img[:, -1].any():
        raise TouchesBorder("foreground touches the image border")
    _, ncomp = ndimage.label(img)  # 4-connectivity by default
    if ncomp > 1:
        raise MultipleComponents(f"raster has {ncomp} 4-connected foreground components")

    rows, cols = np.nonzero(img)
    start = (int(rows[0]), int(cols[0]))
    loop = [start]
    cur = start
    back = 0  # index in _MOORE of the backtrack neighbour (west of start is background)
    first_move = None
    max_steps = 4 * img.size + 8
    for _ in range(max_steps):
        nxt = None
        for j in range(1, 9):
            idx = (back + j) % 8
            dr, dc = _MOORE[idx]
            r, c = cur[0] + dr, cur[1] + dc
            if img[r, c]:
                nxt = (r, c)
                prev = (back + j - 1) % 8
                br, bc = cur[0] + _MOORE[prev][0], cur[1] + _MOORE[prev][1]
                break
        if nxt is None:  # isolated pixel
            break
        if cur == start:
            if first_move is None:
                first_move = nxt
            elif nxt == first_move:
                break
        # backtrack direction expressed relative to the new current pixel
        back = _MOORE.index((br - nxt[0], bc - nxt[1]))
        cur = nxt
        loop.append(cur)
    if len(loop) > 1 and loop[-1] == start:
        loop.pop()
    pts = np.array([(c, r) for r, c in loop], dtype=float)
    if len(pts) >= 3 and signed_area(pts) < 0:
        pts = np.concatenate([pts[:1], pts[:0:-1]])
    return pts


# -- file formats ------------------------------------------------------------

def read_polyline_csv(path) -> np.ndarray:
    """Read one ``x,y`` pair per line; blank lines, ``#`` comments and a
    non-numeric header line are skipped."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                x, y = float(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                if not rows:
                    continue  # header
                raise InputError(f"{path}:{lineno}: expected 'x,y', got {line!r}") from None
            rows.append((x, y))
    return np.array(rows, dtype=float).reshape(-1, 2)


def write_polyline_csv(path, points, header_lines=()):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h in header_lines:
            fh.write(f"# {h}\n")
        for x, y in np.asarray(points, dtype=float):
            fh.write(f"{x:.17g},{y:.17g}\n")


def read_pgm(path) -> np.ndarray:
    """Read an ASCII (P2) or binary (P5) PGM image."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise InputError(f"{path}: not a P2/P5 PGM file")
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    width, height, maxval = tokens
    if magic == b"P5":
        pos += 1  # single whitespace after maxval
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        arr = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    else:
        body = b"\n".join(l.split(b"#")[0] for l in data[pos:].splitlines())
        arr = np.array(body.split()[: width * height], dtype=np.int64)
    if arr.size != width * height:
        raise InputError(f"{path}: truncated pixel data")
    return arr.reshape(height, width).astype(np.int64)


def write_pgm(path, raster, binary: bool = True):
    img = np.asarray(raster)
    img = np.clip(img, 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{w} {h}\n255\n".encode())
            fh.write(img.tobytes())
        else:
            fh.write(f"P2\n{w} {h}\n255\n".encode())
            for row in img:
                fh.write((" ".join(str(v) for v in row) + "\n").encode())
