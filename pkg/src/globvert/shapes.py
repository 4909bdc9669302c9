"""Synthetic test shapes with known curvature, and the differential
curvature baseline.

Shapes are described by a :class:`ShapeSpec`, which can also be parsed
from a short grammar such as ``"ellipse:a=2,b=1"`` or
``"rounded_rect:w=2,h=1,r=0.1"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from scipy import sparse
from scipy.special import ellipe
from scipy.sparse.linalg import spsolve

from .contour import ClosedContour, from_polyline, resample_uniform, uniform_contour
from .errors import InvalidSpec, UnsupportedKind

KINDS = ("circle", "ellipse", "rounded_rect", "star")

_DEFAULTS = {
    "circle": {"R": 1.0},
    "ellipse": {"a": 2.0, "b": 1.0},
    "rounded_rect": {"w": 2.0, "h": 1.0, "r": 0.1},
    "star": {"base": 1.0, "a": 0.3, "k": 5},
}

# accepted spellings in the grammar
_ALIASES = {"r_c": "r", "rc": "r", "radius": "R", "amplitude": "a", "lobes": "k"}


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    params: dict = field(default_factory=dict)
    samples: int = 100

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown shape kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        merged = dict(_DEFAULTS[self.kind])
        for key, val in self.params.items():
            key = _ALIASES.get(key, key)
            if key not in merged:
                raise InvalidSpec(f"{self.kind} has no parameter {key!r}")
            merged[key] = val
        object.__setattr__(self, "params", merged)
        self.validate()

    def validate(self):
        p = self.params
        for key, val in p.items():
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise InvalidSpec(f"{self.kind}: parameter {key} must be a positive number, got {val!r}")
        if self.kind == "star":
            if p["a"] >= p["base"]:
                raise InvalidSpec("star amplitude must be smaller than the base radius")
            if int(p["k"]) != p["k"] or p["k"] < 2:
                raise InvalidSpec("star lobe count k must be an integer >= 2")
        if self.kind == "rounded_rect" and p["r"] > min(p["w"], p["h"]) / 2:
            raise InvalidSpec("corner radius exceeds half the shorter side")

    def __str__(self):
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.kind}:{body}"


def _fmt(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def parse_shape(text: str, samples: int = 100) -> ShapeSpec:
    """Parse ``kind[:key=value,...]``."""
    kind, _, body = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidSpec(f"malformed shape parameter {item!r}")
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise InvalidSpec(f"parameter {key!r} is not a number: {val!r}") from None
    return ShapeSpec(kind.strip(), params, samples)


def is_shape_text(text: str) -> bool:
    return text.split(":", 1)[0].strip() in KINDS


def period(spec: ShapeSpec) -> float:
    """Parameter period of :func:`curve`: 2*pi for polar/elliptic shapes,
    the perimeter for the rounded rectangle (arc-length parametrized)."""
    if spec.kind == "rounded_rect":
        w, h, r = (spec.params[k] for k in ("w", "h", "r"))
        return 2 * (w - 2 * r) + 2 * (h - 2 * r) + 2 * np.pi * r
    return 2 * np.pi


def curve(spec: ShapeSpec, t):
    """Points and parameter derivatives of the analytic boundary, CCW.

    Circles, ellipses and stars start on the positive x axis; the rounded
    rectangle starts at the midpoint of its right edge.
    """
    t = np.asarray(t, dtype=float)
    p = spec.params
    c, s = np.cos(t), np.sin(t)
    if spec.kind == "circle":
        R = p["R"]
        return R * np.column_stack([c, s]), R * np.column_stack([-s, c])
    if spec.kind == "ellipse":
        a, b = p["a"], p["b"]
        return np.column_stack([a * c, b * s]), np.column_stack([-a * s, b * c])
    if spec.kind == "star":
        k = p["k"]
        rad = p["base"] + p["a"] * np.cos(k * t)
        drad = -p["a"] * k * np.sin(k * t)
        pts = np.column_stack([rad * c, rad * s])
        der = np.column_stack([drad * c - rad * s, drad * s + rad * c])
        return pts, der
    return _rounded_rect(p["w"], p["h"], p["r"], t)


def _rounded_rect(w, h, r, t):
    hx, hy = w / 2, h / 2
    sx, sy = w - 2 * r, h - 2 * r
    arc = 0.5 * np.pi * r
    # (kind, length, start point or arc centre, direction or start angle)
    pieces = [
        ("line", sy / 2, (hx, 0.0), (0.0, 1.0)),
        ("arc", arc, (hx - r, hy - r), 0.0),
        ("line", sx, (hx - r, hy), (-1.0, 0.0)),
        ("arc", arc, (-hx + r, hy - r), 0.5 * np.pi),
        ("line", sy, (-hx, hy - r), (0.0, -1.0)),
        ("arc", arc, (-hx + r, -hy + r), np.pi),
        ("line", sx, (-hx + r, -hy), (1.0, 0.0)),
        ("arc", arc, (hx - r, -hy + r), 1.5 * np.pi),
        ("line", sy / 2, (hx, -hy + r), (0.0, 1.0)),
    ]
    total = sum(pc[1] for pc in pieces)
    u = np.mod(t, total)
    pts = np.empty((len(u), 2))
    der = np.empty((len(u), 2))
    lo = 0.0
    for i, (kind, length, anchor, orient) in enumerate(pieces):
        hi = lo + length
        mask = (u >= lo) & (u < hi) if i < len(pieces) - 1 else (u >= lo)
        loc = u[mask] - lo
        if kind == "line":
            pts[mask] = np.column_stack([anchor[0] + loc * orient[0], anchor[1] + loc * orient[1]])
            der[mask] = orient
        else:
            ang = orient + loc / r
            pts[mask] = np.column_stack([anchor[0] + r * np.cos(ang), anchor[1] + r * np.sin(ang)])
            der[mask] = np.column_stack([-np.sin(ang), np.cos(ang)])
        lo = hi
    return pts, der


def dense_polyline(spec: ShapeSpec, m: int) -> np.ndarray:
    """``m`` points on the analytic boundary at equal parameter steps."""
    return curve(spec, period(spec) * np.arange(m) / m)[0]


def corner_centers(spec: ShapeSpec) -> np.ndarray:
    """Midpoints of the four corner arcs of a rounded rectangle, in CCW order
    starting from the upper right."""
    if spec.kind != "rounded_rect":
        raise UnsupportedKind("corner centres exist only for rounded_rect")
    p = spec.params
    hx, hy, r = p["w"] / 2, p["h"] / 2, p["r"]
    c = r * (1 - math.sqrt(0.5))
    return np.array([(hx - c, hy - c), (-hx + c, hy - c), (-hx + c, -hy + c), (hx - c, -hy + c)])


def reference_points(spec: ShapeSpec) -> np.ndarray:
    """Boundary points where the shape's curvature vertices are known:
    axis endpoints of an ellipse, lobe tips and valleys of a star, corner-arc
    midpoints of a rounded rectangle, none for a circle."""
    p = spec.params
    if spec.kind == "circle":
        return np.zeros((0, 2))
    if spec.kind == "ellipse":
        return curve(spec, np.arange(4) * np.pi / 2)[0]
    if spec.kind == "star":
        return curve(spec, np.arange(2 * int(p["k"])) * np.pi / p["k"])[0]
    return corner_centers(spec)


def generate(spec: ShapeSpec, samples: int | None = None, density: int = 16) -> ClosedContour:
    """Uniformly resampled contour of the shape.

    The boundary is sampled densely (``density`` times the target count, at
    least 4096 points) and resampled to equal chords; the samples are then
    moved onto the exact analytic curve by Newton iteration on the curve
    parameter, keeping all chords equal.
    """
    n = spec.samples if samples is None else samples
    m = max(density * n, 4096)
    T = period(spec)
    where = []
    coarse = resample_uniform(from_polyline(dense_polyline(spec, m)), n, where)
    seg = np.array([w[0] for w in where], dtype=float)
    frac = np.array([w[1] for w in where])
    theta = (seg + frac) * T / m
    refined = _refine_equal_chords(spec, theta, T, coarse.ds)
    return refined if refined is not None else coarse


def _refine_equal_chords(spec, theta, T, d, iters=30):
    n = len(theta)
    theta = theta.copy()
    rows = np.arange(n)
    best = np.inf
    for _ in range(iters):
        full = np.append(theta, theta[0] + T)
        pts, der = curve(spec, full)
        chord = pts[1:] - pts[:-1]
        length = np.hypot(chord[:, 0], chord[:, 1])
        u = chord / length[:, None]
        F = length - d
        err = np.abs(F).max() / d
        if err <= 1e-12 or (err >= 0.5 * best and err <= 1e-10):
            return uniform_contour(pts[:-1], float(np.mean(length)))
        best = min(best, err)
        fwd = np.einsum("ij,ij->i", u, der[1:])  # dF_i / dtheta_{i+1}
        bwd = -np.einsum("ij,ij->i", u, der[:-1])  # dF_i / dtheta_i
        # unknowns: theta_1 .. theta_{n-1}, then d
        r_idx = np.concatenate([rows[:-1], rows[1:], rows])
        c_idx = np.concatenate([rows[:-1], rows[1:] - 1, np.full(n, n - 1)])
        vals = np.concatenate([fwd[:-1], bwd[1:], -np.ones(n)])
        J = sparse.csc_matrix((vals, (r_idx, c_idx)), shape=(n, n))
        step = spsolve(J, -F)
        if not np.all(np.isfinite(step)):
            return None
        theta[1:] += step[:-1]
        d += step[-1]
    return None


def ellipse_parameter(spec: ShapeSpec, points) -> np.ndarray:
    """Eccentric-anomaly parameter of points on (or next to) the ellipse."""
    p = np.asarray(points, dtype=float)
    a, b = spec.params["a"], spec.params["b"]
    return np.arctan2(p[:, 1] / b, p[:, 0] / a)


def _arc_table(spec, m=200_000):
    th = np.linspace(0.0, 2 * np.pi, m + 1)
    pts = dense_polyline(spec, m)
    pts = np.vstack([pts, pts[:1]])
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    return th, cum


def analytic_curvature(spec: ShapeSpec, s) -> np.ndarray:
    """Standard-convention curvature (convex positive) at arc position(s) ``s``
    measured from the shape's start point."""
    s = np.asarray(s, dtype=float)
    if spec.kind == "circle":
        return np.full_like(s, 1.0 / spec.params["R"])
    if spec.kind != "ellipse":
        raise UnsupportedKind(f"no analytic curvature for {spec.kind}")
    th, cum = _arc_table(spec)
    theta = np.interp(np.mod(s, cum[-1]), cum, th)
    return ellipse_curvature(spec, theta)


def ellipse_curvature(spec: ShapeSpec, theta) -> np.ndarray:
    a, b = spec.params["a"], spec.params["b"]
    theta = np.asarray(theta, dtype=float)
    return a * b / (a**2 * np.sin(theta) ** 2 + b**2 * np.cos(theta) ** 2) ** 1.5


def curvature_at_samples(spec: ShapeSpec, contour: ClosedContour) -> np.ndarray:
    """Analytic standard curvature at each sample of a generated contour."""
    if spec.kind == "circle":
        return np.full(contour.n, 1.0 / spec.params["R"])
    if spec.kind == "ellipse":
        return ellipse_curvature(spec, ellipse_parameter(spec, contour.points))
    raise UnsupportedKind(f"no analytic curvature for {spec.kind}")


def fd_curvature(contour: ClosedContour) -> np.ndarray:
    """Differential curvature (x'y'' - y'x'') / (x'^2 + y'^2)^(3/2) with
    circular central differences; positive on convex stretches."""
    p = contour.points
    ds = contour.ds
    fwd, bwd = np.roll(p, -1, axis=0), np.roll(p, 1, axis=0)
    d1 = (fwd - bwd) / (2 * ds)
    d2 = (fwd - 2 * p + bwd) / ds**2
    num = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    return num / (d1[:, 0] ** 2 + d1[:, 1] ** 2) ** 1.5


def ellipse_perimeter(a: float, b: float) -> float:
    """Exact perimeter via the complete elliptic integral of the second kind."""
    big, small = max(a, b), min(a, b)
    return 4 * big * ellipe(1 - (small / big) ** 2)
