"""Boundary perturbations: additive noising and a moving-average smoother.

Noising inserts one new point between every pair of consecutive boundary
points, at an intersection of the two equal circles of radius
``rho * d`` centred on the pair (``d`` being their distance). The original
points are kept, in order, at the even indices of the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import ClosedContour, from_polyline, resample_uniform
from .errors import BadWindow, ConfigError, DegenerateSegment, RhoTooSmall

SIDE_POLICIES = ("alternate", "interior", "exterior", "random")
_SIDE_ALIASES = {"alt": "alternate", "in": "interior", "out": "exterior", "rand": "random"}
MAX_ITERATIONS = 6


@dataclass(frozen=True)
class NoiseConfig:
    """Parameters of the noising preprocessor.

    ``rho`` is the circle radius as a multiple of the segment length and
    must exceed 0.5. ``side_policy`` picks which of the two circle
    intersections is used: ``alternate`` zigzags (exterior first), ``random``
    draws a side per segment from a generator seeded with ``seed``.
    """

    rho: float = 0.8
    iterations: int = 1
    side_policy: str = "alternate"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "side_policy", _SIDE_ALIASES.get(self.side_policy, self.side_policy))
        if not self.rho > 0.5:
            raise RhoTooSmall(f"rho must be greater than 0.5, got {self.rho}")
        if not 1 <= self.iterations <= MAX_ITERATIONS:
            raise ConfigError(f"iterations must be in 1..{MAX_ITERATIONS}, got {self.iterations}")
        if self.side_policy not in SIDE_POLICIES:
            raise ConfigError(f"unknown side policy {self.side_policy!r}")

    @property
    def label(self) -> str:
        tag = f"noise:rho={self.rho:g},iters={self.iterations},side={self.side_policy}"
        return tag + (f",seed={self.seed}" if self.side_policy == "random" else "")


def _sides(policy, m, rng):
    if policy == "interior":
        return np.ones(m)
    if policy == "exterior":
        return -np.ones(m)
    if policy == "alternate":
        return np.where(np.arange(m) % 2 == 0, -1.0, 1.0)
    return np.where(rng.integers(0, 2, size=m) == 1, 1.0, -1.0)


def _step(points, config, rng):
    p = np.asarray(points, dtype=float)
    nxt = np.roll(p, -1, axis=0)
    seg = nxt - p
    d = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(d <= 1e-12 * d.max()):
        raise DegenerateSegment(f"zero-length segment at index {int(np.argmin(d))}")
    left = np.column_stack([-seg[:, 1], seg[:, 0]]) / d[:, None]  # interior side of a CCW loop
    h = np.sqrt(np.maximum(config.rho**2 - 0.25, 0.0)) * d
    q = 0.5 * (p + nxt) + (_sides(config.side_policy, len(p), rng) * h)[:, None] * left
    out = np.empty((2 * len(p), 2))
    out[0::2] = p
    out[1::2] = q
    return out


def noising_step(contour: ClosedContour, config: NoiseConfig, rng=None) -> ClosedContour:
    """One noising pass; the output has twice as many points."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    return from_polyline(_step(contour.points, config, rng))


def noising(contour: ClosedContour, config: NoiseConfig, samples: int | None = None) -> ClosedContour:
    """``config.iterations`` noising passes, optionally followed by uniform
    resampling to ``samples`` points."""
    rng = np.random.default_rng(config.seed)
    out = contour
    for _ in range(config.iterations):
        out = noising_step(out, config, rng)
    if samples is not None:
        out = resample_uniform(out, samples)
    return out


def smooth(contour: ClosedContour, window: int = 5, passes: int = 1, samples: int | None = None) -> ClosedContour:
    """Circular moving average of the coordinates, ``passes`` times, then
    uniform resampling (to the input sample count unless ``samples``)."""
    if window < 1 or window % 2 == 0:
        raise BadWindow(f"window must be a positive odd integer, got {window}")
    if passes < 0:
        raise BadWindow(f"passes must be non-negative, got {passes}")
    n = contour.n if samples is None else samples
    if window == 1 or passes == 0:
        return contour if (contour.uniform and n == contour.n) else resample_uniform(contour, n)
    p = np.asarray(contour.points, dtype=float)
    half = window // 2
    for _ in range(passes):
        acc = np.zeros_like(p)
        for k in range(-half, half + 1):
            acc += np.roll(p, k, axis=0)
        p = acc / window
    return resample_uniform(from_polyline(p), n)
