"""Input resolution and multi-scenario vertex runs shared by the CLI and demos."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .contour import ClosedContour, from_polyline, read_pgm, read_polyline_csv, resample_uniform, trace_boundary
from .descriptors import DescriptorProfile, compute_profile
from .errors import InputError, InputUnresolvable, MismatchedN
from .perturb import NoiseConfig, noising
from .shapes import ShapeSpec, dense_polyline, generate, is_shape_text, parse_shape
from .vertices import VertexSet, default_window, detect, label, union_scenarios

#: noising acts on a uniform copy of the source this many times denser than N
NOISE_DENSITY = 16


@dataclass(frozen=True)
class Source:
    """A resolved input: an analytic shape or a polyline read from disk."""

    name: str
    spec: ShapeSpec | None = None
    polyline: ClosedContour | None = None

    def base(self, n: int) -> ClosedContour:
        """The smooth analysis contour with ``n`` uniform samples."""
        if self.spec is not None:
            return generate(self.spec, n)
        return resample_uniform(self.polyline, n)

    def dense(self, n: int) -> ClosedContour:
        """Uniform pre-resampling state that noising operates on.

        Noising the ``n``-sample contour itself would be undone exactly by
        resampling back to ``n`` (the original points survive at equal chord
        spacing), so the noise is applied to a denser copy.
        """
        m = NOISE_DENSITY * n
        if self.spec is not None:
            poly = from_polyline(dense_polyline(self.spec, max(m, 4096)))
        else:
            poly = self.polyline
        return resample_uniform(poly, m)


def resolve_input(text: str, threshold: float = 128) -> Source:
    """Shape grammar (``ellipse:a=2,b=1``), CSV polyline or PGM raster."""
    if is_shape_text(text):
        spec = parse_shape(text)
        return Source(str(spec), spec=spec)
    if not os.path.isfile(text):
        raise InputUnresolvable(f"{text!r} is neither a shape description nor a readable file")
    lower = text.lower()
    try:
        if lower.endswith((".pgm", ".pnm")):
            pts = trace_boundary(read_pgm(text), threshold)
        else:
            pts = read_polyline_csv(text)
    except InputError:
        raise
    except (OSError, ValueError) as exc:
        raise InputUnresolvable(f"cannot read {text!r}: {exc}") from exc
    return Source(os.path.basename(text), polyline=from_polyline(pts))


@dataclass(frozen=True)
class Scenario:
    name: str
    noise: NoiseConfig | None = None


def scenarios(count: int, rho: float = 0.8, iterations: int = 1, side: str = "alternate", seed: int = 0) -> list[Scenario]:
    """Smooth scenario plus ``count`` noising scenarios. Scenario ``k`` uses
    seed ``seed + k``; with a deterministic side policy repeated scenarios
    would coincide and are dropped."""
    out = [Scenario("smooth")]
    for k in range(count):
        cfg = NoiseConfig(rho, iterations, side, seed + k)
        if all(s.name != cfg.label for s in out):
            out.append(Scenario(cfg.label, cfg))
    return out


@dataclass
class ScenarioResult:
    scenario: Scenario
    contour: ClosedContour
    profile: DescriptorProfile
    vertices: VertexSet


@dataclass
class VertexRun:
    results: list
    union: VertexSet
    n: int
    window: int
    meta: dict = field(default_factory=dict)


def scenario_contour(source: Source, scenario: Scenario, n: int) -> ClosedContour:
    if scenario.noise is None:
        return source.base(n)
    return noising(source.dense(n), scenario.noise, samples=n)


def run_vertices(
    source: Source,
    n: int,
    scenario_list: list[Scenario],
    w: int | None = None,
    slope_min: float | None = None,
    self_correction: bool = True,
    outward_sign: bool = False,
    admit_plateaus: bool = False,
    threads: int | None = None,
) -> VertexRun:
    w = default_window(n) if w is None else w
    results = []
    for sc in scenario_list:
        contour = scenario_contour(source, sc, n)
        prof = compute_profile(contour, self_correction, outward_sign, threads=threads)
        vs = label(detect(prof, w, slope_min, admit_plateaus, source=sc.name), prof)
        results.append(ScenarioResult(sc, contour, prof, vs))
    sizes = {r.profile.n for r in results}
    if len(sizes) > 1:
        raise MismatchedN(f"scenarios sampled at different N: {sorted(sizes)}")
    union = union_scenarios([r.vertices for r in results], w)
    return VertexRun(results, union, n, w)


def fd_extrema(kappa, window: int) -> np.ndarray:
    """Indices of strict circular local maxima of ``|kappa|`` over +/-window."""
    k = np.abs(np.asarray(kappa, dtype=float))
    n = len(k)
    keep = np.ones(n, dtype=bool)
    for off in range(1, window + 1):
        keep &= (k > np.roll(k, off)) & (k > np.roll(k, -off))
    return np.flatnonzero(keep)
