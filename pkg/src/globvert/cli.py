"""Command-line front end.

Every output file starts with the run manifest (as ``#`` comment lines in
CSV, as a ``manifest`` object in JSON) so that results can be reproduced.
Exit codes: 0 success, 2 usage or configuration error, 3 input error,
4 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .contour import locate, read_pgm, trace_boundary
from .descriptors import DescriptorProfile, compute_profile
from .errors import ConfigError, GlobvertError, NTooSmall, WriteFailure
from .laii import DEFAULT_RADIUS, laii_profile, laii_vertices, rasterize
from .perturb import NoiseConfig, noising
from .pipeline import Source, fd_extrema, resolve_input, run_vertices, scenarios
from .shapes import fd_curvature, reference_points
from .svg import overlay, panels
from .vertices import CONCAVE, CONVEX, Vertex, VertexSet, default_window, match

SIDES = {"alt": "alternate", "in": "interior", "out": "exterior", "rand": "random"}


# -- output -------------------------------------------------------------------

def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return None if math.isnan(v) else float(v)
    return v


class Writer:
    def __init__(self, out_dir, fmt, manifest):
        self.out_dir = out_dir
        self.fmt = fmt
        self.manifest = manifest
        self.written = []
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as exc:
            raise WriteFailure(f"cannot create output directory {out_dir!r}: {exc}") from exc

    def _open(self, name):
        path = os.path.join(self.out_dir, name)
        try:
            fh = open(path, "w", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise WriteFailure(f"cannot write {path!r}: {exc}") from exc
        self.written.append(path)
        return fh

    def table(self, stem, columns: list, rows: list, extra: dict | None = None):
        """Write rows as CSV (17 significant digits) or JSON."""
        meta = dict(self.manifest, **(extra or {}))
        if self.fmt == "json":
            with self._open(stem + ".json") as fh:
                data = {c: [_json_value(r[i]) for r in rows] for i, c in enumerate(columns)}
                json.dump({"manifest": meta, "columns": columns, "data": data}, fh, indent=1, sort_keys=False)
                fh.write("\n")
            return
        with self._open(stem + ".csv") as fh:
            for k, v in meta.items():
                fh.write(f"# {k}: {v}\n")
            fh.write(",".join(columns) + "\n")
            for r in rows:
                fh.write(",".join(_num(v) for v in r) + "\n")

    def text(self, name, body):
        with self._open(name) as fh:
            fh.write(body)


def read_table(path):
    """Read a CSV or JSON file written by :class:`Writer` back into
    ``(manifest, {column: array-or-list})``."""
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        data = {c: [float("nan") if v is None else v for v in vals] for c, vals in doc["data"].items()}
        return doc["manifest"], data
    manifest, header, rows = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                k, _, v = line[2:].partition(": ")
                manifest[k] = v
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append(line.split(","))
    data = {}
    for i, c in enumerate(header or []):
        col = [r[i] for r in rows]
        try:
            data[c] = np.array([float(x) for x in col])
        except ValueError:
            data[c] = col
    return manifest, data


# -- argument handling ------------------------------------------------------------

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="shape description (e.g. ellipse:a=2,b=1), CSV polyline or PGM image")
    common.add_argument("--samples", type=int, default=100, help="analysis sample count N (default 100)")
    common.add_argument("--window", type=int, default=None, help="co-localization window in samples (default ceil(N/50))")
    common.add_argument("--rho", type=float, default=0.8, help="noising radius factor, > 0.5")
    common.add_argument("--noise-iters", type=int, default=1, help="noising passes per scenario")
    common.add_argument("--side", choices=sorted(SIDES), default="alt", help="side of inserted points")
    common.add_argument("--seed", type=int, default=0, help="seed for the random side policy")
    common.add_argument("--scenarios", type=int, default=1, help="number of noised scenarios besides the smooth one")
    common.add_argument("--outward-sign", action="store_true", help="report curvature with convex negative")
    common.add_argument("--no-self-correction", action="store_true", help="omit the +2 self-chord term")
    common.add_argument("--slope-min", type=float, default=None, help="minimum slope of third-derivative crossings")
    common.add_argument("--admit-plateaus", action="store_true", help="anchor vertices on flat runs of phi' too")
    common.add_argument("--radius", type=float, default=DEFAULT_RADIUS, help="LAII disk radius in pixels")
    common.add_argument("--scale", type=float, default=None, help="raster pixels per unit (default: 256 px extent)")
    common.add_argument("--threshold", type=float, default=128, help="foreground threshold for PGM input")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--no-svg", action="store_true", help="skip SVG output")

    parser = argparse.ArgumentParser(prog="globvert", description="Global Vertex detection on closed contours.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "trace": "boundary pixels of a binary image (shapes and polylines are rasterized first)",
        "resample": "uniformly resampled contour",
        "descriptors": "VAR and integral descriptor profile",
        "vertices": "Global Vertices per scenario and their union",
        "noise": "noised contour",
        "laii": "LAII profile and picks",
        "compare": "global detector vs LAII vs differential curvature",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _check(args):
    if args.samples < 8:
        raise NTooSmall(f"--samples must be at least 8, got {args.samples}")
    if args.window is not None and args.window < 1:
        raise ConfigError("--window must be at least 1")
    if args.scenarios < 0:
        raise ConfigError("--scenarios must be non-negative")
    if args.radius < 2:
        raise ConfigError("--radius must be at least 2 pixels")
    if args.scale is not None and not args.scale > 0:
        raise ConfigError("--scale must be positive")
    NoiseConfig(args.rho, args.noise_iters, SIDES[args.side], args.seed)


def manifest(args) -> dict:
    w = default_window(args.samples) if args.window is None else args.window
    scen = [s.name for s in scenarios(args.scenarios, args.rho, args.noise_iters, SIDES[args.side], args.seed)]
    return {
        "globvert": __version__,
        "command": args.command,
        "input": args.input,
        "samples": args.samples,
        "window": w,
        "scenarios": ";".join(scen),
        "self_correction": not args.no_self_correction,
        "sign_convention": "outward" if args.outward_sign else "standard",
        "slope_min": "unset" if args.slope_min is None else _num(args.slope_min),
        "admit_plateaus": args.admit_plateaus,
        "out": args.out,
    }


# -- commands -------------------------------------------------------------------------

def _profile_rows(prof: DescriptorProfile):
    cols = prof.columns()
    names = list(DescriptorProfile.COLUMNS)
    return names, [tuple(cols[c][i] for c in names) for i in range(prof.n)]


def cmd_trace(args, out: Writer, source: Source):
    if source.polyline is not None and args.input.lower().endswith((".pgm", ".pnm")):
        pts = source.polyline.points
    else:
        contour = source.base(args.samples)
        raster = rasterize(contour, args.scale)
        pts = trace_boundary(raster.mask.astype(np.uint8) * 255)
    out.table("trace", ["x", "y"], [tuple(p) for p in pts])
    if not args.no_svg:
        out.text("trace.svg", overlay(pts, title=f"traced boundary of {args.input}"))
    return f"{len(pts)} boundary pixels"


def cmd_resample(args, out: Writer, source: Source):
    contour = source.base(args.samples)
    out.table("resampled", ["x", "y"], [tuple(p) for p in contour.points], {"ds": _num(contour.ds)})
    if not args.no_svg:
        out.text("resampled.svg", overlay(contour.points, title=f"{args.input}, N={contour.n}"))
    return f"{contour.n} samples, ds={contour.ds:.6g}"


def cmd_descriptors(args, out: Writer, source: Source):
    contour = source.base(args.samples)
    prof = compute_profile(contour, not args.no_self_correction, args.outward_sign)
    names, rows = _profile_rows(prof)
    out.table("descriptors", names, rows)
    if not args.no_svg:
        series = {"phi": prof.phi, "phi''": prof.phi_d2, "A": prof.A, "B": prof.B, "kappa_phi": prof.kappa_global}
        out.text("descriptors.svg", panels(series, title=f"{args.input}, N={prof.n}"))
    return f"{prof.n} samples, phi in [{prof.phi.min():.6g}, {prof.phi.max():.6g}]"


def _vertex_rows(vs: VertexSet, scenario=None):
    rows = []
    for v in vs:
        row = (v.position, v.label, v.kappa_at, "|".join(v.sources))
        rows.append(row if scenario is None else (scenario,) + row)
    return rows


def _run(args, source):
    scen = scenarios(args.scenarios, args.rho, args.noise_iters, SIDES[args.side], args.seed)
    return run_vertices(
        source,
        args.samples,
        scen,
        args.window,
        args.slope_min,
        not args.no_self_correction,
        args.outward_sign,
        args.admit_plateaus,
    )


def cmd_vertices(args, out: Writer, source: Source):
    run = _run(args, source)
    out.table("vertices", ["position", "label", "kappa", "sources"], _vertex_rows(run.union))
    per = [row for r in run.results for row in _vertex_rows(r.vertices, r.scenario.name)]
    out.table("vertices_scenarios", ["scenario", "position", "label", "kappa", "sources"], per)
    cross = []
    for r in run.results:
        for sig, zs in r.vertices.crossings.items():
            cross.extend((r.scenario.name, sig, z.index, z.direction, z.slope) for z in zs)
    out.table("crossings", ["scenario", "signal", "index", "direction", "slope"], cross)
    if not args.no_svg:
        base = run.results[0].contour
        sets = {"union": run.union}
        sets.update({r.scenario.name: r.vertices for r in run.results})
        out.text("vertices.svg", overlay(base.points, sets, title=f"{args.input}, N={run.n}, w={run.window}"))
    return f"{len(run.union)} vertices in the union of {len(run.results)} scenario(s)"


def cmd_noise(args, out: Writer, source: Source):
    contour = source.base(args.samples)
    cfg = NoiseConfig(args.rho, args.noise_iters, SIDES[args.side], args.seed)
    noised = noising(contour, cfg)
    out.table("noised", ["x", "y"], [tuple(p) for p in noised.points], {"noise": cfg.label})
    if not args.no_svg:
        out.text("noised.svg", overlay(noised.points, title=f"{cfg.label}, {noised.n} points", tick_every=10 * 2**cfg.iterations))
    return f"{noised.n} points, perimeter {contour.perimeter:.6g} -> {noised.perimeter:.6g}"


def _laii(args, contour, window):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        raster = rasterize(contour, args.scale, margin=int(math.ceil(args.radius)) + 5)
    prof = laii_profile(raster, raster.to_pixels(contour.points), args.radius)
    return raster, prof, laii_vertices(prof, window)


def cmd_laii(args, out: Writer, source: Source):
    w = default_window(args.samples) if args.window is None else args.window
    if source.polyline is not None and args.input.lower().endswith((".pgm", ".pnm")):
        # samples at traced pixel centres: the edge is half a pixel further out
        contour = source.base(args.samples)
        mask = read_pgm(args.input) >= args.threshold
        prof = laii_profile(mask, contour.points, args.radius, offset=0.5)
        vs = laii_vertices(prof, w)
    else:
        contour = source.base(args.samples)
        _, prof, vs = _laii(args, contour, w)
    rows = [(i, p[0], p[1], f) for i, (p, f) in enumerate(zip(prof.samples, prof.fraction))]
    out.table("laii", ["index", "x_px", "y_px", "fraction"], rows, {"radius": _num(args.radius), "disk_pixels": prof.disk_count})
    out.table("laii_vertices", ["position", "label", "fraction", "sources"],
              [(v.position, v.label, prof.fraction[int(v.position)], "laii") for v in vs])
    if not args.no_svg:
        out.text("laii.svg", panels({"laii fraction": prof.fraction}, title=f"LAII, radius {args.radius:g} px"))
    return f"{len(vs)} LAII picks"


def _fd_vertices(contour, window, source="fd"):
    k = fd_curvature(contour)
    idx = fd_extrema(k, window)
    return VertexSet(tuple(Vertex(float(i), window, CONVEX if k[i] > 0 else CONCAVE, float(k[i]), (source,)) for i in idx), contour.n, window)


def cmd_compare(args, out: Writer, source: Source):
    run = _run(args, source)
    n, w = run.n, run.window
    base = run.results[0].contour
    truth = None
    if source.spec is not None:
        truth = np.array([locate(base, p) for p in reference_points(source.spec)])
    methods = []
    for r in run.results:
        name = r.scenario.name
        methods.append(("global", name, r.vertices))
        methods.append(("laii", name, _laii(args, r.contour, w)[2]))
        methods.append(("fd", name, _fd_vertices(r.contour, w)))
    methods.append(("global", "union", run.union))
    detail, summary = [], []
    for method, scen, vs in methods:
        pos = vs.positions
        if truth is None:
            for v in vs:
                detail.append((method, scen, float("nan"), v.position, v.label, float("nan")))
            summary.append((method, scen, len(vs), 0, 0, len(vs), float("nan")))
            continue
        pairs, missed, extra = match(pos, truth, n, w)
        for i, j, d in pairs:
            detail.append((method, scen, truth[j], pos[i], vs.vertices[i].label, d))
        for j in missed:
            detail.append((method, scen, truth[j], float("nan"), "", float("nan")))
        err = float(np.mean([d for _, _, d in pairs])) if pairs else float("nan")
        summary.append((method, scen, len(vs), len(pairs), len(missed), len(extra), err))
    out.table("compare", ["method", "scenario", "reference", "position", "label", "error"], detail)
    out.table("compare_summary", ["method", "scenario", "found", "matched", "missed", "extra", "mean_error"], summary)
    lines = [f"{'method':8s} {'scenario':40s} found matched missed extra mean_error"]
    for m, s, f, mt, ms, ex, e in summary:
        lines.append(f"{m:8s} {s:40s} {f:5d} {mt:7d} {ms:6d} {ex:5d} {e:10.4f}")
    return "\n".join(lines)


COMMANDS = {
    "trace": cmd_trace,
    "resample": cmd_resample,
    "descriptors": cmd_descriptors,
    "vertices": cmd_vertices,
    "noise": cmd_noise,
    "laii": cmd_laii,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        _check(args)
        source = resolve_input(args.input, args.threshold)
        out = Writer(args.out, args.format, manifest(args))
        report = COMMANDS[args.command](args, out, source)
    except GlobvertError as exc:
        print(f"globvert: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    print(report)
    for path in out.written:
        print(f"wrote {path}")
    print(f"done in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
