"""Exit criteria, one test each, at their stated tolerances.

Each test records a one-line verdict that is printed in the terminal
summary (and immediately when run with ``-s``).
"""

import itertools
import os
import time

import numpy as np
import pytest

import conftest
import oracles
from globvert.cli import main
from globvert.contour import from_polyline, locate
from globvert.descriptors import angle_terms, compute_profile, consistency_adot, consistency_eq3_eq4
from globvert.laii import laii_profile, laii_vertices, rasterize
from globvert.local_algebra import OPLUS_TABLE, is_unambiguous, oplus, otimes, zero_crossings
from globvert.perturb import NoiseConfig, noising_step
from globvert.pipeline import Source, run_vertices, scenarios
from globvert.shapes import ShapeSpec, curvature_at_samples, fd_curvature, generate, reference_points
from globvert.vertices import CONVEX, circular_distance, detect, label, match

pytestmark = pytest.mark.acceptance

ELLIPSE = ShapeSpec("ellipse", {"a": 2, "b": 1})
RRECT = ShapeSpec("rounded_rect", {"w": 2, "h": 1, "r": 0.1})


def verdict(k, ok, detail):
    conftest.ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_1_circle_closed_forms():
    t0 = time.perf_counter()
    p = compute_profile(generate(ShapeSpec("circle", {"R": 1.0}), 512))
    dt = time.perf_counter() - t0
    ref = oracles.circle_continuum(1.0)
    err = {k: float(np.max(np.abs(getattr(p, k) - ref[k]))) for k in ref}
    tol = {"phi": 0.04, "A": 0.04, "B": 0.04, "C": 0.02, "D": 0.02}
    ok = all(err[k] <= tol[k] for k in ref) and dt < 1.0
    verdict(1, ok, "max errors " + ", ".join(f"{k} {v:.2e}" for k, v in err.items()) + f"; {dt:.2f} s")


def test_2_curvature_calibration():
    t0 = time.perf_counter()
    rows, ok = [], True
    for R in (0.5, 1.0, 2.0):
        c = generate(ShapeSpec("circle", {"R": R}), 512)
        corrected = compute_profile(c).kappa_global
        literal = compute_profile(c, self_correction=False).kappa_global
        e1 = float(np.max(np.abs(corrected * R - 1)))
        e2 = float(np.max(np.abs(literal * 2 * R - 1)))
        ok &= e1 <= 0.05 and e2 <= 0.05
        rows.append(f"R={R:g}: corrected {corrected.mean():.4f} (1/R {1 / R:.4f}), literal {literal.mean():.4f}")
    dt = time.perf_counter() - t0
    ok &= compute_profile(generate(ShapeSpec("circle", {"R": 1.0}), 16)).self_correction_applied
    verdict(2, ok and dt < 5.0, "; ".join(rows) + f"; {dt:.2f} s")


def _eq34(spec, n):
    c = generate(spec, n)
    t = angle_terms(c)
    k = curvature_at_samples(spec, c)
    res = [consistency_eq3_eq4(c, t, xi, k) for xi in range(0, n, n // 8)]
    return max(r["eq3_max"] for r in res), max(r["eq4_max"] for r in res)


def test_3_view_function_identities():
    circle = ShapeSpec("circle", {"R": 1.0})
    c3, c4 = _eq34(circle, 1024)
    e3, e4 = _eq34(ELLIPSE, 1024)
    coarse = [_eq34(ELLIPSE, n) for n in (256, 512)]
    halving = [coarse[0], coarse[1], (e3, e4)]
    orders = [float(np.log2(a[i] / b[i])) for a, b in zip(halving, halving[1:]) for i in (0, 1)]
    ok = c3 <= 1e-3 and c4 <= 1e-2 and e3 <= 5e-2 and e4 <= 5e-2 and min(orders) >= 1
    verdict(3, ok, f"circle {c3:.1e}/{c4:.1e}, ellipse {e3:.1e}/{e4:.1e}, empirical orders {min(orders):.2f}..{max(orders):.2f}")


def test_4_a_b_derivative_identities():
    c = generate(ELLIPSE, 1024)
    res = consistency_adot(compute_profile(c), curvature_at_samples(ELLIPSE, c))
    ok = res["adot_rel_rms"] <= 0.05 and res["bdot_rel_rms"] <= 0.05
    verdict(4, ok, f"relative RMS residuals A' {res['adot_rel_rms']:.2e}, B' {res['bdot_rel_rms']:.2e}")


def test_5_global_vertices_ellipse_and_circle():
    c = generate(ELLIPSE, 400)
    p = compute_profile(c)
    vs = label(detect(p, 2), p)
    truth = [locate(c, q) for q in oracles.ellipse_axis_points(2, 1)]
    pairs, missed, extra = match(vs.positions, truth, 400, 2)
    circle = compute_profile(generate(ShapeSpec("circle", {"R": 1.0}), 400))
    n_circle = len(detect(circle, 2))
    ok = len(vs) == 4 and not missed and not extra and n_circle == 0
    verdict(5, ok, f"ellipse {len(vs)} vertices at {vs.positions.round(2).tolist()}, circle {n_circle}")


def test_6_noising_paradox():
    n = 400
    run = run_vertices(Source("rrect", spec=RRECT), n, scenarios(1, rho=0.8, iterations=1, side="alternate"))
    smooth, noised = run.results[0].vertices, run.results[1].vertices
    union, w = run.union, run.window
    base = run.results[0].contour
    truth = [locate(base, q) for q in reference_points(RRECT)]
    subset = all(circular_distance(v.position, union.positions, n).min() <= w for v in smooth)

    def corner_errors(vs):
        pairs, missed, _ = match(vs.positions, truth, n, 3)
        return [d for _, _, d in pairs], missed

    u_err, u_missed = corner_errors(union)
    s_err, s_missed = corner_errors(smooth)
    n_err, _ = corner_errors(noised)
    _, unmatched_s, unmatched_n = match(smooth.positions, noised.positions, n, w)
    equal = len(smooth) == len(noised) and not unmatched_s and not unmatched_n
    if s_missed:
        outcome = f"smooth scenario misses {len(s_missed)} corner(s) that the union recovers"
        third = True
    else:
        third = equal and np.mean(u_err) < np.mean(s_err)
        outcome = (
            f"equal sets ({len(smooth)} vertices) with improved localization: corner error "
            f"smooth {np.mean(s_err):.4f}, noised {np.mean(n_err):.4f}, union {np.mean(u_err):.4f} samples "
            f"(gain {np.mean(s_err) - np.mean(u_err):.1e})"
        )
    ok = subset and not u_missed and third
    verdict(6, ok, outcome)


def test_7_phi_stability_and_curvature_collapse():
    c = generate(ShapeSpec("circle", {"R": 1.0}), 256)
    base_mean = compute_profile(c).phi / c.perimeter
    k0 = np.abs(fd_curvature(c)).mean()
    parts, ok = [], True
    for rho in (0.6, 0.8, 1.0):
        out = noising_step(c, NoiseConfig(rho=rho))
        # mean distance to the boundary, at the original points
        mean_dist = compute_profile(out).phi[0::2] / out.perimeter
        change = float(np.max(np.abs(mean_dist / base_mean - 1)))
        gain = float(np.abs(fd_curvature(out)).mean() / k0)
        ok &= change <= 0.05 and gain >= 10
        parts.append(f"rho={rho:g}: phi change {change:.1e}, |fd kappa| x{gain:.0f}")
    verdict(7, ok, "; ".join(parts))


def test_8_laii_baseline(tmp_path):
    sq = from_polyline([[0, 0], [2, 0], [2, 2], [0, 2]])
    r = rasterize(sq, 100, margin=20)
    edge, corner = laii_profile(r, r.to_pixels([[1.0, 0.0], [2.0, 2.0]]), 15).fraction
    c = generate(RRECT, 100)
    rr = rasterize(c)
    picks = laii_vertices(laii_profile(rr, rr.to_pixels(c.points), 15), 2)
    truth = [locate(c, q) for q in reference_points(RRECT)]
    _, missed, extra = match(picks.positions, truth, 100, 2)
    t0 = time.perf_counter()
    code = main(["compare", "rounded_rect:w=2,h=1,r=0.1", "--samples", "100", "--radius", "15", "--out", str(tmp_path), "--no-svg"])
    dt = time.perf_counter() - t0
    ok = (
        abs(edge - 0.5) <= 0.02
        and abs(corner - 0.25) <= 0.05
        and len(picks) == 4
        and picks.labels == [CONVEX] * 4
        and not missed
        and code == 0
        and dt < 30
    )
    verdict(8, ok, f"edge {edge:.3f}, corner {corner:.3f}, rounded rect {len(picks)} convex picks ({len(missed)} corners missed), compare {dt:.2f} s")


def test_9_local_algebra():
    tags = ("zdc", "zuc", "cz", "nz")
    checked, cells, bad = 0, 0, []
    for a, b in itertools.product(tags, tags):
        for table, op, name in ((oracles.OPLUS_REF, oplus, "oplus"), (oracles.OTIMES_REF, otimes, "otimes")):
            entry = oracles.table_cell(table, a, b)
            if not oracles.cell_is_unambiguous(entry):
                assert name == "oplus" and not is_unambiguous(OPLUS_TABLE, a, b)
                continue
            cells += 1
            for f, g in itertools.product(oracles.germs(a), oracles.germs(b)):
                res = op(a, b, f, g)
                checked += 1
                if not oracles.entry_admits(entry, res.behavior.value) or res.branch != "table":
                    bad.append((name, a, b))
    x = np.arange(20.0)
    errors = []
    for K in (1, 10, 100, 1000):
        (z,) = zero_crossings(K * (x - 7.3) + 0.3 * np.cos(x), circular=False)
        errors.append(abs(z.index - 7.3))
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    ok = not bad and monotone
    verdict(9, ok, f"{checked} germ compositions over {cells} unambiguous cells, {len(bad)} mismatches; migration |pos-c| " + ", ".join(f"{e:.1e}" for e in errors))


def test_10_determinism(tmp_path, monkeypatch):
    commands = [
        # 2048 samples split the pairwise sums into several row blocks
        ["descriptors", "star:base=1,a=0.3,k=5", "--samples", "2048"],
        ["vertices", "rounded_rect:w=2,h=1,r=0.1", "--samples", "200", "--scenarios", "2", "--side", "rand", "--seed", "3"],
    ]
    out = tmp_path / "out"
    runs = []
    top = max(4, os.cpu_count() or 1)
    for threads in ("1", str(top), "1"):
        monkeypatch.setenv("GLOBVERT_THREADS", threads)
        files = {}
        for argv in commands:
            assert main([*argv, "--out", str(out), "--no-svg"]) == 0
            files.update({name: (out / name).read_bytes() for name in sorted(os.listdir(out))})
        runs.append(files)
    ok = runs[0] == runs[1] == runs[2]
    verdict(10, ok, f"{len(runs[0])} CSV files byte-identical across threads 1/{top} and a rerun")
