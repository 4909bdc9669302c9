"""Distance-integral descriptors of a closed contour.

For every sample ``i`` of a uniformly resampled contour, with chord
``r = p_i - p_j`` and inward normal ``n_i``, the angle ``omega`` is taken
between ``n_i`` and ``-r`` such that the view function ``v_j(s) = |r|``
obeys ``dv/ds = -sin(omega)`` and
``d2v/ds2 = kappa*cos(omega) + cos(omega)**2/|r|``. Curvature inside those
identities uses the "outward" sign convention (the curvature vector points
away from the centre of curvature), in which a convex circle has negative
curvature; everything this module returns to callers uses the
standard convention (convex positive) unless ``outward_sign`` is requested.

All integrals over the contour are rectangle-rule sums with the self term
(``j == i``) excluded.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .contour import ClosedContour, Frames, diameter, frames as compute_frames
from .errors import AllUndefined, CoincidentSamples, ConfigError, NTooSmall

#: d2/ds2 of the self-chord |s - xi| integrated over xi
SELF_CHORD_TERM = 2.0

_BLOCK_ELEMENTS = 1 << 20


@dataclass(frozen=True, eq=False)
class AngleTerms:
    """Pairwise angle terms; (N, N) arrays whose diagonal is zero and excluded."""

    cos_omega: np.ndarray
    sin_omega: np.ndarray
    r_norm: np.ndarray

    @property
    def n(self) -> int:
        return self.r_norm.shape[0]


@dataclass(frozen=True, eq=False)
class DescriptorProfile:
    """Per-sample descriptor arrays, all aligned with the contour samples."""

    phi: np.ndarray
    phi_d1: np.ndarray
    phi_d2: np.ndarray
    phi_d3: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    kappa_global: np.ndarray
    defined: np.ndarray
    ds: float
    self_correction_applied: bool = True
    outward_sign: bool = False

    @property
    def n(self) -> int:
        return len(self.phi)

    @property
    def perimeter(self) -> float:
        return self.n * self.ds

    @property
    def kappa_standard(self) -> np.ndarray:
        """``kappa_global`` in the convex-positive convention."""
        return -self.kappa_global if self.outward_sign else self.kappa_global

    COLUMNS = ("index", "s", "phi", "phi_d1", "phi_d2", "phi_d3", "A", "B", "C", "D", "kappa_global", "defined")

    def columns(self) -> dict:
        idx = np.arange(self.n)
        return {
            "index": idx,
            "s": idx * self.ds,
            "phi": self.phi,
            "phi_d1": self.phi_d1,
            "phi_d2": self.phi_d2,
            "phi_d3": self.phi_d3,
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "D": self.D,
            "kappa_global": self.kappa_global,
            "defined": self.defined.astype(int),
        }


def thread_count() -> int:
    """Worker count for row-parallel sums, capped by ``GLOBVERT_THREADS``."""
    env = os.environ.get("GLOBVERT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"GLOBVERT_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _row_terms(points, normals, rows):
    r = points[rows, None, :] - points[None, :, :]
    rn = np.hypot(r[..., 0], r[..., 1])
    diag = (np.arange(len(rows)), rows)
    rn[diag] = np.inf
    if np.any(rn < 1e-12):
        i, j = np.argwhere(rn < 1e-12)[0]
        raise CoincidentSamples(f"samples {rows[i]} and {j} coincide")
    ux, uy = -r[..., 0] / rn, -r[..., 1] / rn
    nx, ny = normals[rows, 0][:, None], normals[rows, 1][:, None]
    cos = nx * ux + ny * uy
    sin = ux * ny - uy * nx
    inv = 1.0 / rn  # zero on the diagonal
    rn[diag] = 0.0
    return cos, sin, rn, inv


def _blocks(n):
    step = max(1, _BLOCK_ELEMENTS // n)
    return [np.arange(a, min(a + step, n)) for a in range(0, n, step)]


def angle_terms(contour: ClosedContour, frames: Frames | None = None) -> AngleTerms:
    """Full pairwise ``cos(omega)``, ``sin(omega)`` and ``|r|`` matrices."""
    fr = compute_frames(contour) if frames is None else frames
    cos, sin, rn, _ = _row_terms(contour.points, fr.normal, np.arange(contour.n))
    return AngleTerms(cos, sin, rn)


def var_profile(contour: ClosedContour, terms: AngleTerms | None = None) -> np.ndarray:
    """Total-distance function: ``phi_i = sum_j |p_i - p_j| ds``."""
    if contour.n < 8:
        raise NTooSmall(f"need at least 8 samples, got {contour.n}")
    if terms is not None:
        return terms.r_norm.sum(axis=1) * contour.ds
    p = contour.points
    out = np.empty(contour.n)
    for rows in _blocks(contour.n):
        r = p[rows, None, :] - p[None, :, :]
        out[rows] = np.hypot(r[..., 0], r[..., 1]).sum(axis=1)
    return out * contour.ds


def derivatives(phi, ds: float):
    """Circular central differences of ``phi``: 2-point first, 3-point second,
    5-point third derivative."""
    f = np.asarray(phi, dtype=float)
    p1, m1 = np.roll(f, -1), np.roll(f, 1)
    p2, m2 = np.roll(f, -2), np.roll(f, 2)
    d1 = (p1 - m1) / (2 * ds)
    d2 = (p1 - 2 * f + m1) / ds**2
    d3 = (-m2 + 2 * m1 - 2 * p1 + p2) / (2 * ds**3)
    return d1, d2, d3


def integral_descriptors(contour: ClosedContour, terms: AngleTerms):
    """``A = sum cos``, ``B = sum cos^2/|r|``, ``C = 3 sum sin cos/|r|``,
    ``D = 3 sum cos^2 sin/|r|^2``, each times ``ds``."""
    ds = contour.ds
    rn = terms.r_norm
    inv = np.divide(1.0, rn, out=np.zeros_like(rn), where=rn > 0)
    c, s = terms.cos_omega, terms.sin_omega
    A = c.sum(axis=1) * ds
    B = (c * c * inv).sum(axis=1) * ds
    C = 3 * (s * c * inv).sum(axis=1) * ds
    D = 3 * (c * c * s * inv * inv).sum(axis=1) * ds
    return A, B, C, D


def _row_sums(points, normals, rows):
    cos, sin, rn, inv = _row_terms(points, normals, rows)
    cc_inv = cos * cos * inv
    return (
        rn.sum(axis=1),
        cos.sum(axis=1),
        cc_inv.sum(axis=1),
        (sin * cos * inv).sum(axis=1),
        (cc_inv * sin * inv).sum(axis=1),
    )


def _sums(contour, fr, threads):
    n = contour.n
    blocks = _blocks(n)
    out = np.empty((5, n))
    if threads <= 1 or len(blocks) == 1:
        results = [_row_sums(contour.points, fr.normal, rows) for rows in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda rows: _row_sums(contour.points, fr.normal, rows), blocks))
    for rows, res in zip(blocks, results):
        for k in range(5):
            out[k, rows] = res[k]
    return out


def curvature_estimate(
    phi_d2,
    A,
    B,
    perimeter: float,
    self_correction: bool = True,
    outward_sign: bool = False,
    eps_a: float | None = None,
):
    """Global curvature ``(phi'' - B - 2) / A`` (or ``(phi'' - B) / A`` without
    the self-chord correction).

    Returns ``(kappa, defined)``; samples with ``|A| <= eps_a`` (default
    ``1e-3 * perimeter``) are NaN and flagged undefined.
    """
    eps = 1e-3 * perimeter if eps_a is None else eps_a
    A = np.asarray(A, dtype=float)
    defined = np.abs(A) > eps
    if not defined.any():
        raise AllUndefined("|A| is below the threshold at every sample")
    corr = SELF_CHORD_TERM if self_correction else 0.0
    kappa = np.full(A.shape, np.nan)
    kappa[defined] = (np.asarray(phi_d2)[defined] - np.asarray(B)[defined] - corr) / A[defined]
    if not outward_sign:
        kappa = -kappa
    return kappa, defined


def compute_profile(
    contour: ClosedContour,
    self_correction: bool = True,
    outward_sign: bool = False,
    eps_a: float | None = None,
    threads: int | None = None,
) -> DescriptorProfile:
    """All descriptors of a uniformly resampled contour.

    Rows are summed independently, in blocks that may run on several
    threads; the per-row summation order is fixed so the result does not
    depend on the thread count.
    """
    if contour.n < 8:
        raise NTooSmall(f"need at least 8 samples, got {contour.n}")
    fr = compute_frames(contour)
    workers = thread_count() if threads is None else max(1, int(threads))
    sums = _sums(contour, fr, workers)
    ds = contour.ds
    phi = sums[0] * ds
    A = sums[1] * ds
    B = sums[2] * ds
    C = 3 * sums[3] * ds
    D = 3 * sums[4] * ds
    d1, d2, d3 = derivatives(phi, ds)
    kappa, defined = curvature_estimate(d2, A, B, contour.perimeter, self_correction, outward_sign, eps_a)
    return DescriptorProfile(phi, d1, d2, d3, A, B, C, D, kappa, defined, ds, self_correction, outward_sign)


def phi_bound(contour: ClosedContour) -> float:
    """Upper bound perimeter x diameter on any value of ``phi``."""
    return contour.perimeter * diameter(contour)


# -- consistency checks between the integral identities -----------------------

def _circular_diff(f, ds):
    return (np.roll(f, -1) - np.roll(f, 1)) / (2 * ds)


def consistency_eq3_eq4(contour: ClosedContour, terms: AngleTerms, xi: int, kappa, guard: int = 3) -> dict:
    """Finite-difference check of the view-function identities at fixed ``xi``.

    ``kappa`` is the analytic curvature per sample in the standard
    convention. Samples within ``guard`` of ``xi`` are skipped. Returns the
    maximum absolute residuals of ``dv/ds + sin(omega)`` and of
    ``d2v/ds2 - (kappa_p cos(omega) + cos(omega)^2/|r|)`` with
    ``kappa_p = -kappa``.
    """
    n, ds = contour.n, contour.ds
    v = terms.r_norm[:, xi]
    c = terms.cos_omega[:, xi]
    s = terms.sin_omega[:, xi]
    dv = (np.roll(v, -1) - np.roll(v, 1)) / (2 * ds)
    ddv = (np.roll(v, -1) - 2 * v + np.roll(v, 1)) / ds**2
    offset = np.abs((np.arange(n) - xi + n // 2) % n - n // 2)
    keep = offset > guard
    kp = -np.asarray(kappa, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        eq4_rhs = kp * c + c * c / v
    res3 = np.abs(dv + s)[keep]
    res4 = np.abs(ddv - eq4_rhs)[keep]
    return {"xi": int(xi), "eq3_max": float(res3.max()), "eq4_max": float(res4.max()), "guard": guard}


def _rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


def consistency_adot(profile: DescriptorProfile, kappa) -> dict:
    """Finite-difference check of the derivative identities for ``A`` and ``B``:
    ``A' = -kappa_p phi' + C/3`` and ``B' = 2 kappa_p C/3 + D``, with
    ``kappa_p = -kappa`` and ``kappa`` the analytic standard curvature per
    sample.

    Reports absolute RMS / max residuals and RMS relative to the measured
    derivative.
    """
    kp = -np.asarray(kappa, dtype=float)
    dA = _circular_diff(profile.A, profile.ds)
    dB = _circular_diff(profile.B, profile.ds)
    res1 = dA - (-kp * profile.phi_d1 + profile.C / 3)
    res2 = dB - (2 * kp * profile.C / 3 + profile.D)
    scale1, scale2 = _rms(dA), _rms(dB)
    return {
        "adot_rms": _rms(res1),
        "adot_max": float(np.abs(res1).max()),
        "adot_rel_rms": _rms(res1) / scale1 if scale1 > 0 else float("inf"),
        "bdot_rms": _rms(res2),
        "bdot_max": float(np.abs(res2).max()),
        "bdot_rel_rms": _rms(res2) / scale2 if scale2 > 0 else float("inf"),
    }
