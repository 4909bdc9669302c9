"""Local behaviours of sampled functions and their composition tables.

A sampled window around a point is classified as one of

* ``zuc`` / ``zdc`` -- zero up / down crossing (order of contact one),
* ``cz``  -- constant zero: the window touches zero with contact order >= 2
  (a zero extremum, a zero saddle, or values within tolerance throughout),
* ``nz``  -- bounded away from zero.

:func:`oplus` and :func:`otimes` classify sums and products of germs and
compare the result against the composition tables; :func:`zero_crossings`
extracts all crossings of a circular signal with sub-sample positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AmbiguousWindow


class LocalBehavior(str, Enum):
    ZUC = "zuc"
    ZDC = "zdc"
    CZ = "cz"
    NZ = "nz"

    @property
    def is_crossing(self) -> bool:
        return self in (LocalBehavior.ZUC, LocalBehavior.ZDC)


ZUC, ZDC, CZ, NZ = LocalBehavior.ZUC, LocalBehavior.ZDC, LocalBehavior.CZ, LocalBehavior.NZ

# Table entries are sets of admissible results. "zc" (either crossing) and the
# parenthesised exception entries widen the set; single-valued cells are the
# unambiguous ones.
_ZC = frozenset({ZUC, ZDC})

OPLUS_TABLE = {
    (ZDC, ZDC): frozenset({ZDC}),
    (ZDC, ZUC): _ZC | {CZ},
    (ZDC, CZ): frozenset({ZDC}),
    (ZDC, NZ): frozenset({NZ}),
    (ZUC, ZDC): _ZC | {CZ},
    (ZUC, ZUC): frozenset({ZUC}),
    (ZUC, CZ): frozenset({ZUC}),
    (ZUC, NZ): frozenset({NZ}),
    (CZ, ZDC): frozenset({ZDC}),
    (CZ, ZUC): frozenset({ZUC}),
    (CZ, CZ): frozenset({CZ}),
    (CZ, NZ): frozenset({NZ}),
    (NZ, ZDC): frozenset({NZ}),
    (NZ, ZUC): frozenset({NZ}),
    (NZ, CZ): frozenset({NZ}),
    (NZ, NZ): frozenset({NZ}) | _ZC | {CZ},
}

# the "main" entry of each cell; for exception cells, the entry outside parentheses
_OPLUS_MAIN = {
    (ZDC, ZUC): _ZC,
    (ZUC, ZDC): _ZC,
    (NZ, NZ): frozenset({NZ}),
}

OTIMES_TABLE = {}
for _a in LocalBehavior:
    for _b in LocalBehavior:
        if CZ in (_a, _b):
            OTIMES_TABLE[_a, _b] = frozenset({CZ})
        elif _a.is_crossing and _b.is_crossing:
            OTIMES_TABLE[_a, _b] = frozenset({CZ})
        elif NZ in (_a, _b) and (_a.is_crossing or _b.is_crossing):
            OTIMES_TABLE[_a, _b] = _ZC
        else:
            OTIMES_TABLE[_a, _b] = frozenset({NZ})


def is_unambiguous(table, a, b) -> bool:
    """True for cells without parenthesised exceptions."""
    return table is OTIMES_TABLE or (a, b) not in _OPLUS_MAIN


@dataclass(frozen=True)
class Composition:
    """Outcome of composing two local behaviours.

    ``branch`` is ``"table"`` when the classified result is the cell's main
    entry, ``"exception"`` when it is one of the parenthesised alternatives
    and ``"mismatch"`` when the table does not admit it.
    """

    behavior: LocalBehavior
    expected: frozenset
    branch: str

    @property
    def agrees(self) -> bool:
        return self.branch != "mismatch"


@dataclass(frozen=True)
class ZeroCrossing:
    """A zero crossing of a sampled signal.

    ``index`` is fractional (linear interpolation between the straddling
    samples); ``slope`` is the signal change per sample across the crossing.
    ``direction`` is ``"up"``, ``"down"`` or ``"cz"`` for a touch/plateau
    record of a run of near-zero values.
    """

    index: float
    direction: str
    slope: float

    @property
    def is_strict(self) -> bool:
        return self.direction in ("up", "down")


#: slope per sample, relative to the window's peak, below which a sign change
#: counts as a higher-order contact
CONTACT_TOL = 1e-3


def default_eps(signal) -> float:
    return 1e-6 * float(np.max(np.abs(signal))) if len(signal) else 0.0


def _window(signal, index, run, circular):
    x = np.asarray(signal, dtype=float)
    if index is None:
        return x
    if circular:
        idx = np.arange(index - run, index + run + 1) % len(x)
        return x[idx]
    return x[max(0, index - run): index + run + 1]


def _slope_at(w, pos):
    """Derivative of the interpolating polynomial (degree <= 4) at ``pos``."""
    k = len(w)
    deg = min(k - 1, 4)
    offs = np.arange(k, dtype=float)
    if k > deg + 1:  # centre a 5-point stencil on the crossing
        lo = int(np.clip(round(pos) - 2, 0, k - 5))
        offs, w = offs[lo:lo + 5], w[lo:lo + 5]
    coef = np.polynomial.polynomial.polyfit(offs - pos, w, deg)
    return coef[1] if len(coef) > 1 else 0.0


def classify(signal, index: int | None = None, eps: float | None = None, run: int = 2, circular: bool = True) -> LocalBehavior:
    """Local behaviour of ``signal`` in the window ``index +/- run``.

    With ``index=None`` the whole array is treated as the window (a germ).
    A single strict sign change is a crossing unless the interpolated slope
    at the crossing is negligible (``<= max(eps, CONTACT_TOL * max|w|)`` per
    sample), in which case the contact order is at least three and the
    window is ``cz``.
    """
    w = _window(signal, index, run, circular)
    if eps is None:
        eps = default_eps(w) or 1e-300
    if eps <= 0:
        raise ValueError("eps must be positive")
    small = np.abs(w) <= eps
    if small.all():
        return CZ
    strict = np.flatnonzero(~small)
    signs = np.sign(w[strict])
    changes = np.flatnonzero(signs[1:] != signs[:-1])
    if len(changes) > 1:
        raise AmbiguousWindow(f"{len(changes)} sign changes in a window of {len(w)} samples")
    if len(changes) == 0:
        return CZ if small.any() else NZ
    i0, i1 = strict[changes[0]], strict[changes[0] + 1]
    pos = i0 + w[i0] / (w[i0] - w[i1]) * (i1 - i0)
    if abs(_slope_at(w, pos)) <= max(eps, CONTACT_TOL * float(np.max(np.abs(w)))):
        return CZ
    return ZUC if w[i1] > 0 else ZDC


def _compose(table, a, b, germ, eps, run):
    got = classify(germ, eps=eps, run=run)
    expected = table[a, b]
    main = _OPLUS_MAIN.get((a, b), expected) if table is OPLUS_TABLE else expected
    if got in main:
        branch = "table"
    elif got in expected:
        branch = "exception"
    else:
        branch = "mismatch"
    return Composition(got, expected, branch)


def _checked(label, germ, eps, run, name):
    got = classify(germ, eps=eps, run=run)
    if got is not LocalBehavior(label):
        raise ValueError(f"germ {name} classifies as {got.value}, not {LocalBehavior(label).value}")
    return LocalBehavior(label)


def oplus(a, b, f, g, eps: float | None = None, run: int = 2) -> Composition:
    """Local behaviour of ``f + g`` given the behaviours of germs ``f`` and ``g``."""
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError("germ windows must be aligned and of equal length")
    a = _checked(a, f, eps, run, "f")
    b = _checked(b, g, eps, run, "g")
    return _compose(OPLUS_TABLE, a, b, f + g, eps, run)


def otimes(a, b, f, g, eps: float | None = None, run: int = 2) -> Composition:
    """Local behaviour of ``f * g`` given the behaviours of germs ``f`` and ``g``."""
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError("germ windows must be aligned and of equal length")
    a = _checked(a, f, eps, run, "f")
    b = _checked(b, g, eps, run, "g")
    return _compose(OTIMES_TABLE, a, b, f * g, eps, run)


def oplus_at(f, g, s1: int, s2: int, eps: float | None = None, run: int = 2):
    """Sum of local behaviours at distinct points ``s1`` and ``s2``.

    The saturation point ``s*`` is the sample of ``[s1, s2]`` closest to
    ``s1`` at which ``|f + g|`` attains its minimum over the interval.
    Returns ``(behaviour of f + g at s*, s*)``.
    """
    h = np.asarray(f, dtype=float) + np.asarray(g, dtype=float)
    lo, hi = sorted((s1, s2))
    seg = np.abs(h[lo:hi + 1])
    best = np.flatnonzero(seg == seg.min()) + lo
    s_star = int(best[np.argmin(np.abs(best - s1))])
    return classify(h, s_star, eps=eps, run=run, circular=False), s_star


def zero_crossings(signal, eps: float | None = None, circular: bool = True) -> list[ZeroCrossing]:
    """All sign changes of ``signal``, sorted by position.

    Strict sign changes between neighbours get linearly interpolated
    positions. A run of values with ``|x| <= eps`` is collapsed to one
    record at the run centre: a crossing (``up``/``down``) if the strict
    values on either side have opposite signs, otherwise a ``cz`` record.
    """
    x = np.asarray(signal, dtype=float)
    n = len(x)
    if n == 0:
        return []
    if eps is None:
        eps = default_eps(x)
    strict = np.flatnonzero(np.abs(x) > eps)
    if len(strict) == 0:
        return [ZeroCrossing(0.5 * (n - 1), "cz", 0.0)]
    pairs = list(zip(strict[:-1], strict[1:]))
    if circular:
        pairs.append((strict[-1], strict[0] + n))
    out = []
    for a, b in pairs:
        gap = b - a
        xa, xb = x[a], x[b % n]
        if np.sign(xa) != np.sign(xb):
            pos = a + xa / (xa - xb) if gap == 1 else 0.5 * (a + b)
            out.append(ZeroCrossing(float(pos % n) if circular else float(pos), "up" if xb > xa else "down", abs(xb - xa) / gap))
        elif gap > 1:
            centre = 0.5 * (a + b)
            out.append(ZeroCrossing(float(centre % n) if circular else float(centre), "cz", 0.0))
    if not circular:
        if strict[0] > 0:
            out.append(ZeroCrossing(0.5 * (strict[0] - 1), "cz", 0.0))
        if strict[-1] < n - 1:
            out.append(ZeroCrossing(0.5 * (strict[-1] + 1 + n - 1), "cz", 0.0))
    out.sort(key=lambda z: z.index)
    return out
