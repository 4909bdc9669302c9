"""Global Vertex detection.

A Global Vertex is a sample where a strict zero crossing of the first
derivative of VAR co-localizes with a zero crossing of its third
derivative. The first-derivative crossing (the extremum of VAR) is the
anchor; the third-derivative crossing must lie within ``w`` samples of it
on the circular index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .descriptors import SELF_CHORD_TERM, DescriptorProfile
from .errors import EmptyProfile, MismatchedN
from .local_algebra import ZeroCrossing, zero_crossings

CONVEX, CONCAVE = "convex", "concave"

# Detection tolerance for derivative k of phi: a relative floor plus a
# multiple of the round-off that a k-th order difference of phi can carry.
_REL_EPS = 1e-6
_ROUNDOFF_FACTOR = 1e3


@dataclass(frozen=True)
class Vertex:
    position: float
    window: int
    label: str | None = None
    kappa_at: float = float("nan")
    sources: tuple = ()
    d3_position: float = float("nan")
    d3_slope: float = float("nan")
    fallback: bool = False


@dataclass(frozen=True)
class VertexSet:
    vertices: tuple
    n: int
    window: int
    crossings: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @property
    def positions(self) -> np.ndarray:
        return np.array([v.position for v in self.vertices], dtype=float)

    @property
    def labels(self) -> list:
        return [v.label for v in self.vertices]


def default_window(n: int) -> int:
    return max(1, math.ceil(n / 50))


def circular_distance(a, b, n):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % n
    return np.minimum(d, n - d)


def derivative_eps(profile: DescriptorProfile, order: int) -> float:
    sig = (profile.phi_d1, profile.phi_d2, profile.phi_d3)[order - 1]
    roundoff = _ROUNDOFF_FACTOR * np.finfo(float).eps * float(np.max(np.abs(profile.phi))) / profile.ds**order
    return max(_REL_EPS * float(np.max(np.abs(sig))), roundoff)


def _clusters(items, n, w):
    """Group ``(position, payload)`` pairs whose sorted neighbours are within
    ``w`` on the circle. Returns lists of pairs, positions unwrapped so each
    cluster can be averaged directly."""
    items = sorted(items, key=lambda it: it[0])
    if not items:
        return []
    groups = [[items[0]]]
    for it in items[1:]:
        if it[0] - groups[-1][-1][0] <= w:
            groups[-1].append(it)
        else:
            groups.append([it])
    if len(groups) > 1 and groups[0][0][0] + n - groups[-1][-1][0] <= w:
        wrapped = [(p - n, x) for p, x in groups.pop()]
        groups[0] = wrapped + groups[0]
    return groups


def _merge(group, n, window, rank=None):
    pos = float(np.mean([p for p, _ in group])) % n
    verts = [v for _, v in group]
    sources = tuple(dict.fromkeys(s for v in verts for s in v.sources))
    if rank:
        sources = tuple(sorted(sources, key=lambda s: rank.get(s, len(rank))))
    labels = [v.label for v in verts if v.label is not None]
    label = None
    if labels:
        # majority vote; ties go to the earliest contributor
        counts = {lab: labels.count(lab) for lab in labels}
        label = max(counts, key=lambda lab: (counts[lab], -labels.index(lab)))
    kappas = [v.kappa_at for v in verts if not math.isnan(v.kappa_at)]
    first = verts[0]
    return Vertex(
        position=pos,
        window=window,
        label=label,
        kappa_at=float(np.mean(kappas)) if kappas else float("nan"),
        sources=sources,
        d3_position=first.d3_position,
        d3_slope=first.d3_slope,
        fallback=any(v.fallback for v in verts),
    )


def _dedupe(vertices, n, window):
    if len(vertices) < 2:
        return tuple(vertices)
    groups = _clusters([(v.position, v) for v in vertices], n, window)
    merged = [g[0][1] if len(g) == 1 else _merge(g, n, window) for g in groups]
    return tuple(sorted(merged, key=lambda v: v.position))


def detect(
    profile: DescriptorProfile,
    w: int | None = None,
    slope_min: float | None = None,
    admit_plateaus: bool = False,
    source: str = "smooth",
) -> VertexSet:
    """Vertices where crossings of ``phi'`` and ``phi'''`` co-localize.

    Each strict crossing of ``phi'`` is paired with the nearest strict
    crossing of ``phi'''`` within ``w`` samples (equidistant candidates:
    larger slope wins). ``slope_min`` drops third-derivative crossings whose
    per-sample slope magnitude is below it. ``admit_plateaus`` also anchors
    on the centres of near-zero runs of ``phi'``.
    """
    n = profile.n
    if n == 0:
        raise EmptyProfile("profile has no samples")
    w = default_window(n) if w is None else int(w)
    if w < 1:
        raise ValueError("window must be at least one sample")
    z1 = zero_crossings(profile.phi_d1, eps=derivative_eps(profile, 1))
    z3 = zero_crossings(profile.phi_d3, eps=derivative_eps(profile, 3))
    anchors = [z for z in z1 if z.is_strict or admit_plateaus]
    partners = [z for z in z3 if z.is_strict and (slope_min is None or z.slope >= slope_min)]
    found = []
    if partners:
        p3 = np.array([z.index for z in partners])
        for a in anchors:
            dist = circular_distance(a.index, p3, n)
            inside = np.flatnonzero(dist <= w)
            if len(inside) == 0:
                continue
            best = min(inside, key=lambda k: (round(float(dist[k]), 12), -partners[k].slope))
            z = partners[best]
            found.append(Vertex(float(a.index), w, sources=(source,), d3_position=z.index, d3_slope=z.slope))
    return VertexSet(_dedupe(found, n, w), n, w, {"phi_d1": z1, "phi_d3": z3})


def _fallback_kappa(profile, i):
    corr = SELF_CHORD_TERM if profile.self_correction_applied else 0.0
    sgn = 1.0 if profile.A[i] >= 0 else -1.0
    # numerator over sign(A) in the internal convention, flipped to convex-positive
    return -(profile.phi_d2[i] - profile.B[i] - corr) * sgn


def label(vset: VertexSet, profile: DescriptorProfile) -> VertexSet:
    """Convex where the corrected curvature estimate at the nearest defined
    sample is positive, concave otherwise. If no defined sample lies within
    the window, the sign of the estimator's numerator over sign(A) is used
    and the vertex is flagged ``fallback``."""
    if profile.n != vset.n:
        raise MismatchedN(f"vertex set has N={vset.n}, profile has N={profile.n}")
    n = profile.n
    kappa = profile.kappa_standard
    ok = np.flatnonzero(profile.defined)
    out = []
    for v in vset:
        i = int(round(v.position)) % n
        fallback = False
        if profile.defined[i]:
            k = float(kappa[i])
        else:
            dist = circular_distance(v.position, ok, n) if len(ok) else np.array([])
            if len(dist) and dist.min() <= vset.window:
                k = float(kappa[ok[int(np.argmin(dist))]])
            else:
                k, fallback = float(_fallback_kappa(profile, i)), True
        out.append(replace(v, label=CONVEX if k > 0 else CONCAVE, kappa_at=k if not fallback else float("nan"), fallback=fallback))
    return replace(vset, vertices=tuple(out))


def union_scenarios(sets, w: int | None = None) -> VertexSet:
    """Union of per-scenario vertex sets with circular deduplication: vertices
    within ``w`` of each other merge into one at their mean position."""
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one vertex set")
    n = sets[0].n
    for s in sets[1:]:
        if s.n != n:
            raise MismatchedN(f"vertex sets sampled at N={n} and N={s.n}")
    w = sets[0].window if w is None else int(w)
    allv = [v for s in sets for v in s]
    if not allv:
        return VertexSet((), n, w)
    rank = {}
    for v in allv:
        for src in v.sources:
            rank.setdefault(src, len(rank))
    groups = _clusters([(v.position, v) for v in allv], n, w)
    merged = [_merge(g, n, w, rank) for g in groups]
    return VertexSet(tuple(sorted(merged, key=lambda v: v.position)), n, w)


def match(found, truth, n, tol):
    """Greedy circular matching; returns ``(pairs, missed_truth, extra_found)``
    where pairs are ``(found_index, truth_index, distance)``."""
    found = np.asarray(found, dtype=float)
    truth = np.asarray(truth, dtype=float)
    cand = []
    for i, f in enumerate(found):
        for j, t in enumerate(truth):
            d = float(circular_distance(f, t, n))
            if d <= tol:
                cand.append((d, i, j))
    cand.sort()
    used_f, used_t, pairs = set(), set(), []
    for d, i, j in cand:
        if i not in used_f and j not in used_t:
            used_f.add(i)
            used_t.add(j)
            pairs.append((i, j, d))
    missed = [j for j in range(len(truth)) if j not in used_t]
    extra = [i for i in range(len(found)) if i not in used_f]
    return pairs, missed, extra


def crossing_rows(crossings: list[ZeroCrossing], name: str):
    return [(name, z.index, z.direction, z.slope) for z in crossings]
