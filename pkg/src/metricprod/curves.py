"""Curves, subdivision length, and the product-length check.

Length is computed as the limit of sums of chord distances over uniform
dyadic subdivisions.  The triangle inequality makes these sums nondecreasing
under refinement, so the dyadic limit equals the supremum over all
subdivisions for continuous curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .reports import FAIL, PASS, TAU_METRIC, UNDETERMINED, ValidationReport
from .sampling import rng_stream

LEN_FLOOR = 1e-6
DIVERGENCE_FACTOR = 1e6


def tau_len(depth: int, first_level: float) -> float:
    """Length tolerance at a dyadic depth; the chord scale decays linearly
    in the step count, floored at LEN_FLOOR."""
    return max(LEN_FLOOR, float(first_level) / 2**depth)


# -- point-structure helpers (floats, vectors, and tuples thereof) -------------

def _lerp(x, y, u: np.ndarray):
    if isinstance(x, tuple):
        return tuple(_lerp(a, b, u) for a, b in zip(x, y))
    xa = np.asarray(x, float)
    ya = np.asarray(y, float)
    if xa.ndim == 0:
        return float(xa) + u * (float(ya) - float(xa))
    return xa[None, :] + u[:, None] * (ya - xa)[None, :]


def _stack_points(points: list):
    first = points[0]
    if isinstance(first, tuple):
        return tuple(_stack_points([p[i] for p in points]) for i in range(len(first)))
    return np.asarray(points, float)


def _indexed_lerp(stacked, seg: np.ndarray, u: np.ndarray):
    if isinstance(stacked, tuple):
        return tuple(_indexed_lerp(s, seg, u) for s in stacked)
    a = stacked[seg]
    b = stacked[seg + 1]
    if stacked.ndim == 1:
        return a + u * (b - a)
    return a + u[:, None] * (b - a)


def _first_point(batch):
    if isinstance(batch, tuple):
        return tuple(_first_point(b) for b in batch)
    arr = np.asarray(batch)
    return float(arr[0]) if arr.ndim == 1 else np.array(arr[0])


@dataclass
class Curve:
    """Parameterized path on [0, 1] into some metric space.

    The evaluator is vectorized: it maps an array of parameters to a batch
    of points (tuple-of-batches for product spaces).
    """

    kind: str
    evaluator: Callable[[np.ndarray], Any]
    start: Any = None
    end: Any = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.start is None:
            self.start = self.at(0.0)
        if self.end is None:
            self.end = self.at(1.0)

    def at_many(self, ts) -> Any:
        return self.evaluator(np.asarray(ts, float))

    def at(self, t: float):
        return _first_point(self.at_many(np.array([float(t)])))

    def subcurve(self, s: float, t: float) -> "Curve":
        return Curve(self.kind, lambda u, s=s, t=t: self.evaluator(s + u * (t - s)))


def segment(x, y) -> Curve:
    """Affine segment between two coordinate (or tuple) points."""
    return Curve("polyline", lambda ts: _lerp(x, y, ts), start=x, end=y,
                 meta={"breakpoints": [x, y]})


def polyline(space, points, constant_speed: bool = True) -> Curve:
    """Piecewise-affine path through the given breakpoints.

    With ``constant_speed`` the parameter is proportional to arclength in
    the given space, so the result is parameterized by (scaled) arclength.
    """
    if not space.supports_interpolation:
        raise ValueError(f"{space.name} does not support interpolated curves")
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("polyline needs at least two breakpoints")
    if constant_speed:
        seglens = np.array([space.distance(a, b) for a, b in zip(pts[:-1], pts[1:])])
        keep = seglens > 0
        if not keep.any():
            p0 = pts[0]
            return Curve("polyline", lambda ts: _lerp(p0, p0, ts), start=p0, end=p0,
                         meta={"breakpoints": [p0, pts[-1]], "length": 0.0})
        pruned = [pts[0]] + [b for b, k in zip(pts[1:], keep) if k]
        seglens = seglens[keep]
        knots = np.concatenate([[0.0], np.cumsum(seglens)]) / seglens.sum()
        pts = pruned
        total = float(seglens.sum())
    else:
        knots = np.linspace(0.0, 1.0, len(pts))
        total = None
    stacked = _stack_points(pts)

    def evaluator(ts, knots=knots, stacked=stacked, nseg=len(pts) - 1):
        ts = np.clip(np.asarray(ts, float), 0.0, 1.0)
        seg = np.clip(np.searchsorted(knots, ts, side="right") - 1, 0, nseg - 1)
        u = (ts - knots[seg]) / (knots[seg + 1] - knots[seg])
        return _indexed_lerp(stacked, seg, u)

    return Curve("polyline", evaluator, start=pts[0], end=pts[-1],
                 meta={"breakpoints": pts, "knots": knots, "length": total})


def circle_arc(center, radius: float, angle_start: float, angle_end: float) -> Curve:
    """Constant-speed circular arc in a 2-d coordinate space."""
    cx, cy = float(center[0]), float(center[1])

    def evaluator(ts):
        theta = angle_start + np.asarray(ts, float) * (angle_end - angle_start)
        return np.column_stack([cx + radius * np.cos(theta), cy + radius * np.sin(theta)])

    return Curve("analytic", evaluator)


def product_curve(components: list[Curve]) -> Curve:
    """Synchronized tuple of component curves over the shared parameter."""
    comps = list(components)
    return Curve("product", lambda ts: tuple(c.at_many(ts) for c in comps),
                 start=tuple(c.start for c in comps), end=tuple(c.end for c in comps),
                 meta={"components": comps})


def warped(curve: Curve, warp: Callable[[np.ndarray], np.ndarray]) -> Curve:
    """Reparameterize a curve by a (vectorized) warp of [0, 1]."""
    return Curve("analytic", lambda ts: curve.at_many(warp(np.asarray(ts, float))))


@dataclass
class LengthResult:
    """Length estimate at the finest dyadic level plus the refinement trace.

    ``trace[d]`` is the chord sum over 2^d uniform segments.  ``diverged``
    flags traces that blow past DIVERGENCE_FACTOR times the chord scale,
    which signals a non-rectifiable path rather than an error.
    """

    length: float
    trace: list[float]
    diverged: bool
    chord: float

    @property
    def depth(self) -> int:
        return len(self.trace) - 1


def curve_length(space, curve: Curve, depth: int = 12,
                 divergence_factor: float = DIVERGENCE_FACTOR) -> LengthResult:
    """Dyadic subdivision length of a curve in the given space."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = 2**depth
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = curve.at_many(ts)
    trace = []
    for d in range(depth + 1):
        step = 2 ** (depth - d)
        idx = np.arange(0, n + 1, step)
        a = space.take(pts, idx[:-1])
        b = space.take(pts, idx[1:])
        trace.append(float(space.distance_batch(a, b).sum()))
    chord = trace[0]
    # the chord scale degenerates for closed curves; fall back to the
    # two-segment sum so closed rectifiable curves are not flagged
    scale = max(chord, 0.5 * trace[1]) if depth >= 1 else chord
    diverged = scale > 0 and trace[-1] > divergence_factor * scale
    return LengthResult(trace[-1], trace, diverged, chord)


def _restriction_lengths(space, curve: Curve, cuts: np.ndarray, depth: int) -> np.ndarray:
    return np.array([
        curve_length(space, curve.subcurve(s, t), depth).length
        for s, t in zip(cuts[:-1], cuts[1:])
    ])


def _constant_speed_violation(space, curve: Curve, pieces: int = 16, depth: int = 7):
    """Worst deviation of piecewise lengths from uniform, with its allowance."""
    cuts = np.linspace(0.0, 1.0, pieces + 1)
    lens = _restriction_lengths(space, curve, cuts, depth)
    total = float(lens.sum())
    if total == 0:
        return 0.0, LEN_FLOOR, total
    dev = float(np.abs(lens - total / pieces).max())
    allowance = max(LEN_FLOOR, 4.0 * total / (pieces * 2**depth))
    return dev, allowance, total


def product_curve_length_check(prod, components: list[Curve], depth: int = 12) -> ValidationReport:
    """Product curve length must equal the gluing of the factor lengths.

    Components must be (scaled-)arclength parameterized in their factors;
    that precondition is verified first and a violation yields an
    undetermined verdict, not a failure.
    """
    if len(components) != len(prod.factors):
        raise ValueError("one component curve per factor required")
    for i, (factor, comp) in enumerate(zip(prod.factors, components)):
        dev, allowance, _total = _constant_speed_violation(factor, comp)
        if dev > allowance:
            return ValidationReport(
                "product-length", UNDETERMINED, 0, dev,
                {"component": i, "deviation": dev},
                {"reason": "component not constant-speed", "allowance": allowance})
    lengths = np.array([
        curve_length(factor, comp, depth).length
        for factor, comp in zip(prod.factors, components)
    ])
    expected = float(prod.phi(lengths))
    measured = curve_length(prod, product_curve(components), depth)
    margin = abs(measured.length - expected)
    tol = tau_len(depth, measured.trace[0])
    return ValidationReport(
        "product-length", PASS if margin <= tol else FAIL,
        2**depth, margin,
        {"factor_lengths": lengths, "expected": expected, "measured": measured.length},
        {"depth": depth, "tolerance": tol})


def arclength_check(space, curve: Curve, grid: int = 8, depth: int = 8) -> ValidationReport:
    """Restriction lengths must scale linearly in the parameter interval."""
    total = curve_length(space, curve, depth)
    if total.diverged:
        return ValidationReport("arclength-parameterization", UNDETERMINED, 0, 0.0,
                                None, {"reason": "curve appears non-rectifiable"})
    cuts = np.linspace(0.0, 1.0, grid + 1)
    worst = -math.inf
    witness = None
    checked = 0
    for i, s in enumerate(cuts[:-1]):
        for t in cuts[i + 1:]:
            sub = curve.subcurve(float(s), float(t))
            measured = curve_length(space, sub, depth)
            expected = total.length * (t - s)
            tol = tau_len(depth, max(measured.trace[0], expected))
            margin = abs(measured.length - expected) - tol
            checked += 1
            if margin > worst:
                worst = margin
                witness = {"interval": [float(s), float(t)],
                           "measured": measured.length, "expected": expected}
    return ValidationReport(
        "arclength-parameterization", FAIL if worst > 0 else PASS, checked,
        worst, witness, {"total_length": total.length, "depth": depth})


def non_length_space_demo(depth: int = 8, endpoints=((0.0, 0.0), (1.0, 0.0)),
                          paths: int = 5, seed: int = 0) -> ValidationReport:
    """Two-valued gluing of two lines: path length diverges, so the product
    is not a length space.

    Every dyadic step that moves in the first coordinate has product
    distance at least 1, so each subdivision sum at depth d is at least
    2^d.  The bound is exact integer arithmetic, no tolerance involved.
    """
    from .product import ProductSpace
    from .gluing import GluingFunction
    from .spaces import RealLine

    prod = ProductSpace((RealLine(), RealLine()), GluingFunction.two_valued(2))
    (ax, ay), (bx, by) = endpoints
    a = (float(ax), float(ay))
    b = (float(bx), float(by))
    if a == b:
        return ValidationReport("non-length-space-demo", PASS, 0, 0.0,
                                {"endpoints": [a, b]},
                                {"mode": "identical-endpoints", "length": 0.0})
    if abs(a[0] - b[0]) <= TAU_METRIC:
        return ValidationReport("non-length-space-demo", UNDETERMINED, 0, 0.0,
                                {"endpoints": [a, b]},
                                {"reason": "first coordinates not distinct beyond tolerance"})

    rng = rng_stream(seed, 31)
    family = [segment(a, b)]
    lo, hi = (a[0], b[0]) if a[0] < b[0] else (b[0], a[0])
    for _ in range(max(0, paths - 1)):
        k = int(rng.integers(1, 4))
        xs = np.sort(rng.uniform(lo, hi, k))
        ys = rng.uniform(min(a[1], b[1]) - 1.0, max(a[1], b[1]) + 1.0, k)
        mids = list(zip(xs, ys)) if a[0] < b[0] else list(zip(xs[::-1], ys))
        pts = [a] + [(float(x), float(y)) for x, y in mids] + [b]
        family.append(polyline(prod, pts, constant_speed=False))

    worst = -math.inf
    witness = None
    for pi, path in enumerate(family):
        res = curve_length(prod, path, depth)
        for d in range(1, depth + 1):
            slack = 2**d - res.trace[d]
            if slack > worst:
                worst = slack
                witness = {"path": pi, "depth": d, "subdivision_sum": res.trace[d],
                           "lower_bound": 2**d}
    verdict = PASS if worst <= 0 else FAIL
    return ValidationReport("non-length-space-demo", verdict, len(family) * depth,
                            worst, witness,
                            {"mode": "divergence", "max_depth": depth,
                             "paths": len(family)})
