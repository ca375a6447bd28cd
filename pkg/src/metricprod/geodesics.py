"""Geodesics in factors and glued products, and the comparison checks.

A geodesic here is always unit speed on [0, D]: distances along it equal
parameter gaps.  Product geodesics synchronize factor geodesics, each
slowed to its share of the total speed; for a norm-class gluing the
result is again a geodesic.  Non-uniqueness witnesses in the sum/max
planes come from explicit selector families (corner routes, bounded
wander) rather than generic numeric search, so they are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .curves import Curve
from .gluing import GluingClass
from .product import ProductSpace
from .reports import FAIL, PASS, TAU_METRIC, ValidationReport, metric_tol
from .sampling import rng_stream
from .spaces import HalfLine, LpSpace, MetricSpace, RealLine

INF = math.inf


@dataclass
class Geodesic:
    """Unit-speed path realizing the distance between its endpoints."""

    space: MetricSpace
    start: Any
    end: Any
    length: float
    evaluator: Callable[[np.ndarray], Any]
    descriptor: str = "affine"
    components: list | None = None

    def at_many(self, ts) -> Any:
        return self.evaluator(np.asarray(ts, float))

    def at(self, t: float):
        from .curves import _first_point
        return _first_point(self.at_many(np.array([float(t)])))

    def as_curve(self) -> Curve:
        d = self.length
        return Curve("analytic", lambda u: self.evaluator(np.asarray(u, float) * d),
                     start=self.start, end=self.end)


def _constant(space, x) -> Geodesic:
    from .curves import _lerp
    return Geodesic(space, x, x, 0.0, lambda ts: _lerp(x, x, np.asarray(ts, float)),
                    descriptor="constant")


def _parse_selector(selector):
    if selector is None or selector == "affine":
        return ("affine", None)
    if isinstance(selector, (tuple, list)) and len(selector) == 2 and selector[0] == "corner":
        return ("corner", int(selector[1]))
    if isinstance(selector, str) and selector.startswith("corner"):
        inner = selector[len("corner"):].strip("()")
        return ("corner", int(inner))
    raise ValueError(f"unknown geodesic selector {selector!r}")


def factor_geodesic(space: MetricSpace, x, y, selector="affine") -> Geodesic:
    """Closed-form constant-speed geodesic in a catalog factor space.

    The affine segment is the default everywhere it is a geodesic.  The
    corner selector picks alternative representatives where geodesics are
    not unique: an axis-first route for the p=1 norm, a bounded wander of
    one coordinate for the sup norm.
    """
    kind, idx = _parse_selector(selector)
    if isinstance(space, (RealLine, HalfLine)):
        if kind != "affine":
            raise ValueError("one-dimensional factors have only the affine geodesic")
        x, y = float(x), float(y)
        d = space.distance(x, y)
        if d == 0:
            return _constant(space, x)
        return Geodesic(space, x, y, d,
                        lambda ts: x + (np.asarray(ts, float) / d) * (y - x))
    if isinstance(space, LpSpace):
        return _lp_geodesic(space, x, y, kind, idx)
    raise ValueError(f"{space.name} is not a geodesic space in the catalog")


def _lp_geodesic(space: LpSpace, x, y, kind: str, idx) -> Geodesic:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    d = space.distance(x, y)
    if d == 0:
        return _constant(space, x.copy())

    def affine(ts):
        ts = np.asarray(ts, float)
        return x[None, :] + (ts / d)[:, None] * (y - x)[None, :]

    if kind == "affine":
        return Geodesic(space, x, y, d, affine)
    if not 0 <= idx < space.dim:
        raise ValueError("corner coordinate out of range")
    if space.p == 1.0:
        corner = x.copy()
        corner[idx] = y[idx]
        s1 = float(space.weights[idx] * abs(y[idx] - x[idx]))
        if s1 <= 0 or s1 >= d:
            return Geodesic(space, x, y, d, affine, descriptor="affine")

        def corner_eval(ts, s1=s1):
            ts = np.asarray(ts, float)
            u1 = np.clip(ts / s1, 0.0, 1.0)
            u2 = np.clip((ts - s1) / (d - s1), 0.0, 1.0)
            first = x[None, :] + u1[:, None] * (corner - x)[None, :]
            second = corner[None, :] + u2[:, None] * (y - corner)[None, :]
            return np.where((ts <= s1)[:, None], first, second)

        return Geodesic(space, x, y, d, corner_eval, descriptor=f"corner({idx})")
    if space.p == INF:
        # wander the chosen coordinate within its unused speed budget
        budget = 1.0 / space.weights[idx] - abs(y[idx] - x[idx]) / d
        if budget <= TAU_METRIC:
            return Geodesic(space, x, y, d, affine, descriptor="affine")
        beta = 0.5 * budget

        def wander_eval(ts, beta=beta):
            ts = np.asarray(ts, float)
            pts = x[None, :] + (ts / d)[:, None] * (y - x)[None, :]
            pts[:, idx] += beta * np.minimum(ts, d - ts)
            return pts

        return Geodesic(space, x, y, d, wander_eval, descriptor=f"wander({idx})")
    raise ValueError(f"p={space.p:g} factors are uniquely geodesic; corner selector invalid")


def _select_structure(mask: np.ndarray, a, b):
    if isinstance(a, tuple):
        return tuple(_select_structure(mask, ai, bi) for ai, bi in zip(a, b))
    a = np.asarray(a, float)
    m = mask if a.ndim == 1 else mask[:, None]
    return np.where(m, a, b)


def product_geodesic(prod: ProductSpace, x, y, selectors=None, via=None, cfg=None) -> Geodesic:
    """Geodesic in a glued product of geodesic factors.

    Requires the gluing to classify at least norm-induced; otherwise there
    is no geodesic guarantee and construction is refused.  With ``via``
    the route is the two-segment concatenation through the given point,
    valid only if that point splits the endpoint distance additively.
    """
    cls = prod.classification(cfg).gluing_class
    if not cls.at_least(GluingClass.NORM_INDUCED):
        raise ValueError(
            f"gluing classifies as {cls.value}; geodesic construction needs norm-induced")
    for f in prod.factors:
        if f.properties.is_geodesic is not True:
            raise ValueError(f"factor {f.name} is not geodesic")
    d = prod.distance(x, y)
    if d == 0:
        return _constant(prod, x)

    if via is not None:
        d1 = prod.distance(x, via)
        d2 = prod.distance(via, y)
        if abs(d1 + d2 - d) > metric_tol(d):
            raise ValueError("via point does not split the distance additively")
        g1 = product_geodesic(prod, x, via, selectors, cfg=cfg)
        g2 = product_geodesic(prod, via, y, selectors, cfg=cfg)

        def via_eval(ts, d1=d1):
            ts = np.asarray(ts, float)
            first = g1.at_many(np.clip(ts, 0.0, max(d1, 0.0)))
            second = g2.at_many(np.clip(ts - d1, 0.0, g2.length))
            return _select_structure(ts <= d1, first, second)

        return Geodesic(prod, x, y, d, via_eval,
                        descriptor=f"via({prod.point_to_json(via)})")

    if selectors is None:
        selectors = ["affine"] * len(prod.factors)
    comps = [factor_geodesic(f, xi, yi, sel)
             for f, xi, yi, sel in zip(prod.factors, x, y, selectors)]

    def sync_eval(ts):
        ts = np.asarray(ts, float)
        return tuple(c.at_many(ts * (c.length / d)) for c in comps)

    desc = ",".join(c.descriptor for c in comps)
    return Geodesic(prod, x, y, d, sync_eval, descriptor=f"sync[{desc}]",
                    components=comps)


def geodesic_between(space: MetricSpace, x, y, selector="affine", cfg=None) -> Geodesic:
    if isinstance(space, ProductSpace):
        sel = selector if isinstance(selector, list) else None
        return product_geodesic(space, x, y, selectors=sel, cfg=cfg)
    return factor_geodesic(space, x, y, selector)


def midpoint(space: MetricSpace, x, y, cfg=None):
    g = geodesic_between(space, x, y, cfg=cfg)
    return g.at(g.length / 2.0)


def geodesy_test(space: MetricSpace, geo: Geodesic, grid: int = 64,
                 tau: float | None = None) -> ValidationReport:
    """Definitional check: distances along the path equal parameter gaps."""
    d = geo.length
    ts = np.linspace(0.0, d, grid)
    pts = geo.at_many(ts)
    ii, jj = np.triu_indices(grid, k=1)
    dist = space.distance_batch(space.take(pts, ii), space.take(pts, jj))
    gaps = np.abs(ts[ii] - ts[jj])
    diffs = np.abs(dist - gaps)
    k = int(np.argmax(diffs)) if len(diffs) else 0
    tol = tau if tau is not None else TAU_METRIC * max(1.0, d)
    margin = float(diffs[k]) if len(diffs) else 0.0
    witness = None
    if len(diffs):
        witness = {"s": float(ts[ii[k]]), "t": float(ts[jj[k]]),
                   "distance": float(dist[k]), "gap": float(gaps[k])}
    return ValidationReport("geodesy", FAIL if margin > tol else PASS,
                            len(diffs), margin, witness,
                            {"length": d, "tolerance": tol,
                             "descriptor": geo.descriptor})


def component_progress_check(prod: ProductSpace, geo: Geodesic, grid: int = 64,
                             tau: float | None = None) -> ValidationReport:
    """Factor distances along a product geodesic grow proportionally: the
    i-th component at parameter t sits at fraction t/D of its factor
    distance."""
    d = geo.length
    ts = np.linspace(0.0, d, grid)
    pts = geo.at_many(ts)
    fracs = ts / d if d > 0 else np.zeros_like(ts)
    worst = -math.inf
    witness = None
    for i, f in enumerate(prod.factors):
        xi = geo.start[i]
        di = f.distance(geo.start[i], geo.end[i])
        prog = f.distance_batch(f.stack([xi] * grid), pts[i])
        diffs = np.abs(prog - fracs * di)
        k = int(np.argmax(diffs))
        if diffs[k] > worst:
            worst = float(diffs[k])
            witness = {"factor": i, "t": float(ts[k]),
                       "progress": float(prog[k]), "expected": float(fracs[k] * di)}
    tol = tau if tau is not None else TAU_METRIC * max(1.0, d)
    return ValidationReport("component-progress", FAIL if worst > tol else PASS,
                            grid * len(prod.factors), worst, witness,
                            {"length": d, "tolerance": tol})


def _coordinate_directions(prod: ProductSpace):
    """Structured product-space offsets: single coordinates and signed
    cross-factor pairs (the flat directions of the p=1 ball live here)."""
    dims = []
    for f in prod.factors:
        if isinstance(f, (RealLine, HalfLine)):
            dims.append(1)
        elif isinstance(f, LpSpace):
            dims.append(f.dim)
        else:
            return []
    coords = [(fi, ci) for fi, dim in enumerate(dims) for ci in range(dim)]
    dirs = []
    for fi, ci in coords:
        for s in (1.0, -1.0):
            vec = [np.zeros(dim) for dim in dims]
            vec[fi][ci] = s
            dirs.append(vec)
    for a in range(len(coords)):
        for b in range(a + 1, len(coords)):
            for s in (1.0, -1.0):
                vec = [np.zeros(dim) for dim in dims]
                vec[coords[a][0]][coords[a][1]] = 1.0
                vec[coords[b][0]][coords[b][1]] = s
                dirs.append(vec)
    return dirs


def _offset_point(prod: ProductSpace, point, offsets, scale: float):
    out = []
    for f, p, off in zip(prod.factors, point, offsets):
        if isinstance(f, (RealLine, HalfLine)):
            q = float(p) + scale * float(off[0])
            if isinstance(f, HalfLine):
                q = max(q, 0.0)
            out.append(q)
        else:
            out.append(np.asarray(p, float) + scale * np.asarray(off, float))
    return tuple(out)


def uniqueness_probe(prod: ProductSpace, x, y, selector_sets=None, grid: int = 64,
                     perturbations: int = 64, seed: int = 0,
                     distinct_threshold: float | None = None, cfg=None) -> ValidationReport:
    """Search for distinct geodesics between two product points.

    Candidates come from three sources: explicit selector sets, corner
    routes through per-factor via points, and a midpoint perturbation
    search (alternative midpoints at distance D/2 from both endpoints
    induce two-segment geodesics).  The verdict is pass when every
    candidate coincides with the default geodesic on the grid.
    """
    d = prod.distance(x, y)
    tol = metric_tol(d)
    threshold = distinct_threshold if distinct_threshold is not None else 1e-6 * max(1.0, d)
    base = product_geodesic(prod, x, y, cfg=cfg)
    if d <= tol:
        return ValidationReport("unique-geodesic", PASS, 1, 0.0, None,
                                {"reason": "degenerate endpoints"})
    candidates = [base]

    for sel in selector_sets or []:
        if isinstance(sel, dict):
            candidates.append(product_geodesic(
                prod, x, y, selectors=sel.get("factor_selectors"),
                via=sel.get("via"), cfg=cfg))
        else:
            candidates.append(product_geodesic(prod, x, y, selectors=sel, cfg=cfg))

    # corner routes: finish one subset of the factors first
    n = len(prod.factors)
    for mask in range(1, 2**n - 1):
        via = tuple(y[i] if mask >> i & 1 else x[i] for i in range(n))
        d1 = prod.distance(x, via)
        d2 = prod.distance(via, y)
        if tol < d1 and tol < d2 and abs(d1 + d2 - d) <= tol:
            candidates.append(product_geodesic(prod, x, y, via=via, cfg=cfg))

    # midpoint perturbation search
    mid = base.at(d / 2.0)
    directions = _coordinate_directions(prod)
    rng = rng_stream(seed, 41)
    accepted = 0
    if directions:
        ndim_total = sum(len(np.atleast_1d(v)) for v in directions[0])
        while len(directions) < perturbations:
            raw = rng.normal(size=ndim_total)
            vec, k = [], 0
            for f in prod.factors:
                w = 1 if isinstance(f, (RealLine, HalfLine)) else f.dim
                vec.append(raw[k:k + w])
                k += w
            directions.append(vec)
        for vec in directions[:perturbations]:
            probe = _offset_point(prod, mid, vec, 1.0)
            width = prod.distance(mid, probe)
            if width <= tol:
                continue
            for delta in (d / 4.0, d / 32.0):
                cand = _offset_point(prod, mid, vec, delta / width)
                if prod.distance(mid, cand) <= tol:
                    continue
                # half the via tolerance so the two half-distances cannot
                # jointly overshoot the concatenation check
                if abs(prod.distance(x, cand) - d / 2.0) <= 0.5 * tol and \
                   abs(prod.distance(cand, y) - d / 2.0) <= 0.5 * tol:
                    candidates.append(product_geodesic(prod, x, y, via=cand, cfg=cfg))
                    accepted += 1
                    break

    ts = np.linspace(0.0, d, grid)
    base_pts = base.at_many(ts)
    worst = 0.0
    witness = None
    for cand in candidates[1:]:
        sup = float(prod.distance_batch(base_pts, cand.at_many(ts)).max())
        if sup > worst:
            worst = sup
            witness = {"geodesics": [base.descriptor, cand.descriptor],
                       "sup_distance": sup}
    verdict = FAIL if worst > threshold else PASS
    return ValidationReport("unique-geodesic", verdict, len(candidates), worst,
                            witness,
                            {"distinct_threshold": threshold,
                             "candidates": len(candidates),
                             "perturbation_hits": accepted,
                             "length": d})


def busemann_convexity_check(space: MetricSpace, g1: Geodesic, g2: Geodesic,
                             grid: int = 32, tau: float | None = None) -> ValidationReport:
    """Joint midpoint convexity of the distance between two geodesics.

    Both geodesics are renormalized to [0, 1]; the distance is evaluated
    on the refined uniform grid so that every midpoint of grid parameters
    is again a grid parameter.  The check is global on the given
    geodesics; it does not probe smaller scales.
    """
    fine = 2 * grid - 1
    u = np.linspace(0.0, 1.0, fine)
    p1 = g1.at_many(u * g1.length)
    p2 = g2.at_many(u * g2.length)
    ii, jj = np.meshgrid(np.arange(fine), np.arange(fine), indexing="ij")
    dmat = space.distance_batch(
        space.take(p1, ii.ravel()), space.take(p2, jj.ravel())
    ).reshape(fine, fine)
    idx = np.arange(grid)
    s = np.add.outer(idx, idx)                       # parameter index sums
    even = dmat[::2, ::2]                            # values at grid points
    lhs = dmat[s[:, None, :, None], s[None, :, None, :]]
    rhs = 0.5 * (even[:, :, None, None] + even[None, None, :, :])
    margins = lhs - rhs
    k = np.unravel_index(int(np.argmax(margins)), margins.shape)
    worst = float(margins[k])
    tol = tau if tau is not None else metric_tol(float(dmat.max(initial=0.0)))
    step = 1.0 / (grid - 1) if grid > 1 else 1.0
    witness = {"s": k[0] * step, "t": k[1] * step,
               "s2": k[2] * step, "t2": k[3] * step}
    return ValidationReport("busemann-convexity", FAIL if worst > tol else PASS,
                            grid**4, worst, witness,
                            {"tolerance": tol, "scope": "global on the given geodesics"})


def cat0_four_point_check(space: MetricSpace, count: int = 1000, seed: int = 0,
                          radius: float = 5.0, triangles=None,
                          tau: float | None = None, cfg=None) -> ValidationReport:
    """Euclidean comparison of geodesic midpoints (the flat case).

    For each triangle (p, q, r): the distance from p to the geodesic
    midpoint of q and r must not exceed the corresponding median of the
    Euclidean triangle with the same side lengths.  Curvature comparison
    for nonzero bounds is out of scope.
    """
    if triangles is None:
        ps = space.sample_points(count, [seed, 7], radius)
        qs = space.sample_points(count, [seed, 8], radius)
        rs = space.sample_points(count, [seed, 9], radius)
        triangles = list(zip(ps, qs, rs))
    worst = -math.inf
    witness = None
    skipped = 0
    scale = 1.0
    for p, q, r in triangles:
        a = space.distance(p, q)
        b = space.distance(p, r)
        c = space.distance(q, r)
        scale = max(scale, a, b, c)
        if c > a + b + metric_tol(a, b, c) or a > b + c + metric_tol(a, b, c) \
                or b > a + c + metric_tol(a, b, c):
            skipped += 1
            continue
        m = midpoint(space, q, r, cfg=cfg)
        comparison = math.sqrt(max(0.0, (2 * a * a + 2 * b * b - c * c) / 4.0))
        margin = space.distance(p, m) - comparison
        if margin > worst:
            worst = float(margin)
            witness = {"p": space.point_to_json(p), "q": space.point_to_json(q),
                       "r": space.point_to_json(r),
                       "midpoint": space.point_to_json(m),
                       "sides": [a, b, c], "comparison": comparison}
    tol = tau if tau is not None else metric_tol(scale)
    checked = len(triangles) - skipped
    return ValidationReport("cat0-four-point", FAIL if worst > tol else PASS,
                            checked, worst if checked else 0.0, witness,
                            {"skipped_degenerate": skipped, "tolerance": tol})
