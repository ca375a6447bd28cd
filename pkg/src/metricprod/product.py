"""Glued products of metric spaces.

A product space carries a tuple of factor spaces and a gluing function of
matching dimension; the product distance is the gluing function applied
to the vector of factor distances.  Structural flags are inherited from
the factors only when the gluing function's classification licenses the
preservation, otherwise they stay unknown.
"""

from __future__ import annotations

import numpy as np

from .gluing import GluingClass, GluingFunction, SymmetrizedNorm
from .reports import FAIL, PASS, TAU_METRIC, ValidationReport, metric_tol
from .sampling import SampleConfig
from .spaces import DeclaredProperties, MetricSpace


class ProductSpace(MetricSpace):
    """Product of factor spaces glued by a quadrant function.

    Points are tuples of factor points; batches are tuples of factor
    batches.  Nested products are allowed (a product may itself be a
    factor).
    """

    name = "product"

    def __init__(self, factors, phi: GluingFunction):
        factors = tuple(factors)
        if len(factors) < 1:
            raise ValueError("need at least one factor")
        if len(factors) != phi.dim:
            raise ValueError(
                f"gluing dimension {phi.dim} does not match {len(factors)} factors"
            )
        self.factors = factors
        self.phi = phi
        self._props_cache: DeclaredProperties | None = None

    # -- metric --------------------------------------------------------------

    def factor_distances(self, x, y) -> np.ndarray:
        x, y = self._check(x), self._check(y)
        return np.array([f.distance(xi, yi) for f, xi, yi in zip(self.factors, x, y)])

    def factor_distance_batch(self, xs, ys) -> np.ndarray:
        cols = [f.distance_batch(xi, yi) for f, xi, yi in zip(self.factors, xs, ys)]
        return np.column_stack(cols)

    def distance(self, x, y) -> float:
        return float(self.phi(self.factor_distances(x, y)))

    def distance_batch(self, xs, ys) -> np.ndarray:
        return np.asarray(self.phi(self.factor_distance_batch(xs, ys)), float)

    def _check(self, x) -> tuple:
        if not isinstance(x, tuple) or len(x) != len(self.factors):
            raise ValueError(
                f"product points are {len(self.factors)}-tuples of factor points"
            )
        return x

    # -- classification-driven structure --------------------------------------

    def classification(self, cfg: SampleConfig | None = None):
        return self.phi.classification(cfg)

    @property
    def supports_interpolation(self) -> bool:
        return all(f.supports_interpolation for f in self.factors)

    @property
    def properties(self) -> DeclaredProperties:
        if self._props_cache is None:
            cls = self.classification().gluing_class
            norm = cls.at_least(GluingClass.NORM_INDUCED)
            strict = cls.at_least(GluingClass.STRICTLY_CONVEX_NORM)

            def licensed(flag, attr):
                vals = [getattr(f.properties, attr) for f in self.factors]
                if flag and all(v is True for v in vals):
                    return True
                return None

            self._props_cache = DeclaredProperties(
                is_length_space=licensed(norm, "is_length_space"),
                is_geodesic=licensed(norm, "is_geodesic"),
                is_uniquely_geodesic=licensed(strict, "is_uniquely_geodesic"),
                is_convex=licensed(strict, "is_convex"),
                known_minkowski_rank=None,
            )
        return self._props_cache

    # -- batch plumbing --------------------------------------------------------

    def sample_batch(self, count, seed=0, radius=1.0):
        base = list(seed) if isinstance(seed, (list, tuple)) else [seed]
        return tuple(
            f.sample_batch(count, base + [i], radius) for i, f in enumerate(self.factors)
        )

    def stack(self, points):
        return tuple(
            f.stack([p[i] for p in points]) for i, f in enumerate(self.factors)
        )

    def unstack(self, batch) -> list:
        parts = [f.unstack(b) for f, b in zip(self.factors, batch)]
        return [tuple(p[i] for p in parts) for i in range(len(parts[0]))]

    def take(self, batch, idx):
        return tuple(f.take(b, idx) for f, b in zip(self.factors, batch))

    # -- (de)serialization -------------------------------------------------------

    def descriptor(self):
        return {
            "type": "product",
            "factors": [f.descriptor() for f in self.factors],
            "phi": self.phi.descriptor(),
        }

    def point_from_json(self, obj):
        if len(obj) != len(self.factors):
            raise ValueError("point arity does not match factor count")
        return tuple(f.point_from_json(o) for f, o in zip(self.factors, obj))

    def point_to_json(self, point):
        return [f.point_to_json(p) for f, p in zip(self.factors, self._check(point))]

    def symmetrized_norm(self) -> SymmetrizedNorm:
        return self.phi.symmetrized()


def verify_metric_axioms(prod: ProductSpace, count: int = 10_000, seed: int = 0,
                         radius: float = 10.0, tau: float = TAU_METRIC) -> list[ValidationReport]:
    """Sampled metric axioms for a glued product.

    Returns three reports: identity of indiscernibles, symmetry, and the
    triangle inequality over ``count`` sampled point triples.  Margins are
    reported raw so tightness can be inspected.
    """
    xs = prod.sample_batch(count, [seed, 1], radius)
    ys = prod.sample_batch(count, [seed, 2], radius)
    zs = prod.sample_batch(count, [seed, 3], radius)
    reports = []

    # identity of indiscernibles
    self_d = prod.distance_batch(xs, xs)
    fd = prod.factor_distance_batch(xs, ys)
    dxy = np.asarray(prod.phi(fd), float)
    distinct = fd.max(axis=1) > 0
    worst_self = float(self_d.max())
    min_distinct = float(dxy[distinct].min()) if distinct.any() else np.inf
    bad = worst_self > tau or min_distinct <= tau
    i = int(np.argmax(self_d))
    witness = {"point": _point_at(prod, xs, i), "self_distance": worst_self}
    if min_distinct <= tau:
        j = int(np.argmin(np.where(distinct, dxy, np.inf)))
        witness = {
            "x": _point_at(prod, xs, j),
            "y": _point_at(prod, ys, j),
            "distance": float(dxy[j]),
        }
    reports.append(ValidationReport(
        "identity-of-indiscernibles", FAIL if bad else PASS, count,
        max(worst_self, tau - min_distinct), witness,
        {"min_distinct_distance": min_distinct}))

    # symmetry
    dyx = prod.distance_batch(ys, xs)
    diffs = np.abs(dxy - dyx)
    i = int(np.argmax(diffs))
    tol = metric_tol(float(dxy.max(initial=0.0)), tau=tau)
    reports.append(ValidationReport(
        "symmetry", FAIL if diffs[i] > tol else PASS, count, float(diffs[i]),
        {"x": _point_at(prod, xs, i), "y": _point_at(prod, ys, i)}, {}))

    # triangle inequality
    dyz = prod.distance_batch(ys, zs)
    dxz = prod.distance_batch(xs, zs)
    margins = dxz - dxy - dyz
    i = int(np.argmax(margins))
    tol = metric_tol(float(dxz.max(initial=0.0)), tau=tau)
    reports.append(ValidationReport(
        "triangle-inequality", FAIL if margins[i] > tol else PASS, count,
        float(margins[i]),
        {"x": _point_at(prod, xs, i), "y": _point_at(prod, ys, i),
         "z": _point_at(prod, zs, i),
         "distances": [float(dxz[i]), float(dxy[i]), float(dyz[i])]},
        {"tolerance": tol}))
    return reports


def _point_at(prod: ProductSpace, batch, i: int):
    return prod.unstack(prod.take(batch, np.array([i])))[0]
