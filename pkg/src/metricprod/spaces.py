"""Catalog of factor metric spaces.

Points are plain floats for the one-dimensional spaces, numpy vectors for
coordinate spaces, and integer indices for discrete/finite spaces.  A batch
of points is a numpy array with a leading sample axis; product spaces use a
tuple of factor batches (see :mod:`metricprod.product`).

Spaces are immutable after construction and every operation is a pure
function of its arguments, so instances are safe to share between threads.

The catalog is deliberately restricted to spaces whose geodesics and ranks
are known in closed form; reports that depend on that restriction carry
``CATALOG_NOTE`` in their details.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reports import metric_tol
from .sampling import rng_stream

INFINITY = math.inf

CATALOG_NOTE = (
    "catalog restricted to spaces with closed-form geodesics and known rank"
)


@dataclass(frozen=True)
class DeclaredProperties:
    """Structural flags attached to a space; ``None`` means unknown.

    Consistency is enforced at construction: uniquely geodesic implies
    geodesic implies length space.
    """

    is_length_space: bool | None = None
    is_geodesic: bool | None = None
    is_uniquely_geodesic: bool | None = None
    is_convex: bool | None = None
    known_minkowski_rank: int | None = None

    def __post_init__(self):
        if self.is_uniquely_geodesic and not self.is_geodesic:
            raise ValueError("uniquely geodesic requires geodesic")
        if self.is_geodesic and not self.is_length_space:
            raise ValueError("geodesic requires length space")
        rank = self.known_minkowski_rank
        if rank is not None and rank < 0:
            raise ValueError("rank must be nonnegative")


class MetricSpace:
    """Abstract carrier plus distance; subclasses implement the catalog."""

    name: str = "abstract"
    #: True when points are coordinate vectors that can be interpolated.
    supports_interpolation: bool = False

    @property
    def properties(self) -> DeclaredProperties:
        return self._properties

    # -- core interface ----------------------------------------------------

    def distance(self, x, y) -> float:
        raise NotImplementedError

    def distance_batch(self, xs, ys) -> np.ndarray:
        """Distances between two batches of points, row by row."""
        raise NotImplementedError

    def sample_batch(self, count: int, seed=0, radius: float = 1.0):
        raise NotImplementedError

    def sample_points(self, count: int, seed=0, radius: float = 1.0) -> list:
        """Deterministic pseudo-random points within the given radius."""
        if count < 1:
            raise ValueError("count must be >= 1")
        if radius <= 0:
            raise ValueError("radius must be > 0")
        return self.unstack(self.sample_batch(count, seed, radius))

    # -- batch plumbing ----------------------------------------------------

    def stack(self, points: list):
        return np.asarray(points)

    def unstack(self, batch) -> list:
        raise NotImplementedError

    def take(self, batch, idx):
        return np.asarray(batch)[idx]

    # -- (de)serialization ---------------------------------------------------

    def descriptor(self) -> dict:
        raise NotImplementedError

    def point_from_json(self, obj):
        raise NotImplementedError

    def point_to_json(self, point):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


class _Line1D(MetricSpace):
    """Shared plumbing for the one-dimensional coordinate spaces."""

    supports_interpolation = True

    def distance(self, x, y) -> float:
        return abs(self._check(x) - self._check(y))

    def distance_batch(self, xs, ys) -> np.ndarray:
        return np.abs(np.asarray(xs, float) - np.asarray(ys, float))

    def unstack(self, batch) -> list:
        return [float(v) for v in np.asarray(batch, float)]

    def point_from_json(self, obj):
        return self._check(float(obj))

    def point_to_json(self, point):
        return float(point)

    def _check(self, x) -> float:
        return float(x)


class RealLine(_Line1D):
    """The real line with its standard metric."""

    name = "real-line"

    def __init__(self):
        self._properties = DeclaredProperties(
            is_length_space=True,
            is_geodesic=True,
            is_uniquely_geodesic=True,
            is_convex=True,
            known_minkowski_rank=1,
        )

    def sample_batch(self, count, seed=0, radius=1.0):
        return rng_stream(seed, 11).uniform(-radius, radius, count)

    def descriptor(self):
        return {"type": "real-line"}


class HalfLine(_Line1D):
    """The nonnegative half-line [0, oo) with the induced metric.

    Modeled as a first-class space rather than a constrained line: it is a
    rank-0 factor in its own right.
    """

    name = "half-line"

    def __init__(self):
        self._properties = DeclaredProperties(
            is_length_space=True,
            is_geodesic=True,
            is_uniquely_geodesic=True,
            is_convex=True,
            known_minkowski_rank=0,
        )

    def sample_batch(self, count, seed=0, radius=1.0):
        return np.clip(rng_stream(seed, 12).uniform(-radius, radius, count), 0.0, None)

    def descriptor(self):
        return {"type": "half-line"}

    def _check(self, x) -> float:
        x = float(x)
        if x < 0:
            raise ValueError(f"half-line point must be >= 0, got {x}")
        return x


class LpSpace(MetricSpace):
    """R^m with a weighted p-norm metric, 1 <= p <= oo.

    Distance is (sum_i w_i |x_i - y_i|^p)^(1/p); for p = oo (use
    ``math.inf``) it is max_i w_i |x_i - y_i|.  Weights must be positive.
    """

    name = "lp-space"
    supports_interpolation = True

    def __init__(self, dim: int, p: float = 2.0, weights=None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if p < 1:
            raise ValueError("exponent must satisfy p >= 1")
        self.dim = int(dim)
        self.p = float(p)
        w = np.ones(dim) if weights is None else np.asarray(weights, float)
        if w.shape != (dim,) or (w <= 0).any():
            raise ValueError("weights must be positive and match the dimension")
        self.weights = w
        strictly = 1.0 < self.p < INFINITY
        self._properties = DeclaredProperties(
            is_length_space=True,
            is_geodesic=True,
            is_uniquely_geodesic=strictly,
            is_convex=strictly,
            known_minkowski_rank=dim,
        )

    def _check(self, x) -> np.ndarray:
        arr = np.asarray(x, float)
        if arr.shape != (self.dim,):
            raise ValueError(
                f"point of dimension {arr.shape} does not match lp space of dimension {self.dim}"
            )
        return arr

    def distance(self, x, y) -> float:
        return float(self._norm(self._check(x) - self._check(y)))

    def distance_batch(self, xs, ys) -> np.ndarray:
        return self._norm(np.asarray(xs, float) - np.asarray(ys, float))

    def _norm(self, delta: np.ndarray) -> np.ndarray:
        a = np.abs(delta)
        if self.p == INFINITY:
            return (self.weights * a).max(axis=-1)
        return ((self.weights * a**self.p).sum(axis=-1)) ** (1.0 / self.p)

    def sample_batch(self, count, seed=0, radius=1.0):
        return rng_stream(seed, 13).uniform(-radius, radius, (count, self.dim))

    def unstack(self, batch) -> list:
        return [np.array(row) for row in np.asarray(batch, float)]

    def descriptor(self):
        return {
            "type": "lp",
            "dim": self.dim,
            "p": "inf" if self.p == INFINITY else self.p,
            "weights": [float(w) for w in self.weights],
        }

    def point_from_json(self, obj):
        return self._check(np.asarray(obj, float))

    def point_to_json(self, point):
        return [float(v) for v in np.asarray(point, float)]


class _IndexSpace(MetricSpace):
    """Shared plumbing for spaces whose points are integer indices."""

    def __init__(self, size: int):
        if size < 1:
            raise ValueError("need at least one point")
        self.size = int(size)

    def _check(self, i) -> int:
        idx = int(i)
        if idx != i or not 0 <= idx < self.size:
            raise ValueError(f"index {i} out of range for {self.size}-point space")
        return idx

    def sample_batch(self, count, seed=0, radius=1.0):
        return rng_stream(seed, 14).integers(0, self.size, count)

    def unstack(self, batch) -> list:
        return [int(v) for v in np.asarray(batch)]

    def point_from_json(self, obj):
        return self._check(obj)

    def point_to_json(self, point):
        return int(point)


class DiscreteSpace(_IndexSpace):
    """n points with the 0/1 discrete metric."""

    name = "discrete"

    def __init__(self, size: int):
        super().__init__(size)
        self._properties = DeclaredProperties(
            is_length_space=False,
            is_geodesic=False,
            is_uniquely_geodesic=False,
            is_convex=False,
            known_minkowski_rank=0,
        )

    def distance(self, x, y) -> float:
        return 0.0 if self._check(x) == self._check(y) else 1.0

    def distance_batch(self, xs, ys) -> np.ndarray:
        return (np.asarray(xs) != np.asarray(ys)).astype(float)

    def descriptor(self):
        return {"type": "discrete", "points": self.size}


class FiniteMetricSpace(_IndexSpace):
    """Finite metric space given by an explicit distance matrix.

    The matrix is validated exhaustively at construction: symmetry, zero
    diagonal, positive off-diagonal entries, and the full triangle
    inequality over all index triples.
    """

    name = "finite"

    def __init__(self, matrix):
        m = np.asarray(matrix, float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        super().__init__(m.shape[0])
        if not np.allclose(m, m.T, rtol=0, atol=0):
            raise ValueError("distance matrix must be symmetric")
        if np.abs(np.diag(m)).max(initial=0.0) > 0:
            raise ValueError("distance matrix must have a zero diagonal")
        off = m + np.eye(self.size)
        if (off <= 0).any():
            raise ValueError("off-diagonal distances must be positive")
        # triangle check over every (i, j, k): d_ij <= d_ik + d_kj
        viol = m[:, :, None] - m[:, None, :] - (m.T)[None, :, :]
        worst = float(viol.max())
        if worst > metric_tol(float(m.max()) if m.size else 1.0):
            raise ValueError(f"triangle inequality fails by {worst}")
        self.matrix = m
        self._properties = DeclaredProperties(
            is_length_space=False,
            is_geodesic=False,
            is_uniquely_geodesic=False,
            is_convex=False,
            known_minkowski_rank=0,
        )

    def distance(self, x, y) -> float:
        return float(self.matrix[self._check(x), self._check(y)])

    def distance_batch(self, xs, ys) -> np.ndarray:
        return self.matrix[np.asarray(xs), np.asarray(ys)]

    def descriptor(self):
        return {"type": "finite", "matrix": [[float(v) for v in row] for row in self.matrix]}


def line_pattern(values) -> FiniteMetricSpace:
    """Finite pattern whose points sit at the given positions on a line."""
    v = np.asarray(values, float)
    return FiniteMetricSpace(np.abs(v[:, None] - v[None, :]))
