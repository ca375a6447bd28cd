"""Gluing functions and their sampled classification ladder.

A gluing function maps the vector of factor distances, a point of the
closed quadrant Q^n = [0, oo)^n, to a single nonnegative number.  Which
structural conditions it satisfies decides what the glued product preserves:

* definiteness + the quadrant triangle condition  ->  a metric product,
* positivity, monotonicity, subadditivity, homogeneity  ->  induced by a
  norm (the absolute-value symmetrization is a norm on R^n),
* strict convexity of that norm ball  ->  unique geodesics survive,
* the axis Pythagoras identity  ->  induced by a scalar product.

The conditions are universally quantified, so the checks here sample: they
can falsify with an explicit witness, and for the closed-form catalog
variants the invariant tests give the matching positive evidence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .reports import (
    FAIL,
    PASS,
    TAU_METRIC,
    TAU_STRICT,
    UNDETERMINED,
    ValidationReport,
    metric_tol,
)
from .sampling import DEFAULT_SAMPLES, SampleConfig, quadrant_samples, rng_stream, signed_samples

_KINDS = (
    "weighted-lp",
    "weighted-euclidean",
    "sum",
    "max",
    "two-valued",
    "coordinate-power",
    "custom",
)


class GluingFunction:
    """Evaluator for a distance-combining function on the quadrant.

    Instances are immutable; classification results are memoized per
    sampling configuration.
    """

    def __init__(self, dim, kind, p=None, weights=None, func=None,
                 exponent=None, coordinate=0, vectorized=True, label=None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if kind not in _KINDS:
            raise ValueError(f"unknown gluing kind {kind!r}")
        self.dim = int(dim)
        self.kind = kind
        self.p = None if p is None else float(p)
        self.weights = None
        self.func = func
        self.exponent = None if exponent is None else float(exponent)
        self.coordinate = int(coordinate)
        self.vectorized = bool(vectorized)
        self._class_cache: dict = {}

        if kind in ("weighted-lp", "weighted-euclidean"):
            if kind == "weighted-euclidean":
                self.p = 2.0
            if self.p is None or self.p < 1:
                raise ValueError("exponent must satisfy p >= 1")
            w = np.ones(dim) if weights is None else np.asarray(weights, float)
            if w.shape != (self.dim,) or (w <= 0).any():
                raise ValueError("weights must be positive, one per axis")
            self.weights = w
        elif kind == "sum":
            self.p = 1.0
        elif kind == "max":
            self.p = math.inf
        elif kind == "coordinate-power":
            if self.exponent is None:
                raise ValueError("coordinate-power needs an exponent")
            if not 0 <= self.coordinate < self.dim:
                raise ValueError("coordinate out of range")
        elif kind == "custom":
            if not callable(func):
                raise ValueError("custom gluing needs a callable evaluator")
        self.label = label or self._default_label()

    # -- constructors --------------------------------------------------------

    @classmethod
    def lp(cls, dim, p, weights=None):
        if p == 2:
            return cls(dim, "weighted-euclidean", weights=weights)
        return cls(dim, "weighted-lp", p=p, weights=weights)

    @classmethod
    def euclidean(cls, weights):
        w = np.asarray(weights, float)
        return cls(len(w), "weighted-euclidean", weights=w)

    @classmethod
    def sum(cls, dim):
        return cls(dim, "sum")

    @classmethod
    def max(cls, dim):
        return cls(dim, "max")

    @classmethod
    def two_valued(cls, dim):
        """Value 0 at the origin, 1 where max(q) <= 1, else 2.

        One fixed representative of the two-valued family, chosen for
        reproducibility.
        """
        return cls(dim, "two-valued")

    @classmethod
    def coordinate_power(cls, dim, exponent, coordinate=0):
        return cls(dim, "coordinate-power", exponent=exponent, coordinate=coordinate)

    @classmethod
    def custom(cls, dim, func, vectorized=True, label=None):
        return cls(dim, "custom", func=func, vectorized=vectorized, label=label)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, q) -> float | np.ndarray:
        arr = np.asarray(q, float)
        single = arr.ndim == 1
        if arr.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}, got shape {arr.shape}")
        if (arr < 0).any():
            raise ValueError("quadrant vectors must be componentwise nonnegative")
        out = self._eval(arr)
        return float(out) if single else np.asarray(out, float)

    def _eval(self, arr: np.ndarray):
        if self.kind in ("weighted-lp", "weighted-euclidean"):
            if self.p == math.inf:
                return (self.weights * arr).max(axis=-1)
            return ((self.weights * arr**self.p).sum(axis=-1)) ** (1.0 / self.p)
        if self.kind == "sum":
            return arr.sum(axis=-1)
        if self.kind == "max":
            return arr.max(axis=-1)
        if self.kind == "two-valued":
            m = arr.max(axis=-1)
            return np.where(m <= 0.0, 0.0, np.where(m <= 1.0, 1.0, 2.0))
        if self.kind == "coordinate-power":
            return arr[..., self.coordinate] ** self.exponent
        if self.vectorized:
            return self.func(arr)
        if arr.ndim == 1:
            return self.func(arr)
        return np.apply_along_axis(self.func, -1, arr)

    def axis_values(self) -> np.ndarray:
        """Values on the axis unit vectors."""
        return np.asarray(self(np.eye(self.dim)), float).reshape(self.dim)

    def axis_value(self, i: int) -> float:
        return float(self.axis_values()[i])

    def symmetrized(self) -> "SymmetrizedNorm":
        return SymmetrizedNorm(self)

    def classification(self, cfg: SampleConfig | None = None) -> "Classification":
        """Memoized :func:`classify` for this instance."""
        cfg = cfg or DEFAULT_SAMPLES
        key = cfg.key()
        if key not in self._class_cache:
            self._class_cache[key] = classify(self, cfg)
        return self._class_cache[key]

    # -- misc ----------------------------------------------------------------

    def _default_label(self):
        if self.kind in ("weighted-lp", "weighted-euclidean"):
            w = ",".join(f"{v:g}" for v in self.weights)
            return f"{self.kind}(p={self.p:g}, w=[{w}])"
        if self.kind == "coordinate-power":
            return f"coordinate-power(q[{self.coordinate}]^{self.exponent:g})"
        return f"{self.kind}(n={self.dim})"

    def descriptor(self) -> dict:
        d = {"type": self.kind, "dim": self.dim}
        if self.weights is not None:
            d["weights"] = [float(w) for w in self.weights]
        if self.kind == "weighted-lp":
            d["p"] = "inf" if self.p == math.inf else self.p
        if self.kind == "coordinate-power":
            d["exponent"] = self.exponent
            d["coordinate"] = self.coordinate
        if self.kind == "custom":
            d["label"] = self.label
        return d

    def __repr__(self):
        return f"GluingFunction({self.label})"


@dataclass(frozen=True)
class SymmetrizedNorm:
    """Extension of a gluing function to all of R^n via absolute values.

    Symmetric under sign flips by construction; it is an actual norm
    exactly when the underlying gluing function passes the four norm
    conditions.
    """

    phi: GluingFunction

    def __call__(self, x) -> float | np.ndarray:
        return self.phi(np.abs(np.asarray(x, float)))

    @property
    def dim(self) -> int:
        return self.phi.dim


class GluingClass(enum.Enum):
    NOT_A_METRIC_PRODUCT = "not-a-metric-product"
    METRIC_COMPATIBLE = "metric-compatible"
    NORM_INDUCED = "norm-induced"
    STRICTLY_CONVEX_NORM = "strictly-convex-norm"
    SCALAR_PRODUCT_INDUCED = "scalar-product-induced"

    @property
    def level(self) -> int:
        return _LEVELS[self]

    def at_least(self, other: "GluingClass") -> bool:
        return self.level >= other.level


_LEVELS = {
    GluingClass.NOT_A_METRIC_PRODUCT: 0,
    GluingClass.METRIC_COMPATIBLE: 1,
    GluingClass.NORM_INDUCED: 2,
    GluingClass.STRICTLY_CONVEX_NORM: 3,
    GluingClass.SCALAR_PRODUCT_INDUCED: 4,
}


@dataclass
class Classification:
    """Highest supported class plus every report that backed the decision."""

    gluing_class: GluingClass
    reports: dict

    @property
    def value(self) -> str:
        return self.gluing_class.value

    def report_list(self) -> list[ValidationReport]:
        return list(self.reports.values())


def _report(condition, verdict, samples, margin, witness, **details):
    return ValidationReport(condition, verdict, int(samples), float(margin), witness, dict(details))


def check_definiteness(phi: GluingFunction, cfg: SampleConfig | None = None) -> ValidationReport:
    """Zero exactly at the origin, positive elsewhere (sampled)."""
    cfg = cfg or DEFAULT_SAMPLES
    q = quadrant_samples(phi.dim, cfg, stream=1)
    vals = np.asarray(phi(q), float)
    at_zero = float(phi(np.zeros(phi.dim)))
    nonzero = q.max(axis=1) > 0
    min_nz = float(vals[nonzero].min()) if nonzero.any() else math.inf
    bad_zero = at_zero > TAU_METRIC
    bad_nz = min_nz <= TAU_METRIC
    if bad_nz:
        witness = {"q": q[nonzero][np.argmin(vals[nonzero])], "value": min_nz}
    elif bad_zero:
        witness = {"q": np.zeros(phi.dim), "value": at_zero}
    else:
        witness = {"q": q[nonzero][np.argmin(vals[nonzero])], "value": min_nz}
    margin = max(at_zero, TAU_METRIC - min_nz)
    verdict = FAIL if (bad_zero or bad_nz) else PASS
    return _report("definiteness", verdict, len(q), margin, witness,
                   value_at_zero=at_zero, min_nonzero_value=min_nz)


def _triangle_shapes(phi: GluingFunction, cfg: SampleConfig):
    """Sample triples for the quadrant triangle condition.

    Yields (tag, a, b, c) where the hypothesis-bearing triple is
    (a, b, c); every permutation whose componentwise hypothesis holds is
    checked (the strongest reading of the condition).
    """
    dim = phi.dim
    p = quadrant_samples(dim, cfg, stream=2)
    q = quadrant_samples(dim, cfg, stream=3)
    n = min(len(p), len(q))
    p, q = p[:n], q[:n]
    u = rng_stream(cfg.seed, 303).uniform(0.0, 1.0, (n, dim))
    inside = u * (p + q)
    yield "interior", inside, p, q
    yield "sum", p + q, p, q
    # doubling shape: a <= 2b forces value(a) <= 2 value(b)
    v = rng_stream(cfg.seed, 304).uniform(0.0, 1.0, (n, dim))
    yield "doubling", 2.0 * v * q, q, q


def check_quadrant_triangle(phi: GluingFunction, cfg: SampleConfig | None = None) -> ValidationReport:
    """Generalized triangle condition over sampled quadrant triples."""
    cfg = cfg or DEFAULT_SAMPLES
    worst = -math.inf
    witness = None
    checked = 0
    scale = 1.0
    for tag, a, b, c in _triangle_shapes(phi, cfg):
        vals = [np.asarray(phi(t), float) for t in (a, b, c)]
        scale = max(scale, *(float(v.max(initial=0.0)) for v in vals))
        triple = (a, b, c)
        for j, k, l in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
            hyp = (triple[j] <= triple[k] + triple[l]).all(axis=1)
            if not hyp.any():
                continue
            margins = vals[j] - vals[k] - vals[l]
            margins = np.where(hyp, margins, -math.inf)
            checked += int(hyp.sum())
            i = int(np.argmax(margins))
            if margins[i] > worst:
                worst = float(margins[i])
                witness = {
                    "shape": tag,
                    "target": triple[j][i],
                    "left": triple[k][i],
                    "right": triple[l][i],
                    "values": [float(vals[j][i]), float(vals[k][i]), float(vals[l][i])],
                }
    verdict = FAIL if worst > metric_tol(scale) else PASS
    return _report("quadrant-triangle", verdict, checked, worst, witness,
                   reading="all permutations with valid hypothesis")


def check_norm_conditions(phi: GluingFunction, cfg: SampleConfig | None = None) -> list[ValidationReport]:
    """Positivity, monotonicity, subadditivity, positive homogeneity."""
    cfg = cfg or DEFAULT_SAMPLES
    dim = phi.dim
    reports = []

    pos = check_definiteness(phi, cfg)
    reports.append(_report("positivity", pos.verdict, pos.samples, pos.margin,
                           pos.witness, **pos.details))

    # monotonicity: componentwise q <= p must not raise the value
    p = quadrant_samples(dim, cfg, stream=4)
    u = rng_stream(cfg.seed, 404).uniform(0.0, 1.0, p.shape)
    lower_blocks = [u * p, p, np.zeros_like(p)]
    upper_blocks = [p, p, p]
    for j in range(dim):
        reduced = p.copy()
        reduced[:, j] = 0.0
        lower_blocks.append(reduced)
        upper_blocks.append(p)
    lo = np.vstack(lower_blocks)
    hi = np.vstack(upper_blocks)
    vlo = np.asarray(phi(lo), float)
    vhi = np.asarray(phi(hi), float)
    margins = vlo - vhi
    i = int(np.argmax(margins))
    verdict = FAIL if margins[i] > metric_tol(vhi.max(initial=0.0)) else PASS
    reports.append(_report("monotonicity", verdict, len(lo), float(margins[i]),
                           {"q": lo[i], "p": hi[i], "values": [float(vlo[i]), float(vhi[i])]}))

    # subadditivity
    a = quadrant_samples(dim, cfg, stream=5)
    b = quadrant_samples(dim, cfg, stream=6)
    n = min(len(a), len(b))
    a, b = a[:n], b[:n]
    eye = np.eye(dim)
    extra_a = np.repeat(eye, dim, axis=0)
    extra_b = np.tile(eye, (dim, 1))
    a = np.vstack([extra_a, a])
    b = np.vstack([extra_b, b])
    va, vb = np.asarray(phi(a), float), np.asarray(phi(b), float)
    vsum = np.asarray(phi(a + b), float)
    margins = vsum - va - vb
    i = int(np.argmax(margins))
    verdict = FAIL if margins[i] > metric_tol(va.max(initial=0.0), vb.max(initial=0.0)) else PASS
    reports.append(_report("subadditivity", verdict, len(a), float(margins[i]),
                           {"p": a[i], "q": b[i], "values": [float(vsum[i]), float(va[i]), float(vb[i])]}))

    # positive homogeneity
    q = quadrant_samples(dim, cfg, stream=7)
    corner_rows = min(len(q), 16)
    lam_rand = rng_stream(cfg.seed, 505).uniform(0.0, 4.0, len(q))
    lam_blocks = [lam_rand]
    q_blocks = [q]
    for lam0 in (0.0, 1e-6, 0.5, 1.0, 2.0, 3.0, 10.0):
        lam_blocks.append(np.full(corner_rows, lam0))
        q_blocks.append(q[:corner_rows])
    lam = np.concatenate(lam_blocks)
    qq = np.vstack(q_blocks)
    scaled = np.asarray(phi(lam[:, None] * qq), float)
    expected = lam * np.asarray(phi(qq), float)
    diffs = np.abs(scaled - expected)
    tols = TAU_METRIC * np.maximum(1.0, np.maximum(np.abs(scaled), np.abs(expected)))
    rel = diffs - tols
    i = int(np.argmax(rel))
    verdict = FAIL if rel[i] > 0 else PASS
    reports.append(_report("homogeneity", verdict, len(qq), float(diffs[i]),
                           {"lambda": float(lam[i]), "q": qq[i],
                            "values": [float(scaled[i]), float(expected[i])]}))
    return reports


def check_axis_pythagoras(phi: GluingFunction, cfg: SampleConfig | None = None) -> ValidationReport:
    """Squared value must split as the sum of squared axis contributions."""
    cfg = cfg or DEFAULT_SAMPLES
    dim = phi.dim
    rng = rng_stream(cfg.seed, 606)
    lam = rng.uniform(0.0, cfg.radius, (cfg.count, dim))
    lam[lam <= 0] = 1e-6
    ones = np.ones(dim)
    corners = np.vstack([ones, 0.5 * ones, cfg.radius * ones,
                         np.linspace(1.0, 2.0, dim)[None, :]])
    lam = np.vstack([corners, lam])
    lhs = np.asarray(phi(lam), float) ** 2
    rhs = np.zeros(len(lam))
    for i in range(dim):
        axis = np.zeros_like(lam)
        axis[:, i] = lam[:, i]
        rhs += np.asarray(phi(axis), float) ** 2
    diffs = np.abs(lhs - rhs)
    tols = TAU_METRIC * np.maximum(1.0, np.maximum(lhs, rhs))
    i = int(np.argmax(diffs - tols))
    verdict = FAIL if (diffs - tols)[i] > 0 else PASS
    margin_at_ones = float(abs(lhs[0] - rhs[0]))
    return _report("axis-pythagoras", verdict, len(lam), float(diffs[i]),
                   {"lambda": lam[i], "lhs": float(lhs[i]), "rhs": float(rhs[i])},
                   margin_at_ones=margin_at_ones)


def check_strict_convexity(phi, cfg: SampleConfig | None = None, *,
                           norm_reports: list[ValidationReport] | None = None,
                           separation: float = 0.1,
                           tau_strict: float = TAU_STRICT) -> ValidationReport:
    """Midpoints of distinct unit vectors must drop strictly below norm 1.

    Near-parallel pairs are excluded (separation threshold in the
    symmetrized norm): their midpoints approach norm 1 for every norm, so
    they carry no signal at the fixed absolute threshold.
    """
    psi = phi if isinstance(phi, SymmetrizedNorm) else SymmetrizedNorm(phi)
    base = psi.phi
    cfg = cfg or DEFAULT_SAMPLES
    if norm_reports is None:
        norm_reports = check_norm_conditions(base, cfg)
    failed = [r.condition for r in norm_reports if r.failed]
    if failed:
        return _report("strict-convexity", UNDETERMINED, 0, 0.0, None,
                       reason="norm conditions failed", failed_conditions=failed)

    dim = base.dim
    eye = np.eye(dim)
    corner_x, corner_y = [], []
    for i in range(dim):
        for j in range(i + 1, dim):
            corner_x += [eye[i], eye[i] + eye[j]]
            corner_y += [eye[j], eye[i] - eye[j]]
    x = signed_samples(dim, cfg, stream=8)
    y = signed_samples(dim, cfg, stream=9)
    if corner_x:
        x = np.vstack([np.array(corner_x), x])
        y = np.vstack([np.array(corner_y), y])
    nx = np.asarray(psi(x), float)
    ny = np.asarray(psi(y), float)
    keep = (nx > 1e-12) & (ny > 1e-12)
    xu = x[keep] / nx[keep, None]
    yu = y[keep] / ny[keep, None]
    sep = (np.asarray(psi(xu - yu), float) >= separation) & \
          (np.asarray(psi(xu + yu), float) >= separation)
    xu, yu = xu[sep], yu[sep]
    if len(xu) == 0:
        return _report("strict-convexity", UNDETERMINED, 0, 0.0, None,
                       reason="no admissible pairs sampled")
    mids = np.asarray(psi((xu + yu) / 2.0), float)
    # ties within float noise resolve to the earliest (corner) pair so that
    # exact witnesses beat sampled ones
    i = int(np.argmax(mids >= mids.max() - 1e-12))
    margin = float(mids[i]) - 1.0
    verdict = FAIL if mids[i] >= 1.0 - tau_strict else PASS
    witness = {"x": xu[i], "y": yu[i], "midpoint_norm": float(mids[i])}
    return _report("strict-convexity", verdict, len(xu), margin, witness,
                   separation=separation, tau_strict=tau_strict)


def classify(phi: GluingFunction, cfg: SampleConfig | None = None) -> Classification:
    """Run the full ladder and return the highest supported class."""
    cfg = cfg or DEFAULT_SAMPLES
    definite = check_definiteness(phi, cfg)
    triangle = check_quadrant_triangle(phi, cfg)
    norm = check_norm_conditions(phi, cfg)
    strict = check_strict_convexity(phi, cfg, norm_reports=norm)
    pythagoras = check_axis_pythagoras(phi, cfg)
    reports = {r.condition: r for r in [definite, triangle, *norm, strict, pythagoras]}
    if definite.failed or triangle.failed:
        cls = GluingClass.NOT_A_METRIC_PRODUCT
    elif any(r.failed for r in norm):
        cls = GluingClass.METRIC_COMPATIBLE
    elif strict.failed:
        cls = GluingClass.NORM_INDUCED
    elif pythagoras.failed:
        cls = GluingClass.STRICTLY_CONVEX_NORM
    else:
        cls = GluingClass.SCALAR_PRODUCT_INDUCED
    return Classification(cls, reports)


def scalar_product_weights(phi: GluingFunction, cfg: SampleConfig | None = None) -> np.ndarray:
    """Axis weights of the induced scalar product.

    Only meaningful for scalar-product class gluings; the product inner
    product is the weighted sum of the factor inner products with these
    weights.
    """
    cls = phi.classification(cfg).gluing_class
    if cls is not GluingClass.SCALAR_PRODUCT_INDUCED:
        raise ValueError(f"gluing classifies as {cls.value}, not scalar-product-induced")
    return phi.axis_values() ** 2


def check_symmetrized_norm_axioms(phi: GluingFunction, cfg: SampleConfig | None = None) -> list[ValidationReport]:
    """Norm axioms of the symmetrization on all of R^n (sampled)."""
    cfg = cfg or DEFAULT_SAMPLES
    psi = SymmetrizedNorm(phi)
    x = signed_samples(phi.dim, cfg, stream=21)
    y = signed_samples(phi.dim, cfg, stream=22)
    vx = np.asarray(psi(x), float)
    vy = np.asarray(psi(y), float)
    reports = []

    nz = np.abs(x).max(axis=1) > 0
    min_nz = float(vx[nz].min()) if nz.any() else math.inf
    at_zero = float(psi(np.zeros(phi.dim)))
    bad = at_zero > TAU_METRIC or min_nz <= TAU_METRIC
    reports.append(_report("psi-positivity", FAIL if bad else PASS, len(x),
                           max(at_zero, TAU_METRIC - min_nz), None,
                           min_nonzero_value=min_nz))

    lam = rng_stream(cfg.seed, 707).uniform(-3.0, 3.0, len(x))
    scaled = np.asarray(psi(lam[:, None] * x), float)
    expected = np.abs(lam) * vx
    diffs = np.abs(scaled - expected)
    i = int(np.argmax(diffs))
    tol = metric_tol(float(expected.max(initial=0.0)))
    reports.append(_report("psi-homogeneity", FAIL if diffs[i] > tol else PASS,
                           len(x), float(diffs[i]),
                           {"lambda": float(lam[i]), "x": x[i]}))

    vsum = np.asarray(psi(x + y), float)
    margins = vsum - vx - vy
    i = int(np.argmax(margins))
    tol = metric_tol(float(vx.max(initial=0.0)), float(vy.max(initial=0.0)))
    reports.append(_report("psi-subadditivity", FAIL if margins[i] > tol else PASS,
                           len(x), float(margins[i]), {"x": x[i], "y": y[i]}))
    return reports
