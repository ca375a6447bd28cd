"""Command-line front end.

Reads a declarative JSON config naming spaces, gluing functions, curves,
and a list of checks; runs the checks in order and emits one record per
check, as aligned text or line-delimited JSON.  Exit codes: 0 all
non-informational checks passed, 1 a check failed, 2 bad config, 3 search
budget exceeded.

Structured output is byte-identical across runs for a fixed config and
seed; per-check wall times are only attached with --timings since they
would break that.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .curves import (
    arclength_check,
    circle_arc,
    curve_length,
    non_length_space_demo,
    polyline,
    product_curve_length_check,
    segment,
)
from .gluing import (
    GluingFunction,
    check_axis_pythagoras,
    check_definiteness,
    check_norm_conditions,
    check_quadrant_triangle,
    check_strict_convexity,
    check_symmetrized_norm_axioms,
    scalar_product_weights,
)
from .geodesics import (
    busemann_convexity_check,
    cat0_four_point_check,
    component_progress_check,
    geodesic_between,
    geodesy_test,
    product_geodesic,
    uniqueness_probe,
)
from .product import ProductSpace, verify_metric_axioms
from .rank import (
    BudgetExceededError,
    counterexample_sum_halflines,
    declared_rank,
    finite_embedding_oracle,
    product_rank,
)
from .reports import TAU_EMBED, TAU_METRIC, TAU_STRICT, to_jsonable
from .sampling import SampleConfig
from .spaces import DiscreteSpace, FiniteMetricSpace, HalfLine, LpSpace, RealLine

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

MACHINE_EPS = float(np.finfo(float).eps)


class ConfigError(ValueError):
    """Malformed or unresolvable configuration."""


# -- object construction -------------------------------------------------------


def build_phi(defn) -> GluingFunction:
    if not isinstance(defn, dict) or "type" not in defn:
        raise ConfigError("gluing definition needs a 'type' field")
    kind = defn["type"]
    dim = defn.get("dim")
    weights = defn.get("weights")
    try:
        if kind == "weighted-euclidean":
            if weights is None:
                raise ConfigError("weighted-euclidean needs 'weights'")
            return GluingFunction.euclidean(weights)
        if kind == "weighted-lp":
            p = defn.get("p")
            p = math.inf if p in ("inf", "oo") else float(p)
            if dim is None:
                if weights is None:
                    raise ConfigError("weighted-lp needs 'dim' or 'weights'")
                dim = len(weights)
            return GluingFunction.lp(int(dim), p, weights)
        if kind in ("sum", "max", "two-valued"):
            if dim is None:
                raise ConfigError(f"{kind} needs 'dim'")
            factory = {"sum": GluingFunction.sum, "max": GluingFunction.max,
                       "two-valued": GluingFunction.two_valued}[kind]
            return factory(int(dim))
        if kind == "coordinate-power":
            return GluingFunction.coordinate_power(
                int(dim), float(defn["exponent"]), int(defn.get("coordinate", 0)))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad gluing definition: {exc}") from exc
    raise ConfigError(f"unknown gluing type {kind!r}")


def build_space(defn, spaces: dict, phis: dict):
    if isinstance(defn, str):
        if defn not in spaces:
            raise ConfigError(f"unknown space {defn!r}")
        return spaces[defn]
    if not isinstance(defn, dict) or "type" not in defn:
        raise ConfigError("space definition needs a 'type' field")
    kind = defn["type"]
    try:
        if kind == "real-line":
            return RealLine()
        if kind == "half-line":
            return HalfLine()
        if kind == "lp":
            p = defn.get("p", 2)
            p = math.inf if p in ("inf", "oo") else float(p)
            return LpSpace(int(defn["dim"]), p, defn.get("weights"))
        if kind == "discrete":
            return DiscreteSpace(int(defn["points"]))
        if kind == "finite":
            return FiniteMetricSpace(defn["matrix"])
        if kind == "product":
            factors = [build_space(f, spaces, phis) for f in defn["factors"]]
            phi_def = defn["phi"]
            if isinstance(phi_def, str):
                if phi_def not in phis:
                    raise ConfigError(f"unknown gluing {phi_def!r}")
                phi = phis[phi_def]
            else:
                phi = build_phi(phi_def)
            return ProductSpace(factors, phi)
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad space definition: {exc}") from exc
    raise ConfigError(f"unknown space type {kind!r}")


def build_curve(defn, ctx):
    if not isinstance(defn, dict) or "kind" not in defn:
        raise ConfigError("curve definition needs a 'kind' field")
    kind = defn["kind"]
    try:
        if kind == "polyline":
            space = ctx.space(defn["space"])
            pts = [space.point_from_json(p) for p in defn["points"]]
            return polyline(space, pts, bool(defn.get("constant_speed", True)))
        if kind == "segment":
            space = ctx.space(defn["space"])
            return segment(space.point_from_json(defn["start"]),
                           space.point_from_json(defn["end"]))
        if kind == "circle-arc":
            return circle_arc(defn["center"], float(defn["radius"]),
                              float(defn.get("angle_start", 0.0)),
                              float(defn.get("angle_end", 2 * math.pi)))
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad curve definition: {exc}") from exc
    raise ConfigError(f"unknown curve kind {kind!r}")


class RunContext:
    """Resolved configuration: named objects plus run-wide defaults."""

    def __init__(self, config: dict, seed=None, samples=None, depth=None,
                 tolerances=None):
        if not isinstance(config, dict):
            raise ConfigError("config root must be a JSON object")
        if config.get("version") != 1:
            raise ConfigError("config needs 'version': 1")
        self.default_seed = 0 if seed is None else int(seed)
        self.default_samples = 10_000 if samples is None else int(samples)
        self.default_depth = 12 if depth is None else int(depth)
        tol = dict(tolerances or {})
        for key, val in tol.items():
            if key not in ("metric", "strict", "embed"):
                raise ConfigError(f"unknown tolerance key {key!r}")
            if not (float(val) >= MACHINE_EPS):
                raise ConfigError(f"tolerance {key} must be >= machine epsilon")
        self.tau_metric = float(tol.get("metric", TAU_METRIC))
        self.tau_strict = float(tol.get("strict", TAU_STRICT))
        self.tau_embed = float(tol.get("embed", TAU_EMBED))
        self.phis = {name: build_phi(d) for name, d in config.get("phis", {}).items()}
        self.spaces = {}
        for name, d in config.get("spaces", {}).items():
            self.spaces[name] = build_space(d, self.spaces, self.phis)
        self.curve_defs = config.get("curves", {})
        self.checks = config.get("checks", [])
        if not isinstance(self.checks, list):
            raise ConfigError("'checks' must be a list")

    def space(self, name):
        if isinstance(name, dict):
            return build_space(name, self.spaces, self.phis)
        if name not in self.spaces:
            raise ConfigError(f"unknown space {name!r}")
        return self.spaces[name]

    def product(self, name) -> ProductSpace:
        space = self.space(name)
        if not isinstance(space, ProductSpace):
            raise ConfigError(f"space {name!r} is not a product")
        return space

    def phi(self, name) -> GluingFunction:
        if isinstance(name, dict):
            return build_phi(name)
        if name not in self.phis:
            raise ConfigError(f"unknown gluing {name!r}")
        return self.phis[name]

    def curve(self, name):
        if isinstance(name, dict):
            return build_curve(name, self)
        if name not in self.curve_defs:
            raise ConfigError(f"unknown curve {name!r}")
        return build_curve(self.curve_defs[name], self)

    def sample_config(self, params: dict) -> SampleConfig:
        return SampleConfig(
            count=int(params.get("samples", self.default_samples)),
            seed=int(params.get("seed", self.default_seed)),
            radius=float(params.get("radius", 10.0)),
        )


# -- check runners ----------------------------------------------------------


def _expectation(record: dict, expect, observed) -> dict:
    if expect is not None:
        record["expected"] = expect
        record["observed"] = observed
        record["verdict"] = "pass" if observed == expect else "fail"
    return record


def _run_classify(ctx, params):
    phi = ctx.phi(params["phi"])
    result = phi.classification(ctx.sample_config(params))
    record = {
        "check": "classify",
        "gluing": phi.label,
        "class": result.value,
        "conditions": {k: r.verdict for k, r in result.reports.items()},
        "verdict": "pass",
    }
    return [_expectation(record, params.get("expect"), result.value)]


_PHI_CHECKS = {
    "definiteness": check_definiteness,
    "quadrant-triangle": check_quadrant_triangle,
    "axis-pythagoras": check_axis_pythagoras,
}


def _run_phi_condition(ctx, params):
    phi = ctx.phi(params["phi"])
    fn = _PHI_CHECKS[params["check"]]
    rep = fn(phi, ctx.sample_config(params))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_strict_convexity(ctx, params):
    phi = ctx.phi(params["phi"])
    rep = check_strict_convexity(phi, ctx.sample_config(params),
                                 tau_strict=ctx.tau_strict)
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_norm_conditions(ctx, params):
    phi = ctx.phi(params["phi"])
    reps = check_norm_conditions(phi, ctx.sample_config(params))
    return [r.to_record() for r in reps]


def _run_psi_axioms(ctx, params):
    phi = ctx.phi(params["phi"])
    reps = check_symmetrized_norm_axioms(phi, ctx.sample_config(params))
    return [r.to_record() for r in reps]


def _run_scalar_product_weights(ctx, params):
    phi = ctx.phi(params["phi"])
    try:
        weights = scalar_product_weights(phi, ctx.sample_config(params))
    except ValueError as exc:
        return [{"check": "scalar-product-weights", "verdict": "fail",
                 "error": str(exc)}]
    return [{"check": "scalar-product-weights", "verdict": "pass",
             "weights": to_jsonable(weights)}]


def _run_metric_axioms(ctx, params):
    prod = ctx.product(params["product"])
    cfg = ctx.sample_config(params)
    reps = verify_metric_axioms(prod, cfg.count, cfg.seed, cfg.radius,
                                tau=ctx.tau_metric)
    out = []
    for rep in reps:
        out.append(_expectation(rep.to_record(), params.get("expect"), rep.verdict))
    return out


def _run_curve_length(ctx, params):
    space = ctx.space(params["space"])
    curve = ctx.curve(params["curve"])
    depth = int(params.get("depth", ctx.default_depth))
    res = curve_length(space, curve, depth)
    record = {
        "check": "curve-length",
        "length": res.length,
        "trace": to_jsonable(res.trace),
        "diverged": res.diverged,
        "verdict": "pass" if not res.diverged else "fail",
    }
    if "expect_length" in params:
        tol = float(params.get("tolerance", 1e-6))
        ok = abs(res.length - float(params["expect_length"])) <= tol
        record["expected"] = float(params["expect_length"])
        record["verdict"] = "pass" if ok and not res.diverged else "fail"
    return [record]


def _run_product_curve_length(ctx, params):
    prod = ctx.product(params["product"])
    comps = [ctx.curve(c) for c in params["components"]]
    rep = product_curve_length_check(prod, comps,
                                     int(params.get("depth", ctx.default_depth)))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_arclength(ctx, params):
    space = ctx.space(params["space"])
    curve = ctx.curve(params["curve"])
    rep = arclength_check(space, curve, int(params.get("grid", 8)),
                          int(params.get("depth", 8)))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_non_length_space(ctx, params):
    endpoints = params.get("endpoints", ((0.0, 0.0), (1.0, 0.0)))
    endpoints = tuple(tuple(float(v) for v in pt) for pt in endpoints)
    rep = non_length_space_demo(int(params.get("depth", 8)), endpoints,
                                int(params.get("paths", 5)),
                                int(params.get("seed", ctx.default_seed)))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _geodesic_from_params(ctx, space, params):
    start = space.point_from_json(params["start"])
    end = space.point_from_json(params["end"])
    if "via" in params:
        if not isinstance(space, ProductSpace):
            raise ConfigError("'via' routes need a product space")
        return product_geodesic(space, start, end,
                                via=space.point_from_json(params["via"]))
    selector = params.get("selector", "affine")
    if isinstance(space, ProductSpace) and isinstance(selector, list):
        return product_geodesic(space, start, end, selectors=selector)
    return geodesic_between(space, start, end, selector)


def _run_geodesy(ctx, params):
    space = ctx.space(params["space"])
    geo = _geodesic_from_params(ctx, space, params)
    rep = geodesy_test(space, geo, int(params.get("grid", 64)))
    rec = rep.to_record()
    rec["midpoint"] = to_jsonable(space.point_to_json(geo.at(geo.length / 2.0)))
    return [_expectation(rec, params.get("expect"), rep.verdict)]


def _run_component_progress(ctx, params):
    prod = ctx.product(params["space"])
    geo = _geodesic_from_params(ctx, prod, params)
    rep = component_progress_check(prod, geo, int(params.get("grid", 64)))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_uniqueness(ctx, params):
    prod = ctx.product(params["product"])
    start = prod.point_from_json(params["start"])
    end = prod.point_from_json(params["end"])
    rep = uniqueness_probe(
        prod, start, end,
        grid=int(params.get("grid", 64)),
        perturbations=int(params.get("perturbations", 64)),
        seed=int(params.get("seed", ctx.default_seed)))
    observed = "unique" if rep.passed else "non-unique"
    rec = rep.to_record()
    expect = params.get("expect")
    if expect in ("unique", "non-unique"):
        return [_expectation(rec, expect, observed)]
    return [rec]


def _run_busemann(ctx, params):
    space = ctx.space(params["space"])
    g1 = _geodesic_from_params(ctx, space, params["g1"])
    g2 = _geodesic_from_params(ctx, space, params["g2"])
    rep = busemann_convexity_check(space, g1, g2, int(params.get("grid", 32)),
                                   tau=params.get("tau"))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_cat0(ctx, params):
    space = ctx.space(params["space"])
    triangles = None
    if "triangles" in params:
        triangles = [tuple(space.point_from_json(p) for p in tri)
                     for tri in params["triangles"]]
    rep = cat0_four_point_check(
        space, int(params.get("count", 1000)),
        int(params.get("seed", ctx.default_seed)),
        float(params.get("radius", 5.0)), triangles)
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _rank_record_common(rec, params):
    verdict = "pass"
    if "expect_rank" in params:
        verdict = "pass" if rec["rank"] == params["expect_rank"] else "fail"
        rec["expected"] = params["expect_rank"]
    rec["verdict"] = verdict
    return rec


def _run_declared_rank(ctx, params):
    space = ctx.space(params["space"])
    return [_rank_record_common(declared_rank(space).to_record(), params)]


def _run_product_rank(ctx, params):
    prod = ctx.product(params["space"])
    rec = product_rank(prod, bool(params.get("assert_kleiner", False))).to_record()
    return [_rank_record_common(rec, params)]


def _run_counterexample(ctx, params):
    rep = counterexample_sum_halflines(float(params.get("T", 10.0)),
                                       int(params.get("grid", 101)))
    return [_expectation(rep.to_record(), params.get("expect"), rep.verdict)]


def _run_embedding_oracle(ctx, params):
    space = ctx.space(params["space"])
    if "points" in params:
        points = [space.point_from_json(p) for p in params["points"]]
    else:
        sample = params.get("sample", {})
        points = space.sample_points(int(sample.get("count", 32)),
                                     int(sample.get("seed", ctx.default_seed)),
                                     float(sample.get("radius", 5.0)))
    pattern = np.asarray(params["pattern"], float)
    probe = finite_embedding_oracle(pattern, points, space, tau=ctx.tau_embed)
    rec = probe.to_record()
    rec["verdict"] = "pass"
    observed = "found" if probe.found else "none"
    expect = params.get("expect")
    if expect in ("found", "none"):
        return [_expectation(rec, expect, observed)]
    return [rec]


def _builtin_embedding(name: str, prod: ProductSpace):
    axes = prod.phi.axis_values()
    if name.startswith("axis:"):
        i = int(name.split(":", 1)[1])
        scale = 1.0 / axes[i]

        def axis_embed(v, i=i, scale=scale):
            return tuple(float(v[0]) * scale if j == i else 0.0
                         for j in range(len(prod.factors)))

        return axis_embed
    if name in ("diagonal", "diagonal-rescaled"):
        scale = 1.0
        if name == "diagonal-rescaled":
            scale = 1.0 / float(prod.phi(np.ones(prod.phi.dim)))

        def diag_embed(v, scale=scale):
            return tuple(float(v[0]) * scale for _ in range(len(prod.factors)))

        return diag_embed
    raise ConfigError(f"unknown builtin embedding {name!r}")


def _run_alpha(ctx, params):
    from .rank import alpha_decompose

    prod = ctx.product(params["product"])
    embedding = _builtin_embedding(params.get("embedding", "axis:0"), prod)
    vec_spec = params.get("vectors", {"linspace": [-3.0, 3.0, 13]})
    if isinstance(vec_spec, dict) and "linspace" in vec_spec:
        lo, hi, n = vec_spec["linspace"]
        vectors = np.linspace(float(lo), float(hi), int(n))
    else:
        vectors = np.asarray(vec_spec, float)
    _, reps = alpha_decompose(embedding, prod,
                              np.atleast_1d(params.get("base_a", 0.0)),
                              np.atleast_1d(params.get("base_b", 1.0)),
                              vectors)
    expect = params.get("expect")
    out = []
    for rep in reps:
        rec = rep.to_record()
        if expect == "isometric":
            if rep.condition == "alpha-isometry":
                rec = _expectation(rec, "pass", rep.verdict)
        elif expect == "non-isometric" and rep.condition == "alpha-isometry":
            rec = _expectation(rec, "fail", rep.verdict)
        out.append(rec)
    return out


CHECK_RUNNERS = {
    "classify": _run_classify,
    "definiteness": _run_phi_condition,
    "quadrant-triangle": _run_phi_condition,
    "axis-pythagoras": _run_phi_condition,
    "strict-convexity": _run_strict_convexity,
    "norm-conditions": _run_norm_conditions,
    "psi-norm-axioms": _run_psi_axioms,
    "scalar-product-weights": _run_scalar_product_weights,
    "metric-axioms": _run_metric_axioms,
    "curve-length": _run_curve_length,
    "product-curve-length": _run_product_curve_length,
    "arclength": _run_arclength,
    "non-length-space": _run_non_length_space,
    "geodesy": _run_geodesy,
    "component-progress": _run_component_progress,
    "unique-geodesic": _run_uniqueness,
    "busemann-convexity": _run_busemann,
    "cat0-four-point": _run_cat0,
    "declared-rank": _run_declared_rank,
    "product-rank": _run_product_rank,
    "rank-counterexample": _run_counterexample,
    "embedding-oracle": _run_embedding_oracle,
    "alpha-decomposition": _run_alpha,
}


def run_checks(ctx: RunContext, timings: bool = False) -> tuple[list[dict], int]:
    records = []
    exit_code = EXIT_OK
    for i, params in enumerate(ctx.checks):
        if not isinstance(params, dict) or "check" not in params:
            raise ConfigError(f"check #{i} needs a 'check' field")
        name = params["check"]
        if name not in CHECK_RUNNERS:
            raise ConfigError(f"unknown check {name!r}")
        started = time.perf_counter()
        try:
            recs = CHECK_RUNNERS[name](ctx, params)
        except BudgetExceededError:
            raise
        except ConfigError:
            raise
        except ValueError as exc:
            recs = [{"check": name, "verdict": "fail", "error": str(exc)}]
        elapsed = time.perf_counter() - started
        informational = bool(params.get("informational", False))
        for rec in recs:
            rec["id"] = len(records)
            if "name" in params:
                rec["name"] = params["name"]
            rec["informational"] = informational
            if timings:
                rec["elapsed_ms"] = round(elapsed * 1000.0, 3)
            if not informational and rec.get("verdict") != "pass":
                exit_code = EXIT_CHECK_FAILED
            records.append(rec)
    return records, exit_code


def emit(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for rec in records:
            out.write(json.dumps(to_jsonable(rec), sort_keys=True) + "\n")
        return
    for rec in records:
        label = rec.get("name") or rec.get("check", "?")
        verdict = rec.get("verdict", "-")
        margin = rec.get("margin")
        extra = "" if margin is None else f" margin={margin:.6g}"
        if "class" in rec:
            extra += f" class={rec['class']}"
        if "rank" in rec:
            extra += f" rank={rec['rank']} ({rec.get('provenance')})"
        if "elapsed_ms" in rec:
            extra += f" [{rec['elapsed_ms']} ms]"
        info = " (informational)" if rec.get("informational") else ""
        out.write(f"{verdict.upper():12s} {label}{extra}{info}\n")


# -- built-in demos ------------------------------------------------------------


def _demo_config(name: str, depth: int, seed: int) -> dict:
    sum2 = {"type": "sum", "dim": 2}
    plane_sum = {"type": "product", "factors": [{"type": "real-line"},
                                                {"type": "real-line"}],
                 "phi": sum2}
    demos = {
        "counterexample": {
            "checks": [{"check": "rank-counterexample", "T": 10.0, "grid": 101,
                        "expect": "pass", "name": "counterexample"}]},
        "non-length-space": {
            "checks": [{"check": "non-length-space", "depth": depth, "seed": seed,
                        "expect": "pass", "name": "non-length-space"}]},
        "L1-non-uniqueness": {
            "spaces": {"plane": plane_sum},
            "checks": [{"check": "unique-geodesic", "product": "plane",
                        "start": [0, 0], "end": [1, 1], "seed": seed,
                        "expect": "non-unique", "name": "L1-non-uniqueness"}]},
        "CAT0-failure": {
            "spaces": {"plane": plane_sum},
            "checks": [{"check": "cat0-four-point", "space": "plane",
                        "triangles": [[[0, 0], [2, 0], [0, 2]]],
                        "expect": "fail", "name": "CAT0-failure"}]},
    }
    if name not in demos:
        raise ConfigError(f"unknown demo {name!r}; available: {', '.join(sorted(demos))}")
    cfg = {"version": 1}
    cfg.update(demos[name])
    return cfg


DEMO_NAMES = ("counterexample", "non-length-space", "L1-non-uniqueness", "CAT0-failure")


# -- argument parsing ----------------------------------------------------------


def _parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--tolerance expects KEY=VAL, got {item!r}")
        key, val = item.split("=", 1)
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value {val!r}") from exc
    return out


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--tolerance", action="append", metavar="KEY=VAL",
                        help="override a tolerance (metric, strict, embed)")
    parser.add_argument("--timings", action="store_true",
                        help="attach wall times (breaks byte-identical output)")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metricprod",
        description="Glued metric products: classification and verification checks.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--list-demos", action="store_true",
                        help="list built-in demo names and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("run", help="run every check in a config file")
    p.add_argument("config")
    _add_common(p)

    p = sub.add_parser("validate-phi", help="classification ladder for one gluing")
    p.add_argument("--config")
    p.add_argument("--phi", help="name in the config, or inline JSON")
    p.add_argument("--kind", help="builtin kind (sum, max, two-valued, ...)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", type=float)
    p.add_argument("--weights", help="comma-separated positive weights")
    _add_common(p)

    p = sub.add_parser("check-product", help="metric axioms of a product space")
    p.add_argument("config")
    p.add_argument("--product", required=True)
    _add_common(p)

    p = sub.add_parser("length", help="dyadic length of a named curve")
    p.add_argument("config")
    p.add_argument("--curve", required=True)
    p.add_argument("--space", required=True)
    _add_common(p)

    p = sub.add_parser("geodesic", help="construct a geodesic and test geodesy")
    p.add_argument("config")
    p.add_argument("--space", required=True)
    p.add_argument("--start", required=True, help="point as JSON")
    p.add_argument("--end", required=True, help="point as JSON")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--selector", default="affine")
    _add_common(p)

    p = sub.add_parser("rank", help="rank record for a named space")
    p.add_argument("config")
    p.add_argument("--space", required=True)
    p.add_argument("--assert-kleiner", action="store_true")
    _add_common(p)

    p = sub.add_parser("demo", help="run a built-in demonstration")
    p.add_argument("demo_name", nargs="?")
    p.add_argument("--list", action="store_true")
    _add_common(p)
    return parser


def _dispatch(args) -> int:
    fmt = getattr(args, "format", "text")
    timings = getattr(args, "timings", False)
    tolerances = _parse_tolerances(getattr(args, "tolerance", None))

    def context(config):
        return RunContext(config, seed=args.seed, samples=args.samples,
                          depth=args.depth, tolerances=tolerances)

    if args.command == "run":
        ctx = context(_load_config(args.config))
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    if args.command == "validate-phi":
        if args.kind:
            defn = {"type": args.kind, "dim": args.dim}
            if args.p is not None:
                defn["p"] = args.p
            if args.weights:
                defn["weights"] = [float(w) for w in args.weights.split(",")]
        elif args.config and args.phi:
            try:
                defn = json.loads(args.phi)
            except json.JSONDecodeError:
                defn = args.phi
        else:
            raise ConfigError("validate-phi needs --kind or --config with --phi")
        config = {"version": 1,
                  "checks": [{"check": "classify", "phi": defn},
                             {"check": "definiteness", "phi": defn},
                             {"check": "quadrant-triangle", "phi": defn},
                             {"check": "norm-conditions", "phi": defn},
                             {"check": "strict-convexity", "phi": defn},
                             {"check": "axis-pythagoras", "phi": defn}]}
        if args.config:
            base = _load_config(args.config)
            config["phis"] = base.get("phis", {})
        for chk in config["checks"][1:]:
            chk["informational"] = True
        ctx = context(config)
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    if args.command == "check-product":
        config = _load_config(args.config)
        config.setdefault("checks", [])
        config["checks"] = [{"check": "metric-axioms", "product": args.product}]
        ctx = context(config)
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    if args.command == "length":
        config = _load_config(args.config)
        config["checks"] = [{"check": "curve-length", "space": args.space,
                             "curve": args.curve}]
        ctx = context(config)
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    if args.command == "geodesic":
        config = _load_config(args.config)
        config["checks"] = [{"check": "geodesy", "space": args.space,
                             "start": json.loads(args.start),
                             "end": json.loads(args.end),
                             "grid": args.grid,
                             "selector": args.selector}]
        ctx = context(config)
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    if args.command == "rank":
        config = _load_config(args.config)
        space_def = config.get("spaces", {}).get(args.space)
        check = "product-rank" if isinstance(space_def, dict) and \
            space_def.get("type") == "product" else "declared-rank"
        config["checks"] = [{"check": check, "space": args.space,
                             "assert_kleiner": args.assert_kleiner}]
        ctx = context(config)
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    if args.command == "demo":
        if args.list or not args.demo_name:
            for name in DEMO_NAMES:
                sys.stdout.write(name + "\n")
            return EXIT_OK
        depth = args.depth if args.depth is not None else 8
        seed = args.seed if args.seed is not None else 0
        ctx = context(_demo_config(args.demo_name, depth, seed))
        records, code = run_checks(ctx, timings)
        emit(records, fmt, sys.stdout)
        return code

    return EXIT_CONFIG


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    if args.list_demos:
        for name in DEMO_NAMES:
            sys.stdout.write(name + "\n")
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        return _dispatch(args)
    except BudgetExceededError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
