"""Shared verdict records and tolerance conventions.

Every validator in this package returns a :class:`ValidationReport`.  The
``margin`` field is the worst signed violation observed over the sample
set: positive means the checked condition was broken by that amount,
negative (or zero) means it held with that much room.  ``witness`` records
the inputs that achieved the worst margin so failures are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

# Relative tolerance for distance-level comparisons.  Catalog distances are
# closed forms with at most a few dozen arithmetic operations.
TAU_METRIC = 1e-9

# Absolute threshold on the midpoint norm in strict-convexity probes.  The
# catalog failures are exact (midpoint norm equals 1), so anything below
# 1e-3 separates cleanly.
TAU_STRICT = 1e-6

# Absolute tolerance when matching pairwise distances in embedding search.
TAU_EMBED = 1e-9

PASS = "pass"
FAIL = "fail"
UNDETERMINED = "undetermined"


def metric_tol(*values: float, tau: float = TAU_METRIC) -> float:
    """Tolerance that is relative for large magnitudes, absolute near 1."""
    scale = 1.0
    for v in values:
        a = abs(float(v))
        if a > scale:
            scale = a
    return tau * scale


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON-friendly values."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    return repr(obj)


@dataclass
class ValidationReport:
    """Outcome of one sampled or exact check."""

    condition: str
    verdict: str
    samples: int = 0
    margin: float = 0.0
    witness: Any = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_record(self) -> dict:
        return {
            "check": self.condition,
            "verdict": self.verdict,
            "samples": int(self.samples),
            "margin": to_jsonable(float(self.margin)),
            "witness": to_jsonable(self.witness),
            "details": to_jsonable(self.details),
        }
