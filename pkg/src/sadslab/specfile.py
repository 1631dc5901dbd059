"""JSON metric specifications.

A spec is a JSON object::

    {"kind": "hyperbolic" | "sads" | "perturbed" | "glued",
     "mass": 1.0,
     "boundary": 1.4067...,
     "perturbation": [[amplitude, rate], ...],             # perturbed only
     "gluing": {"glue_interval": [r_a, r_b],
                "interior_profile": [[r, phi], ...]}}      # glued only

``phi^2`` of a perturbed metric is the SAdS value times
``1 + sum amplitude * exp(-rate * r)``.  For ``sads`` and ``perturbed`` the
boundary is derived from the mass; a supplied value must agree with it.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import ValidationError
from .metrics import GluingSpec, MetricKind, RadialMetric, make_glued, make_hyperbolic, make_perturbed, make_sads

BOUNDARY_MATCH_TOL = 1.0e-9


def _number(spec: dict, key: str, default=None) -> float:
    value = spec.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(f"spec field {key!r} must be a finite number, got {value!r}")
    return float(value)


def _pairs(value, what: str) -> list[tuple[float, float]]:
    try:
        pairs = [(float(a), float(b)) for a, b in value]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what} must be a list of number pairs") from exc
    return pairs


def _check_boundary(spec: dict, metric: RadialMetric) -> RadialMetric:
    if spec.get("boundary") is None:
        return metric
    given = _number(spec, "boundary")
    if abs(given - metric.boundary_r) > BOUNDARY_MATCH_TOL * max(1.0, abs(given)):
        raise ValidationError(f"boundary {given} disagrees with the derived value {metric.boundary_r}")
    return metric


def metric_from_spec(spec: dict) -> RadialMetric:
    if not isinstance(spec, dict):
        raise ValidationError("metric spec must be a JSON object")
    try:
        kind = MetricKind(spec.get("kind"))
    except ValueError as exc:
        choices = ", ".join(k.value for k in MetricKind)
        raise ValidationError(f"unknown metric kind {spec.get('kind')!r} (expected one of {choices})") from exc

    if kind is MetricKind.HYPERBOLIC:
        return make_hyperbolic(_number(spec, "boundary", 0.0))
    mass = _number(spec, "mass")
    if kind is MetricKind.EXACT_SADS:
        return _check_boundary(spec, make_sads(mass))
    if kind is MetricKind.PERTURBED_SADS:
        terms = _pairs(spec.get("perturbation"), "perturbation")
        return _check_boundary(spec, make_perturbed(mass, terms))

    gluing = spec.get("gluing")
    if not isinstance(gluing, dict):
        raise ValidationError("glued spec needs a 'gluing' object")
    interval = gluing.get("glue_interval")
    if not isinstance(interval, (list, tuple)) or len(interval) != 2:
        raise ValidationError("glue_interval must be [r_a, r_b]")
    boundary = spec.get("boundary")
    return make_glued(
        GluingSpec(
            exterior_mass=mass,
            glue_interval=(float(interval[0]), float(interval[1])),
            interior_profile=tuple(_pairs(gluing.get("interior_profile"), "interior_profile")),
            boundary_r=None if boundary is None else _number(spec, "boundary"),
        )
    )


def load_metric(path) -> RadialMetric:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read metric spec {path}: {exc}") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"metric spec {path} is not valid JSON: {exc}") from exc
    # CLI JSON output nests the spec under "metric"
    if isinstance(spec, dict) and "kind" not in spec and isinstance(spec.get("metric"), dict):
        spec = spec["metric"]
    return metric_from_spec(spec)


def dump_metric(metric: RadialMetric, path) -> None:
    Path(path).write_text(json.dumps(metric.to_spec(), indent=2) + "\n")
