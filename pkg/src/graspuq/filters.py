"""The grasp filter pipeline.

Stages, in pipeline order: local uncertainty against delta_local, front
alignment, vertical-orientation rejection, and jaw-object clearance. The
clearance check exists in two forms with identical verdicts: a naive one
that measures every point, and an accelerated one using padded-box
prefiltering with exact distances only for surviving candidates.

Boundary semantics are load-bearing and encoded exactly: front alignment
passes at equality (>=), vertical rejects strictly above the threshold,
clearance requires strictly more than tau, and the global gate abstains
strictly above delta_global.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .completion import global_uncertainty, local_uncertainty

__all__ = [
    "FilterConfig",
    "FilterTrace",
    "STAGE_FRONT",
    "STAGE_JAW",
    "STAGE_LOCAL",
    "STAGE_PASS",
    "STAGE_VERTICAL",
    "filter_pipeline",
    "front_filter",
    "global_gate",
    "jaw_intersection_fast",
    "jaw_intersection_naive",
    "jaw_segments",
    "vertical_filter",
]

STAGE_LOCAL = "LocalUncertainty"
STAGE_FRONT = "Front"
STAGE_VERTICAL = "Vertical"
STAGE_JAW = "JawIntersection"
STAGE_PASS = "Pass"

_UNIT_TOL = 1e-9


def _unit3(v, name):
    out = np.asarray(v, dtype=np.float64).reshape(3)
    if abs(np.linalg.norm(out) - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector")
    out.setflags(write=False)
    return out


@dataclass
class FilterConfig:
    """Thresholds and gripper geometry for the filter stages."""

    theta_dot: float = 0.7
    theta_vert: float = 0.5
    tau: float = 0.005
    jaw_width: float = 0.04
    jaw_len_range: tuple = (0.0, 0.2)
    delta_global: float = 0.01
    delta_local: float = 0.01
    front: np.ndarray = (0.0, 0.0, -1.0)
    world_up: np.ndarray = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not -1.0 <= self.theta_dot <= 1.0:
            raise ValueError("theta_dot must lie in [-1, 1]")
        if not 0.0 <= self.theta_vert <= 1.0:
            raise ValueError("theta_vert must lie in [0, 1]")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.jaw_width <= 0.0:
            raise ValueError("jaw_width must be positive")
        lo, hi = self.jaw_len_range
        if not 0.0 <= lo <= hi:
            raise ValueError("jaw_len_range must be nondecreasing with min >= 0")
        self.jaw_len_range = (float(lo), float(hi))
        self.front = _unit3(self.front, "front")
        self.world_up = _unit3(self.world_up, "world_up")


@dataclass
class FilterTrace:
    """Per-grasp terminal stage plus prefilter instrumentation."""

    entries: list = field(default_factory=list)
    global_gate_passed: bool | None = None
    exact_eval_count: int = 0

    def record(self, index, stage, verdict):
        self.entries.append({"index": index, "stage": stage, "verdict": verdict})

    def to_json(self, indent=None):
        return json.dumps(
            {
                "global_gate_passed": self.global_gate_passed,
                "exact_eval_count": self.exact_eval_count,
                "grasps": self.entries,
            },
            indent=indent,
            sort_keys=True,
        )


def global_gate(ens, cfg):
    """Object-level gate: False (abstain) iff mean uncertainty exceeds
    delta_global; equality passes."""
    return global_uncertainty(ens) <= cfg.delta_global


def front_filter(g, cfg):
    """Pass iff the approach aligns with the front direction: a.f >= theta_dot."""
    return float(g.approach @ cfg.front) >= cfg.theta_dot


def vertical_filter(g, cfg):
    """Reject iff |x.z| > theta_vert, regardless of the jaw axis sign."""
    return abs(float(g.x_axis @ cfg.world_up)) <= cfg.theta_vert


def jaw_segments(g, cfg):
    """Endpoints of the two jaw segments: c -/+ (w/2) x + t a, t in jaw_len_range."""
    half = 0.5 * cfg.jaw_width
    lo, hi = cfg.jaw_len_range
    left = g.center - half * g.x_axis
    right = g.center + half * g.x_axis
    a = g.approach
    return (left + lo * a, left + hi * a, right + lo * a, right + hi * a)


def jaw_intersection_naive(g, cloud, cfg):
    """Pass iff every point clears both jaw segments by more than tau.

    Evaluates the exact distance for every point; the reference
    implementation for the accelerated variant.
    """
    a0, a1, b0, b1 = jaw_segments(g, cfg)
    d2 = kernels.min_jaw_distance_sq(cloud.points, a0, a1, b0, b1)
    return d2 > cfg.tau * cfg.tau


def jaw_intersection_fast(g, cloud, cfg, trace=None):
    """Identical verdict to jaw_intersection_naive via padded-box
    prefiltering; exact distances only for box survivors."""
    a0, a1, b0, b1 = jaw_segments(g, cfg)
    passed, n_exact = kernels.jaw_clearance_check(
        cloud.points, a0, a1, b0, b1, cfg.tau
    )
    if trace is not None:
        trace.exact_eval_count += n_exact
    return passed


def filter_pipeline(grasps, ens, sample_cloud, cfg):
    """Run the per-grasp stages in order and collect survivors.

    `ens` may be None to skip the local-uncertainty stage (the
    geometric-only configuration); survivors keep input order. Membership
    equals the intersection of the individual filters; order only affects
    which stage a trace blames.
    """
    trace = FilterTrace()
    survivors = []
    jaw_hi = cfg.jaw_len_range[1]
    for i, g in enumerate(grasps):
        if ens is not None and not (
            local_uncertainty(ens, g, cfg.jaw_width, jaw_hi) <= cfg.delta_local
        ):
            trace.record(i, STAGE_LOCAL, "reject")
            continue
        if not front_filter(g, cfg):
            trace.record(i, STAGE_FRONT, "reject")
            continue
        if not vertical_filter(g, cfg):
            trace.record(i, STAGE_VERTICAL, "reject")
            continue
        if not jaw_intersection_fast(g, sample_cloud, cfg, trace):
            trace.record(i, STAGE_JAW, "reject")
            continue
        trace.record(i, STAGE_PASS, "pass")
        survivors.append(g)
    return survivors, trace
