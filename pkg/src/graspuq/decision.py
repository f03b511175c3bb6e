"""Attempt-or-abstain decisions over completion ensembles.

Three modes share one entry point:

* Baseline: complete once, generate, attempt the top-scoring grasp with
  no filtering at all.
* NoDropout: complete once, generate, apply the geometric filters, and
  attempt the top-scoring survivor (abstain when none survive).
* Dropout: gate on global uncertainty, then per ensemble sample generate,
  filter (uncertainty + geometric), and score epsilon; aggregate into a
  lower confidence bound mean - z(alpha) * std and attempt only when it
  is strictly positive.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .cloud import centroid, estimate_normals
from .completion import SamplerConfig, canonical_completion, global_uncertainty, sample_completions
from .errors import BadEnsembleSize
from .filters import FilterConfig, filter_pipeline, global_gate
from .generation import generate_grasps
from .quality import sample_epsilon

__all__ = [
    "AbstainReason",
    "Decision",
    "DecisionConfig",
    "DecisionReport",
    "EpsilonStats",
    "Mode",
    "ObjectInput",
    "decide",
    "lcb_stats",
    "z_schedule",
]

_Z_ALPHAS = np.array([0.0, 0.1, 0.2, 0.3, 0.4])
_Z_VALUES = np.array([0.75, 0.88, 1.02, 1.15, 1.28])
_Z_SLOPE = 1.325


class Mode(str, Enum):
    BASELINE = "Baseline"
    NO_DROPOUT = "NoDropout"
    DROPOUT = "Dropout"

    @classmethod
    def parse(cls, name):
        for m in cls:
            if m.value.lower() == str(name).lower():
                return m
        raise ValueError(f"unknown mode {name!r}")


class AbstainReason(str, Enum):
    GLOBAL_UNCERTAINTY = "GlobalUncertainty"
    NO_SURVIVING_GRASPS = "NoSurvivingGrasps"
    NON_POSITIVE_LCB = "NonPositiveLCB"
    NO_DETECTION = "NoDetection"


def z_schedule(alpha):
    """Confidence factor z(alpha).

    Piecewise-linear through the scheduled grid points (0.0, 0.75) ...
    (0.4, 1.28), which the linear fit 0.75 + 1.325*alpha matches within
    0.005; grid inputs return the tabulated values exactly, and the fit
    slope extends the schedule beyond the grid.
    """
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    if alpha <= _Z_ALPHAS[-1]:
        return float(np.interp(alpha, _Z_ALPHAS, _Z_VALUES))
    return float(_Z_VALUES[-1] + _Z_SLOPE * (alpha - _Z_ALPHAS[-1]))


@dataclass
class EpsilonStats:
    """Per-sample epsilons with their mean, std, and lower bound."""

    eps: tuple
    mean: float
    std: float
    z_alpha: float
    lcb: float


def lcb_stats(eps, z):
    """Aggregate K epsilon values: mean, sample std, lcb = mean - z*std."""
    eps = tuple(float(e) for e in eps)
    if len(eps) < 2:
        raise BadEnsembleSize(f"need K >= 2 epsilon values, got {len(eps)}")
    arr = np.asarray(eps)
    if np.all(arr == arr[0]):
        # exact zero spread; avoids rounding dust from the summation
        mean, std = float(arr[0]), 0.0
    else:
        mean = float(arr.mean())
        std = float(arr.std(ddof=1))
    lcb = mean - z * std
    return EpsilonStats(eps, mean, std, float(z), lcb)


@dataclass
class Decision:
    verdict: str  # "Attempt" | "Abstain"
    mode: Mode
    reason: AbstainReason | None = None
    grasp: object = None
    stats: EpsilonStats | None = None

    def __post_init__(self):
        if self.verdict == "Attempt":
            if self.grasp is None:
                raise ValueError("Attempt requires a selected grasp")
            if self.mode is Mode.DROPOUT and not (
                self.stats is not None and self.stats.lcb > 0.0
            ):
                raise ValueError("Dropout Attempt requires stats with lcb > 0")
        elif self.verdict == "Abstain":
            if self.reason is None:
                raise ValueError("Abstain requires a reason")
        else:
            raise ValueError(f"unknown verdict {self.verdict!r}")


@dataclass
class DecisionConfig:
    """Everything decide() needs besides the object itself."""

    filter: FilterConfig = field(default_factory=FilterConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    K: int = 20
    M: int = 200
    mu: float = 0.5
    n_dir: int = 8
    w_max: float = 0.04
    t_back: float = 0.04
    normals_k: int = 12
    contact_step: float = 0.001
    contact_radius: float | None = None
    epsilon_mode: str = "union"
    fix_position_to_centroid: bool = True
    check_against: str = "completed"
    min_detect_points: int = 1

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.M < 0:
            raise ValueError("M must be nonnegative")
        if self.epsilon_mode not in ("union", "best"):
            raise ValueError(f"unknown epsilon_mode {self.epsilon_mode!r}")
        if self.check_against not in ("completed", "partial"):
            raise ValueError(f"unknown check_against {self.check_against!r}")


@dataclass
class ObjectInput:
    """One object's observation and completion sources.

    `ensemble` (Dropout) or `completion` (other modes) override the
    built-in sampler; otherwise completions derive from `ground_shape`,
    falling back to the partial itself when no canonical shape is known.
    """

    object_id: str
    partial: object
    alpha: float = 0.0
    ground_shape: object = None
    ensemble: object = None
    completion: object = None


@dataclass
class PerSample:
    k: int
    M: int
    M_prime: int
    eps: float | None

    def to_json_dict(self):
        return {"k": self.k, "M": self.M, "M_prime": self.M_prime, "eps": self.eps}


@dataclass
class DecisionReport:
    """Serializable record of one object's decision."""

    object_id: str
    mode: Mode
    alpha: float
    decision: Decision
    global_uncertainty: float | None = None
    per_sample: list = field(default_factory=list)
    mean: float | None = None
    std: float | None = None
    z: float | None = None
    lcb: float | None = None
    n_generator_calls: int = 0

    @property
    def verdict(self):
        return self.decision.verdict

    @property
    def reason(self):
        return self.decision.reason

    def to_json_dict(self):
        sel = self.decision.grasp
        return {
            "object_id": self.object_id,
            "mode": self.mode.value,
            "alpha": self.alpha,
            "global_uncertainty": self.global_uncertainty,
            "per_sample": [p.to_json_dict() for p in self.per_sample],
            "mean": self.mean,
            "std": self.std,
            "z": self.z,
            "lcb": self.lcb,
            "verdict": self.decision.verdict,
            "reason": self.decision.reason.value if self.decision.reason else None,
            "selected_grasp": sel.to_row() if sel is not None else None,
        }


def _derived_seed(*parts):
    return int(np.random.SeedSequence(tuple(parts)).generate_state(1, np.uint64)[0])


def decide(obj, mode, cfg, seed=0):
    """Run Algorithm-style mode logic on one object; see module docstring.

    Deterministic under (obj, mode, cfg, seed): completion noise and the
    generator stream both derive from `seed`. Every per-sample generator
    call shares one stream, so the only source of per-sample variation is
    the sample cloud itself and mode ablations stay paired.
    """
    mode = Mode(mode)
    report = DecisionReport(obj.object_id, mode, float(obj.alpha), decision=None)
    if len(obj.partial) < max(1, cfg.min_detect_points):
        report.decision = Decision("Abstain", mode, reason=AbstainReason.NO_DETECTION)
        return report
    ens_seed = _derived_seed(seed, 3)
    gen_seed = _derived_seed(seed, 7)
    sampler = replace(cfg.sampler, seed=ens_seed)
    ground = obj.ground_shape if obj.ground_shape is not None else obj.partial

    def run_generator(cloud):
        report.n_generator_calls += 1
        return generate_grasps(
            cloud, cfg.M, w_max=cfg.w_max, mu=cfg.mu, seed=gen_seed,
            front=cfg.filter.front, t_back=cfg.t_back,
        )

    if mode is Mode.DROPOUT:
        ens = obj.ensemble
        if ens is None:
            ens = sample_completions(obj.partial, ground, sampler, cfg.K)
        report.global_uncertainty = global_uncertainty(ens)
        if not global_gate(ens, cfg.filter):
            report.decision = Decision(
                "Abstain", mode, reason=AbstainReason.GLOBAL_UNCERTAINTY
            )
            return report
        eps = []
        survivor_lists = []
        for k, sample in enumerate(ens.samples):
            cloud_k = estimate_normals(sample, cfg.normals_k)
            grasps = run_generator(cloud_k)
            check_cloud = cloud_k if cfg.check_against == "completed" else obj.partial
            survivors, _ = filter_pipeline(grasps, ens, check_cloud, cfg.filter)
            e_k = sample_epsilon(
                survivors, cloud_k, cfg.filter, cfg.mu, cfg.n_dir,
                mode=cfg.epsilon_mode, step=cfg.contact_step,
                contact_radius=cfg.contact_radius,
            )
            eps.append(e_k)
            survivor_lists.append(survivors)
            report.per_sample.append(PerSample(k, len(grasps), len(survivors), e_k))
        stats = lcb_stats(eps, z_schedule(obj.alpha))
        report.mean, report.std = stats.mean, stats.std
        report.z, report.lcb = stats.z_alpha, stats.lcb
        if stats.lcb <= 0.0:
            report.decision = Decision(
                "Abstain", mode, reason=AbstainReason.NON_POSITIVE_LCB, stats=stats
            )
            return report
        k_best = int(np.argmax(eps))
        selected = survivor_lists[k_best][0]  # survivors keep score order
        if cfg.fix_position_to_centroid:
            selected = selected.with_center(centroid(ens.mean_cloud()))
        report.decision = Decision("Attempt", mode, grasp=selected, stats=stats)
        return report

    # single-completion modes
    completed = obj.completion
    if completed is None:
        completed = canonical_completion(ground, cfg.sampler.n_output, ens_seed)
    cloud = estimate_normals(completed, cfg.normals_k)
    grasps = run_generator(cloud)
    if mode is Mode.BASELINE:
        report.per_sample.append(
            PerSample(0, len(grasps), len(grasps), None)
        )
        if not grasps:
            report.decision = Decision(
                "Abstain", mode, reason=AbstainReason.NO_SURVIVING_GRASPS
            )
            return report
        selected = grasps[0]
        if cfg.fix_position_to_centroid:
            selected = selected.with_center(centroid(cloud))
        report.decision = Decision("Attempt", mode, grasp=selected)
        return report

    # NoDropout: geometric filters only
    check_cloud = cloud if cfg.check_against == "completed" else obj.partial
    survivors, _ = filter_pipeline(grasps, None, check_cloud, cfg.filter)
    report.per_sample.append(PerSample(0, len(grasps), len(survivors), None))
    if not survivors:
        report.decision = Decision(
            "Abstain", mode, reason=AbstainReason.NO_SURVIVING_GRASPS
        )
        return report
    selected = survivors[0]
    if cfg.fix_position_to_centroid:
        selected = selected.with_center(centroid(cloud))
    report.decision = Decision("Attempt", mode, grasp=selected)
    return report
