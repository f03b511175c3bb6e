"""Experiment configuration: flat JSON in, validated dataclass out.

The config file is a single flat JSON object; unknown keys are rejected
by name so typos fail loudly, and omitted keys fall back to the standard
operating defaults (thresholds, gripper geometry, ensemble sizes).
"""

import json
from dataclasses import dataclass, fields

from .completion import SamplerConfig
from .decision import DecisionConfig, Mode
from .errors import ConfigError
from .filters import FilterConfig

__all__ = ["ExperimentConfig", "load_config"]


@dataclass
class ExperimentConfig:
    # sweep shape
    alpha_grid: tuple = (0.0, 0.1, 0.2, 0.3, 0.4)
    trials_per_alpha: int = 10
    modes: tuple = ("Baseline", "NoDropout", "Dropout")
    base_seed: int = 0
    # ensemble / generator sizes
    K: int = 20
    M: int = 200
    # filter thresholds and gripper geometry
    theta_dot: float = 0.7
    theta_vert: float = 0.5
    tau: float = 0.005
    jaw_width: float = 0.04
    jaw_len_min: float = 0.0
    jaw_len_max: float = 0.2
    delta_global: float = 0.01
    delta_local: float = 0.01
    front: tuple = (0.0, 0.0, -1.0)
    world_up: tuple = (0.0, 0.0, 1.0)
    # quality
    mu: float = 0.5
    n_dir: int = 8
    contact_step: float = 0.001
    contact_radius: float | None = None
    epsilon_mode: str = "union"
    # generation
    w_max: float = 0.04
    t_back: float = 0.04
    normals_k: int = 12
    # decision plumbing
    fix_position_to_centroid: bool = True
    check_against: str = "completed"
    min_detect_points: int = 1
    # sampler
    base_sigma: float = 0.001
    occlusion_gain: float = 5.0
    n_output: int = 2048
    std_mode: str = "deviation"
    # synthetic scene
    fruit_points: int = 2048
    fruit_scale_min: float = 0.012
    fruit_scale_max: float = 0.018
    leaf_aspect: float = 0.6
    leaf_thickness: float = 0.01
    clean_scene: bool = True
    # benchmark
    bench_points: int = 200_000
    bench_repeats: int = 5
    # output
    out_dir: str | None = None

    def __post_init__(self):
        self.alpha_grid = tuple(float(a) for a in self.alpha_grid)
        self.modes = tuple(str(m) for m in self.modes)
        self.front = tuple(float(v) for v in self.front)
        self.world_up = tuple(float(v) for v in self.world_up)
        if not self.alpha_grid:
            raise ConfigError("alpha_grid must be nonempty")
        if any(a < 0.0 for a in self.alpha_grid):
            raise ConfigError("alpha_grid entries must be nonnegative")
        if self.trials_per_alpha < 1:
            raise ConfigError("trials_per_alpha must be at least 1")
        if self.K < 2:
            raise ConfigError("K must be at least 2 (std needs K-1 >= 1)")
        if self.M < 0:
            raise ConfigError("M must be nonnegative")
        if not self.modes:
            raise ConfigError("modes must be nonempty")
        for m in self.modes:
            try:
                Mode.parse(m)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if not self.fruit_scale_min <= self.fruit_scale_max:
            raise ConfigError("fruit_scale_min must not exceed fruit_scale_max")
        if self.fruit_scale_min <= 0.0:
            raise ConfigError("fruit scales must be positive")
        if self.fruit_points < 0:
            raise ConfigError("fruit_points must be nonnegative")
        if self.bench_points < 0 or self.bench_repeats < 1:
            raise ConfigError("bench_points >= 0 and bench_repeats >= 1 required")
        try:
            self.filter_config()
            self.sampler_config()
            self.decision_config()
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def filter_config(self):
        return FilterConfig(
            theta_dot=self.theta_dot,
            theta_vert=self.theta_vert,
            tau=self.tau,
            jaw_width=self.jaw_width,
            jaw_len_range=(self.jaw_len_min, self.jaw_len_max),
            delta_global=self.delta_global,
            delta_local=self.delta_local,
            front=self.front,
            world_up=self.world_up,
        )

    def sampler_config(self, seed=0):
        return SamplerConfig(
            base_sigma=self.base_sigma,
            occlusion_gain=self.occlusion_gain,
            n_output=self.n_output,
            seed=seed,
        )

    def decision_config(self):
        return DecisionConfig(
            filter=self.filter_config(),
            sampler=self.sampler_config(),
            K=self.K,
            M=self.M,
            mu=self.mu,
            n_dir=self.n_dir,
            w_max=self.w_max,
            t_back=self.t_back,
            normals_k=self.normals_k,
            contact_step=self.contact_step,
            contact_radius=self.contact_radius,
            epsilon_mode=self.epsilon_mode,
            fix_position_to_centroid=self.fix_position_to_centroid,
            check_against=self.check_against,
            min_detect_points=self.min_detect_points,
        )

    def mode_list(self):
        return [Mode.parse(m) for m in self.modes]

    def to_json_dict(self):
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            out[f.name] = list(val) if isinstance(val, tuple) else val
        return out

    @classmethod
    def from_flat_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        type_map = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, val in data.items():
            spec = type_map[key]
            if spec.type in ("int", int) and isinstance(val, bool):
                raise ConfigError(f"{key}: expected integer, got boolean")
            kwargs[key] = val
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path):
    """Parse and validate a flat JSON experiment config."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_flat_dict(raw)
