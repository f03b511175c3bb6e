"""Completion ensembles and per-point / global / grasp-local uncertainty.

The built-in sampler stands in for a dropout-enabled completion network:
it perturbs a canonical completed shape with isotropic Gaussian noise
whose per-point sigma grows with the distance from the point to its
nearest observed (partial) point, so occluded regions come back more
uncertain. External ensembles (K corresponded clouds from files) plug in
through the same CompletionEnsemble type.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud
from .errors import BadEnsembleSize, DataError, EmptyShape
from .io import load_cloud

__all__ = [
    "NO_POINTS_IN_SLICE",
    "CompletionEnsemble",
    "SamplerConfig",
    "canonical_completion",
    "global_uncertainty",
    "load_ensemble_dir",
    "local_uncertainty",
    "match_to_reference",
    "sample_completions",
]

# Sentinel returned by local_uncertainty when the grasp slab holds no
# points; the consuming filter treats it as worse than any threshold.
NO_POINTS_IN_SLICE = math.inf


@dataclass
class SamplerConfig:
    """Noise model of the built-in completion sampler."""

    base_sigma: float = 0.001
    occlusion_gain: float = 5.0
    n_output: int = 2048
    seed: int = 0

    def __post_init__(self):
        if self.base_sigma < 0.0:
            raise ValueError("base_sigma must be nonnegative")
        if self.occlusion_gain < 0.0:
            raise ValueError("occlusion_gain must be nonnegative")
        if self.n_output < 1:
            raise ValueError("n_output must be at least 1")


@dataclass
class CompletionEnsemble:
    """K index-corresponded completions with per-point deviation stds."""

    samples: tuple
    per_point_std: np.ndarray
    _mean_cloud: PointCloud | None = field(default=None, repr=False, compare=False)

    @property
    def K(self):
        return len(self.samples)

    @classmethod
    def from_samples(cls, samples, std_mode="deviation"):
        """Build an ensemble, deriving per-point stds across samples.

        std_mode 'deviation' (default): sample std (K-1 denominator) of the
        Euclidean deviation of each point from its across-sample mean.
        std_mode 'per-axis': mean over axes of the per-axis sample stds.
        """
        samples = tuple(samples)
        if len(samples) < 2:
            raise BadEnsembleSize(f"need K >= 2 samples, got {len(samples)}")
        sizes = {len(s) for s in samples}
        if len(sizes) != 1:
            raise DataError(f"ensemble samples differ in size: {sorted(sizes)}")
        stack = np.stack([s.points for s in samples])  # (K, N, 3)
        mean = stack.mean(axis=0)
        if stack.shape[1] == 0:
            std = np.empty(0)
        elif std_mode == "deviation":
            dev = np.linalg.norm(stack - mean, axis=2)  # (K, N)
            std = dev.std(axis=0, ddof=1)
        elif std_mode == "per-axis":
            std = stack.std(axis=0, ddof=1).mean(axis=1)
        else:
            raise ValueError(f"unknown std_mode {std_mode!r}")
        ens = cls(samples, std)
        ens._mean_cloud = PointCloud(mean)
        return ens

    def __post_init__(self):
        self.samples = tuple(self.samples)
        if len(self.samples) < 2:
            raise BadEnsembleSize(f"need K >= 2 samples, got {len(self.samples)}")
        self.per_point_std = np.asarray(self.per_point_std, dtype=np.float64).reshape(-1)
        if self.per_point_std.shape[0] != len(self.samples[0]):
            raise ValueError("per_point_std length must match sample size")
        self.per_point_std.setflags(write=False)

    def mean_cloud(self):
        """Pointwise mean completion (cached)."""
        if self._mean_cloud is None:
            stack = np.stack([s.points for s in self.samples])
            self._mean_cloud = PointCloud(stack.mean(axis=0))
        return self._mean_cloud


def canonical_completion(ground_shape, n_output, seed):
    """Resample a canonical shape to n_output points, seeded.

    Identity when the sizes already match; otherwise a seeded index draw
    (without replacement when downsampling). This is the zero-noise
    completion shared by every sampler mode.
    """
    if len(ground_shape) == 0:
        raise EmptyShape("canonical shape has no points")
    n = len(ground_shape)
    if n == n_output:
        return PointCloud(ground_shape.points)
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=n_output, replace=n < n_output)
    return PointCloud(ground_shape.points[idx])


def sample_completions(partial, ground_shape, cfg, K):
    """Draw K corresponded completions of a partial observation.

    Each canonical point i is perturbed by isotropic Gaussian noise with
    sigma_i = base_sigma * (1 + occlusion_gain * rho_i), where rho_i is
    the distance from the point to its nearest observed partial point,
    clamped to [0, diagonal(partial)]. The noise stream depends only on
    (seed, K, n_output), so ensembles with the same seed are paired across
    different partials.
    """
    if K < 2:
        raise BadEnsembleSize(f"need K >= 2, got {K}")
    if len(ground_shape) == 0:
        raise EmptyShape("ground shape has no points")
    rng = np.random.default_rng(cfg.seed)
    n = len(ground_shape)
    if n == cfg.n_output:
        canonical = ground_shape.points
    else:
        idx = rng.choice(n, size=cfg.n_output, replace=n < cfg.n_output)
        canonical = ground_shape.points[idx]
    noise = rng.standard_normal((K, cfg.n_output, 3))
    if len(partial) == 0:
        # nothing observed: treat every point as maximally far from evidence
        rho = np.full(cfg.n_output, PointCloud(canonical).aabb().diagonal())
    else:
        dist, _ = cKDTree(partial.points).query(canonical)
        rho = np.clip(dist, 0.0, partial.aabb().diagonal())
    sigma = cfg.base_sigma * (1.0 + cfg.occlusion_gain * rho)
    clouds = [PointCloud(canonical + noise[k] * sigma[:, None]) for k in range(K)]
    return CompletionEnsemble.from_samples(clouds)


def global_uncertainty(ens):
    """Mean per-point standard deviation of the ensemble (meters)."""
    if ens.per_point_std.shape[0] == 0:
        return 0.0
    return float(ens.per_point_std.mean())


def local_uncertainty(ens, grasp, jaw_width, jaw_len):
    """Mean per-point std inside the grasp slab of the mean completion.

    The slab is |(p-c).x| <= w/2, |(p-c).y| <= w/2, (p-c).a in [0, t] in
    the grasp frame. Returns the NO_POINTS_IN_SLICE sentinel (+inf) when
    the slab is empty, which downstream filters treat as a rejection.
    """
    mean = ens.mean_cloud()
    if len(mean) == 0:
        return NO_POINTS_IN_SLICE
    rel = mean.points - grasp.center
    half = 0.5 * jaw_width
    px = rel @ grasp.x_axis
    py = rel @ grasp.y_axis
    pa = rel @ grasp.approach
    mask = (
        (np.abs(px) <= half)
        & (np.abs(py) <= half)
        & (pa >= 0.0)
        & (pa <= jaw_len)
    )
    if not np.any(mask):
        return NO_POINTS_IN_SLICE
    return float(ens.per_point_std[mask].mean())


def load_ensemble_dir(path, std_mode="deviation"):
    """Build an ensemble from a directory of equally sized XYZ/PLY files."""
    names = sorted(
        f for f in os.listdir(path)
        if os.path.splitext(f)[1].lower() in (".xyz", ".ply")
    )
    if len(names) < 2:
        raise BadEnsembleSize(f"{path}: found {len(names)} sample files, need >= 2")
    samples = [load_cloud(os.path.join(path, name)) for name in names]
    return CompletionEnsemble.from_samples(samples, std_mode=std_mode)


def match_to_reference(samples):
    """Correspond non-matching sample clouds to the first one by nearest
    neighbor: sample k's point list is reordered (with possible repeats)
    so index i holds sample k's closest point to reference point i."""
    samples = list(samples)
    if not samples:
        return []
    ref = samples[0]
    out = [ref]
    for cloud in samples[1:]:
        if len(cloud) == 0:
            raise EmptyShape("cannot match an empty sample")
        _, idx = cloud.kdtree().query(ref.points)
        out.append(PointCloud(cloud.points[idx]))
    return out
