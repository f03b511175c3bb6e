"""Procedural fruit generation and the elliptical leaf occlusion model.

A fruit is a teardrop solid of revolution sampled uniformly by surface
area. A leaf is an elliptical slab attached to one of the four lateral
bounding-box faces; points inside the ellipse footprint and within the
slab thickness are removed. Severity alpha scales the ellipse relative to
the bounding-box diagonal, so alpha = 0 removes nothing and growing alpha
removes a nested, growing subset for a fixed placement seed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud, centroid
from .errors import EmptyCloud

__all__ = [
    "LeafSpec",
    "OcclusionOutcome",
    "apply_leaf",
    "centroid_shift",
    "generate_strawberry",
    "place_leaf",
]

_TOL = 1e-9


@dataclass
class LeafSpec:
    """Elliptical leaf slab: frame, semi-axes, thickness, severity."""

    center: np.ndarray
    normal: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    semi_major: float
    semi_minor: float
    thickness: float
    alpha: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64).reshape(3)
        self.normal = np.asarray(self.normal, dtype=np.float64).reshape(3)
        self.a1 = np.asarray(self.a1, dtype=np.float64).reshape(3)
        self.a2 = np.asarray(self.a2, dtype=np.float64).reshape(3)
        triad = (self.a1, self.a2, self.normal)
        for v in triad:
            if abs(np.linalg.norm(v) - 1.0) > _TOL:
                raise ValueError("leaf frame vectors must be unit length")
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(float(triad[i] @ triad[j])) > _TOL:
                    raise ValueError("leaf frame vectors must be orthogonal")
        if np.max(np.abs(np.cross(self.a1, self.a2) - self.normal)) > _TOL:
            raise ValueError("leaf frame must be right-handed (a1 x a2 = n)")
        if not (self.semi_major >= self.semi_minor >= 0.0):
            raise ValueError("require semi_major >= semi_minor >= 0")
        if self.thickness < 0.0 or self.alpha < 0.0:
            raise ValueError("thickness and alpha must be nonnegative")


@dataclass
class OcclusionOutcome:
    occluded_cloud: PointCloud
    removed_fraction: float
    leaf: LeafSpec


# Teardrop profile: radius r(h) = scale*sin(pi*h)*(1 - 0.35*h), height
# z = scale*h over h in [0, 1].
def _profile_radius(h, scale):
    return scale * np.sin(np.pi * h) * (1.0 - 0.35 * h)


def generate_strawberry(seed, n_points, scale=0.015):
    """Seeded area-uniform surface sampling of the teardrop profile."""
    if n_points < 0:
        raise ValueError("n_points must be nonnegative")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    if n_points == 0:
        return PointCloud(np.empty((0, 3)))
    rng = np.random.default_rng(seed)
    u = rng.random(n_points)
    theta = 2.0 * np.pi * rng.random(n_points)
    # inverse-CDF sampling of h with area density r(h)*sqrt(r'(h)^2 + scale^2)
    grid = np.linspace(0.0, 1.0, 2049)
    r = _profile_radius(grid, scale)
    dr = scale * (
        np.pi * np.cos(np.pi * grid) * (1.0 - 0.35 * grid)
        - 0.35 * np.sin(np.pi * grid)
    )
    density = r * np.sqrt(dr * dr + scale * scale)
    cdf = np.concatenate(([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]))))
    cdf /= cdf[-1]
    h = np.interp(u, cdf, grid)
    radius = _profile_radius(h, scale)
    pts = np.column_stack(
        (radius * np.cos(theta), radius * np.sin(theta), scale * h)
    )
    return PointCloud(pts)


_FACE_CASES = (
    # (axis index, which corner, inward normal)
    (0, "max", (-1.0, 0.0, 0.0)),
    (0, "min", (1.0, 0.0, 0.0)),
    (1, "max", (0.0, -1.0, 0.0)),
    (1, "min", (0.0, 1.0, 0.0)),
)


def place_leaf(cloud, alpha, aspect=0.6, t_leaf=0.01, seed=0):
    """Place a leaf on one of the four lateral Aabb faces, seeded uniformly.

    The ellipse semi-major axis is alpha times the bounding-box diagonal
    and the semi-minor axis is aspect times that; the leaf normal points
    inward toward the box center.
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot place a leaf on an empty cloud")
    if alpha < 0.0 or aspect < 0.0 or t_leaf < 0.0:
        raise ValueError("alpha, aspect and t_leaf must be nonnegative")
    box = cloud.aabb()
    ctr = box.center()
    rng = np.random.default_rng(seed)
    axis, corner, normal = _FACE_CASES[int(rng.integers(0, 4))]
    center = ctr.copy()
    center[axis] = box.max[axis] if corner == "max" else box.min[axis]
    n = np.asarray(normal)
    ez = np.array([0.0, 0.0, 1.0])
    a1 = np.cross(ez, n)
    a1 /= np.linalg.norm(a1)
    a2 = np.cross(n, a1)
    a = alpha * box.diagonal()
    b = aspect * a
    if b > a:
        # relabel axes (90-degree in-plane rotation); the ellipse set is
        # unchanged and the frame stays right-handed
        a1, a2 = a2, -a1
        a, b = b, a
    return LeafSpec(center, n, a1, a2, a, b, t_leaf, alpha)


def apply_leaf(cloud, leaf):
    """Remove points inside the leaf's elliptical slab.

    A point at leaf-frame coordinates (u, v, d) is removed iff
    (u/a)^2 + (v/b)^2 <= 1 and |d| <= thickness. Degenerate ellipses
    (a = 0 or b = 0) remove nothing.
    """
    n_full = len(cloud)
    if n_full == 0 or leaf.semi_major == 0.0 or leaf.semi_minor == 0.0:
        return OcclusionOutcome(cloud, 0.0, leaf)
    rel = cloud.points - leaf.center
    u = rel @ leaf.a1
    v = rel @ leaf.a2
    d = rel @ leaf.normal
    footprint = (u / leaf.semi_major) ** 2 + (v / leaf.semi_minor) ** 2 <= 1.0
    removed = footprint & (np.abs(d) <= leaf.thickness)
    keep = ~removed
    nrm = cloud.normals[keep] if cloud.normals is not None else None
    occluded = PointCloud(cloud.points[keep], nrm)
    fraction = float(np.count_nonzero(removed)) / n_full
    return OcclusionOutcome(occluded, fraction, leaf)


def centroid_shift(full, occluded):
    """Centroid displacement normalized by the full cloud's Aabb diagonal."""
    if len(full) == 0 or len(occluded) == 0:
        raise EmptyCloud("centroid_shift needs two non-empty clouds")
    delta = float(np.linalg.norm(centroid(full) - centroid(occluded)))
    diag = full.aabb().diagonal()
    if diag == 0.0:
        return 0.0 if delta == 0.0 else math.inf
    return delta / diag
