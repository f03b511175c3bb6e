"""Point-cloud container, cleaning, statistics, and neighbor queries.

All containers are immutable after construction (array buffers are marked
read-only) and safe to share across threads; the KD-tree index is built
lazily once per cloud and queried concurrently.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyCloud, TooFewPoints

__all__ = [
    "Aabb",
    "PointCloud",
    "centroid",
    "clean",
    "crop",
    "estimate_normals",
    "knn",
]

_UNIT_TOL = 1e-9


def _as_points(arr, name="points"):
    out = np.asarray(arr, dtype=np.float64)
    if out.size == 0:
        out = out.reshape(0, 3)
    if out.ndim != 2 or out.shape[1] != 3:
        raise ValueError(f"{name} must have shape (N, 3), got {out.shape}")
    return np.ascontiguousarray(out)


@dataclass
class Aabb:
    """Axis-aligned bounding box with componentwise min <= max."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        self.min = np.asarray(self.min, dtype=np.float64).reshape(3)
        self.max = np.asarray(self.max, dtype=np.float64).reshape(3)
        if np.any(self.min > self.max):
            raise ValueError("Aabb requires min <= max componentwise")
        self.min.setflags(write=False)
        self.max.setflags(write=False)

    @classmethod
    def of_points(cls, points):
        points = _as_points(points)
        if points.shape[0] == 0:
            raise EmptyCloud("cannot bound an empty point set")
        return cls(points.min(axis=0), points.max(axis=0))

    def diagonal(self):
        """Euclidean length of the box diagonal."""
        return float(np.linalg.norm(self.max - self.min))

    def center(self):
        return 0.5 * (self.min + self.max)

    def contains(self, points):
        """Boolean mask of points inside the box (boundary inclusive)."""
        pts = _as_points(points)
        return np.all((pts >= self.min) & (pts <= self.max), axis=1)

    def expanded(self, pad):
        return Aabb(self.min - pad, self.max + pad)


@dataclass
class PointCloud:
    """Ordered 3D points in meters with optional unit normals."""

    points: np.ndarray
    normals: np.ndarray | None = None
    _tree: cKDTree | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.points = _as_points(self.points)
        self.points.setflags(write=False)
        if self.normals is not None:
            nrm = _as_points(self.normals, "normals")
            if nrm.shape[0] != self.points.shape[0]:
                raise ValueError("normals must match points in length")
            if nrm.shape[0]:
                lens = np.linalg.norm(nrm, axis=1)
                if np.max(np.abs(lens - 1.0)) > _UNIT_TOL:
                    raise ValueError("normals must be unit length")
            nrm.setflags(write=False)
            self.normals = nrm

    def __len__(self):
        return int(self.points.shape[0])

    def aabb(self):
        return Aabb.of_points(self.points)

    def kdtree(self):
        """Lazily built KD-tree over the points (cached, shareable)."""
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def with_normals(self, normals):
        return PointCloud(self.points, normals)

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)):
        """Rigidly transformed copy; normals co-rotate."""
        rot = np.asarray(rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(translation, dtype=np.float64).reshape(3)
        pts = self.points @ rot.T + t
        nrm = self.normals @ rot.T if self.normals is not None else None
        return PointCloud(pts, nrm)


def centroid(cloud):
    """Arithmetic mean of the points."""
    if len(cloud) == 0:
        raise EmptyCloud("centroid of an empty cloud")
    return cloud.points.mean(axis=0)


def clean(cloud):
    """Drop non-finite points and per-axis 3-sigma outliers.

    A point survives iff it is finite on all axes and, on every axis, its
    deviation from that axis's median is at most three population standard
    deviations (both statistics taken over the finite points). Order is
    preserved; normals follow their points.

    The single-pass filter is not idempotent for adversarial inputs whose
    statistics shift after removal; for the unimodal clouds this package
    handles, a second pass removes nothing.
    """
    pts = cloud.points
    finite = np.all(np.isfinite(pts), axis=1)
    kept = pts[finite]
    if kept.shape[0] == 0:
        return PointCloud(np.empty((0, 3)))
    med = np.median(kept, axis=0)
    std = kept.std(axis=0)  # population form; immaterial at the sizes used
    ok = np.all(np.abs(kept - med) <= 3.0 * std, axis=1)
    mask = finite.copy()
    mask[finite] = ok
    nrm = cloud.normals[mask] if cloud.normals is not None else None
    return PointCloud(pts[mask], nrm)


def estimate_normals(cloud, k):
    """Attach unit normals from local PCA over k nearest neighbors.

    The normal of a point is the eigenvector of smallest eigenvalue of its
    neighborhood covariance, sign-flipped to point away from the cloud
    centroid.
    """
    n = len(cloud)
    if k < 3:
        raise TooFewPoints("normal estimation needs k >= 3")
    if n < k:
        raise TooFewPoints(f"cloud has {n} points, needs at least k={k}")
    pts = cloud.points
    _, idx = cloud.kdtree().query(pts, k=k)
    nbrs = pts[idx]  # (n, k, 3)
    centered = nbrs - nbrs.mean(axis=1, keepdims=True)
    cov = np.einsum("nki,nkj->nij", centered, centered) / k
    _, vecs = np.linalg.eigh(cov)
    normals = vecs[:, :, 0]
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    outward = pts - pts.mean(axis=0)
    flip = np.einsum("ij,ij->i", normals, outward) < 0.0
    normals[flip] *= -1.0
    return cloud.with_normals(normals)


def knn(cloud, query, k):
    """Indices of the k nearest points to a query, ties broken by lower index."""
    n = len(cloud)
    if k > n:
        raise TooFewPoints(f"k={k} exceeds cloud size {n}")
    if k <= 0:
        return np.empty(0, dtype=np.intp)
    q = np.asarray(query, dtype=np.float64).reshape(3)
    tree = cloud.kdtree()
    kk = min(n, k + 8)
    while True:
        dist, idx = tree.query(q, k=kk)
        dist = np.atleast_1d(dist)
        idx = np.atleast_1d(idx)
        # fetch more while the kth distance still ties the last one fetched
        if kk == n or dist[k - 1] < dist[-1]:
            break
        kk = min(n, kk * 2)
    order = np.lexsort((idx, dist))
    return idx[order[:k]].astype(np.intp)


def crop(cloud, box):
    """Points of the cloud inside an Aabb (boundary inclusive)."""
    if len(cloud) == 0:
        return cloud
    mask = box.contains(cloud.points)
    nrm = cloud.normals[mask] if cloud.normals is not None else None
    return PointCloud(cloud.points[mask], nrm)
