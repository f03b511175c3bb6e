"""Antipodal grasp candidate generation with confidence scores.

Stands in for a learned grasp generator behind the same interface: a
seeded heuristic samples surface point pairs whose normals oppose along
the connecting axis within the friction half-angle, builds a right-handed
grasp frame per pair, and scores by normal opposition.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import MissingNormals

__all__ = ["GraspPose", "generate_grasps", "grasps_from_csv", "grasps_to_csv"]

_ORTHO_TOL = 1e-9


@dataclass
class GraspPose:
    """Rigid grasp frame and confidence score.

    Rotation columns: x = jaw-opening axis, y = minor axis, z = approach.
    """

    rotation: np.ndarray
    center: np.ndarray
    score: float

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        self.center = np.asarray(self.center, dtype=np.float64).reshape(3)
        err = self.rotation.T @ self.rotation - np.eye(3)
        if np.max(np.abs(err)) > _ORTHO_TOL:
            raise ValueError("rotation must be orthonormal")
        if abs(np.linalg.det(self.rotation) - 1.0) > _ORTHO_TOL:
            raise ValueError("rotation must be right-handed (det = +1)")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score}")
        self.rotation.setflags(write=False)
        self.center.setflags(write=False)

    @property
    def x_axis(self):
        return self.rotation[:, 0]

    @property
    def y_axis(self):
        return self.rotation[:, 1]

    @property
    def approach(self):
        return self.rotation[:, 2]

    def to_row(self):
        """13 floats: 9 rotation entries row-major, 3 center, score."""
        return [*self.rotation.reshape(-1).tolist(), *self.center.tolist(), float(self.score)]

    @classmethod
    def from_row(cls, row):
        vals = [float(v) for v in row]
        if len(vals) != 13:
            raise ValueError(f"grasp row needs 13 values, got {len(vals)}")
        return cls(np.asarray(vals[:9]).reshape(3, 3), np.asarray(vals[9:12]), vals[12])

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)):
        rot = np.asarray(rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(translation, dtype=np.float64).reshape(3)
        return replace(
            self, rotation=rot @ self.rotation, center=rot @ self.center + t
        )

    def with_center(self, center):
        return replace(self, center=np.asarray(center, dtype=np.float64))


def grasps_to_csv(grasps, path):
    """Write grasps as CSV rows: 12 rotation entries, 3 center, score."""
    header = ",".join(
        [f"r{i}{j}" for i in range(3) for j in range(3)] + ["cx", "cy", "cz", "score"]
    )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for g in grasps:
            fh.write(",".join(repr(v) for v in g.to_row()) + "\n")


def grasps_from_csv(path):
    grasps = []
    with open(path, "r", encoding="ascii") as fh:
        next(fh)  # header
        for line in fh:
            if line.strip():
                grasps.append(GraspPose.from_row(line.strip().split(",")))
    return grasps


def generate_grasps(cloud, M, w_max=0.04, mu=0.5, seed=0,
                    front=(0.0, 0.0, -1.0), t_back=0.04):
    """Sample up to M antipodal grasps from a cloud with normals.

    Rejection-samples point pairs (p, q) with 0 < ||p - q|| <= w_max whose
    outward normals oppose the jaw axis within arctan(mu), capping the
    attempt budget at 50*M. For an accepted pair: x = (q - p)/||q - p||,
    the approach a maximizes alignment with `front` among directions
    orthogonal to x, y = a cross x, and the center backs off the pair
    midpoint by t_back along a. Scores are the mean opposition cosines,
    clamped to [0, 1]; output is sorted by score descending with ties kept
    in generation order.
    """
    if cloud.normals is None:
        raise MissingNormals("grasp generation needs per-point normals")
    if M < 0:
        raise ValueError("M must be nonnegative")
    n = len(cloud)
    if n < 2 or M == 0:
        return []
    f = np.asarray(front, dtype=np.float64).reshape(3)
    f_norm = np.linalg.norm(f)
    if f_norm == 0.0:
        raise ValueError("front direction must be nonzero")
    f = f / f_norm
    cos_lim = 1.0 / np.sqrt(1.0 + mu * mu)  # cos(arctan(mu))

    rng = np.random.default_rng(seed)
    cap = 50 * M
    ii = rng.integers(0, n, size=cap)
    jj = rng.integers(0, n, size=cap)
    pts = cloud.points
    nrm = cloud.normals

    p = pts[ii]
    q = pts[jj]
    dvec = q - p
    dist = np.linalg.norm(dvec, axis=1)
    ok = (ii != jj) & (dist > 0.0) & (dist <= w_max)
    safe = np.where(dist > 0.0, dist, 1.0)
    x = dvec / safe[:, None]
    cos_p = -np.einsum("ij,ij->i", nrm[ii], x)
    cos_q = np.einsum("ij,ij->i", nrm[jj], x)
    ok &= (cos_p >= cos_lim) & (cos_q >= cos_lim)
    # approach must be well-defined: reject pairs with x parallel to front
    fx = x @ f
    w = f - fx[:, None] * x
    w_len = np.linalg.norm(w, axis=1)
    ok &= w_len > 1e-9

    grasps = []
    for t in np.flatnonzero(ok):
        if len(grasps) >= M:
            break
        xa = x[t]
        a = w[t] / w_len[t]
        y = np.cross(a, xa)
        rot = np.column_stack((xa, y, a))
        c = 0.5 * (p[t] + q[t]) - t_back * a
        score = min(1.0, max(0.0, 0.5 * (cos_p[t] + cos_q[t])))
        grasps.append(GraspPose(rot, c, score))
    order = np.argsort([-g.score for g in grasps], kind="stable")
    return [grasps[i] for i in order]
