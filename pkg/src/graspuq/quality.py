"""Force-closure quality: contacts, friction cones, wrench sets, epsilon.

Epsilon is the radius of the largest origin-centered ball inside the
convex hull of the contact wrenches (6D force-torque space); it is zero
whenever the origin is not strictly interior. A direction-sampling oracle
provides an independent estimate through the support function, used to
cross-check the hull path.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .cloud import centroid
from .errors import EmptyCloud, MissingNormals, NoContact

__all__ = [
    "ContactPair",
    "EpsilonResult",
    "WrenchSet",
    "epsilon_hull",
    "epsilon_sampled",
    "estimate_contacts",
    "friction_cone",
    "merge_wrench_sets",
    "sample_epsilon",
    "torque_scale",
    "wrench_matrix",
]

_UNIT_TOL = 1e-9
_INTERIOR_TOL = 1e-10


@dataclass
class ContactPair:
    """Two contact points (relative to the object centroid) with unit
    inward surface normals."""

    c_left: np.ndarray
    c_right: np.ndarray
    n_left: np.ndarray
    n_right: np.ndarray

    def __post_init__(self):
        self.c_left = np.asarray(self.c_left, dtype=np.float64).reshape(3)
        self.c_right = np.asarray(self.c_right, dtype=np.float64).reshape(3)
        self.n_left = np.asarray(self.n_left, dtype=np.float64).reshape(3)
        self.n_right = np.asarray(self.n_right, dtype=np.float64).reshape(3)
        for v in (self.n_left, self.n_right):
            if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
                raise ValueError("contact normals must be unit length")


@dataclass
class WrenchSet:
    """Columns of the grasp wrench matrix: [force; torque / lambda]."""

    columns: np.ndarray  # (m, 6)
    lam: float
    n_dir: int

    def __post_init__(self):
        self.columns = np.asarray(self.columns, dtype=np.float64).reshape(-1, 6)
        if self.lam <= 0.0:
            raise ValueError("lambda must be positive")
        if self.columns.shape[0]:
            f_norms = np.linalg.norm(self.columns[:, :3], axis=1)
            if np.max(np.abs(f_norms - 1.0)) > _UNIT_TOL:
                raise ValueError("force sub-vectors must be unit length")
        self.columns.setflags(write=False)


@dataclass
class EpsilonResult:
    epsilon: float
    origin_interior: bool
    facet_count: int
    lam: float
    n_dir: int

    def to_json_dict(self):
        return {
            "epsilon": self.epsilon,
            "origin_interior": self.origin_interior,
            "facet_count": self.facet_count,
            "lambda": self.lam,
            "n_dir": self.n_dir,
        }


def torque_scale(cloud):
    """Normalization length lambda: max distance from centroid to a point."""
    if len(cloud) == 0:
        raise EmptyCloud("torque scale of an empty cloud")
    return float(np.linalg.norm(cloud.points - centroid(cloud), axis=1).max())


def estimate_contacts(g, cloud, cfg, step=0.001, contact_radius=None):
    """March each jaw-tip ray along the approach to find its contact.

    Each jaw ray starts at c -/+ (w/2) x and advances along the approach
    in `step` increments over jaw_len_range; the contact is the cloud
    point nearest the ray at the march position of closest approach
    (first attainment on ties). If that closest approach still exceeds
    the contact radius, the jaw never reaches the surface and NoContact
    is raised. The default radius is half the jaw width: the frontier a
    closing jaw sweeps. Contacts are re-expressed relative to the cloud
    centroid; normals flip to point into the grasp (toward the other jaw).
    """
    if cloud.normals is None:
        raise MissingNormals("contact estimation needs per-point normals")
    if len(cloud) == 0:
        raise NoContact("no surface points")
    if step <= 0.0:
        raise ValueError("step must be positive")
    r_c = 0.5 * cfg.jaw_width if contact_radius is None else float(contact_radius)
    lo, hi = cfg.jaw_len_range
    ts = np.arange(lo, hi + 0.5 * step, step)
    tree = cloud.kdtree()
    cen = centroid(cloud)
    half = 0.5 * cfg.jaw_width
    results = []
    for sign in (-1.0, 1.0):
        origin = g.center + sign * half * g.x_axis
        ray = origin[None, :] + ts[:, None] * g.approach[None, :]
        dist, idx = tree.query(ray)
        best = int(np.argmin(dist))
        if dist[best] > r_c:
            side = "left" if sign < 0 else "right"
            raise NoContact(f"{side} jaw ray never reaches the surface")
        j = int(idx[best])
        point = cloud.points[j] - cen
        normal = cloud.normals[j].copy()
        inward = -sign * g.x_axis
        if float(normal @ inward) < 0.0:
            normal = -normal
        results.append((point, normal))
    (c_left, n_left), (c_right, n_right) = results
    return ContactPair(c_left, c_right, n_left, n_right)


def friction_cone(n, mu, n_dir):
    """Discretize the friction cone at a contact into n_dir unit edges.

    Edges sit at angle arctan(mu) from the normal, equally spaced in
    azimuth (inscribed, hence conservative, approximation).
    """
    n = np.asarray(n, dtype=np.float64).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > _UNIT_TOL:
        raise ValueError("normal must be unit length")
    if n_dir < 3:
        raise ValueError("n_dir must be at least 3")
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    # tangent basis: cross against the axis least aligned with n
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(n)))] = 1.0
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    phi = 2.0 * np.pi * np.arange(n_dir) / n_dir
    tang = np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v
    edges = (n + mu * tang) / np.sqrt(1.0 + mu * mu)
    return edges


def wrench_matrix(contacts, mu, n_dir, lam):
    """Build the wrench set of a contact pair: 2*n_dir columns of
    [F_j; (c_j x F_j) / lambda]."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    cols = []
    for c, n in ((contacts.c_left, contacts.n_left),
                 (contacts.c_right, contacts.n_right)):
        forces = friction_cone(n, mu, n_dir)
        torques = np.cross(np.broadcast_to(c, forces.shape), forces) / lam
        cols.append(np.hstack((forces, torques)))
    return WrenchSet(np.vstack(cols), float(lam), int(n_dir))


def merge_wrench_sets(sets):
    """Pool wrench columns across contact pairs (same lambda and n_dir)."""
    sets = list(sets)
    if not sets:
        raise ValueError("nothing to merge")
    lam = sets[0].lam
    n_dir = sets[0].n_dir
    for s in sets[1:]:
        if s.lam != lam or s.n_dir != n_dir:
            raise ValueError("wrench sets disagree on lambda or n_dir")
    return WrenchSet(np.vstack([s.columns for s in sets]), lam, n_dir)


def _wrench_columns(w):
    """Accept a WrenchSet or a raw (m, 6) array of wrench columns; raw
    input reports lambda = 1 and n_dir = 0."""
    if hasattr(w, "columns"):
        return w.columns, w.lam, w.n_dir
    return np.asarray(w, dtype=np.float64).reshape(-1, 6), 1.0, 0


def epsilon_hull(wrench_set):
    """Exact epsilon via the 6D convex hull of the wrench columns.

    epsilon = min over facets (a_j, b_j) of |b_j| / ||a_j||, valid when
    the origin is strictly interior; rank-deficient column sets, hull
    failures, and non-interior origins all report epsilon = 0 with
    origin_interior False instead of raising. Takes a WrenchSet or a raw
    (m, 6) column array.
    """
    raw_cols, lam, n_dir = _wrench_columns(wrench_set)
    # the hull is invariant under duplicated columns; drop them up front
    # because pooled sets repeat contacts heavily
    cols = np.unique(raw_cols, axis=0)
    degenerate = EpsilonResult(0.0, False, 0, lam, n_dir)
    if cols.shape[0] < 7:
        return degenerate
    if np.linalg.matrix_rank(cols - cols.mean(axis=0)) < 6:
        return degenerate
    try:
        hull = ConvexHull(cols)
    except QhullError:
        return degenerate
    a = hull.equations[:, :6]
    b = hull.equations[:, 6]
    if np.max(b) > -_INTERIOR_TOL:
        # origin on or outside the hull boundary
        return EpsilonResult(0.0, False, int(hull.equations.shape[0]),
                             lam, n_dir)
    eps = float(np.min(np.abs(b) / np.linalg.norm(a, axis=1)))
    return EpsilonResult(eps, True, int(hull.equations.shape[0]),
                         lam, n_dir)


def epsilon_sampled(wrench_set, n_samples, seed=0):
    """Support-function oracle for epsilon.

    Estimates min over unit directions u of max_j u . w_j using seeded
    uniform directions, floored at zero. Converges to epsilon from above
    as n_samples grows when the origin is interior; sample sets are
    nested under a fixed seed, so the estimate is monotone nonincreasing
    in n_samples. Takes a WrenchSet or a raw (m, 6) column array.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    cols, _, _ = _wrench_columns(wrench_set)
    if cols.shape[0] == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n_samples, 6))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0.0] = 1.0
    dirs /= norms[:, None]
    best = np.inf
    chunk = 8192
    wt = cols.T  # (6, m)
    for start in range(0, n_samples, chunk):
        support = (dirs[start:start + chunk] @ wt).max(axis=1)
        low = float(support.min())
        if low < best:
            best = low
    return max(0.0, best)


def sample_epsilon(survivors, cloud, cfg, mu, n_dir, lam=None, mode="union",
                   step=0.001, contact_radius=None):
    """Per-sample epsilon from the surviving grasps of one completion.

    Default 'union' mode pools every surviving grasp's contact pair into
    one wrench set (feasibility of the sample's whole candidate set);
    'best' mode takes the max per-grasp epsilon instead. Returns 0 when
    there are no survivors or every contact estimation fails.
    """
    if mode not in ("union", "best"):
        raise ValueError(f"unknown sample_epsilon mode {mode!r}")
    if not survivors:
        return 0.0
    if lam is None:
        lam = torque_scale(cloud)
    sets = []
    seen = set()
    for g in survivors:
        try:
            pair = estimate_contacts(g, cloud, cfg, step=step,
                                     contact_radius=contact_radius)
        except NoContact:
            continue
        # different grasps often hit identical contact pairs; the pooled
        # hull is unchanged by repeats, so build each wrench set once
        key = (pair.c_left.tobytes(), pair.c_right.tobytes(),
               pair.n_left.tobytes(), pair.n_right.tobytes())
        if key in seen:
            continue
        seen.add(key)
        sets.append(wrench_matrix(pair, mu, n_dir, lam))
    if not sets:
        return 0.0
    if mode == "union":
        return epsilon_hull(merge_wrench_sets(sets)).epsilon
    return max(epsilon_hull(s).epsilon for s in sets)
