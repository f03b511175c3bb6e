"""Pure-numpy clearance kernels.

Drop-in twin of the compiled module ``_native``. Both backends expose:

* ``min_jaw_distance_sq``: squared distance from a cloud to the nearer of
  two jaw segments, evaluated for every point (no shortcuts).
* ``jaw_clearance_check``: the accelerated variant with an axis-aligned
  padded-box prefilter and early exit, returning the pass verdict and the
  number of exact point evaluations performed.

Verdicts are decided on squared distances in both variants so the fast
path can never disagree with the naive one at the threshold.
"""

import numpy as np

NAME = "numpy"

# Absolute slack added to the prefilter pad. Extra candidates are harmless
# (the exact test decides); dropped candidates would not be.
_BOX_SLACK = 1e-12


def _point_seg_d2(points, s0, s1):
    """Squared distance from each point to segment [s0, s1]."""
    d = s1 - s0
    l2 = float(d @ d)
    r = points - s0
    if l2 > 0.0:
        t = np.clip(r @ d / l2, 0.0, 1.0)
        r = r - t[:, None] * d
    return np.einsum("ij,ij->i", r, r)


def min_jaw_distance_sq(points, a0, a1, b0, b1):
    """Min squared distance over all points to the nearer jaw segment.

    Every point is evaluated against both segments. Returns ``inf`` for an
    empty cloud.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        return float("inf")
    da = _point_seg_d2(points, np.asarray(a0, float), np.asarray(a1, float))
    db = _point_seg_d2(points, np.asarray(b0, float), np.asarray(b1, float))
    return float(min(da.min(), db.min()))


def jaw_clearance_check(points, a0, a1, b0, b1, tau):
    """Prefiltered clearance test.

    Returns ``(passed, n_exact)`` where ``passed`` is True iff every point
    is farther than ``tau`` from both segments, and ``n_exact`` counts the
    points that survived the padded-box prefilter and were measured
    exactly. Exits at the first violation found.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    tau = float(tau)
    t2 = tau * tau
    pad = tau + _BOX_SLACK
    n_exact = 0
    for s0, s1 in ((a0, a1), (b0, b1)):
        s0 = np.asarray(s0, float)
        s1 = np.asarray(s1, float)
        lo = np.minimum(s0, s1) - pad
        hi = np.maximum(s0, s1) + pad
        if points.shape[0] == 0:
            continue
        idx = np.flatnonzero((points[:, 0] >= lo[0]) & (points[:, 0] <= hi[0]))
        if idx.size:
            sub = points[idx]
            keep = (
                (sub[:, 1] >= lo[1])
                & (sub[:, 1] <= hi[1])
                & (sub[:, 2] >= lo[2])
                & (sub[:, 2] <= hi[2])
            )
            idx = idx[keep]
        if idx.size:
            n_exact += int(idx.size)
            if _point_seg_d2(points[idx], s0, s1).min() <= t2:
                return False, n_exact
    return True, n_exact
