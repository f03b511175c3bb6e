# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled clearance kernels.

Same contract as the numpy fallback ``_fallback``: squared-distance
comparisons throughout, so the prefiltered variant agrees with the naive
one exactly at the threshold.
"""

import numpy as np

cimport cython
from libc.math cimport INFINITY

NAME = "native"

DEF BOX_SLACK = 1e-12


cdef inline double _seg_d2(double px, double py, double pz,
                           double s0x, double s0y, double s0z,
                           double dx, double dy, double dz,
                           double l2) noexcept nogil:
    cdef double rx = px - s0x
    cdef double ry = py - s0y
    cdef double rz = pz - s0z
    cdef double t
    if l2 > 0.0:
        t = (rx * dx + ry * dy + rz * dz) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        rx -= t * dx
        ry -= t * dy
        rz -= t * dz
    return rx * rx + ry * ry + rz * rz


def min_jaw_distance_sq(points, a0, a1, b0, b1):
    """Min squared distance over all points to the nearer jaw segment."""
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[::1] pa0 = np.ascontiguousarray(a0, dtype=np.float64)
    cdef const double[::1] pa1 = np.ascontiguousarray(a1, dtype=np.float64)
    cdef const double[::1] pb0 = np.ascontiguousarray(b0, dtype=np.float64)
    cdef const double[::1] pb1 = np.ascontiguousarray(b1, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    if n == 0:
        return INFINITY
    cdef double dax = pa1[0] - pa0[0], day = pa1[1] - pa0[1], daz = pa1[2] - pa0[2]
    cdef double dbx = pb1[0] - pb0[0], dby = pb1[1] - pb0[1], dbz = pb1[2] - pb0[2]
    cdef double la = dax * dax + day * day + daz * daz
    cdef double lb = dbx * dbx + dby * dby + dbz * dbz
    cdef double best = INFINITY
    cdef double d2
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d2 = _seg_d2(pts[i, 0], pts[i, 1], pts[i, 2],
                         pa0[0], pa0[1], pa0[2], dax, day, daz, la)
            if d2 < best:
                best = d2
            d2 = _seg_d2(pts[i, 0], pts[i, 1], pts[i, 2],
                         pb0[0], pb0[1], pb0[2], dbx, dby, dbz, lb)
            if d2 < best:
                best = d2
    return best


def jaw_clearance_check(points, a0, a1, b0, b1, double tau):
    """Prefiltered clearance test; returns (passed, n_exact)."""
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[::1] pa0 = np.ascontiguousarray(a0, dtype=np.float64)
    cdef const double[::1] pa1 = np.ascontiguousarray(a1, dtype=np.float64)
    cdef const double[::1] pb0 = np.ascontiguousarray(b0, dtype=np.float64)
    cdef const double[::1] pb1 = np.ascontiguousarray(b1, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef double t2 = tau * tau
    cdef double pad = tau + BOX_SLACK
    cdef double alox = min(pa0[0], pa1[0]) - pad, ahix = max(pa0[0], pa1[0]) + pad
    cdef double aloy = min(pa0[1], pa1[1]) - pad, ahiy = max(pa0[1], pa1[1]) + pad
    cdef double aloz = min(pa0[2], pa1[2]) - pad, ahiz = max(pa0[2], pa1[2]) + pad
    cdef double blox = min(pb0[0], pb1[0]) - pad, bhix = max(pb0[0], pb1[0]) + pad
    cdef double bloy = min(pb0[1], pb1[1]) - pad, bhiy = max(pb0[1], pb1[1]) + pad
    cdef double bloz = min(pb0[2], pb1[2]) - pad, bhiz = max(pb0[2], pb1[2]) + pad
    cdef double dax = pa1[0] - pa0[0], day = pa1[1] - pa0[1], daz = pa1[2] - pa0[2]
    cdef double dbx = pb1[0] - pb0[0], dby = pb1[1] - pb0[1], dbz = pb1[2] - pb0[2]
    cdef double la = dax * dax + day * day + daz * daz
    cdef double lb = dbx * dbx + dby * dby + dbz * dbz
    cdef Py_ssize_t i, n_exact = 0
    cdef double px, py, pz
    cdef bint failed = False
    with nogil:
        for i in range(n):
            px = pts[i, 0]
            py = pts[i, 1]
            pz = pts[i, 2]
            if alox <= px <= ahix and aloy <= py <= ahiy and aloz <= pz <= ahiz:
                n_exact += 1
                if _seg_d2(px, py, pz, pa0[0], pa0[1], pa0[2],
                           dax, day, daz, la) <= t2:
                    failed = True
                    break
            if blox <= px <= bhix and bloy <= py <= bhiy and bloz <= pz <= bhiz:
                n_exact += 1
                if _seg_d2(px, py, pz, pb0[0], pb0[1], pb0[2],
                           dbx, dby, dbz, lb) <= t2:
                    failed = True
                    break
    return (not failed), int(n_exact)
