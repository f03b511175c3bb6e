"""Tests for the clearance kernels and backend selection."""

import os
import subprocess
import sys

import numpy as np
import pytest

from graspuq.kernels import BACKEND, available_backends, get_impl

_BACKENDS = available_backends()


def _impl(name):
    return get_impl(name)


def _seg_d2_scalar(p, s0, s1):
    d = s1 - s0
    l2 = float(d @ d)
    if l2 == 0.0:
        return float(((p - s0) ** 2).sum())
    t = min(1.0, max(0.0, float((p - s0) @ d) / l2))
    return float(((p - s0 - t * d) ** 2).sum())


def _oracle_min_d2(points, a0, a1, b0, b1):
    best = float("inf")
    for p in points:
        best = min(best, _seg_d2_scalar(p, a0, a1), _seg_d2_scalar(p, b0, b1))
    return best


def _random_scene(rng):
    pts = rng.uniform(-0.05, 0.05, size=(int(rng.integers(50, 300)), 3))
    segs = rng.uniform(-0.03, 0.03, size=(4, 3))
    tau = float(rng.uniform(0.001, 0.02))
    return pts, segs, tau


class TestBackendSelection:
    def test_both_backends_ship(self):
        assert _BACKENDS == ["numpy", "native"]

    @pytest.mark.skipif(bool(os.environ.get("GRASPUQ_BACKEND")),
                        reason="backend forced by environment")
    def test_native_preferred_by_default(self):
        assert BACKEND == "native"

    def test_get_impl(self):
        assert get_impl("numpy").NAME == "numpy"
        assert get_impl("native").NAME == "native"
        with pytest.raises(ValueError):
            get_impl("jit")

    @pytest.mark.parametrize("forced", ["numpy", "native"])
    def test_env_forces_backend(self, forced):
        env = dict(os.environ, GRASPUQ_BACKEND=forced)
        out = subprocess.run(
            [sys.executable, "-c",
             "from graspuq.kernels import BACKEND; print(BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == forced

    def test_unknown_env_backend_fails_import(self):
        env = dict(os.environ, GRASPUQ_BACKEND="jit")
        out = subprocess.run(
            [sys.executable, "-c", "import graspuq.kernels"],
            env=env, capture_output=True, text=True,
        )
        assert out.returncode != 0
        assert "unknown GRASPUQ_BACKEND" in out.stderr


@pytest.mark.parametrize("name", _BACKENDS)
class TestMinJawDistanceSq:
    def test_empty_cloud_is_infinite(self, name):
        empty = np.empty((0, 3))
        z = np.zeros(3)
        assert _impl(name).min_jaw_distance_sq(
            empty, z, [1, 0, 0], z, [0, 1, 0]) == float("inf")

    def test_hand_case(self, name):
        pts = np.array([[0.0, 0.0, 1.0]])
        d2 = _impl(name).min_jaw_distance_sq(
            pts, [-1.0, 0, 0], [1.0, 0, 0], [0.0, 0, 5.0], [0.0, 1.0, 5.0])
        assert d2 == 1.0

    def test_endpoint_clamp(self, name):
        pts = np.array([[2.0, 0.0, 0.0]])
        d2 = _impl(name).min_jaw_distance_sq(
            pts, [0.0, 0, 0], [1.0, 0, 0], [0.0, 0, 0], [1.0, 0, 0])
        assert d2 == 1.0

    def test_zero_length_segment(self, name):
        pts = np.array([[1.0, 1.0, 3.0]])
        s = np.array([1.0, 1.0, 1.0])
        assert _impl(name).min_jaw_distance_sq(pts, s, s, s, s) == 4.0

    def test_matches_scalar_oracle(self, name):
        rng = np.random.default_rng(17)
        impl = _impl(name)
        for _ in range(30):
            pts, segs, _ = _random_scene(rng)
            got = impl.min_jaw_distance_sq(pts, *segs)
            assert got == pytest.approx(_oracle_min_d2(pts, *segs),
                                        abs=1e-12)


@pytest.mark.parametrize("name", _BACKENDS)
class TestJawClearanceCheck:
    def test_exact_threshold_rejects(self, name):
        # squared distance equals tau^2 bitwise: clearance demands
        # strictly greater, so this must fail in both variants
        tau = 0.005
        segs = (np.array([0.0, 0, 0]), np.array([0.0, 0, -0.2]),
                np.array([0.04, 0, 0]), np.array([0.04, 0, -0.2]))
        pts = np.array([[0.005, 0.0, -0.1]])
        impl = _impl(name)
        assert impl.min_jaw_distance_sq(pts, *segs) == tau * tau
        passed, n_exact = impl.jaw_clearance_check(pts, *segs, tau)
        assert not passed
        assert n_exact >= 1

    def test_just_outside_threshold_passes(self, name):
        tau = 0.005
        segs = (np.array([0.0, 0, 0]), np.array([0.0, 0, -0.2]),
                np.array([0.04, 0, 0]), np.array([0.04, 0, -0.2]))
        pts = np.array([[np.nextafter(0.005, 1.0), 0.0, -0.1]])
        passed, n_exact = _impl(name).jaw_clearance_check(pts, *segs, tau)
        assert passed
        assert n_exact == 1

    def test_empty_cloud_passes(self, name):
        z = np.zeros(3)
        passed, n_exact = _impl(name).jaw_clearance_check(
            np.empty((0, 3)), z, [0, 0, -0.2], [0.04, 0, 0],
            [0.04, 0, -0.2], 0.005)
        assert passed and n_exact == 0

    def test_far_points_skip_exact_evaluation(self, name):
        pts = np.array([[1.0, 1.0, 1.0], [-1.0, 0.5, 2.0]])
        z = np.zeros(3)
        passed, n_exact = _impl(name).jaw_clearance_check(
            pts, z, [0, 0, -0.2], [0.04, 0, 0], [0.04, 0, -0.2], 0.005)
        assert passed and n_exact == 0

    def test_early_exit_counts_one_evaluation(self, name):
        # the violating point sits first and inside only the first jaw's
        # padded box, so both variants stop after a single exact test
        segs = (np.array([0.0, 0, 0]), np.array([0.0, 0, -0.2]),
                np.array([0.2, 0, 0]), np.array([0.2, 0, -0.2]))
        pts = np.vstack([[0.001, 0.0, -0.1],
                         np.tile([0.199, 0.0, -0.05], (5, 1))])
        passed, n_exact = _impl(name).jaw_clearance_check(pts, *segs, 0.005)
        assert not passed
        assert n_exact == 1

    def test_agrees_with_naive_verdict(self, name):
        rng = np.random.default_rng(29)
        impl = _impl(name)
        seen = set()
        for _ in range(200):
            pts, segs, tau = _random_scene(rng)
            naive = impl.min_jaw_distance_sq(pts, *segs) > tau * tau
            fast, _ = impl.jaw_clearance_check(pts, *segs, tau)
            assert fast == naive
            seen.add(fast)
        assert seen == {True, False}

    def test_tau_monotone(self, name):
        rng = np.random.default_rng(31)
        impl = _impl(name)
        for _ in range(50):
            pts, segs, _ = _random_scene(rng)
            verdicts = [impl.jaw_clearance_check(pts, *segs, tau)[0]
                        for tau in (0.001, 0.005, 0.02)]
            # once a jaw is too close it stays too close as tau grows
            assert sorted(verdicts, reverse=True) == verdicts


class TestBackendAgreement:
    def test_distances_verdicts_and_pass_counts(self):
        fb, nat = get_impl("numpy"), get_impl("native")
        rng = np.random.default_rng(7)
        for _ in range(100):
            pts, segs, tau = _random_scene(rng)
            d_f = fb.min_jaw_distance_sq(pts, *segs)
            d_n = nat.min_jaw_distance_sq(pts, *segs)
            assert d_f == pytest.approx(d_n, abs=1e-15)
            v_f, c_f = fb.jaw_clearance_check(pts, *segs, tau)
            v_n, c_n = nat.jaw_clearance_check(pts, *segs, tau)
            assert v_f == v_n
            if v_f:
                # without an early exit both variants measure exactly the
                # points inside the padded boxes
                assert c_f == c_n
