"""Tests for antipodal grasp generation and the grasp pose type."""

import numpy as np
import pytest

from graspuq.cloud import PointCloud
from graspuq.errors import MissingNormals
from graspuq.generation import (
    GraspPose,
    generate_grasps,
    grasps_from_csv,
    grasps_to_csv,
)

FRONT = np.array([0.0, 0.0, -1.0])


def _sphere_with_normals(n, radius, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return PointCloud(radius * u, normals=u)


def _two_point_cloud():
    pts = np.array([[0.0, 0.0, 0.0], [0.03, 0.0, 0.0]])
    nrm = np.array([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    return PointCloud(pts, normals=nrm)


class TestGraspPose:
    def test_axes_are_rotation_columns(self):
        rot = np.eye(3)
        g = GraspPose(rot, np.zeros(3), 0.5)
        np.testing.assert_array_equal(g.x_axis, [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(g.y_axis, [0.0, 1.0, 0.0])
        np.testing.assert_array_equal(g.approach, [0.0, 0.0, 1.0])

    def test_non_orthonormal_rejected(self):
        bad = np.eye(3)
        bad = bad * 1.1
        with pytest.raises(ValueError):
            GraspPose(bad, np.zeros(3), 0.5)

    def test_reflection_rejected(self):
        flip = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError):
            GraspPose(flip, np.zeros(3), 0.5)

    def test_score_range_enforced(self):
        with pytest.raises(ValueError):
            GraspPose(np.eye(3), np.zeros(3), 1.5)
        with pytest.raises(ValueError):
            GraspPose(np.eye(3), np.zeros(3), -0.1)

    def test_fields_read_only(self):
        g = GraspPose(np.eye(3), np.zeros(3), 0.5)
        with pytest.raises(ValueError):
            g.rotation[0, 0] = 2.0
        with pytest.raises(ValueError):
            g.center[0] = 2.0

    def test_row_round_trip_bitwise(self):
        ang = 0.3
        rot = np.array(
            [
                [np.cos(ang), -np.sin(ang), 0.0],
                [np.sin(ang), np.cos(ang), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        g = GraspPose(rot, np.array([0.1, -0.2, 0.3]), 0.77)
        back = GraspPose.from_row(g.to_row())
        np.testing.assert_array_equal(back.rotation, g.rotation)
        np.testing.assert_array_equal(back.center, g.center)
        assert back.score == g.score

    def test_from_row_length_checked(self):
        with pytest.raises(ValueError):
            GraspPose.from_row([0.0] * 12)

    def test_transformed_composes(self):
        g = GraspPose(np.eye(3), np.array([1.0, 0.0, 0.0]), 0.5)
        rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        out = g.transformed(rot, (0.0, 0.0, 2.0))
        np.testing.assert_allclose(out.rotation, rot, atol=1e-15)
        np.testing.assert_allclose(out.center, [0.0, 1.0, 2.0], atol=1e-15)
        assert out.score == g.score

    def test_with_center(self):
        g = GraspPose(np.eye(3), np.zeros(3), 0.5)
        out = g.with_center([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(out.center, [0.1, 0.2, 0.3])
        np.testing.assert_array_equal(out.rotation, g.rotation)


class TestGenerateGrasps:
    def test_missing_normals(self):
        cloud = PointCloud(np.zeros((5, 3)) + np.arange(5)[:, None])
        with pytest.raises(MissingNormals):
            generate_grasps(cloud, 4)

    def test_single_point_empty(self):
        cloud = PointCloud(np.zeros((1, 3)), normals=np.array([[0.0, 0.0, 1.0]]))
        assert generate_grasps(cloud, 4) == []

    def test_m_zero_empty(self):
        assert generate_grasps(_two_point_cloud(), 0) == []

    def test_m_negative_rejected(self):
        with pytest.raises(ValueError):
            generate_grasps(_two_point_cloud(), -1)

    def test_zero_front_rejected(self):
        with pytest.raises(ValueError):
            generate_grasps(_two_point_cloud(), 4, front=(0.0, 0.0, 0.0))

    def test_two_point_hand_case(self):
        """A perfectly opposed pair 0.03 m apart: jaw axis along the pair,
        approach equal to the front direction, center backed off the
        midpoint by t_back, and a perfect opposition score of 1."""
        grasps = generate_grasps(_two_point_cloud(), 1, w_max=0.04, mu=0.5,
                                 seed=0, t_back=0.04)
        assert len(grasps) == 1
        g = grasps[0]
        assert g.score == 1.0
        np.testing.assert_allclose(np.abs(g.x_axis), [1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(g.approach, FRONT, atol=1e-15)
        np.testing.assert_allclose(g.center, [0.015, 0.0, 0.04], atol=1e-15)

    def test_pair_beyond_jaw_width_rejected(self):
        grasps = generate_grasps(_two_point_cloud(), 8, w_max=0.02)
        assert grasps == []

    def test_jaw_axis_parallel_to_front_rejected(self):
        """When the only valid jaw axis is parallel to the front direction
        the approach frame is undefined and the pair is skipped."""
        pts = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.03]])
        nrm = np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 1.0]])
        cloud = PointCloud(pts, normals=nrm)
        assert generate_grasps(cloud, 8) == []

    def test_sphere_grasp_geometry(self):
        """On a sphere with outward normals every accepted grasp is near
        diametral: the opposition score is at least cos(arctan(mu)) and the
        pair midpoint (center + t_back * approach) stays within
        cos(arctan(mu)) radii of the sphere center."""
        mu = 0.5
        radius = 0.02
        cloud = _sphere_with_normals(400, radius, seed=1)
        grasps = generate_grasps(cloud, 50, w_max=2.5 * radius, mu=mu,
                                 seed=2, t_back=0.04)
        assert len(grasps) == 50
        cos_lim = 1.0 / np.sqrt(1.0 + mu * mu)
        for g in grasps:
            assert cos_lim - 1e-9 <= g.score <= 1.0
            midpoint = g.center + 0.04 * g.approach
            assert np.linalg.norm(midpoint) <= radius * cos_lim + 1e-9

    def test_frames_orthonormal_and_approach_front_aligned(self):
        """The approach is the front direction projected off the jaw axis."""
        cloud = _sphere_with_normals(300, 0.02, seed=3)
        front = np.array([0.3, -0.5, -0.8])
        grasps = generate_grasps(cloud, 30, w_max=0.05, seed=4, front=front)
        assert grasps
        f = front / np.linalg.norm(front)
        for g in grasps:
            err = g.rotation.T @ g.rotation - np.eye(3)
            assert np.max(np.abs(err)) < 1e-9
            assert np.linalg.det(g.rotation) == pytest.approx(1.0, abs=1e-9)
            proj = f - (f @ g.x_axis) * g.x_axis
            np.testing.assert_allclose(
                g.approach, proj / np.linalg.norm(proj), atol=1e-9
            )

    def test_scores_sorted_nonincreasing(self):
        cloud = _sphere_with_normals(400, 0.02, seed=5)
        grasps = generate_grasps(cloud, 40, w_max=0.05, seed=6)
        scores = [g.score for g in grasps]
        assert scores == sorted(scores, reverse=True)

    def test_too_tight_jaw_yields_nothing_on_sphere(self):
        """Friction demands near-diametral chords, so a jaw narrower than
        2 r cos(arctan(mu)) admits no sphere grasp at all."""
        radius = 0.02
        cloud = _sphere_with_normals(400, radius, seed=7)
        assert generate_grasps(cloud, 40, w_max=1.5 * radius, mu=0.5, seed=8) == []

    def test_frictionless_sphere_yields_nothing(self):
        cloud = _sphere_with_normals(400, 0.02, seed=9)
        assert generate_grasps(cloud, 40, w_max=0.05, mu=0.0, seed=10) == []

    def test_deterministic(self):
        cloud = _sphere_with_normals(300, 0.02, seed=11)
        a = generate_grasps(cloud, 25, seed=12, w_max=0.05)
        b = generate_grasps(cloud, 25, seed=12, w_max=0.05)
        assert [g.to_row() for g in a] == [g.to_row() for g in b]

    def test_rigid_equivariance(self):
        """Rotating and translating the scene (and co-rotating the front
        direction) rotates and translates every returned grasp."""
        cloud = _sphere_with_normals(300, 0.02, seed=13)
        ang = 0.9
        rot = np.array(
            [
                [np.cos(ang), -np.sin(ang), 0.0],
                [np.sin(ang), np.cos(ang), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        shift = np.array([0.2, -0.1, 0.5])
        moved = PointCloud(cloud.points @ rot.T + shift, normals=cloud.normals @ rot.T)
        base = generate_grasps(cloud, 20, seed=14, w_max=0.05)
        out = generate_grasps(moved, 20, seed=14, w_max=0.05, front=rot @ FRONT)
        assert len(base) == len(out) > 0
        for gb, gm in zip(base, out):
            np.testing.assert_allclose(gm.rotation, rot @ gb.rotation, atol=1e-9)
            np.testing.assert_allclose(gm.center, rot @ gb.center + shift, atol=1e-9)
            assert gm.score == pytest.approx(gb.score, abs=1e-9)


class TestGraspCsv:
    def test_round_trip_bitwise(self, tmp_path):
        cloud = _sphere_with_normals(300, 0.02, seed=15)
        grasps = generate_grasps(cloud, 12, seed=16, w_max=0.05)
        assert grasps
        path = tmp_path / "grasps.csv"
        grasps_to_csv(grasps, path)
        back = grasps_from_csv(path)
        assert len(back) == len(grasps)
        for ga, gb in zip(grasps, back):
            np.testing.assert_array_equal(gb.rotation, ga.rotation)
            np.testing.assert_array_equal(gb.center, ga.center)
            assert gb.score == ga.score

    def test_header_and_width(self, tmp_path):
        grasps = [GraspPose(np.eye(3), np.zeros(3), 0.25)]
        path = tmp_path / "grasps.csv"
        grasps_to_csv(grasps, path)
        lines = path.read_text(encoding="ascii").splitlines()
        assert lines[0].split(",")[:3] == ["r00", "r01", "r02"]
        assert lines[0].split(",")[-4:] == ["cx", "cy", "cz", "score"]
        assert len(lines[1].split(",")) == 13

    def test_empty_list_round_trip(self, tmp_path):
        path = tmp_path / "none.csv"
        grasps_to_csv([], path)
        assert grasps_from_csv(path) == []
