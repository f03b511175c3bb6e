"""Tests for XYZ and PLY point-cloud file I/O."""

import numpy as np
import pytest

from graspuq.cloud import PointCloud
from graspuq.errors import DataError, UnsupportedFormat
from graspuq.io import load_cloud, load_ply, load_xyz, save_cloud, save_ply, save_xyz


def _random_cloud(n, seed=0):
    rng = np.random.default_rng(seed)
    return PointCloud(rng.uniform(-1, 1, size=(n, 3)))


class TestXyz:
    def test_round_trip_bitwise(self, tmp_path):
        cloud = _random_cloud(257, seed=1)
        path = tmp_path / "c.xyz"
        save_xyz(cloud, path)
        back = load_xyz(path)
        np.testing.assert_array_equal(back.points, cloud.points)

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("# header\n\n1.0 2.0 3.0\n   \n# tail\n4.0 5.0 6.0\n")
        cloud = load_xyz(path)
        np.testing.assert_array_equal(cloud.points, [[1, 2, 3], [4, 5, 6]])

    def test_wrong_field_count_names_line(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("1.0 2.0 3.0\n1.0 2.0\n")
        with pytest.raises(DataError, match=":2"):
            load_xyz(path)

    def test_non_numeric_field(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("1.0 two 3.0\n")
        with pytest.raises(DataError, match=":1"):
            load_xyz(path)

    def test_empty_file_gives_empty_cloud(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("")
        assert len(load_xyz(path)) == 0


class TestPly:
    def test_round_trip_bitwise(self, tmp_path):
        cloud = _random_cloud(64, seed=2)
        path = tmp_path / "c.ply"
        save_ply(cloud, path)
        back = load_ply(path)
        np.testing.assert_array_equal(back.points, cloud.points)

    def test_binary_rejected(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_bytes(
            b"ply\nformat binary_little_endian 1.0\n"
            b"element vertex 1\nproperty float x\nproperty float y\n"
            b"property float z\nend_header\n\x00\x00\x00\x00"
        )
        with pytest.raises(UnsupportedFormat):
            load_ply(path)

    def test_float32_properties_accepted(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 2\n"
            "property float32 x\nproperty float32 y\nproperty float32 z\n"
            "end_header\n0 0 0\n1 2 3\n"
        )
        cloud = load_ply(path)
        np.testing.assert_array_equal(cloud.points, [[0, 0, 0], [1, 2, 3]])

    def test_extra_vertex_properties_ignored(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property double x\nproperty double y\nproperty double z\n"
            "property double confidence\n"
            "end_header\n1.5 2.5 3.5 0.9\n"
        )
        cloud = load_ply(path)
        np.testing.assert_array_equal(cloud.points, [[1.5, 2.5, 3.5]])

    def test_reordered_properties_respected(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property double z\nproperty double y\nproperty double x\n"
            "end_header\n3.0 2.0 1.0\n"
        )
        cloud = load_ply(path)
        np.testing.assert_array_equal(cloud.points, [[1.0, 2.0, 3.0]])

    def test_integer_coordinate_type_rejected(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property int x\nproperty double y\nproperty double z\n"
            "end_header\n1 2 3\n"
        )
        with pytest.raises(DataError):
            load_ply(path)

    def test_missing_vertex_element(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text("ply\nformat ascii 1.0\nelement face 0\nend_header\n")
        with pytest.raises(DataError):
            load_ply(path)

    def test_nonempty_other_element_rejected(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property double x\nproperty double y\nproperty double z\n"
            "element face 2\nend_header\n0 0 0\n"
        )
        with pytest.raises(DataError):
            load_ply(path)

    def test_truncated_body(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 3\n"
            "property double x\nproperty double y\nproperty double z\n"
            "end_header\n0 0 0\n"
        )
        with pytest.raises(DataError):
            load_ply(path)

    def test_missing_magic(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text("plyx\nformat ascii 1.0\nend_header\n")
        with pytest.raises(DataError):
            load_ply(path)


class TestDispatch:
    def test_extension_routing(self, tmp_path):
        cloud = _random_cloud(10, seed=3)
        for name in ("a.xyz", "a.ply"):
            path = tmp_path / name
            save_cloud(cloud, path)
            back = load_cloud(path)
            np.testing.assert_array_equal(back.points, cloud.points)

    def test_unknown_extension(self, tmp_path):
        with pytest.raises(UnsupportedFormat):
            load_cloud(tmp_path / "a.pcd")
        with pytest.raises(UnsupportedFormat):
            save_cloud(_random_cloud(1), tmp_path / "a.pcd")

    def test_case_insensitive_extension(self, tmp_path):
        cloud = _random_cloud(5, seed=4)
        path = tmp_path / "A.XYZ"
        save_cloud(cloud, path)
        np.testing.assert_array_equal(load_cloud(path).points, cloud.points)
