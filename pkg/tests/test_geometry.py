"""
Tests for finite-geometry constructions
"""

import pytest

from ldpc_secure_sketch.geometry import (
    build_eg,
    build_geometry,
    build_pg,
    find_geometries,
    geometry_counts,
    incidence_matrix,
)
from ldpc_secure_sketch.sparsemat import check_regular


class TestEuclideanGeometry:
    """Test EG(m, q) points and lines."""

    def test_eg22_lines(self):
        g = build_eg(2, 2)
        assert g.lines == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
        assert g.name == "EG(2,2)"

    @pytest.mark.parametrize("m,q", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (3, 4), (3, 5)])
    def test_counts(self, m, q):
        g = build_eg(m, q)
        n, rho, lines, gamma = geometry_counts("EG", m, q)
        assert g.n_points == n
        assert g.n_lines == lines
        assert g.rho == rho
        assert g.gamma == gamma

    @pytest.mark.parametrize("m,q", [(2, 4), (3, 3)])
    def test_incidence_is_regular(self, m, q):
        report = check_regular(incidence_matrix(build_eg(m, q)))
        assert report.is_regular
        assert report.row_weight == q

    def test_parallel_classes_partition_points(self):
        g = build_eg(2, 3)
        classes = g.parallel_classes()
        assert len(classes) == 4
        for members in classes.values():
            covered = sorted(p for i in members for p in g.lines[i])
            assert covered == list(range(9))

    def test_point_lines(self):
        g = build_eg(2, 4)
        assert all(len(through) == g.gamma for through in g.point_lines())


class TestProjectiveGeometry:
    """Test PG(m, q) points and lines."""

    @pytest.mark.parametrize("m,q", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (3, 4), (3, 5)])
    def test_counts(self, m, q):
        g = build_pg(m, q)
        n, rho, lines, gamma = geometry_counts("PG", m, q)
        assert g.n_points == n
        assert g.n_lines == lines
        assert g.rho == rho
        assert g.gamma == gamma

    def test_fano_plane_is_regular(self):
        report = check_regular(incidence_matrix(build_pg(2, 2)))
        assert report.is_regular
        assert (report.row_weight, report.col_weight) == (3, 3)

    def test_no_parallel_classes(self):
        with pytest.raises(ValueError):
            build_pg(2, 2).parallel_classes()


class TestGeometryLookup:
    """Test dispatch and length lookup."""

    def test_find_geometries_16(self):
        assert find_geometries(16) == [("EG", 2, 4), ("EG", 4, 2)]

    def test_find_geometries_pg(self):
        assert ("PG", 2, 2) in find_geometries(7)
        assert ("PG", 3, 2) in find_geometries(15)

    def test_no_geometry_of_length_17(self):
        assert find_geometries(17) == []

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            build_geometry("AG", 2, 2)
        with pytest.raises(ValueError):
            build_eg(2, 6)
        with pytest.raises(ValueError):
            build_eg(1, 4)
