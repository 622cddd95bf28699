"""
Tests for sparse binary matrices and GF(2) linear algebra
"""

import pytest
import numpy as np

from ldpc_secure_sketch.geometry import build_eg, incidence_matrix
from ldpc_secure_sketch.sparsemat import (
    Gf2Basis,
    MatrixFormatError,
    SparseBinaryMatrix,
    check_regular,
    from_bits,
    matrix_stats,
    nullspace_gf2,
    rank_gf2,
    read_matrix,
    syndrome,
    to_bits,
    write_matrix,
)


class TestSparseBinaryMatrix:
    """Test construction and conversions."""

    def test_from_rows_sorts(self):
        m = SparseBinaryMatrix.from_rows([[3, 0], [1]], 4)
        assert m.rows == ((0, 3), (1,))
        assert m.nnz == 3

    def test_invalid_rows(self):
        with pytest.raises(ValueError):
            SparseBinaryMatrix.from_rows([[1, 1]], 3)
        with pytest.raises(ValueError):
            SparseBinaryMatrix(1, 3, ((0, 3),))
        with pytest.raises(ValueError):
            SparseBinaryMatrix(2, 3, ((0,),))

    def test_dense_conversion(self):
        dense = np.array([[1, 0, 1], [0, 1, 1]])
        m = SparseBinaryMatrix.from_dense(dense)
        assert np.array_equal(m.to_dense(), dense)
        assert np.array_equal(m.to_csr().toarray(), dense)
        assert m.row_weights().tolist() == [2, 2]
        assert m.col_weights().tolist() == [1, 1, 2]

    def test_bit_rows(self):
        assert to_bits([0, 2, 5]) == 0b100101
        assert from_bits(0b100101) == (0, 2, 5)
        m = SparseBinaryMatrix.from_rows([[0, 2], [1]], 3)
        assert SparseBinaryMatrix.from_bit_rows(m.bit_rows(), 3) == m

    def test_dedup_and_stack(self):
        a = SparseBinaryMatrix.from_rows([[0, 1], [1, 2], [0, 1]], 3)
        assert a.dedup_rows().rows == ((0, 1), (1, 2))
        stacked = a.vstack(SparseBinaryMatrix.from_rows([[2]], 3))
        assert stacked.n_rows == 4
        with pytest.raises(ValueError):
            a.vstack(SparseBinaryMatrix.from_rows([[0]], 4))

    def test_transpose(self):
        m = SparseBinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        assert np.array_equal(m.transpose().to_dense(), m.to_dense().T)


class TestGf2Algebra:
    """Test rank, null space and syndromes over GF(2)."""

    def test_rank_of_eg22(self):
        # rows of EG(2,2) span the even-weight vectors of length 4
        H = incidence_matrix(build_eg(2, 2))
        assert rank_gf2(H) == 3
        null = nullspace_gf2(H)
        assert null.tolist() == [[1, 1, 1, 1]]

    def test_nullspace_dimension(self):
        H = incidence_matrix(build_eg(2, 4))
        null = nullspace_gf2(H)
        assert null.shape == (16 - rank_gf2(H), 16)
        for v in null:
            assert not syndrome(H, v).any()

    def test_basis_reduce(self):
        basis = Gf2Basis(4)
        assert basis.add(0b0011)
        assert basis.add(0b0110)
        assert not basis.add(0b0101)
        assert basis.contains(0b0101)
        assert not basis.contains(0b1000)
        assert basis.rank == 2
        assert basis.add(0b1000)
        assert basis.rank == 3

    @pytest.mark.parametrize("seed", range(10))
    def test_rank_matches_span_size(self, seed):
        rng = np.random.default_rng(seed)
        n_rows, n_cols = rng.integers(1, 13, size=2)
        m = SparseBinaryMatrix.from_dense(rng.integers(0, 2, size=(n_rows, n_cols)))
        span = {0}
        for row in m.bit_rows():
            span |= {word ^ row for word in span}
        assert len(span) == 2 ** rank_gf2(m)

    def test_syndrome_is_linear(self):
        rng = np.random.default_rng(4)
        m = SparseBinaryMatrix.from_dense(rng.integers(0, 2, size=(9, 14)))
        for _ in range(50):
            a = rng.integers(0, 2, size=14, dtype=np.uint8)
            b = rng.integers(0, 2, size=14, dtype=np.uint8)
            assert np.array_equal(syndrome(m, a ^ b), syndrome(m, a) ^ syndrome(m, b))


    def test_syndrome(self):
        m = SparseBinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        assert syndrome(m, [1, 0, 0]).tolist() == [1, 0]
        assert syndrome(m, [1, 1, 1]).tolist() == [0, 0]
        with pytest.raises(ValueError):
            syndrome(m, [1, 0])

    def test_empty_syndrome(self):
        m = SparseBinaryMatrix(0, 3, ())
        assert syndrome(m, [1, 0, 1]).size == 0


class TestRegularity:
    """Test the regularity report."""

    def test_regular_matrix(self):
        report = check_regular(incidence_matrix(build_eg(2, 2)))
        assert report.is_regular
        assert (report.row_weight, report.col_weight) == (2, 3)
        assert report.summary().startswith("regular")

    def test_violations_in_order(self):
        report = check_regular(SparseBinaryMatrix.from_dense([[1, 1, 0], [1, 1, 1]]))
        assert [name for name, _ in report.violations] == [
            "row_weight", "col_weight", "row_overlap", "col_overlap"]
        assert report.violation == "row_weight"
        assert report.witness == (0, 1)
        assert report.violations[1][1] == (0, 2)

    def test_empty_matrix(self):
        report = check_regular(SparseBinaryMatrix(2, 3, ((), ())))
        assert report.violation == "empty"

    def test_matrix_stats(self):
        stats = matrix_stats(incidence_matrix(build_eg(2, 2)))
        assert stats.density == 0.5
        assert stats.rank == 3
        assert stats.rate_bound == pytest.approx(1 - 3 / 2)
        assert stats.col_weight_spread == 0


class TestMatrixFile:
    """Test the coordinate file format."""

    def test_write_format(self, tmp_path):
        path = tmp_path / "h.mtx"
        write_matrix(SparseBinaryMatrix.from_rows([[0, 2], [1]], 3), path)
        assert path.read_text() == "2 3 3\n0 0\n0 2\n1 1\n"
        assert read_matrix(path).rows == ((0, 2), (1,))

    def test_empty_rows_survive(self, tmp_path):
        path = tmp_path / "h.mtx"
        m = SparseBinaryMatrix(3, 4, ((), (1, 3), ()))
        write_matrix(m, path)
        assert read_matrix(path) == m

    @pytest.mark.parametrize("seed", range(5))
    def test_random_matrices_survive(self, tmp_path, seed):
        rng = np.random.default_rng(seed)
        m = SparseBinaryMatrix.from_dense(rng.random((20, 32)) < 0.1)
        path = tmp_path / f"h{seed}.mtx"
        write_matrix(m, path)
        assert read_matrix(path) == m


    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_matrix(tmp_path / "absent.mtx")

    @pytest.mark.parametrize("text", [
        "",
        "2 3\n0 0\n",
        "2 3 2\n0 0\n",
        "2 3 1\n2 0\n",
        "2 3 2\n0 1\n0 1\n",
        "2 3 1\n0 x\n",
    ])
    def test_malformed_files(self, tmp_path, text):
        path = tmp_path / "bad.mtx"
        path.write_text(text)
        with pytest.raises(MatrixFormatError):
            read_matrix(path)

    def test_format_error_is_value_error(self):
        assert issubclass(MatrixFormatError, ValueError)
