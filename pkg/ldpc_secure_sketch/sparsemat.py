"""
Sparse GF(2) matrices in coordinate form.

A matrix is stored row-major as sorted column-index tuples, one per row,
which is also the on-disk representation: one (row, column) integer pair
for each 1. Rank and null-space computations pack rows into Python ints
and eliminate densely.
"""

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix


class MatrixFormatError(ValueError):
    """Raised when a matrix file cannot be parsed."""


def to_bits(indices: Iterable[int]) -> int:
    """Pack column indices into an int bitset."""
    value = 0
    for c in indices:
        value |= 1 << c
    return value


def from_bits(value: int) -> Tuple[int, ...]:
    """Unpack an int bitset into sorted column indices."""
    out = []
    c = 0
    while value:
        if value & 1:
            out.append(c)
        value >>= 1
        c += 1
    return tuple(out)


@dataclass(frozen=True)
class SparseBinaryMatrix:
    """
    Binary matrix stored as per-row sorted column indices.

    Attributes:
        n_rows: Number of rows
        n_cols: Number of columns
        rows: One strictly increasing tuple of column indices per row
    """

    n_rows: int
    n_cols: int
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise ValueError(f"Expected {self.n_rows} rows, got {len(self.rows)}")
        for i, row in enumerate(self.rows):
            for a, b in zip(row, row[1:]):
                if a >= b:
                    raise ValueError(f"Row {i} column indices are not strictly increasing: {row}")
            if row and (row[0] < 0 or row[-1] >= self.n_cols):
                raise ValueError(f"Row {i} has a column index outside 0..{self.n_cols - 1}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], n_cols: int) -> "SparseBinaryMatrix":
        """Build from arbitrary-order column index collections."""
        canonical = []
        for row in rows:
            cols = sorted(int(c) for c in row)
            if len(set(cols)) != len(cols):
                raise ValueError(f"Duplicate column index in row {cols}")
            canonical.append(tuple(cols))
        return cls(len(canonical), n_cols, tuple(canonical))

    @classmethod
    def from_dense(cls, array) -> "SparseBinaryMatrix":
        dense = np.asarray(array, dtype=np.uint8) % 2
        if dense.ndim != 2:
            raise ValueError(f"Expected a 2-D array, got shape {dense.shape}")
        rows = tuple(tuple(int(c) for c in np.flatnonzero(r)) for r in dense)
        return cls(dense.shape[0], dense.shape[1], rows)

    @classmethod
    def from_bit_rows(cls, rows: Iterable[int], n_cols: int) -> "SparseBinaryMatrix":
        packed = tuple(from_bits(r) for r in rows)
        return cls(len(packed), n_cols, packed)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def row_weights(self) -> np.ndarray:
        return np.array([len(r) for r in self.rows], dtype=np.int64)

    def col_weights(self) -> np.ndarray:
        weights = np.zeros(self.n_cols, dtype=np.int64)
        for row in self.rows:
            weights[list(row)] += 1
        return weights

    def bit_rows(self) -> List[int]:
        return [to_bits(r) for r in self.rows]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            dense[i, list(row)] = 1
        return dense

    def to_csr(self) -> csr_matrix:
        indptr = np.zeros(self.n_rows + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.row_weights())
        indices = np.fromiter((c for row in self.rows for c in row), dtype=np.int64,
                              count=self.nnz)
        data = np.ones(self.nnz, dtype=np.int64)
        return csr_matrix((data, indices, indptr), shape=(self.n_rows, self.n_cols))

    def dedup_rows(self) -> "SparseBinaryMatrix":
        """Drop repeated rows, keeping first occurrences in order."""
        seen = set()
        kept = []
        for row in self.rows:
            if row not in seen:
                seen.add(row)
                kept.append(row)
        return SparseBinaryMatrix(len(kept), self.n_cols, tuple(kept))

    def vstack(self, other: "SparseBinaryMatrix") -> "SparseBinaryMatrix":
        if other.n_cols != self.n_cols:
            raise ValueError(f"Cannot stack {self.n_cols}-column and {other.n_cols}-column matrices")
        return SparseBinaryMatrix(self.n_rows + other.n_rows, self.n_cols, self.rows + other.rows)

    def transpose(self) -> "SparseBinaryMatrix":
        cols: List[List[int]] = [[] for _ in range(self.n_cols)]
        for i, row in enumerate(self.rows):
            for c in row:
                cols[c].append(i)
        return SparseBinaryMatrix(self.n_cols, self.n_rows, tuple(tuple(c) for c in cols))


class Gf2Basis:
    """
    Incremental GF(2) row basis over bit-packed rows.

    Rows are reduced against pivots keyed by their highest set bit, so
    membership tests and insertions cost O(rank) int operations.
    """

    def __init__(self, n_cols: int):
        self.n_cols = n_cols
        self._pivots: Dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def reduce(self, row: int) -> int:
        while row:
            top = row.bit_length() - 1
            pivot = self._pivots.get(top)
            if pivot is None:
                return row
            row ^= pivot
        return 0

    def contains(self, row: int) -> bool:
        """True if row lies in the span of the basis."""
        return self.reduce(row) == 0

    def add(self, row: int) -> bool:
        """Insert row; returns True if it increased the rank."""
        reduced = self.reduce(row)
        if not reduced:
            return False
        self._pivots[reduced.bit_length() - 1] = reduced
        return True


def rank_gf2(m: SparseBinaryMatrix) -> int:
    """GF(2) row rank of m."""
    basis = Gf2Basis(m.n_cols)
    for row in m.bit_rows():
        basis.add(row)
        if basis.rank == min(m.n_rows, m.n_cols):
            break
    return basis.rank


def nullspace_gf2(m: SparseBinaryMatrix) -> np.ndarray:
    """
    Basis of {x : m x^T = 0} as rows of a (n_cols - rank) x n_cols array.

    Only needed for drawing uniformly random codewords.
    """
    pivots: Dict[int, int] = {}
    for row in m.bit_rows():
        for col, prow in pivots.items():
            if (row >> col) & 1:
                row ^= prow
        if not row:
            continue
        col = (row & -row).bit_length() - 1
        for other in list(pivots):
            if (pivots[other] >> col) & 1:
                pivots[other] ^= row
        pivots[col] = row

    free = [c for c in range(m.n_cols) if c not in pivots]
    basis = np.zeros((len(free), m.n_cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for col, prow in pivots.items():
            if (prow >> f) & 1:
                basis[i, col] = 1
    return basis


def syndrome(m: SparseBinaryMatrix, v) -> np.ndarray:
    """s_i = <row_i, v> mod 2."""
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (m.n_cols,):
        raise ValueError(f"Vector length {v.shape[0] if v.ndim else 0} does not match "
                         f"{m.n_cols} columns")
    if m.n_rows == 0:
        return np.zeros(0, dtype=np.uint8)
    return (m.to_csr() @ v % 2).astype(np.uint8)


def transpose(m: SparseBinaryMatrix) -> SparseBinaryMatrix:
    return m.transpose()


@dataclass
class RegularityReport:
    """
    Outcome of the LDPC regularity check.

    Attributes:
        row_weight: Common row weight rho, or None if rows differ
        col_weight: Common column weight gamma, or None if columns differ
        violations: (property, witness pair) for every failed property, in
            check order: row_weight, col_weight, row_overlap, col_overlap,
            or ("empty", None) for a matrix without ones
    """

    row_weight: Optional[int]
    col_weight: Optional[int]
    violations: List[Tuple[str, Optional[Tuple[int, int]]]] = field(default_factory=list)

    @property
    def is_regular(self) -> bool:
        return not self.violations

    @property
    def violation(self) -> Optional[str]:
        return self.violations[0][0] if self.violations else None

    @property
    def witness(self) -> Optional[Tuple[int, int]]:
        return self.violations[0][1] if self.violations else None

    def summary(self) -> str:
        if self.is_regular:
            return f"regular: rho={self.row_weight}, gamma={self.col_weight}, no overlap violations"
        parts = [f"{name} (witness {pair})" if pair else name for name, pair in self.violations]
        return "not regular: " + ", ".join(parts)


def _first_mismatch(weights: np.ndarray) -> Optional[Tuple[int, int]]:
    diff = np.flatnonzero(weights != weights[0])
    return (0, int(diff[0])) if diff.size else None


def _overlap_witness(a: csr_matrix) -> Optional[Tuple[int, int]]:
    gram = (a @ a.T).tocoo()
    mask = (gram.row < gram.col) & (gram.data > 1)
    if not mask.any():
        return None
    pairs = sorted(zip(gram.row[mask].tolist(), gram.col[mask].tolist()))
    return pairs[0]


def check_regular(m: SparseBinaryMatrix) -> RegularityReport:
    """
    Check constant row/column weight and the at-most-one-overlap property.

    Returns a report instead of raising: constructed instance codes may
    legitimately be irregular.
    """
    if m.nnz == 0:
        return RegularityReport(None, None, [("empty", None)])

    violations: List[Tuple[str, Optional[Tuple[int, int]]]] = []
    row_w = m.row_weights()
    col_w = m.col_weights()

    row_pair = _first_mismatch(row_w)
    if row_pair:
        violations.append(("row_weight", row_pair))
    col_pair = _first_mismatch(col_w)
    if col_pair:
        violations.append(("col_weight", col_pair))

    a = m.to_csr()
    row_overlap = _overlap_witness(a)
    if row_overlap:
        violations.append(("row_overlap", row_overlap))
    col_overlap = _overlap_witness(a.T.tocsr())
    if col_overlap:
        violations.append(("col_overlap", col_overlap))

    return RegularityReport(
        row_weight=None if row_pair else int(row_w[0]),
        col_weight=None if col_pair else int(col_w[0]),
        violations=violations,
    )


@dataclass
class MatrixStats:
    """Density, weight histograms, rank and rate bound of a parity-check matrix."""

    density: float
    row_weights: Dict[int, int]
    col_weights: Dict[int, int]
    rank: int
    rate_bound: Optional[float]

    @property
    def col_weight_spread(self) -> int:
        return max(self.col_weights) - min(self.col_weights) if self.col_weights else 0


def matrix_stats(m: SparseBinaryMatrix) -> MatrixStats:
    cells = m.n_rows * m.n_cols
    row_hist = Counter(m.row_weights().tolist())
    col_hist = Counter(m.col_weights().tolist())
    rate_bound = None
    if len(row_hist) == 1 and len(col_hist) == 1:
        rho = next(iter(row_hist))
        gamma = next(iter(col_hist))
        if rho:
            rate_bound = 1.0 - gamma / rho
    return MatrixStats(
        density=m.nnz / cells if cells else 0.0,
        row_weights=dict(sorted(row_hist.items())),
        col_weights=dict(sorted(col_hist.items())),
        rank=rank_gf2(m),
        rate_bound=rate_bound,
    )


def write_matrix(m: SparseBinaryMatrix, path: Union[str, Path]) -> None:
    """
    Write the coordinate format: header `n_rows n_cols nnz`, then one
    zero-indexed `row col` pair per 1, sorted by (row, col).
    """
    path = Path(path)
    lines = [f"{m.n_rows} {m.n_cols} {m.nnz}"]
    for i, row in enumerate(m.rows):
        lines.extend(f"{i} {c}" for c in row)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def read_matrix(path: Union[str, Path]) -> SparseBinaryMatrix:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")

    lines = [ln.strip() for ln in path.read_text(encoding="ascii").splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError(f"{path}: missing header")
    try:
        n_rows, n_cols, nnz = (int(x) for x in lines[0].split())
    except ValueError:
        raise MatrixFormatError(f"{path}: malformed header '{lines[0]}'")
    if min(n_rows, n_cols, nnz) < 0:
        raise MatrixFormatError(f"{path}: negative value in header '{lines[0]}'")
    if len(lines) - 1 != nnz:
        raise MatrixFormatError(f"{path}: header announces {nnz} entries, found {len(lines) - 1}")

    rows: List[set] = [set() for _ in range(n_rows)]
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise MatrixFormatError(f"{path}:{lineno}: expected 'row col', got '{line}'")
        try:
            r, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixFormatError(f"{path}:{lineno}: non-integer entry '{line}'")
        if not (0 <= r < n_rows and 0 <= c < n_cols):
            raise MatrixFormatError(f"{path}:{lineno}: index ({r}, {c}) out of range "
                                    f"for {n_rows}x{n_cols}")
        if c in rows[r]:
            raise MatrixFormatError(f"{path}:{lineno}: duplicate entry ({r}, {c})")
        rows[r].add(c)

    return SparseBinaryMatrix(n_rows, n_cols, tuple(tuple(sorted(r)) for r in rows))
