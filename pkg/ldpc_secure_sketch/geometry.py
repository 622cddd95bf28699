"""
Euclidean and projective geometries over GF(q) and their incidence matrices.

Points of EG(m, q) are the q^m vectors of GF(q)^m (the vector-space view of
GF(q^m)); point index = sum(c_i * q^i). Points of PG(m, q) are the nonzero
vectors of GF(q)^(m+1) up to scaling, represented by the vector whose first
nonzero coordinate is 1. Lines are sorted tuples of point indices.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .gf import FieldTable, arith_tables, field_for_order, is_prime_power
from .sparsemat import SparseBinaryMatrix


MAX_POINTS = 1 << 16
MAX_GEOMETRY_Q = 256
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class Geometry:
    """
    Points and lines of EG(m, q) or PG(m, q).

    Attributes:
        kind: "EG" or "PG"
        m: Dimension parameter
        q: Field size
        points: Coordinate tuple of every point, indexed by point index
        lines: Sorted point-index tuples, one per line
        line_directions: EG only; direction index of every line
    """

    kind: str
    m: int
    q: int
    points: Tuple[Tuple[int, ...], ...]
    lines: Tuple[Tuple[int, ...], ...]
    line_directions: Tuple[int, ...] = ()

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def rho(self) -> int:
        return len(self.lines[0]) if self.lines else 0

    @property
    def gamma(self) -> int:
        return sum(1 for line in self.lines if 0 in line)

    @property
    def name(self) -> str:
        return f"{self.kind}({self.m},{self.q})"

    def point_lines(self) -> List[List[int]]:
        """Line indices through each point."""
        through: List[List[int]] = [[] for _ in range(self.n_points)]
        for i, line in enumerate(self.lines):
            for p in line:
                through[p].append(i)
        return through

    def parallel_classes(self) -> Dict[int, List[int]]:
        """Group EG line indices by direction."""
        if self.kind != "EG":
            raise ValueError("Parallel classes exist only in Euclidean geometries")
        classes: Dict[int, List[int]] = {}
        for i, d in enumerate(self.line_directions):
            classes.setdefault(d, []).append(i)
        return classes


def geometry_counts(kind: str, m: int, q: int) -> Tuple[int, int, int, int]:
    """
    Closed-form (n_points, rho, L, gamma) of EG(m, q) or PG(m, q).
    """
    gamma = (q ** m - 1) // (q - 1)
    if kind == "EG":
        return q ** m, q, q ** (m - 1) * (q ** m - 1) // (q - 1), gamma
    if kind == "PG":
        n = (q ** (m + 1) - 1) // (q - 1)
        lines = (q ** (m + 1) - 1) * (q ** m - 1) // ((q - 1) ** 2 * (q + 1))
        return n, q + 1, lines, gamma
    raise ValueError(f"Unknown geometry kind '{kind}'")


def _validate(m: int, q: int, n_points: int) -> FieldTable:
    if is_prime_power(q) is None:
        raise ValueError(f"Field size {q} is not a prime power")
    if m < 2:
        raise ValueError(f"Geometry dimension must be >= 2, got {m}")
    if q > MAX_GEOMETRY_Q or n_points > MAX_POINTS:
        raise ValueError(f"Geometry with q={q}, m={m} exceeds the supported size "
                         f"({n_points} points)")
    return field_for_order(q)


def _all_vectors(q: int, length: int) -> np.ndarray:
    idx = np.arange(q ** length, dtype=np.int64)
    return np.stack([(idx // q ** i) % q for i in range(length)], axis=1)


def _normalized(vectors: np.ndarray) -> np.ndarray:
    """Mask of nonzero vectors whose first nonzero coordinate is 1."""
    nonzero = vectors != 0
    has = nonzero.any(axis=1)
    first = np.argmax(nonzero, axis=1)
    lead = vectors[np.arange(len(vectors)), first]
    return has & (lead == 1)


def build_eg(m: int, q: int) -> Geometry:
    """
    Build EG(m, q).

    Lines through the origin are {alpha * a_j}; every direction a_j is
    taken once (first nonzero coordinate 1) in point-index order. The
    parallel translates {a_i + alpha * a_j} follow, sorted.

    Args:
        m: Dimension (>= 2)
        q: Field size (prime power)

    Returns:
        Geometry with q^(m-1)(q^m-1)/(q-1) lines
    """
    f = _validate(m, q, q ** m if q > 1 else 0)
    add_t, mul_t = arith_tables(f)
    coords = _all_vectors(q, m)
    weights = q ** np.arange(m, dtype=np.int64)
    directions = np.flatnonzero(_normalized(coords))

    origin_lines: List[Tuple[int, ...]] = []
    translates: List[Tuple[Tuple[int, ...], int]] = []
    seen = set()
    chunk = max(1, _CHUNK_CELLS // (q * m))
    for d_idx, d in enumerate(directions):
        multiples = mul_t[:, coords[d]]  # q x m
        for start in range(0, len(coords), chunk):
            block = coords[start:start + chunk]
            shifted = add_t[block[:, None, :], multiples[None, :, :]]
            members = np.sort(shifted @ weights, axis=1)
            # a translate is emitted once, from its smallest point
            starts = np.flatnonzero(members[:, 0] == np.arange(start, start + len(block)))
            for a in starts:
                line = tuple(int(x) for x in members[a])
                if line in seen:
                    continue
                seen.add(line)
                if start + a == 0:
                    origin_lines.append(line)
                else:
                    translates.append((line, d_idx))

    origin_dirs = list(range(len(directions)))
    translates.sort()
    lines = tuple(origin_lines) + tuple(t[0] for t in translates)
    line_dirs = tuple(origin_dirs) + tuple(t[1] for t in translates)
    points = tuple(tuple(int(c) for c in row) for row in coords)
    return Geometry("EG", m, q, points, lines, line_dirs)


def build_pg(m: int, q: int) -> Geometry:
    """
    Build PG(m, q).

    A line through points a_i and a_j is {alpha_i a_i + alpha_j a_j}
    reduced to point classes; it has q + 1 points. Lines are emitted in
    sorted order.

    Args:
        m: Dimension (>= 2)
        q: Field size (prime power)

    Returns:
        Geometry with (q^(m+1)-1)/(q-1) points
    """
    n_expected = (q ** (m + 1) - 1) // (q - 1) if q > 1 else 0
    f = _validate(m, q, n_expected)
    add_t, mul_t = arith_tables(f)
    vectors = _all_vectors(q, m + 1)
    weights = q ** np.arange(m + 1, dtype=np.int64)
    point_vec = np.flatnonzero(_normalized(vectors))
    coords = vectors[point_vec]
    n = len(point_vec)

    # class of every nonzero vector: beta * P_k -> k
    class_of = np.full(len(vectors), -1, dtype=np.int64)
    for beta in range(1, q):
        scaled = mul_t[beta, coords] @ weights
        class_of[scaled] = np.arange(n)

    covered = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(covered, True)
    lines = []
    for i in range(n):
        for j in np.flatnonzero(~covered[i]):
            if covered[i, j]:
                continue
            combos = add_t[coords[i][None, :], mul_t[:, coords[j]]] @ weights
            members = np.unique(np.append(class_of[combos], j))
            covered[np.ix_(members, members)] = True
            lines.append(tuple(int(x) for x in members))

    lines.sort()
    points = tuple(tuple(int(c) for c in row) for row in coords)
    return Geometry("PG", m, q, points, tuple(lines))


def build_geometry(kind: str, m: int, q: int) -> Geometry:
    if kind == "EG":
        return build_eg(m, q)
    if kind == "PG":
        return build_pg(m, q)
    raise ValueError(f"Unknown geometry kind '{kind}'")


def incidence_matrix(g: Geometry) -> SparseBinaryMatrix:
    """L x n matrix with h_ij = 1 iff point j lies on line i."""
    return SparseBinaryMatrix(g.n_lines, g.n_points, g.lines)


def find_geometries(n: int, kinds: Tuple[str, ...] = ("EG", "PG")) -> List[Tuple[str, int, int]]:
    """
    All (kind, m, q) with n points, m >= 2 and q <= 256; EG entries first,
    each kind ordered by descending q.
    """
    found = []
    for kind in kinds:
        matches = []
        for q in range(MAX_GEOMETRY_Q, 1, -1):
            if is_prime_power(q) is None:
                continue
            m = 2
            while True:
                count = geometry_counts(kind, m, q)[0]
                if count == n:
                    matches.append((kind, m, q))
                if count >= n:
                    break
                m += 1
        found.extend(matches)
    return found
