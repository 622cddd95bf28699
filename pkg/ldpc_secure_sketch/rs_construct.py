"""
LDPC parity-check matrices from shortened Reed-Solomon codes.

The RS code C(q-1, q-rho+1, rho-1) over GF(q) is encoded systematically
(parity symbols first). Deleting the first q-rho-1 information symbols
leaves the two-dimensional code C_b(rho, 2, rho-1), which is split into q
additive cosets of {beta * c}. Each codeword becomes a row of rho*q bits by
replacing every symbol with its location vector.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .gf import FieldTable, arith_tables, field_for_order, is_prime_power, poly_mod, poly_mul
from .sparsemat import SparseBinaryMatrix


MAX_RS_Q = 256

Codeword = Tuple[int, ...]


@dataclass(frozen=True)
class RsBase:
    """
    Shortened RS code C_b(rho, 2, rho-1) and its coset partition.

    Attributes:
        q: Field size
        rho: Code length
        field: GF(q) context
        basis: Two codewords spanning C_b (message (1, 0) and (0, 1))
        codewords: All q^2 codewords in ascending symbol order
        generator: The weight-rho codeword c with C_b^(1) = {beta * c}
        cosets: q cosets, the first being C_b^(1); each sorted ascending
    """

    q: int
    rho: int
    field: FieldTable
    basis: Tuple[Codeword, Codeword]
    codewords: Tuple[Codeword, ...]
    generator: Codeword
    cosets: Tuple[Tuple[Codeword, ...], ...]

    @property
    def n_cols(self) -> int:
        return self.rho * self.q

    @property
    def name(self) -> str:
        return f"RS(q={self.q},rho={self.rho})"


def _shortened_basis(f: FieldTable, rho: int) -> Tuple[Codeword, Codeword]:
    q = f.q
    n_rs = q - 1
    parity_len = rho - 2
    generator_poly = [1]
    for i in range(1, rho - 1):
        generator_poly = poly_mul(generator_poly, [f.neg(f.exp(i)), 1], f)

    basis = []
    for position in (n_rs - 2, n_rs - 1):
        shifted = [0] * n_rs
        shifted[position] = 1
        remainder = poly_mod(shifted, generator_poly, f) if parity_len else []
        parity = [f.neg(c) for c in remainder] + [0] * (parity_len - len(remainder))
        info = [1, 0] if position == n_rs - 2 else [0, 1]
        basis.append(tuple(parity + info))
    return basis[0], basis[1]


def build_base(q: int, rho: int) -> RsBase:
    """
    Build C_b(rho, 2, rho-1) over GF(q) and partition it into q cosets.

    Args:
        q: Field size (prime power)
        rho: Shortened length, 1 < rho < q

    Returns:
        RsBase with q^2 codewords in q cosets of size q
    """
    if is_prime_power(q) is None:
        raise ValueError(f"Field size {q} is not a prime power")
    if not 1 < rho < q:
        raise ValueError(f"rho must satisfy 1 < rho < q, got rho={rho}, q={q}")
    if q > MAX_RS_Q:
        raise ValueError(f"RS base with q={q} exceeds the supported maximum {MAX_RS_Q}")

    f = field_for_order(q)
    add_t, mul_t = arith_tables(f)
    g1, g2 = (np.array(b, dtype=np.int64) for b in _shortened_basis(f, rho))

    u, v = np.divmod(np.arange(q * q, dtype=np.int64), q)
    words = add_t[mul_t[u[:, None], g1[None, :]], mul_t[v[:, None], g2[None, :]]]
    order = np.lexsort(words.T[::-1])
    words = words[order]
    codewords = tuple(tuple(int(x) for x in w) for w in words)

    full_weight = np.flatnonzero((words != 0).all(axis=1))
    if full_weight.size == 0:
        raise RuntimeError(f"No weight-{rho} codeword in C_b over GF({q})")
    c = words[full_weight[0]]
    multiples = mul_t[:, c]

    assigned = set()
    cosets: List[Tuple[Codeword, ...]] = []
    for w in words:
        key = tuple(int(x) for x in w)
        if key in assigned:
            continue
        members = sorted(tuple(int(x) for x in row) for row in add_t[w[None, :], multiples])
        assigned.update(members)
        cosets.append(tuple(members))

    return RsBase(q=q, rho=rho, field=f,
                  basis=(tuple(int(x) for x in g1), tuple(int(x) for x in g2)),
                  codewords=codewords, generator=tuple(int(x) for x in c),
                  cosets=tuple(cosets))


def z_positions(c: Sequence[int], f: FieldTable) -> Tuple[int, ...]:
    """1-positions of z(c): block j holds a single 1 at the location index of c_j."""
    return tuple(j * f.q + f.location_index(int(s)) for j, s in enumerate(c))


def z_expand(c: Sequence[int], f: FieldTable) -> np.ndarray:
    """
    Replace each symbol by its length-q location vector over the ordering
    (0, alpha^0, ..., alpha^(q-2)).

    Args:
        c: Codeword over GF(q)
        f: Field context

    Returns:
        Binary vector of length len(c) * q with exactly len(c) ones
    """
    out = np.zeros(len(c) * f.q, dtype=np.uint8)
    out[list(z_positions(c, f))] = 1
    return out


def build_rs_ldpc(base: RsBase, gamma: int) -> SparseBinaryMatrix:
    """
    Stack A_1, ..., A_gamma (rows of A_i = z-expanded codewords of coset i).

    Args:
        base: Shortened RS base
        gamma: Number of cosets, 1 <= gamma <= q

    Returns:
        (gamma*q) x (rho*q) matrix with row weight rho and column weight gamma
    """
    if not 1 <= gamma <= base.q:
        raise ValueError(f"gamma must satisfy 1 <= gamma <= {base.q}, got {gamma}")
    rows = tuple(z_positions(c, base.field) for coset in base.cosets[:gamma] for c in coset)
    return SparseBinaryMatrix(len(rows), base.n_cols, rows)


def find_rs_parameters(n: int) -> List[Tuple[int, int]]:
    """All (q, rho) with rho * q = n, 1 < rho < q <= 256, by descending rho."""
    found = []
    for rho in range(n, 1, -1):
        if n % rho:
            continue
        q = n // rho
        if rho < q <= MAX_RS_Q and is_prime_power(q) is not None:
            found.append((q, rho))
    return found
