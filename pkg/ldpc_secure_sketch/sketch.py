"""
Secure sketches for PUF responses.

The main construction builds a parity-check matrix H per PUF instance
from rows of structured LDPC codes that are dual to the enrolled response
r_I, so r_I itself is a codeword and no helper data has to be stored. The
code-offset and syndrome constructions are provided as baselines.
"""

import hashlib
import re
from collections import Counter, deque
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from tqdm import tqdm

from .decode import BitflipDecoder, DecodeResult, SoftWeights, reproduce_multi
from .geometry import Geometry, build_geometry, find_geometries, geometry_counts
from .rs_construct import RsBase, build_base, find_rs_parameters, z_positions
from .sparsemat import (
    Gf2Basis,
    SparseBinaryMatrix,
    from_bits,
    matrix_stats,
    nullspace_gf2,
    rank_gf2,
    read_matrix,
    syndrome,
    to_bits,
    write_matrix,
)
from .utils import bits_to_hex, hex_to_bits


Row = Tuple[int, ...]
MAX_ENUMERATION_LENGTH = 20
MAX_CODE_LENGTH = 4096


class IncompatibleLengthError(ValueError):
    """No configured source construction produces rows of the response length."""


class RankShortfallError(RuntimeError):
    """The configured sources cannot reach the target rank."""

    def __init__(self, code: "InstanceCode"):
        self.code = code
        super().__init__(f"Target dimension {code.config.target_k} unreachable: "
                         f"achieved k={code.k} (rank {code.rank} of {code.n - code.config.target_k})")


class ReproductionError(RuntimeError):
    """The decoder did not converge while reproducing a response."""

    def __init__(self, message: str, result: Optional[DecodeResult] = None):
        self.result = result
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Response:
    """
    A PUF response as a binary vector.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError(f"A response must be a non-empty 1-D vector, got shape {bits.shape}")
        if np.any((bits != 0) & (bits != 1)):
            raise ValueError("A response may only contain 0 and 1")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Response":
        return cls(rng.integers(0, 2, size=n, dtype=np.uint8))

    def xor(self, other) -> "Response":
        other = np.asarray(other, dtype=np.uint8)
        if other.shape != self.bits.shape:
            raise ValueError(f"Cannot combine length {self.n} with length {other.shape}")
        return Response(self.bits ^ other)

    def __array__(self, dtype=None, copy=None):
        return self.bits if dtype is None else self.bits.astype(dtype)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Response):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Response(n={self.n}, hex={bits_to_hex(self.bits)})"


def as_response(v: Union[Response, Sequence[int], np.ndarray]) -> Response:
    return v if isinstance(v, Response) else Response(np.asarray(v))


_SOURCE_PATTERN = re.compile(r"^\s*(EG|PG|RS)\s*\(\s*(\d+)\s*,\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$")


@dataclass(frozen=True)
class SourceSpec:
    """
    One base construction that rows are drawn from.

    EG(m,q) and PG(m,q) are geometry incidence matrices; RS(q,rho[,gamma])
    stacks gamma cosets of the shortened RS base over GF(q) (gamma defaults
    to q).
    """

    kind: str
    a: int
    b: int
    gamma: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("EG", "PG", "RS"):
            raise ValueError(f"Unknown source kind '{self.kind}'")
        if self.kind != "RS" and self.gamma is not None:
            raise ValueError(f"{self.kind} sources take no gamma parameter")

    @classmethod
    def parse(cls, text: str) -> "SourceSpec":
        """Parse 'EG(2,4)', 'PG(2,3)', 'RS(16,8)' or 'RS(16,8,4)'."""
        match = _SOURCE_PATTERN.match(text)
        if not match:
            raise ValueError(f"Cannot parse source '{text}' (expected e.g. EG(2,4) or RS(16,8))")
        kind, a, b, gamma = match.groups()
        return cls(kind, int(a), int(b), int(gamma) if gamma else None)

    @property
    def name(self) -> str:
        if self.kind == "RS" and self.gamma is not None and self.gamma != self.a:
            return f"RS({self.a},{self.b},{self.gamma})"
        return f"{self.kind}({self.a},{self.b})"

    def __str__(self) -> str:
        return self.name

    @property
    def n_cols(self) -> int:
        if self.kind == "RS":
            return self.a * self.b
        return geometry_counts(self.kind, self.a, self.b)[0]

    @property
    def row_weight(self) -> int:
        if self.kind == "RS":
            return self.b
        return geometry_counts(self.kind, self.a, self.b)[1]

    def iter_rows(self) -> Iterator[Row]:
        """Stream the rows of the base matrix in construction order."""
        if self.kind == "RS":
            base = _rs_base(self.a, self.b)
            gamma = self.gamma if self.gamma is not None else base.q
            if not 1 <= gamma <= base.q:
                raise ValueError(f"gamma must satisfy 1 <= gamma <= {base.q}, got {gamma}")
            for coset in base.cosets[:gamma]:
                for c in coset:
                    yield z_positions(c, base.field)
        else:
            yield from _geometry(self.kind, self.a, self.b).lines

    def build(self) -> SparseBinaryMatrix:
        rows = tuple(self.iter_rows())
        return SparseBinaryMatrix(len(rows), self.n_cols, rows)


@lru_cache(maxsize=32)
def _geometry(kind: str, m: int, q: int) -> Geometry:
    return build_geometry(kind, m, q)


@lru_cache(maxsize=32)
def _rs_base(q: int, rho: int) -> RsBase:
    return build_base(q, rho)


def default_sources(n: int) -> List[SourceSpec]:
    """
    All base constructions of width n: EG by descending q, then PG, then RS
    by descending rho with gamma = q. Sources whose rows have weight 2 (plain
    point pairs) are moved to the end as fallbacks.
    """
    sources = [SourceSpec(kind, m, q) for kind, m, q in find_geometries(n)]
    sources += [SourceSpec("RS", q, rho) for q, rho in find_rs_parameters(n)]
    primary = [s for s in sources if s.row_weight > 2]
    fallback = [s for s in sources if s.row_weight <= 2]
    return primary + fallback


@dataclass(frozen=True)
class ConstructionConfig:
    """
    Knobs of the instance-code construction.

    Attributes:
        target_k: Desired code dimension, 0 < target_k < n
        sources: Ordered base constructions (default_sources(n) when None)
        max_rows: Cap on the number of rows of H (4 * (n - target_k) when None)
        combo_weight_cap: Largest row weight of an added combination
            (twice the largest source row weight when None)
        min_col_weight: Balancing target (median column weight before
            balancing when None)
        balance_rows: Rows held back for balancing (n // 8 when None)
        seed: Seed of the construction RNG
    """

    target_k: int
    sources: Optional[Tuple[SourceSpec, ...]] = None
    max_rows: Optional[int] = None
    combo_weight_cap: Optional[int] = None
    min_col_weight: Optional[int] = None
    balance_rows: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.sources is not None:
            parsed = tuple(s if isinstance(s, SourceSpec) else SourceSpec.parse(str(s))
                           for s in self.sources)
            object.__setattr__(self, "sources", parsed)
        for name in ("max_rows", "combo_weight_cap", "min_col_weight", "balance_rows"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")

    def resolve(self, n: int) -> "ConstructionConfig":
        """
        Validate against length n and fill every data-independent default.

        Raises:
            ValueError: if target_k is out of range
            IncompatibleLengthError: if no source has width n
        """
        if not 0 < self.target_k < n:
            raise ValueError(f"target_k must satisfy 0 < target_k < n={n}, got {self.target_k}")
        if n > MAX_CODE_LENGTH:
            raise ValueError(f"Code length {n} exceeds the supported maximum {MAX_CODE_LENGTH}")
        sources = self.sources if self.sources is not None else tuple(default_sources(n))
        if not sources:
            raise IncompatibleLengthError(f"No EG, PG or RS construction has length {n}")
        wrong = [s.name for s in sources if s.n_cols != n]
        if wrong:
            raise IncompatibleLengthError(f"Sources {wrong} do not have length {n}")
        rank_target = n - self.target_k
        max_rows = self.max_rows if self.max_rows is not None else 4 * rank_target
        if max_rows < rank_target:
            raise ValueError(f"max_rows={max_rows} is below the target rank {rank_target}")
        return replace(
            self,
            sources=tuple(sources),
            max_rows=max_rows,
            combo_weight_cap=(self.combo_weight_cap if self.combo_weight_cap is not None
                              else 2 * max(s.row_weight for s in sources)),
            balance_rows=self.balance_rows if self.balance_rows is not None else n // 8,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["sources"] = [s.name for s in self.sources] if self.sources is not None else None
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConstructionConfig":
        known = {k: data[k] for k in ("target_k", "sources", "max_rows", "combo_weight_cap",
                                      "min_col_weight", "balance_rows", "seed") if k in data}
        if "target_k" not in known:
            raise ValueError("Construction config requires 'target_k'")
        if known.get("sources") is not None:
            known["sources"] = tuple(SourceSpec.parse(s) for s in known["sources"])
        return cls(**known)


@dataclass(frozen=True)
class RowProvenance:
    """
    Where a row of H came from.

    Attributes:
        stage: "source", "combination" or "balance"
        source: Name of the base construction ("" for combinations)
        parents: Row indices of the XOR-ed rows for combinations
    """

    stage: str
    source: str = ""
    parents: Tuple[int, ...] = ()

    @property
    def tag(self) -> str:
        text = f"{self.stage}:{self.source}" if self.source else self.stage
        if self.parents:
            text += ":" + "+".join(str(p) for p in self.parents)
        return text

    @classmethod
    def parse(cls, tag: str) -> "RowProvenance":
        parts = tag.split(":")
        stage = parts[0]
        source = ""
        parents: Tuple[int, ...] = ()
        for part in parts[1:]:
            if re.fullmatch(r"\d+(\+\d+)*", part):
                parents = tuple(int(x) for x in part.split("+"))
            else:
                source = part
        return cls(stage, source, parents)


def _is_dual(row: Row, bits: np.ndarray) -> bool:
    return not (int(bits[list(row)].sum()) & 1) if row else True


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class DualRowPool:
    """
    Rows that are all dual to one bound response.

    Attributes:
        response: The bound response r_I
        rows: Rows of H so far
        provenance: One tag per row
        candidates: Dual rows not in H yet (used by balancing)
        rank_cap: Rank the pool must not exceed (n - target_k), if any;
            enforced by balance_columns (combinations stay in the row span)
        unreachable: Columns balancing could not lift to its target
    """

    response: Response
    rows: Tuple[Row, ...]
    provenance: Tuple[RowProvenance, ...]
    candidates: Tuple[Tuple[Row, RowProvenance], ...] = ()
    rank_cap: Optional[int] = None
    unreachable: Tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.rows) != len(self.provenance):
            raise ValueError(f"{len(self.rows)} rows but {len(self.provenance)} provenance tags")
        bits = self.response.bits
        for row in list(self.rows) + [c[0] for c in self.candidates]:
            if not _is_dual(row, bits):
                raise ValueError(f"Row {row} is not dual to the bound response")

    @property
    def n(self) -> int:
        return self.response.n

    def __len__(self) -> int:
        return len(self.rows)

    def matrix(self) -> SparseBinaryMatrix:
        return SparseBinaryMatrix(len(self.rows), self.n, self.rows)

    def col_weights(self) -> np.ndarray:
        return self.matrix().col_weights()

    @property
    def col_weight_spread(self) -> int:
        weights = self.col_weights()
        return int(weights.max() - weights.min()) if len(weights) else 0

    def rank(self) -> int:
        return rank_gf2(self.matrix())


def filter_dual_rows(base: Union[SparseBinaryMatrix, SourceSpec], r_I, source: str = "base") -> DualRowPool:
    """
    Keep the rows b of a base matrix with <b, r_I> = 0.

    Args:
        base: Base parity-check matrix, or a source whose rows are streamed
        r_I: Response the pool is bound to
        source: Provenance name for the kept rows

    Returns:
        DualRowPool with the kept rows in base order
    """
    r = as_response(r_I)
    if base.n_cols != r.n:
        raise ValueError(f"Base width {base.n_cols} does not match response length {r.n}")
    if isinstance(base, SourceSpec):
        source = base.name
        stream = base.iter_rows()
    else:
        stream = iter(base.rows)
    rows = tuple(row for row in stream if _is_dual(row, r.bits))
    return DualRowPool(r, rows, tuple(RowProvenance("source", source) for _ in rows))


def augment_combinations(pool: DualRowPool, cfg: ConstructionConfig,
                         rng: np.random.Generator) -> DualRowPool:
    """
    Append XOR combinations of row pairs.

    All pairs are visited in one RNG-shuffled order. A combination is kept
    when it is nonzero, has weight <= combo_weight_cap and is not already a
    row. Each pass lets a row be a parent at most `limit` times, starting
    from the share 2 * budget / len(pool) and doubling while the budget is
    not filled, so new rows spread over all parents. Stops at cfg.max_rows
    (no cap when None).

    Args:
        pool: Pool to extend
        cfg: Supplies combo_weight_cap and max_rows
        rng: Source of the pair order

    Returns:
        New pool; unchanged if no admissible pair exists
    """
    if not pool.rows:
        raise ValueError("Cannot combine rows of an empty pool")
    cap = cfg.combo_weight_cap
    if cap is None:
        cap = 2 * max(len(r) for r in pool.rows)
    size = len(pool.rows)
    n_pairs = size * (size - 1) // 2
    budget = (cfg.max_rows - size) if cfg.max_rows is not None else n_pairs
    if budget <= 0 or n_pairs == 0:
        return pool

    packed = [to_bits(r) for r in pool.rows]
    existing = set(packed)
    first, second = (idx.tolist() for idx in np.triu_indices(size, k=1))
    order = rng.permutation(n_pairs).tolist()
    uses = [0] * size
    taken = [False] * n_pairs
    new_rows: List[Row] = []
    new_prov: List[RowProvenance] = []

    limit = max(1, -(-2 * budget // size))
    while len(new_rows) < budget:
        for idx in order:
            if taken[idx]:
                continue
            a, b = first[idx], second[idx]
            if uses[a] >= limit or uses[b] >= limit:
                continue
            taken[idx] = True
            combined = packed[a] ^ packed[b]
            if not combined or combined in existing or _popcount(combined) > cap:
                continue
            existing.add(combined)
            uses[a] += 1
            uses[b] += 1
            new_rows.append(from_bits(combined))
            new_prov.append(RowProvenance("combination", "", (a, b)))
            if len(new_rows) >= budget:
                break
        if limit >= size:
            break
        limit *= 2

    if not new_rows:
        return pool
    return replace(pool, rows=pool.rows + tuple(new_rows),
                   provenance=pool.provenance + tuple(new_prov))


def balance_columns(pool: DualRowPool, cfg: ConstructionConfig) -> DualRowPool:
    """
    Greedily add dual rows covering columns of weight < min_col_weight.

    Each step takes the candidate row covering the most deficient columns
    (earliest candidate on ties). When no candidate helps, it searches
    combinations a XOR b where a covers the lightest deficient column and
    b does not, within combo_weight_cap. Stops when every column reaches
    the target, no admissible row exists, or max_rows is hit. Candidates
    that would lift the rank above pool.rank_cap are skipped.

    Returns:
        New pool whose `unreachable` lists columns still below target
    """
    if not pool.rows:
        raise ValueError("Cannot balance an empty pool")
    weights = pool.col_weights()
    target = cfg.min_col_weight
    if target is None:
        target = int(np.median(weights))
    cap = cfg.combo_weight_cap if cfg.combo_weight_cap is not None else 2 * max(len(r) for r in pool.rows)
    budget = (cfg.max_rows - len(pool.rows)) if cfg.max_rows is not None else None

    rows = list(pool.rows)
    prov = list(pool.provenance)
    candidates = list(pool.candidates)
    existing = {to_bits(r) for r in rows}
    basis = None
    if pool.rank_cap is not None:
        basis = Gf2Basis(pool.n)
        for row in rows:
            basis.add(to_bits(row))
        if basis.rank > pool.rank_cap:
            raise ValueError(f"Pool rank {basis.rank} already exceeds its cap {pool.rank_cap}")
    col_rows: List[List[int]] = [[] for _ in range(pool.n)]
    for idx, row in enumerate(rows):
        for c in row:
            col_rows[c].append(idx)

    def add(row: Row, tag: RowProvenance) -> None:
        idx = len(rows)
        rows.append(row)
        prov.append(tag)
        existing.add(to_bits(row))
        if basis is not None:
            basis.add(to_bits(row))
        for c in row:
            col_rows[c].append(idx)
            weights[c] += 1

    while budget is None or len(rows) - len(pool.rows) < budget:
        deficient = np.flatnonzero(weights < target)
        if deficient.size == 0:
            break
        mask = to_bits(deficient.tolist())

        best_idx, best_score = -1, 0
        for idx, (row, _) in enumerate(candidates):
            packed = to_bits(row)
            if packed in existing:
                continue
            if basis is not None and basis.rank >= pool.rank_cap and not basis.contains(packed):
                continue
            score = _popcount(packed & mask)
            if score > best_score:
                best_idx, best_score = idx, score
        if best_idx >= 0:
            row, tag = candidates.pop(best_idx)
            add(row, RowProvenance("balance", tag.source, tag.parents))
            continue

        found = None
        for c in sorted(deficient.tolist(), key=lambda col: (weights[col], col)):
            best_pair, best_score = None, 0
            for a in col_rows[c]:
                packed_a = to_bits(rows[a])
                for b in range(len(rows)):
                    if b == a or c in rows[b]:
                        continue
                    combined = packed_a ^ to_bits(rows[b])
                    if combined in existing or _popcount(combined) > cap:
                        continue
                    score = _popcount(combined & mask)
                    if score > best_score:
                        best_pair, best_score = (combined, tuple(sorted((a, b)))), score
            if best_pair is not None:
                found = best_pair
                break
        if found is None:
            break
        add(from_bits(found[0]), RowProvenance("balance", "", found[1]))

    unreachable = tuple(int(c) for c in np.flatnonzero(weights < target))
    return replace(pool, rows=tuple(rows), provenance=tuple(prov),
                   candidates=tuple(candidates), unreachable=unreachable)


@dataclass(frozen=True, eq=False)
class InstanceCode:
    """
    Per-instance LDPC code whose codewords include the enrolled response.

    Attributes:
        H: Parity-check matrix
        rank: GF(2) rank of H
        provenance: One tag per row of H
        config: Construction config with every default filled in
        unreachable: Columns balancing could not lift
    """

    H: SparseBinaryMatrix
    rank: int
    provenance: Tuple[RowProvenance, ...]
    config: Optional[ConstructionConfig] = None
    unreachable: Tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.H.n_cols

    @property
    def k(self) -> int:
        return self.n - self.rank

    @property
    def n_rows(self) -> int:
        return self.H.n_rows

    @property
    def shortfall(self) -> bool:
        """True if the achieved dimension exceeds the configured target."""
        return self.config is not None and self.k > self.config.target_k

    @property
    def code_ref(self) -> str:
        return matrix_ref(self.H)

    def provenance_counts(self) -> Dict[str, int]:
        counts = Counter(p.source if p.stage == "source" else p.stage for p in self.provenance)
        return dict(sorted(counts.items()))

    def is_codeword(self, v) -> bool:
        return not syndrome(self.H, np.asarray(v, dtype=np.uint8)).any()

    def decoder(self, max_iters: Optional[int] = None) -> BitflipDecoder:
        return BitflipDecoder(self.H, max_iters=max_iters)


def matrix_ref(H: SparseBinaryMatrix) -> str:
    """Short content hash identifying a public code."""
    digest = hashlib.sha256(f"{H.n_rows} {H.n_cols}".encode("ascii"))
    for row in H.rows:
        digest.update((",".join(map(str, row)) + ";").encode("ascii"))
    return digest.hexdigest()[:16]


def build_instance_code(r_I, cfg: ConstructionConfig, verbose: bool = False,
                        strict: bool = False) -> InstanceCode:
    """
    Build a parity-check matrix that has r_I as a codeword.

    Sources are visited in order; their dual rows are shuffled and added
    while they raise the rank, up to n - target_k. Dependent dual rows are
    kept in a per-source reserve and added round-robin afterwards, followed
    by pairwise combinations and column balancing, all capped by max_rows.

    Args:
        r_I: Enrolled response
        cfg: Construction config
        verbose: Print stage summaries
        strict: Raise RankShortfallError if the target rank is unreachable

    Returns:
        InstanceCode with syndrome(H, r_I) = 0
    """
    r = as_response(r_I)
    cfg = cfg.resolve(r.n)
    rng = np.random.default_rng(cfg.seed)
    n = r.n
    rank_target = n - cfg.target_k
    fill_limit = max(rank_target, cfg.max_rows - cfg.balance_rows)

    if verbose and r.weight == 0:
        print("Warning: all-zero response is a degenerate (weak) key")

    basis = Gf2Basis(n)
    rows: List[Row] = []
    prov: List[RowProvenance] = []
    seen = set()
    reserves: List[deque] = []

    for source in tqdm(cfg.sources, desc="Sources", disable=not verbose):
        reserve_size = sum(len(q) for q in reserves)
        if basis.rank >= rank_target and reserve_size >= fill_limit - len(rows):
            break
        dual = filter_dual_rows(source, r).rows
        reserve: deque = deque()
        for idx in rng.permutation(len(dual)):
            row = dual[idx]
            if row in seen:
                continue
            seen.add(row)
            packed = to_bits(row)
            tag = RowProvenance("source", source.name)
            if basis.rank < rank_target:
                if basis.add(packed):
                    rows.append(row)
                    prov.append(tag)
                else:
                    reserve.append((row, tag))
            elif basis.contains(packed):
                reserve.append((row, tag))
        reserves.append(reserve)
        if verbose:
            print(f"  {source.name}: {len(dual)} dual rows, rank {basis.rank}/{rank_target}")

    while len(rows) < fill_limit and any(reserves):
        for reserve in reserves:
            if reserve and len(rows) < fill_limit:
                row, tag = reserve.popleft()
                rows.append(row)
                prov.append(tag)

    leftover = tuple(item for reserve in reserves for item in reserve)
    pool = DualRowPool(r, tuple(rows), tuple(prov), candidates=leftover, rank_cap=rank_target)
    if pool.rows:
        pool = augment_combinations(pool, replace(cfg, max_rows=fill_limit), rng)
        if cfg.min_col_weight is None:
            cfg = replace(cfg, min_col_weight=int(np.median(pool.col_weights())))
        pool = balance_columns(pool, cfg)

    H = pool.matrix()
    code = InstanceCode(H=H, rank=rank_gf2(H), provenance=pool.provenance, config=cfg,
                        unreachable=pool.unreachable)

    if verbose:
        print(f"  rows={code.n_rows}, rank={code.rank}, k={code.k}, "
              f"spread={pool.col_weight_spread if pool.rows else 0}")
        if pool.unreachable:
            print(f"Warning: {len(pool.unreachable)} columns stay below weight {cfg.min_col_weight}")
    if code.shortfall:
        if verbose:
            print(f"Warning: target k={cfg.target_k} unreachable, achieved k={code.k}")
        if strict:
            raise RankShortfallError(code)
    return code


def instance_enroll(r_I, cfg: ConstructionConfig, verbose: bool = False) -> InstanceCode:
    """Enrollment of the helper-data-free scheme: only the public code is stored."""
    return build_instance_code(r_I, cfg, verbose=verbose)


def instance_reproduce(code: Union[InstanceCode, BitflipDecoder], readouts: Sequence,
                       delta1: float = 10.0, delta2: float = 6.0,
                       max_iters: Optional[int] = None) -> Response:
    """
    Recover r_I from one or more noisy readouts.

    Raises:
        ReproductionError: if no readout decodes to a codeword
    """
    decoder = code.decoder(max_iters) if isinstance(code, InstanceCode) else code
    result = reproduce_multi(decoder, list(readouts), delta1, delta2, max_iters=max_iters)
    if not result.converged:
        raise ReproductionError(f"Decoding stopped ({result.stop_reason}) with syndrome "
                                f"weight {result.syndrome_weight}", result)
    return Response(result.word)


def count_codewords(H: SparseBinaryMatrix) -> int:
    """Count codewords of H by enumerating all 2^n vectors (n <= 20)."""
    return len(enumerate_codewords(H))


def enumerate_codewords(H: SparseBinaryMatrix) -> np.ndarray:
    """
    All codewords of H as packed integers (bit c = column c).
    """
    n = H.n_cols
    if n > MAX_ENUMERATION_LENGTH:
        raise ValueError(f"Brute-force enumeration is limited to n <= {MAX_ENUMERATION_LENGTH}, got {n}")
    words = np.arange(1 << n, dtype=np.uint32)
    ok = np.ones(len(words), dtype=bool)
    for mask in set(H.bit_rows()):
        v = words & np.uint32(mask)
        for shift in (16, 8, 4, 2, 1):
            v ^= v >> np.uint32(shift)
        ok &= (v & np.uint32(1)) == 0
    return words[ok]


def pack_vector(v) -> int:
    """Pack a binary vector into an int with bit c = position c."""
    return to_bits(np.flatnonzero(np.asarray(v, dtype=np.uint8)).tolist())


def random_codeword(H: SparseBinaryMatrix, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random codeword of H."""
    basis = nullspace_gf2(H)
    if len(basis) == 0:
        return np.zeros(H.n_cols, dtype=np.uint8)
    coeffs = rng.integers(0, 2, size=len(basis))
    return (coeffs @ basis % 2).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class HelperData:
    """
    Public helper data of the baseline sketches.

    Attributes:
        kind: "code-offset" (h = r_I + c) or "syndrome" (h = H r_I^T)
        payload: Binary vector of length n or n_rows respectively
        code_ref: Identifier of the public code
    """

    kind: str
    payload: np.ndarray
    code_ref: str

    KINDS = ("code-offset", "syndrome")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"Unknown helper data kind '{self.kind}'")
        payload = np.asarray(self.payload, dtype=np.uint8)
        if payload.ndim != 1:
            raise ValueError(f"Helper payload must be 1-D, got shape {payload.shape}")
        object.__setattr__(self, "payload", payload)

    @property
    def length(self) -> int:
        return len(self.payload)

    def check(self, H: SparseBinaryMatrix) -> None:
        expected = H.n_cols if self.kind == "code-offset" else H.n_rows
        if self.length != expected:
            raise ValueError(f"{self.kind} helper data has length {self.length}, expected {expected}")


def _matrix_of(code: Union[InstanceCode, SparseBinaryMatrix, BitflipDecoder]) -> SparseBinaryMatrix:
    if isinstance(code, InstanceCode):
        return code.H
    if isinstance(code, BitflipDecoder):
        return code.H
    return code


def _decoder_of(decoder) -> BitflipDecoder:
    if isinstance(decoder, BitflipDecoder):
        return decoder
    return BitflipDecoder(_matrix_of(decoder))


def code_offset_enroll(r_I, code, rng: np.random.Generator) -> HelperData:
    """
    Code-offset enrollment: h = r_I + c for a uniformly random codeword c.
    """
    r = as_response(r_I)
    H = _matrix_of(code)
    if H.n_cols != r.n:
        raise ValueError(f"Code length {H.n_cols} does not match response length {r.n}")
    c = random_codeword(H, rng)
    return HelperData("code-offset", r.bits ^ c, matrix_ref(H))


def code_offset_reproduce(r, h: HelperData, decoder,
                          soft: Optional[SoftWeights] = None) -> Response:
    """
    Decode r + h to a codeword c' and return c' + h.

    Raises:
        ReproductionError: if decoding does not converge
    """
    if h.kind != "code-offset":
        raise ValueError(f"Expected code-offset helper data, got '{h.kind}'")
    decoder = _decoder_of(decoder)
    h.check(decoder.H)
    r = as_response(r)
    result = decoder.decode(r.bits ^ h.payload, soft=soft)
    if not result.converged:
        raise ReproductionError(f"Code-offset reproduction failed ({result.stop_reason})", result)
    return Response(result.word ^ h.payload)


def syndrome_enroll(r_I, H) -> HelperData:
    """Syndrome enrollment: h = H r_I^T."""
    r = as_response(r_I)
    H = _matrix_of(H)
    if H.n_cols != r.n:
        raise ValueError(f"Code length {H.n_cols} does not match response length {r.n}")
    return HelperData("syndrome", syndrome(H, r.bits), matrix_ref(H))


def syndrome_reproduce(r, h: HelperData, decoder,
                       soft: Optional[SoftWeights] = None) -> Response:
    """
    Estimate e from H r^T + h = H e^T and return r + e.

    Raises:
        ReproductionError: if no error pattern with that syndrome is found
    """
    if h.kind != "syndrome":
        raise ValueError(f"Expected syndrome helper data, got '{h.kind}'")
    decoder = _decoder_of(decoder)
    h.check(decoder.H)
    r = as_response(r)
    s = syndrome(decoder.H, r.bits) ^ h.payload
    result = decoder.decode_syndrome(s, soft=soft)
    if not result.converged:
        raise ReproductionError(f"Syndrome reproduction failed ({result.stop_reason})", result)
    return Response(r.bits ^ result.word)


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".yaml")


def write_instance_code(code: InstanceCode, path: Union[str, Path]) -> Path:
    """
    Write H in the coordinate format plus a YAML header next to it.

    Returns:
        Path of the header file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_matrix(code.H, path)
    header = {
        "n": code.n,
        "k": code.k,
        "rank": code.rank,
        "rows": code.n_rows,
        "target_k": code.config.target_k if code.config else None,
        "seed": code.config.seed if code.config else None,
        "shortfall": code.shortfall,
        "code_ref": code.code_ref,
        "provenance_counts": code.provenance_counts(),
        "unreachable_columns": list(code.unreachable),
        "config": code.config.to_dict() if code.config else None,
        "row_sources": [p.tag for p in code.provenance],
    }
    sidecar = _sidecar_path(path)
    with open(sidecar, "w") as f:
        yaml.safe_dump(header, f, sort_keys=False, default_flow_style=None)
    return sidecar


def read_instance_code(path: Union[str, Path]) -> InstanceCode:
    """
    Read a code written by write_instance_code.

    A bare matrix file without header is accepted; its rows are tagged
    "external".
    """
    path = Path(path)
    H = read_matrix(path)
    sidecar = _sidecar_path(path)
    rank = rank_gf2(H)
    if not sidecar.exists():
        return InstanceCode(H, rank, tuple(RowProvenance("external") for _ in H.rows))

    with open(sidecar) as f:
        header = yaml.safe_load(f) or {}
    tags = header.get("row_sources") or ["external"] * H.n_rows
    if len(tags) != H.n_rows:
        raise ValueError(f"{sidecar}: {len(tags)} row tags for {H.n_rows} rows")
    if header.get("n") not in (None, H.n_cols) or header.get("rank") not in (None, rank):
        raise ValueError(f"{sidecar}: header does not match matrix {path}")
    config = ConstructionConfig.from_dict(header["config"]) if header.get("config") else None
    return InstanceCode(H, rank, tuple(RowProvenance.parse(t) for t in tags), config=config,
                        unreachable=tuple(header.get("unreachable_columns") or ()))


def write_helper_data(h: HelperData, path: Union[str, Path]) -> Path:
    """One line: `<kind> <length> <hex payload> <code_ref>`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = bits_to_hex(h.payload) or "-"
    path.write_text(f"{h.kind} {h.length} {payload} {h.code_ref}\n")
    return path


def read_helper_data(path: Union[str, Path]) -> HelperData:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Helper data file not found: {path}")
    parts = path.read_text().split()
    if len(parts) != 4:
        raise ValueError(f"{path}: expected '<kind> <length> <hex> <code_ref>'")
    kind, length, payload, code_ref = parts
    try:
        length = int(length)
    except ValueError:
        raise ValueError(f"{path}: invalid length '{length}'")
    bits = hex_to_bits("" if payload == "-" else payload, length)
    return HelperData(kind, bits, code_ref)


def code_stats(code: InstanceCode) -> Dict[str, Any]:
    """Summary numbers of an instance code."""
    stats = matrix_stats(code.H)
    return {
        "n": code.n,
        "k": code.k,
        "rows": code.n_rows,
        "rank": code.rank,
        "density": stats.density,
        "col_weight_spread": stats.col_weight_spread,
        "min_col_weight": min(stats.col_weights) if stats.col_weights else 0,
        "max_row_weight": max(stats.row_weights) if stats.row_weights else 0,
    }
