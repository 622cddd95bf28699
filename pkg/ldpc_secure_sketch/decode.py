"""
Bitflip decoding with optional multi-readout soft information.

Each iteration flips the position j minimising
    eps_i = WT(r + u_i) + Delta_i,
where WT is the Hamming weight of the syndrome. WT(r + u_i) is not
recomputed from scratch: with w = WT(r), gamma_i the weight of column i and
unsat_i the number of unsatisfied checks containing i,
    WT(r + u_i) = w + gamma_i - 2 * unsat_i,
and a flip only touches the checks of one column.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .sparsemat import SparseBinaryMatrix, syndrome


@dataclass(frozen=True)
class SoftWeights:
    """
    Per-position flip penalties.

    Attributes:
        delta: Penalty Delta_i added to every flip score
        delta1: Penalty where all readouts agree
        delta2: Penalty where readouts disagree
    """

    delta: np.ndarray
    delta1: float = 0.0
    delta2: float = 0.0

    @property
    def n(self) -> int:
        return len(self.delta)

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.delta == self.delta[0])) if self.n else True

    @property
    def unstable_positions(self) -> np.ndarray:
        """Positions where the readouts disagreed."""
        if self.delta1 == self.delta2:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(self.delta == self.delta2)


@dataclass
class DecodeResult:
    """
    Outcome of one bitflip run.

    Attributes:
        word: Final vector
        converged: True iff the final syndrome weight is 0
        iterations: Number of flips performed
        syndrome_weight: Final syndrome weight
        trace: (flipped position, syndrome weight after the flip) per iteration
        stop_reason: "converged", "max_iters" or "cycle"
    """

    word: np.ndarray
    converged: bool
    iterations: int
    syndrome_weight: int
    trace: List[Tuple[int, int]] = field(default_factory=list)
    stop_reason: str = "converged"


@dataclass(frozen=True)
class FlipScore:
    """Flip scores eps_i = WT(r + u_i) + Delta_i of one iteration."""

    epsilon: np.ndarray

    @property
    def best(self) -> int:
        """Position of the minimal score, lowest index on ties."""
        return int(np.argmin(self.epsilon))


def _as_bits(v, n: Optional[int] = None) -> np.ndarray:
    bits = np.asarray(v, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError(f"Expected a 1-D binary vector, got shape {bits.shape}")
    if n is not None and len(bits) != n:
        raise ValueError(f"Vector length {len(bits)} does not match code length {n}")
    return bits % 2


def uniform_soft(n: int) -> SoftWeights:
    """Delta = 0 everywhere (single-readout mode)."""
    return SoftWeights(delta=np.zeros(n, dtype=np.float64))


def derive_soft(readouts: Sequence, delta1: float, delta2: float) -> SoftWeights:
    """
    Soft information from m readouts of the same response.

    Args:
        readouts: m >= 2 binary vectors of equal length
        delta1: Penalty where all readouts agree
        delta2: Penalty elsewhere, 0 < delta2 < delta1

    Returns:
        SoftWeights with Delta_i in {delta1, delta2}
    """
    if len(readouts) < 2:
        raise ValueError(f"Soft information needs at least 2 readouts, got {len(readouts)}")
    if not delta1 > delta2 > 0:
        raise ValueError(f"Require delta1 > delta2 > 0, got delta1={delta1}, delta2={delta2}")
    stack = [_as_bits(r) for r in readouts]
    lengths = {len(r) for r in stack}
    if len(lengths) != 1:
        raise ValueError(f"Readouts have unequal lengths: {sorted(lengths)}")
    stack = np.vstack(stack)
    agree = np.all(stack == stack[0], axis=0)
    delta = np.where(agree, float(delta1), float(delta2))
    return SoftWeights(delta=delta, delta1=float(delta1), delta2=float(delta2))


class BitflipDecoder:
    """
    Bitflip decoder bound to one parity-check matrix.

    The row and column adjacency of H is built once so repeated decodes
    (Monte Carlo sweeps, multi-readout reproduction) reuse it. Decoding is
    a pure function of its inputs; one instance may serve concurrent calls.
    """

    def __init__(self, H: SparseBinaryMatrix, max_iters: Optional[int] = None,
                 detect_cycles: bool = True):
        """
        Args:
            H: Parity-check matrix
            max_iters: Flip budget per decode (default n)
            detect_cycles: Stop as soon as a word repeats
        """
        if max_iters is not None and max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {max_iters}")
        self.H = H
        self.n = H.n_cols
        self.max_iters = max_iters if max_iters is not None else max(1, H.n_cols)
        self.detect_cycles = detect_cycles
        self._row_cols = [np.array(row, dtype=np.int64) for row in H.rows]
        self._col_rows = [np.array(c, dtype=np.int64) for c in H.transpose().rows]
        self._col_weights = H.col_weights()
        self._csc = H.to_csr().T.tocsr() if H.n_rows else None

    def syndrome_weight(self, v) -> int:
        return int(syndrome(self.H, _as_bits(v, self.n)).sum())

    def _unsat_counts(self, s: np.ndarray) -> np.ndarray:
        if self._csc is None:
            return np.zeros(self.n, dtype=np.int64)
        return np.asarray(self._csc @ s.astype(np.int64), dtype=np.int64)

    def flip_scores(self, r, soft: Optional[SoftWeights] = None) -> FlipScore:
        """Scores of every candidate flip for the current word r."""
        r = _as_bits(r, self.n)
        soft = self._check_soft(soft)
        s = syndrome(self.H, r)
        w = int(s.sum())
        epsilon = w + self._col_weights - 2 * self._unsat_counts(s) + soft.delta
        return FlipScore(epsilon=epsilon)

    def _check_soft(self, soft: Optional[SoftWeights]) -> SoftWeights:
        if soft is None:
            return uniform_soft(self.n)
        if soft.n != self.n:
            raise ValueError(f"Soft information length {soft.n} does not match code length {self.n}")
        return soft

    def _run(self, word: np.ndarray, s: np.ndarray, soft: SoftWeights,
             max_iters: int, keep_trace: bool) -> DecodeResult:
        word = word.copy()
        s = s.astype(np.uint8).copy()
        w = int(s.sum())
        unsat = self._unsat_counts(s)
        delta = soft.delta
        trace: List[Tuple[int, int]] = []
        visited = {np.packbits(word).tobytes()} if self.detect_cycles else None
        iterations = 0
        stop_reason = "converged"

        while w:
            if iterations >= max_iters:
                stop_reason = "max_iters"
                break
            epsilon = w + self._col_weights - 2 * unsat + delta
            j = int(np.argmin(epsilon))
            word[j] ^= 1
            for c in self._col_rows[j]:
                s[c] ^= 1
                if s[c]:
                    w += 1
                    unsat[self._row_cols[c]] += 1
                else:
                    w -= 1
                    unsat[self._row_cols[c]] -= 1
            iterations += 1
            if keep_trace:
                trace.append((j, w))
            if visited is not None and w:
                key = np.packbits(word).tobytes()
                if key in visited:
                    stop_reason = "cycle"
                    break
                visited.add(key)

        return DecodeResult(word=word, converged=w == 0, iterations=iterations,
                            syndrome_weight=w, trace=trace, stop_reason=stop_reason)

    def decode(self, r, soft: Optional[SoftWeights] = None, trace: bool = False,
               max_iters: Optional[int] = None) -> DecodeResult:
        """
        Decode a received word.

        Args:
            r: Received binary vector of length n
            soft: Flip penalties (uniform when None)
            trace: Record every flip
            max_iters: Override the decoder's flip budget

        Returns:
            DecodeResult whose word is a codeword when converged
        """
        r = _as_bits(r, self.n)
        soft = self._check_soft(soft)
        budget = max_iters if max_iters is not None else self.max_iters
        return self._run(r, syndrome(self.H, r), soft, budget, trace)

    def decode_syndrome(self, s, soft: Optional[SoftWeights] = None, trace: bool = False,
                        max_iters: Optional[int] = None) -> DecodeResult:
        """
        Search a low-weight e with H e^T = s, starting from e = 0.

        Args:
            s: Target syndrome of length n_rows
            soft: Flip penalties (uniform when None)

        Returns:
            DecodeResult whose word is the error estimate
        """
        s = _as_bits(s, self.H.n_rows)
        soft = self._check_soft(soft)
        budget = max_iters if max_iters is not None else self.max_iters
        return self._run(np.zeros(self.n, dtype=np.uint8), s, soft, budget, trace)


DecoderLike = Union[SparseBinaryMatrix, BitflipDecoder]


def _decoder(H: DecoderLike, max_iters: Optional[int]) -> BitflipDecoder:
    if isinstance(H, BitflipDecoder):
        return H
    return BitflipDecoder(H, max_iters=max_iters)


def syndrome_weight(H: SparseBinaryMatrix, v) -> int:
    """Hamming weight of the syndrome of v."""
    return int(syndrome(H, v).sum())


def bitflip_decode(H: DecoderLike, r, soft: Optional[SoftWeights] = None,
                   max_iters: Optional[int] = None, trace: bool = False) -> DecodeResult:
    """Run the bitflip decoder once on r (see BitflipDecoder.decode)."""
    decoder = _decoder(H, max_iters)
    return decoder.decode(r, soft=soft, trace=trace, max_iters=max_iters)


def syndrome_decode(H: DecoderLike, s, soft: Optional[SoftWeights] = None,
                    max_iters: Optional[int] = None) -> DecodeResult:
    """Error estimate for a syndrome (see BitflipDecoder.decode_syndrome)."""
    decoder = _decoder(H, max_iters)
    return decoder.decode_syndrome(s, soft=soft, max_iters=max_iters)


def reproduce_multi(H: DecoderLike, readouts: Sequence, delta1: float, delta2: float,
                    max_iters: Optional[int] = None) -> DecodeResult:
    """
    Decode m readouts of one response with shared soft information.

    Readouts are decoded in order; the first converged result wins. If none
    converges, the result with the smallest final syndrome weight is
    returned (earliest readout on ties). A single readout is decoded with
    uniform soft information.

    Args:
        H: Parity-check matrix or a decoder bound to it
        readouts: m >= 1 binary vectors of equal length
        delta1: Penalty where all readouts agree
        delta2: Penalty where they disagree

    Returns:
        DecodeResult of the selected readout
    """
    if not readouts:
        raise ValueError("At least one readout is required")
    decoder = _decoder(H, max_iters)
    bits = [_as_bits(r) for r in readouts]
    lengths = {len(b) for b in bits}
    if len(lengths) != 1:
        raise ValueError(f"Readouts have unequal lengths: {sorted(lengths)}")
    soft = derive_soft(bits, delta1, delta2) if len(bits) > 1 else uniform_soft(decoder.n)

    best: Optional[DecodeResult] = None
    for r in bits:
        result = decoder.decode(r, soft=soft, max_iters=max_iters)
        if result.converged:
            return result
        if best is None or result.syndrome_weight < best.syndrome_weight:
            best = result
    return best
