"""
Channel model and block error evaluation.

The block error probability of a code at BSC crossover p is assembled from
per-weight decoder failure rates:

    P_Block(p) = sum_{i=0}^{i_max} P(i) * P_err(i)  [+ sum_{i>i_max} P(i)]

with P(i) = C(n,i) p^i (1-p)^(n-i). The bracketed tail is added in the
conservative policy, which counts every unsimulated weight as a failure.
"""

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, sqrt
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import binom
from tqdm import tqdm

from .decode import BitflipDecoder, reproduce_multi
from .sketch import HelperData, InstanceCode, Response, as_response
from .sparsemat import SparseBinaryMatrix
from .utils import detect_cpu_cores


TAIL_POLICIES = ("conservative", "truncated")
DEFAULT_TRIALS = 10_000


@dataclass(frozen=True)
class ChannelParams:
    """
    Binary symmetric channel seen by each readout.

    Attributes:
        p: Crossover probability in [0, 0.5]
        m: Readouts per reproduction
        seed: RNG seed
    """

    p: float
    m: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"Crossover probability must lie in [0, 0.5], got {self.p}")
        if self.m < 1:
            raise ValueError(f"At least one readout is required, got m={self.m}")


@dataclass(frozen=True)
class PerrEstimate:
    """Failure count of the decoder at one error weight (None for a BSC run)."""

    weight: Optional[int]
    trials: int
    failures: int
    exhaustive: bool = False

    @property
    def rate(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        if not self.trials:
            return 0.0
        r = self.rate
        return sqrt(r * (1.0 - r) / self.trials)


@dataclass
class SimReport:
    """
    Result of a block error simulation.

    Attributes:
        n: Code length
        per_weight: Weight i -> PerrEstimate for i = 0..i_max
        curve: (p, P_Block(p)) per grid point
        i_max: Largest simulated weight
        tail_policy: "conservative" or "truncated"
        label: Curve name used in comparisons
    """

    n: int
    per_weight: Dict[int, PerrEstimate]
    curve: List[Tuple[float, float]]
    i_max: int
    tail_policy: str
    label: str = "ldpc"
    params: Dict[str, object] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.curve, columns=["p", "p_block"])

    def per_weight_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"weight": i, "trials": e.trials, "failures": e.failures, "p_err": e.rate,
              "exhaustive": e.exhaustive} for i, e in sorted(self.per_weight.items())]
        )


def bsc_corrupt(r_I, params: ChannelParams,
                rng: Optional[np.random.Generator] = None) -> List[Response]:
    """
    m independent BSC(p) readouts of r_I.

    Args:
        r_I: Enrolled response
        params: Channel parameters
        rng: Generator to draw from (default_rng(params.seed) when None)

    Returns:
        List of m Responses
    """
    r = as_response(r_I)
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    flips = rng.random((params.m, r.n)) < params.p
    return [Response(r.bits ^ f.astype(np.uint8)) for f in flips]


def binomial_pmf(n: int, p: float) -> np.ndarray:
    """P(i) = C(n,i) p^i (1-p)^(n-i) for i = 0..n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Probability must lie in [0, 1], got {p}")
    return binom.pmf(np.arange(n + 1), n, p)


def _reference(code: InstanceCode, r_I) -> np.ndarray:
    if r_I is None:
        return np.zeros(code.n, dtype=np.uint8)
    ref = as_response(r_I)
    if ref.n != code.n:
        raise ValueError(f"Response length {ref.n} does not match code length {code.n}")
    return np.array(ref.bits)


def _perr_at_weight(H: SparseBinaryMatrix, ref: np.ndarray, weight: int, trials: int,
                    m: int, delta1: float, delta2: float, seed: int,
                    max_iters: Optional[int]) -> PerrEstimate:
    n = H.n_cols
    decoder = BitflipDecoder(H, max_iters=max_iters)
    exhaustive = comb(n, weight) <= trials
    patterns = combinations(range(n), weight) if exhaustive else None
    count = comb(n, weight) if exhaustive else trials
    extra_p = weight / n

    failures = 0
    for t in range(count):
        rng = np.random.default_rng([seed, weight, t])
        if exhaustive:
            positions = np.array(next(patterns), dtype=np.int64)
        else:
            positions = rng.choice(n, size=weight, replace=False)
        primary = ref.copy()
        primary[positions] ^= 1
        readouts = [primary]
        if m > 1:
            flips = rng.random((m - 1, n)) < extra_p
            readouts += [ref ^ f.astype(np.uint8) for f in flips]
        result = reproduce_multi(decoder, readouts, delta1, delta2)
        if not result.converged or not np.array_equal(result.word, ref):
            failures += 1
    return PerrEstimate(weight, count, failures, exhaustive)


def estimate_perr(code: InstanceCode, weight: int, trials: int = DEFAULT_TRIALS, m: int = 1,
                  delta1: float = 10.0, delta2: float = 6.0, seed: int = 0, r_I=None,
                  max_iters: Optional[int] = None) -> PerrEstimate:
    """
    Decoder failure rate for error patterns of one weight.

    The primary readout carries a uniform weight-i pattern; with m > 1 the
    other readouts are corrupted independently at crossover i/n. All
    C(n,i) patterns are enumerated when C(n,i) <= trials. Trial t draws
    from default_rng([seed, i, t]).

    Args:
        code: Instance code
        weight: Error weight i, 0 <= i <= n
        trials: Sampled trials (upper bound on enumerated patterns)
        m: Readouts per trial
        delta1, delta2: Soft-information penalties (used when m > 1)
        seed: Base seed
        r_I: Reference codeword (all-zero word when None)

    Returns:
        PerrEstimate with trials and failures
    """
    if not 0 <= weight <= code.n:
        raise ValueError(f"Error weight must satisfy 0 <= i <= {code.n}, got {weight}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if m < 1:
        raise ValueError(f"At least one readout is required, got m={m}")
    ref = _reference(code, r_I)
    return _perr_at_weight(code.H, ref, weight, trials, m, delta1, delta2, seed, max_iters)


def _combine_curve(n: int, per_weight: Mapping[int, PerrEstimate], p: float,
                   i_max: int, tail_policy: str) -> float:
    pmf = binomial_pmf(n, p)
    value = sum(pmf[i] * per_weight[i].rate for i in range(i_max + 1))
    if tail_policy == "conservative" and i_max < n:
        value += binom.sf(i_max, n, p)
    return float(min(1.0, value))


def block_error_curve(code: InstanceCode, p_grid: Sequence[float], i_max: int,
                      trials: int = DEFAULT_TRIALS, tail_policy: str = "conservative",
                      m: int = 1, delta1: float = 10.0, delta2: float = 6.0, seed: int = 0,
                      r_I=None, max_iters: Optional[int] = None, workers: int = 1,
                      verbose: bool = False, label: str = "ldpc") -> SimReport:
    """
    Block error probability over a grid of crossover probabilities.

    Args:
        code: Instance code
        p_grid: Crossover probabilities in [0, 0.5]
        i_max: Largest simulated error weight
        trials: Trials per weight
        tail_policy: "conservative" (weights > i_max count as failures) or
            "truncated" (they are ignored)
        m: Readouts per trial
        workers: Worker processes over weights (0 = all CPU cores)
        verbose: Show a progress bar

    Returns:
        SimReport with per-weight estimates and the curve
    """
    p_grid = [float(p) for p in p_grid]
    if not p_grid:
        raise ValueError("The p grid is empty")
    bad = [p for p in p_grid if not 0.0 <= p <= 0.5]
    if bad:
        raise ValueError(f"Crossover probabilities must lie in [0, 0.5], got {bad}")
    if not 0 <= i_max <= code.n:
        raise ValueError(f"i_max must satisfy 0 <= i_max <= {code.n}, got {i_max}")
    if tail_policy not in TAIL_POLICIES:
        raise ValueError(f"Unknown tail policy '{tail_policy}', expected one of {TAIL_POLICIES}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    ref = _reference(code, r_I)
    weights = list(range(i_max + 1))
    workers = detect_cpu_cores() if workers == 0 else workers
    per_weight: Dict[int, PerrEstimate] = {}

    if workers > 1 and len(weights) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(weights))) as executor:
            futures = {
                executor.submit(_perr_at_weight, code.H, ref, i, trials, m, delta1, delta2,
                                seed, max_iters): i
                for i in weights
            }
            for future in tqdm(as_completed(futures), total=len(futures),
                               desc="Error weights", disable=not verbose):
                per_weight[futures[future]] = future.result()
    else:
        for i in tqdm(weights, desc="Error weights", disable=not verbose):
            per_weight[i] = _perr_at_weight(code.H, ref, i, trials, m, delta1, delta2,
                                            seed, max_iters)

    curve = [(p, _combine_curve(code.n, per_weight, p, i_max, tail_policy)) for p in p_grid]
    return SimReport(n=code.n, per_weight=per_weight, curve=curve, i_max=i_max,
                     tail_policy=tail_policy, label=label,
                     params={"trials": trials, "m": m, "delta1": delta1, "delta2": delta2,
                             "seed": seed})


def bdd_baseline(n: int, t: int, p_grid: Sequence[float]) -> np.ndarray:
    """
    Block error probability of a bounded-distance decoder of radius t:
    sum_{i=t+1}^{n} C(n,i) p^i (1-p)^(n-i).
    """
    if not 0 <= t <= n:
        raise ValueError(f"Decoding radius must satisfy 0 <= t <= n={n}, got {t}")
    p = np.asarray(p_grid, dtype=np.float64)
    return np.asarray(binom.sf(t, n, p), dtype=np.float64)


def baseline_frame(n: int, t: int, p_grid: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({"p": [float(p) for p in p_grid], "p_block": bdd_baseline(n, t, p_grid)})


def direct_failure_rate(code: InstanceCode, params: ChannelParams, trials: int,
                        delta1: float = 10.0, delta2: float = 6.0, r_I=None,
                        max_iters: Optional[int] = None) -> PerrEstimate:
    """
    End-to-end BSC Monte Carlo at a fixed crossover probability.

    Trial t corrupts m readouts with default_rng([params.seed, t]) and
    reproduces them with shared soft information.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    ref = _reference(code, r_I)
    decoder = BitflipDecoder(code.H, max_iters=max_iters)
    failures = 0
    for t in range(trials):
        readouts = bsc_corrupt(ref, params, np.random.default_rng([params.seed, t]))
        result = reproduce_multi(decoder, readouts, delta1, delta2)
        if not result.converged or not np.array_equal(result.word, ref):
            failures += 1
    return PerrEstimate(None, trials, failures)


def _address_bits(count: int) -> int:
    return (count - 1).bit_length() if count > 1 else 0


def memory_report(code: Union[InstanceCode, SparseBinaryMatrix],
                  h: Optional[HelperData] = None) -> pd.DataFrame:
    """
    Storage of the public data in bits.

    The instance code is stored as one (row, column) pair per 1, each index
    taking ceil(log2) of its range. Code-offset helper data takes n bits and
    syndrome helper data one bit per row of H.

    Returns:
        DataFrame with columns item, bits, detail
    """
    H = code.H if isinstance(code, InstanceCode) else code
    row_bits = _address_bits(H.n_rows)
    col_bits = _address_bits(H.n_cols)
    entries = [
        {"item": "instance code", "bits": H.nnz * (row_bits + col_bits),
         "detail": f"{H.nnz} pairs x ({row_bits}+{col_bits}) bits"},
        {"item": "code-offset helper", "bits": H.n_cols,
         "detail": f"vector of length n={H.n_cols}"},
        {"item": "syndrome helper", "bits": H.n_rows,
         "detail": f"one bit per row ({H.n_rows} rows)"},
    ]
    if h is not None:
        h.check(H)
        entries.append({"item": f"stored {h.kind} helper", "bits": h.length,
                        "detail": f"code {h.code_ref}"})
    return pd.DataFrame(entries, columns=["item", "bits", "detail"])


def compare_curves(curves: Mapping[str, Union[SimReport, pd.DataFrame]]) -> pd.DataFrame:
    """
    Stack named curves into one table with columns p, p_block, source.
    """
    frames = []
    for source, curve in curves.items():
        frame = curve.to_frame() if isinstance(curve, SimReport) else curve[["p", "p_block"]]
        frame = frame.copy()
        frame["source"] = source
        frames.append(frame)
    if not frames:
        raise ValueError("No curves to compare")
    return pd.concat(frames, ignore_index=True)[["p", "p_block", "source"]]
