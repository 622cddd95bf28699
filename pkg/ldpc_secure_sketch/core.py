"""
Core module for secure sketch experiments.
"""

import numpy as np
import pandas as pd
from typing import Any, Dict, Optional, Sequence, Tuple, Union
from pathlib import Path

from .evaluation import (
    SimReport,
    baseline_frame,
    block_error_curve,
    compare_curves,
    memory_report,
)
from .sketch import (
    ConstructionConfig,
    HelperData,
    InstanceCode,
    Response,
    SourceSpec,
    build_instance_code,
    code_stats,
    read_helper_data,
    read_instance_code,
    write_instance_code,
)
from .sparsemat import check_regular
from .utils import estimate_decode_count, read_response, save_curve_csv, write_response


class SecureSketchExperiment:
    """
    Main class for building per-instance codes and evaluating them.
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the experiment.

        Args:
            config: Configuration dictionary (optional)
        """
        self.config = config or {}

        # Experiment state
        self.response: Optional[Response] = None
        self.code: Optional[InstanceCode] = None
        self.report: Optional[SimReport] = None
        self.curves: Optional[pd.DataFrame] = None

    def setup_response(self, n: int, seed: int = 0,
                       response_path: Optional[Union[str, Path]] = None) -> Response:
        """
        Draw a seeded random response or read one from file.

        Args:
            n: Response length
            seed: Seed of the response draw
            response_path: File with a stored response (overrides the draw)
        """
        print(f"=== Setting up response (n={n}) ===")

        if response_path:
            bits = read_response(response_path)
            if len(bits) != n:
                raise ValueError(f"Response in {response_path} has length {len(bits)}, expected {n}")
            self.response = Response(bits)
            print(f"  Loaded from: {response_path}")
        else:
            self.response = Response.random(n, np.random.default_rng(seed))
            print(f"  Drawn with seed: {seed}")

        print(f"  Weight: {self.response.weight}")
        if self.response.weight == 0:
            print("Warning: all-zero response is a degenerate (weak) key")
        return self.response

    def construct_code(self, target_k: int, sources: Optional[Sequence[str]] = None,
                       max_rows: Optional[int] = None, combo_weight_cap: Optional[int] = None,
                       min_col_weight: Optional[int] = None, seed: int = 0,
                       verbose: bool = False) -> InstanceCode:
        """
        Build the instance code of the current response.

        Args:
            target_k: Desired code dimension
            sources: Source names such as 'EG(2,4)' (defaults for n when None)
            max_rows: Row cap
            combo_weight_cap: Largest weight of combination rows
            min_col_weight: Balancing target
            seed: Construction seed
            verbose: Print per-source progress
        """
        if self.response is None:
            raise RuntimeError("No response available. Run setup_response() first.")

        cfg = ConstructionConfig(
            target_k=target_k,
            sources=tuple(SourceSpec.parse(s) for s in sources) if sources else None,
            max_rows=max_rows,
            combo_weight_cap=combo_weight_cap,
            min_col_weight=min_col_weight,
            seed=seed,
        )
        resolved = cfg.resolve(self.response.n)
        print(f"=== Constructing instance code (n={self.response.n}, target k={target_k}) ===")
        print(f"  Sources: {', '.join(s.name for s in resolved.sources)}")
        print(f"  Row cap: {resolved.max_rows}, combination weight cap: {resolved.combo_weight_cap}")

        self.code = build_instance_code(self.response, cfg, verbose=verbose)
        self._print_code_summary(self.code)
        if self.code.unreachable:
            print(f"Warning: {len(self.code.unreachable)} columns stay below weight "
                  f"{self.code.config.min_col_weight}")
        if self.code.shortfall:
            print(f"Warning: target k={target_k} unreachable, achieved k={self.code.k}")
        return self.code

    def _print_code_summary(self, code: InstanceCode) -> None:
        stats = code_stats(code)
        print("Instance code created:")
        print(f"  n: {stats['n']}")
        print(f"  k: {stats['k']}")
        print(f"  Rows: {stats['rows']}")
        print(f"  Density: {stats['density']:.4f}")
        print(f"  Column-weight spread: {stats['col_weight_spread']}")
        counts = code.provenance_counts()
        print(f"  Row provenance: {', '.join(f'{k}={v}' for k, v in counts.items())}")

    def save_code(self, path: Union[str, Path], save_response: bool = False) -> Path:
        """
        Write the code (matrix file plus header) and optionally the response.

        Returns:
            Path of the matrix file
        """
        if self.code is None:
            raise RuntimeError("No code available. Run construct_code() first.")
        path = Path(path)
        write_instance_code(self.code, path)
        print(f"Code saved to {path}")
        if save_response and self.response is not None:
            response_path = path.with_suffix(".response")
            write_response(self.response.bits, response_path)
            print(f"Response saved to {response_path}")
        return path

    def load_code(self, path: Union[str, Path],
                  response_path: Optional[Union[str, Path]] = None) -> InstanceCode:
        """Read a stored code and, if given, the response it was built for."""
        print(f"=== Loading code from {path} ===")
        self.code = read_instance_code(path)
        self._print_code_summary(self.code)
        if response_path:
            self.response = Response(read_response(response_path))
            if self.response.n != self.code.n:
                raise ValueError(f"Response length {self.response.n} does not match code length "
                                 f"{self.code.n}")
            if not self.code.is_codeword(self.response.bits):
                raise ValueError(f"Response in {response_path} is not a codeword of {path}")
        return self.code

    def simulate(self, p_grid: Sequence[float], i_max: int, trials: int = 10_000,
                 tail_policy: str = "conservative", m_readouts: int = 3,
                 delta1: float = 10.0, delta2: float = 6.0, seed: int = 0,
                 baseline: Optional[Tuple[int, int]] = None, workers: int = 1,
                 verbose: bool = True) -> pd.DataFrame:
        """
        Simulate the block error curve, optionally next to a bounded-distance
        baseline.

        Args:
            p_grid: Crossover probabilities
            i_max: Largest simulated error weight
            trials: Trials per weight
            tail_policy: "conservative" or "truncated"
            m_readouts: Readouts per reproduction
            delta1, delta2: Soft-information penalties
            seed: Simulation seed
            baseline: (n, t) of a bounded-distance decoder to compare with
            workers: Worker processes (0 = all cores)

        Returns:
            Curve table with columns p, p_block (and source with a baseline)
        """
        if self.code is None:
            raise RuntimeError("No code available. Run construct_code() or load_code() first.")

        _, estimate = estimate_decode_count(self.code.n, i_max, trials, m_readouts)
        print(f"=== Simulating block error curve ({len(p_grid)} points) ===")
        print(f"  Readouts: {m_readouts}, delta1={delta1}, delta2={delta2}")
        print(f"  Estimated work: {estimate}")

        self.report = block_error_curve(
            self.code, p_grid, i_max, trials=trials, tail_policy=tail_policy, m=m_readouts,
            delta1=delta1, delta2=delta2, seed=seed, r_I=self.response, workers=workers,
            verbose=verbose, label=f"ldpc({self.code.n},{self.code.k})",
        )

        if baseline is not None:
            bn, bt = baseline
            if bn != self.code.n:
                print(f"Warning: baseline length {bn} differs from code length {self.code.n}")
            self.curves = compare_curves({
                self.report.label: self.report,
                f"bdd({bn},t={bt})": baseline_frame(bn, bt, p_grid),
            })
        else:
            self.curves = self.report.to_frame()

        for _, row in self.curves.iterrows():
            source = f" [{row['source']}]" if "source" in row else ""
            print(f"  p={row['p']:<8g} P_Block={row['p_block']:.3e}{source}")
        return self.curves

    def save_curve(self, path: Union[str, Path]) -> Path:
        if self.curves is None:
            raise RuntimeError("No curve available. Run simulate() first.")
        path = save_curve_csv(self.curves, path)
        print(f"Curve saved to {path}")
        return path

    def memory_table(self, helper: Optional[Union[HelperData, str, Path]] = None) -> pd.DataFrame:
        """
        Print and return the storage accounting and regularity summary.

        Args:
            helper: Helper data (or a helper data file) to account for
        """
        if self.code is None:
            raise RuntimeError("No code available. Run construct_code() or load_code() first.")
        if helper is not None and not isinstance(helper, HelperData):
            helper = read_helper_data(helper)

        table = memory_report(self.code, helper)
        regularity = check_regular(self.code.H)
        print("=== Storage (bits) ===")
        print(table.to_string(index=False))
        print("=== Regularity ===")
        print(f"  {regularity.summary()}")
        if regularity.violation == "empty":
            raise ValueError("Matrix has no entries")
        return table
