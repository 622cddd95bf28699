"""
Command-line interface for the LDPC secure sketch package.
"""

import argparse
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ldpc_secure_sketch.core import SecureSketchExperiment
from ldpc_secure_sketch.sketch import RankShortfallError
from ldpc_secure_sketch.utils import (
    config_path_for,
    create_example_config,
    load_config,
    save_config,
)


DEFAULT_P_GRID = [0.001, 0.005, 0.01, 0.02, 0.05]


@dataclass
class ExperimentSpec:
    """
    Every parameter of one experiment; written next to each output.
    """

    n: int = 128
    target_k: int = 56
    sources: Optional[List[str]] = None
    seed: int = 1
    max_rows: Optional[int] = None
    combo_weight_cap: Optional[int] = None
    min_col_weight: Optional[int] = None
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    m_readouts: int = 3
    p_grid: List[float] = field(default_factory=lambda: list(DEFAULT_P_GRID))
    trials: int = 10_000
    i_max: Optional[int] = None
    tail_policy: str = "conservative"
    baseline_n: Optional[int] = None
    baseline_t: Optional[int] = None
    workers: int = 1
    code_path: str = "./results/code.mtx"
    response_path: Optional[str] = None
    save_response: bool = False
    curve_path: str = "./results/curve.csv"
    helper_path: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown configuration keys: {unknown}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def deltas(self, n: int) -> Tuple[float, float]:
        """Soft-information penalties; (10, 6) up to n = 128, (20, 12) above."""
        default = (10.0, 6.0) if n <= 128 else (20.0, 12.0)
        return (float(self.delta1) if self.delta1 is not None else default[0],
                float(self.delta2) if self.delta2 is not None else default[1])

    def baseline(self) -> Optional[Tuple[int, int]]:
        if self.baseline_n is None and self.baseline_t is None:
            return None
        if self.baseline_n is None or self.baseline_t is None:
            raise ValueError("Both baseline_n and baseline_t must be given for a baseline curve")
        return int(self.baseline_n), int(self.baseline_t)

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.m_readouts < 1:
            raise ValueError(f"m_readouts must be >= 1, got {self.m_readouts}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 0:
            raise ValueError(f"workers must be >= 0, got {self.workers}")
        self.baseline()


def create_parser() -> argparse.ArgumentParser:
    """Create command line argument parser."""
    parser = argparse.ArgumentParser(
        description="LDPC secure sketch - per-instance LDPC codes for PUF responses",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Build the code of a seeded random response of length 128, dimension 56
  ldpc-sketch construct --n 128 --target-k 56 --seed 1 --code results/n128k56.mtx --save-response

  # Block error curve with three readouts, next to a t=10 bounded-distance decoder
  ldpc-sketch simulate --code results/n128k56.mtx --baseline 127 10 --curve results/n128k56.csv

  # Storage accounting of a stored code
  ldpc-sketch report --code results/n128k56.mtx

  # Run from a configuration file
  ldpc-sketch simulate --config experiment.yaml

  # Generate example configuration
  ldpc-sketch --create-config example_config.yaml
        """
    )

    parser.add_argument('command', nargs='?', choices=['construct', 'simulate', 'report'],
                        help='Action to run')

    # Configuration
    parser.add_argument('--config', '-c', type=str,
                        help='Configuration file (YAML or JSON)')
    parser.add_argument('--create-config', type=str,
                        help='Create example configuration file and exit')

    # Construction parameters
    code_group = parser.add_argument_group('Construction parameters')
    code_group.add_argument('--n', type=int,
                            help='Response length (default: 128)')
    code_group.add_argument('--target-k', type=int,
                            help='Target code dimension (default: 56)')
    code_group.add_argument('--sources', nargs='+',
                            help='Base constructions, e.g. EG(2,4) RS(16,8) (default: all of length n)')
    code_group.add_argument('--seed', type=int,
                            help='Seed for response draw, construction and simulation (default: 1)')
    code_group.add_argument('--max-rows', type=int,
                            help='Row cap (default: 4*(n-k))')
    code_group.add_argument('--combo-weight-cap', type=int,
                            help='Largest weight of combination rows (default: 2*max source row weight)')
    code_group.add_argument('--min-col-weight', type=int,
                            help='Column balancing target (default: median column weight)')

    # Decoding and simulation parameters
    sim_group = parser.add_argument_group('Simulation parameters')
    sim_group.add_argument('--delta1', type=float,
                           help='Penalty where readouts agree (default: 10, or 20 for n > 128)')
    sim_group.add_argument('--delta2', type=float,
                           help='Penalty where readouts differ (default: 6, or 12 for n > 128)')
    sim_group.add_argument('--m-readouts', type=int,
                           help='Readouts per reproduction (default: 3)')
    sim_group.add_argument('--p-grid', nargs='+', type=float,
                           help='Crossover probabilities (default: 0.001 0.005 0.01 0.02 0.05)')
    sim_group.add_argument('--trials', type=int,
                           help='Trials per error weight (default: 10000)')
    sim_group.add_argument('--i-max', type=int,
                           help='Largest simulated error weight (default: min(n, 20))')
    sim_group.add_argument('--tail-policy', choices=['conservative', 'truncated'],
                           help='Accounting of weights above i-max (default: conservative)')
    sim_group.add_argument('--baseline', nargs=2, type=int, metavar=('N', 'T'),
                           help='Bounded-distance baseline of length N correcting T errors')
    sim_group.add_argument('--workers', type=int,
                           help='Worker processes, 0 for all cores (default: 1)')

    # Files
    io_group = parser.add_argument_group('Files')
    io_group.add_argument('--code', dest='code_path', type=str,
                          help='Code matrix file (default: ./results/code.mtx)')
    io_group.add_argument('--response', dest='response_path', type=str,
                          help='Response file to enroll or simulate against')
    io_group.add_argument('--save-response', action='store_true', default=None,
                          help='Store the drawn response next to the code')
    io_group.add_argument('--curve', dest='curve_path', type=str,
                          help='Curve CSV output (default: ./results/curve.csv)')
    io_group.add_argument('--helper', dest='helper_path', type=str,
                          help='Helper data file to include in the report')

    # Miscellaneous
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='Verbose output')

    return parser


def validate_args(args: argparse.Namespace, base: Optional[Dict[str, Any]] = None) -> ExperimentSpec:
    """Merge command line arguments over a configuration into an ExperimentSpec."""
    config = dict(base or {})

    overrides = {
        'n': args.n,
        'target_k': args.target_k,
        'sources': args.sources,
        'seed': args.seed,
        'max_rows': args.max_rows,
        'combo_weight_cap': args.combo_weight_cap,
        'min_col_weight': args.min_col_weight,
        'delta1': args.delta1,
        'delta2': args.delta2,
        'm_readouts': args.m_readouts,
        'p_grid': args.p_grid,
        'trials': args.trials,
        'i_max': args.i_max,
        'tail_policy': args.tail_policy,
        'workers': args.workers,
        'code_path': args.code_path,
        'response_path': args.response_path,
        'save_response': args.save_response,
        'curve_path': args.curve_path,
        'helper_path': args.helper_path,
    }
    if args.baseline:
        overrides['baseline_n'], overrides['baseline_t'] = args.baseline
    config.update({k: v for k, v in overrides.items() if v is not None})

    spec = ExperimentSpec.from_dict(config)
    spec.validate()
    return spec


def _default_response_path(code_path: Path) -> Optional[Path]:
    candidate = code_path.with_suffix(".response")
    return candidate if candidate.exists() else None


def cmd_construct(spec: ExperimentSpec, verbose: bool = False) -> SecureSketchExperiment:
    """Build and store the instance code of one response."""
    exp = SecureSketchExperiment(spec.to_dict())
    exp.setup_response(spec.n, seed=spec.seed, response_path=spec.response_path)
    code = exp.construct_code(
        target_k=spec.target_k,
        sources=spec.sources,
        max_rows=spec.max_rows,
        combo_weight_cap=spec.combo_weight_cap,
        min_col_weight=spec.min_col_weight,
        seed=spec.seed,
        verbose=verbose,
    )
    exp.save_code(spec.code_path, save_response=spec.save_response)
    save_config(spec.to_dict(), config_path_for(spec.code_path))
    if code.shortfall:
        raise RankShortfallError(code)
    return exp


def cmd_simulate(spec: ExperimentSpec, verbose: bool = False) -> SecureSketchExperiment:
    """Simulate the block error curve of a stored code and write it as CSV."""
    exp = SecureSketchExperiment(spec.to_dict())
    code_path = Path(spec.code_path)
    response_path = spec.response_path or _default_response_path(code_path)
    code = exp.load_code(code_path, response_path=response_path)

    delta1, delta2 = spec.deltas(code.n)
    i_max = spec.i_max if spec.i_max is not None else min(code.n, 20)
    exp.simulate(
        p_grid=spec.p_grid,
        i_max=i_max,
        trials=spec.trials,
        tail_policy=spec.tail_policy,
        m_readouts=spec.m_readouts,
        delta1=delta1,
        delta2=delta2,
        seed=spec.seed,
        baseline=spec.baseline(),
        workers=spec.workers,
        verbose=verbose,
    )
    exp.save_curve(spec.curve_path)
    save_config(spec.to_dict(), config_path_for(spec.curve_path))
    return exp


def cmd_report(spec: ExperimentSpec, verbose: bool = False) -> SecureSketchExperiment:
    """Print storage accounting and regularity of a stored code."""
    exp = SecureSketchExperiment(spec.to_dict())
    exp.load_code(spec.code_path)
    exp.memory_table(spec.helper_path)
    return exp


COMMANDS = {
    'construct': cmd_construct,
    'simulate': cmd_simulate,
    'report': cmd_report,
}


def main(argv: Optional[List[str]] = None):
    """Main entry point for CLI."""
    parser = create_parser()
    args = parser.parse_args(argv)

    # Handle special actions
    if args.create_config:
        config_path = save_config(create_example_config(), args.create_config)
        print(f"Example configuration saved to: {config_path}")
        return

    if not args.command:
        print("Error: a command (construct, simulate or report) is required")
        parser.print_help()
        sys.exit(1)

    try:
        base = None
        if args.config:
            base = load_config(args.config)
            print(f"Loaded configuration from: {args.config}")
        spec = validate_args(args, base)
        COMMANDS[args.command](spec, args.verbose)
        print(f"\n✅ {args.command.capitalize()} completed successfully!")
    except (ValueError, FileNotFoundError) as e:
        print(f"\n❌ Error: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(1)
    except RuntimeError as e:
        print(f"\n❌ {args.command.capitalize()} failed: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(2)


if __name__ == '__main__':
    main()
