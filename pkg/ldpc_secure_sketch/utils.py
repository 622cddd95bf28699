"""
Utility functions for the LDPC secure sketch package.
"""

import os
import json
import yaml
import numpy as np
import pandas as pd
from math import comb
from typing import Dict, Any, Tuple, Union
from pathlib import Path


PathLike = Union[str, Path]


def detect_cpu_cores() -> int:
    """
    Detect the number of available CPU cores.

    Returns:
        int: Number of CPU cores available.
    """
    return os.cpu_count() or 1


def load_config(config_path: PathLike) -> Dict[str, Any]:
    """
    Load configuration from YAML or JSON file.

    Args:
        config_path: Path to configuration file

    Returns:
        Configuration dictionary
    """
    config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path, 'r') as f:
        if config_path.suffix.lower() in ['.yml', '.yaml']:
            config = yaml.safe_load(f)
        elif config_path.suffix.lower() == '.json':
            config = json.load(f)
        else:
            raise ValueError(f"Unsupported config format: {config_path.suffix}")

    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ValueError(f"Configuration file {config_path} must contain a key/value mapping")
    return config


def save_config(config: Dict[str, Any], path: PathLike) -> Path:
    """
    Write a flat configuration mapping, keys in insertion order.

    JSON for a .json suffix, YAML otherwise.

    Args:
        config: Configuration dictionary
        path: Destination file

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        if path.suffix.lower() == '.json':
            json.dump(config, f, indent=2)
        else:
            yaml.safe_dump(config, f, sort_keys=False, default_flow_style=None)
    return path


def config_path_for(output_path: PathLike) -> Path:
    """`<dir>/<stem>.config.yaml` next to an output file."""
    output_path = Path(output_path)
    return output_path.with_name(f"{output_path.stem}.config.yaml")


def bits_to_hex(bits) -> str:
    """Pack a binary vector into hex (first bit is the most significant)."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return ""
    return np.packbits(bits).tobytes().hex()


def hex_to_bits(text: str, length: int) -> np.ndarray:
    """
    Inverse of bits_to_hex.

    Args:
        text: Hex string
        length: Number of bits to keep

    Returns:
        uint8 vector of the given length
    """
    if length < 0:
        raise ValueError(f"Length must be non-negative, got {length}")
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise ValueError(f"Invalid hex payload '{text}'")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8)) if raw else np.zeros(0, np.uint8)
    if len(bits) < length or len(bits) - length >= 8:
        raise ValueError(f"Hex payload of {len(raw)} bytes does not encode {length} bits")
    if bits[length:].any():
        raise ValueError("Hex payload has nonzero padding bits")
    return bits[:length].copy()


def write_response(bits, path: PathLike) -> Path:
    """Write a binary vector as one line of '0'/'1' characters."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(str(int(b)) for b in np.asarray(bits, dtype=np.uint8)) + "\n")
    return path


def read_response(path: PathLike) -> np.ndarray:
    """
    Read a binary vector written by write_response.

    Whitespace is ignored; any other character than 0/1 is an error.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Response file not found: {path}")
    text = "".join(path.read_text().split())
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"Response file {path} must contain only '0' and '1' characters")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def save_curve_csv(df: pd.DataFrame, path: PathLike) -> Path:
    """
    Write a curve table to CSV.

    Floats are written with 17 significant digits so they read back exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format='%.17g')
    return path


def read_curve_csv(path: PathLike) -> pd.DataFrame:
    """
    Read a curve CSV with columns p,p_block[,source].
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Curve file not found: {path}")
    df = pd.read_csv(path, float_precision='round_trip')
    missing = {'p', 'p_block'} - set(df.columns)
    if missing:
        raise ValueError(f"Curve file {path} lacks columns: {sorted(missing)}")
    return df


def create_example_config() -> Dict[str, Any]:
    """
    Create an example configuration dictionary.

    Returns:
        Example configuration (the length-128, dimension-56 experiment)
    """
    return {
        'n': 128,
        'target_k': 56,
        'sources': None,
        'seed': 1,
        'max_rows': None,
        'combo_weight_cap': None,
        'min_col_weight': None,
        'delta1': 10.0,
        'delta2': 6.0,
        'm_readouts': 3,
        'p_grid': [0.001, 0.005, 0.01, 0.02, 0.05],
        'trials': 10000,
        'i_max': 20,
        'tail_policy': 'conservative',
        'baseline_n': 127,
        'baseline_t': 10,
        'workers': 1,
        'code_path': './results/code_n128_k56.mtx',
        'response_path': None,
        'curve_path': './results/curve_n128_k56.csv',
    }


def estimate_decode_count(n: int, i_max: int, trials: int, m_readouts: int = 1) -> Tuple[int, str]:
    """
    Estimate the number of decoder runs of a block error simulation.

    Args:
        n: Code length
        i_max: Largest simulated error weight
        trials: Trials per weight
        m_readouts: Readouts decoded per trial (upper bound)

    Returns:
        Tuple of (decoder_runs, formatted_string)
    """
    per_weight = [min(comb(n, i), trials) for i in range(1, i_max + 1)]
    runs = sum(per_weight) * m_readouts
    exhaustive = sum(1 for i in range(1, i_max + 1) if comb(n, i) <= trials)
    return runs, f"~{runs:,} decodes ({exhaustive} of {i_max} weights exhaustive)"
