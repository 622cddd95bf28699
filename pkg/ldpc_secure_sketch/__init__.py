"""
LDPC Secure Sketch Package

Per-instance LDPC codes for PUF key generation: the parity-check matrix is
assembled from finite-geometry and Reed-Solomon based rows that are dual to
the enrolled response, so no helper data is needed. Includes a bitflip
decoder with multi-readout soft information and block error evaluation.
"""

__version__ = "1.0.0"
__author__ = "LDPC Secure Sketch Team"
__email__ = "your.email@example.com"

from .core import SecureSketchExperiment
from .decode import BitflipDecoder, DecodeResult, SoftWeights, bitflip_decode, reproduce_multi
from .evaluation import ChannelParams, SimReport, bdd_baseline, block_error_curve, memory_report
from .sketch import (
    ConstructionConfig,
    HelperData,
    InstanceCode,
    Response,
    SourceSpec,
    build_instance_code,
    instance_enroll,
    instance_reproduce,
)
from .sparsemat import SparseBinaryMatrix, check_regular, rank_gf2, syndrome
from .utils import detect_cpu_cores, load_config

__all__ = [
    "SecureSketchExperiment",
    "BitflipDecoder",
    "DecodeResult",
    "SoftWeights",
    "bitflip_decode",
    "reproduce_multi",
    "ChannelParams",
    "SimReport",
    "bdd_baseline",
    "block_error_curve",
    "memory_report",
    "ConstructionConfig",
    "HelperData",
    "InstanceCode",
    "Response",
    "SourceSpec",
    "build_instance_code",
    "instance_enroll",
    "instance_reproduce",
    "SparseBinaryMatrix",
    "check_regular",
    "rank_gf2",
    "syndrome",
    "detect_cpu_cores",
    "load_config",
]
