"""Decide and numerically corroborate embeddings between generalised Morrey smoothness spaces."""

__version__ = "0.1.0"

from .weights import (AsymptoticProfile, GeometricMean, LogExample, PiecewisePower, Power, PowerLog, Tabulated,
                      check_gp, check_intc, rphi, weight_from_json)
from .dyadic import DyadicCube
from .seqnorm import CoeffSequence, NormRequest, brute_force_norm, norm_value, space_norm
from .witnesses import WitnessFamily
from .oracle import Decision, EmbeddingVerdict, SpaceSpec, decide
from .verifier import Trend, VerificationReport, crosscheck, ratio_scan

__all__ = [
    "__version__", "AsymptoticProfile", "GeometricMean", "LogExample", "PiecewisePower", "Power", "PowerLog",
    "Tabulated", "check_gp", "check_intc", "rphi", "weight_from_json", "DyadicCube", "CoeffSequence",
    "NormRequest", "brute_force_norm", "norm_value", "space_norm", "WitnessFamily", "Decision",
    "EmbeddingVerdict", "SpaceSpec", "decide", "Trend", "VerificationReport", "crosscheck", "ratio_scan",
]
