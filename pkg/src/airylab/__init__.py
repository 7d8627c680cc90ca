"""Airy-zero sum rules, matrix-element recursions and Stark-effect checks."""
from airylab.errors import AccuracyError, AiryLabError, ArgumentError, DivergenceError, DomainError
from airylab.specfun import airy_ai, airy_ai_prime, d_coefficient, hermite_weighted
from airylab.spectra import Parity, SpectralPoint, SystemId, ZeroKind, airy_zero, zero_table
from airylab.sumrules import SumFamily, SummationConfig, evaluate_sum, identity_ids, registry, verify_identity

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AiryLabError",
    "ArgumentError",
    "DivergenceError",
    "DomainError",
    "Parity",
    "SpectralPoint",
    "SumFamily",
    "SummationConfig",
    "SystemId",
    "ZeroKind",
    "airy_ai",
    "airy_ai_prime",
    "airy_zero",
    "d_coefficient",
    "evaluate_sum",
    "hermite_weighted",
    "identity_ids",
    "registry",
    "verify_identity",
    "zero_table",
]
