"""Reliability cost of ciphertext compression: DFR and quantizer comparison."""

from .compare import ComparisonRow, compare_quantizers, held_out_mse, report_json
from .dfr import DfrEstimate, estimate_dfr, intervals_overlap, wilson_interval
from .lloyd import codebook_mse, harvest_coefficients, train_lloyd_max
from .quantizers import (
    Codebook,
    CodebookCodec,
    QuantizerError,
    QuantizerKind,
    QuantizerSpec,
    dequantize,
    quantize,
    reconstruction_mse,
    uniform_mse_exact,
)

__all__ = [
    "Codebook", "CodebookCodec", "ComparisonRow", "DfrEstimate", "QuantizerError", "QuantizerKind",
    "QuantizerSpec", "codebook_mse", "compare_quantizers", "dequantize", "estimate_dfr", "harvest_coefficients",
    "held_out_mse", "intervals_overlap", "quantize", "reconstruction_mse", "report_json", "train_lloyd_max",
    "uniform_mse_exact", "wilson_interval",
]
