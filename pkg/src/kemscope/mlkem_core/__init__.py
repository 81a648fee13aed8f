"""Parameterized ML-KEM over Z_3329[X]/(X^256 + 1)."""

from .kat import KatParseError, ValidationReport, acvp_to_records, parse_kat, validate_kat
from .kem import (
    Ciphertext,
    KeyPair,
    SharedSecret,
    decaps,
    decaps_batch,
    derive_seeds,
    encaps,
    encaps_batch,
    keygen,
    keygen_batch,
    round_trip_batch,
)
from .params import (
    ML_KEM_512,
    ML_KEM_512_UNCOMPRESSED,
    ML_KEM_768,
    ML_KEM_768_UNCOMPRESSED,
    ML_KEM_1024,
    ML_KEM_1024_UNCOMPRESSED,
    N,
    PRESETS,
    Q,
    STANDARD,
    InputValidationError,
    KemParams,
    ParameterError,
    get_preset,
)
from .pke import Codec, UniformCodec
from .ring import DomainError, Polynomial, compress, decompress, intt, ntt
from .sampling import sample_cbd, sample_ntt

__all__ = [
    "Ciphertext", "Codec", "DomainError", "InputValidationError", "KatParseError", "KemParams", "KeyPair",
    "ML_KEM_1024", "ML_KEM_1024_UNCOMPRESSED", "ML_KEM_512", "ML_KEM_512_UNCOMPRESSED", "ML_KEM_768",
    "ML_KEM_768_UNCOMPRESSED", "N", "PRESETS", "ParameterError", "Polynomial", "Q", "STANDARD",
    "SharedSecret", "UniformCodec", "ValidationReport", "acvp_to_records", "compress", "decaps",
    "decaps_batch", "decompress", "derive_seeds", "encaps", "encaps_batch", "get_preset", "intt", "keygen",
    "keygen_batch", "ntt", "parse_kat", "round_trip_batch", "sample_cbd", "sample_ntt", "validate_kat",
]
