"""Scalar quantizers for ciphertext coefficients.

Three strategies share one interface: the standard uniform Compress_d,
a trained non-uniform (Lloyd-Max) codebook, and semi-compression, which
quantizes u as usual but sends v at full 12-bit width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..mlkem_core.params import KemParams, Q
from ..mlkem_core.pke import UniformCodec
from ..mlkem_core.ring import centered, compress, decompress


class QuantizerError(ValueError):
    pass


class QuantizerKind(str, Enum):
    UNIFORM = "uniform"
    LLOYD_MAX = "lloyd_max"
    SEMI_COMPRESSED = "semi_compressed"


def circular_distance(a, b) -> np.ndarray:
    return np.abs(centered(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)))


@dataclass(frozen=True)
class Codebook:
    """Sorted integer reconstruction levels on Z_q with nearest-level encoding.

    ``boundaries`` are the midpoints between consecutive levels; the cell of
    the first level also wraps around through q - 1.
    """

    levels: tuple[int, ...]
    mse_trace: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        lv = self.levels
        if len(lv) < 2 or len(lv) & (len(lv) - 1):
            raise QuantizerError(f"codebook needs 2^d >= 2 levels, got {len(lv)}")
        if any(not 0 <= x < Q for x in lv):
            raise QuantizerError("codebook levels must lie in [0, q)")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise QuantizerError("codebook levels must be strictly increasing")

    @property
    def bits(self) -> int:
        return len(self.levels).bit_length() - 1

    @property
    def boundaries(self) -> tuple[float, ...]:
        return tuple((a + b) / 2 for a, b in zip(self.levels, self.levels[1:]))

    @property
    def level_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64)

    def encode(self, x) -> np.ndarray:
        """Index of the nearest level under centered-mod-q distance (ties go low)."""
        x = np.asarray(x, dtype=np.int64) % Q
        lv = self.level_array
        hi = np.searchsorted(lv, x) % len(lv)
        lo = (hi - 1) % len(lv)
        pick_hi = circular_distance(x, lv[hi]) < circular_distance(x, lv[lo])
        return np.where(pick_hi, hi, lo)

    def decode(self, index) -> np.ndarray:
        index = np.asarray(index, dtype=np.int64)
        if index.size and (index.min() < 0 or index.max() >= len(self.levels)):
            raise QuantizerError(f"codebook index out of range 0..{len(self.levels) - 1}")
        return self.level_array[index]

    @classmethod
    def uniform(cls, d: int) -> "Codebook":
        """Reconstruction levels of the standard d-bit decompression."""
        return cls(tuple(int(decompress(c, d)) for c in range(1 << d)))


class CodebookCodec:
    """Adapts a Codebook to the KEM's ciphertext codec interface."""

    def __init__(self, codebook: Codebook):
        self.codebook = codebook
        self.bits = codebook.bits

    def quantize(self, coeffs: np.ndarray) -> np.ndarray:
        return self.codebook.encode(coeffs)

    def dequantize(self, indices: np.ndarray) -> np.ndarray:
        return self.codebook.decode(indices)


@dataclass(frozen=True)
class QuantizerSpec:
    kind: QuantizerKind
    du: int
    dv: int
    codebook: Codebook | None = None
    v_codebook: Codebook | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", QuantizerKind(self.kind))
        for name, d in (("du", self.du), ("dv", self.dv)):
            if not 1 <= d <= 12:
                raise QuantizerError(f"{name}={d} outside 1..12")
        if self.kind is QuantizerKind.SEMI_COMPRESSED and self.dv != 12:
            raise QuantizerError("semi_compressed sends v uncompressed: dv must be 12")
        if self.kind is QuantizerKind.LLOYD_MAX:
            if self.codebook is None:
                raise QuantizerError("lloyd_max needs a trained codebook for u")
            if self.codebook.bits != self.du:
                raise QuantizerError(f"u codebook has {len(self.codebook.levels)} levels, need 2^{self.du}")
            if self.v_codebook is not None and self.v_codebook.bits != self.dv:
                raise QuantizerError(f"v codebook has {len(self.v_codebook.levels)} levels, need 2^{self.dv}")

    @classmethod
    def uniform(cls, du: int, dv: int) -> "QuantizerSpec":
        return cls(QuantizerKind.UNIFORM, du, dv)

    @classmethod
    def semi_compressed(cls, du: int) -> "QuantizerSpec":
        return cls(QuantizerKind.SEMI_COMPRESSED, du, 12)

    @classmethod
    def lloyd_max(cls, codebook: Codebook, v_codebook: Codebook | None = None, dv: int | None = None) -> "QuantizerSpec":
        if dv is None:
            dv = v_codebook.bits if v_codebook is not None else 4
        return cls(QuantizerKind.LLOYD_MAX, codebook.bits, dv, codebook, v_codebook)

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.du},{self.dv})"

    def apply_to(self, params: KemParams) -> KemParams:
        return params.with_compression(self.du, self.dv, f"{params.name} {self.label}")

    def codecs(self):
        """(u codec, v codec) to substitute into the ciphertext compression step."""
        if self.kind is QuantizerKind.LLOYD_MAX:
            u = CodebookCodec(self.codebook)
            v = CodebookCodec(self.v_codebook) if self.v_codebook is not None else UniformCodec(self.dv)
            return u, v
        return UniformCodec(self.du), UniformCodec(self.dv)

    def codec_for(self, component: str):
        u, v = self.codecs()
        if component == "u":
            return u
        if component == "v":
            return v
        raise QuantizerError(f"component must be 'u' or 'v', got {component!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "du": self.du, "dv": self.dv}
        if self.codebook is not None:
            out["codebook"] = list(self.codebook.levels)
        if self.v_codebook is not None:
            out["v_codebook"] = list(self.v_codebook.levels)
        return out


def quantize(x, spec: QuantizerSpec, component: str = "u"):
    codec = spec.codec_for(component)
    out = codec.quantize(np.asarray(x, dtype=np.int64))
    return int(out) if np.ndim(out) == 0 else out


def dequantize(index, spec: QuantizerSpec, component: str = "u"):
    codec = spec.codec_for(component)
    index = np.asarray(index, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= 1 << codec.bits):
        raise QuantizerError(f"index out of range for a {codec.bits}-bit quantizer")
    out = codec.dequantize(index)
    return int(out) if np.ndim(out) == 0 else out


def reconstruction_mse(samples, codec) -> float:
    """Mean squared centered error of dequantize(quantize(x)) over the samples."""
    samples = np.asarray(samples, dtype=np.int64).ravel()
    err = centered(codec.dequantize(codec.quantize(samples)) - samples)
    return float(np.mean(err.astype(np.float64) ** 2))


def uniform_mse_exact(d: int) -> float:
    """MSE of the standard d-bit quantizer for x uniform on Z_q, by enumeration."""
    x = np.arange(Q, dtype=np.int64)
    err = centered(decompress(compress(x, d), d) - x)
    return float(np.mean(err.astype(np.float64) ** 2))
