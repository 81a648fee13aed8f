"""Parameter sets over the fixed ring Z_q[X]/(X^256 + 1)."""

from __future__ import annotations

from dataclasses import dataclass

N = 256
Q = 3329


class ParameterError(ValueError):
    """Raised for out-of-range or (in strict mode) non-standard parameters."""


class InputValidationError(ValueError):
    """Raised when a key or ciphertext fails a length or encoding check."""


@dataclass(frozen=True)
class KemParams:
    k: int
    eta1: int
    eta2: int
    du: int
    dv: int
    label: str = ""

    def __post_init__(self) -> None:
        if not 1 <= self.k <= 4:
            raise ParameterError(f"module rank k={self.k} outside 1..4")
        for name in ("du", "dv"):
            d = getattr(self, name)
            if not 1 <= d <= 12:
                raise ParameterError(f"{name}={d} outside 1..12")
        for name in ("eta1", "eta2"):
            eta = getattr(self, name)
            if not 1 <= eta <= 8:
                raise ParameterError(f"{name}={eta} outside 1..8")

    @property
    def ek_bytes(self) -> int:
        return 384 * self.k + 32

    @property
    def dk_bytes(self) -> int:
        return 768 * self.k + 96

    @property
    def ct_bytes(self) -> int:
        return 32 * (self.k * self.du + self.dv)

    @property
    def name(self) -> str:
        return self.label or f"k={self.k},du={self.du},dv={self.dv}"

    @property
    def is_fips(self) -> bool:
        return any(
            (self.k, self.eta1, self.eta2, self.du, self.dv)
            == (p.k, p.eta1, p.eta2, p.du, p.dv)
            for p in (ML_KEM_512, ML_KEM_768, ML_KEM_1024)
        )

    def with_compression(self, du: int, dv: int, label: str | None = None) -> "KemParams":
        return KemParams(self.k, self.eta1, self.eta2, du, dv,
                         label if label is not None else f"{self.name} ({du},{dv})")

    def check_strict(self) -> "KemParams":
        """Reject anything that is not one of the three standardized sets."""
        if not self.is_fips:
            raise ParameterError(f"{self.name} is not a FIPS 203 parameter set")
        return self


ML_KEM_512 = KemParams(2, 3, 2, 10, 4, "ML-KEM-512")
ML_KEM_768 = KemParams(3, 2, 2, 10, 4, "ML-KEM-768")
ML_KEM_1024 = KemParams(4, 2, 2, 11, 5, "ML-KEM-1024")

# same rank and noise, 12-bit (lossless) ciphertext coefficients
ML_KEM_512_UNCOMPRESSED = ML_KEM_512.with_compression(12, 12, "ML-KEM-512-uncompressed")
ML_KEM_768_UNCOMPRESSED = ML_KEM_768.with_compression(12, 12, "ML-KEM-768-uncompressed")
ML_KEM_1024_UNCOMPRESSED = ML_KEM_1024.with_compression(12, 12, "ML-KEM-1024-uncompressed")

STANDARD = (ML_KEM_512, ML_KEM_768, ML_KEM_1024)

PRESETS: dict[str, KemParams] = {
    p.label: p
    for p in (
        ML_KEM_512, ML_KEM_768, ML_KEM_1024,
        ML_KEM_512_UNCOMPRESSED, ML_KEM_768_UNCOMPRESSED, ML_KEM_1024_UNCOMPRESSED,
    )
}


def get_preset(name: str) -> KemParams:
    key = name.strip()
    for label, params in PRESETS.items():
        if label.lower() == key.lower() or label.lower().replace("-", "") == key.lower().replace("-", ""):
            return params
    raise ParameterError(f"unknown parameter preset {name!r}; known: {', '.join(PRESETS)}")


def params_for_ek_length(length: int) -> KemParams:
    for p in STANDARD:
        if p.ek_bytes == length:
            return p
    raise ParameterError(f"no standard parameter set has a {length}-byte encapsulation key")
