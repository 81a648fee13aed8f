"""Additive TLS 1.3 handshake payload model.

total = base(kex family, auth) + client keyshare + server keyshare.  The
keyshare sizes follow from the group definitions; the base is a calibrated
constant per (family, auth) cell covering framing, certificates and
signatures.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from statistics import mean
from typing import Iterable, Mapping, Sequence

from ..mlkem_core.params import ML_KEM_512, ML_KEM_768, ML_KEM_1024, KemParams

log = logging.getLogger(__name__)

CLASSICAL = "classical"
KEM = "kem"
FAMILIES = (CLASSICAL, KEM)


class UnknownNameError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class KexGroup:
    name: str
    client_keyshare_bytes: int
    server_keyshare_bytes: int
    family: str = KEM

    def __post_init__(self) -> None:
        if self.client_keyshare_bytes < 0 or self.server_keyshare_bytes < 0:
            raise ValueError("keyshare sizes must be non-negative")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")

    @property
    def kex_bytes(self) -> int:
        return self.client_keyshare_bytes + self.server_keyshare_bytes

    @classmethod
    def from_kem(cls, name: str, params: KemParams) -> "KexGroup":
        # client sends the encapsulation key, server answers with a ciphertext
        return cls(name, params.ek_bytes, params.ct_bytes, KEM)

    @classmethod
    def hybrid(cls, name: str, *parts: "KexGroup") -> "KexGroup":
        return cls(
            name,
            sum(p.client_keyshare_bytes for p in parts),
            sum(p.server_keyshare_bytes for p in parts),
            KEM if any(p.family == KEM for p in parts) else CLASSICAL,
        )


X25519 = KexGroup("X25519", 32, 32, CLASSICAL)
MLKEM512 = KexGroup.from_kem("MLKEM512", ML_KEM_512)
MLKEM768 = KexGroup.from_kem("MLKEM768", ML_KEM_768)
MLKEM1024 = KexGroup.from_kem("MLKEM1024", ML_KEM_1024)
X25519MLKEM768 = KexGroup.hybrid("X25519MLKEM768", MLKEM768, X25519)

GROUPS: dict[str, KexGroup] = {g.name: g for g in (X25519, MLKEM512, MLKEM768, MLKEM1024, X25519MLKEM768)}


@dataclass(frozen=True)
class AuthConfig:
    """Server authentication, as a byte overhead relative to the RSA chain."""

    name: str
    auth_overhead_bytes: int


RSA = AuthConfig("RSA", 0)
MLDSA44 = AuthConfig("MLDSA44", 5364)

AUTHS: dict[str, AuthConfig] = {a.name: a for a in (RSA, MLDSA44)}


def get_group(group: str | KexGroup) -> KexGroup:
    if isinstance(group, KexGroup):
        return group
    try:
        return GROUPS[group]
    except KeyError:
        raise UnknownNameError(f"unknown key-exchange group {group!r}; known: {', '.join(GROUPS)}") from None


def get_auth(auth: str | AuthConfig) -> AuthConfig:
    if isinstance(auth, AuthConfig):
        return auth
    try:
        return AUTHS[auth]
    except KeyError:
        raise UnknownNameError(f"unknown auth config {auth!r}; known: {', '.join(AUTHS)}") from None


def keyshare_bytes(group_name: str) -> tuple[int, int]:
    g = get_group(group_name)
    return g.client_keyshare_bytes, g.server_keyshare_bytes


def kex_delta(g1: str | KexGroup, g2: str | KexGroup) -> int:
    """Payload difference between two groups at the same auth and family; needs no calibration."""
    return get_group(g1).kex_bytes - get_group(g2).kex_bytes


def auth_shift(a1: str | AuthConfig, a2: str | AuthConfig) -> int:
    return get_auth(a1).auth_overhead_bytes - get_auth(a2).auth_overhead_bytes


@dataclass(frozen=True)
class Calibration:
    """base_bytes per (family, auth name) cell, plus the fit spread per cell."""

    bases: Mapping[tuple[str, str], float]
    spread: Mapping[tuple[str, str], float] = field(default_factory=dict)

    def base(self, family: str, auth: str) -> float:
        try:
            return self.bases[(family, auth)]
        except KeyError:
            raise CalibrationError(f"calibration has no base for cell ({family}, {auth})") from None

    def report(self) -> list[dict]:
        return [
            {"family": f, "auth": a, "base": b, "spread": self.spread.get((f, a), 0)}
            for (f, a), b in sorted(self.bases.items())
        ]


def _shipped() -> Calibration:
    rsa = {CLASSICAL: 1829, KEM: 1821}
    bases = {(f, a.name): rsa[f] + a.auth_overhead_bytes for f in FAMILIES for a in AUTHS.values()}
    return Calibration(bases, {cell: 0 for cell in bases})


SHIPPED_CALIBRATION = _shipped()


@dataclass(frozen=True)
class PayloadBreakdown:
    kex: str
    auth: str
    base_bytes: float
    kex_bytes: int

    def __post_init__(self) -> None:
        if self.base_bytes < 0 or self.kex_bytes < 0:
            raise ValueError("payload components must be non-negative")
        if self.total_bytes <= 0:
            raise ValueError("total payload must be positive")

    @property
    def total_bytes(self) -> float:
        return self.base_bytes + self.kex_bytes

    def as_row(self) -> dict:
        return {"kex": self.kex, "auth": self.auth, "base": self.base_bytes,
                "kex_bytes": self.kex_bytes, "total": self.total_bytes}


def handshake_payload(
    kex: str | KexGroup,
    auth: str | AuthConfig,
    calibration: Calibration = SHIPPED_CALIBRATION,
) -> PayloadBreakdown:
    g, a = get_group(kex), get_auth(auth)
    return PayloadBreakdown(g.name, a.name, calibration.base(g.family, a.name), g.kex_bytes)


def calibrate_base(
    observed: Iterable[tuple[str, str, float]],
    required: Sequence[tuple[str, str]] | None = None,
) -> Calibration:
    """Fit base = total - keyshares per (family, auth) cell.

    Disagreeing observations in one cell are averaged and their max-min
    spread is recorded.  ``required`` defaults to every family x auth cell.
    """
    cells: dict[tuple[str, str], list[float]] = {}
    for kex, auth, total in observed:
        g, a = get_group(kex), get_auth(auth)
        cells.setdefault((g.family, a.name), []).append(total - g.kex_bytes)
    if not cells:
        raise CalibrationError("no observations to calibrate from")
    if required is None:
        required = [(f, a) for f in FAMILIES for a in AUTHS]
    for cell in required:
        if cell not in cells:
            raise CalibrationError(f"no observation for cell (family={cell[0]}, auth={cell[1]})")
    bases, spread = {}, {}
    for cell, values in cells.items():
        m = mean(values)
        bases[cell] = int(m) if m == int(m) else m
        spread[cell] = max(values) - min(values)
        if spread[cell]:
            log.warning("cell %s: observations disagree by %s bytes, using the mean", cell, spread[cell])
    return Calibration(bases, spread)


# (kex, auth) rows of the reference payload table, in table order
TABLE2_CONFIGS: tuple[tuple[str, str], ...] = tuple(
    (g, a) for g in ("X25519", "X25519MLKEM768", "MLKEM512", "MLKEM768", "MLKEM1024") for a in ("RSA", "MLDSA44")
)


def payload_table(
    configs: Sequence[tuple[str, str]] = TABLE2_CONFIGS,
    calibration: Calibration = SHIPPED_CALIBRATION,
) -> list[PayloadBreakdown]:
    return [handshake_payload(g, a, calibration) for g, a in configs]


COLUMNS = ("kex", "auth", "base", "kex_bytes", "total")


def to_csv(rows: Iterable[PayloadBreakdown]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_row())
    return buf.getvalue()
