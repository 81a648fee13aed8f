"""Ciphertext bit-length and ciphertext expansion rate (CER).

B_ct = k*n*du + n*dv transmitted bits for n = 256, and CER = B_ct / K where K
is the number of encapsulated information bits (256 for a 32-byte secret).
Everything is integer or exact-rational arithmetic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .mlkem_core.params import N, ParameterError

DEFAULT_K_BITS = 256


@dataclass(frozen=True)
class CerRecord:
    label: str
    k: int
    du: int
    dv: int
    ct_bits: int
    k_bits: int
    cer: Fraction

    @property
    def cer_rounded(self) -> str:
        return format_ratio(self.cer)

    def as_row(self) -> dict:
        return {
            "label": self.label, "k": self.k, "du": self.du, "dv": self.dv,
            "B_ct_bits": self.ct_bits, "K_bits": self.k_bits, "CER": self.cer_rounded,
        }


def format_ratio(value: Fraction, places: int = 1) -> str:
    """Decimal string rounded half-up at ``places`` digits, computed exactly."""
    scale = 10 ** places
    scaled = (value * scale * 2 + 1) // 2  # floor(x + 1/2)
    whole, frac = divmod(int(scaled), scale)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


def _check(k: int, du: int, dv: int) -> None:
    if k < 1:
        raise ParameterError(f"module rank k={k} must be >= 1")
    for name, d in (("du", du), ("dv", dv)):
        if not 1 <= d <= 12:
            raise ParameterError(f"{name}={d} outside 1..12")


def ciphertext_bits(k: int, du: int, dv: int) -> int:
    _check(k, du, dv)
    return k * N * du + N * dv


def cer(k: int, du: int, dv: int, k_bits: int = DEFAULT_K_BITS) -> Fraction:
    if k_bits <= 0:
        raise ParameterError(f"encapsulated bits K={k_bits} must be positive")
    return Fraction(ciphertext_bits(k, du, dv), k_bits)


def cer_record(label: str, k: int, du: int, dv: int, k_bits: int = DEFAULT_K_BITS) -> CerRecord:
    return CerRecord(label, k, du, dv, ciphertext_bits(k, du, dv), k_bits, cer(k, du, dv, k_bits))


# (label, k, du, dv, K) rows of the reference CER table
TABLE1: tuple[tuple[str, int, int, int, int], ...] = (
    ("ML-KEM-512", 2, 12, 12, 256),
    ("ML-KEM-768", 3, 12, 12, 256),
    ("ML-KEM-1024", 4, 12, 12, 256),
    ("ML-KEM-512 (uniform comp.)", 2, 10, 4, 256),
    ("ML-KEM-768 (uniform comp.)", 3, 10, 4, 256),
    ("ML-KEM-1024 (uniform comp.)", 4, 11, 5, 256),
)


def cer_table(configs: Sequence[tuple] = TABLE1) -> list[CerRecord]:
    """One record per (label, k, du, dv[, K]) config, in input order."""
    if not configs:
        raise ParameterError("cer_table needs at least one configuration")
    records = []
    for i, cfg in enumerate(configs):
        label, k, du, dv, *rest = cfg
        try:
            records.append(cer_record(label, k, du, dv, rest[0] if rest else DEFAULT_K_BITS))
        except ParameterError as exc:
            raise ParameterError(f"row {i} ({label}): {exc}") from exc
    return records


COLUMNS = ("label", "k", "du", "dv", "B_ct_bits", "K_bits", "CER")


def to_csv(records: Iterable[CerRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.as_row())
    return buf.getvalue()


def to_json(records: Iterable[CerRecord]) -> str:
    return json.dumps([rec.as_row() for rec in records], indent=2)


def record_dict(rec: CerRecord) -> dict:
    d = asdict(rec)
    d["cer"] = rec.cer_rounded
    return d
