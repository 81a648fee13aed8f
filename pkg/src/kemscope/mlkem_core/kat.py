"""Known-answer vector ingestion and validation.

File format: one ``name = hexvalue`` pair per line, vectors separated by blank
lines, ``#`` starts a comment.  Recognised fields:

    count        decimal vector index (optional)
    d, z         keygen seed halves (or ``seed`` holding all 64 bytes)
    ek, dk       expected keys (``pk``/``sk`` accepted as aliases)
    msg          32-byte encapsulation randomness
    ct, ss       expected ciphertext and shared secret
    ct_n, ss_n   an invalid ciphertext and its implicit-rejection secret

A repeated field name also starts a new vector, so NIST ``.rsp`` files with
no blank lines parse unchanged.

ACVP JSON uses different names; `acvp_to_records` maps them:

    ACVP field      KAT field
    ----------      ---------
    d, z            d, z
    ek, dk          ek, dk
    m               msg
    c               ct
    k               ss
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import kem
from .params import KemParams, ParameterError, get_preset, params_for_ek_length, STANDARD

_ALIASES = {"pk": "ek", "sk": "dk"}
_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S*)$")
_HEX = re.compile(r"^(?:[0-9a-fA-F]{2})*$")


class KatParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class KatVector:
    index: int
    line: int
    fields: dict[str, bytes] = field(default_factory=dict)
    params_hint: str | None = None

    def get(self, name: str) -> bytes | None:
        return self.fields.get(name)


@dataclass(frozen=True)
class StageResult:
    vector: int
    stage: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    source: str
    results: list[StageResult]

    @property
    def ok(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    @property
    def failures(self) -> list[StageResult]:
        return [r for r in self.results if not r.passed]

    @property
    def failing_vectors(self) -> list[int]:
        return sorted({r.vector for r in self.failures})

    def lines(self) -> list[str]:
        return [
            f"vector {r.vector} {r.stage}: {'pass' if r.passed else 'FAIL'}" + (f" ({r.detail})" if r.detail else "")
            for r in self.results
        ]


def parse_kat(text: str) -> list[KatVector]:
    vectors: list[KatVector] = []
    current: KatVector | None = None
    hint: str | None = None

    def close() -> None:
        nonlocal current
        if current is not None and current.fields:
            vectors.append(current)
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            close()
            continue
        if line.startswith("[") and line.endswith("]"):
            close()
            hint = line[1:-1].strip()
            continue
        m = _LINE.match(line)
        if not m:
            raise KatParseError(f"expected 'name = hexvalue', got {raw.strip()!r}", lineno)
        name, value = m.group(1).lower(), m.group(2)
        name = _ALIASES.get(name, name)
        if current is not None and (name in current.fields or (name == "count" and current.fields)):
            close()
        if current is None:
            current = KatVector(index=len(vectors), line=lineno, params_hint=hint)
        if name == "count":
            if not value.isdigit():
                raise KatParseError(f"count must be a decimal integer, got {value!r}", lineno)
            current.index = int(value)
            current.fields["count"] = b""
            continue
        if not _HEX.match(value):
            raise KatParseError(f"field {name!r} is not an even-length hex string", lineno)
        current.fields[name] = bytes.fromhex(value)
    close()
    if not vectors:
        raise KatParseError("no vectors found", 1)
    return vectors


def load_kat(path) -> list[KatVector]:
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise KatParseError(f"cannot read {path}: {exc}", 0) from exc
    return parse_kat(text)


def _params_for(vec: KatVector, params: KemParams | None) -> KemParams:
    if params is not None:
        return params
    if vec.params_hint:
        return get_preset(vec.params_hint)
    if vec.get("ek") is not None:
        return params_for_ek_length(len(vec.fields["ek"]))
    if vec.get("dk") is not None:
        for p in STANDARD:
            if p.dk_bytes == len(vec.fields["dk"]):
                return p
    raise ParameterError(f"vector {vec.index}: cannot infer the parameter set")


def _check(results, vec, stage, expected: bytes | None, got: bytes) -> None:
    if expected is None:
        return
    ok = expected == got
    results.append(StageResult(vec.index, stage, ok, "" if ok else f"expected {expected[:8].hex()}..., got {got[:8].hex()}..."))


def validate_vectors(vectors: list[KatVector], params: KemParams | None = None, source: str = "") -> ValidationReport:
    results: list[StageResult] = []
    for vec in vectors:
        try:
            p = _params_for(vec, params)
        except ParameterError as exc:
            results.append(StageResult(vec.index, "params", False, str(exc)))
            continue
        f = vec.fields
        seed = None
        if "d" in f and "z" in f:
            seed = f["d"] + f["z"]
        elif len(f.get("seed", b"")) == 64:
            seed = f["seed"]
        ek, dk = f.get("ek"), f.get("dk")
        try:
            if seed is not None:
                pair = kem.keygen(p, seed)
                _check(results, vec, "keygen", ek, pair.encaps_key)
                _check(results, vec, "keygen", dk, pair.decaps_key)
                ek = ek or pair.encaps_key
                dk = dk or pair.decaps_key
            if ek is not None and "msg" in f:
                ct, ss = kem.encaps(p, ek, f["msg"])
                _check(results, vec, "encaps", f.get("ct"), ct.data)
                _check(results, vec, "encaps", f.get("ss"), ss.data)
            if dk is not None and "ct" in f and "ss" in f:
                _check(results, vec, "decaps", f["ss"], kem.decaps(p, dk, f["ct"]).data)
            if dk is not None and "ct_n" in f and "ss_n" in f:
                _check(results, vec, "decaps_reject", f["ss_n"], kem.decaps(p, dk, f["ct_n"]).data)
        except ValueError as exc:
            results.append(StageResult(vec.index, "input", False, str(exc)))
    return ValidationReport(source, results)


def validate_kat(kat_file_path, params: KemParams | None = None) -> ValidationReport:
    """Run every vector in the file through keygen/encaps/decaps."""
    return validate_vectors(load_kat(kat_file_path), params, str(kat_file_path))


def acvp_to_records(document: dict | str) -> list[KatVector]:
    """Convert an ACVP ML-KEM JSON document (keyGen or encapDecap) to vectors."""
    if isinstance(document, str):
        document = json.loads(document)
    mapping = {"d": "d", "z": "z", "ek": "ek", "dk": "dk", "m": "msg", "c": "ct", "k": "ss"}
    vectors = []
    for group in document.get("testGroups", []):
        hint = group.get("parameterSet")
        for test in group.get("tests", []):
            vec = KatVector(index=int(test.get("tcId", len(vectors))), line=0, params_hint=hint)
            for src, dst in mapping.items():
                value = test.get(src, group.get(src))
                if value is not None:
                    vec.fields[dst] = bytes.fromhex(value)
            vectors.append(vec)
    return vectors


def format_kat(vectors: list[KatVector]) -> str:
    out = []
    for vec in vectors:
        out.append(f"count = {vec.index}")
        out.extend(f"{k} = {v.hex()}" for k, v in vec.fields.items() if k != "count")
        out.append("")
    return "\n".join(out)
