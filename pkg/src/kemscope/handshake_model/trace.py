"""Payload-length traces: a synthetic segmenter and the summing analyzer.

Trace files hold one ``c2s,<len>`` or ``s2c,<len>`` pair per line; ``#``
starts a comment.  Converting real captures (for example with
``tshark -T fields -e ip.src -e tcp.len``) into this format is left to
external tooling.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .payload import PayloadBreakdown, get_group

MSS = 1448
# illustrative split of the base overhead across flights; only the sum is calibrated
CLIENT_HELLO_FRAMING = 220
CLIENT_FINISHED = 80


class Direction(str, Enum):
    C2S = "c2s"
    S2C = "s2c"


class TraceParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TraceRecord:
    direction: Direction
    payload_len: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.payload_len < 0:
            raise ValueError("payload_len must be >= 0")


@dataclass(frozen=True)
class TraceSummary:
    total: int
    c2s: int
    s2c: int
    segments: int

    def to_dict(self) -> dict:
        return {"total": self.total, "c2s": self.c2s, "s2c": self.s2c, "segments": self.segments}


def analyze_trace(records: Iterable[TraceRecord]) -> TraceSummary:
    """Sum payload lengths; pure ACKs have length 0 and add nothing."""
    sums = {Direction.C2S: 0, Direction.S2C: 0}
    count = 0
    for rec in records:
        sums[rec.direction] += rec.payload_len
        count += 1
    return TraceSummary(sums[Direction.C2S] + sums[Direction.S2C], sums[Direction.C2S], sums[Direction.S2C], count)


def parse_trace(text: str) -> list[TraceRecord]:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise TraceParseError(f"expected 'direction,length', got {raw.strip()!r}", lineno)
        direction, length = parts
        if direction not in (d.value for d in Direction):
            raise TraceParseError(f"unknown direction {direction!r} (use c2s or s2c)", lineno)
        if not length.isdigit():
            raise TraceParseError(f"length must be a non-negative integer, got {length!r}", lineno)
        records.append(TraceRecord(Direction(direction), int(length)))
    return records


def load_trace(path: str | Path) -> list[TraceRecord]:
    return parse_trace(Path(path).read_text())


def format_trace(records: Iterable[TraceRecord], header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines += [f"{r.direction.value},{r.payload_len}" for r in records]
    return "\n".join(lines) + "\n"


def _segments(direction: Direction, size: int, mss: int) -> list[TraceRecord]:
    out = []
    while size > 0:
        n = min(size, mss)
        out.append(TraceRecord(direction, n))
        size -= n
    return out


def synthesize_trace(breakdown: PayloadBreakdown, mss: int = MSS) -> list[TraceRecord]:
    """Segment one handshake into TCP-sized records, including zero-length ACKs.

    Client flight: hello (framing + client keyshare), later Finished.  Server
    flight: hello with the server keyshare plus the remaining base bytes
    (certificate chain, signature, Finished).
    """
    if mss < 1:
        raise ValueError("mss must be >= 1")
    base = breakdown.base_bytes
    if base != int(base):
        raise ValueError("synthetic traces need an integer base")
    base = int(base)
    group = get_group(breakdown.kex)
    client_share, server_share = group.client_keyshare_bytes, group.server_keyshare_bytes
    hello_framing = min(CLIENT_HELLO_FRAMING, base)
    finished = min(CLIENT_FINISHED, base - hello_framing)
    server = base - hello_framing - finished + server_share

    c2s, s2c = Direction.C2S, Direction.S2C
    records = [TraceRecord(c2s, 0), TraceRecord(s2c, 0), TraceRecord(c2s, 0)]  # transport setup
    records += _segments(c2s, hello_framing + client_share, mss)
    records.append(TraceRecord(s2c, 0))
    records += _segments(s2c, server, mss)
    records.append(TraceRecord(c2s, 0))
    records += _segments(c2s, finished, mss)
    records.append(TraceRecord(s2c, 0))
    return records
