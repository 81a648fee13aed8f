"""Analytic handshakes-per-window model under delay and loss.

Connections run one at a time.  Each costs
    T = rtts_required * 2 * one_way_delay + crypto_time + packets * loss * rto
seconds (the last term is a first-order retransmission penalty), and
floor(duration / T) connections complete.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

DEFAULT_CRYPTO_TIME = 0.005
DEFAULT_DURATION = 11.0


def _exact(x: float) -> Fraction:
    # decimal inputs like 0.305 stay exact, so floor() does not flip on float noise
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class NetProfile:
    one_way_delay: float
    loss_prob: float = 0.0
    rto: float = 1.0
    rtts_required: int = 3
    packets_per_handshake: int = 8

    def __post_init__(self) -> None:
        if not self.one_way_delay >= 0:
            raise ValueError("one_way_delay must be >= 0")
        if not 0 <= self.loss_prob < 1:
            raise ValueError("loss_prob must lie in [0, 1)")
        if not self.rto >= 0:
            raise ValueError("rto must be >= 0")
        if self.rtts_required < 1:
            raise ValueError("rtts_required must be >= 1")
        if self.packets_per_handshake < 0:
            raise ValueError("packets_per_handshake must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> "NetProfile":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown profile fields: {sorted(unknown)}")
        return cls(**known)


@dataclass(frozen=True)
class RateResult:
    profile: NetProfile
    crypto_time: float
    duration: float
    connection_time: float
    completed: int

    def to_dict(self) -> dict:
        return {
            "profile": asdict(self.profile),
            "crypto_time": self.crypto_time,
            "duration": self.duration,
            "connection_time": self.connection_time,
            "completed": self.completed,
            "per_second": self.completed / self.duration,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def connection_time(profile: NetProfile, crypto_time: float) -> Fraction:
    p = profile
    return (p.rtts_required * 2 * _exact(p.one_way_delay) + _exact(crypto_time)
            + p.packets_per_handshake * _exact(p.loss_prob) * _exact(p.rto))


def simulate_handshake_rate(
    profile: NetProfile,
    crypto_time: float = DEFAULT_CRYPTO_TIME,
    duration: float = DEFAULT_DURATION,
) -> RateResult:
    if not duration > 0:
        raise ValueError("duration must be > 0")
    if not crypto_time >= 0:
        raise ValueError("crypto_time must be >= 0")
    t = connection_time(profile, crypto_time)
    if t <= 0:
        raise ValueError("per-connection time is zero: give a delay or a crypto time")
    return RateResult(profile, crypto_time, duration, float(t), math.floor(_exact(duration) / t))


def rate_from_json(text: str) -> RateResult:
    """JSON in: {"profile": {...}, "crypto_time": s, "duration": s} or a bare profile."""
    data = json.loads(text)
    if "profile" in data:
        return simulate_handshake_rate(
            NetProfile.from_dict(data["profile"]),
            data.get("crypto_time", DEFAULT_CRYPTO_TIME),
            data.get("duration", DEFAULT_DURATION),
        )
    return simulate_handshake_rate(NetProfile.from_dict(data))
