"""TLS 1.3 handshake payload accounting, trace analysis and an impairment rate model."""

from .payload import (
    AUTHS,
    GROUPS,
    SHIPPED_CALIBRATION,
    TABLE2_CONFIGS,
    AuthConfig,
    Calibration,
    CalibrationError,
    KexGroup,
    PayloadBreakdown,
    UnknownNameError,
    auth_shift,
    calibrate_base,
    get_auth,
    get_group,
    handshake_payload,
    kex_delta,
    keyshare_bytes,
    payload_table,
    to_csv,
)
from .rate import NetProfile, RateResult, connection_time, rate_from_json, simulate_handshake_rate
from .trace import (
    Direction,
    TraceParseError,
    TraceRecord,
    TraceSummary,
    analyze_trace,
    format_trace,
    load_trace,
    parse_trace,
    synthesize_trace,
)

__all__ = [
    "AUTHS", "GROUPS", "SHIPPED_CALIBRATION", "TABLE2_CONFIGS", "AuthConfig", "Calibration", "CalibrationError",
    "Direction", "KexGroup", "NetProfile", "PayloadBreakdown", "RateResult", "TraceParseError", "TraceRecord",
    "TraceSummary", "UnknownNameError", "analyze_trace", "auth_shift", "calibrate_base", "connection_time",
    "format_trace", "get_auth", "get_group", "handshake_payload", "kex_delta", "keyshare_bytes", "load_trace",
    "parse_trace", "payload_table", "rate_from_json", "simulate_handshake_rate", "synthesize_trace", "to_csv",
]
