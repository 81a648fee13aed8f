import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kemscope import handshake_model as hs
from kemscope.handshake_model import (
    CalibrationError,
    NetProfile,
    TraceParseError,
    TraceRecord,
    UnknownNameError,
    analyze_trace,
    calibrate_base,
    handshake_payload,
    keyshare_bytes,
    parse_trace,
    simulate_handshake_rate,
    synthesize_trace,
)

TABLE2 = {
    ("X25519", "RSA"): 1893, ("X25519", "MLDSA44"): 7257,
    ("X25519MLKEM768", "RSA"): 4157, ("X25519MLKEM768", "MLDSA44"): 9521,
    ("MLKEM512", "RSA"): 3389, ("MLKEM512", "MLDSA44"): 8753,
    ("MLKEM768", "RSA"): 4093, ("MLKEM768", "MLDSA44"): 9457,
    ("MLKEM1024", "RSA"): 4957, ("MLKEM1024", "MLDSA44"): 10321,
}


# keyshares


@pytest.mark.parametrize("group,expected", [
    ("X25519", (32, 32)),
    ("MLKEM512", (800, 768)),
    ("MLKEM768", (1184, 1088)),
    ("MLKEM1024", (1568, 1568)),
    ("X25519MLKEM768", (1216, 1120)),
])
def test_keyshare_bytes(group, expected):
    assert keyshare_bytes(group) == expected


def test_kem_keyshares_follow_formula():
    for k, name in ((2, "MLKEM512"), (3, "MLKEM768"), (4, "MLKEM1024")):
        du, dv = (11, 5) if k == 4 else (10, 4)
        assert keyshare_bytes(name) == (384 * k + 32, 32 * (k * du + dv))


def test_hybrid_delta():
    assert hs.kex_delta("X25519MLKEM768", "X25519") == 2272


def test_unknown_names():
    with pytest.raises(UnknownNameError, match="MLKEM2048"):
        keyshare_bytes("MLKEM2048")
    with pytest.raises(UnknownNameError):
        handshake_payload("MLKEM768", "ECDSA")


# payload


def test_table2_exact():
    rows = hs.payload_table()
    assert {(r.kex, r.auth): r.total_bytes for r in rows} == TABLE2
    assert [(r.kex, r.auth) for r in rows] == list(TABLE2)


def test_structural_deltas():
    assert hs.kex_delta("MLKEM768", "MLKEM512") == 704
    assert hs.kex_delta("MLKEM1024", "MLKEM768") == 864
    assert hs.kex_delta("X25519MLKEM768", "MLKEM768") == 64
    assert hs.auth_shift("MLDSA44", "RSA") == 5364


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_additivity_any_calibration(base_rsa, extra):
    cal = hs.Calibration({("kem", "RSA"): base_rsa, ("kem", "MLDSA44"): base_rsa + extra,
                          ("classical", "RSA"): base_rsa + 8, ("classical", "MLDSA44"): base_rsa + 8 + extra})
    kem_groups = ["MLKEM512", "MLKEM768", "MLKEM1024", "X25519MLKEM768"]
    for g1 in kem_groups:
        for g2 in kem_groups:
            diff = handshake_payload(g1, "RSA", cal).total_bytes - handshake_payload(g2, "RSA", cal).total_bytes
            assert diff == hs.kex_delta(g1, g2)
    shifts = {handshake_payload(g, "MLDSA44", cal).total_bytes - handshake_payload(g, "RSA", cal).total_bytes
              for g in hs.GROUPS}
    assert shifts == {extra}


def test_shipped_auth_shift_constant():
    shifts = {handshake_payload(g, "MLDSA44").total_bytes - handshake_payload(g, "RSA").total_bytes for g in hs.GROUPS}
    assert shifts == {5364}


def test_breakdown_invariants():
    b = handshake_payload("MLKEM768", "RSA")
    assert (b.base_bytes, b.kex_bytes, b.total_bytes) == (1821, 2272, 4093)
    with pytest.raises(ValueError):
        hs.PayloadBreakdown("x", "y", -1, 10)


# calibration


def test_calibrate_from_table2():
    cal = calibrate_base([(g, a, t) for (g, a), t in TABLE2.items()])
    assert cal.base("kem", "RSA") == 1821
    assert cal.base("classical", "RSA") == 1829
    assert cal.base("kem", "MLDSA44") - cal.base("kem", "RSA") == 5364
    assert all(v == 0 for v in cal.spread.values())
    assert {(r.kex, r.auth): r.total_bytes for r in hs.payload_table(calibration=cal)} == TABLE2


def test_calibrate_kem_rows_zero_spread():
    rows = [(g, "RSA", TABLE2[(g, "RSA")]) for g in ("MLKEM512", "MLKEM768", "MLKEM1024", "X25519MLKEM768")]
    cal = calibrate_base(rows, required=[("kem", "RSA")])
    assert cal.base("kem", "RSA") == 1821 and cal.spread[("kem", "RSA")] == 0


def test_calibrate_reports_spread():
    cal = calibrate_base([("MLKEM512", "RSA", 3389), ("MLKEM768", "RSA", 4103)], required=[("kem", "RSA")])
    assert cal.spread[("kem", "RSA")] == 10
    assert cal.base("kem", "RSA") == 1826


def test_calibrate_errors():
    with pytest.raises(CalibrationError):
        calibrate_base([])
    with pytest.raises(CalibrationError, match="classical"):
        calibrate_base([("MLKEM512", "RSA", 3389), ("MLKEM512", "MLDSA44", 8753)])
    with pytest.raises(CalibrationError, match="kem, MLDSA44"):
        handshake_payload("MLKEM512", "MLDSA44", hs.Calibration({("kem", "RSA"): 1}))


def test_payload_csv():
    lines = hs.to_csv(hs.payload_table()).splitlines()
    assert lines[0] == "kex,auth,base,kex_bytes,total"
    assert lines[1] == "X25519,RSA,1829,64,1893"
    assert len(lines) == 11


# traces


def test_trace_trivial():
    assert analyze_trace([]).total == 0
    assert analyze_trace([TraceRecord("c2s", 100), TraceRecord("s2c", 50)]).total == 150


@pytest.mark.parametrize("cfg", list(TABLE2))
def test_synthetic_trace_round_trip(cfg):
    records = synthesize_trace(handshake_payload(*cfg))
    text = hs.format_trace(records, header="synthetic")
    summary = analyze_trace(parse_trace(text))
    assert summary.total == TABLE2[cfg]
    assert all(r.payload_len <= 1448 for r in records)
    assert any(r.payload_len == 0 for r in records)


def test_trace_split_by_direction():
    records = synthesize_trace(handshake_payload("MLKEM768", "RSA"))
    s = analyze_trace(records)
    assert s.c2s + s.s2c == s.total
    assert s.c2s >= 1184 and s.s2c >= 1088


@given(st.lists(st.tuples(st.sampled_from(["c2s", "s2c"]), st.integers(0, 5000)), max_size=30), st.randoms())
def test_trace_permutation_and_concat(pairs, rnd):
    records = [TraceRecord(d, n) for d, n in pairs]
    shuffled = records[:]
    rnd.shuffle(shuffled)
    assert analyze_trace(shuffled) == analyze_trace(records)
    half = len(records) // 2
    assert analyze_trace(records).total == analyze_trace(records[:half]).total + analyze_trace(records[half:]).total


def test_trace_parse_comments_and_blank():
    assert analyze_trace(parse_trace("# cap\n\nc2s,10  # hello\ns2c , 5\n")).total == 15


@pytest.mark.parametrize("text,line", [
    ("c2s,10\nup,5\n", 2),
    ("c2s,10\n\nc2s,-4\n", 3),
    ("c2s\n", 1),
    ("# ok\nc2s,1,2\n", 2),
    ("s2c,abc\n", 1),
])
def test_trace_parse_errors(text, line):
    with pytest.raises(TraceParseError) as info:
        parse_trace(text)
    assert info.value.line == line


def test_trace_record_validation():
    with pytest.raises(ValueError):
        TraceRecord("c2s", -1)
    with pytest.raises(ValueError):
        TraceRecord("sideways", 1)


# rate model


@pytest.mark.parametrize("profile,expected", [
    (NetProfile(0.050), 36),
    (NetProfile(0.020, loss_prob=0.005, rto=1.0), 66),
    (NetProfile(0.0), 2200),
])
def test_rate_examples(profile, expected):
    assert simulate_handshake_rate(profile, 0.005, 11.0).completed == expected


def test_connection_time():
    assert hs.connection_time(NetProfile(0.05), 0.005) == pytest.approx(0.305)
    assert hs.connection_time(NetProfile(0.02, 0.005), 0.005) == pytest.approx(0.165)


@given(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0.001, 0.05))
def test_rate_monotone(d1, d2, l1, l2, crypto):
    lo_d, hi_d = sorted((d1, d2))
    lo_l, hi_l = sorted((l1, l2))
    base = simulate_handshake_rate(NetProfile(lo_d, lo_l), crypto).completed
    assert simulate_handshake_rate(NetProfile(hi_d, lo_l), crypto).completed <= base
    assert simulate_handshake_rate(NetProfile(lo_d, hi_l), crypto).completed <= base
    assert simulate_handshake_rate(NetProfile(lo_d, lo_l), crypto * 2).completed <= base


@pytest.mark.parametrize("kwargs", [
    dict(one_way_delay=-0.1),
    dict(one_way_delay=0.1, loss_prob=1.0),
    dict(one_way_delay=0.1, loss_prob=-0.1),
    dict(one_way_delay=0.1, rtts_required=0),
])
def test_profile_validation(kwargs):
    with pytest.raises(ValueError):
        NetProfile(**kwargs)


def test_rate_errors():
    with pytest.raises(ValueError):
        simulate_handshake_rate(NetProfile(0.1), 0.005, 0)
    with pytest.raises(ValueError):
        simulate_handshake_rate(NetProfile(0.0), 0.0)


def test_rate_json_round_trip():
    result = hs.rate_from_json(json.dumps({"profile": {"one_way_delay": 0.05}, "duration": 11}))
    assert result.completed == 36
    out = json.loads(result.to_json())
    assert out["profile"]["rtts_required"] == 3 and out["completed"] == 36
    assert hs.rate_from_json('{"one_way_delay": 0.02, "loss_prob": 0.005}').completed == 66
    with pytest.raises(ValueError):
        hs.rate_from_json('{"one_way_delay": 0.02, "jitter": 1}')
