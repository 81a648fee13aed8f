import csv
import io
import json

import pytest

from kemscope import bench_harness
from kemscope.mlkem_core import ML_KEM_512, ML_KEM_768, ML_KEM_1024


def test_bench_kem_contract():
    results = bench_harness.bench_kem(ML_KEM_512, min_duration=0.15, seed=1, warmup=10, repeats=3, batch=4)
    assert [r.op_name for r in results] == ["keygen", "encaps", "decaps"]
    for r in results:
        assert r.wall_time >= 0.15
        assert r.iterations >= 1 and r.iterations % 4 == 0
        assert r.ops_per_sec == pytest.approx(r.iterations / r.wall_time)
        assert r.warmup_iterations == 12
        assert len(r.repeat_rates) == 3 and r.rel_std_err >= 0


def test_min_duration_one_second():
    results = bench_harness.bench_kem(ML_KEM_512, min_duration=1.0, warmup=0, repeats=1)
    assert all(r.wall_time >= 1.0 for r in results)


def test_same_seed_same_outputs():
    a = bench_harness.bench_kem(ML_KEM_768, 0.05, seed=7, warmup=5, batch=2)
    b = bench_harness.bench_kem(ML_KEM_768, 0.05, seed=7, warmup=5, batch=2)
    c = bench_harness.bench_kem(ML_KEM_768, 0.05, seed=8, warmup=5, batch=2)
    assert [r.output_digest for r in a] == [r.output_digest for r in b]
    assert [r.output_digest for r in a] != [r.output_digest for r in c]


def test_single_call_mode():
    results = bench_harness.bench_kem(ML_KEM_512, 0.05, warmup=1, batch=1)
    assert all(r.iterations >= 1 for r in results)


@pytest.mark.parametrize("kwargs", [dict(min_duration=0), dict(min_duration=0.1, repeats=0),
                                    dict(min_duration=0.1, batch=0), dict(min_duration=0.1, warmup=-1)])
def test_bench_validation(kwargs):
    with pytest.raises(ValueError):
        bench_harness.bench_kem(ML_KEM_512, **kwargs)


def test_suite_needs_two_sets():
    with pytest.raises(ValueError):
        bench_harness.bench_suite([ML_KEM_512], 0.1)


def test_suite_shape_and_order():
    suite = bench_harness.bench_suite([ML_KEM_1024, ML_KEM_512, ML_KEM_768], 0.03, warmup=2, repeats=1, batch=2)
    assert len(suite.results) == 9 and len(suite.verdicts) == 3
    assert suite.verdicts[0].params_order == ("ML-KEM-512", "ML-KEM-768", "ML-KEM-1024")
    doc = json.loads(bench_harness.to_json(suite))
    assert {v["op"] for v in doc["verdicts"]} == {"keygen", "encaps", "decaps"}
    rows = list(csv.DictReader(io.StringIO(bench_harness.to_csv(suite.results))))
    assert list(rows[0]) == ["op", "params", "iterations", "seconds", "ops_per_sec"]


def test_verdict_logic():
    v = bench_harness.OrderingVerdict("keygen", ("a", "b", "c"), (3.0, 2.0, 1.0))
    assert v.passed
    assert not bench_harness.OrderingVerdict("keygen", ("a", "b"), (2.0, 2.0)).passed


def _encaps_rate(params) -> float:
    return next(r for r in bench_harness.bench_kem(params, 0.2, warmup=32, repeats=1) if r.op_name == "encaps").ops_per_sec


def test_compression_cost_is_small():
    # regression baseline on this host, not a portable constant; interleaved
    # rounds keep slow drifts of a shared machine out of the ratio
    lossless = ML_KEM_512.with_compression(12, 12)
    ratios = sorted(_encaps_rate(lossless) / _encaps_rate(ML_KEM_512) for _ in range(5))
    ratio = ratios[2]
    print(f"encaps ops/sec (12,12) / (10,4), median of 5: {ratio:.3f}")
    assert 0.85 <= ratio <= 1.15
