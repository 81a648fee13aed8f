"""Duration-targeted keygen/encaps/decaps throughput measurement.

Each operation gets a fixed warmup, then ``repeats`` timed blocks that each
run until ``min_duration / repeats`` seconds of monotonic wall clock pass.
Timed regions are single-threaded.  Inputs come from a seeded pool, so the
crypto outputs (summarized by ``output_digest``) are reproducible even
though timings are not.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

from .mlkem_core import kem
from .mlkem_core.params import KemParams

OPS = ("keygen", "encaps", "decaps")
DEFAULT_WARMUP = 100
DEFAULT_REPEATS = 3
DEFAULT_BATCH = 32


@dataclass(frozen=True)
class BenchResult:
    op_name: str
    params_label: str
    iterations: int
    wall_time: float
    warmup_iterations: int
    repeat_rates: tuple[float, ...]
    output_digest: str

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.wall_time <= 0:
            raise ValueError("wall_time must be positive")

    @property
    def ops_per_sec(self) -> float:
        return self.iterations / self.wall_time

    @property
    def rel_std_err(self) -> float:
        """Relative standard error of the per-repeat rates (0 for one repeat)."""
        rates = self.repeat_rates
        if len(rates) < 2:
            return 0.0
        return statistics.stdev(rates) / math.sqrt(len(rates)) / statistics.fmean(rates)

    def as_row(self) -> dict:
        return {"op": self.op_name, "params": self.params_label, "iterations": self.iterations,
                "seconds": self.wall_time, "ops_per_sec": self.ops_per_sec}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["repeat_rates"] = list(self.repeat_rates)
        d["ops_per_sec"] = self.ops_per_sec
        d["rel_std_err"] = self.rel_std_err
        return d


def _workloads(params: KemParams, seed: int, batch: int) -> dict[str, Callable[[], bytes]]:
    """One call runs ``batch`` operations over a fixed seeded input pool."""
    material = kem.derive_seeds(seed, 0, batch, 96)
    kg_seeds = [m[:64] for m in material]
    enc_seeds = [m[64:] for m in material]
    ek, dk = kem.keygen_batch(params, kg_seeds)
    ct, _ = kem.encaps_batch(params, ek, enc_seeds)
    return {
        "keygen": lambda: kem.keygen_batch(params, kg_seeds)[0].tobytes(),
        "encaps": lambda: kem.encaps_batch(params, ek, enc_seeds)[0].tobytes(),
        "decaps": lambda: kem.decaps_batch(params, dk, ct).tobytes(),
    }


def _time_op(fn: Callable[[], bytes], budget: float, repeats: int, batch: int) -> tuple[int, float, list[float]]:
    clock = time.perf_counter
    total_iters, total_time, rates = 0, 0.0, []
    for _ in range(repeats):
        n = 0
        start = clock()
        deadline = start + budget
        while True:
            fn()
            n += batch
            now = clock()
            if now >= deadline:
                break
        elapsed = now - start
        total_iters += n
        total_time += elapsed
        rates.append(n / elapsed)
    return total_iters, total_time, rates


def bench_kem(
    params: KemParams,
    min_duration: float,
    seed: int = 0,
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
    batch: int = DEFAULT_BATCH,
) -> list[BenchResult]:
    """Time keygen, encaps and decaps; returns one BenchResult per op.

    Operations run ``batch`` at a time through the vectorized core and
    every operation counts as one iteration.  ``batch=1`` times single
    calls, where fixed per-call overhead dominates.
    """
    if not min_duration > 0:
        raise ValueError("min_duration must be > 0")
    if warmup < 0 or repeats < 1 or batch < 1:
        raise ValueError("need warmup >= 0, repeats >= 1 and batch >= 1")
    warmup_calls = -(-warmup // batch)
    results = []
    for op, fn in _workloads(params, seed, batch).items():
        digest = hashlib.sha256()
        for _ in range(warmup_calls):
            out = fn()
        digest.update(out if warmup_calls else fn())
        iters, elapsed, rates = _time_op(fn, min_duration / repeats, repeats, batch)
        results.append(BenchResult(op, params.name, iters, elapsed, warmup_calls * batch, tuple(rates),
                                   digest.hexdigest()))
    return results


@dataclass(frozen=True)
class OrderingVerdict:
    op_name: str
    params_order: tuple[str, ...]
    ops_per_sec: tuple[float, ...]

    @property
    def passed(self) -> bool:
        """Throughput strictly decreases with the security level."""
        r = self.ops_per_sec
        return all(a > b for a, b in zip(r, r[1:]))

    def to_dict(self) -> dict:
        return {"op": self.op_name, "params": list(self.params_order),
                "ops_per_sec": list(self.ops_per_sec), "passed": self.passed}


@dataclass(frozen=True)
class BenchSuite:
    results: tuple[BenchResult, ...]
    verdicts: tuple[OrderingVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"results": [r.to_dict() for r in self.results],
                "verdicts": [v.to_dict() for v in self.verdicts], "passed": self.passed}


def bench_suite(
    param_sets: Sequence[KemParams],
    min_duration: float,
    seed: int = 0,
    warmup: int = DEFAULT_WARMUP,
    repeats: int = DEFAULT_REPEATS,
    batch: int = DEFAULT_BATCH,
) -> BenchSuite:
    """Benchmark each set, ordered by module rank, and check monotone throughput per op."""
    if len(param_sets) < 2:
        raise ValueError("bench_suite needs at least two parameter sets to compare")
    ordered = sorted(param_sets, key=lambda p: (p.k, p.du, p.dv))
    results = [r for p in ordered for r in bench_kem(p, min_duration, seed, warmup, repeats, batch)]
    verdicts = []
    for op in OPS:
        rows = [r for r in results if r.op_name == op]
        verdicts.append(OrderingVerdict(op, tuple(r.params_label for r in rows), tuple(r.ops_per_sec for r in rows)))
    return BenchSuite(tuple(results), tuple(verdicts))


COLUMNS = ("op", "params", "iterations", "seconds", "ops_per_sec")


def to_csv(results: Sequence[BenchResult]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.as_row())
    return buf.getvalue()


def to_json(suite: BenchSuite) -> str:
    return json.dumps(suite.to_dict(), indent=2)
