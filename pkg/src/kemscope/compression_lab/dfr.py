"""Monte-Carlo decryption-failure-rate estimation."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..mlkem_core import kem
from ..mlkem_core.params import KemParams
from .quantizers import QuantizerSpec

Z95 = 1.959963984540054
DEFAULT_BATCH = 128


@dataclass(frozen=True)
class DfrEstimate:
    trials: int
    failures: int
    params: KemParams
    quantizer: QuantizerSpec
    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.failures <= self.trials:
            raise ValueError("failures must lie in 0..trials")

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def ci95(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    def to_dict(self) -> dict:
        low, high = self.ci95
        return {
            "params": self.params.name,
            "quantizer": self.quantizer.kind.value,
            "du": self.quantizer.du,
            "dv": self.quantizer.dv,
            "trials": self.trials,
            "failures": self.failures,
            "rate": self.rate,
            "ci95_low": low,
            "ci95_high": high,
            "seed": self.seed,
        }


def wilson_interval(failures: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Two-sided Wilson score interval; zero failures give (0, 3/trials)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if failures == 0:
        return 0.0, min(1.0, 3.0 / trials)
    p = failures / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    high = 1.0 if failures == trials else min(1.0, centre + half)
    return max(0.0, centre - half), high


def intervals_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def failure_mask(
    params: KemParams,
    quantizer: QuantizerSpec,
    start: int,
    count: int,
    seed: int,
    batch: int = DEFAULT_BATCH,
) -> np.ndarray:
    """Per-trial failure flags for trials start..start+count-1."""
    effective = quantizer.apply_to(params)
    codecs = quantizer.codecs()
    out = []
    done = 0
    while done < count:
        n = min(batch, count - done)
        out.append(kem.round_trip_batch(effective, seed, start + done, n, codecs))
        done += n
    return np.concatenate(out) if out else np.zeros(0, dtype=bool)


def _count(args) -> int:
    return int(failure_mask(*args).sum())


def estimate_dfr(
    params: KemParams,
    quantizer: QuantizerSpec,
    trials: int,
    seed: int,
    workers: int = 1,
    batch: int = DEFAULT_BATCH,
) -> DfrEstimate:
    """Count shared-secret mismatches over ``trials`` keygen/encaps/decaps cycles.

    The quantizer replaces the ciphertext compression step and its (du, dv)
    override the widths in ``params``; the estimate keeps the unmodified
    ``params`` next to the quantizer.  Trial i is seeded from (seed, i)
    alone, so the count does not depend on ``workers`` or ``batch``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    quantizer.apply_to(params)  # rejects invalid combinations before any work
    if workers <= 1:
        failures = int(failure_mask(params, quantizer, 0, trials, seed, batch).sum())
    else:
        step = math.ceil(trials / workers)
        jobs = [(params, quantizer, s, min(step, trials - s), seed, batch) for s in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            failures = sum(pool.map(_count, jobs))
    return DfrEstimate(trials, failures, params, quantizer, seed)
