"""Lloyd-Max codebook training on harvested ciphertext coefficients."""

from __future__ import annotations

import logging
from typing import Callable, Iterable

import numpy as np

from ..mlkem_core import kem
from ..mlkem_core.params import KemParams, Q
from ..mlkem_core.ring import centered
from .quantizers import Codebook, QuantizerError

log = logging.getLogger(__name__)

REL_TOL = 1e-6


def harvest_coefficients(
    params: KemParams,
    trials: int,
    seed: int,
    component: str = "u",
    start: int = 0,
    batch: int = 256,
) -> np.ndarray:
    """Pre-compression u or v coefficients from real encapsulations.

    Trial i uses keys and randomness derived from (seed, start + i), so
    disjoint index ranges give independent training and held-out sets.
    """
    if component not in ("u", "v"):
        raise QuantizerError(f"component must be 'u' or 'v', got {component!r}")
    chunks: list[np.ndarray] = []

    def grab(u, v):
        chunks.append((u if component == "u" else v).reshape(-1).copy())

    done = 0
    while done < trials:
        n = min(batch, trials - done)
        material = kem.derive_seeds(seed, start + done, n, 96)
        ek, _, internals = kem.keygen_batch(params, [m[:64] for m in material], return_internals=True)
        kem.encaps_batch(params, ek, [m[64:] for m in material], internals=internals, check=False, harvest=grab)
        done += n
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)


def _assign(samples: np.ndarray, levels: np.ndarray):
    """(index, signed offset sample - level) for the nearest level of each sample."""
    hi = np.searchsorted(levels, samples) % len(levels)
    lo = (hi - 1) % len(levels)
    off_hi = centered(samples - levels[hi])
    off_lo = centered(samples - levels[lo])
    pick_hi = np.abs(off_hi) < np.abs(off_lo)
    return np.where(pick_hi, hi, lo), np.where(pick_hi, off_hi, off_lo)


def codebook_mse(samples: np.ndarray, levels: np.ndarray) -> float:
    _, off = _assign(np.asarray(samples, dtype=np.int64), np.asarray(levels, dtype=np.int64))
    return float(np.mean(off.astype(np.float64) ** 2))


def _step(samples: np.ndarray, levels: np.ndarray) -> np.ndarray:
    idx, off = _assign(samples, levels)
    counts = np.bincount(idx, minlength=len(levels))
    sums = np.bincount(idx, weights=off.astype(np.float64), minlength=len(levels))
    shift = np.zeros(len(levels))
    nonempty = counts > 0
    shift[nonempty] = sums[nonempty] / counts[nonempty]
    # nearest integer to the conditional mean minimises the cell's squared error
    new = (levels + np.floor(shift + 0.5).astype(np.int64)) % Q
    new_sorted = np.sort(new)
    if len(np.unique(new_sorted)) == len(levels) and nonempty.all():
        return new_sorted
    return _reseed(samples, new, nonempty)


def _reseed(samples: np.ndarray, levels: np.ndarray, nonempty: np.ndarray) -> np.ndarray:
    """Drop empty and duplicate levels, then place them on the worst-served samples."""
    keep = np.unique(levels[nonempty])
    missing = len(levels) - len(keep)
    _, off = _assign(samples, keep)
    used = set(keep.tolist())
    extra: list[int] = []
    for i in np.argsort(-np.abs(off), kind="stable"):
        if len(extra) == missing:
            break
        x = int(samples[i])
        if x not in used:
            used.add(x)
            extra.append(x)
    # fewer distinct samples than levels: fill with unused values
    fill = (v for v in range(Q) if v not in used)
    while len(extra) < missing:
        extra.append(next(fill))
    return np.sort(np.concatenate((keep, np.asarray(extra, dtype=np.int64))))


def train_lloyd_max(
    d: int,
    sample_source: np.ndarray | Iterable[int] | Callable[[], np.ndarray],
    iterations: int = 50,
    seed: int = 0,
    init: str = "uniform",
) -> Codebook:
    """Alternate nearest-level assignment and integer centroid updates.

    Distance is centered mod q.  Starts from the standard uniform codebook
    (``init="uniform"``) or from 2^d distinct samples drawn with ``seed``
    (``init="random"``).  Stops after ``iterations`` rounds or when the
    relative MSE change drops below 1e-6.  A step that would raise the
    training MSE is not taken, so the returned ``mse_trace`` never increases.
    """
    if iterations < 1:
        raise QuantizerError("iterations must be >= 1")
    if not 1 <= d <= 12:
        raise QuantizerError(f"d={d} outside 1..12")
    if (1 << d) > Q:
        raise QuantizerError(f"2^{d} integer levels do not fit in Z_q; d=12 is lossless, use uniform")
    if callable(sample_source):
        sample_source = sample_source()
    samples = np.asarray(list(sample_source) if not isinstance(sample_source, np.ndarray) else sample_source,
                         dtype=np.int64).ravel() % Q
    if samples.size == 0:
        raise QuantizerError("no training samples")

    size = 1 << d
    if init == "uniform":
        levels = Codebook.uniform(d).level_array
    elif init == "random":
        rng = np.random.default_rng(seed)
        distinct = np.unique(samples)
        if len(distinct) >= size:
            levels = np.sort(rng.choice(distinct, size, replace=False))
        else:
            levels = _reseed(samples, np.resize(distinct, size), np.arange(size) < len(distinct))
    else:
        raise QuantizerError(f"unknown init {init!r}")

    mse = codebook_mse(samples, levels)
    trace = [mse]
    for it in range(iterations):
        candidate = _step(samples, levels)
        new_mse = codebook_mse(samples, candidate)
        if new_mse > mse:
            log.debug("iteration %d: step would raise MSE %.4f -> %.4f, stopping", it, mse, new_mse)
            break
        change = (mse - new_mse) / mse if mse > 0 else 0.0
        levels, mse = candidate, new_mse
        trace.append(mse)
        if change < REL_TOL:
            break
    return Codebook(tuple(int(x) for x in levels), tuple(trace))
