"""Hash-based samplers: uniform NTT-domain matrix entries and CBD noise."""

from __future__ import annotations

import hashlib
from functools import lru_cache
from typing import Sequence

import numpy as np

from .params import N, Q
from .ring import Polynomial, byte_decode

# 4 SHAKE128 blocks: 448 candidates for 256 slots; shortfall is ~13 sigma out
_XOF_BYTES = 672


def _candidates(buf: np.ndarray) -> np.ndarray:
    b = buf.reshape(*buf.shape[:-1], -1, 3).astype(np.uint16)
    out = np.empty((*b.shape[:-1], 2), dtype=np.uint16)
    out[..., 0] = b[..., 0] | ((b[..., 1] & 15) << 8)
    out[..., 1] = (b[..., 1] >> 4) | (b[..., 2] << 4)
    return out.reshape(*buf.shape[:-1], -1)


def _sample_ntt_slow(seed: bytes) -> np.ndarray:
    length = _XOF_BYTES
    while True:
        length *= 2
        cand = _candidates(np.frombuffer(hashlib.shake_128(seed).digest(length), dtype=np.uint8))
        cand = cand[cand < Q]
        if cand.size >= N:
            return cand[:N].astype(np.int64)


def sample_ntt_many(seeds: Sequence[bytes]) -> np.ndarray:
    """Rejection-sample one NTT-domain polynomial per 34-byte XOF seed."""
    buf = np.frombuffer(
        b"".join(hashlib.shake_128(s).digest(_XOF_BYTES) for s in seeds), dtype=np.uint8
    ).reshape(len(seeds), _XOF_BYTES)
    cand = _candidates(buf)
    valid = cand < Q
    counts = valid.sum(axis=1)
    accepted = cand[valid]  # row-major, so each row's survivors stay in order
    starts = np.cumsum(counts) - counts
    short = np.nonzero(counts < N)[0]
    if short.size:
        # keep the gather in bounds; these rows are redone below
        accepted = np.concatenate((accepted, np.zeros(N, dtype=accepted.dtype)))
    out = accepted[starts[:, None] + np.arange(N)].astype(np.int64)
    for r in short:
        out[r] = _sample_ntt_slow(seeds[r])
    return out


def expand_matrix(rhos: Sequence[bytes], k: int) -> np.ndarray:
    """A_hat[b, i, j] = SampleNTT(rho_b || j || i); shape (batch, k, k, 256)."""
    seeds = [rho + bytes((j, i)) for rho in rhos for i in range(k) for j in range(k)]
    return sample_ntt_many(seeds).reshape(len(rhos), k, k, N)


def sample_ntt(seed: bytes) -> Polynomial:
    if len(seed) != 34:
        raise ValueError("SampleNTT seed must be 34 bytes")
    return Polynomial.from_array(sample_ntt_many([seed])[0], in_ntt=True)


@lru_cache(maxsize=None)
def _cbd_table(eta: int) -> np.ndarray:
    """Maps a 2*eta-bit chunk to popcount(low eta bits) - popcount(high eta bits) mod q."""
    mask = (1 << eta) - 1
    return np.array(
        [(bin(v & mask).count("1") - bin(v >> eta).count("1")) % Q for v in range(1 << (2 * eta))],
        dtype=np.int64,
    )


@lru_cache(maxsize=None)
def _cbd_byte_table(eta: int) -> np.ndarray:
    """eta=2 only: one byte holds two 4-bit chunks."""
    table = _cbd_table(eta)
    return np.stack((table[np.arange(256) & 15], table[np.arange(256) >> 4]), axis=1)


def cbd_array(streams: np.ndarray, eta: int) -> np.ndarray:
    """Centered binomial sample from rows of 64*eta bytes; result reduced mod q.

    Coefficient i consumes bits 2*eta*i .. 2*eta*i + 2*eta - 1 of the
    little-endian bit stream.
    """
    streams = np.asarray(streams, dtype=np.uint8)
    lead = streams.shape[:-1]
    if eta == 2:
        return _cbd_byte_table(2)[streams].reshape(*lead, N)
    if eta == 3:
        b = streams.reshape(*lead, 64, 3).astype(np.uint32)
        word = b[..., 0] | (b[..., 1] << 8) | (b[..., 2] << 16)
        chunks = (word[..., None] >> np.arange(0, 24, 6, dtype=np.uint32)) & 63
        return _cbd_table(3)[chunks].reshape(*lead, N)
    return _cbd_table(eta)[byte_decode(streams, 2 * eta)]


def sample_cbd(byte_stream: bytes, eta: int) -> Polynomial:
    if len(byte_stream) < 64 * eta:
        raise ValueError(f"CBD with eta={eta} needs {64 * eta} bytes, got {len(byte_stream)}")
    row = np.frombuffer(bytes(byte_stream[:64 * eta]), dtype=np.uint8)
    return Polynomial.from_array(cbd_array(row, eta))


def prf_noise(seeds: Sequence[bytes], eta: int, first: int, count: int) -> np.ndarray:
    """CBD_eta(PRF_eta(seed, first + i)) for i < count; shape (batch, count, 256)."""
    size = 64 * eta
    buf = b"".join(
        hashlib.shake_256(s + bytes((first + i,))).digest(size) for s in seeds for i in range(count)
    )
    streams = np.frombuffer(buf, dtype=np.uint8).reshape(len(seeds), count, size)
    return cbd_array(streams, eta)
