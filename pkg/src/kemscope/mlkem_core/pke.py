"""K-PKE, the CPA-secure encryption scheme underneath ML-KEM.

Batch-first: every function takes arrays with a leading batch axis.  Byte
strings travel as ``uint8`` arrays of shape (batch, length).

The ciphertext compression step goes through a *codec* (``bits``,
``quantize``, ``dequantize``) so alternative quantizers can be substituted
for the standard uniform one without touching the rest of the scheme.
"""

from __future__ import annotations

import hashlib
from typing import Callable, Protocol, Sequence

import numpy as np

from .params import KemParams, N, Q
from .ring import (
    byte_decode, byte_encode, compress, decompress, intt_halves, join_halves, ntt_array, ntt_dot, ntt_matvec,
    split_ntt,
)
from .sampling import expand_matrix, prf_noise


class Codec(Protocol):
    bits: int

    def quantize(self, coeffs: np.ndarray) -> np.ndarray: ...

    def dequantize(self, indices: np.ndarray) -> np.ndarray: ...


class UniformCodec:
    """Standard Compress_d / Decompress_d."""

    def __init__(self, bits: int):
        if not 1 <= bits <= 12:
            raise ValueError(f"bit-width {bits} outside 1..12")
        self.bits = bits

    def quantize(self, coeffs: np.ndarray) -> np.ndarray:
        return compress(coeffs, self.bits)

    def dequantize(self, indices: np.ndarray) -> np.ndarray:
        return decompress(indices, self.bits)

    def __repr__(self) -> str:
        return f"UniformCodec({self.bits})"


def as_rows(items, length: int, what: str) -> np.ndarray:
    """Stack byte strings (or pass through a uint8 array) as (batch, length)."""
    if isinstance(items, np.ndarray):
        arr = items.astype(np.uint8, copy=False)
        if arr.ndim != 2 or arr.shape[1] != length:
            raise ValueError(f"{what}: expected rows of {length} bytes, got shape {arr.shape}")
        return arr
    items = list(items)
    for i, item in enumerate(items):
        if len(item) != length:
            raise ValueError(f"{what}[{i}]: expected {length} bytes, got {len(item)}")
    return np.frombuffer(b"".join(bytes(x) for x in items), dtype=np.uint8).reshape(len(items), length)


def _codecs(params: KemParams, u_codec, v_codec):
    u_codec = u_codec or UniformCodec(params.du)
    v_codec = v_codec or UniformCodec(params.dv)
    if u_codec.bits != params.du or v_codec.bits != params.dv:
        raise ValueError(
            f"codec widths ({u_codec.bits},{v_codec.bits}) do not match params ({params.du},{params.dv})"
        )
    return u_codec, v_codec


def keygen(params: KemParams, ds: Sequence[bytes]):
    """Returns (ek rows, dk_pke rows, A_hat in `split_ntt` form, t_hat)."""
    k = params.k
    rhos, sigmas = [], []
    for d in ds:
        g = hashlib.sha3_512(bytes(d) + bytes((k,))).digest()
        rhos.append(g[:32])
        sigmas.append(g[32:])
    a_hat = expand_matrix(rhos, k)
    s = prf_noise(sigmas, params.eta1, 0, k)
    e = prf_noise(sigmas, params.eta1, k, k)
    s_hat = ntt_array(s)
    e_hat = ntt_array(e)
    a_hat = split_ntt(a_hat)
    t_hat = (join_halves(*ntt_matvec(a_hat, s_hat)) + e_hat) % Q
    batch = len(rhos)
    rho_rows = np.frombuffer(b"".join(rhos), dtype=np.uint8).reshape(batch, 32)
    ek = np.concatenate((byte_encode(t_hat, 12).reshape(batch, -1), rho_rows), axis=1)
    dk = byte_encode(s_hat, 12).reshape(batch, -1)
    return ek, dk, a_hat, t_hat


def decode_ek(params: KemParams, ek: np.ndarray):
    """Split encapsulation keys into (t_hat, rho list, modulus-check mask)."""
    k = params.k
    raw = byte_decode(ek[:, : 384 * k].reshape(len(ek), k, 384), 12)
    reduced = np.all(raw < Q, axis=(1, 2))
    rhos = [row.tobytes() for row in ek[:, 384 * k:]]
    return raw % Q, rhos, reduced


def encrypt(
    params: KemParams,
    ek: np.ndarray,
    msgs: np.ndarray,
    rs: Sequence[bytes],
    a_hat: np.ndarray | None = None,
    u_codec: Codec | None = None,
    v_codec: Codec | None = None,
    harvest: Callable[[np.ndarray, np.ndarray], None] | None = None,
    t_hat: np.ndarray | None = None,
) -> np.ndarray:
    """Encrypt 32-byte messages; returns ciphertext rows.

    ``a_hat`` (in `split_ntt` form) and ``t_hat`` may be passed when the
    caller already holds them for these keys.
    ``harvest``, if given, receives the pre-compression u (batch, k, 256) and
    v (batch, 256) coefficient arrays.
    """
    k = params.k
    u_codec, v_codec = _codecs(params, u_codec, v_codec)
    if t_hat is None or a_hat is None:
        t_hat, rhos, _ = decode_ek(params, ek)
        if a_hat is None:
            a_hat = split_ntt(expand_matrix(rhos, k))
    y = prf_noise(rs, params.eta1, 0, k)
    e1 = prf_noise(rs, params.eta2, k, k)
    e2 = prf_noise(rs, params.eta2, 2 * k, 1)[:, 0]
    y_hat = ntt_array(y)
    u = (intt_halves(*ntt_matvec(a_hat, y_hat, transpose=True), reduce=False) + e1) % Q
    mu = decompress(byte_decode(msgs, 1), 1)
    v = (intt_halves(*ntt_dot(t_hat, y_hat), reduce=False) + e2 + mu) % Q
    if harvest is not None:
        harvest(u, v)
    batch = len(ek)
    c1 = byte_encode(u_codec.quantize(u), u_codec.bits).reshape(batch, -1)
    c2 = byte_encode(v_codec.quantize(v), v_codec.bits)
    return np.concatenate((c1, c2), axis=1)


def decrypt(
    params: KemParams,
    dk_pke: np.ndarray,
    ct: np.ndarray,
    u_codec: Codec | None = None,
    v_codec: Codec | None = None,
) -> np.ndarray:
    k = params.k
    u_codec, v_codec = _codecs(params, u_codec, v_codec)
    batch = len(ct)
    split = 32 * params.du * k
    u = u_codec.dequantize(byte_decode(ct[:, :split].reshape(batch, k, 32 * params.du), params.du))
    v = v_codec.dequantize(byte_decode(ct[:, split:], params.dv))
    s_hat = byte_decode(dk_pke.reshape(batch, k, 384), 12) % Q
    w = (v - intt_halves(*ntt_dot(s_hat, ntt_array(u)), reduce=False)) % Q
    return byte_encode(compress(w, 1), 1)


__all__ = ["Codec", "UniformCodec", "keygen", "encrypt", "decrypt", "decode_ek", "as_rows", "N"]
