"""ML-KEM key generation, encapsulation and decapsulation.

The scalar functions (`keygen`, `encaps`, `decaps`) work on byte strings.
The ``*_batch`` variants take and return ``uint8`` row arrays and are what
the Monte-Carlo and round-trip suites use; the scalar API is a batch of one.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import pke
from .params import InputValidationError, KemParams
from .pke import Codec, as_rows


@dataclass(frozen=True)
class KeyPair:
    encaps_key: bytes
    decaps_key: bytes


@dataclass(frozen=True)
class Ciphertext:
    data: bytes

    def __bytes__(self) -> bytes:
        return self.data

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class SharedSecret:
    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != 32:
            raise ValueError("shared secret is always 32 bytes")

    def __bytes__(self) -> bytes:
        return self.data

    def hex(self) -> str:
        return self.data.hex()


def _h(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


def _g(data: bytes) -> tuple[bytes, bytes]:
    out = hashlib.sha3_512(data).digest()
    return out[:32], out[32:]


def _j(data: bytes) -> bytes:
    return hashlib.shake_256(data).digest(32)


def _rows(blobs: Sequence[bytes], width: int) -> np.ndarray:
    return np.frombuffer(b"".join(blobs), dtype=np.uint8).reshape(len(blobs), width)


# -- batch API ---------------------------------------------------------------


def keygen_batch(params: KemParams, seeds, return_internals: bool = False):
    """Keys for each 64-byte seed (d || z); returns (ek rows, dk rows).

    With ``return_internals`` a third item holds the expanded matrix and
    t_hat so round trips can skip re-deriving them.
    """
    seeds = as_rows(seeds, 64, "seed")
    ds = [row[:32].tobytes() for row in seeds]
    ek, dk_pke, a_hat, t_hat = pke.keygen(params, ds)
    h = _rows([_h(row.tobytes()) for row in ek], 32)
    dk = np.concatenate((dk_pke, ek, h, seeds[:, 32:]), axis=1)
    if return_internals:
        return ek, dk, (a_hat, t_hat)
    return ek, dk


def encaps_batch(
    params: KemParams,
    eks,
    seeds,
    codecs: tuple[Codec, Codec] | None = None,
    internals=None,
    check: bool = True,
    harvest=None,
):
    """Encapsulate under each key with 32-byte randomness; returns (ct rows, ss rows)."""
    ek = as_rows(eks, params.ek_bytes, "encaps_key")
    ms = as_rows(seeds, 32, "seed")
    if check:
        _, _, reduced = pke.decode_ek(params, ek)
        if not reduced.all():
            bad = int(np.nonzero(~reduced)[0][0])
            raise InputValidationError(f"encaps_key[{bad}] holds unreduced coefficients")
    keys, rs = [], []
    for m, e in zip(ms, ek):
        key, r = _g(m.tobytes() + _h(e.tobytes()))
        keys.append(key)
        rs.append(r)
    u_codec, v_codec = codecs or (None, None)
    a_hat, t_hat = internals or (None, None)
    ct = pke.encrypt(params, ek, ms, rs, a_hat, u_codec, v_codec, harvest, t_hat)
    return ct, _rows(keys, 32)


def decaps_batch(
    params: KemParams,
    dks,
    cts,
    codecs: tuple[Codec, Codec] | None = None,
    internals=None,
) -> np.ndarray:
    """Shared-secret rows; failed re-encryption selects J(z || c) without branching."""
    k = params.k
    dk = as_rows(dks, params.dk_bytes, "decaps_key")
    ct = as_rows(cts, params.ct_bytes, "ciphertext")
    dk_pke = dk[:, : 384 * k]
    ek = dk[:, 384 * k: 768 * k + 32]
    h = dk[:, 768 * k + 32: 768 * k + 64]
    z = dk[:, 768 * k + 64:]
    u_codec, v_codec = codecs or (None, None)
    m_prime = pke.decrypt(params, dk_pke, ct, u_codec, v_codec)
    keys, rs, rejects = [], [], []
    for m, hh, zz, c in zip(m_prime, h, z, ct):
        key, r = _g(m.tobytes() + hh.tobytes())
        keys.append(key)
        rs.append(r)
        rejects.append(_j(zz.tobytes() + c.tobytes()))
    a_hat, t_hat = internals or (None, None)
    ct_prime = pke.encrypt(params, ek, m_prime, rs, a_hat, u_codec, v_codec, t_hat=t_hat)
    same = np.all(ct_prime == ct, axis=1)
    return np.where(same[:, None], _rows(keys, 32), _rows(rejects, 32))


def derive_seeds(master_seed: int, start: int, count: int, width: int) -> list[bytes]:
    """Per-trial randomness that depends only on (master seed, trial index)."""
    prefix = master_seed.to_bytes(16, "little", signed=False)
    return [
        hashlib.shake_256(prefix + (start + i).to_bytes(8, "little")).digest(width)
        for i in range(count)
    ]


def round_trip_batch(
    params: KemParams,
    master_seed: int,
    start: int,
    count: int,
    codecs: tuple[Codec, Codec] | None = None,
) -> np.ndarray:
    """Run trials start..start+count-1; True where decaps disagreed with encaps."""
    material = derive_seeds(master_seed, start, count, 96)
    ek, dk, internals = keygen_batch(params, [m[:64] for m in material], return_internals=True)
    ct, ss = encaps_batch(params, ek, [m[64:] for m in material], codecs, internals, check=False)
    ss2 = decaps_batch(params, dk, ct, codecs, internals)
    return np.any(ss != ss2, axis=1)


# -- scalar API ----------------------------------------------------------------


def keygen(params: KemParams, seed: bytes) -> KeyPair:
    if len(seed) != 64:
        raise InputValidationError(f"keygen seed must be 64 bytes, got {len(seed)}")
    ek, dk = keygen_batch(params, [seed])
    return KeyPair(ek[0].tobytes(), dk[0].tobytes())


def encaps(
    params: KemParams,
    encaps_key: bytes,
    seed: bytes,
    codecs: tuple[Codec, Codec] | None = None,
) -> tuple[Ciphertext, SharedSecret]:
    if len(encaps_key) != params.ek_bytes:
        raise InputValidationError(
            f"encaps_key must be {params.ek_bytes} bytes for {params.name}, got {len(encaps_key)}"
        )
    if len(seed) != 32:
        raise InputValidationError(f"encaps seed must be 32 bytes, got {len(seed)}")
    ct, ss = encaps_batch(params, [encaps_key], [seed], codecs)
    return Ciphertext(ct[0].tobytes()), SharedSecret(ss[0].tobytes())


def decaps(
    params: KemParams,
    decaps_key: bytes,
    ct: Ciphertext | bytes,
    codecs: tuple[Codec, Codec] | None = None,
) -> SharedSecret:
    data = bytes(ct)
    if len(decaps_key) != params.dk_bytes:
        raise InputValidationError(
            f"decaps_key must be {params.dk_bytes} bytes for {params.name}, got {len(decaps_key)}"
        )
    if len(data) != params.ct_bytes:
        raise InputValidationError(
            f"ciphertext must be {params.ct_bytes} bytes for {params.name}, got {len(data)}"
        )
    ss = decaps_batch(params, [decaps_key], [data], codecs)
    return SharedSecret(ss[0].tobytes())


def check_decaps_key(params: KemParams, decaps_key: bytes) -> bool:
    """Hash check on the embedded encapsulation key (not run by `decaps`)."""
    k = params.k
    if len(decaps_key) != params.dk_bytes:
        return False
    return _h(decaps_key[384 * k: 768 * k + 32]) == decaps_key[768 * k + 32: 768 * k + 64]
