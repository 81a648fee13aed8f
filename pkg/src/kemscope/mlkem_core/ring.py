"""Arithmetic in R_q = Z_q[X]/(X^256 + 1).

All array functions operate on the last axis (length 256) and broadcast over
any leading axes, so a batch of polynomials is just a 2-D array.  Arrays are
``int64`` holding reduced coefficients in [0, q).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import N, Q

ZETA = 17  # primitive 256-th root of unity mod q


def _bitrev7(i: int) -> int:
    return int(f"{i:07b}"[::-1], 2)


ZETAS = np.array([pow(ZETA, _bitrev7(i), Q) for i in range(128)], dtype=np.int64)
GAMMAS = np.array([pow(ZETA, 2 * _bitrev7(i) + 1, Q) for i in range(128)], dtype=np.int64)
N_INV = pow(128, -1, Q)  # 3303

# (zetas, half-width) per butterfly layer, forward order
_LAYERS = []
_idx = 1
_length = 128
while _length >= 2:
    blocks = N // (2 * _length)
    _LAYERS.append((ZETAS[_idx:_idx + blocks].reshape(blocks, 1), _length))
    _idx += blocks
    _length //= 2
del _idx, _length


class DomainError(RuntimeError):
    """A polynomial was used in the wrong (standard vs NTT) representation."""


def ntt_butterfly(f: np.ndarray) -> np.ndarray:
    """Layer-by-layer Cooley-Tukey NTT; used to build (and check) the matrix form."""
    f = np.asarray(f, dtype=np.int64)
    lead = f.shape[:-1]
    for zetas, length in _LAYERS:
        blocks = zetas.shape[0]
        g = f.reshape(*lead, blocks, 2, length)
        lo, hi = g[..., 0, :], g[..., 1, :]
        t = (zetas * hi) % Q
        f = np.stack(((lo + t) % Q, (lo - t) % Q), axis=-2).reshape(*lead, N)
    return f


def intt_butterfly(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=np.int64)
    lead = f.shape[:-1]
    for zetas, length in reversed(_LAYERS):
        blocks = zetas.shape[0]
        # inverse layer walks the zetas in reverse order
        zetas = zetas[::-1]
        g = f.reshape(*lead, blocks, 2, length)
        lo, hi = g[..., 0, :], g[..., 1, :]
        new_lo = (lo + hi) % Q
        new_hi = (zetas * (hi - lo)) % Q
        f = np.stack((new_lo, new_hi), axis=-2).reshape(*lead, N)
    return (f * N_INV) % Q


# Both transforms are linear over Z_q, so they run as float64 matrix products.
# Exactness: every partial sum must stay below 2^53.  With matrix entries
# below q that holds for inputs up to ~1e10, which also covers the unreduced
# outputs of `ntt_matvec` / `ntt_dot` fed to `intt_halves`.
_NTT_MATRIX = ntt_butterfly(np.eye(N, dtype=np.int64)).astype(np.float64)
_INTT_MATRIX = intt_butterfly(np.eye(N, dtype=np.int64)).astype(np.float64)
_INTT_EVEN = np.ascontiguousarray(_INTT_MATRIX[0::2])
_INTT_ODD = np.ascontiguousarray(_INTT_MATRIX[1::2])


def ntt_array(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f)
    out = f.reshape(-1, N).astype(np.float64) @ _NTT_MATRIX
    return (out.astype(np.int64) % Q).reshape(f.shape)


def intt_array(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f)
    return intt_halves(f[..., 0::2], f[..., 1::2])


def intt_halves(c0: np.ndarray, c1: np.ndarray, reduce: bool = True) -> np.ndarray:
    """Inverse NTT of an NTT-domain value given as (even, odd) halves.

    With ``reduce=False`` the result is congruent mod q but not reduced, so
    callers can fold further additions into a single reduction.
    """
    shape = c0.shape[:-1]
    out = (c0.reshape(-1, N // 2).astype(np.float64) @ _INTT_EVEN
           + c1.reshape(-1, N // 2).astype(np.float64) @ _INTT_ODD).astype(np.int64)
    if reduce:
        out %= Q
    return out.reshape(*shape, N)


def multiply_ntts(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Pointwise product in the NTT domain (128 degree-1 base multiplications)."""
    f = np.asarray(f, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    f0, f1 = f[..., 0::2], f[..., 1::2]
    g0, g1 = g[..., 0::2], g[..., 1::2]
    c0 = (f0 * g0 + (f1 * g1) % Q * GAMMAS) % Q
    c1 = (f0 * g1 + f1 * g0) % Q
    out = np.empty(np.broadcast_shapes(f.shape, g.shape), dtype=np.int64)
    out[..., 0::2] = c0
    out[..., 1::2] = c1
    return out


def split_ntt(a: np.ndarray):
    """Even/odd halves of an NTT-domain array plus the odd half times gamma.

    The three arrays feed `ntt_matvec` and `ntt_dot`, which fold the
    base-case products and the sum over the module index into one pass.
    """
    a = np.asarray(a, dtype=np.int64)
    a1 = np.ascontiguousarray(a[..., 1::2])
    # int32 halves: a k <= 4 sum of 2k products below q^2 stays under 2^31
    return (np.ascontiguousarray(a[..., 0::2], dtype=np.int32), a1.astype(np.int32),
            ((a1 * GAMMAS) % Q).astype(np.int32))


def _halves32(x: np.ndarray):
    x = np.asarray(x)
    return np.ascontiguousarray(x[..., 0::2], dtype=np.int32), np.ascontiguousarray(x[..., 1::2], dtype=np.int32)


def ntt_matvec(parts, x: np.ndarray, transpose: bool = False):
    """sum_j A[i, j] * x[j] (A[j, i] when transposed) for A of shape (..., k, k, 256).

    Returns unreduced (even, odd) halves of the NTT-domain result.
    """
    a0, a1, a1g = parts
    x0, x1 = _halves32(x)
    spec = "...jip,...jp->...ip" if transpose else "...ijp,...jp->...ip"
    c0 = np.einsum(spec, a0, x0) + np.einsum(spec, a1g, x1)
    c1 = np.einsum(spec, a0, x1) + np.einsum(spec, a1, x0)
    return c0, c1


def ntt_dot(f: np.ndarray, x: np.ndarray):
    """sum_j f[j] * x[j] for vectors of shape (..., k, 256); unreduced halves."""
    a0, a1, a1g = split_ntt(f)
    x0, x1 = _halves32(x)
    c0 = np.einsum("...jp,...jp->...p", a0, x0) + np.einsum("...jp,...jp->...p", a1g, x1)
    c1 = np.einsum("...jp,...jp->...p", a0, x1) + np.einsum("...jp,...jp->...p", a1, x0)
    return c0, c1


def join_halves(c0: np.ndarray, c1: np.ndarray) -> np.ndarray:
    out = np.empty((*c0.shape[:-1], N), dtype=np.int64)
    out[..., 0::2] = c0
    out[..., 1::2] = c1
    return out


def schoolbook_multiply(f, g) -> np.ndarray:
    """Negacyclic product by direct convolution; reference for the NTT path."""
    f = [int(x) for x in f]
    g = [int(x) for x in g]
    out = [0] * N
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if i + j < N:
                out[i + j] += a * b
            else:
                out[i + j - N] -= a * b
    return np.array([x % Q for x in out], dtype=np.int64)


def centered(x: np.ndarray | int) -> np.ndarray:
    """Representative in [-(q-1)/2, (q-1)/2]."""
    return (np.asarray(x, dtype=np.int64) + Q // 2) % Q - Q // 2


# compression: integer-only, round half up


def compress(x, d: int):
    """round(2^d * x / q) mod 2^d."""
    if not 1 <= d <= 12:
        raise ValueError(f"bit-width d={d} outside 1..12")
    if isinstance(x, (int, np.integer)):
        return ((int(x) << (d + 1)) + Q) // (2 * Q) % (1 << d)
    x = np.asarray(x, dtype=np.int64)
    return (((x << (d + 1)) + Q) // (2 * Q)) & ((1 << d) - 1)


def decompress(c, d: int):
    """round(q * c / 2^d)."""
    if not 1 <= d <= 12:
        raise ValueError(f"bit-width d={d} outside 1..12")
    if isinstance(c, (int, np.integer)):
        return (Q * int(c) + (1 << (d - 1))) >> d
    c = np.asarray(c, dtype=np.int64)
    return (Q * c + (1 << (d - 1))) >> d


# byte encoding: little-endian bit packing
#
# Eight d-bit values fill exactly d bytes.  Each group of eight is assembled in
# two uint64 words (bits 0..63 and 64..127) and the low d bytes are kept.

_U64 = np.uint64


def byte_encode(f: np.ndarray, d: int) -> np.ndarray:
    """Pack d-bit integers (last axis 256) into 32*d bytes per polynomial."""
    f = np.asarray(f)
    lead = f.shape[:-1]
    g = f.reshape(-1, 8).astype(_U64)
    lo = np.zeros(len(g), dtype=_U64)
    hi = np.zeros(len(g), dtype=_U64)
    for i in range(8):
        off = d * i
        c = g[:, i]
        if off + d <= 64:
            lo |= c << _U64(off)
        elif off >= 64:
            hi |= c << _U64(off - 64)
        else:
            lo |= c << _U64(off)
            hi |= c >> _U64(64 - off)
    words = np.stack((lo, hi), axis=1).astype("<u8").view(np.uint8)
    return np.ascontiguousarray(words[:, :d]).reshape(*lead, f.shape[-1] * d // 8)


def byte_decode(b: np.ndarray, d: int) -> np.ndarray:
    """Inverse of byte_encode; d = 12 values are returned unreduced."""
    b = np.asarray(b, dtype=np.uint8)
    lead = b.shape[:-1]
    rows = b.reshape(-1, d)
    padded = np.zeros((len(rows), 16), dtype=np.uint8)
    padded[:, :d] = rows
    words = padded.view("<u8")
    lo, hi = words[:, 0], words[:, 1]
    mask = _U64((1 << d) - 1)
    out = np.empty((len(rows), 8), dtype=_U64)
    for i in range(8):
        off = d * i
        if off + d <= 64:
            out[:, i] = (lo >> _U64(off)) & mask
        elif off >= 64:
            out[:, i] = (hi >> _U64(off - 64)) & mask
        else:
            out[:, i] = ((lo >> _U64(off)) | (hi << _U64(64 - off))) & mask
    return out.astype(np.int64).reshape(*lead, b.shape[-1] * 8 // d)


@dataclass(frozen=True)
class Polynomial:
    """A ring element with its representation domain made explicit."""

    coeffs: tuple[int, ...]
    in_ntt: bool = False

    def __post_init__(self) -> None:
        if len(self.coeffs) != N:
            raise ValueError(f"polynomial needs {N} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < Q for c in self.coeffs):
            raise ValueError("coefficients must be reduced mod q")

    @classmethod
    def from_array(cls, arr, in_ntt: bool = False) -> "Polynomial":
        return cls(tuple(int(c) for c in np.asarray(arr) % Q), in_ntt)

    @classmethod
    def zero(cls, in_ntt: bool = False) -> "Polynomial":
        return cls((0,) * N, in_ntt)

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def _same_domain(self, other: "Polynomial") -> None:
        if self.in_ntt != other.in_ntt:
            raise DomainError("cannot mix standard and NTT representations")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._same_domain(other)
        return Polynomial.from_array(self.array() + other.array(), self.in_ntt)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._same_domain(other)
        return Polynomial.from_array(self.array() - other.array(), self.in_ntt)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._same_domain(other)
        if self.in_ntt:
            return Polynomial.from_array(multiply_ntts(self.array(), other.array()), True)
        return Polynomial.from_array(schoolbook_multiply(self.coeffs, other.coeffs))


def ntt(p: Polynomial) -> Polynomial:
    if p.in_ntt:
        raise DomainError("polynomial is already in the NTT domain")
    return Polynomial.from_array(ntt_array(p.array()), in_ntt=True)


def intt(p: Polynomial) -> Polynomial:
    if not p.in_ntt:
        raise DomainError("polynomial is not in the NTT domain")
    return Polynomial.from_array(intt_array(p.array()), in_ntt=False)
