from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kemscope.mlkem_core import ring
from kemscope.mlkem_core.params import N, Q
from kemscope.mlkem_core.ring import DomainError, Polynomial

polys = arrays(np.int64, N, elements=st.integers(0, Q - 1))


def test_zeta_is_primitive_512th_root():
    assert pow(17, 128, Q) == Q - 1
    assert pow(17, 256, Q) == 1


def test_n_inv():
    assert (ring.N_INV * 128) % Q == 1


@given(polys)
def test_matrix_ntt_matches_butterflies(f):
    assert np.array_equal(ring.ntt_array(f), ring.ntt_butterfly(f) % Q)


@given(polys)
def test_intt_inverts_ntt(f):
    assert np.array_equal(ring.intt_array(ring.ntt_array(f)), f)


def test_ntt_batches_like_rows():
    rng = np.random.default_rng(0)
    f = rng.integers(0, Q, size=(3, 2, N))
    out = ring.ntt_array(f)
    assert out.shape == f.shape
    assert np.array_equal(out[1, 0], ring.ntt_array(f[1, 0]))


@given(polys, polys)
def test_ntt_product_matches_schoolbook(f, g):
    via_ntt = ring.intt_array(ring.multiply_ntts(ring.ntt_array(f), ring.ntt_array(g)))
    assert np.array_equal(via_ntt, ring.schoolbook_multiply(f, g))


def test_schoolbook_wraps_negacyclically():
    x = np.zeros(N, dtype=np.int64)
    x[1] = 1
    x_last = np.zeros(N, dtype=np.int64)
    x_last[N - 1] = 1
    prod = ring.schoolbook_multiply(x, x_last)  # X * X^255 = X^256 = -1
    assert prod[0] == Q - 1 and prod[1:].sum() == 0


def test_matvec_matches_loop():
    rng = np.random.default_rng(1)
    k = 3
    a = rng.integers(0, Q, size=(k, k, N))
    x = rng.integers(0, Q, size=(k, N))
    expect = np.stack([sum(ring.multiply_ntts(a[i, j], x[j]) for j in range(k)) % Q for i in range(k)])
    got = ring.join_halves(*ring.ntt_matvec(ring.split_ntt(a[None]), x[None])) % Q
    assert np.array_equal(got[0], expect)
    expect_t = np.stack([sum(ring.multiply_ntts(a[j, i], x[j]) for j in range(k)) % Q for i in range(k)])
    got_t = ring.join_halves(*ring.ntt_matvec(ring.split_ntt(a[None]), x[None], transpose=True)) % Q
    assert np.array_equal(got_t[0], expect_t)


def test_polynomial_domains():
    p = Polynomial.from_array(np.arange(N))
    with pytest.raises(DomainError):
        ring.intt(p)
    p_hat = ring.ntt(p)
    with pytest.raises(DomainError):
        ring.ntt(p_hat)
    with pytest.raises(DomainError):
        _ = p + p_hat
    assert ring.intt(p_hat) == p


def test_polynomial_validation():
    with pytest.raises(ValueError):
        Polynomial((0,) * 10)
    with pytest.raises(ValueError):
        Polynomial((Q,) + (0,) * (N - 1))


def test_polynomial_product_both_domains():
    rng = np.random.default_rng(2)
    a = Polynomial.from_array(rng.integers(0, Q, N))
    b = Polynomial.from_array(rng.integers(0, Q, N))
    assert ring.intt(ring.ntt(a) * ring.ntt(b)) == a * b
    assert (a - b) + b == a


# compression


def _bound(d: int) -> int:
    # round-half-up of q / 2^(d+1), computed exactly
    return int(Fraction(Q, 2 ** (d + 1)) + Fraction(1, 2))


@pytest.mark.parametrize("d", range(1, 13))
def test_compression_error_bound_exhaustive(d):
    x = np.arange(Q)
    err = np.abs(ring.centered(ring.decompress(ring.compress(x, d), d) - x))
    assert err.max() <= _bound(d)


@pytest.mark.parametrize("d", range(1, 13))
def test_compress_matches_rational_rounding(d):
    for x in range(0, Q, 37):
        assert ring.compress(x, d) == int(Fraction(2**d * x, Q) + Fraction(1, 2)) % 2**d
    for c in range(0, 2**d, max(1, 2**d // 50)):
        assert ring.decompress(c, d) == int(Fraction(Q * c, 2**d) + Fraction(1, 2))


def test_compress_scalar_and_array_agree():
    x = np.arange(Q)
    for d in (1, 4, 10, 11):
        arr = ring.compress(x, d)
        assert all(arr[i] == ring.compress(int(i), d) for i in range(0, Q, 101))


def test_d12_is_lossless():
    x = np.arange(Q)
    assert np.array_equal(ring.decompress(ring.compress(x, 12), 12), x)


@pytest.mark.parametrize("d", [0, 13, -1])
def test_compress_rejects_width(d):
    with pytest.raises(ValueError):
        ring.compress(5, d)
    with pytest.raises(ValueError):
        ring.decompress(5, d)


@pytest.mark.parametrize("d", range(1, 13))
def test_byte_encode_roundtrip(d):
    rng = np.random.default_rng(d)
    f = rng.integers(0, 2**d, size=(2, N))
    b = ring.byte_encode(f, d)
    assert b.shape == (2, 32 * d)
    assert np.array_equal(ring.byte_decode(b, d), f)


def test_byte_encode_bit_order():
    f = np.zeros(N, dtype=np.int64)
    f[0], f[1] = 1, 2  # d = 4: first byte holds f0 in the low nibble
    assert ring.byte_encode(f, 4)[0] == 0x21
