import numpy as np
import pytest

from kemscope.compression_lab import (
    QuantizerError,
    codebook_mse,
    harvest_coefficients,
    train_lloyd_max,
    uniform_mse_exact,
)
from kemscope.mlkem_core import ML_KEM_512, Q


def test_perfect_codebook_recovered():
    values = np.array([100, 900, 1500, 2222])
    samples = np.repeat(values, 50)
    for init in ("uniform", "random"):
        book = train_lloyd_max(2, samples, iterations=50, seed=3, init=init)
        assert book.levels == tuple(values)
        assert book.mse_trace[-1] == 0


@pytest.mark.parametrize("d,init", [(3, "uniform"), (5, "uniform"), (8, "uniform"), (3, "random")])
def test_uniform_source_near_uniform_quantizer(d, init):
    samples = np.arange(Q)
    book = train_lloyd_max(d, samples, iterations=50, seed=0, init=init)
    exact = uniform_mse_exact(d)
    assert abs(book.mse_trace[-1] - exact) <= 0.05 * exact


@pytest.mark.parametrize("init", ["uniform", "random"])
def test_trace_non_increasing(init):
    rng = np.random.default_rng(4)
    samples = np.concatenate([rng.normal(400, 60, 3000), rng.normal(2500, 200, 3000)]).astype(np.int64) % Q
    book = train_lloyd_max(4, samples, iterations=40, seed=1, init=init)
    trace = book.mse_trace
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] == pytest.approx(codebook_mse(samples, book.level_array))


def test_trained_beats_uniform_on_skewed_source():
    rng = np.random.default_rng(5)
    samples = rng.normal(1000, 80, 20000).astype(np.int64) % Q
    book = train_lloyd_max(3, samples, iterations=50, seed=0)
    uniform_levels = train_lloyd_max(3, samples, iterations=1, seed=0).mse_trace[0]
    assert book.mse_trace[-1] < uniform_levels / 10


def test_fewer_distinct_samples_than_levels():
    book = train_lloyd_max(3, np.array([5, 5, 9]), iterations=5, init="random")
    assert len(book.levels) == 8
    assert book.mse_trace[-1] == 0


@pytest.mark.parametrize("kwargs", [
    dict(d=4, sample_source=np.array([], dtype=np.int64)),
    dict(d=0, sample_source=np.arange(10)),
    dict(d=13, sample_source=np.arange(10)),
    dict(d=12, sample_source=np.arange(10)),
    dict(d=4, sample_source=np.arange(10), iterations=0),
    dict(d=4, sample_source=np.arange(10), init="bogus"),
])
def test_training_errors(kwargs):
    with pytest.raises(QuantizerError):
        train_lloyd_max(**kwargs)


def test_callable_and_iterable_sources():
    a = train_lloyd_max(2, lambda: np.arange(0, Q, 3))
    b = train_lloyd_max(2, list(range(0, Q, 3)))
    assert a == b


def test_harvest_shapes_and_determinism():
    u = harvest_coefficients(ML_KEM_512, 3, seed=1, component="u")
    v = harvest_coefficients(ML_KEM_512, 3, seed=1, component="v")
    assert u.shape == (3 * 2 * 256,) and v.shape == (3 * 256,)
    assert u.min() >= 0 and u.max() < Q
    assert np.array_equal(u, harvest_coefficients(ML_KEM_512, 3, seed=1, component="u", batch=2))
    assert not np.array_equal(u, harvest_coefficients(ML_KEM_512, 3, seed=1, component="u", start=10))
    with pytest.raises(QuantizerError):
        harvest_coefficients(ML_KEM_512, 1, 1, component="w")
