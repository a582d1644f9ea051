import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmeas.sampling import LCG_INCREMENT, LCG_MULTIPLIER, Lcg64, sample_counts


def test_lcg_constants_and_recurrence():
    # first state from seed 0 is the increment itself
    assert Lcg64(0).next_uint64() == LCG_INCREMENT
    rng = Lcg64(12345)
    first = rng.next_uint64()
    assert first == (LCG_MULTIPLIER * 12345 + LCG_INCREMENT) % 2**64
    # frozen reference sequence, must never change
    assert [first] + [rng.next_uint64() for _ in range(3)] == [
        2021368500568277588,
        4895494634720187923,
        16336879138292273062,
        15416634109187857277,
    ]


def test_lcg_floats_in_unit_interval():
    rng = Lcg64(987654321)
    values = [rng.next_float() for _ in range(10_000)]
    assert all(0.0 <= v < 1.0 for v in values)
    assert 0.45 < float(np.mean(values)) < 0.55


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_lcg_same_seed_same_stream(seed):
    a, b = Lcg64(seed), Lcg64(seed)
    assert [a.next_uint64() for _ in range(5)] == [b.next_uint64() for _ in range(5)]


def test_sample_counts_total_and_shape():
    probs = np.array([[0.1, 0.2], [0.3, 0.4]])
    counts = sample_counts(probs, 5000, seed=7)
    assert counts.shape == (2, 2)
    assert counts.sum() == 5000


def test_sample_counts_deterministic():
    probs = np.full(16, 1 / 16).reshape(2, 2, 2, 2)
    a = sample_counts(probs, 20_000, seed=99)
    b = sample_counts(probs, 20_000, seed=99)
    assert np.array_equal(a, b)
    c = sample_counts(probs, 20_000, seed=100)
    assert not np.array_equal(a, c)


def test_sample_counts_match_distribution():
    probs = np.array([0.5, 0.25, 0.125, 0.125])
    counts = sample_counts(probs, 100_000, seed=3)
    freqs = counts / 100_000
    assert np.abs(freqs - probs).max() < 0.01


def test_sample_counts_degenerate_distribution():
    counts = sample_counts(np.array([0.0, 1.0, 0.0]), 1000, seed=5)
    assert counts.tolist() == [0, 1000, 0]


def test_sample_counts_requires_positive_n():
    with pytest.raises(ValueError):
        sample_counts(np.array([1.0]), 0, seed=1)
