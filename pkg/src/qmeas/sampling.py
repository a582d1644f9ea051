"""Deterministic sampling for the simulated particle-pair runs.

The generator is a 64-bit linear congruential generator with Knuth's MMIX
constants; together with top-53-bit float extraction and inverse-CDF
categorical sampling, counts are bit-reproducible for a given seed on any
platform:

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64
    u     <- (state >> 11) * 2^-53
"""

import numpy as np

__all__ = ["Lcg64", "sample_counts"]

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / (1 << 53)


class Lcg64:
    """Seeded 64-bit multiplicative-congruential-class generator."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_uint64(self) -> int:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & _MASK64
        return self.state

    def next_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of the next state."""
        return (self.next_uint64() >> 11) * _INV_2_53


def sample_counts(probabilities, n_samples: int, seed: int) -> np.ndarray:
    """Histogram of n i.i.d. inverse-CDF draws from a finite distribution.

    The outcome order is the flat (row-major) order of `probabilities`; the
    returned counts keep that array's shape.  Negative round-off entries are
    clamped to zero for the cumulative only.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    flat = np.clip(probs.reshape(-1), 0.0, None)
    cumulative = np.cumsum(flat)
    top = len(flat) - 1
    rng = Lcg64(seed)
    draws = np.fromiter((rng.next_float() for _ in range(n_samples)), dtype=np.float64)
    indices = np.minimum(np.searchsorted(cumulative, draws, side="right"), top)
    counts = np.bincount(indices, minlength=len(flat))
    return counts.reshape(probs.shape)
