"""Shared random-object generators for the test suite."""

import numpy as np

from qmeas.operators import Operator, exp_hermitian_generator
from qmeas.states import DensityOperator


def random_hermitian(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Operator(0.5 * (g + g.conj().T))


def random_density(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityOperator(Operator(m / np.trace(m).real))


def random_unitary(rng, dim):
    return exp_hermitian_generator(random_hermitian(rng, dim), 1.0)
