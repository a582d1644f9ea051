"""Dense complex linear algebra for small Hilbert spaces (dimensions 2..16).

`Operator` is the single carrier type for states, effects, observables and
unitaries used throughout the toolkit.  Everything is plain numpy on
complex128 matrices; the Hermitian eigensolver is a cyclic Jacobi iteration,
which at these dimensions is simple, robust and dependency-free.

Index convention for composite systems: the joint index is
``first * dim_second + second`` (row-major over factors), i.e. the first
factor is the slow index.  The partial trace relies on this bit-exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "HermitianEig",
    "Operator",
    "ValidationError",
    "exp_hermitian_generator",
    "herm_eig",
    "identity",
    "is_positive_semidefinite",
    "partial_trace_first",
    "partial_trace_second",
    "tensor_product",
    "zeros",
]

HERMITICITY_TOL = 1e-9

_JACOBI_OFF_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


class ValidationError(ValueError):
    """An input violates a structural precondition (hermiticity, positivity, ...)."""


class DimensionMismatchError(ValueError):
    """Operands live on incompatible Hilbert-space dimensions."""


class Operator:
    """Immutable dense complex square matrix.

    The backing array is copied on construction and marked read-only, so
    instances are safe to share between threads and reuse across results.
    """

    __slots__ = ("_mat",)

    def __init__(self, entries):
        mat = np.array(entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"operator entries must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("operator entries must be finite (no NaN/Inf)")
        mat.flags.writeable = False
        self._mat = mat

    @property
    def mat(self) -> np.ndarray:
        """Read-only (dim, dim) complex128 view of the entries."""
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def adjoint(self) -> "Operator":
        """Conjugate transpose."""
        return Operator(self._mat.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self._mat))

    def tensor(self, other: "Operator") -> "Operator":
        """Kronecker product, self as the slow (left) factor."""
        return Operator(np.kron(self._mat, other._mat))

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.abs(self._mat - self._mat.conj().T).max() <= tol)

    def _require_same_dim(self, other: "Operator"):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._require_same_dim(other)
        return Operator(self._mat + other._mat)

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._require_same_dim(other)
        return Operator(self._mat - other._mat)

    def __neg__(self):
        return Operator(-self._mat)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            raise TypeError("use @ for operator products, * is scalar-only")
        return Operator(self._mat * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._require_same_dim(other)
        return Operator(self._mat @ other._mat)

    def __repr__(self):
        return f"Operator(dim={self.dim})"


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=np.complex128))


def zeros(dim: int) -> Operator:
    return Operator(np.zeros((dim, dim), dtype=np.complex128))


def tensor_product(a: Operator, b: Operator) -> Operator:
    """Kronecker product with `a` as the slow (left) index."""
    return a.tensor(b)


def partial_trace_second(m: Operator, dim_first: int, dim_second: int) -> Operator:
    """Trace out the second tensor factor: result[i,j] = sum_k m[i*d2+k, j*d2+k]."""
    if dim_first * dim_second != m.dim:
        raise DimensionMismatchError(
            f"cannot split dimension {m.dim} as {dim_first} x {dim_second}"
        )
    blocks = m.mat.reshape(dim_first, dim_second, dim_first, dim_second)
    return Operator(np.einsum("ikjk->ij", blocks))


def partial_trace_first(m: Operator, dim_first: int, dim_second: int) -> Operator:
    """Trace out the first tensor factor."""
    if dim_first * dim_second != m.dim:
        raise DimensionMismatchError(
            f"cannot split dimension {m.dim} as {dim_first} x {dim_second}"
        )
    blocks = m.mat.reshape(dim_first, dim_second, dim_first, dim_second)
    return Operator(np.einsum("ikil->kl", blocks))


@dataclass(frozen=True)
class HermitianEig:
    """Spectral data of a Hermitian operator.

    eigenvalues are real and ascending; eigenvectors[:, k] is the unit
    eigenvector belonging to eigenvalues[k].
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _require_hermitian(m: Operator, tol: float, what: str):
    residual = np.abs(m.mat - m.mat.conj().T).max()
    if residual > tol:
        raise ValidationError(f"{what} must be Hermitian (residual {residual:.3e} > {tol:.0e})")


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((np.abs(off) ** 2).sum()))


def herm_eig(m: Operator, tol: float = HERMITICITY_TOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian operator by cyclic Jacobi rotations.

    Each rotation zeroes one off-diagonal pair via a complex plane rotation;
    sweeps repeat until the off-diagonal Frobenius norm drops below 1e-12
    (hard cap 100 sweeps, plenty for dimensions up to 16).
    """
    _require_hermitian(m, tol, "eigensolver input")
    n = m.dim
    a = 0.5 * (m.mat + m.mat.conj().T)  # symmetrize round-off before iterating
    v = np.eye(n, dtype=np.complex128)
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) < _JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r == 0.0:
                    continue
                phase = a[p, q] / r
                t = 0.5 * math.atan2(2.0 * r, a[p, p].real - a[q, q].real)
                c, s = math.cos(t), math.sin(t)
                g = np.eye(n, dtype=np.complex128)
                g[p, p] = c
                g[q, q] = c
                g[p, q] = -s * phase
                g[q, p] = s * np.conj(phase)
                a = g.conj().T @ a @ g
                v = v @ g
    order = np.argsort(a.diagonal().real)
    eigenvalues = a.diagonal().real[order].copy()
    eigenvectors = v[:, order].copy()
    eigenvalues.flags.writeable = False
    eigenvectors.flags.writeable = False
    return HermitianEig(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def exp_hermitian_generator(h: Operator, t: float, tol: float = HERMITICITY_TOL) -> Operator:
    """Unitary exp(-i h t) from the spectral decomposition of Hermitian h."""
    eig = herm_eig(h, tol=tol)
    phases = np.exp(-1j * eig.eigenvalues * t)
    vecs = eig.eigenvectors
    return Operator((vecs * phases) @ vecs.conj().T)


def is_positive_semidefinite(m: Operator, tol: float = HERMITICITY_TOL) -> bool:
    """True iff m is Hermitian within tol and all eigenvalues are >= -tol."""
    if not m.is_hermitian(tol):
        return False
    eig = herm_eig(m, tol=tol)
    return bool(eig.eigenvalues[0] >= -tol)
