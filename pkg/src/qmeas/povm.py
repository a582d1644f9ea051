"""Generalized observables: validated POVMs and outcome grids.

A POVM is an ordered list of positive effects resolving the identity.  The
bivariate and quadrivariate grids index effects by tuples of detector
outcomes ("+" detection, "-" no detection); flattening any grid row-major
must again give a valid POVM.  Validation is eager so invalid effect lists
cannot be represented.
"""

import numpy as np

from .operators import (
    HERMITICITY_TOL,
    DimensionMismatchError,
    Operator,
    ValidationError,
    herm_eig,
)
from .states import DensityOperator, Pvm, expectation

__all__ = [
    "BivariatePovm",
    "OutcomeDistribution",
    "Povm",
    "PovmValidationError",
    "QuadrivariatePovm",
    "distribution",
    "is_pvm",
    "marginal",
    "marginal_pair",
    "validate_povm",
]

QUAD_AXIS_NAMES = ("m1", "n1", "m2", "n2")


class PovmValidationError(ValidationError):
    """Effect list fails positivity, closure or dimension requirements."""


def _check_effects(effects, tol: float):
    """Shared POVM axioms check over a sequence of Operator effects.

    Raises PovmValidationError naming the offending effect index and the
    numerical residual.
    """
    effects = tuple(effects)
    if not effects:
        raise PovmValidationError("POVM needs at least one effect")
    dim = effects[0].dim
    for k, e in enumerate(effects):
        if not isinstance(e, Operator):
            raise PovmValidationError(f"effect {k} is not an Operator")
        if e.dim != dim:
            raise DimensionMismatchError(f"effect {k} has dimension {e.dim}, expected {dim}")
        herm = np.abs(e.mat - e.mat.conj().T).max()
        if herm > tol:
            raise PovmValidationError(f"effect {k} is not Hermitian (residual {herm:.3e})")
        low = herm_eig(e, tol=tol).eigenvalues[0]
        if low < -tol:
            raise PovmValidationError(
                f"effect {k} is not positive semidefinite (min eigenvalue {low:.3e})"
            )
    total = sum((e.mat for e in effects), start=np.zeros((dim, dim), dtype=np.complex128))
    closure = np.abs(total - np.eye(dim)).max()
    if closure > tol:
        raise PovmValidationError(f"effects do not sum to identity (closure residual {closure:.3e})")
    return effects


class Povm:
    """Ordered list of positive effects summing to identity."""

    __slots__ = ("effects", "outcome_labels")

    def __init__(self, effects, outcome_labels=None, tol: float = HERMITICITY_TOL):
        effects = _check_effects(effects, tol)
        if outcome_labels is None:
            outcome_labels = tuple(str(k) for k in range(len(effects)))
        else:
            outcome_labels = tuple(str(x) for x in outcome_labels)
            if len(outcome_labels) != len(effects):
                raise PovmValidationError("outcome_labels length must match effects")
        self.effects = effects
        self.outcome_labels = outcome_labels

    @classmethod
    def from_pvm(cls, pvm: Pvm) -> "Povm":
        return cls(pvm.projectors, [f"{lab:g}" for lab in pvm.labels])

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def __len__(self):
        return len(self.effects)

    def __repr__(self):
        return f"Povm(dim={self.dim}, outcomes={len(self)})"


def validate_povm(effects, outcome_labels=None, tol: float = HERMITICITY_TOL) -> Povm:
    """Check the POVM axioms over an effect list and wrap it as a Povm."""
    return Povm(effects, outcome_labels, tol=tol)


def is_pvm(p: Povm, tol: float = HERMITICITY_TOL) -> bool:
    """True iff every effect is idempotent, i.e. the POVM is projection-valued."""
    for e in p.effects:
        if np.abs((e @ e).mat - e.mat).max() > tol:
            return False
    return True


class BivariatePovm:
    """rows x cols grid of effects whose row-major flattening is a valid POVM."""

    __slots__ = ("grid", "row_labels", "col_labels")

    def __init__(self, grid, row_labels, col_labels, tol: float = HERMITICITY_TOL):
        rows = [tuple(r) for r in grid]
        flat = [e for r in rows for e in r]
        _check_effects(flat, tol)
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise PovmValidationError("grid rows must have uniform length")
        stacked = np.stack([np.stack([e.mat for e in r]) for r in rows])
        stacked.flags.writeable = False
        self.grid = stacked  # (rows, cols, dim, dim)
        self.row_labels = tuple(str(x) for x in row_labels)
        self.col_labels = tuple(str(x) for x in col_labels)
        if len(self.row_labels) != len(rows) or len(self.col_labels) != ncols:
            raise PovmValidationError("label lengths must match the grid shape")

    @property
    def shape(self) -> tuple:
        return self.grid.shape[:2]

    @property
    def dim(self) -> int:
        return self.grid.shape[-1]

    def effect(self, m: int, n: int) -> Operator:
        return Operator(self.grid[m, n])

    def flatten(self) -> Povm:
        rows, cols = self.shape
        effects = [Operator(self.grid[m, n]) for m in range(rows) for n in range(cols)]
        labels = [
            f"{self.row_labels[m]},{self.col_labels[n]}" for m in range(rows) for n in range(cols)
        ]
        return Povm(effects, labels)

    def __repr__(self):
        return f"BivariatePovm(shape={self.shape}, dim={self.dim})"


def marginal(b: BivariatePovm, axis: str) -> Povm:
    """Marginal POVM of a bivariate grid: axis="row" keeps the row outcomes
    (summing each row across columns), axis="col" the column outcomes."""
    if axis == "row":
        sums = b.grid.sum(axis=1)
        labels = b.row_labels
    elif axis == "col":
        sums = b.grid.sum(axis=0)
        labels = b.col_labels
    else:
        raise ValidationError(f'axis must be "row" or "col", got {axis!r}')
    return Povm([Operator(s) for s in sums], labels)


class QuadrivariatePovm:
    """2x2x2x2 grid of effects on the two-photon space, axes (m1, n1, m2, n2)."""

    __slots__ = ("grid", "axis_labels")

    def __init__(self, grid, axis_labels=None, tol: float = HERMITICITY_TOL):
        cells = [
            [[tuple(inner) for inner in outer2] for outer2 in outer1] for outer1 in grid
        ]
        flat = [e for o1 in cells for o2 in o1 for inner in o2 for e in inner]
        _check_effects(flat, tol)
        stacked = np.stack(
            [
                np.stack([np.stack([np.stack([e.mat for e in inner]) for inner in o2]) for o2 in o1])
                for o1 in cells
            ]
        )
        stacked.flags.writeable = False
        self.grid = stacked  # (s1, s2, s3, s4, dim, dim)
        if axis_labels is None:
            axis_labels = tuple(
                tuple(("+", "-")[:n]) if n <= 2 else tuple(str(k) for k in range(n))
                for n in stacked.shape[:4]
            )
        self.axis_labels = tuple(tuple(str(x) for x in ax) for ax in axis_labels)
        for k, ax in enumerate(self.axis_labels):
            if len(ax) != stacked.shape[k]:
                raise PovmValidationError(f"axis {QUAD_AXIS_NAMES[k]} labels mismatch grid shape")

    @property
    def shape(self) -> tuple:
        return self.grid.shape[:4]

    @property
    def dim(self) -> int:
        return self.grid.shape[-1]

    def effect(self, m1: int, n1: int, m2: int, n2: int) -> Operator:
        return Operator(self.grid[m1, n1, m2, n2])

    def flatten(self) -> Povm:
        s = self.shape
        effects, labels = [], []
        for idx in np.ndindex(s):
            effects.append(Operator(self.grid[idx]))
            labels.append(",".join(self.axis_labels[k][idx[k]] for k in range(4)))
        return Povm(effects, labels)

    def __repr__(self):
        return f"QuadrivariatePovm(shape={self.shape}, dim={self.dim})"


def _resolve_axis(axis) -> int:
    if isinstance(axis, str):
        if axis not in QUAD_AXIS_NAMES:
            raise ValidationError(f"unknown axis {axis!r}, expected one of {QUAD_AXIS_NAMES}")
        return QUAD_AXIS_NAMES.index(axis)
    axis = int(axis)
    if not 0 <= axis <= 3:
        raise ValidationError(f"axis index {axis} out of range 0..3")
    return axis


def marginal_pair(q: QuadrivariatePovm, axis_i, axis_j) -> BivariatePovm:
    """Bivariate marginal keeping two distinct axes (rows = axis_i, cols = axis_j),
    summing effects over the remaining two."""
    i, j = _resolve_axis(axis_i), _resolve_axis(axis_j)
    if i == j:
        raise ValidationError(f"marginal axes must be distinct, got {axis_i!r} twice")
    others = tuple(k for k in range(4) if k not in (i, j))
    summed = q.grid.sum(axis=others)  # remaining axes keep ascending order
    if i > j:
        summed = summed.swapaxes(0, 1)
    rows = [[Operator(summed[a, b]) for b in range(summed.shape[1])] for a in range(summed.shape[0])]
    return BivariatePovm(rows, q.axis_labels[i], q.axis_labels[j])


class OutcomeDistribution:
    """Probability array matching a POVM's outcome shape.

    Raw expectation values are stored as computed; small negative round-off
    (>= -1e-9) is legal here and only clamped in display paths.
    """

    __slots__ = ("probabilities",)

    def __init__(self, probabilities, tol: float = HERMITICITY_TOL):
        arr = np.array(probabilities, dtype=np.float64)
        if arr.size == 0:
            raise ValidationError("distribution needs at least one outcome")
        if arr.min() < -tol:
            raise ValidationError(f"probability {arr.min():.3e} below -{tol:.0e}")
        total = float(arr.sum())
        if abs(total - 1.0) > tol:
            raise ValidationError(f"probabilities sum to {total:.12g}, expected 1")
        arr.flags.writeable = False
        self.probabilities = arr

    @property
    def shape(self) -> tuple:
        return self.probabilities.shape

    def __repr__(self):
        return f"OutcomeDistribution(shape={self.shape})"


def distribution(rho: DensityOperator, p) -> OutcomeDistribution:
    """Outcome probabilities Tr(rho E) for a Povm or an outcome grid.

    The result is shaped like the POVM: flat for Povm, (rows, cols) for
    BivariatePovm, (2,2,2,2) for QuadrivariatePovm.
    """
    if isinstance(p, Povm):
        probs = np.array([expectation(rho, e) for e in p.effects])
    elif isinstance(p, (BivariatePovm, QuadrivariatePovm)):
        shape = p.shape
        probs = np.array(
            [expectation(rho, Operator(p.grid[idx])) for idx in np.ndindex(shape)]
        ).reshape(shape)
    else:
        raise ValidationError(f"unsupported POVM type {type(p).__name__}")
    return OutcomeDistribution(probs)
