"""Measurement nonideality: stochastic-matrix recovery and entropy measures.

A POVM {M_m} is a nonideal version of {N_n} when M_m = sum_n lam[m,n] N_n
for a nonnegative matrix lam whose columns each sum to one; lam[m,n] is the
conditional probability of registering m where an ideal measurement would
have given n.  `recover_nonideality` finds the best such matrix by least
squares over the column-stochastic polytope and reports the residual, so a
failed relation is observable rather than silently accepted.

The entropy measure J (average row entropy of lam) is zero exactly for an
ideal measurement; for a joint measurement whose marginals smear two target
PVMs, the sum of the two J values is bounded below by the overlap bound
evaluated in `martens_bound`, a state-independent counterpart of the
state-dependent Robertson/Heisenberg product bound in `check_heisenberg`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    HERMITICITY_TOL,
    DimensionMismatchError,
    Operator,
    ValidationError,
    _require_hermitian,
    herm_eig,
)
from .povm import BivariatePovm, Povm, marginal
from .states import DensityOperator, Pvm, std_dev

__all__ = [
    "InequalityReport",
    "NonidealityMatrix",
    "NotJointMeasurementError",
    "RecoveryError",
    "check_heisenberg",
    "check_martens",
    "joint_nonideal_decomposition",
    "martens_bound",
    "recover_nonideality",
    "row_entropy_measure",
]

COLUMN_SUM_TOL = 1e-7
GRADIENT_MAP_TOL = 1e-10
MAX_SOLVER_ITERATIONS = 100_000
MARTENS_SLACK_TOL = 1e-6


class RecoveryError(RuntimeError):
    """Solver did not converge within the iteration cap.

    Carries the best iterate seen and its residual so callers can inspect
    how close the failed recovery got.
    """

    def __init__(self, message: str, best: np.ndarray, residual: float):
        super().__init__(message)
        self.best = best
        self.residual = residual


class NotJointMeasurementError(ValidationError):
    """The bivariate POVM's marginals do not smear the requested target PVMs."""


@dataclass(frozen=True)
class NonidealityMatrix:
    """Nonnegative column-stochastic matrix linking two POVMs, plus the
    Frobenius norm of the recovery error."""

    lam: np.ndarray
    residual: float

    def __post_init__(self):
        arr = np.array(self.lam, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError(f"nonideality matrix must be 2-d, got shape {arr.shape}")
        if arr.min() < -1e-9:
            raise ValidationError(f"nonideality entry {arr.min():.3e} below -1e-09")
        colsums = arr.sum(axis=0)
        worst = float(np.abs(colsums - 1.0).max())
        if worst > COLUMN_SUM_TOL:
            raise ValidationError(f"column sums deviate from 1 by {worst:.3e}")
        arr.flags.writeable = False
        object.__setattr__(self, "lam", arr)

    @property
    def shape(self) -> tuple:
        return self.lam.shape


@dataclass(frozen=True)
class InequalityReport:
    """Evaluated inequality: lhs >= rhs expected, slack = lhs - rhs.

    `tol` records the tolerance below which negative slack counts as a
    violation; satisfied <=> slack >= -tol.
    """

    lhs: float
    rhs: float
    satisfied: bool
    slack: float
    tol: float = HERMITICITY_TOL

    @classmethod
    def from_sides(cls, lhs: float, rhs: float, tol: float = HERMITICITY_TOL):
        slack = lhs - rhs
        return cls(lhs=lhs, rhs=rhs, satisfied=slack >= -tol, slack=slack, tol=tol)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex."""
    srt = np.sort(v)[::-1]
    css = np.cumsum(srt)
    ks = np.arange(1, v.size + 1)
    rho = ks[srt * ks > css - 1.0][-1]
    tau = (css[rho - 1] - 1.0) / rho
    return np.maximum(v - tau, 0.0)


def _project_columns(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    for j in range(x.shape[1]):
        out[:, j] = _project_simplex(x[:, j])
    return out


def recover_nonideality(
    m: Povm,
    n: Povm,
    grad_tol: float = GRADIENT_MAP_TOL,
    max_iter: int = MAX_SOLVER_ITERATIONS,
) -> NonidealityMatrix:
    """Best column-stochastic lam with M_k ~ sum_j lam[k,j] N_j, least squares.

    Projected gradient descent on the product of per-column probability
    simplices; the objective is a small convex quadratic, so a step of
    1/L with backtracking converges fast at these sizes.  A residual near
    zero (< 1e-7) certifies that m really is a nonideal version of n.
    """
    if m.dim != n.dim:
        raise DimensionMismatchError(f"POVM dimensions differ: {m.dim} vs {n.dim}")
    me = np.stack([e.mat for e in m.effects])
    ne = np.stack([e.mat for e in n.effects])
    # Frobenius inner products; all real since effects are Hermitian.
    gram = np.einsum("aij,bji->ab", ne, ne).real
    cross = np.einsum("mij,nji->mn", me, ne).real
    const = float(np.einsum("mij,mji->", me, me).real)

    def objective(lam):
        return const - 2.0 * float((lam * cross).sum()) + float(((lam @ gram) * lam).sum())

    def direct_residual(lam):
        # The expanded quadratic cancels catastrophically near zero; the
        # reported residual is therefore recomputed from the reconstruction.
        diff = me - np.einsum("mn,nij->mij", lam, ne)
        return float(np.sqrt((np.abs(diff) ** 2).sum()))

    lipschitz = 2.0 * float(herm_eig(Operator(gram)).eigenvalues[-1])
    step = 1.0 / lipschitz if lipschitz > 0 else 1.0
    rows, cols = len(m.effects), len(n.effects)
    lam = np.full((rows, cols), 1.0 / rows)
    f_lam = objective(lam)
    best, best_f = lam, f_lam
    for _ in range(max_iter):
        grad = 2.0 * (lam @ gram - cross)
        while True:
            cand = _project_columns(lam - step * grad)
            delta = cand - lam
            quad = f_lam + float((grad * delta).sum()) + float((delta * delta).sum()) / (2.0 * step)
            f_cand = objective(cand)
            if f_cand <= quad + 1e-15:
                break
            step *= 0.5
        gap = float(np.sqrt((delta * delta).sum())) / step
        lam, f_lam = cand, f_cand
        if f_lam < best_f:
            best, best_f = lam, f_lam
        if gap < grad_tol:
            return NonidealityMatrix(lam=lam, residual=direct_residual(lam))
    best_residual = direct_residual(best)
    raise RecoveryError(
        f"recovery did not converge within {max_iter} iterations "
        f"(best residual {best_residual:.3e})",
        best=best,
        residual=best_residual,
    )


def row_entropy_measure(lam) -> float:
    """Average row entropy J of a nonideality matrix; 0 means ideal.

    J = -(1/N) sum_{mn} lam[m,n] ln(lam[m,n] / rowsum_m) with N the number
    of rows; zero entries and zero rows contribute nothing (entropy limit
    0 ln 0 = 0).
    """
    arr = lam.lam if isinstance(lam, NonidealityMatrix) else np.asarray(lam, dtype=np.float64)
    rowsums = arr.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = arr / rowsums[:, None]
        terms = np.where(arr > 0.0, arr * np.log(np.where(arr > 0.0, ratio, 1.0)), 0.0)
    val = -float(terms.sum()) / arr.shape[0]
    return val if val > 0.0 else 0.0


def joint_nonideal_decomposition(r: BivariatePovm, e: Pvm, f: Pvm):
    """Recover the pair (lam, mu) smearing the target PVMs e and f into the
    row and column marginals of the joint grid r."""
    lam = recover_nonideality(marginal(r, "row"), Povm.from_pvm(e))
    mu = recover_nonideality(marginal(r, "col"), Povm.from_pvm(f))
    return lam, mu


def martens_bound(e: Pvm, f: Pvm) -> float:
    """State-independent lower bound -ln(max_mn Tr E_m F_n) on J_lam + J_mu
    for any joint nonideal measurement of the PVMs e and f."""
    if e.dim != f.dim:
        raise DimensionMismatchError(f"PVM dimensions differ: {e.dim} vs {f.dim}")
    overlaps = [
        float(np.trace(p.mat @ q.mat).real) for p in e.projectors for q in f.projectors
    ]
    mx = max(overlaps)
    if mx <= 0.0:
        raise ValidationError("maximal projector overlap is zero; bound undefined")
    return -math.log(mx)


def check_martens(
    r: BivariatePovm,
    e: Pvm,
    f: Pvm,
    residual_tol: float = 1e-6,
    slack_tol: float = MARTENS_SLACK_TOL,
) -> InequalityReport:
    """Evaluate J_lam + J_mu >= overlap bound for a joint nonideal measurement.

    The slack tolerance is looser than elsewhere (1e-6) because the entropy
    terms compound solver residuals at the boundary of equality.
    """
    lam, mu = joint_nonideal_decomposition(r, e, f)
    for name, rec in (("row", lam), ("col", mu)):
        if rec.residual > residual_tol:
            raise NotJointMeasurementError(
                f"not a joint nonideal measurement of the targets: {name}-marginal "
                f"recovery residual {rec.residual:.3e} > {residual_tol:.0e}"
            )
    lhs = row_entropy_measure(lam) + row_entropy_measure(mu)
    return InequalityReport.from_sides(lhs, martens_bound(e, f), tol=slack_tol)


def check_heisenberg(
    rho: DensityOperator,
    a: Operator,
    b: Operator,
    tol: float = HERMITICITY_TOL,
) -> InequalityReport:
    """Robertson uncertainty product: dA dB >= |Tr rho [A,B]| / 2."""
    if not (rho.dim == a.dim == b.dim):
        raise DimensionMismatchError(
            f"dimensions differ: state {rho.dim}, operands {a.dim} and {b.dim}"
        )
    _require_hermitian(a, tol, "first observable")
    _require_hermitian(b, tol, "second observable")
    lhs = std_dev(rho, a) * std_dev(rho, b)
    commutator = a.mat @ b.mat - b.mat @ a.mat
    rhs = 0.5 * abs(complex(np.trace(rho.mat @ commutator)))
    return InequalityReport.from_sides(lhs, rhs, tol=tol)
