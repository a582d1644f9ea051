"""Command-line front end: JSON experiment configs in, CSV/JSON tables out.

Configs carry angles in degrees and complex matrices as nested [re, im]
pairs; unknown fields are rejected so a typo in a physics parameter cannot
silently fall back to a default.  Output is deterministic given the config
(including the sampler seed): identical invocations produce identical
bytes, which is why result tables carry no timestamps.

Exit codes: 0 run completed and the kind's asserted inequalities held,
1 config error, 2 domain error, 3 solver non-convergence.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    EprBellConfig,
    WhichWayConfig,
    chsh_pasted_aspect,
    chsh_single_setup,
    eprbell_povm,
    martens_sweep,
    quadruple_sample_check,
    whichway_nonideality,
    whichway_povm,
)
from .nonideality import MARTENS_SLACK_TOL, RecoveryError
from .operators import DimensionMismatchError, Operator, ValidationError
from .povm import distribution
from .premeasurement import PremeasurementModel, induced_povm, pointer_consistency
from .states import DensityOperator, Pvm, maximally_mixed, pure_state

__all__ = ["ConfigError", "ExperimentConfig", "ResultTable", "emit", "main", "parse_config", "run"]

KINDS = ("whichway", "martens-sweep", "epr-bell", "chsh-pasted", "premeasure", "sample")

CHSH_TOL = 1e-9
CONSISTENCY_TOL = 1e-9


class ConfigError(ValueError):
    """Configuration text is malformed or out of range; message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: object
    raw: dict


@dataclass(frozen=True)
class ResultTable:
    columns: tuple
    rows: tuple
    metadata: dict


@dataclass(frozen=True)
class WhichWayRun:
    config: WhichWayConfig
    state: DensityOperator


@dataclass(frozen=True)
class SweepRun:
    theta: float
    theta_prime: float
    n_points: int


@dataclass(frozen=True)
class EprBellRun:
    config: EprBellConfig
    state: DensityOperator


@dataclass(frozen=True)
class PastedRun:
    theta1: float
    theta1_prime: float
    theta2: float
    theta2_prime: float
    state: DensityOperator


@dataclass(frozen=True)
class PremeasureRun:
    model: PremeasurementModel
    rho_object: DensityOperator


@dataclass(frozen=True)
class SampleRun:
    config: EprBellConfig
    state: DensityOperator
    n_samples: int
    seed: int


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _check_fields(obj: dict, allowed: set, path: str):
    unknown = sorted(set(obj) - allowed)
    if unknown:
        _fail(f"{path}{unknown[0]}", "unknown field")


def _number(obj: dict, key: str, path: str, default=None) -> float:
    if key not in obj:
        if default is None:
            _fail(f"{path}{key}", "required field missing")
        return float(default)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{path}{key}", f"expected a number, got {type(value).__name__}")
    return float(value)


def _integer(obj: dict, key: str, path: str, default=None, minimum=None) -> int:
    if key not in obj:
        if default is None:
            _fail(f"{path}{key}", "required field missing")
        value = default
    else:
        value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{path}{key}", f"expected an integer, got {type(value).__name__}")
    if minimum is not None and value < minimum:
        _fail(f"{path}{key}", f"must be >= {minimum}, got {value}")
    return int(value)


def _gamma(obj: dict, key: str, path: str) -> float:
    value = _number(obj, key, path)
    if not 0.0 <= value <= 1.0:
        _fail(f"{path}{key}", f"must lie in [0, 1], got {value:g}")
    return value


def _complex_entry(value, path: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in value)
    ):
        _fail(path, "complex entries are [re, im] number pairs")
    return complex(value[0], value[1])


def _vector(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a nonempty list of [re, im] pairs")
    return np.array([_complex_entry(v, f"{path}[{k}]") for k, v in enumerate(value)])


def _matrix(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a nonempty list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != len(value):
            _fail(f"{path}[{i}]", "matrix must be square, rows of [re, im] pairs")
        rows.append([_complex_entry(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return np.array(rows)


def _state(obj: dict, key: str, path: str, dim: int, default_vec) -> DensityOperator:
    if key not in obj:
        return pure_state(default_vec)
    vec = _vector(obj[key], f"{path}{key}")
    if len(vec) != dim:
        _fail(f"{path}{key}", f"state vector must have {dim} entries, got {len(vec)}")
    try:
        return pure_state(vec)
    except ValidationError as exc:
        _fail(f"{path}{key}", str(exc))


def _radians(degrees: float) -> float:
    return float(np.deg2rad(degrees))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a UTF-8 JSON experiment configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: malformed JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    if "kind" not in raw:
        raise ConfigError("kind: required field missing")
    kind = raw["kind"]
    if kind not in KINDS:
        raise ConfigError(f"kind: unknown kind {kind!r}, expected one of {', '.join(KINDS)}")
    parser = {
        "whichway": _parse_whichway,
        "martens-sweep": _parse_sweep,
        "epr-bell": _parse_eprbell,
        "chsh-pasted": _parse_pasted,
        "premeasure": _parse_premeasure,
        "sample": _parse_sample,
    }[kind]
    return ExperimentConfig(kind=kind, params=parser(raw), raw=raw)


def _parse_whichway(obj: dict) -> WhichWayRun:
    _check_fields(obj, {"kind", "theta_deg", "theta_prime_deg", "gamma", "state"}, "")
    config = WhichWayConfig(
        theta=_radians(_number(obj, "theta_deg", "")),
        theta_prime=_radians(_number(obj, "theta_prime_deg", "")),
        gamma=_gamma(obj, "gamma", ""),
    )
    return WhichWayRun(config=config, state=_state(obj, "state", "", 2, [1.0, 0.0]))


def _parse_sweep(obj: dict) -> SweepRun:
    _check_fields(obj, {"kind", "theta_deg", "theta_prime_deg", "n_points"}, "")
    return SweepRun(
        theta=_radians(_number(obj, "theta_deg", "", default=0.0)),
        theta_prime=_radians(_number(obj, "theta_prime_deg", "", default=45.0)),
        n_points=_integer(obj, "n_points", "", default=101, minimum=2),
    )


_ENTANGLED_VEC = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def _parse_arms(obj: dict, with_gammas: bool):
    angles = tuple(
        _radians(_number(obj, key, ""))
        for key in ("theta1_deg", "theta1_prime_deg", "theta2_deg", "theta2_prime_deg")
    )
    if not with_gammas:
        return angles
    return angles + (_gamma(obj, "gamma1", ""), _gamma(obj, "gamma2", ""))


def _parse_eprbell(obj: dict) -> EprBellRun:
    _check_fields(
        obj,
        {
            "kind",
            "theta1_deg",
            "theta1_prime_deg",
            "theta2_deg",
            "theta2_prime_deg",
            "gamma1",
            "gamma2",
            "state",
        },
        "",
    )
    t1, t1p, t2, t2p, g1, g2 = _parse_arms(obj, with_gammas=True)
    config = EprBellConfig(
        arm1=WhichWayConfig(t1, t1p, g1), arm2=WhichWayConfig(t2, t2p, g2)
    )
    return EprBellRun(config=config, state=_state(obj, "state", "", 4, _ENTANGLED_VEC))


def _parse_pasted(obj: dict) -> PastedRun:
    _check_fields(
        obj,
        {"kind", "theta1_deg", "theta1_prime_deg", "theta2_deg", "theta2_prime_deg", "state"},
        "",
    )
    t1, t1p, t2, t2p = _parse_arms(obj, with_gammas=False)
    return PastedRun(
        theta1=t1,
        theta1_prime=t1p,
        theta2=t2,
        theta2_prime=t2p,
        state=_state(obj, "state", "", 4, _ENTANGLED_VEC),
    )


def _parse_premeasure(obj: dict) -> PremeasureRun:
    _check_fields(
        obj,
        {
            "kind",
            "dim_object",
            "dim_apparatus",
            "unitary",
            "hamiltonian",
            "time",
            "rho_apparatus",
            "pointer",
            "rho_object",
        },
        "",
    )
    dim_o = _integer(obj, "dim_object", "", minimum=1)
    dim_a = _integer(obj, "dim_apparatus", "", minimum=1)
    if ("unitary" in obj) == ("hamiltonian" in obj):
        raise ConfigError("unitary: provide exactly one of 'unitary' or 'hamiltonian'+'time'")
    if "rho_apparatus" not in obj:
        raise ConfigError("rho_apparatus: required field missing")
    if "pointer" not in obj or not isinstance(obj["pointer"], list) or not obj["pointer"]:
        raise ConfigError("pointer: required nonempty list of projector matrices")
    try:
        rho_a = DensityOperator(Operator(_matrix(obj["rho_apparatus"], "rho_apparatus")))
    except (ValidationError, DimensionMismatchError) as exc:
        raise ConfigError(f"rho_apparatus: {exc}") from exc
    try:
        pointer = Pvm(
            [Operator(_matrix(p, f"pointer[{k}]")) for k, p in enumerate(obj["pointer"])],
            labels=range(len(obj["pointer"])),
        )
    except (ValidationError, DimensionMismatchError) as exc:
        raise ConfigError(f"pointer: {exc}") from exc
    try:
        if "unitary" in obj:
            model = PremeasurementModel(
                rho_a, Operator(_matrix(obj["unitary"], "unitary")), pointer, dim_o, dim_a
            )
        else:
            if "time" not in obj:
                raise ConfigError("time: required with 'hamiltonian'")
            model = PremeasurementModel.from_generator(
                Operator(_matrix(obj["hamiltonian"], "hamiltonian")),
                _number(obj, "time", ""),
                rho_a,
                pointer,
                dim_o,
                dim_a,
            )
    except (ValidationError, DimensionMismatchError) as exc:
        raise ConfigError(f"unitary: {exc}") from exc
    if "rho_object" in obj:
        try:
            rho_o = DensityOperator(Operator(_matrix(obj["rho_object"], "rho_object")))
        except (ValidationError, DimensionMismatchError) as exc:
            raise ConfigError(f"rho_object: {exc}") from exc
        if rho_o.dim != dim_o:
            raise ConfigError(f"rho_object: dimension {rho_o.dim} != dim_object {dim_o}")
    else:
        rho_o = maximally_mixed(dim_o)
    return PremeasureRun(model=model, rho_object=rho_o)


def _parse_sample(obj: dict) -> SampleRun:
    _check_fields(
        obj,
        {
            "kind",
            "theta1_deg",
            "theta1_prime_deg",
            "theta2_deg",
            "theta2_prime_deg",
            "gamma1",
            "gamma2",
            "state",
            "n_samples",
            "seed",
        },
        "",
    )
    t1, t1p, t2, t2p, g1, g2 = _parse_arms(obj, with_gammas=True)
    config = EprBellConfig(
        arm1=WhichWayConfig(t1, t1p, g1), arm2=WhichWayConfig(t2, t2p, g2)
    )
    return SampleRun(
        config=config,
        state=_state(obj, "state", "", 4, _ENTANGLED_VEC),
        n_samples=_integer(obj, "n_samples", "", minimum=1),
        seed=_integer(obj, "seed", ""),
    )


_QUAD_COLUMNS = ["".join(w) for w in product("pm", repeat=4)]


def _table(config: ExperimentConfig, columns, rows) -> ResultTable:
    metadata = {"kind": config.kind, "version": __version__, "config": config.raw}
    return ResultTable(columns=tuple(columns), rows=tuple(tuple(r) for r in rows), metadata=metadata)


def run(config: ExperimentConfig, tol: float = None) -> ResultTable:
    """Execute a parsed config and return its result table.

    `tol` overrides the tolerance of the kind's asserted inequality
    (sweep slack, single-setup CHSH bound, pointer consistency).
    """
    runner = {
        "whichway": _run_whichway,
        "martens-sweep": _run_sweep,
        "epr-bell": _run_eprbell,
        "chsh-pasted": _run_pasted,
        "premeasure": _run_premeasure,
        "sample": _run_sample,
    }[config.kind]
    return runner(config, tol)


def _run_whichway(config: ExperimentConfig, tol) -> ResultTable:
    p = config.params
    probs = distribution(p.state, whichway_povm(p.config)).probabilities
    lam, mu = whichway_nonideality(p.config)
    columns = (
        ["p_pp", "p_pm", "p_mp", "p_mm"]
        + ["lambda_pp", "lambda_pm", "lambda_mp", "lambda_mm"]
        + ["mu_pp", "mu_pm", "mu_mp", "mu_mm"]
        + ["lambda_residual", "mu_residual"]
    )
    row = (
        list(probs.reshape(-1))
        + list(lam.lam.reshape(-1))
        + list(mu.lam.reshape(-1))
        + [lam.residual, mu.residual]
    )
    return _table(config, columns, [row])


def _run_sweep(config: ExperimentConfig, tol) -> ResultTable:
    p = config.params
    slack_floor = -(tol if tol is not None else MARTENS_SLACK_TOL)
    points = martens_sweep(p.theta, p.theta_prime, p.n_points)
    rows = [(pt.gamma, pt.j_lambda, pt.j_mu, pt.bound, pt.slack) for pt in points]
    worst = min(pt.slack for pt in points)
    if worst < slack_floor:
        raise ValidationError(f"sweep slack {worst:.3e} below {slack_floor:.0e}")
    return _table(config, ["gamma", "j_lambda", "j_mu", "bound", "slack"], rows)


def _run_eprbell(config: ExperimentConfig, tol) -> ResultTable:
    p = config.params
    probs = distribution(p.state, eprbell_povm(p.config)).probabilities
    result = chsh_single_setup(p.state, p.config)
    bound_tol = tol if tol is not None else CHSH_TOL
    if abs(result.s_value) > 2.0 + bound_tol:
        raise ValidationError(
            f"single-setup CHSH {result.s_value:.12g} exceeds the classical bound 2"
        )
    columns = [f"p_{w}" for w in _QUAD_COLUMNS] + [
        "E_m1m2",
        "E_m1n2",
        "E_n1m2",
        "E_n1n2",
        "s_value",
    ]
    row = list(probs.reshape(-1)) + list(result.correlations) + [result.s_value]
    return _table(config, columns, [row])


def _run_pasted(config: ExperimentConfig, tol) -> ResultTable:
    p = config.params
    result = chsh_pasted_aspect(p.state, p.theta1, p.theta1_prime, p.theta2, p.theta2_prime)
    columns = ["E_ab", "E_abp", "E_apb", "E_apbp", "s_value", "violates"]
    row = list(result.correlations) + [result.s_value, float(result.violates)]
    return _table(config, columns, [row])


def _run_premeasure(config: ExperimentConfig, tol) -> ResultTable:
    p = config.params
    povm = induced_povm(p.model)
    residual = pointer_consistency(p.rho_object, p.model)
    limit = tol if tol is not None else CONSISTENCY_TOL
    if residual >= limit:
        raise ValidationError(f"pointer consistency residual {residual:.3e} >= {limit:.0e}")
    rows = []
    for k, effect in enumerate(povm.effects):
        for i in range(effect.dim):
            for j in range(effect.dim):
                entry = effect.mat[i, j]
                rows.append((float(k), float(i), float(j), entry.real, entry.imag, residual))
    return _table(
        config, ["effect", "row", "col", "re", "im", "consistency_residual"], rows
    )


def _run_sample(config: ExperimentConfig, tol) -> ResultTable:
    p = config.params
    check = quadruple_sample_check(p.state, p.config, p.n_samples, p.seed)
    columns = [f"count_{w}" for w in _QUAD_COLUMNS] + ["tv_distance"]
    row = [float(c) for c in check.counts.reshape(-1)] + [check.tv_distance]
    return _table(config, columns, [row])


def _format_value(value: float) -> str:
    return format(float(value), ".12g")


def render_csv(table: ResultTable) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(table: ResultTable) -> str:
    payload = {
        "metadata": table.metadata,
        "columns": {
            name: [float(row[k]) for row in table.rows] for k, name in enumerate(table.columns)
        },
    }
    return json.dumps(payload, indent=2) + "\n"


def emit(table: ResultTable, fmt: str, path=None):
    """Write the table as CSV (12 significant digits, LF endings) or JSON."""
    if fmt == "csv":
        text = render_csv(table)
    elif fmt == "json":
        text = render_json(table)
    else:
        raise ValidationError(f'format must be "csv" or "json", got {fmt!r}')
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write output to {path}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmeas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run_cmd = sub.add_parser("run", help="execute an experiment config")
    run_cmd.add_argument("--config", required=True, help="path to a JSON config")
    run_cmd.add_argument("--format", choices=("csv", "json"), default="csv")
    run_cmd.add_argument("--out", default=None, help="output path (default stdout)")
    run_cmd.add_argument(
        "--tol", type=float, default=None, help="override the kind's assertion tolerance"
    )
    val_cmd = sub.add_parser("validate", help="check a config without running it")
    val_cmd.add_argument("--config", required=True, help="path to a JSON config")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text)
        if args.command == "validate":
            sys.stdout.write(f"ok: {config.kind}\n")
            return 0
        table = run(config, tol=args.tol)
        emit(table, args.format, args.out)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except RecoveryError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, DimensionMismatchError, RuntimeError, OSError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
