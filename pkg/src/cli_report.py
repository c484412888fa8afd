"""
Command-line front end for pulse design, error budgets, simulation and the SP/AP table.

Subcommands:
    design    write a first-order-optimized pi pulse file
    budget    write the ten error functionals as CSV
    simulate  write deviation norms of the exact evolution as CSV
    scaling   write a convergence sweep as CSV (optionally a gnuplot script)
    table1    print the zero/nonzero comparison of designed SP and AP pulses

Exit codes: 0 ok, 1 usage / input / design problems, 2 verification failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from data.pulse_files import load_designed_pulse, parse_matrix_file, serialize_pulse
from data.reference_models import default_model, model_from_hamiltonian
from models.error_functionals import (
    PulseFamily,
    classify_budget,
    error_budget,
)
from models.evolution_sim import (
    ScalingMetric,
    SystemModel,
    commutator_grouping_residual,
    control_frame_error,
    default_tau_p,
    eta_components,
    ideal_target,
    leading_order_agreement,
    propagate,
    scaling_sweep,
)
from models.operator_algebra import operator_norm
from models.pulse_core import DesignedPulse
from models.pulse_design import DesignSpec, create_designer, verify_first_order
from monitoring.error_handling import (
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFICATION,
    ConfigurationError,
    ErrorClassifier,
    error_handling_context,
)
from monitoring.observability import configure_logging, observability_context
from utils.config import get_settings, load_run_config_file
from utils.reporting import (
    budget_csv,
    gnuplot_script,
    quantities_csv,
    scaling_csv,
    cell_comparison_report,
)

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("design", "budget", "simulate", "scaling", "table1")


class RunConfig(BaseModel):
    """One validated invocation."""

    subcommand: Literal["design", "budget", "simulate", "scaling", "table1"]
    pulse: Optional[Path] = None
    family: Optional[PulseFamily] = None
    n: int = Field(1, ge=1)
    tau_p: Optional[float] = Field(None, gt=0)
    tau_s: Optional[float] = Field(None, ge=0)
    epsilon: Optional[float] = None
    tol: Optional[float] = Field(None, gt=0)
    out: Optional[Path] = None
    model: str = "default"
    shrink: Optional[float] = Field(None, gt=0, lt=1)
    steps: Optional[int] = Field(None, ge=4)
    metric: ScalingMetric = ScalingMetric.DEVIATION
    gnuplot: bool = False
    log_format: Literal["json", "text"] = "json"
    log_level: str = "INFO"

    @model_validator(mode="after")
    def _check_sources(self) -> "RunConfig":
        if self.subcommand == "table1":
            if self.pulse is not None:
                raise ValueError("table1 designs its own pulses; --pulse is not accepted")
            return self
        if self.subcommand == "design":
            if self.pulse is not None:
                raise ValueError("design takes --family, not --pulse")
            if self.family is None:
                self.family = PulseFamily.SYMMETRIC
            return self
        if (self.pulse is None) == (self.family is None):
            raise ValueError("give exactly one pulse source: --pulse <file> or --family")
        if self.gnuplot and (self.subcommand != "scaling" or self.out is None):
            raise ValueError("--gnuplot needs the scaling subcommand and --out")
        return self


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; every option defaults to None so config files can fill gaps."""
    settings = get_settings()
    parser = _Parser(prog="pulse_budget", description="Error budgets of finite pulses with axis errors")
    parser.add_argument("--version", action="version", version=f"{settings.app_name} {settings.app_version}")
    parser.add_argument("--config", type=Path, help="key=value file; flags override it")
    parser.add_argument("--log-format", choices=["json", "text"], dest="log_format")
    parser.add_argument("--log-level", dest="log_level")

    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--pulse", type=Path, help="Pulse file")
        sub.add_argument("--family", choices=[f.value for f in PulseFamily])
        sub.add_argument("--n", type=int, help="Asymmetric family index")
        sub.add_argument("--tau-p", type=float, dest="tau_p")
        sub.add_argument("--tau-s", type=float, dest="tau_s")
        sub.add_argument("--epsilon", type=float)
        sub.add_argument("--tol", type=float)
        sub.add_argument("--out", type=Path)
        sub.add_argument("--model", help="'default' or a matrix file holding H")
        if name == "scaling":
            sub.add_argument("--shrink", type=float)
            sub.add_argument("--steps", type=int)
            sub.add_argument("--metric", choices=[m.value for m in ScalingMetric])
            sub.add_argument("--gnuplot", action="store_true", default=None)
    return parser


class _Parser(argparse.ArgumentParser):
    """Usage errors become ConfigurationError instead of exiting with status 2."""

    def error(self, message: str):
        raise ConfigurationError(message)


def build_run_config(argv: Optional[List[str]] = None) -> RunConfig:
    """
    Parse flags, merge them over an optional config file, validate.

    Raises:
        ConfigurationError: bad flags, unreadable config file or invalid combination
    """
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config", None)

    settings = get_settings()
    merged: Dict[str, Any] = {"log_level": settings.log_level, "log_format": settings.log_format}
    if config_path is not None:
        merged.update(load_run_config_file(config_path))
    merged.update({key: value for key, value in args.items() if value is not None})

    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise ConfigurationError(_validation_summary(e)) from e


def _validation_summary(error: ValidationError) -> str:
    parts = []
    for issue in error.errors():
        location = ".".join(str(item) for item in issue["loc"]) or "config"
        parts.append(f"{location}: {issue['msg']}")
    return "; ".join(parts)


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _placed(pulse: DesignedPulse, tau_s: Optional[float]) -> DesignedPulse:
    if tau_s is None:
        return pulse
    return DesignedPulse(pulse.shape, tau_s, pulse.intended_angle)


def _resolve_pulse(config: RunConfig, tau_p: float) -> DesignedPulse:
    if config.pulse is not None:
        return _placed(load_designed_pulse(config.pulse), config.tau_s)
    spec = DesignSpec(tau_p=tau_p, family=config.family, n=config.n)
    return _placed(create_designer().design(spec), config.tau_s)


def _resolve_model(config: RunConfig, epsilon: float) -> SystemModel:
    if config.model == "default":
        return default_model(epsilon)
    path = Path(config.model)
    hamiltonian = parse_matrix_file(path.read_text(encoding="utf-8"))
    return model_from_hamiltonian(hamiltonian, epsilon)


def _run_design(config: RunConfig) -> int:
    settings = get_settings()
    spec = DesignSpec(tau_p=config.tau_p or 1.0, family=config.family, n=config.n)
    pulse = _placed(create_designer().design(spec), config.tau_s)

    verified, report = verify_first_order(pulse, config.tol or settings.design_tolerance)
    logger.info(f"Design report: {report.model_dump_json()}")
    _emit(serialize_pulse(pulse), config.out)
    return EXIT_OK if verified else EXIT_VERIFICATION


def _run_budget(config: RunConfig) -> int:
    epsilon = 1.0 if config.epsilon is None else config.epsilon
    pulse = _resolve_pulse(config, config.tau_p or 1.0)
    _emit(budget_csv([error_budget(pulse, epsilon)]), config.out)
    return EXIT_OK


def _run_simulate(config: RunConfig) -> int:
    settings = get_settings()
    epsilon = settings.default_epsilon if config.epsilon is None else config.epsilon
    model = _resolve_model(config, epsilon)
    pulse = _resolve_pulse(config, config.tau_p or default_tau_p(model))

    delta = control_frame_error(model, pulse)
    components = eta_components(model, pulse)
    eta = components.total
    quantities = {
        "tau_p": pulse.tau_p,
        "epsilon": model.epsilon,
        "deviation_norm": operator_norm(propagate(model, pulse) - ideal_target(model, pulse)),
        "delta_p_norm": operator_norm(delta),
        "eta_norm": operator_norm(eta),
        "remainder_norm": operator_norm(delta - eta),
        "duration_norm": operator_norm(components.duration),
        "direction_zeroth_norm": operator_norm(components.direction_zeroth),
        "direction_first_norm": operator_norm(components.direction_first),
        "commutator_grouping_residual": commutator_grouping_residual(model),
    }
    _emit(quantities_csv(quantities), config.out)
    return EXIT_OK


def _run_scaling(config: RunConfig) -> int:
    settings = get_settings()
    epsilon = settings.default_epsilon if config.epsilon is None else config.epsilon
    model = _resolve_model(config, epsilon)
    pulse = _resolve_pulse(config, config.tau_p or default_tau_p(model))

    if config.metric == ScalingMetric.REMAINDER:
        series = leading_order_agreement(model, pulse, config.shrink, config.steps)
    else:
        series = scaling_sweep(model, pulse, config.metric, config.shrink, config.steps)

    _emit(scaling_csv(series), config.out)
    if config.gnuplot:
        sys.stdout.write(gnuplot_script(series, str(config.out)))
    return EXIT_OK if series.ok else EXIT_VERIFICATION


def _run_table1(config: RunConfig) -> int:
    settings = get_settings()
    tau_p = config.tau_p or 1.0
    tol = config.tol or settings.zero_tolerance
    designer = create_designer()

    symmetric = designer.design_symmetric_pi(tau_p)
    asymmetric = designer.design_asymmetric_pi(tau_p, config.n)
    report, mismatches = cell_comparison_report(
        classify_budget(error_budget(symmetric), tol),
        classify_budget(error_budget(asymmetric), tol),
    )

    sys.stdout.write(report)
    if config.out is not None:
        _emit(report, config.out)
    return EXIT_VERIFICATION if mismatches else EXIT_OK


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "design": _run_design,
    "budget": _run_budget,
    "simulate": _run_simulate,
    "scaling": _run_scaling,
    "table1": _run_table1,
}


def run(config: RunConfig) -> int:
    """
    Execute one subcommand.

    Returns:
        Process exit code
    """
    try:
        with observability_context(f"pulse_budget_{config.subcommand}") as (slog, metrics, run_id):
            with error_handling_context(run_id):
                code = HANDLERS[config.subcommand](config)
            slog.info("Run metrics", metadata=metrics.get_all_metrics_snapshot())
        return code
    except Exception as e:
        category = ErrorClassifier.classify_error(e)
        sys.stderr.write(ErrorClassifier.get_user_message(category, e) + "\n")
        return ErrorClassifier.exit_code_for(category)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = build_run_config(argv)
    except ConfigurationError as e:
        sys.stderr.write(f"{ErrorClassifier.get_user_message(e.category, e)}\n")
        return EXIT_USAGE

    configure_logging(config.log_level, config.log_format)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
