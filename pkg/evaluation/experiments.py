"""
Experiment Builders - turn an ExperimentConfig into a run.

Usage:
    from evaluation.experiments import run_experiment, write_outcome

    outcome = run_experiment(config.resolved())
    write_outcome(outcome)

Methods per mode:
- amr-collocation / amr-galerkin: AdaptiveSolver with refinement
- global-collocation / global-gpc: AdaptiveSolver on the fixed initial mesh
- mc / sobol: direct sampling (mc_estimate)
- burgers: BurgersSolver in physical space (AMR or single-element baseline)
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from evaluation.metrics import (
    MomentSeries,
    exact_ode_series,
    mc_estimate,
    mc_points,
    relative_error,
    sobol_points,
)
from mesh.elements import ElementMesh, decompose_uniform
from models import KraichnanOrszagModel, KuramotoSivashinskyModel, LinearODEModel, StochasticModel
from config import settings
from solver.adaptive import AdaptiveSolver, SolverResult
from solver.physical import BurgersResult, BurgersSolver
from storage.artifacts import (
    read_moments,
    write_comparison,
    write_mesh_snapshots,
    write_moments,
    write_reports,
    write_solution,
    write_summary,
)
from tools.config_file import write_config
from tools.errors import ConfigValidationError
from tools.structured_outputs import (
    ComparisonRow,
    Experiment,
    ExperimentConfig,
    Mode,
    ReferenceKind,
    RunSummary,
)

logger = logging.getLogger(__name__)

# highest-order collocation run used as the K-O 1D reference
KO1D_REFERENCE = {"p": 13, "tol1": 1e-8}


@dataclass
class ExperimentOutcome:
    """Result of one configured run, ready to be written."""
    config: ExperimentConfig
    series: MomentSeries
    summary: RunSummary
    result: SolverResult | None = None
    reference: MomentSeries | None = None


def build_model(config: ExperimentConfig) -> StochasticModel:
    if config.experiment == Experiment.ODE:
        return LinearODEModel()
    if config.experiment in (Experiment.KO1D, Experiment.KO2D, Experiment.KO3D):
        return KraichnanOrszagModel(dimension=config.dimension)
    if config.experiment == Experiment.KS:
        return KuramotoSivashinskyModel(n_modes=settings.KS_MODES)
    raise ConfigValidationError(f"experiment '{config.experiment.value}' has no random-space model", ["experiment"])


def initial_mesh(config: ExperimentConfig) -> ElementMesh:
    return decompose_uniform(config.dimension, config.elements)


# =============================================================================
# METHODS
# =============================================================================
def _run_random_space(config: ExperimentConfig, executor: Executor | None, progress: bool) -> tuple[MomentSeries, SolverResult]:
    model = build_model(config)
    adaptive = config.mode.adaptive
    solver = AdaptiveSolver(
        model,
        initial_mesh(config),
        config.mode.propagation,
        config.p,
        policy=config.policy() if adaptive else None,
        tolerances=config.tolerances() if adaptive else None,
        over_integration=config.over_integration,
        executor=executor,
        workers=config.workers,
    )
    result = solver.run(
        config.dt,
        config.t_final,
        check_interval=config.check_interval,
        record_interval=config.record_interval,
        dump_mesh_at=config.dump_mesh_at,
        report_interval=config.report_interval,
        progress=progress,
    )
    return result.series, result


def _run_sampling(config: ExperimentConfig, executor: Executor | None, progress: bool) -> tuple[MomentSeries, int]:
    model = build_model(config)
    if config.mode == Mode.SOBOL:
        points = sobol_points(config.dimension, config.samples)
    else:
        points = mc_points(config.dimension, config.samples, config.seed)
    return mc_estimate(
        model, points, config.dt, config.t_final, config.record_interval,
        executor=executor, workers=config.workers, progress=progress,
    )


def _run_burgers(config: ExperimentConfig, progress: bool) -> BurgersResult:
    adaptive = config.mode.adaptive
    solver = BurgersSolver(
        decompose_uniform(1, config.elements),
        config.p,
        policy=config.policy() if adaptive else None,
        tolerances=config.tolerances() if adaptive else None,
    )
    return solver.run(
        config.dt,
        config.t_final,
        check_interval=config.check_interval,
        record_interval=config.record_interval,
        dump_mesh_at=config.dump_mesh_at,
        report_interval=config.report_interval,
        progress=progress,
    )


# =============================================================================
# REFERENCES
# =============================================================================
_REFERENCE_CACHE: dict[tuple, MomentSeries] = {}


def generate_reference(config: ExperimentConfig, executor: Executor | None = None,
                       progress: bool = False) -> MomentSeries | None:
    """Reference moments for an experiment on the config's time grid."""
    key = (config.experiment, config.dt, config.t_final, config.record_interval, config.samples)
    if key in _REFERENCE_CACHE:
        return _REFERENCE_CACHE[key]

    if config.experiment == Experiment.ODE:
        n = int(round(config.t_final / config.record_interval))
        times = np.linspace(0.0, config.t_final, n + 1)
        reference = exact_ode_series(times)
    elif config.experiment == Experiment.KO1D:
        reference_config = config.model_copy(update={
            "mode": Mode.AMR_COLLOCATION, "p0": None, "label": "ko1d-reference",
            "dump_mesh_at": [], **KO1D_REFERENCE,
        }).resolved()
        logger.info("generating K-O 1D reference (p=%d, tol1=%g)", reference_config.p, reference_config.tol1)
        reference, _ = _run_random_space(reference_config, executor, progress)
    elif config.experiment in (Experiment.KO2D, Experiment.KO3D, Experiment.KS):
        reference_config = config.model_copy(update={"mode": Mode.SOBOL})
        logger.info("generating %s reference from %d Sobol samples", config.experiment.value, config.samples)
        reference, _ = _run_sampling(reference_config, executor, progress)
    else:
        return None
    _REFERENCE_CACHE[key] = reference
    return reference


def reference_series(config: ExperimentConfig, executor: Executor | None = None,
                     progress: bool = False) -> MomentSeries | None:
    if config.reference == ReferenceKind.NONE:
        return None
    if config.reference == ReferenceKind.FILE:
        return read_moments(config.reference_file)
    return generate_reference(config, executor, progress)


def _errors(series: MomentSeries, reference: MomentSeries | None) -> tuple[float | None, float | None]:
    if reference is None:
        return None, None
    mean_error = relative_error(series, reference, "mean")
    variance_error = relative_error(series, reference, "variance")
    return (None if np.isnan(mean_error) else mean_error,
            None if np.isnan(variance_error) else variance_error)


# =============================================================================
# RUN / COMPARE
# =============================================================================
def run_experiment(config: ExperimentConfig, executor: Executor | None = None,
                   progress: bool = False, with_reference: bool = True) -> ExperimentOutcome:
    """Run one resolved config and compute its errors against the reference."""
    diagnostics: dict[str, float] = {}
    excluded = 0
    result = None

    if config.experiment == Experiment.BURGERS:
        result = _run_burgers(config, progress)
        series = result.series
        n_elements, n_points = len(result.mesh), result.n_points
        diagnostics["total_variation"] = result.total_variation
        diagnostics["shock_fraction"] = result.shock_fraction
    elif config.mode.sampling:
        series, excluded = _run_sampling(config, executor, progress)
        n_elements, n_points = 0, config.samples
    else:
        series, result = _run_random_space(config, executor, progress)
        n_elements, n_points = len(result.mesh), result.n_points

    reference = reference_series(config, executor, progress) if with_reference else None
    mean_error, variance_error = _errors(series, reference)
    splits = result.mesh.splits_per_dimension() if result is not None else []

    summary = RunSummary(
        experiment=config.experiment,
        mode=config.mode,
        label=config.label,
        n_elements=n_elements,
        n_points=n_points,
        steps=int(round(config.t_final / config.dt)),
        t_final=config.t_final,
        max_mean_error=mean_error,
        max_variance_error=variance_error,
        splits_per_dimension=splits,
        excluded_samples=excluded,
        diagnostics=diagnostics,
    )
    return ExperimentOutcome(config=config, series=series, summary=summary, result=result, reference=reference)


def write_outcome(outcome: ExperimentOutcome, output_dir: str | Path | None = None) -> list[Path]:
    """Write every artifact of a run into output_dir (default: config.output_dir/label)."""
    config = outcome.config
    output_dir = Path(output_dir) if output_dir is not None else Path(config.output_dir) / config.label
    paths = [
        write_moments(output_dir, outcome.series),
        write_summary(output_dir, outcome.summary),
        write_config(config, output_dir / "effective_config.toml"),
    ]
    result = outcome.result
    if result is not None:
        paths.extend(write_mesh_snapshots(output_dir, result.snapshots))
        paths.append(write_reports(output_dir, result.reports, result.mesh.dimension))
    if isinstance(result, BurgersResult):
        paths.append(write_solution(output_dir, result.solution))
    return paths


def compare(configs: list[ExperimentConfig], executor: Executor | None = None,
            progress: bool = False) -> tuple[list[ComparisonRow], list[ExperimentOutcome]]:
    """Run every config against one shared reference; one error row per config."""
    if not configs:
        raise ConfigValidationError("compare needs at least one configuration", ["config"])
    experiments = {c.experiment for c in configs}
    if len(experiments) != 1:
        raise ConfigValidationError("compare needs configurations of a single experiment", ["experiment"])
    grids = {(c.dt, c.t_final, c.record_interval) for c in configs}
    if len(grids) != 1:
        raise ConfigValidationError("compare needs a shared time grid (dt, t_final, record_interval)",
                                    ["dt", "t_final", "record_interval"])

    reference = reference_series(configs[0], executor, progress)
    rows = []
    outcomes = []
    for config in configs:
        outcome = run_experiment(config, executor, progress, with_reference=False)
        error = None
        if reference is not None:
            error = relative_error(outcome.series, reference, "variance")
            error = None if np.isnan(error) else error
        outcome.reference = reference
        outcome.summary.max_variance_error = error
        rows.append(ComparisonRow(
            label=config.label,
            method=config.mode,
            n_elements=outcome.summary.n_elements,
            n_points=outcome.summary.n_points,
            error=error,
        ))
        outcomes.append(outcome)
    return rows, outcomes


def write_comparison_table(rows: list[ComparisonRow], output_dir: str | Path) -> Path:
    return write_comparison(Path(output_dir), rows)
