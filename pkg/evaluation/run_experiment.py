"""
Adaptive gPC Experiment Runner

Runs the benchmark experiments (linear ODE, Kraichnan-Orszag 1D/2D/3D,
Kuramoto-Sivashinsky, Burgers) in a chosen mode and writes the artifacts.

Usage:
    python evaluation/run_experiment.py run --experiment ode --mode amr-collocation --p 7 --tol1 0.1
    python evaluation/run_experiment.py run --config configs/experiments.toml --experiment ko1d --dump-mesh-at 10,30
    python evaluation/run_experiment.py compare --config configs/ko1d_compare.toml

Exit codes:
    0  success
    2  invalid configuration (every offending key is listed)
    3  numerical blowup (element and time are printed)
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import settings, validate_settings
from evaluation.experiments import compare, run_experiment, write_comparison_table, write_outcome
from tools.config_file import build_config, load_experiment_configs
from tools.errors import ConfigValidationError, NumericalBlowupError
from tools.structured_outputs import ComparisonRow, ExperimentConfig, RunSummary

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


def _number_list(text: str, cast):
    try:
        return [cast(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got '{text}'") from None


def int_list(text: str) -> list[int]:
    return _number_list(text, int)


def float_list(text: str) -> list[float]:
    return _number_list(text, float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Adaptive multi-element gPC experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=str, help="TOML file with one table per experiment")
        p.add_argument("--experiment", type=str, help="Experiment name (ode, ko1d, ko2d, ko3d, ks, burgers)")
        p.add_argument("--mode", type=str, help="amr-galerkin, amr-collocation, global-gpc, global-collocation, mc, sobol")
        p.add_argument("--p", type=int, help="Full total degree")
        p.add_argument("--p0", type=int, help="Reduced degree")
        p.add_argument("--tol1", type=float, help="Element trigger tolerance")
        p.add_argument("--tol2", type=float, help="Directional trigger tolerance")
        p.add_argument("--criterion", choices=["s1", "s2"], help="Directional criterion")
        p.add_argument("--elements", type=int_list, help="Initial element counts n1[,n2[,n3]]")
        p.add_argument("--dt", type=float, help="Time step")
        p.add_argument("--t-final", type=float, dest="t_final", help="Final time")
        p.add_argument("--samples", type=int, help="Sample count for mc/sobol")
        p.add_argument("--seed", type=int, help="Seed for mc")
        p.add_argument("--workers", type=int, help="Worker threads (default AMR_WORKERS)")
        p.add_argument("--output-dir", type=str, dest="output_dir", help="Output root directory")
        p.add_argument("--quiet", action="store_true", help="Disable progress bars")

    run_parser = sub.add_parser("run", help="Run one experiment and write its artifacts")
    common(run_parser)
    run_parser.add_argument("--label", type=str, help="Run label (output sub-directory)")
    run_parser.add_argument("--dump-mesh-at", type=float_list, dest="dump_mesh_at",
                            help="Mesh snapshot times t1,t2,...")

    compare_parser = sub.add_parser("compare", help="Run every table of a config against one reference")
    common(compare_parser)
    return parser


OVERRIDE_KEYS = (
    "mode", "p", "p0", "tol1", "tol2", "criterion", "elements", "dt", "t_final",
    "samples", "seed", "workers", "output_dir", "label", "dump_mesh_at",
)


def overrides_from(args: argparse.Namespace) -> dict:
    return {key: getattr(args, key, None) for key in OVERRIDE_KEYS}


def load_configs(args: argparse.Namespace) -> list[ExperimentConfig]:
    """Config tables from --config (filtered by --experiment) plus CLI overrides, resolved."""
    overrides = overrides_from(args)
    if args.config:
        configs = load_experiment_configs(args.config, args.experiment, overrides)
    elif args.experiment:
        configs = [build_config({"experiment": args.experiment}, overrides)]
    else:
        raise ConfigValidationError("either --config or --experiment is required", ["experiment"])
    try:
        return [config.resolved() for config in configs]
    except ValueError as exc:
        raise ConfigValidationError(str(exc), ["config"]) from None


def print_summary(summary: RunSummary) -> None:
    """Pretty print one run summary."""
    print("\n" + "=" * 60)
    print(f"📊 {summary.label.upper()}")
    print("=" * 60)
    print(f"  Experiment:   {summary.experiment.value}")
    print(f"  Mode:         {summary.mode.value}")
    print(f"  Elements:     {summary.n_elements}")
    print(f"  Points:       {summary.n_points}")
    print(f"  Steps:        {summary.steps}")
    if summary.max_mean_error is not None:
        print(f"  Mean error:   {summary.max_mean_error:.3e}")
    if summary.max_variance_error is not None:
        print(f"  Var. error:   {summary.max_variance_error:.3e}")
    if summary.splits_per_dimension:
        print(f"  Splits/dim:   {summary.splits_per_dimension}")
    if summary.excluded_samples:
        print(f"⚠️  Excluded samples: {summary.excluded_samples}")
    for name, value in summary.diagnostics.items():
        print(f"  {name}: {value:.6g}")


def print_comparison(rows: list[ComparisonRow]) -> None:
    print("\n" + "-" * 60)
    print("📈 MAXIMUM RELATIVE VARIANCE ERROR")
    print("-" * 60)
    for row in rows:
        error = "n/a" if row.error is None else f"{row.error:.3e}"
        print(f"  {row.label:28s} {row.method.value:20s} N={row.n_elements:<6d} pts={row.n_points:<8d} {error}")


def cmd_run(args: argparse.Namespace, executor: ThreadPoolExecutor) -> int:
    configs = load_configs(args)
    for config in configs:
        print(f"🚀 Running {config.label} ({config.experiment.value}, {config.mode.value}, p={config.p})...")
        outcome = run_experiment(config, executor, progress=not args.quiet)
        paths = write_outcome(outcome)
        print(f"✓ Wrote {len(paths)} files to {paths[0].parent}")
        print_summary(outcome.summary)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, executor: ThreadPoolExecutor) -> int:
    configs = load_configs(args)
    print(f"📂 Comparing {len(configs)} configurations of {configs[0].experiment.value}...")
    rows, outcomes = compare(configs, executor, progress=not args.quiet)
    for outcome in outcomes:
        write_outcome(outcome)
    path = write_comparison_table(rows, configs[0].output_dir)
    print_comparison(rows)
    print(f"\n✓ Comparison saved to {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    for problem in validate_settings():
        print(f"⚠️  {problem}")

    workers = args.workers or settings.AMR_WORKERS
    try:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            if args.command == "run":
                status = cmd_run(args, executor)
            else:
                status = cmd_compare(args, executor)
    except ConfigValidationError as exc:
        print(f"❌ Invalid configuration: {exc}")
        print(f"   Offending keys: {', '.join(exc.keys) or '-'}")
        return EXIT_CONFIG
    except NumericalBlowupError as exc:
        print(f"❌ Numerical blowup: {exc}")
        print(f"   element={exc.element_id} t={exc.time}")
        return EXIT_BLOWUP

    print("✅ Done")
    return status


if __name__ == "__main__":
    sys.exit(main())
