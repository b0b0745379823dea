"""
Structured Outputs - Pydantic Schemas for Runs, Policies and Reports

Defines the structured format for:
- Experiment configuration (validated, unknown keys rejected)
- Refinement policy and tolerances
- Per-check refinement reports and split events
- Run summaries and comparison rows
"""

import math
from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import settings


# =============================================================================
# ENUMS
# =============================================================================
class Experiment(str, Enum):
    ODE = "ode"
    KO1D = "ko1d"
    KO2D = "ko2d"
    KO3D = "ko3d"
    KS = "ks"
    BURGERS = "burgers"


class Mode(str, Enum):
    AMR_GALERKIN = "amr-galerkin"
    AMR_COLLOCATION = "amr-collocation"
    GLOBAL_GPC = "global-gpc"
    GLOBAL_COLLOCATION = "global-collocation"
    MC = "mc"
    SOBOL = "sobol"

    @property
    def propagation(self) -> "PropagationMode | None":
        if self in (Mode.AMR_GALERKIN, Mode.GLOBAL_GPC):
            return PropagationMode.GALERKIN
        if self in (Mode.AMR_COLLOCATION, Mode.GLOBAL_COLLOCATION):
            return PropagationMode.COLLOCATION
        return None

    @property
    def adaptive(self) -> bool:
        return self in (Mode.AMR_GALERKIN, Mode.AMR_COLLOCATION)

    @property
    def sampling(self) -> bool:
        return self in (Mode.MC, Mode.SOBOL)


class PropagationMode(str, Enum):
    GALERKIN = "galerkin"
    COLLOCATION = "collocation"


class Criterion(str, Enum):
    S1 = "s1"
    S2 = "s2"


class IndicatorVariant(str, Enum):
    SINGLE = "single-system"
    TWO = "two-system"


class ReferenceKind(str, Enum):
    EXACT = "exact"
    FILE = "file"
    GENERATE = "generate"
    NONE = "none"


# =============================================================================
# REFINEMENT POLICY
# =============================================================================
def default_reduced_degree(p: int) -> int:
    """p0 = ceil((p + 1) / 2), kept strictly below p."""
    return min(math.ceil((p + 1) / 2), p - 1)


class ReducedOrderPolicy(BaseModel):
    """Full and reduced total degrees used by the energy-transfer indicator."""
    p: int = Field(ge=1, description="Full total degree")
    p0: int = Field(ge=0, description="Reduced total degree")
    variant: IndicatorVariant = IndicatorVariant.SINGLE

    @model_validator(mode="after")
    def _reduced_below_full(self) -> "ReducedOrderPolicy":
        if self.p0 >= self.p:
            raise ValueError(f"p0={self.p0} must be below p={self.p}")
        return self

    @classmethod
    def for_degree(
        cls,
        p: int,
        p0: int | None = None,
        variant: IndicatorVariant = IndicatorVariant.SINGLE,
    ) -> "ReducedOrderPolicy":
        return cls(p=p, p0=default_reduced_degree(p) if p0 is None else p0, variant=variant)


class Tolerances(BaseModel):
    """Trigger tolerances and runaway guards for refine_step."""
    tol1: float = Field(gt=0, description="Element trigger on Q * Prob(B_k), or on Q when not weighted")
    tol2: float = Field(default=0.1, gt=0, le=1, description="Directional trigger relative to the max")
    criterion: Criterion = Criterion.S2
    max_depth: int = Field(default_factory=lambda: settings.MAX_DEPTH, ge=1)
    max_elements: int = Field(default_factory=lambda: settings.MAX_ELEMENTS, ge=1)
    min_width: float | None = Field(default=None, gt=0, description="Children narrower than this are not created")
    weight_by_probability: bool = Field(default=True, description="Compare Q * Prob(B_k) rather than Q against tol1")

    def trigger(self, q: float, probability: float) -> float:
        return q * probability if self.weight_by_probability else q


class PropagationConfig(BaseModel):
    """Time stepping parameters of one run."""
    mode: PropagationMode
    dt: float = Field(gt=0)
    t_final: float = Field(gt=0)
    check_interval: int = Field(default=1, ge=1, description="Steps between refinement checks")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


# =============================================================================
# REPORTS
# =============================================================================
class SplitEvent(BaseModel):
    """One entry of the mesh history log."""
    time: float
    parent_id: int
    dims: list[int]
    child_ids: list[int]


class ElementIndicators(BaseModel):
    """Indicator values and decision for one element at one check."""
    element_id: int
    q: float = Field(ge=0, description="Spatially integrated |Q|")
    q_hat: float = Field(ge=0, description="Q * Prob(B_k)")
    s: list[float] = Field(default_factory=list, description="Directional criterion per dimension")
    split: bool = False
    split_dims: list[int] = Field(default_factory=list)
    child_ids: list[int] = Field(default_factory=list)
    skipped_reason: str | None = None


class RefinementReport(BaseModel):
    """Everything refine_step computed and decided at one check time."""
    time: float
    criterion: Criterion = Criterion.S2
    elements: list[ElementIndicators] = Field(default_factory=list)

    @property
    def n_splits(self) -> int:
        return sum(1 for e in self.elements if e.split)


# =============================================================================
# EXPERIMENT CONFIGURATION
# =============================================================================
PROBLEM_SEPARATOR = "; "

EXPERIMENT_DIMENSIONS = {
    Experiment.ODE: 1,
    Experiment.KO1D: 1,
    Experiment.KO2D: 2,
    Experiment.KO3D: 3,
    Experiment.KS: 1,
    Experiment.BURGERS: 1,
}

EXPERIMENT_DEFAULTS: dict[Experiment, dict] = {
    Experiment.ODE: {"p": 5, "elements": [1], "dt": 0.01, "t_final": 10.0,
                     "check_interval": 1, "record_interval": 0.1, "weight_by_probability": False},
    Experiment.KO1D: {"p": 9, "elements": [2], "dt": 0.01, "t_final": 30.0,
                      "check_interval": 1, "record_interval": 0.1},
    Experiment.KO2D: {"p": 7, "elements": [2, 2], "dt": 0.01, "t_final": 10.0,
                      "check_interval": 1, "record_interval": 0.1},
    Experiment.KO3D: {"p": 5, "elements": [2, 2, 2], "dt": 0.01, "t_final": 6.0,
                      "check_interval": 1, "record_interval": 0.1},
    Experiment.KS: {"p": 11, "elements": [32], "dt": 1e-3, "t_final": 10.0,
                    "check_interval": 10, "record_interval": 0.1},
    Experiment.BURGERS: {"p": 5, "elements": [8], "dt": 1e-5, "t_final": 0.1592,
                         "check_interval": 10, "record_interval": 0.01},
}


# single-element 256-point collocation baseline
BURGERS_GLOBAL_DEFAULTS = {"p": 255, "elements": [1]}

class ExperimentConfig(BaseModel):
    """Input schema for one experiment run (file section plus CLI overrides)."""
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    experiment: Experiment
    mode: Mode = Mode.AMR_COLLOCATION
    label: str | None = None

    # Discretization
    p: int | None = Field(default=None, ge=0, description="Full total degree")
    p0: int | None = Field(default=None, ge=0, description="Reduced degree (default ceil((p+1)/2))")
    variant: IndicatorVariant = IndicatorVariant.SINGLE
    elements: list[Annotated[int, Field(ge=1)]] | None = None
    over_integration: float | None = Field(default=None, ge=1.0)

    # Refinement
    tol1: float = Field(default=1e-2, gt=0)
    tol2: float = Field(default=0.1, gt=0, le=1)
    criterion: Criterion = Criterion.S2
    max_depth: int | None = Field(default=None, ge=1)
    max_elements: int | None = Field(default=None, ge=1)
    weight_by_probability: bool | None = Field(default=None, description="Default: false for ode, true otherwise")

    # Time stepping
    dt: float | None = Field(default=None, gt=0)
    t_final: float | None = Field(default=None, gt=0)
    check_interval: int | None = Field(default=None, ge=1)
    record_interval: float | None = Field(default=None, gt=0)
    report_interval: int = Field(default=1, ge=1, description="Checks between stored refinement reports")

    # Sampling / reference
    seed: int = Field(default=0, ge=0)
    samples: int | None = Field(default=None, ge=1)
    reference: ReferenceKind = ReferenceKind.GENERATE
    reference_file: str | None = None

    # Output
    output_dir: str | None = None
    dump_mesh_at: list[Annotated[float, Field(ge=0)]] = Field(default_factory=list)
    workers: int | None = Field(default=None, ge=1)

    @field_validator("tol1")
    @classmethod
    def _tol1_not_nan(cls, value: float) -> float:
        if math.isnan(value):
            raise ValueError("tol1 must be a number")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        problems = self.problems()
        if problems:
            raise ValueError(PROBLEM_SEPARATOR.join(f"{key}: {message}" for key, message in problems))
        return self

    def problems(self) -> list[tuple[str, str]]:
        """Cross-field problems as (key, message) pairs."""
        problems = []
        d = EXPERIMENT_DIMENSIONS[self.experiment]
        if self.elements is not None and len(self.elements) != d:
            problems.append(("elements", f"needs {d} count(s) for experiment '{self.experiment.value}'"))
        if self.experiment == Experiment.KS and self.mode.propagation == PropagationMode.GALERKIN:
            problems.append(("mode", "ks supports collocation and sampling modes only"))
        if self.experiment == Experiment.BURGERS and self.mode not in (Mode.AMR_COLLOCATION, Mode.GLOBAL_COLLOCATION):
            problems.append(("mode", "burgers runs with amr-collocation or global-collocation only"))
        if self.reference == ReferenceKind.FILE and not self.reference_file:
            problems.append(("reference_file", "required when reference = 'file'"))
        if self.reference == ReferenceKind.EXACT and self.experiment != Experiment.ODE:
            problems.append(("reference", "an exact reference exists only for the ode experiment"))
        if self.mode.adaptive and self.p is not None and self.p < 1:
            problems.append(("p", "adaptive modes need p >= 1"))
        if self.p is not None and self.p0 is not None and self.p0 >= self.p:
            problems.append(("p0", "must be below p"))
        return problems

    @property
    def dimension(self) -> int:
        return EXPERIMENT_DIMENSIONS[self.experiment]

    def resolved(self) -> "ExperimentConfig":
        """Return a copy with every experiment/settings default filled in."""
        defaults = dict(EXPERIMENT_DEFAULTS[self.experiment])
        if self.experiment == Experiment.BURGERS and not self.mode.adaptive:
            defaults.update(BURGERS_GLOBAL_DEFAULTS)
        updates = {}
        for key, value in defaults.items():
            if getattr(self, key) is None:
                updates[key] = value
        if self.weight_by_probability is None:
            updates.setdefault("weight_by_probability", True)
        if self.over_integration is None:
            updates["over_integration"] = settings.OVER_INTEGRATION
        if self.max_depth is None:
            updates["max_depth"] = settings.MAX_DEPTH
        if self.max_elements is None:
            updates["max_elements"] = settings.MAX_ELEMENTS
        if self.samples is None:
            updates["samples"] = settings.REFERENCE_SAMPLES
        if self.workers is None:
            updates["workers"] = settings.AMR_WORKERS
        if self.output_dir is None:
            updates["output_dir"] = settings.OUTPUT_DIR
        if self.label is None:
            updates["label"] = f"{self.experiment.value}-{self.mode.value}"
        resolved = self.model_copy(update=updates)
        if resolved.mode.adaptive and resolved.p0 is None:
            resolved = resolved.model_copy(update={"p0": default_reduced_degree(resolved.p)})
        return ExperimentConfig.model_validate(resolved.model_dump())

    def policy(self) -> ReducedOrderPolicy:
        return ReducedOrderPolicy.for_degree(self.p, self.p0, self.variant)

    def tolerances(self, min_width: float | None = None) -> Tolerances:
        return Tolerances(
            tol1=self.tol1,
            tol2=self.tol2,
            criterion=self.criterion,
            max_depth=self.max_depth or settings.MAX_DEPTH,
            max_elements=self.max_elements or settings.MAX_ELEMENTS,
            min_width=min_width,
            weight_by_probability=True if self.weight_by_probability is None else self.weight_by_probability,
        )


# =============================================================================
# RUN SUMMARY
# =============================================================================
class RunSummary(BaseModel):
    """Summary written as summary.json at the end of a run."""
    experiment: Experiment
    mode: Mode
    label: str
    n_elements: int = Field(ge=0)
    n_points: int = Field(ge=0, description="Collocation points / quadrature nodes / samples")
    steps: int = Field(ge=0)
    t_final: float
    max_mean_error: float | None = None
    max_variance_error: float | None = None
    splits_per_dimension: list[int] = Field(default_factory=list)
    excluded_samples: int = Field(default=0, ge=0)
    diagnostics: dict[str, float] = Field(default_factory=dict)


class ComparisonRow(BaseModel):
    """One row of the compare error table."""
    label: str
    method: Mode
    n_elements: int
    n_points: int
    error: float | None
