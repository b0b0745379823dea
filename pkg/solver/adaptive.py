"""
Adaptive multi-element solver in random space.

Owns the mesh, the stacked element states and the time loop:

    for every step:
        propagate all elements (collocation nodes or Galerkin coefficients)
        every check_interval steps: refine_step (indicators, splits, transfer)
        at record times: assemble global mean and variance

With refinement disabled it is the global (fixed-mesh) gPC / collocation method.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import settings
from evaluation.metrics.moments import MomentSeries, is_record_step, record_schedule
from mesh.elements import Element, ElementMesh, assemble_moment, mesh_snapshot
from models.base_model import StochasticModel
from propagation.stochastic import evolve_batch
from refinement.indicators import directional, element_transfer_terms, indicator_q, projected_rate
from refinement.refine import refine_step
from refinement.transfer import transfer_children
from spectral.discretization import LocalDiscretization
from tools.structured_outputs import (
    IndicatorVariant,
    PropagationConfig,
    PropagationMode,
    ReducedOrderPolicy,
    RefinementReport,
    Tolerances,
)

logger = logging.getLogger(__name__)


@dataclass
class SolverResult:
    """Everything a run produces besides the final mesh state."""
    series: MomentSeries
    mesh: ElementMesh
    reports: list[RefinementReport] = field(default_factory=list)
    snapshots: dict[float, pd.DataFrame] = field(default_factory=dict)
    steps: int = 0
    n_points: int = 0


def snapshot_due(t: float, dt: float, dump_times: list[float]) -> list[float]:
    """Requested dump times that fall on the step ending at t."""
    return [d for d in dump_times if abs(t - d) <= 0.5 * dt]


class AdaptiveSolver:
    """Multi-element gPC (Galerkin) or probabilistic collocation on an ElementMesh."""

    def __init__(
        self,
        model: StochasticModel,
        mesh: ElementMesh,
        mode: PropagationMode,
        p: int,
        policy: ReducedOrderPolicy | None = None,
        tolerances: Tolerances | None = None,
        over_integration: float = 1.0,
        executor: Executor | None = None,
        workers: int = 1,
        threshold: float | None = None,
    ):
        if mesh.dimension != model.dimension:
            raise ValueError(f"mesh dimension {mesh.dimension} does not match model dimension {model.dimension}")
        self.model = model
        self.mesh = mesh
        self.mode = mode
        self.policy = policy
        self.tolerances = tolerances
        self.executor = executor
        self.workers = workers
        self.threshold = settings.BLOWUP_THRESHOLD if threshold is None else threshold
        self.disc = LocalDiscretization(model.dimension, p, over_integration=over_integration)

        self.two_system = policy is not None and policy.variant == IndicatorVariant.TWO
        self.reduced_disc = None
        if self.two_system and mode == PropagationMode.COLLOCATION:
            self.reduced_disc = LocalDiscretization(model.dimension, policy.p0, r=policy.p0 + 1)

        self.ids: list[int] = []
        self.states = np.empty(0)
        self.nodes = np.empty(0)
        self.reduced_states: np.ndarray | None = None
        self.reduced_nodes: np.ndarray | None = None
        self._position: dict[int, int] = {}
        self._pending: dict[int, np.ndarray] = {}
        self._pending_reduced: dict[int, np.ndarray] = {}
        self.initialize()

    def __repr__(self) -> str:
        return f"AdaptiveSolver(model={self.model.name}, mode={self.mode.value}, elements={len(self.mesh)})"

    @property
    def adaptive(self) -> bool:
        return self.policy is not None and self.tolerances is not None

    @property
    def n_points(self) -> int:
        return len(self.mesh) * self.disc.n_nodes

    # =========================================================================
    # STATE
    # =========================================================================
    def _initial(self, element: Element) -> tuple[np.ndarray, np.ndarray | None]:
        nodes = self.disc.global_nodes(element)
        values = self.model.initial_state(nodes)
        state = values if self.mode == PropagationMode.COLLOCATION else self.disc.project(values)
        reduced = None
        if self.two_system:
            if self.reduced_disc is not None:
                reduced = self.model.initial_state(self.reduced_disc.global_nodes(element))
            else:
                reduced = self.disc.project(values, n_basis=self.disc.index_set.reduced_size(self.policy.p0))
        return state, reduced

    def initialize(self) -> None:
        """Assign initial states to every live element."""
        self._pending.clear()
        self._pending_reduced.clear()
        for element in self.mesh.elements:
            state, reduced = self._initial(element)
            self._pending[element.id] = state
            if reduced is not None:
                self._pending_reduced[element.id] = reduced
        self.ids = []
        self._rebuild()

    def _rebuild(self) -> None:
        """Re-stack element arrays after splits (live ids in id order)."""
        old_position = self._position
        old_states = self.states
        old_reduced = self.reduced_states
        ids = self.mesh.ids

        def pick(element_id: int, pending: dict, old: np.ndarray | None) -> np.ndarray:
            if element_id in pending:
                return pending[element_id]
            return old[old_position[element_id]]

        self.states = np.stack([pick(i, self._pending, old_states) for i in ids])
        if self.two_system:
            self.reduced_states = np.stack([pick(i, self._pending_reduced, old_reduced) for i in ids])
        self.nodes = np.stack([self.disc.global_nodes(self.mesh.get(i)) for i in ids])
        if self.reduced_disc is not None:
            self.reduced_nodes = np.stack([self.reduced_disc.global_nodes(self.mesh.get(i)) for i in ids])
        self.ids = ids
        self._position = {element_id: k for k, element_id in enumerate(ids)}
        self._pending.clear()
        self._pending_reduced.clear()

    def state_of(self, element_id: int) -> np.ndarray:
        return self.states[self._position[element_id]]

    def coefficients(self) -> np.ndarray:
        """gPC coefficients of every element, (K, v, x, b)."""
        if self.mode == PropagationMode.GALERKIN:
            return self.states
        return self.disc.project(self.states)

    # =========================================================================
    # PROPAGATION
    # =========================================================================
    def step(self, t: float, dt: float) -> None:
        """Advance every element from t to t + dt."""
        self.states = evolve_batch(
            self.mode, self.model, self.disc, self.states, self.nodes, self.ids,
            t, dt, self.threshold, self.executor, self.workers,
        )
        if not self.two_system:
            return
        if self.reduced_disc is not None:
            self.reduced_states = evolve_batch(
                PropagationMode.COLLOCATION, self.model, self.reduced_disc, self.reduced_states,
                self.reduced_nodes, self.ids, t, dt, self.threshold, self.executor, self.workers,
            )
        else:
            self.reduced_states = evolve_batch(
                PropagationMode.GALERKIN, self.model, self.disc, self.reduced_states,
                self.nodes, self.ids, t, dt, self.threshold, self.executor, self.workers,
            )

    # =========================================================================
    # REFINEMENT (RefinableSystem)
    # =========================================================================
    def _chunked(self, fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
        k = len(self.ids)
        chunks = [c for c in np.array_split(np.arange(k), max(1, self.workers)) if c.size]
        if self.executor is None or len(chunks) == 1:
            return fn(np.arange(k))
        parts = list(self.executor.map(fn, chunks))
        return (np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))

    def _reduced_pair(self, chunk: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray] | None:
        if not self.two_system:
            return None
        reduced = self.reduced_states[chunk]
        if self.reduced_disc is not None:
            rate = projected_rate(self.model, self.reduced_disc, t, self.reduced_nodes[chunk],
                                  reduced, self.reduced_disc.n_basis)
            return self.reduced_disc.project(reduced), rate
        values = self.disc.evaluate(reduced)
        rate = projected_rate(self.model, self.disc, t, self.nodes[chunk], values, reduced.shape[-1])
        return reduced, rate

    def indicator_arrays(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Qbold (K,) and the directional criterion (K, d) of every element."""
        weights = self.model.spatial_weights
        criterion = self.tolerances.criterion if self.tolerances is not None else None

        def compute(chunk: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            states = self.states[chunk]
            if self.mode == PropagationMode.COLLOCATION:
                coefficients, full_values = self.disc.project(states), states
            else:
                coefficients, full_values = states, None
            terms = element_transfer_terms(
                self.model, self.disc, self.policy, t, self.nodes[chunk], coefficients,
                full_values=full_values, reduced=self._reduced_pair(chunk, t),
            )
            _, q_bold = indicator_q(terms, weights)
            s = directional(terms, self.disc.index_set, self.policy.p0, weights, criterion)
            return q_bold, s

        return self._chunked(compute)

    def indicators(self, t: float) -> dict[int, tuple[float, np.ndarray]]:
        q_bold, s = self.indicator_arrays(t)
        return {element_id: (float(q_bold[k]), s[k]) for k, element_id in enumerate(self.ids)}

    def transfer(self, parent: Element, children: list[Element]) -> None:
        k = self._position[parent.id]
        self._pending.update(transfer_children(parent, children, self.states[k], self.disc, self.mode))
        if not self.two_system:
            return
        if self.reduced_disc is not None:
            self._pending_reduced.update(transfer_children(
                parent, children, self.reduced_states[k], self.reduced_disc, PropagationMode.COLLOCATION,
            ))
        else:
            self._pending_reduced.update(transfer_children(
                parent, children, self.reduced_states[k], self.disc, PropagationMode.GALERKIN,
            ))

    def refine(self, t: float) -> RefinementReport:
        report = refine_step(self.mesh, self, self.tolerances, t)
        if report.n_splits:
            self._rebuild()
        return report

    # =========================================================================
    # MOMENTS
    # =========================================================================
    def conditional_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """E[u | B_k] and E[u^2 | B_k] per element, each (K, v, x)."""
        if self.mode == PropagationMode.COLLOCATION:
            return self.disc.conditional_moments(self.states)
        return self.states[..., 0], np.sum(self.states ** 2, axis=-1)

    def global_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Global mean and variance, each (v, x)."""
        mean_k, second_k = self.conditional_moments()
        mean = assemble_moment(self.mesh, dict(zip(self.ids, mean_k)), 1)
        second = assemble_moment(self.mesh, dict(zip(self.ids, second_k)), 1)
        return mean, second - mean ** 2

    # =========================================================================
    # TIME LOOP
    # =========================================================================
    def run(
        self,
        dt: float,
        t_final: float,
        check_interval: int = 1,
        record_interval: float | None = None,
        dump_mesh_at: list[float] | None = None,
        report_interval: int = 1,
        progress: bool = False,
    ) -> SolverResult:
        """Integrate to t_final; refine every check_interval steps when adaptive."""
        stepping = PropagationConfig(mode=self.mode, dt=dt, t_final=t_final, check_interval=check_interval)
        n_steps = stepping.n_steps
        _, every = record_schedule(dt, t_final, record_interval or dt)
        dump_times = sorted(dump_mesh_at or [])
        snapshots: dict[float, pd.DataFrame] = {}
        reports: list[RefinementReport] = []
        checks = 0

        mean, variance = self.global_moments()
        records = [(0.0, mean, variance)]
        for when in snapshot_due(0.0, dt, dump_times):
            snapshots[when] = mesh_snapshot(self.mesh)

        label = f"{self.model.name} {self.mode.value}"
        for step in tqdm(range(1, n_steps + 1), desc=label, disable=not progress):
            t = step * dt
            self.step((step - 1) * dt, dt)

            if self.adaptive and step % stepping.check_interval == 0:
                report = self.refine(t)
                if checks % report_interval == 0:
                    reports.append(report)
                checks += 1

            if is_record_step(step, n_steps, every):
                mean, variance = self.global_moments()
                records.append((t, mean, variance))
            for when in snapshot_due(t, dt, dump_times):
                snapshots[when] = mesh_snapshot(self.mesh)

        logger.info("%s finished: %d elements, %d points, %d splits",
                    label, len(self.mesh), self.n_points, len(self.mesh.history))
        return SolverResult(
            series=MomentSeries.from_records(records, self.model.variable_names),
            mesh=self.mesh,
            reports=reports,
            snapshots=snapshots,
            steps=n_steps,
            n_points=self.n_points,
        )
