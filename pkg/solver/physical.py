"""
Physical-space refinement for 1D inviscid Burgers.

The same energy-transfer indicator drives the splits, computed from the
element-local Legendre expansion of u in x. Elements of (-1, 1) are the cells
of an ElementMesh; the mesh's "probability" of a cell is its width / 2, so the
moment assembly gives the spatial mean (1/2) int u dx.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import settings
from evaluation.metrics.moments import MomentSeries, is_record_step, record_schedule
from mesh.elements import Element, ElementMesh, assemble_moment, mesh_snapshot
from models.burgers import initial_condition, total_variation
from propagation.physical import burgers_rk4_step, ordered_elements
from refinement.indicators import burgers_transfer_terms, directional_s2, indicator_q
from refinement.refine import refine_step
from refinement.transfer import transfer_children
from solver.adaptive import SolverResult, snapshot_due
from spectral.discretization import LocalDiscretization
from tools.structured_outputs import (
    PropagationConfig,
    PropagationMode,
    ReducedOrderPolicy,
    RefinementReport,
    Tolerances,
)

logger = logging.getLogger(__name__)

GLOBAL_POINTS = 256
SHOCK_LOCATIONS = (-0.5, 0.5)


def cfl_min_width(p: int, dt: float, u_max: float, cfl: float | None = None) -> float:
    """Narrowest element that keeps (2p + 1) u_max dt / h below the CFL number."""
    cfl = settings.CFL_NUMBER if cfl is None else cfl
    return (2 * p + 1) * dt * max(u_max, 1e-12) / cfl


@dataclass
class BurgersResult(SolverResult):
    """SolverResult plus the final nodal solution and its total variation."""
    solution: pd.DataFrame = field(default_factory=pd.DataFrame)
    total_variation: float = 0.0
    shock_fraction: float = 0.0


class BurgersSolver:
    """Nodal elements of (-1, 1) with upwind coupling and optional refinement."""

    def __init__(
        self,
        mesh: ElementMesh,
        p: int,
        policy: ReducedOrderPolicy | None = None,
        tolerances: Tolerances | None = None,
        threshold: float | None = None,
    ):
        if mesh.dimension != 1:
            raise ValueError("Burgers refinement works on 1D meshes")
        self.mesh = mesh
        self.p = p
        self.policy = policy
        self.tolerances = tolerances
        self.threshold = settings.BLOWUP_THRESHOLD if threshold is None else threshold
        self.disc = LocalDiscretization(1, p, r=p + 1)
        self.values: dict[int, np.ndarray] = {}
        for element in mesh.elements:
            self.values[element.id] = initial_condition(self.disc.global_nodes(element)[:, 0])
        self.min_width: float | None = None

    @property
    def adaptive(self) -> bool:
        return self.policy is not None and self.tolerances is not None

    @property
    def n_points(self) -> int:
        return len(self.mesh) * self.disc.n_nodes

    def _ordered(self) -> tuple[list[Element], np.ndarray, np.ndarray]:
        elements = ordered_elements(self.mesh)
        values = np.stack([self.values[e.id] for e in elements])
        widths = np.array([e.width[0] for e in elements])
        return elements, values, widths

    def step(self, t: float, dt: float) -> None:
        elements, values, widths = self._ordered()
        values = burgers_rk4_step(values, widths, [e.id for e in elements], t, dt, self.threshold)
        self.values = {e.id: values[k] for k, e in enumerate(elements)}

    # RefinableSystem
    def indicators(self, t: float) -> dict[int, tuple[float, np.ndarray]]:
        elements, values, widths = self._ordered()
        terms = burgers_transfer_terms(values, widths, self.disc, self.policy)
        weights = np.ones(1)
        _, q_bold = indicator_q(terms, weights)
        s = directional_s2(terms, self.disc.index_set, self.policy.p0, weights)
        return {e.id: (float(q_bold[k]), s[k]) for k, e in enumerate(elements)}

    def transfer(self, parent: Element, children: list[Element]) -> None:
        parent_values = self.values.pop(parent.id)[:, None, None]
        child_values = transfer_children(parent, children, parent_values, self.disc, PropagationMode.COLLOCATION)
        for child_id, values in child_values.items():
            self.values[child_id] = values[:, 0, 0]

    def refine(self, t: float, dt: float) -> RefinementReport:
        u_max = max(float(np.max(np.abs(v))) for v in self.values.values())
        self.min_width = cfl_min_width(self.p, dt, u_max)
        tolerances = self.tolerances.model_copy(update={"min_width": self.min_width})
        return refine_step(self.mesh, self, tolerances, t)

    def global_moments(self) -> tuple[np.ndarray, np.ndarray]:
        weights = self.disc.weights
        mean_k = {i: np.array([[weights @ v]]) for i, v in self.values.items()}
        second_k = {i: np.array([[weights @ (v * v)]]) for i, v in self.values.items()}
        mean = assemble_moment(self.mesh, mean_k, 1)
        second = assemble_moment(self.mesh, second_k, 1)
        return mean, second - mean ** 2

    def solution(self) -> pd.DataFrame:
        """Nodal solution sorted by x."""
        elements = ordered_elements(self.mesh)
        x = np.concatenate([self.disc.global_nodes(e)[:, 0] for e in elements])
        u = np.concatenate([self.values[e.id] for e in elements])
        element_ids = np.concatenate([[e.id] * self.disc.n_nodes for e in elements])
        return pd.DataFrame({"x": x, "u": u, "element": element_ids})

    def total_variation(self) -> float:
        return total_variation(self.solution()["u"].to_numpy())

    def shock_fraction(self, half_width: float = 0.15) -> float:
        """Fraction of elements whose center lies within half_width of x = +-0.5."""
        centers = np.array([e.center[0] for e in self.mesh.elements])
        near = np.zeros(centers.size, dtype=bool)
        for location in SHOCK_LOCATIONS:
            near |= np.abs(centers - location) < half_width
        return float(np.mean(near))

    def run(
        self,
        dt: float,
        t_final: float,
        check_interval: int = 10,
        record_interval: float | None = None,
        dump_mesh_at: list[float] | None = None,
        report_interval: int = 1,
        progress: bool = False,
    ) -> BurgersResult:
        stepping = PropagationConfig(mode=PropagationMode.COLLOCATION, dt=dt, t_final=t_final,
                                     check_interval=check_interval)
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

        for step in tqdm(range(1, n_steps + 1), desc="burgers", disable=not progress):
            t = step * dt
            self.step((step - 1) * dt, dt)
            if self.adaptive and step % stepping.check_interval == 0:
                report = self.refine(t, dt)
                if checks % report_interval == 0:
                    reports.append(report)
                checks += 1
            if is_record_step(step, n_steps, every):
                mean, variance = self.global_moments()
                records.append((t, mean, variance))
            for when in snapshot_due(t, dt, dump_times):
                snapshots[when] = mesh_snapshot(self.mesh)

        logger.info("burgers finished: %d elements, TV=%.6g", len(self.mesh), self.total_variation())
        return BurgersResult(
            series=MomentSeries.from_records(records, ["u"]),
            mesh=self.mesh,
            reports=reports,
            snapshots=snapshots,
            steps=n_steps,
            n_points=self.n_points,
            solution=self.solution(),
            total_variation=self.total_variation(),
            shock_fraction=self.shock_fraction(),
        )
