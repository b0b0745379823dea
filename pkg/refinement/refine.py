"""
Mesh refinement step.

For every live element:
1. Q_hat = Qbold * Prob(B_k); nothing happens when Q_hat < TOL1 (or Qbold < TOL1
   when the tolerances do not weight by probability).
2. d = 1: bisect. d >= 2: bisect along every dimension i with
   s_i >= TOL2 * max_j s_j (2^m children for m selected dimensions).
3. The children receive the parent state through the system's transfer.

Splits that would exceed max_depth, max_elements or the minimum element width
are skipped and logged.
"""

import logging
from typing import Protocol

import numpy as np

from mesh.elements import Element, ElementMesh
from tools.errors import IncompleteInputError
from tools.structured_outputs import ElementIndicators, RefinementReport, Tolerances

logger = logging.getLogger(__name__)


class RefinableSystem(Protocol):
    """Element states that can report indicators and follow splits."""

    def indicators(self, t: float) -> dict[int, tuple[float, np.ndarray]]:
        """Qbold and the directional values (length d) per live element id."""

    def transfer(self, parent: Element, children: list[Element]) -> None:
        """Move the parent's state onto its children."""


def select_split_dims(s: np.ndarray, tol2: float) -> list[int]:
    """Dimensions whose criterion reaches tol2 times the maximum (inclusive)."""
    s = np.asarray(s, dtype=float)
    if s.size == 1:
        return [0]
    threshold = tol2 * float(np.max(s))
    return [int(i) for i in np.flatnonzero(s >= threshold)]


def _guard(element: Element, dims: list[int], n_live: int, tolerances: Tolerances) -> str | None:
    if any(element.depth[dim] + 1 > tolerances.max_depth for dim in dims):
        return "max_depth"
    if n_live - 1 + 2 ** len(dims) > tolerances.max_elements:
        return "max_elements"
    if tolerances.min_width is not None and any(
        element.width[dim] / 2.0 < tolerances.min_width for dim in dims
    ):
        return "min_width"
    return None


def refine_step(
    mesh: ElementMesh,
    system: RefinableSystem,
    tolerances: Tolerances,
    t: float = 0.0,
) -> RefinementReport:
    """Evaluate indicators on every live element, split the triggered ones."""
    values = system.indicators(t)
    missing = [element_id for element_id in mesh.ids if element_id not in values]
    if missing:
        raise IncompleteInputError(f"no indicator values for elements {missing}")

    report = RefinementReport(time=t, criterion=tolerances.criterion)
    skipped: dict[str, int] = {}

    for element in mesh.elements:
        q_bold, s = values[element.id]
        q_bold = float(q_bold)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        entry = ElementIndicators(
            element_id=element.id,
            q=q_bold,
            q_hat=q_bold * element.probability,
            s=s.tolist(),
        )
        report.elements.append(entry)

        if not tolerances.trigger(q_bold, element.probability) >= tolerances.tol1:
            continue

        dims = select_split_dims(s, tolerances.tol2) if mesh.dimension > 1 else [0]
        reason = _guard(element, dims, len(mesh), tolerances)
        if reason is not None:
            entry.skipped_reason = reason
            skipped[reason] = skipped.get(reason, 0) + 1
            continue

        child_ids = mesh.split(element.id, dims, time=t)
        system.transfer(element, [mesh.get(child_id) for child_id in child_ids])
        entry.split = True
        entry.split_dims = dims
        entry.child_ids = child_ids

    if skipped:
        logger.warning("t=%.6g: skipped splits %s", t, skipped)
    if report.n_splits:
        logger.info("t=%.6g: split %d element(s), %d live", t, report.n_splits, len(mesh))
    return report
