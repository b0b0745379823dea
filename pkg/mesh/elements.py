"""
Element Mesh - Hypercube decomposition of the random (or physical) space.

The root domain is [-1, 1]^d with the uniform measure. Elements use the
half-open convention [a, b) per dimension, except that the right edge of the
root domain (b = 1) is closed, so every point of the root domain belongs to
exactly one live element.

Usage:
    mesh = decompose_uniform(2, [2, 2])
    eid = locate(mesh, np.array([0.3, -0.7]))
    children = split_element(mesh, eid, {0, 1}, time=0.5)
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from tools.errors import (
    IncompleteInputError,
    InvalidArgumentError,
    OutOfDomainError,
    StaleElementError,
)
from tools.structured_outputs import SplitEvent

logger = logging.getLogger(__name__)

ROOT_LOWER = -1.0
ROOT_UPPER = 1.0


@dataclass(frozen=True, eq=False)
class Element:
    """A hypercube [lower, upper) with its split depth per dimension."""
    id: int
    lower: np.ndarray
    upper: np.ndarray
    depth: tuple[int, ...]
    parent: int | None = None

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise InvalidArgumentError("lower/upper must be 1-D arrays of equal length")
        if np.any(lower >= upper):
            raise InvalidArgumentError(f"element {self.id}: every lower bound must be below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    @property
    def probability(self) -> float:
        """Prob(xi in B_k) for the uniform measure on [-1, 1]^d."""
        return float(np.prod(self.width / (ROOT_UPPER - ROOT_LOWER)))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Half-open membership test, closed at the root's right edge."""
        points = np.atleast_2d(points)
        below_upper = (points < self.upper) | ((self.upper == ROOT_UPPER) & (points == ROOT_UPPER))
        return np.all((points >= self.lower) & below_upper, axis=-1)

    def to_local(self, points: np.ndarray) -> np.ndarray:
        """Global coordinates inside the element -> local coordinates in [-1, 1]^d."""
        points = np.asarray(points, dtype=float)
        return (2.0 * points - (self.upper + self.lower)) / self.width

    def to_global(self, local: np.ndarray) -> np.ndarray:
        """Local coordinates in [-1, 1]^d -> global coordinates (map g_k)."""
        local = np.asarray(local, dtype=float)
        return 0.5 * self.width * local + 0.5 * (self.upper + self.lower)


@dataclass
class ElementMesh:
    """Live elements of a decomposition plus the log of every split."""
    dimension: int
    _live: dict[int, Element] = field(default_factory=dict, repr=False)
    _retired: dict[int, Element] = field(default_factory=dict, repr=False)
    history: list[SplitEvent] = field(default_factory=list, repr=False)
    _next_id: int = field(default=1, repr=False)

    def __len__(self) -> int:
        return len(self._live)

    def __contains__(self, element_id: int) -> bool:
        return element_id in self._live

    def __iter__(self):
        return iter(self.elements)

    @property
    def elements(self) -> list[Element]:
        """Live elements ordered by id."""
        return [self._live[k] for k in sorted(self._live)]

    @property
    def ids(self) -> list[int]:
        return sorted(self._live)

    def get(self, element_id: int) -> Element:
        try:
            return self._live[element_id]
        except KeyError:
            state = "retired" if element_id in self._retired else "unknown"
            raise StaleElementError(f"element {element_id} is {state}") from None

    def add(self, lower: Sequence[float], upper: Sequence[float],
            depth: Sequence[int] | None = None, parent: int | None = None) -> Element:
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.size != self.dimension:
            raise InvalidArgumentError(f"expected {self.dimension} bounds, got {lower.size}")
        depth = tuple(depth) if depth is not None else (0,) * self.dimension
        element = Element(self._next_id, lower, upper, depth, parent)
        self._live[element.id] = element
        self._next_id += 1
        return element

    def split(self, element_id: int, dims: Iterable[int], time: float = 0.0) -> list[int]:
        """Bisect element along every dimension in ``dims``; returns child ids."""
        parent = self.get(element_id)
        dims = sorted(set(int(i) for i in dims))
        if not dims:
            raise InvalidArgumentError("split needs at least one dimension")
        if dims[0] < 0 or dims[-1] >= self.dimension:
            raise InvalidArgumentError(f"split dimensions {dims} outside 0..{self.dimension - 1}")

        mid = parent.center
        children = []
        # itertools.product order: first listed dimension varies slowest
        for halves in itertools.product((0, 1), repeat=len(dims)):
            lower = parent.lower.copy()
            upper = parent.upper.copy()
            depth = list(parent.depth)
            for dim, half in zip(dims, halves):
                if half == 0:
                    upper[dim] = mid[dim]
                else:
                    lower[dim] = mid[dim]
                depth[dim] += 1
            children.append(self.add(lower, upper, depth, parent=parent.id).id)

        self._retired[parent.id] = self._live.pop(parent.id)
        self.history.append(SplitEvent(time=time, parent_id=parent.id, dims=dims, child_ids=children))
        logger.debug("split element %d along %s -> %s", parent.id, dims, children)
        return children

    def total_probability(self) -> float:
        return float(sum(e.probability for e in self._live.values()))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked (lower, upper) arrays of live elements in id order."""
        elements = self.elements
        return (np.array([e.lower for e in elements]), np.array([e.upper for e in elements]))

    def splits_per_dimension(self) -> list[int]:
        counts = [0] * self.dimension
        for event in self.history:
            for dim in event.dims:
                counts[dim] += 1
        return counts


# =============================================================================
# OPERATIONS
# =============================================================================
def decompose_uniform(d: int, counts: Sequence[int]) -> ElementMesh:
    """Tile [-1, 1]^d with prod(counts) congruent elements (ids start at 1)."""
    if d < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {d}")
    counts = list(counts)
    if len(counts) != d:
        raise InvalidArgumentError(f"need {d} element counts, got {len(counts)}")
    if any(int(c) < 1 for c in counts):
        raise InvalidArgumentError(f"element counts must be >= 1, got {counts}")

    edges = [np.linspace(ROOT_LOWER, ROOT_UPPER, int(c) + 1) for c in counts]
    mesh = ElementMesh(dimension=d)
    for cell in itertools.product(*(range(int(c)) for c in counts)):
        lower = [edges[i][j] for i, j in enumerate(cell)]
        upper = [edges[i][j + 1] for i, j in enumerate(cell)]
        mesh.add(lower, upper)
    return mesh


def locate(mesh: ElementMesh, xi: Sequence[float]) -> int:
    """Id of the unique live element containing the global point xi."""
    return int(locate_many(mesh, np.atleast_2d(np.asarray(xi, dtype=float)))[0])


def locate_many(mesh: ElementMesh, points: np.ndarray) -> np.ndarray:
    """Vectorized locate for an (n, d) array of points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != mesh.dimension:
        raise InvalidArgumentError(f"points must have {mesh.dimension} coordinates")
    if np.any(points < ROOT_LOWER) or np.any(points > ROOT_UPPER) or not np.all(np.isfinite(points)):
        raise OutOfDomainError("point outside the root domain [-1, 1]^d")

    ids = np.array(mesh.ids)
    lower, upper = mesh.bounds()
    p = points[:, None, :]
    inside_upper = (p < upper[None]) | ((upper[None] == ROOT_UPPER) & (p == ROOT_UPPER))
    mask = np.all((p >= lower[None]) & inside_upper, axis=-1)
    hits = mask.sum(axis=1)
    if np.any(hits != 1):
        bad = int(np.argmax(hits != 1))
        raise OutOfDomainError(f"point {points[bad]} is covered by {hits[bad]} elements")
    return ids[np.argmax(mask, axis=1)]


def to_local(element: Element, zeta: np.ndarray) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta < element.lower - 1e-14) or np.any(zeta > element.upper + 1e-14):
        raise OutOfDomainError(f"point outside element {element.id}")
    return element.to_local(zeta)


def to_global(element: Element, xi_local: np.ndarray) -> np.ndarray:
    xi_local = np.asarray(xi_local, dtype=float)
    if np.any(np.abs(xi_local) > 1.0 + 1e-14):
        raise OutOfDomainError("local coordinates outside [-1, 1]^d")
    return element.to_global(xi_local)


def split_element(mesh: ElementMesh, element_id: int, dims: Iterable[int], time: float = 0.0) -> list[int]:
    return mesh.split(element_id, dims, time=time)


def conditional_moment(values: np.ndarray, weights: np.ndarray, m: int = 1) -> np.ndarray:
    """E[u^m | xi in B_k] by cubature; ``values`` has the node axis first."""
    values = np.asarray(values, dtype=float)
    return np.tensordot(np.asarray(weights, dtype=float), values ** m, axes=(0, 0))


def assemble_moment(
    mesh: ElementMesh,
    per_element_moments: Mapping[int, float | np.ndarray],
    m: int = 1,
) -> float | np.ndarray:
    """Global m-th moment: sum_k Prob(B_k) * E[u^m | xi in B_k]."""
    if m < 1:
        raise InvalidArgumentError(f"moment order must be >= 1, got {m}")
    missing = [k for k in mesh.ids if k not in per_element_moments]
    if missing:
        raise IncompleteInputError(f"missing conditional moments for elements {missing}")
    total = None
    for element in mesh.elements:
        term = element.probability * np.asarray(per_element_moments[element.id], dtype=float)
        total = term if total is None else total + term
    return float(total) if np.ndim(total) == 0 else total


def mesh_snapshot(mesh: ElementMesh) -> pd.DataFrame:
    """One row per live element: id, per-dimension bounds, probability, depth."""
    rows = []
    for element in mesh.elements:
        row = {"id": element.id}
        for i in range(mesh.dimension):
            row[f"a{i}"] = element.lower[i]
            row[f"b{i}"] = element.upper[i]
        row["probability"] = element.probability
        for i in range(mesh.dimension):
            row[f"depth{i}"] = element.depth[i]
        rows.append(row)
    return pd.DataFrame(rows)
