"""
Tests for mesh/elements.py - decomposition, location, splitting, moment assembly.

Run with: pytest tests/test_mesh.py -v
"""

import numpy as np
import pytest

from evaluation.metrics.sampling import sobol_points
from mesh import (
    ElementMesh,
    assemble_moment,
    conditional_moment,
    decompose_uniform,
    locate,
    locate_many,
    mesh_snapshot,
    split_element,
    to_global,
    to_local,
)
from spectral import tensor_grid
from tools.errors import (
    IncompleteInputError,
    InvalidArgumentError,
    OutOfDomainError,
    StaleElementError,
)


def test_uniform_decomposition():
    mesh = decompose_uniform(2, [2, 3])
    assert len(mesh) == 6
    assert mesh.ids == [1, 2, 3, 4, 5, 6]
    assert mesh.total_probability() == pytest.approx(1.0)
    for element in mesh:
        assert element.probability == pytest.approx(1.0 / 6.0)
        assert element.depth == (0, 0)


@pytest.mark.parametrize("d,counts", [(0, []), (2, [2]), (1, [0])])
def test_invalid_decomposition(d, counts):
    with pytest.raises(InvalidArgumentError):
        decompose_uniform(d, counts)


def test_locate_half_open_convention():
    mesh = decompose_uniform(1, [2])
    left, right = mesh.ids
    assert locate(mesh, [-1.0]) == left
    assert locate(mesh, [0.0]) == right  # interior edges belong to the right element
    assert locate(mesh, [1.0]) == right  # root edge is closed
    np.testing.assert_array_equal(locate_many(mesh, np.array([[-0.5], [0.5]])), [left, right])


@pytest.mark.parametrize("d", [1, 2, 3])
def test_every_point_lies_in_exactly_one_element_after_random_splits(d):
    rng = np.random.default_rng(d)
    mesh = decompose_uniform(d, [2] * d)
    for _ in range(40):
        element_id = int(rng.choice(mesh.ids))
        dims = [dim for dim in range(d) if rng.random() < 0.6] or [int(rng.integers(d))]
        mesh.split(element_id, dims)
    assert mesh.total_probability() == pytest.approx(1.0)

    # dyadic Sobol points land on split planes as well as inside elements
    points = np.vstack([sobol_points(d, 10_000), np.ones((1, d)), -np.ones((1, d))])
    membership = np.stack([element.contains(points) for element in mesh.elements], axis=1)
    np.testing.assert_array_equal(membership.sum(axis=1), 1)
    ids = np.array(mesh.ids)
    np.testing.assert_array_equal(locate_many(mesh, points), ids[np.argmax(membership, axis=1)])


@pytest.mark.parametrize("point", [[1.5], [-1.0001], [np.nan]])
def test_locate_outside_domain(point):
    with pytest.raises(OutOfDomainError):
        locate(decompose_uniform(1, [2]), point)


def test_split_along_two_dimensions():
    mesh = decompose_uniform(2, [1, 1])
    children = split_element(mesh, 1, {0, 1}, time=0.5)
    assert children == [2, 3, 4, 5]
    assert len(mesh) == 4
    assert mesh.total_probability() == pytest.approx(1.0)
    assert all(mesh.get(c).depth == (1, 1) for c in children)
    assert all(mesh.get(c).parent == 1 for c in children)

    event = mesh.history[-1]
    assert event.parent_id == 1
    assert event.dims == [0, 1]
    assert event.time == 0.5
    assert mesh.splits_per_dimension() == [1, 1]

    # first listed dimension varies slowest
    np.testing.assert_allclose(mesh.get(2).lower, [-1.0, -1.0])
    np.testing.assert_allclose(mesh.get(3).lower, [-1.0, 0.0])


def test_split_single_dimension_keeps_other_bounds():
    mesh = decompose_uniform(3, [1, 1, 1])
    children = mesh.split(1, [2])
    assert len(children) == 2
    a, b = (mesh.get(c) for c in children)
    np.testing.assert_allclose(a.width, [2.0, 2.0, 1.0])
    np.testing.assert_allclose(b.lower, [-1.0, -1.0, 0.0])
    assert a.depth == (0, 0, 1)


def test_retired_element_is_stale():
    mesh = decompose_uniform(1, [1])
    mesh.split(1, [0])
    with pytest.raises(StaleElementError):
        mesh.get(1)
    with pytest.raises(StaleElementError):
        mesh.split(1, [0])
    with pytest.raises(StaleElementError):
        mesh.get(99)


@pytest.mark.parametrize("dims", [[], [2], [-1]])
def test_split_invalid_dimensions(dims):
    mesh = decompose_uniform(2, [1, 1])
    with pytest.raises(InvalidArgumentError):
        mesh.split(1, dims)


def test_local_global_maps():
    mesh = decompose_uniform(2, [4, 2])
    element = mesh.get(6)
    local = np.array([[-1.0, -1.0], [0.3, -0.2], [1.0, 1.0]])
    np.testing.assert_allclose(to_local(element, to_global(element, local)), local, atol=1e-15)
    with pytest.raises(OutOfDomainError):
        to_global(element, np.array([1.5, 0.0]))
    with pytest.raises(OutOfDomainError):
        to_local(element, np.array([-0.99, -0.99]))


def test_assemble_moment_matches_single_domain_quadrature():
    mesh = decompose_uniform(1, [2])
    mesh.split(1, [0])
    mesh.split(mesh.ids[0], [0])

    def f(x):
        return 1.0 + x - 2.0 * x ** 2 + x ** 5

    first = {}
    second = {}
    for element in mesh:
        grid = tensor_grid(element, 6)
        values = f(grid.nodes[:, 0])
        first[element.id] = conditional_moment(values, grid.weights, 1)
        second[element.id] = conditional_moment(values, grid.weights, 2)

    root = tensor_grid(decompose_uniform(1, [1]).get(1), 6)
    values = f(root.nodes[:, 0])
    assert assemble_moment(mesh, first, 1) == pytest.approx(np.sum(root.weights * values), abs=1e-12)
    assert assemble_moment(mesh, second, 2) == pytest.approx(np.sum(root.weights * values ** 2), abs=1e-12)
    # E[1 + x - 2x^2 + x^5] = 1 - 2/3
    assert assemble_moment(mesh, first, 1) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_assemble_moment_missing_element():
    mesh = decompose_uniform(1, [3])
    with pytest.raises(IncompleteInputError):
        assemble_moment(mesh, {1: 0.0, 2: 0.0})
    with pytest.raises(InvalidArgumentError):
        assemble_moment(mesh, {1: 0.0, 2: 0.0, 3: 0.0}, m=0)


def test_assemble_moment_keeps_array_shape():
    mesh = decompose_uniform(1, [2])
    moments = {1: np.array([[1.0], [2.0]]), 2: np.array([[3.0], [4.0]])}
    np.testing.assert_allclose(assemble_moment(mesh, moments), [[2.0], [3.0]])


def test_mesh_snapshot_columns():
    mesh = decompose_uniform(2, [2, 1])
    mesh.split(1, [1])
    frame = mesh_snapshot(mesh)
    assert list(frame.columns) == ["id", "a0", "b0", "a1", "b1", "probability", "depth0", "depth1"]
    assert frame["probability"].sum() == pytest.approx(1.0)
    assert frame["id"].tolist() == [2, 3, 4]


def test_element_rejects_degenerate_bounds():
    mesh = ElementMesh(dimension=1)
    with pytest.raises(InvalidArgumentError):
        mesh.add([0.5], [0.5])
