"""
Mesh Package - decomposition of [-1, 1]^d into hypercube elements.
"""

from mesh.elements import (
    Element,
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

__all__ = [
    "Element",
    "ElementMesh",
    "assemble_moment",
    "conditional_moment",
    "decompose_uniform",
    "locate",
    "locate_many",
    "mesh_snapshot",
    "split_element",
    "to_global",
    "to_local",
]
