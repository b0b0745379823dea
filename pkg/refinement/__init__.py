"""
Refinement Package - scale-transfer indicator, split decisions and state transfer.
"""

from refinement.indicators import (
    burgers_transfer_terms,
    directional,
    directional_s1,
    directional_s2,
    element_transfer_terms,
    indicator_q,
    linear_ode_indicator,
    projected_rate,
    transfer_terms,
    truncated_energy,
)
from refinement.refine import RefinableSystem, refine_step, select_split_dims
from refinement.transfer import parent_values_at_children, transfer_children

__all__ = [
    "RefinableSystem",
    "burgers_transfer_terms",
    "directional",
    "directional_s1",
    "directional_s2",
    "element_transfer_terms",
    "indicator_q",
    "linear_ode_indicator",
    "parent_values_at_children",
    "projected_rate",
    "refine_step",
    "select_split_dims",
    "transfer_children",
    "transfer_terms",
    "truncated_energy",
]
