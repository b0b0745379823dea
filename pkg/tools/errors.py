"""
Error types shared by every package.

Each error also derives from the closest builtin so callers that only know
about ``ValueError``/``KeyError`` keep working.
"""

from typing import Sequence


class AMRError(Exception):
    """Base class for all adaptive-refinement errors."""


class InvalidArgumentError(AMRError, ValueError):
    """An argument is outside its documented range."""


class OutOfDomainError(AMRError, ValueError):
    """A point lies outside the root domain [-1, 1]^d."""


class IncompleteInputError(AMRError, KeyError):
    """A per-element input is missing for a live element."""


class StaleElementError(AMRError, KeyError):
    """An element id refers to a retired (already split) or unknown element."""


class InvalidPolicyError(AMRError, ValueError):
    """Reduced order is not below the full order."""


class IncompleteCouplingError(AMRError, ValueError):
    """Interface data for a physical-space element is missing."""


class UnsupportedDimensionError(AMRError, ValueError):
    """Requested dimension is not supported by the sampler."""


class NumericalBlowupError(AMRError, ArithmeticError):
    """A state became non-finite or exceeded the blowup threshold."""

    def __init__(
        self,
        message: str,
        element_id: int | None = None,
        time: float | None = None,
        node: Sequence[float] | None = None,
    ):
        self.element_id = element_id
        self.time = time
        self.node = None if node is None else tuple(float(x) for x in node)
        details = []
        if element_id is not None:
            details.append(f"element={element_id}")
        if time is not None:
            details.append(f"t={time:.6g}")
        if self.node is not None:
            details.append(f"node={self.node}")
        super().__init__(f"{message} ({', '.join(details)})" if details else message)


class ConfigValidationError(AMRError, ValueError):
    """Experiment configuration is invalid; ``keys`` lists every offending key."""

    def __init__(self, message: str, keys: Sequence[str] = ()):
        self.keys = list(keys)
        super().__init__(message)
