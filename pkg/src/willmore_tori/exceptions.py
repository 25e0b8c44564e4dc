"""Exception hierarchy shared by all willmore_tori modules."""

from typing import Any, Dict, Optional, Tuple


class WillmoreToriError(Exception):
    """Root of all package errors."""


class GridError(WillmoreToriError, ValueError):
    """Unusable grid resolution or mismatched field shapes."""


class DomainError(WillmoreToriError, ValueError):
    """Input outside the validity domain of a map or metric model."""


class DegenerateSurfaceError(DomainError):
    """Induced metric is not positive definite at some node."""

    def __init__(self, message: str, node: Tuple[int, int]):
        super().__init__(f"{message} at node {node}")
        self.node = node


class ConvergenceError(WillmoreToriError, RuntimeError):
    """A numerical procedure did not reach its tolerance."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ThresholdError(ConvergenceError):
    """No spectral gap separates the near-kernel from the rest."""
