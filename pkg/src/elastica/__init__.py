"""Euler elastica numerics.

Jacobi elliptic special functions, exact elastica parametrizations and
curvature profiles, the elastica ODE with conservation-law monitoring,
discrete bending energy on polylines, constrained energy minimization for
pinned/clamped boundary problems, and the self-intersection energy bound
B-bar >= varpi* r^2 together with its equality cases (leafed elasticae).
"""

from .errors import DomainError, InfeasibleError, StepSizeError

__version__ = "0.1.0"

__all__ = ["DomainError", "InfeasibleError", "StepSizeError", "__version__"]
