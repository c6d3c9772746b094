"""Exact join invariants of parametrized projective varieties.

Given X, Y in P^n parametrized by binary (or ternary) forms, compute the
join-type profile (m_X, m_Y), the number b of join lines through a general
point of the embedded join, deg(pi) = m_X m_Y b, dim and degree of the join,
t(X,Y), and the strange / constrained pair tests.  A brute-force finite-field
oracle checks the exact counts independently.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .fields import FieldElem, PrimeField, Rationals  # noqa: E402
from .join import FiberCensus, JoinInstance  # noqa: E402
from .variety import ParamVariety  # noqa: E402

__all__ = [
    "FieldElem",
    "FiberCensus",
    "JoinInstance",
    "ParamVariety",
    "PrimeField",
    "Rationals",
    "__version__",
]
