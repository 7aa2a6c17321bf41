"""The family of regularizing functions ``A(rho)`` and their exact derivatives.

The regularization is parametrized by a smooth increasing function of the
density together with a strength ``epsilon >= 0``.  Three families are
implemented, each with closed-form derivatives up to third order:

* ``cubic``     ``A = rho**3/6``
* ``inverse``   ``A = -a*rho_bar/rho`` with ``a > 0`` (increasing since A' = a*rho_bar/rho**2)
* ``power``     ``A = rho**p/p`` for any real ``p != 0``

``epsilon = 0`` is allowed and turns the regularizing source off entirely,
recovering the classical barotropic Euler equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import _check_density
from .errors import DomainError

CUBIC = "cubic"
INVERSE = "inverse"
POWER = "power"


@dataclass(frozen=True)
class Regularizer:
    kind: str
    epsilon: float
    a: float = 1.0        # inverse family strength
    rho_bar: float = 1.0  # inverse family reference density
    p: float = 3.0        # power family exponent

    def __post_init__(self):
        if self.kind not in (CUBIC, INVERSE, POWER):
            raise DomainError(f"unknown regularizer kind {self.kind!r}")
        if self.epsilon < 0.0:
            raise DomainError("epsilon must be >= 0")
        if self.kind == INVERSE and (self.a <= 0.0 or self.rho_bar <= 0.0):
            raise DomainError("inverse regularizer needs a > 0 and rho_bar > 0")
        if self.kind == POWER and self.p == 0.0:
            raise DomainError("power regularizer needs p != 0")

    @classmethod
    def cubic(cls, epsilon):
        return cls(CUBIC, float(epsilon))

    @classmethod
    def inverse(cls, epsilon, a=1.0, rho_bar=1.0):
        return cls(INVERSE, float(epsilon), a=float(a), rho_bar=float(rho_bar))

    @classmethod
    def power(cls, epsilon, p):
        return cls(POWER, float(epsilon), p=float(p))

    def derivatives(self, rho):
        """Return the tuple ``(A, A', A'', A''')`` at ``rho``."""
        rho = _check_density(rho)
        if self.kind == CUBIC:
            return rho**3 / 6.0, rho**2 / 2.0, rho, np.ones_like(rho)
        if self.kind == INVERSE:
            c = self.a * self.rho_bar
            return -c / rho, c / rho**2, -2.0 * c / rho**3, 6.0 * c / rho**4
        p = self.p
        return (
            rho**p / p,
            rho ** (p - 1.0),
            (p - 1.0) * rho ** (p - 2.0),
            (p - 1.0) * (p - 2.0) * rho ** (p - 3.0),
        )

    def slope(self, rho):
        """``A'(rho)`` alone, strictly positive for every family."""
        return self.derivatives(rho)[1]


def composite_coefficients(reg, eos, rho):
    """Coefficients of the squared gradients in the regularizing source.

    Returns ``(c_u, c_rho)`` such that the source reads
    ``c_u * u_x**2 + c_rho * rho_x**2``, with

    * ``c_u   = (rho**2 A')'      = 2 rho A' + rho**2 A''``
    * ``c_rho = (rho V''/A')' A'^2 = (V'' + rho V''') A' - rho V'' A''``

    ``c_rho`` may be negative (it is ``-g*rho**2/2`` for the cubic family with
    the shallow-water law).
    """
    rho = _check_density(rho)
    _, da, d2a, _ = reg.derivatives(rho)
    _, v2, v3 = eos.potential_derivatives(rho)
    c_u = 2.0 * rho * da + rho**2 * d2a
    c_rho = (v2 + rho * v3) * da - rho * v2 * d2a
    return c_u, c_rho
