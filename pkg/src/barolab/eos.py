"""Barotropic equations of state and the thermodynamic scalars derived from them.

Every quantity is a closed-form function of the density alone: the pressure
law ``P(rho)``, the specific enthalpy (the antiderivative of ``P'(rho)/rho``
vanishing at the reference density), the potential-energy density ``V(rho)``
(the antiderivative of the enthalpy, also gauged to vanish at the reference
density) and the sound speed ``sqrt(P'(rho))``.

Two families are provided: the isentropic law ``P = p_bar*(rho/rho_bar)**gamma``
with ``gamma > 0``, ``gamma != 1``, and the isothermal law ``P = p_bar*rho/rho_bar``
(the ``gamma -> 1`` limit, kept as a separate variant to avoid the 0/0 in the
enthalpy formula).  ``gamma`` below 1 is accepted: hyperbolicity only needs
``P' > 0``.  Shallow water corresponds to ``gamma = 2`` with ``P = g*rho**2/2``
and is offered as a named constructor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ISENTROPIC = "isentropic"
ISOTHERMAL = "isothermal"


def _check_density(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
        raise DomainError("density must be positive and finite")
    return rho


@dataclass(frozen=True)
class EquationOfState:
    """A barotropic pressure law with reference state ``(rho_bar, p_bar)``.

    Attributes
    ----------
    kind : str
        ``"isentropic"`` or ``"isothermal"``.
    rho_bar : float
        Reference density (> 0); enthalpy and potential vanish there.
    p_bar : float
        Reference pressure (> 0), the pressure at ``rho_bar``.
    gamma : float or None
        Specific-heat ratio for the isentropic law; ``None`` for isothermal.
    """

    kind: str
    rho_bar: float
    p_bar: float
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in (ISENTROPIC, ISOTHERMAL):
            raise DomainError(f"unknown equation-of-state kind {self.kind!r}")
        if self.rho_bar <= 0.0:
            raise DomainError("rho_bar must be > 0")
        if self.p_bar <= 0.0:
            raise DomainError("p_bar must be > 0")
        if self.kind == ISENTROPIC:
            if self.gamma is None or self.gamma <= 0.0 or self.gamma == 1.0:
                raise DomainError("gamma must be > 0 and != 1 (use isothermal for gamma = 1)")

    # -- constructors -------------------------------------------------------

    @classmethod
    def isentropic(cls, gamma, rho_bar=1.0, p_bar=1.0):
        return cls(ISENTROPIC, float(rho_bar), float(p_bar), float(gamma))

    @classmethod
    def isothermal(cls, rho_bar=1.0, p_bar=1.0):
        return cls(ISOTHERMAL, float(rho_bar), float(p_bar))

    @classmethod
    def shallow_water(cls, g=1.0, rho_bar=1.0):
        """The gamma = 2 law ``P = g*rho**2/2`` with gravity ``g``."""
        if g <= 0.0:
            raise DomainError("g must be > 0")
        return cls.isentropic(2.0, rho_bar, 0.5 * g * rho_bar**2)

    # -- scalar functions of the density ------------------------------------

    @property
    def enthalpy_scale(self):
        """``gamma*p_bar/rho_bar`` (isentropic) or ``p_bar/rho_bar`` (isothermal)."""
        if self.kind == ISENTROPIC:
            return self.gamma * self.p_bar / self.rho_bar
        return self.p_bar / self.rho_bar

    def pressure(self, rho):
        rho = _check_density(rho)
        if self.kind == ISENTROPIC:
            return self.p_bar * (rho / self.rho_bar) ** self.gamma
        return self.p_bar * rho / self.rho_bar

    def dpressure(self, rho):
        """``dP/drho``; positive for every admissible law (hyperbolicity)."""
        rho = _check_density(rho)
        if self.kind == ISENTROPIC:
            return self.enthalpy_scale * (rho / self.rho_bar) ** (self.gamma - 1.0)
        return self.enthalpy_scale * np.ones_like(rho)

    def enthalpy(self, rho):
        """Specific enthalpy, the integral of ``P'(a)/a`` from ``rho_bar`` to ``rho``."""
        rho = _check_density(rho)
        if self.kind == ISENTROPIC:
            g = self.gamma
            return self.enthalpy_scale * ((rho / self.rho_bar) ** (g - 1.0) - 1.0) / (g - 1.0)
        return self.enthalpy_scale * np.log(rho / self.rho_bar)

    def potential(self, rho):
        """Potential-energy density, the integral of the enthalpy from ``rho_bar``.

        Nonnegative for every ``rho > 0`` since ``P' > 0``.
        """
        rho = _check_density(rho)
        if self.kind == ISENTROPIC:
            g = self.gamma
            r = rho / self.rho_bar
            return self.p_bar * (r**g - 1.0 - g * (r - 1.0)) / (g - 1.0)
        r = rho / self.rho_bar
        return self.p_bar * (r * np.log(r) - r + 1.0)

    def potential_derivatives(self, rho):
        """First three derivatives ``(V', V'', V''')`` of the potential.

        ``V'`` is the enthalpy and ``V'' = P'(rho)/rho``.
        """
        rho = _check_density(rho)
        d1 = self.enthalpy(rho)
        if self.kind == ISENTROPIC:
            g = self.gamma
            d2 = self.enthalpy_scale * rho ** (g - 2.0) / self.rho_bar ** (g - 1.0)
            d3 = (g - 2.0) * self.enthalpy_scale * rho ** (g - 3.0) / self.rho_bar ** (g - 1.0)
        else:
            d2 = self.enthalpy_scale / rho
            d3 = -self.enthalpy_scale / rho**2
        return d1, d2, d3

    def sound_speed(self, rho):
        """``sqrt(dP/drho)``, equal to ``sqrt(rho*V''(rho))``."""
        return np.sqrt(self.dpressure(rho))
