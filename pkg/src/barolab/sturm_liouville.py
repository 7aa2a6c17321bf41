"""The Sturm-Liouville operator ``L = rho - 2 eps d/dx (rho A' d/dx .)`` and friends.

The operator is discretized in flux form with arithmetic-mean half-node
coefficients, which keeps the matrix symmetric (the discrete analogue of the
self-adjointness that makes the operator coercive for positive ``rho``):

    (L u)_i = rho_i u_i - (2 eps / dx^2) * (k_{i+1/2} (u_{i+1} - u_i)
                                            - k_{i-1/2} (u_i - u_{i-1}))

with ``k = rho * A'``.  Periodic grids give a cyclic tridiagonal system solved
directly through a rank-1 (Sherman-Morrison) correction of a plain banded
Cholesky factorization; line grids close the system with the far-field
constants as Dirichlet ghost data.  Every solve asserts its residual, so a
factorization that silently degraded would be caught immediately.

Three derived operations are provided on top of the inverse:

* ``solve(f)``            the inverse itself,
* ``solve_dx(psi)``       the inverse applied to ``d psi/dx`` (the smoothing
                          map used by the momentum equation),
* ``smooth(psi)``         ``psi + 2 eps rho A' d/dx solve_dx(psi)``, the flux
                          form of the regularizing term; it fixes constants
                          and annihilates high frequencies.

For the inverse regularizer family the smoothing map collapses, in
mass-Lagrangian coordinates, to a convolution against an exponential kernel;
:func:`inverse_family_flux` computes that independent realization.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import DomainError, NumericalBreakdownError, VacuumError
from .grid import require_finite
from .regularizer import INVERSE

RESIDUAL_TOL = 1e-10
KERNEL_TRUNCATION = 40.0  # e-folding widths; exp(-40) is below double noise


class SLSystem:
    """Assembled and factorized operator for one density field.

    Immutable after construction; ``solve``/``apply`` are read-only and safe
    to call concurrently on a single instance.
    """

    def __init__(self, grid, rho, reg):
        rho = require_finite(rho, "density")
        if rho.shape != (grid.n,):
            raise DomainError("density shape does not match grid")
        if np.min(rho) <= 0.0:
            raise VacuumError("density must stay positive to assemble the operator")
        self.grid = grid
        self.rho = rho
        self.eps = float(reg.epsilon)
        self.kappa = rho * reg.slope(rho)
        c = 2.0 * self.eps / grid.dx**2
        self._c = c
        if grid.is_periodic:
            k_half = 0.5 * (self.kappa + np.roll(self.kappa, -1))  # couples i and i+1, wraps
            diag = rho + c * (k_half + np.roll(k_half, 1))
            self._k_half = k_half
            self._corner = -c * k_half[-1]  # entry (0, n-1) of the cyclic matrix
            ab = np.zeros((2, grid.n))
            ab[1] = diag
            ab[0, 1:] = -c * k_half[:-1]
            # Sherman-Morrison split A = T + corner * w w^T with w = e_0 + e_{n-1};
            # corner <= 0 so T only gains on the diagonal and stays SPD.
            ab[1, 0] -= self._corner
            ab[1, -1] -= self._corner
            self._factor = _factorize(ab)
            if self._corner != 0.0:
                w = np.zeros(grid.n)
                w[0] = w[-1] = 1.0
                self._tinv_w = cho_solve_banded((self._factor, False), w)
                self._sm_denom = 1.0 + self._corner * (self._tinv_w[0] + self._tinv_w[-1])
        else:
            k_half = 0.5 * (self.kappa[:-1] + self.kappa[1:])  # interior interfaces
            self._k_half = k_half
            self._k_edge = (self.kappa[0], self.kappa[-1])     # ghost interfaces
            diag = rho.astype(float).copy()
            diag[:-1] += c * k_half
            diag[1:] += c * k_half
            diag[0] += c * self._k_edge[0]
            diag[-1] += c * self._k_edge[1]
            ab = np.zeros((2, grid.n))
            ab[1] = diag
            ab[0, 1:] = -c * k_half
            self._factor = _factorize(ab)
        self.diagonal = diag

    # -- matrix action -------------------------------------------------------

    def apply(self, u, far=None):
        """Matrix-vector product ``L u`` (ghost values from ``far`` on line grids)."""
        u = np.asarray(u, dtype=float)
        if self.grid.is_periodic:
            kh = self._k_half
            return self.rho * u - self._c * (
                kh * (np.roll(u, -1) - u) - np.roll(kh, 1) * (u - np.roll(u, 1))
            )
        left, right = self.grid._ghosts(u, far)
        out = self.rho * u
        flux = np.empty(self.grid.n + 1)
        flux[1:-1] = self._k_half * (u[1:] - u[:-1])
        flux[0] = self._k_edge[0] * (u[0] - left)
        flux[-1] = self._k_edge[1] * (right - u[-1])
        out -= self._c * (flux[1:] - flux[:-1])
        return out

    def solve(self, f, far=None):
        """Direct solve of ``L u = f`` with an enforced residual bound.

        On line grids the solution tends to the constants ``f/rho`` evaluated
        in the far field (``far`` overrides the default edge-sample estimate).
        """
        f = np.asarray(f, dtype=float)
        if self.grid.is_periodic:
            u = cho_solve_banded((self._factor, False), f)
            if self._corner != 0.0:
                wu = u[0] + u[-1]
                u = u - (self._corner * wu / self._sm_denom) * self._tinv_w
            residual = self.apply(u) - f
        else:
            if far is None:
                far = (f[0] / self.rho[0], f[-1] / self.rho[-1])
            rhs = f.copy()
            rhs[0] += self._c * self._k_edge[0] * far[0]
            rhs[-1] += self._c * self._k_edge[1] * far[1]
            u = cho_solve_banded((self._factor, False), rhs)
            residual = self.apply(u, far=far) - f
        scale = np.max(np.abs(f))
        if np.max(np.abs(residual)) > RESIDUAL_TOL * scale:
            raise NumericalBreakdownError(
                f"solve residual {np.max(np.abs(residual)):.3e} exceeds "
                f"{RESIDUAL_TOL:.0e} * |f| = {RESIDUAL_TOL * scale:.3e}"
            )
        return u

    def solve_dx(self, psi, far=None):
        """``L^{-1} d(psi)/dx``, implemented as the plain composition."""
        dpsi = self.grid.ddx(psi, far=far)
        return self.solve(dpsi, far=None if self.grid.is_periodic else (0.0, 0.0))

    def smooth(self, psi, far=None):
        """Flux form of the regularizing term: ``psi + 2 eps rho A' d/dx solve_dx(psi)``.

        Reduces to the identity for ``eps = 0`` and fixes constant fields.
        """
        psi = np.asarray(psi, dtype=float)
        if self.eps == 0.0:
            return psi.copy()
        w = self.solve_dx(psi, far=far)
        dw = self.grid.ddx(w, far=None if self.grid.is_periodic else (0.0, 0.0))
        return psi + 2.0 * self.eps * self.kappa * dw


def _factorize(ab):
    try:
        return cholesky_banded(ab, lower=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdownError(f"operator factorization failed: {exc}") from exc


def exp_kernel(xi, width):
    """The normalized exponential kernel ``exp(-|xi|/width) / (2 width)``."""
    if width <= 0.0:
        raise DomainError("kernel width must be > 0")
    return np.exp(-np.abs(xi) / width) / (2.0 * width)


def mass_coordinate(grid, rho):
    """Mass-Lagrangian coordinate ``xi(x) = integral of rho``, anchored at x = 0."""
    return grid.antiderivative(rho)


def inverse_family_flux(rho_xi, dxi, eos, reg):
    """Regularizing flux for the inverse family, by convolution in mass coordinates.

    For ``A = -a*rho_bar/rho`` the flux operator becomes, in the coordinate
    ``xi = integral rho dx``, the constant-coefficient smoother with kernel
    :func:`exp_kernel` of width ``sqrt(2 eps a rho_bar)``, applied to
    ``a*rho_bar*(rho V''' + 3 V'') * (d rho/d xi)^2``.

    Parameters
    ----------
    rho_xi : array
        Density sampled on a uniform grid in ``xi`` (spacing ``dxi``),
        decaying to far-field constants.
    """
    if reg.kind != INVERSE:
        raise DomainError("the convolution route is defined for the inverse family only")
    if reg.epsilon <= 0.0:
        raise DomainError("the convolution route needs epsilon > 0")
    rho_xi = require_finite(rho_xi, "density profile")
    width = np.sqrt(2.0 * reg.epsilon * reg.a * reg.rho_bar)
    drho = np.empty_like(rho_xi)
    drho[1:-1] = (rho_xi[2:] - rho_xi[:-2]) / (2.0 * dxi)
    drho[0] = (rho_xi[1] - rho_xi[0]) / (2.0 * dxi)
    drho[-1] = (rho_xi[-1] - rho_xi[-2]) / (2.0 * dxi)
    _, v2, v3 = eos.potential_derivatives(rho_xi)
    integrand = reg.a * reg.rho_bar * (rho_xi * v3 + 3.0 * v2) * drho**2
    m = int(np.ceil(KERNEL_TRUNCATION * width / dxi))
    weights = exp_kernel(dxi * np.arange(-m, m + 1), width) * dxi
    return np.convolve(integrand, weights, mode="same")
