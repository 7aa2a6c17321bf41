"""Linear dispersion checks, steady-profile machinery and singularity fitting.

The linearized system is dispersionless by construction (the same smoothing
function multiplies both gradient terms of the quadratic energy), so the
theoretical phase speed is ``sqrt(rho_bar * V''(rho_bar))`` for every
wavenumber and every regularization strength.  ``measured_phase_speed`` checks
that against the full nonlinear solver by propagating a small travelling wave
for one predicted period and correlating the fundamental mode against its
initial phase.

Steady motions reduce to a first-order ODE for the density,

    (2 eps A'/rho^2) (d rho/dx)^2 = N(rho) / D(rho),
    N = I^2 - 2 S rho + 2 (F/I) rho^2 - 2 rho V(rho),
    D = I^2 - rho^3 V''(rho),

driven by the constant mass/momentum/energy fluxes ``(I, S, F)``.  Where the
denominator vanishes (the sonic density) weak profiles develop the universal
two-thirds cusp ``rho = rho_s + amp * |x - x0|^(2/3)``; the exponent fitter
recovers the exponent and one-sided amplitudes by log-log regression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, FitUnreliableError, MeasurementInvalidError
from .euler import SolverConfig, State, run
from .grid import Grid

SONIC_PROXIMITY = 1e-6  # stop the profile integration at |D| below this fraction of D(start)


# -- dispersion ---------------------------------------------------------------

def phase_speed(eos, reg=None, k=None):
    """Theoretical phase speed ``sqrt(rho_bar * V''(rho_bar))``.

    Independent of both the wavenumber and the regularization; the arguments
    are accepted so call sites read like the measurement below.
    """
    _, v2, _ = eos.potential_derivatives(eos.rho_bar)
    return float(np.sqrt(eos.rho_bar * v2))


def phase_speed_two_function(eos, k, epsilon, slope_a, slope_b):
    """General dispersion relation when the two quadratic-energy terms differ.

    ``omega/k = sqrt(rho_bar V'' (1 + 2 eps k^2 slope_b)/(1 + 2 eps k^2 slope_a))``;
    collapses to :func:`phase_speed` when ``slope_b == slope_a``.  Exposed for
    documentation plots only.
    """
    _, v2, _ = eos.potential_derivatives(eos.rho_bar)
    k = np.asarray(k, dtype=float)
    return np.sqrt(eos.rho_bar * v2
                   * (1.0 + 2.0 * epsilon * k**2 * slope_b)
                   / (1.0 + 2.0 * epsilon * k**2 * slope_a))


def measured_phase_speed(eos, reg, k, amplitude, n=None, cfl=0.3, harmonic_tol=0.01):
    """Phase speed of a small travelling wave measured from the solver.

    Propagates ``rho = rho_bar + a cos(k x)`` with the matched velocity
    eigenvector on a periodic ``[0, 2 pi)`` domain for one predicted period
    and extracts the phase advance of the fundamental Fourier mode (the
    discrete cross-correlation phase).  Raises
    :class:`MeasurementInvalidError` when content outside the fundamental
    exceeds ``harmonic_tol`` of it, which signals nonlinear contamination.
    """
    k = int(k)
    if k <= 0:
        raise DomainError("mode number must be a positive integer")
    if n is None:
        n = max(256, 64 * k)  # at least 32 points per wavelength, with margin
    grid = Grid.periodic(2.0 * np.pi, n)
    c0 = phase_speed(eos)
    a = float(amplitude)
    rho0 = eos.rho_bar + a * np.cos(k * grid.x)
    u0 = (c0 / eos.rho_bar) * a * np.cos(k * grid.x)
    period = 2.0 * np.pi / (k * c0)
    result = run(State(0.0, rho0, u0, grid), SolverConfig(t_end=period, cfl=cfl), reg, eos)

    def mode(state):
        return np.fft.rfft(state.rho - eos.rho_bar)

    spec0 = mode(result.snapshots[0][1])
    spec1 = mode(result.final)
    amp_fund = np.abs(spec1[k])
    others = np.abs(spec1).copy()
    others[0] = others[k] = 0.0
    if np.max(others) > harmonic_tol * amp_fund:
        raise MeasurementInvalidError(
            f"harmonic content {np.max(others) / amp_fund:.3e} of the fundamental "
            f"exceeds {harmonic_tol:.1e}; the wave left the linear regime"
        )
    dphi = np.angle(spec1[k]) - np.angle(spec0[k])  # true advance is -omega*T, wrapped
    wraps = round((k * c0 * period + dphi) / (2.0 * np.pi))
    omega = (2.0 * np.pi * wraps - dphi) / period
    return omega / k


# -- steady motions -----------------------------------------------------------

def equilibrium_fluxes(rho, u, eos):
    """Mass, momentum and energy fluxes ``(I, S, F)`` of a constant state."""
    v = float(eos.potential(rho))
    v1 = float(eos.enthalpy(rho))
    mass = rho * u
    momentum = rho * u**2 + rho * v1 - v
    energy = 0.5 * rho * u**3 + rho * v1 * u
    return mass, momentum, energy


@dataclass(frozen=True)
class SteadyFluxes:
    """Far-field flux triple; ``energy_left != energy_right`` across a shock."""

    mass: float
    momentum: float
    energy_left: float
    energy_right: float
    mass_mismatch: float = 0.0
    momentum_mismatch: float = 0.0

    @classmethod
    def uniform(cls, mass, momentum, energy):
        return cls(float(mass), float(momentum), float(energy), float(energy))

    def energy(self, side):
        return self.energy_right if side > 0 else self.energy_left

    @property
    def dissipation(self):
        """Energy flux lost between the two far fields, ``F+ - F-``."""
        return self.energy_right - self.energy_left

    def admissible(self, tol=1e-12):
        """Whether the two far fields can be joined by a steady connection."""
        scale = max(abs(self.mass), abs(self.momentum), 1.0)
        return abs(self.mass_mismatch) <= tol * scale and abs(self.momentum_mismatch) <= tol * scale


def far_field_fluxes(rho_left, u_left, rho_right, u_right, eos):
    """Fluxes of two equilibrium far fields, with the mismatch bookkeeping."""
    if rho_left <= 0.0 or rho_right <= 0.0:
        raise DomainError("far-field densities must be positive")
    i_l, s_l, f_l = equilibrium_fluxes(rho_left, u_left, eos)
    i_r, s_r, f_r = equilibrium_fluxes(rho_right, u_right, eos)
    return SteadyFluxes(i_l, s_l, f_l, f_r, mass_mismatch=i_r - i_l, momentum_mismatch=s_r - s_l)


def steady_numer_denom(rho, fluxes, eos, side=1):
    """Numerator and denominator of the steady squared-slope relation."""
    i, s = fluxes.mass, fluxes.momentum
    f = fluxes.energy(side)
    v = eos.potential(rho)
    _, v2, _ = eos.potential_derivatives(rho)
    numer = i**2 - 2.0 * s * rho + 2.0 * (f / i) * rho**2 - 2.0 * rho * v
    denom = i**2 - rho**3 * v2
    return numer, denom


def steady_ode_rhs(rho, fluxes, eos, reg, side=1):
    """Squared slope ``(d rho/dx)^2`` of a steady profile at density ``rho``.

    Negative values mark inadmissible regions; the result diverges at the
    sonic density where the denominator vanishes.
    """
    if reg.epsilon <= 0.0:
        raise DomainError("steady profiles need epsilon > 0")
    if fluxes.mass == 0.0:
        raise DomainError("steady profiles need a nonzero mass flux")
    numer, denom = steady_numer_denom(rho, fluxes, eos, side)
    da = reg.slope(rho)
    return float(rho**2 * numer / (2.0 * reg.epsilon * da * denom))


def sonic_density(mass_flux, eos, bracket=(1e-3, 1e3)):
    """Density where ``rho^3 V''(rho) = I^2`` (the steady denominator's root)."""

    def f(rho):
        _, v2, _ = eos.potential_derivatives(rho)
        return rho**3 * v2 - mass_flux**2

    return float(brentq(f, *bracket, xtol=1e-14, rtol=1e-15))


@dataclass
class ProfileResult:
    x: np.ndarray
    rho: np.ndarray
    stop: str            # "sonic", "turning" or "end"
    x_stop: float
    sol: object = None   # dense-output interpolant


def integrate_steady_profile(fluxes, eos, reg, rho_start, direction, side=1,
                             x_max=10.0, rtol=1e-10, atol=1e-13):
    """Integrate ``d rho/dx = direction * sqrt(squared slope)`` from ``x = 0``.

    Adaptive RK with terminal events at slope-zero points (the numerator
    crossing zero) and at sonic proximity (the denominator shrunk to
    ``SONIC_PROXIMITY`` of its starting magnitude).  Branch switching at
    turning points is the caller's composition task.
    """
    if direction not in (-1, 1):
        raise DomainError("direction must be +1 or -1")
    v0 = steady_ode_rhs(rho_start, fluxes, eos, reg, side)
    if abs(v0) <= 1e-12 * max(1.0, rho_start**2):
        # starting from an equilibrium: the constant state is the profile
        xs = np.linspace(0.0, x_max, 256)
        return ProfileResult(xs, np.full_like(xs, float(rho_start)), "equilibrium", x_max,
                             sol=lambda x: np.atleast_2d(np.full_like(np.asarray(x, float),
                                                                      float(rho_start))))
    if v0 < 0.0:
        raise DomainError("squared slope is negative at rho_start; no profile there")
    _, d0 = steady_numer_denom(rho_start, fluxes, eos, side)

    def slope(x, y):
        val = steady_ode_rhs(float(y[0]), fluxes, eos, reg, side)
        return [direction * np.sqrt(max(val, 0.0))]

    def ev_turning(x, y):
        n, _ = steady_numer_denom(float(y[0]), fluxes, eos, side)
        return n

    def ev_sonic(x, y):
        _, d = steady_numer_denom(float(y[0]), fluxes, eos, side)
        return abs(d) - SONIC_PROXIMITY * abs(d0)

    ev_turning.terminal = True
    ev_sonic.terminal = True
    sol = solve_ivp(slope, (0.0, x_max), [float(rho_start)], rtol=rtol, atol=atol,
                    events=[ev_turning, ev_sonic], dense_output=True, max_step=x_max / 50.0)
    if sol.t_events[1].size:
        stop, x_stop = "sonic", float(sol.t_events[1][0])
    elif sol.t_events[0].size:
        stop, x_stop = "turning", float(sol.t_events[0][0])
    else:
        stop, x_stop = "end", float(sol.t[-1])
    xs = np.linspace(0.0, x_stop, max(len(sol.t) * 8, 256))
    return ProfileResult(xs, sol.sol(xs)[0], stop, x_stop, sol=sol.sol)


def cusp_profile(fluxes, eos, reg, rho_start, side=1, n=4097, x_max=10.0):
    """Two-sided steady profile around a sonic point, sampled uniformly.

    Integrates toward the sonic density, locates the cusp position by the
    local two-thirds model, mirrors the branch and resamples with the cusp
    exactly on a node.  Returns ``(x, rho, x_center, rho_center)``.
    """
    res = integrate_steady_profile(fluxes, eos, reg, rho_start, -1, side, x_max=x_max)
    if res.stop != "sonic":
        raise DomainError(f"profile stopped at a {res.stop} point, not a sonic point")
    rho_s = sonic_density(fluxes.mass, eos)
    rho_c = float(res.sol(res.x_stop)[0])
    v_c = steady_ode_rhs(rho_c, fluxes, eos, reg, side)
    # local model rho - rho_s ~ (x0 - x)^(2/3)  =>  x0 - x = (2/3)(rho - rho_s)/|rho'|
    x0 = res.x_stop + (2.0 / 3.0) * (rho_c - rho_s) / np.sqrt(v_c)
    half = np.linspace(0.0, x0, (n + 1) // 2)
    branch = np.where(half <= res.x_stop, res.sol(np.minimum(half, res.x_stop))[0],
                      rho_s + (rho_c - rho_s) * ((x0 - half) / (x0 - res.x_stop)) ** (2.0 / 3.0))
    branch[-1] = rho_s
    x = np.concatenate([half, x0 + (x0 - half[-2::-1])])
    rho = np.concatenate([branch, branch[-2::-1]])
    return x, rho, x0, rho_s


def cusp_amplitude_prediction(fluxes, eos, reg, rho_sonic, side=1):
    """One-sided cusp amplitude from the local analysis of the steady relation.

    Matching the ``|x - x0|^(-2/3)`` coefficients of the squared-slope relation
    at the sonic density gives a relation cubic in the amplitude,

        amp^3 = (9 rho_s^3 / 8 eps A'(rho_s)) * (-N(rho_s) / (3 I^2 + rho_s^4 V'''(rho_s))),

    since the expanded denominator itself carries one factor of the amplitude.
    """
    numer, _ = steady_numer_denom(rho_sonic, fluxes, eos, side)
    _, _, v3 = eos.potential_derivatives(rho_sonic)
    da = float(reg.slope(rho_sonic))
    amp3 = (9.0 * rho_sonic**3 / (8.0 * reg.epsilon * da)) * (
        -numer / (3.0 * fluxes.mass**2 + rho_sonic**4 * v3))
    if amp3 <= 0.0:
        raise DomainError("the local analysis admits no real cusp amplitude here")
    return float(np.cbrt(amp3))


# -- singularity-exponent fitting ---------------------------------------------

@dataclass(frozen=True)
class SingularityFit:
    alpha_left: float
    alpha_right: float
    amp_left: float
    amp_right: float
    r2_left: float
    r2_right: float
    window: tuple[float, float]

    @property
    def alpha(self):
        return 0.5 * (self.alpha_left + self.alpha_right)

    def to_report(self):
        return {
            "alpha_left": self.alpha_left,
            "alpha_right": self.alpha_right,
            "rho_amp_left": self.amp_left,
            "rho_amp_right": self.amp_right,
            "r2_left": self.r2_left,
            "r2_right": self.r2_right,
            "window": list(self.window),
        }


def _side_fit(t, y):
    slope, intercept = np.polyfit(t, y, 1)
    fit = slope * t + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return float(slope), float(np.exp(intercept)), r2


def fit_singularity_exponent(x, rho, center, rho_ref=None, inner=None, outer=None,
                             r2_min=0.99, min_points=8):
    """Fit ``|rho - rho_ref| ~ amp * |x - center|**alpha`` on each side of ``center``.

    The window excludes ``|x - center| < 3 dx`` (the scale on which any cusp
    is smeared) and everything beyond 10% of the data extent by default.
    Raises :class:`FitUnreliableError`, with the fit attached, when either
    side falls below ``r2_min``.
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    dx = float(np.median(np.diff(x)))
    if rho_ref is None:
        rho_ref = float(np.interp(center, x, rho))
    if inner is None:
        inner = 3.0 * dx
    if outer is None:
        outer = 0.1 * (x[-1] - x[0])
    if outer <= inner:
        raise DomainError("fit window is empty; profile too short for the requested window")
    s = x - center
    dev = np.abs(rho - rho_ref)
    results = []
    for sign in (-1.0, 1.0):
        mask = (np.sign(s) == sign) & (np.abs(s) >= inner) & (np.abs(s) <= outer) & (dev > 0.0)
        if np.count_nonzero(mask) < min_points:
            raise FitUnreliableError(
                f"only {np.count_nonzero(mask)} usable points on one side of the window")
        results.append(_side_fit(np.log(np.abs(s[mask])), np.log(dev[mask])))
    fit = SingularityFit(
        alpha_left=results[0][0], alpha_right=results[1][0],
        amp_left=results[0][1], amp_right=results[1][1],
        r2_left=results[0][2], r2_right=results[1][2],
        window=(inner, outer),
    )
    if fit.r2_left < r2_min or fit.r2_right < r2_min:
        raise FitUnreliableError(
            f"fit quality r^2 = ({fit.r2_left:.4f}, {fit.r2_right:.4f}) below {r2_min}",
            diagnostics=fit,
        )
    return fit
