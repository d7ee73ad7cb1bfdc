"""Fluctuation spectra around the zero-temperature mean-field equilibrium.

Expanding the chain energy to second order in the flux fluctuations about
the equilibrium (phi_th, psi_th) gives back the two-coupled-oscillator
problem of the linearized circuit, with the junction curvature replaced by
its ground-state average: E_J cos -> E_J <cos>. The resulting lower mode
stays strictly positive through the transition and develops a cusp at the
critical inductance instead of softening to zero.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import fock, meanfield
from .circuit import CircuitParams, DerivedLinear, derive_linear, polariton_frequencies
from .constants import PHI0
from .errors import ConvergenceError
from .meanfield import MeanFieldSolution

TWO_PI = 2.0 * math.pi

# Tolerated negative part of the squared lower mode, relative to omega_c^2.
# Anything below this is a genuine instability and raises.
NEGATIVE_TOL = 1e-8


@dataclass(frozen=True)
class RenormalizedParams:
    """Ground-state-averaged branch parameters at the mean-field equilibrium.

    E_J_bar   : E_J <cos>, the averaged junction curvature scale (joule);
                negative past the point where the branch flux crosses a
                quarter period
    L_J_bar   : (Phi0 / 2 pi)^2 / E_J_bar, signed (henry)
    omega_a_bar, Z_a_bar, g_bar : branch frequency, impedance and coupling
                rebuilt from the averaged curvature
    phi_th, psi_th : equilibrium fluxes the averages were taken at (weber)
    cos_avg   : ground-state expectation of cos(2 pi psi / Phi0)
    """

    E_J_bar: float
    L_J_bar: float
    omega_a_bar: float
    Z_a_bar: float
    g_bar: float
    phi_th: float
    psi_th: float
    cos_avg: float


def renormalize(params: CircuitParams, solution: MeanFieldSolution, M: int = 60) -> RenormalizedParams:
    """Average the junction curvature in the equilibrium ground state.

    Only defined at zero temperature. The branch flux is recomputed from
    params and compared against solution.psi_th, so a solution obtained
    for different parameters is rejected instead of silently reused.
    """
    if solution.kT != 0.0:
        raise ValueError("renormalization uses ground-state averages; solve at kT = 0")
    ops, H_atom = meanfield._atom_context(params, M)
    H = H_atom - (solution.phi_th / params.L_g) * ops.psi_op
    psi_check = fock.thermal_expectation(H, ops.psi_op, 0.0)
    tol = 1e-8 * max(abs(solution.psi_th), 1e-3 * PHI0)
    if abs(psi_check - solution.psi_th) > tol:
        raise ValueError(
            "solution.psi_th does not match these circuit parameters; "
            "the mean-field solution is stale"
        )
    cos_avg = fock.thermal_expectation(H, ops.cos_op, 0.0)
    E_J_bar = params.E_J * cos_avg
    L_J_bar = math.inf if E_J_bar == 0.0 else (PHI0 / TWO_PI) ** 2 / E_J_bar
    v = 1.0 / params.L_g - (0.0 if E_J_bar == 0.0 else 1.0 / L_J_bar)
    if v <= 0.0:
        raise ConvergenceError("averaged junction curvature removed the restoring force")
    omega_a_bar = math.sqrt(v / params.C_J)
    Z_a_bar = math.sqrt(1.0 / (v * params.C_J))
    g_bar = math.sqrt(derive_linear(params).Z_c0 * Z_a_bar) / (2.0 * params.L_g)
    return RenormalizedParams(
        E_J_bar=E_J_bar,
        L_J_bar=L_J_bar,
        omega_a_bar=omega_a_bar,
        Z_a_bar=Z_a_bar,
        g_bar=g_bar,
        phi_th=solution.phi_th,
        psi_th=solution.psi_th,
        cos_avg=cos_avg,
    )


def stationarity_check(params: CircuitParams, solution: MeanFieldSolution, M: int = 60):
    """Force balance at the equilibrium, returned as (photon, junction) residuals.

    Both residuals are flux derivatives of the energy, in ampere. The
    photon residual is the classical resonator balance; the junction one
    averages the flux-periodic force in the equilibrium ground state.
    """
    ops, H_atom = meanfield._atom_context(params, M)
    H = H_atom - (solution.phi_th / params.L_g) * ops.psi_op
    psi = fock.thermal_expectation(H, ops.psi_op, 0.0)
    sin_avg = fock.thermal_expectation(H, fock.sin_operator(ops), 0.0)
    photon = (1.0 / params.L_R0 + 1.0 / params.L_g) * solution.phi_th - psi / params.L_g
    junction = (psi - solution.phi_th) / params.L_g - (TWO_PI / PHI0) * params.E_J * sin_avg
    return photon, junction


def fluctuation_spectrum(renorm: RenormalizedParams, derived: DerivedLinear):
    """Polariton frequencies (omega_plus, omega_minus) of the fluctuations, rad/s.

    The resonator branch keeps its bare frequency; the junction branch and
    the coupling carry the averaged curvature. A squared lower mode below
    -1e-8 omega_c^2 means the expansion point was not a minimum and raises.
    """
    omega_plus, omega_minus_squared = polariton_frequencies(
        derived.omega_c, renorm.omega_a_bar, renorm.g_bar
    )
    if omega_minus_squared < -NEGATIVE_TOL * derived.omega_c**2:
        raise ConvergenceError(
            f"fluctuation mode unstable: omega_minus^2 = {omega_minus_squared:.3e}"
        )
    return omega_plus, math.sqrt(max(omega_minus_squared, 0.0))


def zero_point_shift(
    params: CircuitParams, solution: MeanFieldSolution, renorm: RenormalizedParams
) -> float:
    """Equilibrium energy offset per branch relative to the bare junction, joule.

    Inductive energy stored in the displaced fluxes plus the change of the
    averaged junction energy: phi^2 / 2 L_R0 + (phi - psi)^2 / 2 L_g
    + E_J (<cos> - 1).
    """
    if renorm.phi_th != solution.phi_th:
        raise ValueError("renorm was built from a different mean-field solution")
    phi, psi = solution.phi_th, solution.psi_th
    return (
        phi**2 / (2.0 * params.L_R0)
        + (phi - psi) ** 2 / (2.0 * params.L_g)
        + renorm.E_J_bar
        - params.E_J
    )


@dataclass(frozen=True)
class FluctScan:
    """Fluctuation spectrum along a resonator-inductance sweep at kT = 0.

    All arrays are indexed like L_R0_values. Frequencies in rad/s,
    delta_eps in joule.
    """

    L_R0_values: np.ndarray
    omega_c: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    omega_a_bar: np.ndarray
    g_bar: np.ndarray
    g_crit: np.ndarray
    delta_eps: np.ndarray
    phi_th: np.ndarray
    superradiant: np.ndarray


def spectrum_scan(params: CircuitParams, L_R0_values, M: int = 60) -> FluctScan:
    """Solve, renormalize and diagonalize the fluctuations at each L_R0."""
    L_vals = np.asarray(L_R0_values, dtype=float)
    if L_vals.ndim != 1 or L_vals.size == 0:
        raise ValueError("L_R0_values must be a non-empty 1d array")
    n = L_vals.size
    out = {
        name: np.empty(n)
        for name in (
            "omega_c",
            "omega_plus",
            "omega_minus",
            "omega_a_bar",
            "g_bar",
            "g_crit",
            "delta_eps",
            "phi_th",
        )
    }
    superradiant = np.empty(n, dtype=bool)
    for i, L in enumerate(L_vals):
        p = params.replace(L_R0=float(L))
        sol = meanfield.solve(p, 0.0, M=M)
        ren = renormalize(p, sol, M=M)
        der = derive_linear(p)
        w_plus, w_minus = fluctuation_spectrum(ren, der)
        out["omega_c"][i] = der.omega_c
        out["omega_plus"][i] = w_plus
        out["omega_minus"][i] = w_minus
        out["omega_a_bar"][i] = ren.omega_a_bar
        out["g_bar"][i] = ren.g_bar
        out["g_crit"][i] = 0.5 * math.sqrt(ren.omega_a_bar * der.omega_c)
        out["delta_eps"][i] = zero_point_shift(p, sol, ren)
        out["phi_th"][i] = sol.phi_th
        superradiant[i] = sol.superradiant
    return FluctScan(L_R0_values=L_vals, superradiant=superradiant, **out)


def locate_cusp(scan: FluctScan) -> int:
    """Index of the lower-mode minimum, the fluctuation signature of the transition."""
    return int(np.argmin(scan.omega_minus))


def locate_crossing(scan: FluctScan) -> int:
    """Index where the averaged coupling meets its critical value.

    g_bar approaches sqrt(omega_a_bar omega_c) / 2 tangentially rather
    than crossing it, so when no sign change exists the closest approach
    is returned.
    """
    diff = scan.g_bar - scan.g_crit
    sign_change = np.nonzero(diff[:-1] * diff[1:] <= 0.0)[0]
    if sign_change.size:
        i = int(sign_change[0])
        return i if abs(diff[i]) <= abs(diff[i + 1]) else i + 1
    return int(np.argmin(np.abs(diff)))


def count_convex_runs(values) -> int:
    """Number of contiguous runs with positive discrete second difference.

    A single run around the lower-mode minimum distinguishes a cusp from
    noise or from multiple soft points.
    """
    d2 = np.diff(np.asarray(values, dtype=float), n=2)
    pos = d2 > 0.0
    return int(np.count_nonzero(pos[1:] & ~pos[:-1]) + (1 if pos.size and pos[0] else 0))
