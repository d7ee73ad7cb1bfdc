"""Finite-temperature mean-field theory of the junction chain, thermodynamic limit.

With L_R = L_R0 / N and C_R = N C_R0 the resonator flux phi becomes a
classical order parameter as N grows. The equilibrium minimizes the free
energy per branch

    A(phi) = (1/L_R0 + 1/L_g) phi^2 / 2 + hbar omega_c / 2 + f(phi, kT)

over phi >= 0, where f is the branch free energy in the flux-tilted
potential. Stationarity of A is equivalent to the self-consistency
condition (1/L_R0 + 1/L_g) phi = <psi> / L_g, and the solver verifies its
minimum against that residual. Temperatures enter as kT in joule.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from . import fock
from .circuit import CircuitParams, constraint_slope, derive_linear
from .constants import PHI0, hbar
from .minimize import golden_section

SNAP_FRACTION = 1e-6

# (ops, H_atom) pairs keyed by the branch parameters that define them.
# L_R0 is deliberately absent from the key: resonator sweeps reuse the
# same branch operators.
_CONTEXT_CACHE: dict = {}


def _atom_context(params: CircuitParams, M: int):
    key = (params.L_J, params.L_g, params.C_J, M)
    hit = _CONTEXT_CACHE.get(key)
    if hit is None:
        ops = fock.build_operators(derive_linear(params), M)
        H_atom = fock.atom_hamiltonian(ops, params)
        H_atom.setflags(write=False)
        hit = (ops, H_atom)
        _CONTEXT_CACHE[key] = hit
    return hit


def _free_energy(H: np.ndarray, kT: float) -> float:
    """Helmholtz free energy of the truncated spectrum; ground energy at kT = 0."""
    if kT < 0:
        raise ValueError(f"kT must be non-negative, got {kT}")
    w = np.linalg.eigvalsh(H)
    if kT == 0.0:
        return float(w[0])
    return float(w[0] - kT * logsumexp(-(w - w[0]) / kT))


def action_per_atom(phi: float, kT: float, params: CircuitParams, M: int = 60) -> float:
    """Free energy per branch at frozen resonator flux phi, joule."""
    ops, H_atom = _atom_context(params, M)
    H = H_atom - (phi / params.L_g) * ops.psi_op
    u = 1.0 / params.L_R0 + 1.0 / params.L_g
    omega_c = derive_linear(params).omega_c
    return u * phi**2 / 2.0 + hbar * omega_c / 2.0 + _free_energy(H, kT)


def mean_branch_flux(phi: float, kT: float, params: CircuitParams, M: int = 60) -> float:
    """Thermal expectation of the branch flux at frozen resonator flux, weber."""
    ops, H_atom = _atom_context(params, M)
    H = H_atom - (phi / params.L_g) * ops.psi_op
    return fock.thermal_expectation(H, ops.psi_op, kT)


def selfconsistency_residual(phi: float, kT: float, params: CircuitParams, M: int = 60) -> float:
    """Derivative of the per-branch free energy with respect to phi, ampere.

    By Hellmann-Feynman this equals (1/L_R0 + 1/L_g) phi - <psi> / L_g, so
    a vanishing residual is the self-consistency condition.
    """
    u = 1.0 / params.L_R0 + 1.0 / params.L_g
    return u * phi - mean_branch_flux(phi, kT, params, M) / params.L_g


@dataclass(frozen=True)
class MeanFieldSolution:
    """Equilibrium of the per-branch free energy at one (params, kT) point.

    phi_th, psi_th       : resonator and branch flux expectations (weber)
    alpha_over_sqrt_n    : photon amplitude per square-root branch,
                           phi_th / sqrt(2 hbar Z_c0)
    kT                   : temperature, joule
    action_per_atom    : free energy per branch at the minimum, joule
    superradiant         : True when phi_th > 0
    converged            : False when the evaluation budget truncated any
                           stage or the stationarity polish found no root
    residual             : self-consistency residual at phi_th, ampere
    n_evaluations        : spectral evaluations spent
    """

    phi_th: float
    psi_th: float
    alpha_over_sqrt_n: float
    kT: float
    action_per_atom: float
    superradiant: bool
    converged: bool
    residual: float
    n_evaluations: int


def solve(
    params: CircuitParams,
    kT: float,
    M: int = 60,
    coarse_points: int = 256,
    max_evaluations: int = 6000,
) -> MeanFieldSolution:
    """Minimize the per-branch free energy over phi >= 0.

    Grid scan, then golden-section refinement of the best cell, then a
    bracketed root polish of the stationarity residual. The last step is
    needed because the free energy is flat to float precision near its
    minimum while the residual still carries a clean sign change. Minima
    below 1e-6 Phi0 are identified with the normal phase, phi_th = 0.
    """
    if kT < 0:
        raise ValueError(f"kT must be non-negative, got {kT}")
    evals = 0

    def f(phi):
        nonlocal evals
        evals += 1
        return action_per_atom(phi, kT, params, M)

    def g(phi):
        nonlocal evals
        evals += 1
        return selfconsistency_residual(phi, kT, params, M)

    window = 1.5 * (PHI0 / 2.0) / constraint_slope(params)
    truncated = False

    npts = min(coarse_points, max_evaluations)
    if npts < 3:
        return _package(params, 0.0, kT, M, converged=False, n_evaluations=evals)
    if npts < coarse_points:
        truncated = True
    step = window / (npts - 1)
    best_i, best_v = 0, math.inf
    for i in range(npts):
        v = f(i * step)
        if v < best_v:
            best_i, best_v = i, v
    phi_hat = best_i * step

    remaining = max_evaluations - evals
    if remaining >= 52:
        a = max(0.0, (best_i - 1) * step)
        b = min(window, (best_i + 1) * step)
        local_rtol = 1e-10 * window / max(b - a, 1e-300)
        phi_hat, _ = golden_section(f, a, b, rtol=local_rtol, max_iter=remaining - 2)
    else:
        truncated = True

    if phi_hat < SNAP_FRACTION * PHI0:
        return _package(params, 0.0, kT, M, converged=not truncated, n_evaluations=evals)

    # Polish: the action is quadratic around the minimum and numerically
    # flat over a relative width ~sqrt(eps), but its derivative changes
    # sign sharply there. Root-find the residual in a widening bracket.
    polished = False
    if max_evaluations - evals >= 120:
        for fac in (1e-4, 1e-3, 1e-2, 1e-1):
            a2, b2 = phi_hat * (1.0 - fac), phi_hat * (1.0 + fac)
            ga, gb = g(a2), g(b2)
            if ga == 0.0:
                phi_hat, polished = a2, True
                break
            if gb == 0.0:
                phi_hat, polished = b2, True
                break
            if ga * gb < 0.0:
                phi_hat = brentq(g, a2, b2, rtol=4.0 * np.finfo(float).eps, xtol=1e-300)
                polished = True
                break
    else:
        truncated = True

    if phi_hat < SNAP_FRACTION * PHI0:
        return _package(params, 0.0, kT, M, converged=not truncated, n_evaluations=evals)
    converged = polished and not truncated
    return _package(params, float(phi_hat), kT, M, converged=converged, n_evaluations=evals)


def _package(params, phi_th, kT, M, converged, n_evaluations):
    if phi_th == 0.0:
        psi_th = 0.0
        alpha = 0.0
    else:
        psi_th = mean_branch_flux(phi_th, kT, params, M)
        alpha = phi_th / math.sqrt(2.0 * hbar * derive_linear(params).Z_c0)
    return MeanFieldSolution(
        phi_th=phi_th,
        psi_th=psi_th,
        alpha_over_sqrt_n=alpha,
        kT=kT,
        action_per_atom=action_per_atom(phi_th, kT, params, M),
        superradiant=phi_th > 0.0,
        converged=converged,
        residual=selfconsistency_residual(phi_th, kT, params, M),
        n_evaluations=n_evaluations + (2 if phi_th else 1) + 1,
    )


def critical_inductance_at_zero_T(
    params: CircuitParams,
    bracket: tuple = (0.25e-9, 0.60e-9),
    tol: float = 1e-13,
    M: int = 60,
) -> float:
    """Resonator inductance where the zero-temperature order parameter onsets, henry.

    Bisection on L_R0: the phase is normal below the critical inductance
    and superradiant above it. The bracket must straddle the transition.
    """
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket}")

    def superradiant(L):
        return solve(params.replace(L_R0=L), 0.0, M=M).superradiant

    if superradiant(lo):
        raise ValueError(f"lower bracket edge {lo} is already superradiant")
    if not superradiant(hi):
        raise ValueError(f"upper bracket edge {hi} is still normal")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if superradiant(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PhaseDiagramGrid:
    """Order parameter over an (L_R0, kT) grid.

    amplitude and phi have shape (len(kT_values), len(L_R0_values)), kT
    along rows. boundary[i] is the critical kT of column i, interpolated
    where the column crosses the transition inside the grid and NaN where
    it does not (always-normal or right-censored columns).
    """

    L_R0_values: np.ndarray
    kT_values: np.ndarray
    amplitude: np.ndarray
    phi: np.ndarray
    converged: np.ndarray
    boundary: np.ndarray


def _column_critical_kT(kT_values: np.ndarray, amps: np.ndarray) -> float:
    pos = amps > 0.0
    if not pos.any() or pos.all():
        return math.nan
    j = int(np.nonzero(pos)[0][-1])
    lo_T, hi_T = kT_values[j], kT_values[j + 1]
    if j >= 1 and pos[j - 1]:
        a2, b2 = amps[j - 1] ** 2, amps[j] ** 2
        slope = (b2 - a2) / (kT_values[j] - kT_values[j - 1])
        if slope < 0.0:
            est = kT_values[j] - b2 / slope
            return float(min(max(est, lo_T), hi_T))
    return float(0.5 * (lo_T + hi_T))


def phase_boundary(
    params: CircuitParams,
    L_R0_values,
    kT_values,
    M: int = 60,
    threads: int = 1,
    max_evaluations: int = 6000,
) -> PhaseDiagramGrid:
    """Order parameter on the full (L_R0, kT) grid plus the interpolated boundary.

    Grid points are independent, so the sweep parallelizes over a thread
    pool; the dense solves release the interpreter lock. Results are
    placed by index and identical for any thread count.
    """
    L_vals = np.asarray(L_R0_values, dtype=float)
    T_vals = np.asarray(kT_values, dtype=float)
    if L_vals.ndim != 1 or T_vals.ndim != 1 or L_vals.size == 0 or T_vals.size == 0:
        raise ValueError("L_R0_values and kT_values must be non-empty 1d arrays")
    if np.any(np.diff(T_vals) <= 0):
        raise ValueError("kT_values must be strictly increasing")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")

    _atom_context(params, M)  # build shared operators before forking workers
    points = [(j, i) for j in range(T_vals.size) for i in range(L_vals.size)]

    def work(point):
        j, i = point
        return solve(
            params.replace(L_R0=float(L_vals[i])),
            float(T_vals[j]),
            M=M,
            max_evaluations=max_evaluations,
        )

    if threads == 1:
        solutions = [work(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solutions = list(pool.map(work, points))

    shape = (T_vals.size, L_vals.size)
    amplitude = np.empty(shape)
    phi = np.empty(shape)
    converged = np.empty(shape, dtype=bool)
    for (j, i), sol in zip(points, solutions):
        amplitude[j, i] = sol.alpha_over_sqrt_n
        phi[j, i] = sol.phi_th
        converged[j, i] = sol.converged
    boundary = np.array([_column_critical_kT(T_vals, amplitude[:, i]) for i in range(L_vals.size)])
    return PhaseDiagramGrid(
        L_R0_values=L_vals,
        kT_values=T_vals,
        amplitude=amplitude,
        phi=phi,
        converged=converged,
        boundary=boundary,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Truncation study of the branch free energy at one (phi, kT) point."""

    M_values: tuple
    free_energies: np.ndarray
    increments: np.ndarray
    passed: bool


def free_energy_convergence_check(
    params: CircuitParams,
    phi: float,
    kT: float,
    M_values: tuple = (10, 20, 40, 60),
) -> ConvergenceReport:
    """Branch free energy versus truncation level.

    passed requires the successive increments to shrink monotonically and
    the final increment to fall below 1e-8 E_J.
    """
    if len(M_values) < 2:
        raise ValueError("need at least two truncation levels to compare")
    if any(M_values[k] >= M_values[k + 1] for k in range(len(M_values) - 1)):
        raise ValueError("M_values must be strictly increasing")
    values = []
    for M in M_values:
        ops, H_atom = _atom_context(params, int(M))
        H = H_atom - (phi / params.L_g) * ops.psi_op
        values.append(_free_energy(H, kT))
    free_energies = np.array(values)
    increments = np.abs(np.diff(free_energies))
    passed = bool(np.all(np.diff(increments) < 0.0) and increments[-1] < 1e-8 * params.E_J)
    return ConvergenceReport(
        M_values=tuple(int(M) for M in M_values),
        free_energies=free_energies,
        increments=increments,
        passed=passed,
    )
