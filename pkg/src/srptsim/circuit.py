"""Lumped-element circuit model: parameters, linearized modes, classical bifurcation.

The system is a chain of N identical flux branches, each a Josephson
junction (inductance L_J, shunt capacitance C_J) in series with a
geometric inductance L_g, all sharing one LC resonator whose per-branch
inductance and capacitance are L_R0 and C_R0. The flux bias is fixed at
half a flux quantum, so the junction branch energy enters with a positive
cosine, +E_J cos(2 pi psi / Phi0). All quantities are SI.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .constants import PHI0

TWO_PI = 2.0 * math.pi

# Minimizer results below this fraction of Phi0 snap to exactly zero.
SNAP_FRACTION = 1e-6


@dataclass(frozen=True)
class CircuitParams:
    """Electrical parameters of the array-resonator circuit.

    Attributes
    ----------
    L_J : float
        Josephson inductance of one junction, henry. ``math.inf`` encodes
        a vanishing Josephson energy.
    L_g : float
        Geometric series inductance per branch, henry. Must stay strictly
        below L_J or the linearized junction branch has no restoring force.
    C_J : float
        Junction shunt capacitance, farad.
    C_R0 : float
        Resonator capacitance per branch, farad.
    L_R0 : float
        Resonator inductance scaled to one branch, henry. The full chain
        has L_R = L_R0 / N and C_R = N * C_R0, which keeps the resonator
        frequency independent of N.
    N : int or None
        Number of junction branches; None in thermodynamic-limit contexts.
    """

    L_J: float
    L_g: float
    C_J: float
    C_R0: float
    L_R0: float
    N: int | None = None

    def __post_init__(self):
        for name in ("L_J", "L_g", "C_J", "C_R0", "L_R0"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")
        if not self.L_g < self.L_J:
            raise ValueError(
                f"L_g = {self.L_g} must be smaller than L_J = {self.L_J}: "
                "the junction branch loses its restoring force otherwise"
            )
        if self.N is not None and (not isinstance(self.N, int) or self.N < 1):
            raise ValueError(f"N must be a positive integer or None, got {self.N!r}")

    @property
    def E_J(self) -> float:
        """Josephson energy (Phi0 / 2 pi)^2 / L_J in joule."""
        return (PHI0 / TWO_PI) ** 2 / self.L_J

    @classmethod
    def from_josephson_energy(cls, E_J, L_g, C_J, C_R0, L_R0, N=None):
        """Construct from the Josephson energy (joule) instead of L_J.

        E_J = 0 maps to an infinite Josephson inductance (bare LC branch).
        """
        if E_J < 0:
            raise ValueError(f"E_J must be non-negative, got {E_J}")
        L_J = math.inf if E_J == 0 else (PHI0 / TWO_PI) ** 2 / E_J
        return cls(L_J=L_J, L_g=L_g, C_J=C_J, C_R0=C_R0, L_R0=L_R0, N=N)

    def replace(self, **changes) -> "CircuitParams":
        """Copy with selected fields replaced (convenience for sweeps)."""
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class DerivedLinear:
    """Linearized mode data derived from :class:`CircuitParams`.

    omega_c, Z_c0 : resonator frequency (rad/s) and per-branch impedance (ohm)
    omega_a, Z_a  : junction-branch frequency and impedance
    g             : photon-junction coupling rate (rad/s)
    E_J           : Josephson energy (joule)
    """

    omega_c: float
    omega_a: float
    Z_c0: float
    Z_a: float
    g: float
    E_J: float


def derive_linear(params: CircuitParams) -> DerivedLinear:
    """Frequencies, impedances and the coupling rate of the linearized circuit.

    The resonator sees L_g and L_R0 in parallel; the junction branch sees
    L_g in series with the negative Josephson inductance contribution, so
    its restoring term is 1/L_g - 1/L_J (positive by construction).
    """
    u = 1.0 / params.L_g + 1.0 / params.L_R0
    v = 1.0 / params.L_g - 1.0 / params.L_J
    omega_c = math.sqrt(u / params.C_R0)
    Z_c0 = math.sqrt(1.0 / (u * params.C_R0))
    omega_a = math.sqrt(v / params.C_J)
    Z_a = math.sqrt(1.0 / (v * params.C_J))
    g = math.sqrt(Z_c0 * Z_a) / (2.0 * params.L_g)
    return DerivedLinear(omega_c=omega_c, omega_a=omega_a, Z_c0=Z_c0, Z_a=Z_a, g=g, E_J=params.E_J)


def polariton_frequencies(omega_c, omega_a, g):
    """Normal modes of two harmonic branches with position-position coupling.

    Returns ``(omega_plus, omega_minus_squared)``. The lower branch comes
    back squared and signed: a negative value flags that the coupled
    quadratic form is unstable, which is exactly the superradiant onset in
    the linearized theory.
    """
    omega_c = np.asarray(omega_c, dtype=float)
    omega_a = np.asarray(omega_a, dtype=float)
    g = np.asarray(g, dtype=float)
    if np.any(omega_c <= 0) or np.any(omega_a <= 0) or np.any(g < 0):
        raise ValueError("frequencies must be positive and g non-negative")
    s = omega_c**2 + omega_a**2
    r = np.sqrt((omega_c**2 - omega_a**2) ** 2 + 16.0 * g**2 * omega_c * omega_a)
    omega_plus = np.sqrt((s + r) / 2.0)
    omega_minus_squared = (s - r) / 2.0
    if omega_plus.ndim == 0:
        return float(omega_plus), float(omega_minus_squared)
    return omega_plus, omega_minus_squared


def bosonic_srpt_condition(derived: DerivedLinear) -> bool:
    """True when the coupling exceeds the critical value, 4 g^2 > omega_c omega_a."""
    return 4.0 * derived.g**2 > derived.omega_c * derived.omega_a


def classical_critical_inductance(params: CircuitParams) -> float:
    """Resonator inductance at the classical bifurcation, L_J - L_g (henry)."""
    return params.L_J - params.L_g


def inductive_energy(phi, psis, params: CircuitParams):
    """Total inductive energy of the chain at given node fluxes (joule).

    phi is the resonator flux, psis the junction branch fluxes. params.N
    must match len(psis); the chain resonator inductance is L_R0 / N.
    """
    psis = np.asarray(psis, dtype=float)
    if psis.ndim != 1 or psis.size == 0:
        raise ValueError("psis must be a non-empty 1d sequence of branch fluxes")
    if params.N is None or params.N != psis.size:
        raise ValueError(f"params.N = {params.N} must equal len(psis) = {psis.size}")
    L_R = params.L_R0 / params.N
    branch = (psis - phi) ** 2 / (2.0 * params.L_g) + params.E_J * np.cos(TWO_PI * psis / PHI0)
    return float(phi**2 / (2.0 * L_R) + np.sum(branch))


def constraint_slope(params: CircuitParams) -> float:
    """Slope of the branch-flux line psi = (1 + L_g / L_R0) phi.

    Eliminating the resonator flux by its own stationarity condition puts
    every branch at the same flux on this line.
    """
    return 1.0 + params.L_g / params.L_R0


def constrained_potential(phi, params: CircuitParams, normalized=False):
    """Inductive energy per branch along the constraint line, as a function of phi.

    With psi = (1 + L_g / L_R0) phi the per-branch energy no longer depends
    on N. ``normalized=True`` divides by E_J.
    """
    phi = np.asarray(phi, dtype=float)
    c = constraint_slope(params)
    psi = c * phi
    u = (
        phi**2 / (2.0 * params.L_R0)
        + (psi - phi) ** 2 / (2.0 * params.L_g)
        + params.E_J * np.cos(TWO_PI * psi / PHI0)
    )
    out = u / params.E_J if normalized else u
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ClassicalMinimum:
    """Global minimum of the constrained potential on the phi >= 0 branch.

    phi0, psi0        : minimizing fluxes (weber); zero in the normal phase
    energy_per_atom : potential value at the minimum (joule)
    superradiant      : True when the minimum sits at phi0 > 0
    """

    phi0: float
    psi0: float
    energy_per_atom: float
    superradiant: bool


def classical_minimum(params: CircuitParams, grid_points=4096) -> ClassicalMinimum:
    """Locate the classical ground configuration by grid scan plus refinement.

    The search window 2 pi phi / Phi0 in [0, 2 pi / (1 + L_g / L_R0)] is
    twice as wide as the half period the branch phase can reach, so the
    global minimum cannot escape it. Golden-section refinement sharpens the
    best grid cell to a relative tolerance of 1e-10; minimizers below
    1e-6 Phi0 snap to exactly zero.
    """
    from .minimize import scan_then_refine

    c = constraint_slope(params)
    phi_hi = PHI0 / c

    def f(phi):
        return constrained_potential(phi, params)

    phi0, _ = scan_then_refine(f, 0.0, phi_hi, coarse_points=grid_points, rtol=1e-10)
    # Below or exactly at the critical inductance the origin is the true
    # minimum; the refined value there is float noise on a flat bottom.
    if params.L_R0 <= classical_critical_inductance(params):
        phi0 = 0.0
    elif phi0 < SNAP_FRACTION * PHI0:
        phi0 = 0.0
    return ClassicalMinimum(
        phi0=phi0,
        psi0=c * phi0,
        energy_per_atom=constrained_potential(phi0, params),
        superradiant=phi0 > 0.0,
    )
