"""Named internal consistency checks, runnable from the command line.

Each check exercises one structural invariant of the package against an
independent formulation: closed forms, finite differences, dense linear
algebra, or scaling identities. They are meant as a quick field check of
an installation, not as a replacement for the test suite.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import ed, fluct, fock, meanfield
from .circuit import (
    CircuitParams,
    bosonic_srpt_condition,
    classical_critical_inductance,
    classical_minimum,
    constrained_potential,
    constraint_slope,
    derive_linear,
    inductive_energy,
    polariton_frequencies,
)
from .constants import PHI0, h, hbar
from .errors import ConfigError


def reference_params(N: int | None = None) -> CircuitParams:
    """The reference circuit used by the checks and the CLI defaults."""
    return CircuitParams(L_J=0.75e-9, L_g=0.45e-9, C_J=24e-15, C_R0=2e-15, L_R0=0.45e-9, N=N)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _require(condition: bool, message: str):
    if not condition:
        raise RuntimeError(message)


def _random_params(rng) -> CircuitParams:
    L_J = rng.uniform(0.3, 3.0) * 1e-9
    L_g = rng.uniform(0.1, 0.9) * L_J
    return CircuitParams(
        L_J=L_J,
        L_g=L_g,
        C_J=rng.uniform(5.0, 100.0) * 1e-15,
        C_R0=rng.uniform(0.5, 20.0) * 1e-15,
        L_R0=rng.uniform(0.05, 3.0) * 1e-9,
    )


def _check_linear_threshold_equivalence(rng):
    worst_margin = math.inf
    for _ in range(200):
        p = _random_params(rng)
        coupled = bosonic_srpt_condition(derive_linear(p))
        inductive = p.L_R0 > classical_critical_inductance(p)
        _require(coupled == inductive, f"criteria disagree at {p}")
        worst_margin = min(worst_margin, abs(p.L_R0 - classical_critical_inductance(p)))
    return f"200 random circuits agree, closest margin {worst_margin:.2e} H"


def _check_vieta(rng):
    worst = 0.0
    for _ in range(200):
        wc = rng.uniform(1e10, 1e13)
        wa = rng.uniform(1e10, 1e13)
        g = rng.uniform(0.0, 2.0) * math.sqrt(wc * wa)
        wp, wm2 = polariton_frequencies(wc, wa, g)
        s = wp**2 + wm2
        prod = wp**2 * wm2
        e1 = abs(s - (wc**2 + wa**2)) / (wc**2 + wa**2)
        e2 = abs(prod - (wc**2 * wa**2 - 4.0 * g**2 * wc * wa)) / (wc**2 * wa**2)
        worst = max(worst, e1, e2)
    _require(worst < 1e-10, f"root identities violated at relative {worst:.2e}")
    return f"sum and product identities hold to {worst:.2e}"


def _check_gaussian_cosine(rng):
    p = reference_params()
    ops = fock.build_operators(derive_linear(p), 60)
    lam2 = (2.0 * math.pi / PHI0) ** 2 * hbar * ops.Z_a / 2.0
    expected = math.exp(-lam2 / 2.0)
    got = float(ops.cos_op[0, 0])
    _require(abs(got - expected) < 1e-8, f"vacuum cosine {got} vs closed form {expected}")
    return f"vacuum cosine average {got:.10f} matches exp(-lambda^2/2)"


def _check_cos_sin_unitarity(rng):
    p = reference_params()
    ops = fock.build_operators(derive_linear(p), 40)
    s = fock.sin_operator(ops)
    dev = np.abs(ops.cos_op @ ops.cos_op + s @ s - np.eye(40)).max()
    _require(dev < 1e-12, f"cos^2 + sin^2 deviates from identity by {dev:.2e}")
    return f"cos^2 + sin^2 = 1 within {dev:.2e}"


def _check_commutator_interior(rng):
    p = reference_params()
    M = 30
    ops = fock.build_operators(derive_linear(p), M)
    comm = ops.psi_op @ ops.rho_op - ops.rho_op @ ops.psi_op
    interior = np.diag(comm)[: M - 1]
    dev = np.abs(interior - 1j * hbar).max() / hbar
    off = np.abs(comm - np.diag(np.diag(comm))).max() / hbar
    _require(dev < 1e-12 and off < 1e-12, f"commutator defect {dev:.2e}, off-diagonal {off:.2e}")
    return f"[psi, rho] = i hbar on the first {M - 1} levels within {max(dev, off):.2e}"


def _check_parity_block_structure(rng):
    p = reference_params()
    ops = fock.build_operators(derive_linear(p), 40)
    H = fock.atom_hamiltonian(ops, p)
    parity = np.where(np.arange(40) % 2 == 0, 1.0, -1.0)
    dev = np.abs(H - parity[:, None] * H * parity[None, :]).max() / np.abs(H).max()
    _require(dev < 1e-12, f"branch Hamiltonian breaks parity at relative {dev:.2e}")
    return f"branch Hamiltonian commutes with parity within {dev:.2e}"


def _check_free_energy_convergence(rng):
    p = reference_params()
    report = meanfield.free_energy_convergence_check(p, 0.0, h * 20e9)
    _require(report.passed, f"increments {report.increments} not convergent")
    final = report.increments[-1] / p.E_J
    return f"final increment {final:.2e} E_J with shrinking steps"


def _check_action_derivative(rng):
    p = reference_params()
    slope = constraint_slope(p)
    worst = 0.0
    for kT in (0.0, h * 30e9):
        for frac in (0.05, 0.2, 0.35):
            phi = frac * (PHI0 / 2.0) / slope
            step = 1e-6 * PHI0
            fd = (
                meanfield.action_per_atom(phi + step, kT, p)
                - meanfield.action_per_atom(phi - step, kT, p)
            ) / (2.0 * step)
            res = meanfield.selfconsistency_residual(phi, kT, p)
            scale = max(abs(fd), abs(res), PHI0 / p.L_J)
            worst = max(worst, abs(fd - res) / scale)
    _require(worst < 1e-5, f"derivative mismatch at relative {worst:.2e}")
    return f"finite-difference action slope matches residual to {worst:.2e}"


def _check_stationarity(rng):
    p = reference_params()
    sol = meanfield.solve(p, 0.0)
    _require(sol.converged and sol.superradiant, f"unexpected solution {sol}")
    photon, junction = fluct.stationarity_check(p, sol)
    unit = PHI0 / p.L_J
    worst = max(abs(photon), abs(junction)) / unit
    _require(worst < 1e-8, f"stationarity residual {worst:.2e} in natural units")
    return f"equilibrium force balance at {worst:.2e} Phi0/L_J"


def _check_dense_vs_sparse(rng):
    p = reference_params()
    config = ed.EdConfig(n_atoms=1, per_mode_cutoff=8, total_cutoff=16, n_eigenvalues=6)
    H = ed.build_hamiltonian(config, p)
    w_sparse, _ = ed.lowest_eigenpairs(H, 6, seed=int(rng.integers(2**31)))
    w_dense = np.linalg.eigvalsh(H.toarray())[:6]
    dev = np.abs(w_sparse - w_dense).max() / np.abs(w_dense).max()
    _require(dev < 1e-10, f"sparse and dense spectra differ at relative {dev:.2e}")
    return f"Lanczos matches dense diagonalization to {dev:.2e} on dim {H.shape[0]}"


def _check_ed_vacuum_diagonal(rng):
    p = reference_params()
    config = ed.EdConfig(n_atoms=2, per_mode_cutoff=6, total_cutoff=12)
    model = ed.build_sector_model(p, config)
    H = ed.hamiltonian_at(model, p)
    derived = derive_linear(p)
    lam2 = (2.0 * math.pi / PHI0) ** 2 * hbar * derived.Z_a / 2.0
    expected = hbar * derived.omega_c / 2.0 + config.n_atoms * (
        hbar * derived.omega_a / 2.0 + p.E_J + p.E_J * lam2**2 / 8.0
    )
    got = H[0, 0]
    dev = abs(got - expected) / abs(expected)
    _require(dev < 1e-12, f"vacuum diagonal {got} vs closed form {expected}")
    return f"vacuum diagonal matches closed form to {dev:.2e}"


def _check_ed_symmetry(rng):
    p = reference_params()
    for quartic in (True, False):
        config = ed.EdConfig(n_atoms=2, per_mode_cutoff=8, total_cutoff=12, quartic=quartic, parity=1)
        H = ed.build_hamiltonian(config, p)
        asym = (H - H.T).nnz
        _require(asym == 0, f"Hamiltonian has {asym} asymmetric entries (quartic={quartic})")
    return "both branch potentials give exactly symmetric sector matrices"


def _check_classical_threshold(rng):
    p = reference_params()
    L_c = classical_critical_inductance(p)
    below = classical_minimum(p.replace(L_R0=0.95 * L_c))
    above = classical_minimum(p.replace(L_R0=1.05 * L_c))
    _require(not below.superradiant, "order parameter nonzero below the classical threshold")
    _require(above.superradiant, "order parameter missing above the classical threshold")
    drop = (constrained_potential(0.0, p.replace(L_R0=1.05 * L_c)) - above.energy_per_atom) / p.E_J
    return f"bifurcation brackets L_J - L_g, energy gain {drop:.2e} E_J just above"


def _check_renormalized_spectrum(rng):
    p = reference_params()
    sol = meanfield.solve(p, 0.0)
    ren = fluct.renormalize(p, sol)
    wp, wm = fluct.fluctuation_spectrum(ren, derive_linear(p))
    _require(0.0 < wm < wp, f"spectrum ordering broken: {wm}, {wp}")
    _require(ren.cos_avg < 1.0, f"cosine average {ren.cos_avg} not reduced")
    return f"modes at {wm / (2e9 * math.pi):.3f} and {wp / (2e9 * math.pi):.3f} GHz, both real"


def _check_truncation_study(rng):
    p = reference_params(N=1)
    study = ed.truncation_error_study(
        p, 1, np.array([0.45e-9]), per_mode_cutoff=16, total_cutoff=32
    )
    _require(
        study.atom_max_rel_deviation <= 0.03,
        f"quartic branch spectrum off by {study.atom_max_rel_deviation:.2%} from the cosine",
    )
    return (
        f"branch transitions agree within {study.atom_max_rel_deviation:.2%}; "
        f"coupled spectra differ up to {study.worst:.2%} at L_R0 = 0.45 nH"
    )


def _check_resonator_scaling(rng):
    p = reference_params()
    slope = constraint_slope(p)
    worst = 0.0
    for N in (1, 2, 5, 17):
        pN = p.replace(N=N)
        for frac in (0.0, 0.13, 0.41):
            phi = frac * PHI0 / slope
            per_branch = inductive_energy(phi, np.full(N, slope * phi), pN) / N
            ref = constrained_potential(phi, p)
            worst = max(worst, abs(per_branch - ref) / p.E_J)
    _require(worst < 1e-12, f"per-branch energy drifts with N by {worst:.2e} E_J")
    return f"per-branch energy independent of N within {worst:.2e} E_J"


CHECKS = {
    "linear-threshold-equivalence": _check_linear_threshold_equivalence,
    "vieta": _check_vieta,
    "gaussian-cosine": _check_gaussian_cosine,
    "cos-sin-unitarity": _check_cos_sin_unitarity,
    "commutator-interior": _check_commutator_interior,
    "parity-block-structure": _check_parity_block_structure,
    "free-energy-convergence": _check_free_energy_convergence,
    "action-derivative": _check_action_derivative,
    "stationarity": _check_stationarity,
    "dense-vs-sparse": _check_dense_vs_sparse,
    "ed-vacuum-diagonal": _check_ed_vacuum_diagonal,
    "ed-symmetry": _check_ed_symmetry,
    "classical-threshold": _check_classical_threshold,
    "renormalized-spectrum": _check_renormalized_spectrum,
    "truncation-study": _check_truncation_study,
    "resonator-scaling": _check_resonator_scaling,
}


def run_checks(names=None, seed: int = 0) -> list:
    """Run the named checks (all by default) and return their results."""
    if names is None:
        names = list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    results = []
    for name in names:
        rng = np.random.default_rng(seed)
        try:
            detail = CHECKS[name](rng)
            results.append(CheckResult(name=name, passed=True, detail=detail))
        except Exception as exc:
            results.append(CheckResult(name=name, passed=False, detail=f"{type(exc).__name__}: {exc}"))
    return results
