"""Sparse exact diagonalization of the photon-junction chain at finite N.

The Hilbert space is a product of number states, mode 0 the resonator
photon and modes 1..N the junction branches. Total excitation parity is
conserved, so each sector is diagonalized separately; the ground state
lives in the even sector. The Hamiltonian splits into three parts whose
matrix structure does not depend on the resonator inductance:

    H = hbar omega_c (n_ph + 1/2) + sum_j H_atom(j) - (hbar g / sqrt(N)) V

with V = sum_j (a + a^dag)(b_j + b_j^dag). A sector model is therefore
assembled once and swept over L_R0 by rescaling two coefficients.

Branches carry either the quartic expansion of the flux-periodic potential
(default, sparse, bandwidth 4 per atom) or its exact cosine matrix (dense
per-atom block, limited to N <= 2); comparing the two bounds the
truncation error of the quartic form.
"""

import math
import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import fock
from .circuit import TWO_PI, CircuitParams, DerivedLinear, derive_linear
from .constants import PHI0, hbar
from .errors import ConfigError, ConvergenceError

# Below this dimension a dense solve is cheaper and ARPACK may not even
# have room for its Krylov basis.
_DENSE_FLOOR = 24

# Accepted eigenpair residual, relative to the Hamiltonian inf-norm.
_RESIDUAL_RTOL = 1e-9

# Ground energy of the single cosine branch, cached per branch parameters.
_EPS_A0_CACHE: dict = {}


@dataclass(frozen=True)
class EdConfig:
    """Sector definition for the finite-N diagonalization.

    n_atoms         : number of junction branches N
    per_mode_cutoff : highest occupation retained in any single mode
    total_cutoff    : highest total occupation retained
    parity          : 0 for the even sector, 1 for the odd
    n_eigenvalues   : eigenpairs requested from the bottom of the sector
    quartic         : quartic branch potential when True, exact cosine
                      block otherwise (N <= 2 only, the block is dense)
    max_dimension   : refuse to materialize sectors larger than this
    seed            : seed of the deterministic Lanczos start vector
    """

    n_atoms: int
    per_mode_cutoff: int = 24
    total_cutoff: int = 48
    parity: int = 0
    n_eigenvalues: int = 6
    quartic: bool = True
    max_dimension: int = 400_000
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n_atoms, int) or self.n_atoms < 1:
            raise ConfigError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")
        if not isinstance(self.per_mode_cutoff, int) or self.per_mode_cutoff < 2:
            raise ConfigError(f"per_mode_cutoff must be an integer >= 2, got {self.per_mode_cutoff!r}")
        if not isinstance(self.total_cutoff, int) or self.total_cutoff < 2:
            raise ConfigError(f"total_cutoff must be an integer >= 2, got {self.total_cutoff!r}")
        if self.per_mode_cutoff > self.total_cutoff:
            raise ConfigError(
                f"per_mode_cutoff {self.per_mode_cutoff} exceeds total_cutoff {self.total_cutoff}"
            )
        if self.parity not in (0, 1):
            raise ConfigError(f"parity must be 0 or 1, got {self.parity!r}")
        if not isinstance(self.n_eigenvalues, int) or self.n_eigenvalues < 1:
            raise ConfigError(f"n_eigenvalues must be a positive integer, got {self.n_eigenvalues!r}")
        if not self.quartic and self.n_atoms > 2:
            raise ConfigError("the cosine branch potential makes dense per-atom blocks; use n_atoms <= 2")
        if self.max_dimension < 1:
            raise ConfigError(f"max_dimension must be positive, got {self.max_dimension!r}")

    def sector(self, parity: int) -> "EdConfig":
        return replace(self, parity=parity)


def count_sector_dimension(n_modes: int, per_mode_cutoff: int, total_cutoff: int, parity: int) -> int:
    """Number of occupation vectors in the sector, without materializing them."""
    counts = np.zeros(total_cutoff + 1, dtype=np.int64)
    counts[0] = 1
    window = per_mode_cutoff + 1
    for _ in range(n_modes):
        acc = np.cumsum(counts)
        shifted = np.zeros_like(acc)
        if window <= total_cutoff:
            shifted[window:] = acc[:-window]
        counts = acc - shifted
    return int(counts[parity::2].sum())


@dataclass(frozen=True)
class BasisIndex:
    """Occupation vectors of one parity sector with a sorted integer index.

    Vectors are lexicographic with mode 0 most significant, so the
    mixed-radix keys (radix per_mode_cutoff + 1) are ascending and a
    neighbor lookup is a binary search.
    """

    occupations: np.ndarray
    per_mode_cutoff: int
    total_cutoff: int
    parity: int
    keys: np.ndarray
    radix_powers: np.ndarray

    @property
    def dim(self) -> int:
        return self.keys.size

    def index_of(self, occupations) -> tuple:
        """Positions of occupation rows in the basis plus a validity mask."""
        occ = np.atleast_2d(np.asarray(occupations, dtype=np.int64))
        keys = occ @ self.radix_powers
        pos = np.searchsorted(self.keys, keys)
        pos_c = np.minimum(pos, self.dim - 1)
        valid = (
            (self.keys[pos_c] == keys)
            & np.all(occ >= 0, axis=1)
            & np.all(occ <= self.per_mode_cutoff, axis=1)
        )
        return pos_c, valid


def build_basis(config: EdConfig) -> BasisIndex:
    """Enumerate the parity sector, guarded by config.max_dimension."""
    n_modes = config.n_atoms + 1
    dim = count_sector_dimension(n_modes, config.per_mode_cutoff, config.total_cutoff, config.parity)
    if dim == 0:
        raise ConfigError("sector is empty for these cutoffs")
    if dim > config.max_dimension:
        raise ConfigError(
            f"sector dimension {dim} exceeds max_dimension = {config.max_dimension}; "
            "raise the limit explicitly if this size is intended"
        )
    occ = np.zeros((1, 0), dtype=np.int32)
    sums = np.zeros(1, dtype=np.int64)
    for _ in range(n_modes):
        kmax = np.minimum(config.per_mode_cutoff, config.total_cutoff - sums)
        counts = kmax + 1
        rows = np.repeat(np.arange(occ.shape[0]), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        k = np.arange(counts.sum()) - starts
        occ = np.concatenate([occ[rows], k[:, None].astype(np.int32)], axis=1)
        sums = sums[rows] + k
    keep = (sums % 2) == config.parity
    occ = occ[keep]
    radix = np.int64(config.per_mode_cutoff + 1)
    powers = radix ** np.arange(n_modes - 1, -1, -1, dtype=np.int64)
    keys = occ.astype(np.int64) @ powers
    occ.setflags(write=False)
    keys.setflags(write=False)
    return BasisIndex(
        occupations=occ,
        per_mode_cutoff=config.per_mode_cutoff,
        total_cutoff=config.total_cutoff,
        parity=config.parity,
        keys=keys,
        radix_powers=powers,
    )


def _atom_block(config: EdConfig, params: CircuitParams) -> np.ndarray:
    """Per-branch Hamiltonian on per_mode_cutoff + 1 levels, dense."""
    R = config.per_mode_cutoff + 1
    derived = derive_linear(params)
    if config.quartic:
        lam2 = (TWO_PI / PHI0) ** 2 * hbar * derived.Z_a / 2.0
        ladder = np.diag(np.sqrt(np.arange(1.0, R)), k=1)
        q = ladder + ladder.T
        Q4 = np.linalg.matrix_power(q, 4)
        n = np.arange(R, dtype=float)
        return np.diag(hbar * derived.omega_a * (n + 0.5) + params.E_J) + (
            params.E_J * lam2**2 / 24.0
        ) * Q4
    ops = fock.build_operators(derived, R)
    return fock.atom_hamiltonian(ops, params)


def _locate(basis: BasisIndex, new_keys: np.ndarray) -> np.ndarray:
    """Positions of keys that are guaranteed to exist in the sector."""
    cols = np.searchsorted(basis.keys, new_keys)
    inside = cols < basis.dim
    if not inside.all() or not np.array_equal(basis.keys[cols], new_keys):
        raise RuntimeError("in-sector hop target missing from basis index")
    return cols


def _gather_offdiagonal(basis, mode, delta, amplitudes):
    """COO triplets for an occupation hop of +delta in one mode.

    amplitudes has one entry per basis state, the matrix element from that
    state; entries whose target leaves the sector are dropped.
    """
    occ_m = basis.occupations[:, mode].astype(np.int64)
    totals = basis.occupations.sum(axis=1, dtype=np.int64)
    mask = (
        (occ_m + delta <= basis.per_mode_cutoff)
        & (totals + delta <= basis.total_cutoff)
        & (amplitudes != 0.0)
    )
    src = np.nonzero(mask)[0]
    if src.size == 0:
        return src, src, np.zeros(0)
    cols = _locate(basis, basis.keys[src] + delta * basis.radix_powers[mode])
    return src, cols, amplitudes[src]


def _atom_static_matrix(basis: BasisIndex, block: np.ndarray) -> sp.csr_matrix:
    """sum_j block(j) embedded in the sector, from the upper triangle of block."""
    dim = basis.dim
    n_modes = basis.occupations.shape[1]
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    for j in range(1, n_modes):
        occ_j = basis.occupations[:, j]
        diag += block[occ_j, occ_j]
        for delta in range(2, block.shape[0], 2):
            band = np.diagonal(block, offset=delta)
            if not np.any(band != 0.0):
                continue
            amp = np.zeros(dim)
            reach = occ_j <= block.shape[0] - 1 - delta
            amp[reach] = block[occ_j[reach], occ_j[reach] + delta]
            r, c, v = _gather_offdiagonal(basis, j, delta, amp)
            rows.append(r)
            cols.append(c)
            vals.append(v)
    upper = sp.coo_matrix(
        (np.concatenate(vals) if vals else np.zeros(0),
         (np.concatenate(rows) if rows else np.zeros(0, int),
          np.concatenate(cols) if cols else np.zeros(0, int))),
        shape=(dim, dim),
    ).tocsr()
    return upper + upper.T + sp.diags(diag).tocsr()


def _coupling_matrix(basis: BasisIndex) -> sp.csr_matrix:
    """V = sum_j (a + a^dag)(b_j + b_j^dag) embedded in the sector."""
    dim = basis.dim
    n_modes = basis.occupations.shape[1]
    occ0 = basis.occupations[:, 0].astype(np.int64)
    totals = basis.occupations.sum(axis=1, dtype=np.int64)
    rows, cols, vals = [], [], []
    for j in range(1, n_modes):
        occ_j = basis.occupations[:, j].astype(np.int64)
        # photon up, branch up: key strictly increases, upper triangle
        amp = np.sqrt((occ0 + 1.0) * (occ_j + 1.0))
        ok = (occ0 < basis.per_mode_cutoff) & (occ_j < basis.per_mode_cutoff) & (totals + 2 <= basis.total_cutoff)
        amp[~ok] = 0.0
        src = np.nonzero(amp != 0.0)[0]
        if src.size:
            rows.append(src)
            cols.append(_locate(basis, basis.keys[src] + basis.radix_powers[0] + basis.radix_powers[j]))
            vals.append(amp[src])
        # photon up, branch down: key still increases, mode 0 dominates
        amp = np.sqrt((occ0 + 1.0) * occ_j)
        ok = (occ0 < basis.per_mode_cutoff) & (occ_j >= 1)
        amp[~ok] = 0.0
        src = np.nonzero(amp != 0.0)[0]
        if src.size:
            rows.append(src)
            cols.append(_locate(basis, basis.keys[src] + basis.radix_powers[0] - basis.radix_powers[j]))
            vals.append(amp[src])
    upper = sp.coo_matrix(
        (np.concatenate(vals) if vals else np.zeros(0),
         (np.concatenate(rows) if rows else np.zeros(0, int),
          np.concatenate(cols) if cols else np.zeros(0, int))),
        shape=(dim, dim),
    ).tocsr()
    return upper + upper.T


@dataclass(frozen=True)
class SectorModel:
    """L_R0-independent pieces of one parity sector.

    photon_number is the diagonal n_ph + 1/2 (dimensionless), atom_static
    the summed branch Hamiltonians (joule), coupling the bare V. The
    branch parameters the model was built for are recorded so a sweep
    cannot silently reuse it with different junctions.
    """

    config: EdConfig
    basis: BasisIndex
    photon_number: np.ndarray
    atom_static: sp.csr_matrix
    coupling: sp.csr_matrix
    atom_key: tuple


def build_sector_model(params: CircuitParams, config: EdConfig) -> SectorModel:
    basis = build_basis(config)
    block = _atom_block(config, params)
    photon_number = basis.occupations[:, 0].astype(float) + 0.5
    photon_number.setflags(write=False)
    return SectorModel(
        config=config,
        basis=basis,
        photon_number=photon_number,
        atom_static=_atom_static_matrix(basis, block),
        coupling=_coupling_matrix(basis),
        atom_key=(params.L_J, params.L_g, params.C_J),
    )


def hamiltonian_at(model: SectorModel, params: CircuitParams) -> sp.csr_matrix:
    """Sector Hamiltonian at the resonator inductance carried by params, joule."""
    if (params.L_J, params.L_g, params.C_J) != model.atom_key:
        raise ValueError("sector model was built for different branch parameters")
    derived = derive_linear(params)
    scale = hbar * derived.g / math.sqrt(model.config.n_atoms)
    H = sp.diags(hbar * derived.omega_c * model.photon_number) + model.atom_static - scale * model.coupling
    return H.tocsr()


def build_hamiltonian(
    config: EdConfig, params: CircuitParams, derived: DerivedLinear | None = None
) -> sp.csr_matrix:
    """One-shot sector Hamiltonian; prefer build_sector_model for sweeps.

    derived is accepted for interface symmetry with callers that already
    hold it; when given it must match derive_linear(params).
    """
    if derived is not None:
        check = derive_linear(params)
        if not (derived.omega_c == check.omega_c and derived.g == check.g):
            raise ValueError("derived quantities do not match params")
    return hamiltonian_at(build_sector_model(params, config), params)


def lowest_eigenpairs(matrix: sp.spmatrix, k: int, seed: int = 0):
    """k smallest eigenpairs of a sparse symmetric matrix, verified.

    Small sectors fall back to a dense solve; otherwise Lanczos runs from
    a seeded start vector so repeated calls agree bit for bit. Every pair
    must pass an inf-norm residual check or ConvergenceError is raised.
    """
    dim = matrix.shape[0]
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > dim:
        raise ValueError(f"requested {k} eigenpairs from a dimension-{dim} sector")
    if dim < max(2 * k + 2, _DENSE_FLOOR):
        w, v = np.linalg.eigh(matrix.toarray())
        w, v = w[:k], v[:, :k]
    else:
        # ARPACK accepts a Ritz pair once its bound drops below
        # tol * max(eps^(2/3), |ritz|); entries of order 1e-21 J sit far
        # under that absolute floor, so work on a unit-normalized copy.
        unit = np.abs(matrix).sum(axis=1).max() or 1.0
        v0 = np.random.default_rng(seed).uniform(-1.0, 1.0, size=dim)
        try:
            w, v = eigsh(matrix / unit, k=k, which="SA", v0=v0)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos did not converge: {exc}") from exc
        w = w * unit
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    scale = np.abs(matrix).sum(axis=1).max()
    resid = matrix @ v - v * w
    worst = np.abs(resid).max()
    if worst > _RESIDUAL_RTOL * scale:
        raise ConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds {_RESIDUAL_RTOL:.0e} * |H|_inf = {_RESIDUAL_RTOL * scale:.3e}"
        )
    return w, v


@dataclass(frozen=True)
class SectorEigen:
    """Lowest eigenpairs of one sector plus the ground-state photon number."""

    parity: int
    dim: int
    values: np.ndarray
    vectors: np.ndarray
    photon_number: float


def solve_sector(model: SectorModel, params: CircuitParams, seed: int | None = None) -> SectorEigen:
    H = hamiltonian_at(model, params)
    k = min(model.config.n_eigenvalues, H.shape[0])
    w, v = lowest_eigenpairs(H, k, seed=model.config.seed if seed is None else seed)
    ground = v[:, 0]
    n_ph = float(np.sum(ground**2 * (model.photon_number - 0.5)))
    return SectorEigen(
        parity=model.config.parity,
        dim=H.shape[0],
        values=w,
        vectors=v,
        photon_number=n_ph,
    )


def reference_branch_energy(params: CircuitParams, M: int = 60) -> float:
    """Ground energy of the isolated cosine branch, joule (cached)."""
    key = (params.L_J, params.L_g, params.C_J, M)
    value = _EPS_A0_CACHE.get(key)
    if value is None:
        ops = fock.build_operators(derive_linear(params), M)
        value = fock.atom_spectrum(ops, params).epsilon_a0
        _EPS_A0_CACHE[key] = value
    return value


@dataclass(frozen=True)
class EdResult:
    """Ground-sector observables at one resonator inductance.

    Energies in joule. transition_even is the gap to the second even
    state, transition_odd the gap to the lowest odd state, delta_eps the
    ground energy per branch relative to photon zero point plus isolated
    branch. The ascending sector eigenvalues are kept for callers that
    want more of the spectrum than the two gaps.
    """

    E_g: float
    photon_number_per_atom: float
    transition_even: float
    transition_odd: float
    delta_eps: float
    eigenvalues_even: np.ndarray
    eigenvalues_odd: np.ndarray
    dim_even: int
    dim_odd: int


def observables(
    config: EdConfig,
    params: CircuitParams,
    even: SectorEigen,
    odd: SectorEigen,
    epsilon_a0: float | None = None,
) -> EdResult:
    """Combine the two parity sectors into the reported observables.

    The ground state must be even; an odd state below it means the
    truncation broke the parity structure and the result would be
    meaningless, so that raises instead of returning.
    """
    if even.parity != 0 or odd.parity != 1:
        raise ValueError("pass the even sector first and the odd sector second")
    E_g = float(even.values[0])
    if odd.values[0] < E_g:
        raise ConvergenceError(
            "odd sector fell below the even ground state; cutoffs are too tight"
        )
    if even.values.size < 2:
        raise ValueError("need at least two even eigenvalues for the even transition")
    if epsilon_a0 is None:
        epsilon_a0 = reference_branch_energy(params)
    omega_c = derive_linear(params).omega_c
    delta = (E_g - hbar * omega_c / 2.0) / config.n_atoms - epsilon_a0
    return EdResult(
        E_g=E_g,
        photon_number_per_atom=even.photon_number / config.n_atoms,
        transition_even=float(even.values[1] - E_g),
        transition_odd=float(odd.values[0] - E_g),
        delta_eps=float(delta),
        eigenvalues_even=even.values,
        eigenvalues_odd=odd.values,
        dim_even=even.dim,
        dim_odd=odd.dim,
    )


@dataclass(frozen=True)
class EdScan:
    """Observables along a resonator-inductance sweep at fixed N."""

    config: EdConfig
    L_R0_values: np.ndarray
    E_g: np.ndarray
    photon_number_per_atom: np.ndarray
    transition_even: np.ndarray
    transition_odd: np.ndarray
    delta_eps: np.ndarray
    dim_even: int
    dim_odd: int


def scan(params: CircuitParams, config: EdConfig, L_R0_values) -> EdScan:
    """Assemble both parity sectors once, then sweep the inductance."""
    L_vals = np.asarray(L_R0_values, dtype=float)
    if L_vals.ndim != 1 or L_vals.size == 0:
        raise ValueError("L_R0_values must be a non-empty 1d array")
    even_model = build_sector_model(params, config.sector(0))
    odd_model = build_sector_model(params, config.sector(1))
    eps_a0 = reference_branch_energy(params)
    fields = {name: np.empty(L_vals.size) for name in
              ("E_g", "photon_number_per_atom", "transition_even", "transition_odd", "delta_eps")}
    for i, L in enumerate(L_vals):
        p = params.replace(L_R0=float(L))
        res = observables(
            config,
            p,
            solve_sector(even_model, p),
            solve_sector(odd_model, p),
            epsilon_a0=eps_a0,
        )
        for name in fields:
            fields[name][i] = getattr(res, name)
    even_dim = even_model.basis.dim
    odd_dim = odd_model.basis.dim
    return EdScan(config=config, L_R0_values=L_vals, dim_even=even_dim, dim_odd=odd_dim, **fields)


@dataclass(frozen=True)
class TruncationStudy:
    """Quartic-versus-cosine comparison at two levels of the problem.

    The atom_* fields compare the isolated branch spectra, where the
    quartic replacement is a controlled approximation: lowest n_levels-1
    excitation energies of each model at a converged level count and
    their worst relative deviation.

    The remaining fields compare the full coupled system along the sweep.
    transitions arrays have shape (len(L_R0_values), n_levels - 1) and
    hold excitation energies above the even ground state, both sectors
    merged; max_rel_deviation is per inductance, worst over transitions.
    Near the transition these deviations grow far beyond the atomic
    figure because the two models place the gap dip at slightly
    different inductances, so the dip itself is compared separately:
    even_gap tracks the lowest even-sector transition per model,
    dip_value_shift the relative gap difference at each model's own
    minimum, dip_location_shift the relative displacement of those
    minima (both meaningful only when the sweep brackets the dip).
    """

    L_R0_values: np.ndarray
    atom_quartic_transitions: np.ndarray
    atom_cosine_transitions: np.ndarray
    atom_max_rel_deviation: float
    quartic_transitions: np.ndarray
    cosine_transitions: np.ndarray
    max_rel_deviation: np.ndarray
    worst: float
    quartic_even_gap: np.ndarray
    cosine_even_gap: np.ndarray
    quartic_dip_L: float
    cosine_dip_L: float
    dip_value_shift: float
    dip_location_shift: float


def truncation_error_study(
    params: CircuitParams,
    n_atoms: int,
    L_R0_values,
    per_mode_cutoff: int = 24,
    total_cutoff: int = 48,
    n_levels: int = 8,
    atom_levels: int = 40,
    seed: int = 0,
) -> TruncationStudy:
    """Bound the quartic-potential truncation error against the exact cosine.

    Only defined for n_atoms <= 2 where the cosine blocks stay tractable.
    atom_levels sets the isolated-branch comparison dimension; it must be
    large enough that the n_levels-th branch transition has converged,
    otherwise basis-edge error masquerades as model error.
    """
    L_vals = np.asarray(L_R0_values, dtype=float)
    if L_vals.ndim != 1 or L_vals.size == 0:
        raise ValueError("L_R0_values must be a non-empty 1d array")
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")
    if atom_levels < n_levels + 2:
        raise ValueError(f"atom_levels {atom_levels} too small for {n_levels} levels")
    atom = {}
    for label, quartic in (("quartic", True), ("cosine", False)):
        block_config = EdConfig(
            n_atoms=1,
            per_mode_cutoff=atom_levels - 1,
            total_cutoff=atom_levels - 1,
            quartic=quartic,
        )
        w = np.linalg.eigvalsh(_atom_block(block_config, params))
        atom[label] = w[1:n_levels] - w[0]
    atom_rel = float((np.abs(atom["quartic"] - atom["cosine"]) / atom["cosine"]).max())
    base = dict(
        n_atoms=n_atoms,
        per_mode_cutoff=per_mode_cutoff,
        total_cutoff=total_cutoff,
        n_eigenvalues=n_levels,
        seed=seed,
    )
    transitions = {}
    even_gaps = {}
    for label, quartic in (("quartic", True), ("cosine", False)):
        config = EdConfig(quartic=quartic, **base)
        even_model = build_sector_model(params, config.sector(0))
        odd_model = build_sector_model(params, config.sector(1))
        rows = np.empty((L_vals.size, n_levels - 1))
        gaps = np.empty(L_vals.size)
        for i, L in enumerate(L_vals):
            p = params.replace(L_R0=float(L))
            even = solve_sector(even_model, p)
            odd = solve_sector(odd_model, p)
            if odd.values[0] < even.values[0]:
                raise ConvergenceError("odd sector fell below the even ground state")
            merged = np.sort(np.concatenate([even.values, odd.values]))
            rows[i] = merged[1:n_levels] - merged[0]
            gaps[i] = even.values[1] - even.values[0]
        transitions[label] = rows
        even_gaps[label] = gaps
    rel = np.abs(transitions["quartic"] - transitions["cosine"]) / transitions["cosine"]
    per_L = rel.max(axis=1)
    i_q = int(np.argmin(even_gaps["quartic"]))
    i_c = int(np.argmin(even_gaps["cosine"]))
    gap_q, gap_c = even_gaps["quartic"][i_q], even_gaps["cosine"][i_c]
    return TruncationStudy(
        L_R0_values=L_vals,
        atom_quartic_transitions=atom["quartic"],
        atom_cosine_transitions=atom["cosine"],
        atom_max_rel_deviation=atom_rel,
        quartic_transitions=transitions["quartic"],
        cosine_transitions=transitions["cosine"],
        max_rel_deviation=per_L,
        worst=float(per_L.max()),
        quartic_even_gap=even_gaps["quartic"],
        cosine_even_gap=even_gaps["cosine"],
        quartic_dip_L=float(L_vals[i_q]),
        cosine_dip_L=float(L_vals[i_c]),
        dip_value_shift=float(abs(gap_q - gap_c) / gap_c),
        dip_location_shift=float(abs(L_vals[i_q] - L_vals[i_c]) / L_vals[i_c]),
    )


def export_matrix(path: str, matrix: sp.spmatrix) -> str:
    """Write a sparse matrix in Matrix Market format; returns the real path."""
    from scipy.io import mmwrite

    target = path if os.path.splitext(path)[1] else path + ".mtx"
    mmwrite(target, sp.coo_matrix(matrix))
    return target
