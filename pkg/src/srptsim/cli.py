"""Command-line interface.

Subcommands map one-to-one onto the analysis layers: classical
bifurcation, linearized spectrum, finite-temperature mean field,
fluctuation spectrum, finite-N diagonalization, and the internal check
registry. Circuit values are given in display units (nH, fF, GHz) on the
command line and in config files; everything is converted to SI at the
boundary. Output is CSV by default, one row per sweep point, flushed as
it is produced; --format json emits the same rows as a list of objects.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import ed, fluct, meanfield, validate
from .circuit import (
    CircuitParams,
    classical_critical_inductance,
    constrained_potential,
    derive_linear,
    polariton_frequencies,
)
from .constants import PHI0, h
from .errors import ConfigError, ConvergenceError

GHZ = 1e9
TWO_PI = 2.0 * math.pi

_REFERENCE = {"L_J": 0.75e-9, "L_g": 0.45e-9, "C_J": 24e-15, "C_R0": 2e-15, "L_R0": 0.45e-9}

_UNIT_SCALE = {
    "H": 1.0, "uH": 1e-6, "nH": 1e-9, "pH": 1e-12,
    "F": 1.0, "pF": 1e-12, "fF": 1e-15,
    "Hz": 1.0, "MHz": 1e6, "GHz": 1e9,
}
_KEY_UNITS = {
    "L_J": ("H", "uH", "nH", "pH"),
    "L_g": ("H", "uH", "nH", "pH"),
    "L_R0": ("H", "uH", "nH", "pH"),
    "C_J": ("F", "pF", "fF"),
    "C_R0": ("F", "pF", "fF"),
    "E_J": ("Hz", "MHz", "GHz"),
}


def load_config(path: str) -> dict:
    """Parse a flat ``key = value unit`` file into SI circuit values.

    Recognized keys: L_J, L_g, C_J, C_R0, L_R0, E_J (as a frequency,
    converted through h), and N. A bare number without a unit is taken as
    SI. E_J and L_J together are ambiguous and rejected.
    """
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value [unit]', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        tokens = rhs.split()
        if key == "N":
            if len(tokens) != 1:
                raise ConfigError(f"{path}:{lineno}: N takes a bare integer")
            try:
                values["N"] = int(tokens[0])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad integer {tokens[0]!r}") from exc
            continue
        if key not in _KEY_UNITS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if len(tokens) not in (1, 2):
            raise ConfigError(f"{path}:{lineno}: expected 'value [unit]', got {rhs.strip()!r}")
        try:
            number = float(tokens[0])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad number {tokens[0]!r}") from exc
        if len(tokens) == 2:
            unit = tokens[1]
            if unit not in _KEY_UNITS[key]:
                raise ConfigError(
                    f"{path}:{lineno}: unit {unit!r} not valid for {key}; "
                    f"use one of {', '.join(_KEY_UNITS[key])}"
                )
            number *= _UNIT_SCALE[unit]
        values[key] = number
    if "E_J" in values:
        if "L_J" in values:
            raise ConfigError(f"{path}: give either E_J or L_J, not both")
        values["L_J"] = (PHI0 / TWO_PI) ** 2 / (h * values.pop("E_J"))
    return values


def resolve_params(args, N=None) -> CircuitParams:
    """Merge defaults, config file, and explicit flags into CircuitParams."""
    values = dict(_REFERENCE)
    config_N = None
    if args.config:
        loaded = load_config(args.config)
        config_N = loaded.pop("N", None)
        values.update(loaded)
    for flag, scale in (("L_J", 1e-9), ("L_g", 1e-9), ("C_J", 1e-15), ("C_R0", 1e-15), ("L_R0", 1e-9)):
        v = getattr(args, flag)
        if v is not None:
            values[flag] = v * scale
    try:
        return CircuitParams(N=N if N is not None else config_N, **values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_list(text: str, scale: float) -> np.ndarray:
    try:
        vals = np.array([float(tok) * scale for tok in text.split(",") if tok.strip()])
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc
    if vals.size == 0:
        raise ConfigError(f"empty value list {text!r}")
    return vals


def lr0_sweep(args) -> np.ndarray:
    if args.lr0:
        return _parse_list(args.lr0, 1e-9)
    if args.lr0_steps < 1:
        raise ConfigError(f"--lr0-steps must be >= 1, got {args.lr0_steps}")
    return np.linspace(args.lr0_min, args.lr0_max, args.lr0_steps) * 1e-9


def kt_sweep(args) -> np.ndarray:
    if args.kt:
        return _parse_list(args.kt, h * GHZ)
    if args.kt_steps < 1:
        raise ConfigError(f"--kt-steps must be >= 1, got {args.kt_steps}")
    return np.linspace(args.kt_min, args.kt_max, args.kt_steps) * h * GHZ


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def _native(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def emit(args, columns, rows):
    """Write rows to --out (or stdout) as CSV or JSON, flushing per row."""
    rows = [list(r) for r in rows]
    if args.format == "json":
        payload = [{c: _native(v) for c, v in zip(columns, row)} for row in rows]
        text = json.dumps(payload, indent=2)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text, flush=True)
        return
    target = open(args.out, "w") if args.out else sys.stdout
    try:
        print(",".join(columns), file=target, flush=True)
        for row in rows:
            print(",".join(_fmt(v) for v in row), file=target, flush=True)
    finally:
        if args.out:
            target.close()


def cmd_classical(args) -> int:
    """Constrained inductive-energy curves, one per resonator inductance.

    Rows are (L_R0, 2 pi phi / Phi0, U/(N E_J)) so the curve family plots
    directly; the minimum location and the phase label come from the
    curve shape. The classical threshold is printed as a note.
    """
    params = resolve_params(args)
    L_vals = lr0_sweep(args)
    if args.phi_steps < 1:
        raise ConfigError(f"--phi-steps must be >= 1, got {args.phi_steps}")
    if args.phi_max < 0.0:
        raise ConfigError(f"--phi-max must be >= 0, got {args.phi_max}")
    x_vals = np.linspace(-args.phi_max, args.phi_max, args.phi_steps)
    rows = []
    for L in L_vals:
        p = params.replace(L_R0=float(L))
        for x in x_vals:
            u = constrained_potential(x * PHI0 / TWO_PI, p, normalized=True)
            rows.append((L / 1e-9, x, u))
    emit(args, ("L_R0_nH", "two_pi_phi_over_Phi0", "U_over_N_E_J"), rows)
    note = f"classical threshold: L_R0 = {classical_critical_inductance(params) / 1e-9:.6f} nH"
    print(note, file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_linear(args) -> int:
    params = resolve_params(args)
    if args.g_scale < 0.0:
        raise ConfigError(f"--g-scale must be >= 0, got {args.g_scale}")
    rows = []
    for L in lr0_sweep(args):
        d = derive_linear(params.replace(L_R0=float(L)))
        wp, wm2 = polariton_frequencies(d.omega_c, d.omega_a, args.g_scale * d.g)
        rows.append(
            (
                L / 1e-9,
                d.omega_c / (TWO_PI * GHZ),
                d.omega_a / (TWO_PI * GHZ),
                args.g_scale * d.g / (TWO_PI * GHZ),
                wp / (TWO_PI * GHZ),
                wm2 / (TWO_PI * GHZ) ** 2,
                wm2 < 0.0,
            )
        )
    emit(
        args,
        ("L_R0_nH", "omega_c_GHz", "omega_a_GHz", "g_GHz", "omega_plus_GHz",
         "omega_minus_squared_GHz2", "unstable"),
        rows,
    )
    return 0


def cmd_meanfield(args) -> int:
    params = resolve_params(args)
    L_vals = lr0_sweep(args)
    kT_vals = kt_sweep(args)
    grid = meanfield.phase_boundary(
        params, L_vals, kT_vals, M=args.fock_levels, threads=args.threads,
        max_evaluations=args.max_evals,
    )
    bad = np.argwhere(~grid.converged)
    if bad.size:
        j, i = bad[0]
        raise ConvergenceError(
            f"mean-field solve did not converge at L_R0 = {L_vals[i] / 1e-9:.6g} nH, "
            f"kT/h = {kT_vals[j] / (h * GHZ):.6g} GHz; raise --max-evals"
        )
    boundary_rows = [(L / 1e-9, grid.boundary[i] / (h * GHZ)) for i, L in enumerate(L_vals)]
    if args.boundary:
        emit(args, ("L_R0_nH", "kTc_over_h_GHz"), boundary_rows)
        return 0
    rows = []
    for i, L in enumerate(L_vals):
        for j, kT in enumerate(kT_vals):
            rows.append(
                (
                    L / 1e-9,
                    kT / (h * GHZ),
                    grid.amplitude[j, i],
                    grid.phi[j, i],
                    grid.phi[j, i] > 0.0,
                )
            )
    emit(args, ("L_R0_nH", "kBT_over_h_GHz", "alpha_over_sqrtN", "phi_th_Wb", "superradiant"), rows)
    if args.boundary_out:
        side = argparse.Namespace(**vars(args))
        side.out = args.boundary_out
        emit(side, ("L_R0_nH", "kTc_over_h_GHz"), boundary_rows)
    return 0


def cmd_fluct(args) -> int:
    params = resolve_params(args)
    scan = fluct.spectrum_scan(params, lr0_sweep(args), M=args.fock_levels)
    rows = []
    for i, L in enumerate(scan.L_R0_values):
        rows.append(
            (
                L / 1e-9,
                scan.omega_minus[i] / (TWO_PI * GHZ),
                scan.omega_plus[i] / (TWO_PI * GHZ),
                scan.omega_a_bar[i] / (TWO_PI * GHZ),
                scan.g_bar[i] / (TWO_PI * GHZ),
                scan.g_crit[i] / (TWO_PI * GHZ),
                scan.delta_eps[i] / (h * GHZ),
                "superradiant" if scan.superradiant[i] else "normal",
            )
        )
    emit(
        args,
        ("L_R0_nH", "omega_bar_minus_GHz", "omega_bar_plus_GHz", "omega_bar_a_GHz",
         "g_bar_GHz", "g_crit_GHz", "delta_eps_over_h_GHz", "phase"),
        rows,
    )
    return 0


def cmd_ed(args) -> int:
    try:
        n_list = [int(tok) for tok in str(args.n_atoms).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --n-atoms list {args.n_atoms!r}") from exc
    if not n_list:
        raise ConfigError("--n-atoms must name at least one atom count")
    L_vals = lr0_sweep(args)
    compare = {}
    if args.compare_meanfield:
        # Thermodynamic-limit reference values, shared across the N rows.
        p_inf = resolve_params(args)
        for L in L_vals:
            p = p_inf.replace(L_R0=float(L))
            sol = meanfield.solve(p, 0.0)
            ren = fluct.renormalize(p, sol)
            compare[float(L)] = (
                sol.alpha_over_sqrt_n**2,
                fluct.zero_point_shift(p, sol, ren) / (h * GHZ),
            )
    columns = ["N", "L_R0_nH", "dim_even", "dim_odd", "E_g_over_h_GHz", "photons_per_atom",
               "transition_even_GHz", "transition_odd_GHz", "delta_eps_over_h_GHz"]
    if compare:
        columns += ["photons_per_atom_mf", "delta_eps_over_h_GHz_mf"]
    rows = []
    for n_index, n_atoms in enumerate(n_list):
        params = resolve_params(args, N=n_atoms)
        config = ed.EdConfig(
            n_atoms=n_atoms,
            per_mode_cutoff=args.per_mode_cutoff,
            total_cutoff=args.total_cutoff,
            n_eigenvalues=args.k,
            quartic=args.potential == "quartic",
            max_dimension=args.max_dim,
            seed=args.seed,
        )
        if args.dump_matrix and n_index == 0:
            H = ed.build_hamiltonian(config.sector(0), params.replace(L_R0=float(L_vals[0])))
            written = ed.export_matrix(args.dump_matrix, H)
            print(f"even-sector Hamiltonian at L_R0 = {L_vals[0] / 1e-9:.6g} nH written to {written}",
                  file=sys.stderr)
        scan = ed.scan(params, config, L_vals)
        for i, L in enumerate(scan.L_R0_values):
            row = [
                config.n_atoms,
                L / 1e-9,
                scan.dim_even,
                scan.dim_odd,
                scan.E_g[i] / (h * GHZ),
                scan.photon_number_per_atom[i],
                scan.transition_even[i] / (h * GHZ),
                scan.transition_odd[i] / (h * GHZ),
                scan.delta_eps[i] / (h * GHZ),
            ]
            if compare:
                row += list(compare[float(L)])
            rows.append(row)
    emit(args, tuple(columns), rows)
    return 0


def cmd_validate(args) -> int:
    names = [tok.strip() for tok in args.only.split(",") if tok.strip()] if args.only else None
    results = validate.run_checks(names=names, seed=args.seed)
    for r in results:
        print(f"{'ok  ' if r.passed else 'FAIL'} {r.name}: {r.detail}", flush=True)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed", flush=True)
    return 0 if n_pass == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    circuit = argparse.ArgumentParser(add_help=False)
    circuit.add_argument("--config", metavar="FILE", help="flat 'key = value unit' circuit file")
    circuit.add_argument("--L_J", type=float, metavar="NH", help="junction inductance, nH")
    circuit.add_argument("--L_g", type=float, metavar="NH", help="series geometric inductance, nH")
    circuit.add_argument("--C_J", type=float, metavar="FF", help="junction capacitance, fF")
    circuit.add_argument("--C_R0", type=float, metavar="FF", help="per-branch resonator capacitance, fF")
    circuit.add_argument("--L_R0", type=float, metavar="NH", help="per-branch resonator inductance, nH")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", metavar="FILE", help="write rows here instead of stdout")
    out.add_argument("--format", choices=("csv", "json"), default="csv", help="row format")

    def sweep(defaults):
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--lr0", metavar="LIST", help="comma-separated L_R0 values, nH")
        p.add_argument("--lr0-min", type=float, default=defaults[0], metavar="NH")
        p.add_argument("--lr0-max", type=float, default=defaults[1], metavar="NH")
        p.add_argument("--lr0-steps", type=int, default=defaults[2], metavar="K")
        return p

    parser = argparse.ArgumentParser(
        prog="srptsim",
        description="Superradiant phase transition of a junction chain in a lumped resonator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classical", parents=[circuit, out, sweep((0.15, 0.75, 5))],
                       help="constrained inductive-energy curves and the classical threshold")
    p.add_argument("--phi-max", type=float, default=math.pi, metavar="RAD",
                   help="half-width of the curve domain in 2 pi phi / Phi0")
    p.add_argument("--phi-steps", type=int, default=201, help="samples per curve")
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("linear", parents=[circuit, out, sweep((0.1, 1.0, 19))],
                       help="linearized mode frequencies and stability")
    p.add_argument("--g-scale", type=float, default=1.0, metavar="X",
                   help="multiply the coupling before the mode calculation (0 decouples)")
    p.set_defaults(func=cmd_linear)

    p = sub.add_parser("meanfield", parents=[circuit, out, sweep((0.3, 1.0, 8))],
                       help="finite-temperature order parameter on an (L_R0, kT) grid")
    p.add_argument("--kt", metavar="LIST", help="comma-separated kT/h values, GHz")
    p.add_argument("--kt-min", type=float, default=0.0, metavar="GHZ")
    p.add_argument("--kt-max", type=float, default=200.0, metavar="GHZ")
    p.add_argument("--kt-steps", type=int, default=9, metavar="K")
    p.add_argument("--fock-levels", type=int, default=60, help="branch truncation")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the grid")
    p.add_argument("--max-evals", type=int, default=6000, help="solver evaluation budget per point")
    p.add_argument("--boundary", action="store_true",
                   help="emit the interpolated critical temperature per column instead of the grid")
    p.add_argument("--boundary-out", metavar="FILE",
                   help="also write the boundary curve here when emitting the grid")
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("fluct", parents=[circuit, out, sweep((0.1, 1.0, 46))],
                       help="fluctuation spectrum around the kT = 0 equilibrium")
    p.add_argument("--fock-levels", type=int, default=60, help="branch truncation")
    p.set_defaults(func=cmd_fluct)

    p = sub.add_parser("ed", parents=[circuit, out, sweep((0.2, 0.8, 7))],
                       help="sparse diagonalization at finite N")
    p.add_argument("--n-atoms", default="1", metavar="LIST",
                   help="comma-separated atom counts, one scan per count")
    p.add_argument("--compare-meanfield", action="store_true",
                   help="append thermodynamic-limit photon and shift columns")
    p.add_argument("--per-mode-cutoff", type=int, default=24)
    p.add_argument("--total-cutoff", type=int, default=48)
    p.add_argument("--k", type=int, default=6, help="eigenpairs per sector")
    p.add_argument("--potential", choices=("quartic", "cosine"), default="quartic")
    p.add_argument("--max-dim", type=int, default=400_000, help="sector size guard")
    p.add_argument("--seed", type=int, default=0, help="Lanczos start vector seed")
    p.add_argument("--dump-matrix", metavar="FILE",
                   help="write the even-sector matrix at the first L_R0 in Matrix Market format")
    p.set_defaults(func=cmd_ed)

    p = sub.add_parser("validate", help="run the internal consistency checks")
    p.add_argument("--only", metavar="LIST", help="comma-separated check names")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # Reader closed the stream (e.g. piping into head). Point the fd
        # at devnull so the interpreter's exit flush cannot raise again.
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
