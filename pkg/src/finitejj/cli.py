"""Command-line front end: every worked number and figure table as an artifact.

Subcommands:

    bands           lowest bands vs offset charge (band-structure tables)
    imbalance       ground-state <n> vs offset charge (staircase)
    susceptibility  d<n>/dn_g vs offset charge
    curvature       zero-offset curvature vs E_J/E_C (dispersion or susceptibility)
    transmon-shift  windowed numerical frequency shift for a physical transmon
    analytic        closed-form gap/susceptibility/level-spacing values
    validity        minimum island size and device scales for a material
    wick-verify     random-polynomial check of the normal-ordering engine

Outputs are CSV (RFC-4180 body, '#'-prefixed meta lines, 17 significant
digits) or JSON; identical configurations produce byte-identical files.
Exit codes: 0 success, 1 parameter error, 2 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import observables, perturbation
from .errors import ConvergenceError
from .model import (
    DEFAULT_GATE_CAPACITANCE,
    MATERIAL_PRESETS,
    CircuitParams,
    load_materials,
    validity_min_pairs,
)
from .observables import SweepTable, WindowPolicy
from . import wick


class CliError(Exception):
    """Parameter-level failure; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit-code contract out of argparse's hands
        raise CliError(message)


def _count(text: str) -> int:
    """Integer flag accepting scientific notation (counts can be ~1e8)."""
    value = float(text)
    if value < 0 or value != int(value):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(value)


def _positive_count(text: str) -> int:
    value = _count(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(piece) for piece in text.split(",") if piece.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_window_flags(sub):
    sub.add_argument("--window", choices=("full", "fixed", "adaptive"), default="adaptive",
                     help="charge-window policy (default adaptive)")
    sub.add_argument("--half-width", type=_count, default=None,
                     help="half-width for --window fixed")
    sub.add_argument("--w-initial", type=_count, default=None,
                     help="starting half-width for --window adaptive")
    sub.add_argument("--w-max", type=_count, default=observables.DEFAULT_W_MAX,
                     help="half-width cap for --window adaptive")
    sub.add_argument("--window-rtol", type=float, default=observables.DEFAULT_WINDOW_RTOL,
                     help="relative settling tolerance for --window adaptive")


def _add_output_flags(sub, default_name):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", default=None,
                     help=f"output path (default {default_name}.<format>)")


def _policy_from(args) -> WindowPolicy:
    if args.window == "full":
        return WindowPolicy.full()
    if args.window == "fixed":
        if args.half_width is None:
            raise CliError("--window fixed requires --half-width")
        return WindowPolicy.fixed(args.half_width)
    return WindowPolicy.adaptive(rtol=args.window_rtol, w_initial=args.w_initial,
                                 w_max=args.w_max)


def _grid_from(args) -> np.ndarray:
    if not args.steps >= 1:
        raise CliError("--steps must be at least 1")
    if args.steps > 1 and not args.start < args.stop:
        raise CliError("--from must be smaller than --to")
    return np.linspace(args.start, args.stop, args.steps)


def _out_path(args, default_name) -> Path:
    if args.output is not None:
        return Path(args.output)
    return Path(f"{default_name}.{args.format}")


def _write_table(table: SweepTable, args, default_name) -> Path:
    path = _out_path(args, default_name)
    if args.format == "csv":
        table.to_csv(path)
    else:
        table.to_json(path)
    return path


def _write_scalars(results: dict, meta: dict, args, default_name) -> Path:
    """Scalar results as a two-column CSV or a {meta, results} JSON object."""
    path = _out_path(args, default_name)
    if args.format == "json":
        path.write_text(json.dumps({"meta": meta, "results": results}, sort_keys=True))
        return path
    lines = [f"# meta {json.dumps(meta, sort_keys=True)}", "quantity,value"]
    for key in sorted(results):
        value = results[key]
        text = "" if value is None else format(value, ".17g")
        lines.append(f"{key},{text}")
    path.write_text("\r\n".join(lines) + "\r\n", newline="")
    return path


def _sweep_command(args, include_imbalance, include_susceptibility, levels, name):
    params = CircuitParams.from_pairs(args.pairs, e_j=args.ejec, e_c=1.0)
    table = observables.band_sweep(
        params,
        _grid_from(args),
        levels=levels,
        policy=_policy_from(args),
        include_imbalance=include_imbalance,
        include_susceptibility=include_susceptibility,
        subtract_ground=getattr(args, "subtract_e0", False),
    )
    path = _write_table(table, args, name)
    bad = int(np.sum(table.columns["converged"] == 0.0))
    flagged = f", {bad} unconverged points" if bad else ""
    print(
        f"{name}: {table.grid.size} points, 2N={args.pairs}, EJ/EC={args.ejec:g}"
        f"{flagged} -> {path}"
    )
    return 2 if bad else 0


def _cmd_bands(args):
    return _sweep_command(args, False, False, args.levels, "bands")


def _cmd_imbalance(args):
    return _sweep_command(args, True, False, 1, "imbalance")


def _cmd_susceptibility(args):
    return _sweep_command(args, False, True, 1, "susceptibility")


def _cmd_curvature(args):
    policy = _policy_from(args)
    ratios = args.values
    if not ratios:
        raise CliError("--values must list at least one E_J/E_C ratio")
    rows = {"curvature": [], "reference": [], "ratio": []}
    fn = (
        observables.dispersion_curvature
        if args.kind == "dispersion"
        else observables.susceptibility_curvature
    )
    for ratio in ratios:
        params = CircuitParams.from_pairs(args.pairs, e_j=ratio, e_c=1.0)
        result = fn(params, policy, step=args.step)
        rows["curvature"].append(result.value)
        rows["reference"].append(result.reference)
        rows["ratio"].append(result.ratio)
    table = SweepTable(
        grid=np.array(ratios),
        columns={k: np.array(v) for k, v in rows.items()},
        meta={
            "grid_label": "ejec",
            "kind": args.kind,
            "pairs_total": args.pairs,
            "step": args.step,
            "window_mode": policy.mode,
        },
    )
    path = _write_table(table, args, "curvature")
    print(
        f"curvature ({args.kind}): 2N={args.pairs}, EJ/EC scan of {len(ratios)} values"
        f" -> {path}"
    )
    return 0


def _cmd_transmon_shift(args):
    params = CircuitParams.from_pairs(args.pairs, e_j=args.ej_ghz, e_c=args.ec_ghz)
    policy = _policy_from(args)
    w0 = observables.qubit_frequency(params, policy)
    w1 = observables.qubit_frequency(params.with_ng(args.ng), policy)
    shift_ghz = w1 - w0
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        analytic_ghz = perturbation.transmon_frequency(
            params.with_ng(args.ng)
        ) - perturbation.transmon_frequency(params)
    meta = {
        "ej_ghz": args.ej_ghz,
        "ec_ghz": args.ec_ghz,
        "pairs_total": args.pairs,
        "n_g": args.ng,
        "window_mode": policy.mode,
    }
    results = {
        "frequency_at_ng_ghz": w1,
        "frequency_at_zero_ghz": w0,
        "shift_numeric_khz": shift_ghz * 1e6,
        "shift_analytic_khz": analytic_ghz * 1e6,
    }
    path = _write_scalars(results, meta, args, "transmon_shift")
    print(
        f"transmon-shift: numeric {shift_ghz * 1e6:+.4f} kHz, analytic "
        f"{analytic_ghz * 1e6:+.4f} kHz (EJ={args.ej_ghz:g} GHz, EC={args.ec_ghz:g} GHz, "
        f"2N={args.pairs:g}, ng={args.ng:g}) -> {path}"
    )
    return 0


def _cmd_analytic(args):
    import warnings

    params = CircuitParams.from_pairs(args.pairs, e_j=args.ej, e_c=args.ec, n_g=args.ng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        coeffs = perturbation.bogoliubov(params)
        results = {
            "level_spacing": coeffs.epsilon,
            "bogoliubov_u_plus": coeffs.u_plus,
            "bogoliubov_u_minus": coeffs.u_minus,
            "bogoliubov_u_0": coeffs.u_0,
            "transmon_frequency": perturbation.transmon_frequency(params),
            "transmon_susceptibility": perturbation.transmon_susceptibility(params),
        }
        try:
            results["cpb_gap"] = perturbation.cpb_gap(params)
            results["cpb_susceptibility"] = perturbation.cpb_susceptibility(params)
        except ValueError:
            results["cpb_gap"] = None
            results["cpb_susceptibility"] = None
    meta = {"e_j": args.ej, "e_c": args.ec, "pairs_total": args.pairs, "n_g": args.ng}
    path = _write_scalars(results, meta, args, "analytic")
    gap_note = (
        "n_g is not a degeneracy point; charge-regime formulas skipped"
        if results["cpb_gap"] is None
        else f"cpb gap {results['cpb_gap']:.6g}"
    )
    print(
        f"analytic: level spacing {coeffs.epsilon:.6g}, transmon frequency "
        f"{results['transmon_frequency']:.6g}, {gap_note} -> {path}"
    )
    return 0


def _cmd_validity(args):
    if args.materials_file is not None:
        catalog = load_materials(args.materials_file)
    else:
        catalog = MATERIAL_PRESETS
    if args.material not in catalog:
        raise CliError(
            f"--material {args.material!r} not found (known: {', '.join(sorted(catalog))})"
        )
    material = catalog[args.material]
    n_half = None if args.pairs is None else args.pairs / 2.0
    report = validity_min_pairs(material, n_half=n_half, n_g=args.ng, c_g=args.cg_farad)
    results = {
        "n_min": report.n_min,
        "cooper_density_per_m3": report.cooper_density,
        "island_volume_um3": None
        if report.island_volume is None
        else report.island_volume / 1e-18,
        "gate_voltage_v": report.gate_voltage,
    }
    meta = {
        "material": args.material,
        "pairs_total": args.pairs,
        "n_g": args.ng,
        "gate_capacitance_f": args.cg_farad,
    }
    path = _write_scalars(results, meta, args, "validity")
    print(
        f"validity ({args.material}): N_min = {report.n_min:.4g}, "
        f"n_s = {report.cooper_density:.4g} m^-3 -> {path}"
    )
    return 0


def _cmd_wick_verify(args):
    rng = np.random.default_rng(args.seed)
    deviations = []
    for _ in range(args.count):
        poly = wick.OperatorPoly()
        n_words = int(rng.integers(1, 6))
        for _ in range(n_words):
            length = int(rng.integers(0, args.degree + 1))
            word = tuple(rng.choice([wick.RAISE, wick.LOWER], size=length))
            coeff = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            poly = poly + wick.OperatorPoly.from_word(word, coeff)
        engine = wick.vacuum_expectation(poly)
        oracle = wick.fock_oracle(poly, args.degree + 2)
        deviations.append(abs(engine - oracle))
    worst = max(deviations)
    results = {"polynomials": float(args.count), "max_abs_deviation": worst,
               "tolerance": args.rtol}
    meta = {"seed": args.seed, "degree": args.degree, "count": args.count}
    path = _write_scalars(results, meta, args, "wick_verify")
    ok = worst <= args.rtol
    print(
        f"wick-verify: {args.count} polynomials, max |engine - oracle| = {worst:.3e} "
        f"({'ok' if ok else 'FAILED'}, tolerance {args.rtol:g}) -> {path}"
    )
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="finitejj",
        description="Finite-island Josephson junction: spectra, observables, worked numbers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bands = sub.add_parser("bands", parents=[], help="lowest bands vs offset charge")
    bands.add_argument("--pairs", type=_positive_count, required=True, help="total bosons 2N")
    bands.add_argument("--ejec", type=float, required=True, help="E_J/E_C ratio (E_C = 1)")
    bands.add_argument("--from", dest="start", type=float, required=True)
    bands.add_argument("--to", dest="stop", type=float, required=True)
    bands.add_argument("--steps", type=_positive_count, required=True)
    bands.add_argument("--levels", type=_positive_count, default=3)
    bands.add_argument("--subtract-e0", action="store_true",
                       help="report bands relative to the ground level")
    _add_window_flags(bands)
    _add_output_flags(bands, "bands")
    bands.set_defaults(func=_cmd_bands)

    for name, helptext, fn in (
        ("imbalance", "ground-state <n> vs offset charge", _cmd_imbalance),
        ("susceptibility", "d<n>/dn_g vs offset charge", _cmd_susceptibility),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--pairs", type=_positive_count, required=True)
        p.add_argument("--ejec", type=float, required=True)
        p.add_argument("--from", dest="start", type=float, required=True)
        p.add_argument("--to", dest="stop", type=float, required=True)
        p.add_argument("--steps", type=_positive_count, required=True)
        _add_window_flags(p)
        _add_output_flags(p, name)
        p.set_defaults(func=fn)

    curv = sub.add_parser("curvature", help="zero-offset curvature vs E_J/E_C")
    curv.add_argument("--kind", choices=("dispersion", "susceptibility"), required=True)
    curv.add_argument("--scan", choices=("ejec",), default="ejec",
                      help="scan variable (E_J/E_C only)")
    curv.add_argument("--values", type=_float_list, default=[10.0, 20.0, 50.0, 100.0],
                      help="comma-separated E_J/E_C ratios")
    curv.add_argument("--pairs", type=_positive_count, required=True)
    curv.add_argument("--step", type=float, default=0.125,
                      help="offset-charge step of the stencil")
    _add_window_flags(curv)
    _add_output_flags(curv, "curvature")
    curv.set_defaults(func=_cmd_curvature)

    shift = sub.add_parser("transmon-shift", help="windowed numerical frequency shift")
    shift.add_argument("--ej-ghz", type=float, required=True)
    shift.add_argument("--ec-ghz", type=float, required=True)
    shift.add_argument("--pairs", type=_positive_count, required=True)
    shift.add_argument("--ng", type=float, required=True)
    _add_window_flags(shift)
    _add_output_flags(shift, "transmon_shift")
    shift.set_defaults(func=_cmd_transmon_shift)

    ana = sub.add_parser("analytic", help="closed-form values for given parameters")
    ana.add_argument("--ej", type=float, required=True)
    ana.add_argument("--ec", type=float, required=True)
    ana.add_argument("--pairs", type=_positive_count, required=True)
    ana.add_argument("--ng", type=float, default=0.0)
    _add_output_flags(ana, "analytic")
    ana.set_defaults(func=_cmd_analytic)

    val = sub.add_parser("validity", help="minimum island size for a material")
    val.add_argument("--material", default="aluminum")
    val.add_argument("--materials-file", default=None,
                     help="key-value preset file to read instead of the built-ins")
    val.add_argument("--pairs", type=_positive_count, default=None,
                     help="total bosons 2N, fills in the island volume")
    val.add_argument("--ng", type=float, default=None, help="fills in the gate voltage")
    val.add_argument("--cg-farad", type=float, default=DEFAULT_GATE_CAPACITANCE,
                     help="gate capacitance in farads (default 2e per millivolt)")
    _add_output_flags(val, "validity")
    val.set_defaults(func=_cmd_validity)

    wv = sub.add_parser("wick-verify", help="random-polynomial oracle suite")
    wv.add_argument("--count", type=_positive_count, default=200)
    wv.add_argument("--degree", type=_positive_count, default=6)
    wv.add_argument("--seed", type=_count, default=20240901)
    wv.add_argument("--rtol", type=float, default=1e-9)
    _add_output_flags(wv, "wick_verify")
    wv.set_defaults(func=_cmd_wick_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
