"""Command-line driver: ``degmap <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (a JSON object with
``error`` and ``message`` goes to stderr) and 2 on a usage error.
Output files are deterministic: identical inputs give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import io as dio
from .analytic import discretize
from .convexify import eval_pwa, is_convex, dedup_planes, lower_convex_hull_pwa, pwa_fit_error
from .dispatch import DispatchProblem, dispatch
from .errors import DegmapError, InvalidArgumentError
from .nnls import solve_map
from .patterns import COVERAGE_RULES, assemble_multirate, build_pattern_system, cycle_test_sets
from .reference import compare_chemistries, data_dir, load_reference
from .scaling import normalize_map
from .surface import dump_surface
from .types import CurrentGrid, energy_capacity, uniform_soc_grid

EPILOG = (
    "Formats: cycle CSV i_bat_a,c_q_ah,dod,n_cyc,q_s_ah; OCV CSV soc,v_oc; "
    "PWA CSV a1,a2_per_h,a3_per_h; schedule CSV t_h,p_bat_kw,e_kwh; prices CSV "
    "t_h,price; config JSON {n_parallel, n_series, mean_ocv_v, cell_capacity_ah}. "
    "Energies are kWh, powers kW. A missing path data/<file> falls back to the "
    "bundled reference directory (override with DEGMAP_DATA_DIR)."
)


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = data_dir() / p.name
    if p.parent.name == "data" and bundled.exists():
        return bundled
    raise InvalidArgumentError(f"file not found: {path}")


def _read_text(path: str) -> str:
    return _resolve(path).read_text()


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _uniform_step(t_h: np.ndarray, dt: Optional[float]) -> float:
    if dt is not None:
        return dt
    if t_h.size < 2:
        raise InvalidArgumentError("a single time sample needs an explicit --dt")
    steps = np.diff(t_h)
    if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise InvalidArgumentError("time samples must be uniform and increasing")
    return float(steps[0])


# --- subcommands --------------------------------------------------------------

def cmd_build(args) -> int:
    rows = dio.parse_cycle_csv(_read_text(args.cycles))
    bands = args.bands[0] if len(args.bands) == 1 else args.bands
    sets = cycle_test_sets(rows, bands)
    systems = [build_pattern_system(s, coverage=args.coverage) for s in sets]
    dmap = solve_map(assemble_multirate(systems))
    _emit(dio.dumps_json(dio.map_to_dict(dmap)), args.out)
    return 0


def cmd_discretize(args) -> int:
    fn = dio.fn_from_dict(dio.read_json(_resolve(args.fn)))
    curve = dio.parse_ocv_csv(_read_text(args.ocv))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = discretize(fn, curve, uniform_soc_grid(args.soc_bands), CurrentGrid(tuple(args.currents)), args.cq)
    if result.clamped:
        print(f"clamped {result.clamped} negative samples to zero", file=sys.stderr)
    _emit(dio.dumps_json(dio.map_to_dict(result.map)), args.out)
    return 0


def cmd_normalize(args) -> int:
    dmap = dio.map_from_dict(dio.read_json(_resolve(args.map)))
    nmap = normalize_map(dmap, args.ocv_mean, args.soe_samples, args.power_samples)
    _emit(dio.dumps_json(dio.nmap_to_dict(nmap)), args.out)
    return 0


def cmd_convexify(args) -> int:
    nmap = dio.nmap_from_dict(dio.read_json(_resolve(args.nmap)))
    pwa = lower_convex_hull_pwa(nmap)
    err = pwa_fit_error(nmap, pwa)
    _emit(dio.format_pwa_csv(pwa), args.out)
    nrmse = f"{err.nrmse:.3%}" if err.nrmse_defined else "undefined (flat map)"
    print(f"planes: {len(pwa)}, rmse: {err.rmse:.4g} 1/h, nrmse: {nrmse}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    pwa = dio.parse_pwa_csv(_read_text(args.pwa))
    print(repr(eval_pwa(pwa, args.p, args.e, args.ce).value))
    return 0


def cmd_bench(args) -> int:
    schedule = dio.parse_schedule_csv(_read_text(args.schedule))
    config = dio.config_from_dict(dio.read_json(_resolve(args.config)))
    chems = [load_reference(c) for c in args.chem.split(",") if c.strip()]
    fades = compare_chemistries([(c, config) for c in chems], schedule, args.dt)
    c_e = energy_capacity(config)
    for key, fade in fades.items():
        print(f"{key}: {fade!r} kWh ({fade / c_e:.4%} of {c_e!r} kWh)")
    return 0


def cmd_dispatch(args) -> int:
    pwa = dio.parse_pwa_csv(_read_text(args.pwa))
    t_h, prices = dio.parse_prices_csv(_read_text(args.prices))
    config = dio.config_from_dict(dio.read_json(_resolve(args.config)))
    c_e = energy_capacity(config)
    p_max = args.p_max if args.p_max is not None else c_e
    p_min = args.p_min if args.p_min is not None else -p_max
    e0 = args.e0 if args.e0 is not None else 0.5 * c_e
    prob = DispatchProblem(
        prices, _uniform_step(t_h, args.dt), p_min, p_max, e0, c_e,
        args.eta_c, args.eta_d, pwa, args.deg_price,
    )
    sol = dispatch(prob)
    _emit(dio.format_solution_csv(t_h, sol.power, sol.soe, sol.deg_cost_rate), args.out)
    print(f"objective: {sol.objective!r}", file=sys.stderr)
    if sol.simultaneous:
        print(f"simultaneous charge/discharge at steps {list(sol.simultaneous)}", file=sys.stderr)
    return 0


def cmd_dump_surface(args) -> int:
    if args.pwa is not None:
        source = dio.parse_pwa_csv(_read_text(args.pwa))
    else:
        source = dio.nmap_from_dict(dio.read_json(_resolve(args.nmap)))
    dump = dump_surface(source, args.power_samples, args.soe_samples, args.power_limit)
    _emit(dump.to_gnuplot() if args.format == "gnuplot" else dump.to_csv(), args.out)
    return 0


def cmd_validate(args) -> int:
    pwa = dio.parse_pwa_csv(_read_text(args.pwa))
    convex = is_convex(pwa, samples=args.samples)
    unique = len(dedup_planes(pwa))
    print(f"convex: {'yes' if convex else 'no'}, planes: {len(pwa)} ({unique} after dedup)")
    return 0 if convex else 1


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degmap",
        description="Battery degradation maps and convex PWA cost surfaces.",
        epilog=EPILOG,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("build", help="identify a degradation map from cycle-test data", epilog=EPILOG)
    p.add_argument("--cycles", required=True, help="cycle-test CSV")
    p.add_argument("--bands", required=True, type=_int_list,
                   help="SoC band count for every current, or one per current in order of appearance")
    p.add_argument("--coverage", choices=COVERAGE_RULES, default="ranked",
                   help="how a DoD swing is assigned to bands (default: ranked)")
    p.add_argument("--out", help="map JSON (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("discretize", help="sample an analytic wear polynomial onto a map", epilog=EPILOG)
    p.add_argument("--fn", required=True, help='JSON {"betas": [b1, ..., b7]} in Ah/s')
    p.add_argument("--ocv", required=True, help="OCV CSV")
    p.add_argument("--soc-bands", required=True, type=int)
    p.add_argument("--currents", required=True, type=_float_list, help="comma-separated rates in A")
    p.add_argument("--cq", required=True, type=float, help="cell capacity in Ah")
    p.add_argument("--out")
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("normalize", help="normalize a cell map to (SoE, P/C_E)", epilog=EPILOG)
    p.add_argument("--map", required=True)
    p.add_argument("--ocv-mean", required=True, type=float, help="mean OCV in V")
    p.add_argument("--soe-samples", type=int, default=21)
    p.add_argument("--power-samples", type=int, default=21)
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("convexify", help="lower convex hull of a normalized map as PWA planes", epilog=EPILOG)
    p.add_argument("--nmap", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convexify)

    p = sub.add_parser("eval", help="evaluate a PWA surface for a sized system", epilog=EPILOG)
    p.add_argument("--pwa", required=True)
    p.add_argument("--p", required=True, type=float, help="battery power in kW (positive charges)")
    p.add_argument("--e", required=True, type=float, help="stored energy in kWh")
    p.add_argument("--ce", required=True, type=float, help="energy capacity in kWh")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="cumulative fade of reference chemistries on one schedule", epilog=EPILOG)
    p.add_argument("--chem", default="lfp,nmc_lmo,lco")
    p.add_argument("--schedule", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--dt", type=float, help="time step in h (default: from t_h)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dispatch", help="price-arbitrage LP with the PWA wear cost", epilog=EPILOG)
    p.add_argument("--pwa", required=True)
    p.add_argument("--prices", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--deg-price", required=True, type=float, help="price per kWh of lost capacity")
    p.add_argument("--p-max", type=float, help="charge limit in kW (default: C_E per hour)")
    p.add_argument("--p-min", type=float, help="discharge limit in kW, <= 0 (default: -p_max)")
    p.add_argument("--e0", type=float, help="initial energy in kWh (default: C_E / 2)")
    p.add_argument("--eta-c", type=float, default=0.95)
    p.add_argument("--eta-d", type=float, default=0.95)
    p.add_argument("--dt", type=float, help="time step in h (default: from t_h)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dispatch)

    p = sub.add_parser("dump-surface", help="sample a surface on a grid for plotting", epilog=EPILOG)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pwa")
    src.add_argument("--nmap")
    p.add_argument("--power-samples", type=int, default=21)
    p.add_argument("--soe-samples", type=int, default=21)
    p.add_argument("--power-limit", type=float, help="half-width of the P/C_E axis in 1/h")
    p.add_argument("--format", choices=("csv", "gnuplot"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump_surface)

    p = sub.add_parser("validate", help="check convexity and count planes of a PWA CSV", epilog=EPILOG)
    p.add_argument("--pwa", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DegmapError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(json.dumps({"error": type(exc).__name__, "message": str(message)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
