"""Command-line front end for the modsurf experiments.

Results go to stdout or CSV files; diagnostics go to stderr as
``INFO:`` / ``WARNING:`` / ``ERROR:`` lines. Exit status 0 on success,
1 on invalid input or a failed computation, 2 when a search finds nothing.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .. import hecke, maass, scattering, storage, traceform
from ..config import RunConfig, load_config
from ..errors import ModsurfError
from ..hypgeom import HPoint, fundamental_domain_area
from ..schemas import CountingRow, LValueRow, SpectralPoint, Symmetry, WindingRow

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with exit status 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"ERROR: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def parse_complex(text: str) -> complex:
    """``RE,IM`` or ``RE`` as a complex number."""

    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM but got '{text}'")


def parse_point(text: str) -> HPoint:
    z = parse_complex(text)
    if z.imag <= 0:
        raise argparse.ArgumentTypeError(f"point must lie in the upper half-plane: '{text}'")
    return HPoint(z.real, z.imag)


def _info(message: str) -> None:
    print(f"INFO: {message}", file=sys.stderr)


def _format_complex(value: complex) -> str:
    value = complex(value)
    if abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)):
        return f"{value.real:.12g}"
    return f"{value.real:.12g},{value.imag:.12g}"


def _emit(args: argparse.Namespace, schema: tuple, rows: list) -> None:
    if args.out:
        storage.write_table(Path(args.out), schema, rows)
        _info(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(storage.render(schema, rows))


def _select(points: list[SpectralPoint], index: int) -> SpectralPoint:
    if not 0 <= index < len(points):
        raise ModsurfError(f"index {index} out of range; file holds {len(points)} forms")
    return points[index]


def cmd_maass_find(args: argparse.Namespace, config: RunConfig) -> int:
    if args.r_min >= args.r_max:
        raise ModsurfError("--r-min must be smaller than --r-max")
    step = args.step if args.step is not None else config.scan_step
    points = maass.eigenvalue_search(
        (args.r_min, args.r_max), Symmetry(args.symmetry), step, config=config, workers=args.workers
    )
    out = Path(args.out or "eigenvalues.csv")
    storage.write_eigenvalues(out, points)
    for point in points:
        print(f"{point.r:.10f} {point.symmetry.value} {point.residual_two_height:.3e} {point.residual_hecke:.3e}")
    _info(f"wrote {len(points)} eigenvalues to {out}")
    if not points:
        _info(f"no {args.symmetry} eigenvalues in [{args.r_min}, {args.r_max}]")
        return EXIT_EMPTY
    return EXIT_OK


def cmd_maass_eval(args: argparse.Namespace, config: RunConfig) -> int:
    point = _select(storage.read_spectral_points(Path(args.input)), args.index)
    for z in args.z:
        value = maass.expansion_eval(point.coefficients, z, pullback=args.pullback)
        print(f"{z.x:.12g} {z.y:.12g} {value:.15g}")
    return EXIT_OK


def cmd_hecke_check(args: argparse.Namespace, config: RunConfig) -> int:
    point = _select(storage.read_spectral_points(Path(args.input)), args.index)
    coeffs = point.coefficients
    if coeffs.truncation < args.bound:
        coeffs = maass.extend_coefficients(coeffs, args.bound, y_cap=config.y0, margin=config.truncation_margin)
    worst = 0.0
    for m in range(2, args.bound + 1):
        for n in range(m, args.bound // m + 1):
            residual = hecke.hecke_relation_residual(coeffs, m, n)
            worst = max(worst, residual)
            print(f"{m} {n} {residual:.3e}")
    print(f"max {worst:.3e}")
    if worst >= config.hecke_threshold:
        print(f"WARNING: Hecke relations fail above {config.hecke_threshold:g}", file=sys.stderr)
    return EXIT_OK


def cmd_lfunc_eval(args: argparse.Namespace, config: RunConfig) -> int:
    point = _select(storage.read_spectral_points(Path(args.input)), args.index)
    count = args.coefficients or config.lseries_coefficients
    coeffs = maass.extend_coefficients(point.coefficients, count, y_cap=config.y0, margin=config.truncation_margin)
    extended = SpectralPoint(
        r=point.r,
        symmetry=point.symmetry,
        coefficients=coeffs,
        residual_two_height=point.residual_two_height,
        residual_hecke=point.residual_hecke,
        truncation=point.truncation,
    )
    kappa = None
    if point.symmetry is Symmetry.EVEN:
        kappa = hecke.mellin_normalization(extended, config.mellin_anchor)
        _info(f"Mellin normalisation {kappa:.10f}")
    rows = []
    for s in args.s:
        if s.real >= hecke.SERIES_ABSCISSA:
            series = hecke.l_series(s, coeffs)
            value, tail = series.value, series.tail_bound
        else:
            value, tail = complex("nan"), 0.0
        completed = None
        if kappa is not None:
            completed = hecke.lambda_completed(s, extended, kappa=kappa)
        rows.append(
            LValueRow(
                s_re=s.real,
                s_im=s.imag,
                L_re=value.real,
                L_im=value.imag,
                Lambda_re=None if completed is None else completed.real,
                Lambda_im=None if completed is None else completed.imag,
                tail_bound=tail,
            )
        )
    _emit(args, storage.LVALUES, rows)
    return EXIT_OK


def cmd_scattering(args: argparse.Namespace, config: RunConfig) -> int:
    if args.action == "phi":
        print(_format_complex(scattering.phi_gamma1(args.s)))
        return EXIT_OK
    if args.lambda_max < 0 or args.step <= 0:
        raise ModsurfError("winding grid needs --lambda-max >= 0 and --step > 0")
    count = int(math.floor(args.lambda_max / args.step + 1e-9))
    grid = [k * args.step for k in range(count + 1)]
    if grid[-1] < args.lambda_max - 1e-12:
        grid.append(args.lambda_max)
    records = scattering.winding_table(
        grid, tol=config.quad_abs_tol, rel_tol=config.quad_rel_tol, min_width=config.panel_floor
    )
    rows = [WindingRow(lambda_=rec.lambda_, M=rec.M, error=rec.quadrature_error) for rec in records]
    _emit(args, storage.WINDING, rows)
    return EXIT_OK


def cmd_eisenstein(args: argparse.Namespace, config: RunConfig) -> int:
    cutoff = args.cutoff or config.eisenstein_cutoff
    for y in args.y:
        term = scattering.eisenstein_constant_term(y, args.s, cutoff)
        print(
            f"{y:.6g} {_format_complex(term.value)} {_format_complex(term.expected)} "
            f"{abs(term.value - term.expected):.3e} {term.budget:.3e}"
        )
    return EXIT_OK


def _pair(args: argparse.Namespace) -> traceform.TestFunctionPair:
    if args.pair == "gaussian":
        return traceform.make_gaussian_pair(args.width)
    return traceform.make_bump_pair(args.epsilon, args.sharpness)


def cmd_trace(args: argparse.Namespace, config: RunConfig) -> int:
    pair = _pair(args)
    if args.action == "terms":
        terms = traceform.cusp_terms(pair, args.t, config.cusps if args.cusps is None else args.cusps)
        print(f"scattering_integral {terms.scattering_integral:.12g}")
        print(f"phi_half_term {terms.phi_half_term:.12g}")
        print(f"digamma_integral {terms.digamma_integral:.12g}")
        print(f"constant_term {terms.constant_term:.12g}")
        print(f"total {terms.total:.12g}")
        return EXIT_OK

    rs = [row.r for row in storage.read_eigenvalue_rows(Path(args.spectrum))]
    lengths = storage.read_lengths(Path(args.lengths)) if args.lengths else []
    if args.area is None:
        area = traceform.calibrate_area(pair, rs, lengths)
        print(f"area {area:.12g}")
        return EXIT_OK
    residual = traceform.trace_formula_residual(pair, rs, lengths, args.area)
    print(f"residual {residual:.6e}")
    return EXIT_OK


def cmd_weyl(args: argparse.Namespace, config: RunConfig) -> int:
    rs = [row.r for row in storage.read_eigenvalue_rows(Path(args.eigenvalues))]
    winding = storage.read_winding(Path(args.winding))
    grid = np.array([row.lambda_ for row in winding])
    if args.grid_step is not None:
        expected = np.arange(grid.size) * args.grid_step
        if not np.allclose(grid, expected, atol=1e-9):
            raise ModsurfError("winding grid does not match the requested grid")
    area = args.area if args.area is not None else fundamental_domain_area()
    curve = traceform.weyl_counting_curve(
        rs,
        grid,
        area,
        config.cusps,
        [row.M for row in winding],
        include_constant=config.include_constant_eigenvalue,
        fit_range=(args.fit_min, args.fit_max),
    )
    rows = [
        CountingRow(
            lambda_=float(lam),
            N=int(n),
            M=float(m),
            main=float(main),
            D=float(d),
            fit_c=curve.fit_c,
            fit_residual=curve.fit_residual,
        )
        for lam, n, m, main, d in zip(curve.grid, curve.N, curve.M, curve.main, curve.D)
    ]
    _emit(args, storage.COUNTING, rows)
    _info(f"fit c = {curve.fit_c:.6f}, residual = {curve.fit_residual:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="Flat key = value configuration file")
    shared.add_argument("--out", default=argparse.SUPPRESS, help="Output path (CSV); stdout when omitted")

    parser = _Parser(prog="modsurf", description="Spectral computations on the modular surface")
    parser.add_argument("--config", type=Path, help="Flat key = value configuration file")
    parser.add_argument("--out", help="Output path (CSV); stdout when omitted")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    maass_parser = commands.add_parser("maass", help="Maass cusp forms")
    maass_actions = maass_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    find = maass_actions.add_parser("find", parents=[shared], help="Search for eigenvalues in an interval")
    find.add_argument("--symmetry", choices=[s.value for s in Symmetry], required=True)
    find.add_argument("--r-min", type=float, required=True)
    find.add_argument("--r-max", type=float, required=True)
    find.add_argument("--step", type=float, help="Scan step (default: config scan_step)")
    find.add_argument("--workers", type=int, help="Scan processes (default: config scan_workers)")
    find.add_argument("--y0", type=float, help="Primary collocation height")
    find.set_defaults(handler=cmd_maass_find)
    evaluate = maass_actions.add_parser("eval", parents=[shared], help="Evaluate a stored form")
    evaluate.add_argument("--input", required=True)
    evaluate.add_argument("--index", type=int, default=0)
    evaluate.add_argument("--z", type=parse_point, action="append", required=True, help="Point X,Y")
    evaluate.add_argument("--pullback", action="store_true")
    evaluate.set_defaults(handler=cmd_maass_eval)

    hecke_parser = commands.add_parser("hecke", help="Hecke relations")
    hecke_actions = hecke_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    check = hecke_actions.add_parser("check", parents=[shared], help="Check a(m)a(n) relations for mn <= bound")
    check.add_argument("--input", required=True)
    check.add_argument("--index", type=int, default=0)
    check.add_argument("--bound", type=int, default=30)
    check.set_defaults(handler=cmd_hecke_check)

    lfunc_parser = commands.add_parser("lfunc", help="L-functions of stored forms")
    lfunc_actions = lfunc_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    lval = lfunc_actions.add_parser("eval", parents=[shared], help="L(s, f) and Lambda(s, f)")
    lval.add_argument("--input", required=True)
    lval.add_argument("--index", type=int, default=0)
    lval.add_argument("--s", type=parse_complex, action="append", required=True)
    lval.add_argument("--coefficients", type=int)
    lval.set_defaults(handler=cmd_lfunc_eval)

    scat_parser = commands.add_parser("scattering", help="Scattering determinant and winding number")
    scat_actions = scat_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    phi = scat_actions.add_parser("phi", parents=[shared], help="phi(s)")
    phi.add_argument("--s", type=parse_complex, required=True)
    phi.set_defaults(handler=cmd_scattering)
    winding = scat_actions.add_parser("winding", parents=[shared], help="M(lambda) on a grid")
    winding.add_argument("--lambda-max", type=float, required=True)
    winding.add_argument("--step", type=float, default=1.0)
    winding.set_defaults(handler=cmd_scattering)

    eis_parser = commands.add_parser("eisenstein", help="Eisenstein series")
    eis_actions = eis_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    constant = eis_actions.add_parser("constant-term", parents=[shared], help="Compare the constant term with y^s + phi(s) y^(1-s)")
    constant.add_argument("--y", type=float, action="append", required=True)
    constant.add_argument("--s", type=parse_complex, default=complex(2.0, 0.0))
    constant.add_argument("--cutoff", type=int)
    constant.set_defaults(handler=cmd_eisenstein)

    trace_parser = commands.add_parser("trace", help="Trace-formula terms")
    trace_actions = trace_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, help_text in (("terms", "Cusp contributions"), ("check", "Torsion-free residual")):
        sub = trace_actions.add_parser(name, parents=[shared], help=help_text)
        sub.add_argument("--pair", choices=["bump", "gaussian"], default="bump")
        sub.add_argument("--epsilon", type=float, default=1.0)
        sub.add_argument("--sharpness", type=float, default=1.0)
        sub.add_argument("--width", type=float, default=1.0)
        sub.set_defaults(handler=cmd_trace)
        if name == "terms":
            sub.add_argument("--t", type=float, help="Shift t for h(t - r) + h(t + r)")
            sub.add_argument("--cusps", type=int)
        else:
            sub.add_argument("--spectrum", required=True, help="Eigenvalue CSV")
            sub.add_argument("--lengths", help="Length-spectrum CSV")
            sub.add_argument("--area", type=float, help="Omit to calibrate the area instead")

    weyl_parser = commands.add_parser("weyl", help="Weyl counting curve")
    weyl_actions = weyl_parser.add_subparsers(dest="action", required=True, parser_class=_Parser)
    curve = weyl_actions.add_parser("curve", parents=[shared], help="N + M against the Weyl main term")
    curve.add_argument("--eigenvalues", required=True)
    curve.add_argument("--winding", required=True)
    curve.add_argument("--area", type=float)
    curve.add_argument("--grid-step", type=float, help="Require the winding grid to be k * step")
    curve.add_argument("--fit-min", type=float, default=10.0)
    curve.add_argument("--fit-max", type=float, default=25.0)
    curve.set_defaults(handler=cmd_weyl)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, object]:
    return {"y0": getattr(args, "y0", None)}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    handler: Callable[[argparse.Namespace, RunConfig], int] = args.handler
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            config = load_config(args.config, _overrides(args))
            status = handler(args, config)
        except (ModsurfError, ValueError) as exc:
            print(f"ERROR: {exc}", file=sys.stderr)
            status = EXIT_ERROR
    seen = set()
    for item in caught:
        message = f"{item.category.__name__}: {item.message}"
        if message not in seen:
            seen.add(message)
            print(f"WARNING: {message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
