"""
Command line front end: lambda sweeps, figure data, single points, landmark
roots, identity verification, Renyi/Tsallis queries and finite-chain dS peaks.

Data goes to stdout (or --output) as CSV or JSON, diagnostics to stderr.
Exit codes: 0 success, 1 usage, 2 numerical failure.
"""

import csv
import io
import json
import logging
import math
import sys
import traceback
from argparse import ArgumentParser
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from logging import getLogger
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import yaml

from ising_fluct import __version__, generalized_entropy
from ising_fluct.chains import dimer, finite_chain, infinite_entropy
from ising_fluct.chains.free_fermion import as_coupling, level_spacing
from ising_fluct.config import IsingFluctConfig, load_config
from ising_fluct.exceptions import CriticalPointError, DomainError, IsingFluctError
from ising_fluct.special import identities

logger = getLogger("IsingFluctCli")

SCHEMA = "ising_fluct/1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

COLUMNS = ("lambda", "eps", "S", "S_series", "dS", "dS_series", "delta")
QUANTITIES = COLUMNS[1:]
CRITICAL_SKIP = 1e-12

SERIES_CHECK_GRID = tuple(np.linspace(0.05, 0.95, 100)) + tuple(
    np.geomspace(1.05, 20.0, 100)
)


class UsageError(IsingFluctError):
    pass


class IsingFluctArgumentParser(ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class SweepRequest:
    lam_from: float
    lam_to: float
    points: int
    scale: str = "linear"
    quantities: Tuple[str, ...] = ("S", "dS", "delta")
    fmt: str = "csv"
    output: Optional[Path] = None

    def __post_init__(self):
        if not (math.isfinite(self.lam_from) and math.isfinite(self.lam_to)):
            raise UsageError("sweep bounds must be finite")
        if not 0.0 < self.lam_from < self.lam_to:
            raise UsageError(f"need 0 < from < to, got [{self.lam_from}, {self.lam_to}]")
        if self.points < 2:
            raise UsageError(f"need at least 2 points, got {self.points}")
        unknown = [q for q in self.quantities if q not in QUANTITIES]
        if len(unknown) > 0:
            raise UsageError(f"unknown quantities {unknown}; choose from {QUANTITIES}")

    @property
    def columns(self) -> Tuple[str, ...]:
        return ("lambda",) + tuple(c for c in QUANTITIES if c in self.quantities)

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lam_from, self.lam_to, self.points)
        return np.linspace(self.lam_from, self.lam_to, self.points)


@dataclass(frozen=True)
class FigureRequest:
    figure: str
    fmt: str = "csv"
    output: Optional[Path] = None


def skip_critical(grid: Sequence[float]) -> List[float]:
    kept = []
    for lam in grid:
        if abs(lam - 1.0) <= CRITICAL_SKIP:
            logger.info(f"skip lambda={lam!r}: critical point (see asymptote_S / asymptote_D)")
            continue
        kept.append(float(lam))
    return kept


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{value:.17g}"


def render_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue()


def render_json(inputs: dict, key: str, payload) -> str:
    document = {"schema": SCHEMA, "inputs": inputs, key: payload}
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


class IsingFluctCli:
    def __init__(self, config: IsingFluctConfig = None):
        self.config = config or load_config()
        self._set_responders()

    def _set_responders(self):
        self.responders_lookup = {
            "sweep": self.sweep_response,
            "figure": self.figure_response,
            "point": self.point_response,
            "finite": self.point_response,
            "roots": self.roots_response,
            "verify": self.verify_response,
            "renyi": self.renyi_response,
            "peak": self.peak_response,
        }

    def respond(self, args) -> int:
        response_function = self.responders_lookup.get(args.command, None)
        if response_function is None:
            logger.error(f"no responder for '{args.command}'")
            return EXIT_USAGE
        try:
            return response_function(args)
        except UsageError as e:
            logger.error(f"usage: {e}")
            return EXIT_USAGE
        except IsingFluctError as e:
            logger.error(f"{args.command} failed with {type(e).__name__}: {e}")
            tr = traceback.format_exc()
            logger.error(f"traceback:\n{tr}")
            return EXIT_NUMERICAL

    # output

    def emit(self, text: str, output: Optional[Path] = None):
        if output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(output, "w", newline="") as f:
                f.write(text)
            logger.info(f"written {output}")

    def emit_table(self, columns, rows, fmt, output, inputs):
        if fmt == "json":
            text = render_json(inputs, "rows", [{c: r.get(c) for c in columns} for r in rows])
        else:
            text = render_csv(columns, rows)
        self.emit(text, output)

    def map_rows(self, row_function, grid, workers: Optional[int] = None):
        workers = workers or self.config.sweep.workers
        if workers <= 1:
            return [row_function(lam) for lam in grid]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(row_function, grid))  # map keeps grid order

    # rows

    def infinite_row(self, lam: float, quantities: Sequence[str]) -> dict:
        try:
            c = as_coupling(lam)
            row = {"lambda": lam}
            if "eps" in quantities:
                row["eps"] = level_spacing(c)
            if any(q in quantities for q in ("S", "dS", "delta")):
                stats = infinite_entropy.stats(c)
                row.update(S=stats.S, dS=stats.dS, delta=stats.delta)
            series = self.config.series
            if "S_series" in quantities:
                row["S_series"] = infinite_entropy.entropy_series(
                    c, tol=series.tol, max_terms=series.max_terms
                )
            if "dS_series" in quantities:
                row["dS_series"] = math.sqrt(
                    infinite_entropy.dispersion_series(
                        c, tol=series.tol, max_terms=series.max_terms
                    )
                )
        except IsingFluctError:
            logger.error(f"numerical failure at lambda={lam!r}")
            raise
        return row

    @staticmethod
    def dimer_row(lam: float) -> dict:
        stats = dimer.dimer_stats(lam)
        return {
            "lambda": lam,
            "C": dimer.dimer_concurrence(lam),
            "S": stats.S,
            "dS": stats.dS,
            "delta": stats.delta,
        }

    # commands

    def cmd_sweep(self, req: SweepRequest, series: bool = False, workers: Optional[int] = None):
        quantities = tuple(req.quantities)
        if series:
            quantities += tuple(q for q in ("S_series", "dS_series") if q not in quantities)
            req = replace(req, quantities=quantities)
        grid = skip_critical(req.grid())
        rows = self.map_rows(lambda lam: self.infinite_row(lam, quantities), grid, workers)
        inputs = {
            "from": req.lam_from,
            "to": req.lam_to,
            "points": req.points,
            "scale": req.scale,
            "quantities": list(quantities),
        }
        self.emit_table(req.columns, rows, req.fmt, req.output, inputs)
        return EXIT_OK

    def figure_grid(self, figure: str) -> Tuple[Tuple[str, ...], List[dict]]:
        if figure == "fig1":
            grid = np.linspace(0.0, 6.0, 601)
            return ("lambda", "C", "S", "dS", "delta"), [self.dimer_row(x) for x in grid]
        if figure == "fig2":
            grid = np.union1d(np.linspace(0.01, 3.0, 300), [1.0 / math.sqrt(2.0), math.sqrt(2.0)])
            quantities = ("eps",)
        elif figure == "fig3":
            grid = np.linspace(0.01, 3.0, 300)
            quantities = ("S", "dS")
        elif figure == "fig4":
            grid = np.linspace(0.01, 3.0, 300)
            quantities = ("delta",)
        elif figure == "fig5":
            grid = np.linspace(0.99, 1.02, 3001)
            quantities = ("delta",)
        else:
            raise UsageError(f"unknown figure '{figure}'")
        columns = ("lambda",) + quantities
        rows = self.map_rows(
            lambda lam: self.infinite_row(lam, quantities), skip_critical(grid)
        )
        return columns, rows

    def cmd_figure(self, req: FigureRequest):
        columns, rows = self.figure_grid(req.figure)
        self.emit_table(columns, rows, req.fmt, req.output, {"figure": req.figure})
        return EXIT_OK

    def point_record(self, lam, system="infinite", L=None, cut=None) -> Tuple[dict, dict]:
        inputs = {"lambda": lam, "system": system if L is None else "finite"}
        if L is not None:
            spec = finite_chain.ChainSpec(L=L, lam=lam, cut=cut)
            inputs.update(L=spec.L, cut=spec.cut)
            stats = finite_chain.chain_stats(spec, max_iter=self.config.finite_chain.max_iter)
            return inputs, stats.as_dict()
        if system == "dimer":
            result = dimer.dimer_stats(lam).as_dict()
            result["C"] = dimer.dimer_concurrence(lam)
            return inputs, result
        c = as_coupling(lam)
        result = infinite_entropy.stats(c).as_dict()
        result.update(eps=level_spacing(c), k=c.k, phase=c.phase.value)
        return inputs, result

    def cmd_point(self, lam, system="infinite", L=None, cut=None, series=False, output=None):
        inputs, result = self.point_record(lam, system, L, cut)
        if series and L is None and system == "infinite":
            row = self.infinite_row(lam, ("S_series", "dS_series"))
            result.update(S_series=row["S_series"], dS_series=row["dS_series"])
        self.emit(render_json(inputs, "result", result), output)
        return EXIT_OK

    def cmd_roots(self, which: str, output=None):
        roots = self.config.roots
        if which == "dimer-lf":
            r = dimer.dimer_lambda_f(xtol=roots.xtol)
            result = {"lambda_f": r.root, "bracket_width": r.bracket_width}
        elif which == "inf-lf":
            r = infinite_entropy.find_lambda_f_infinite(
                xtol=roots.xtol, scan_points=roots.scan_points
            )
            result = {"lambda_f": r.root, "bracket_width": r.bracket_width}
        elif which == "inf-lm":
            r = infinite_entropy.find_lambda_m(scan_points=roots.scan_points)
            result = {"lambda_m": r.x, "delta_m": r.value, "bracket_width": r.bracket_width}
        else:
            raise UsageError(f"unknown landmark '{which}'")
        self.emit(render_json({"which": which}, "result", result), output)
        return EXIT_OK

    def cmd_verify(
        self,
        tol: Optional[float] = None,
        only: Optional[Sequence[str]] = None,
        output=None,
    ):
        tol = self.config.verify.tol if tol is None else tol
        if not tol > 0.0:
            raise UsageError(f"tolerance must be > 0, got {tol}")
        only = list(only) if only else None
        families = [f for f in (only or identities.IDENTITY_FAMILIES) if f != "series"]

        reports = []
        if len(families) > 0:
            reports += identities.run_identity_suite(tol=tol, only=families)
        if only is None or "series" in only:
            for lam in SERIES_CHECK_GRID:
                reports += identities.check_series_vs_closed(lam, tol=tol)

        failed = [r for r in reports if not r.passed]
        result = {
            "passed": len(failed) == 0,
            "n_checks": len(reports),
            "n_failed": len(failed),
            "reports": [r.as_dict() for r in reports],
        }
        self.emit(render_json({"tol": tol, "only": only}, "result", result), output)
        if len(failed) > 0:
            first = failed[0]
            logger.error(
                f"identity {first.name} failed at k={first.k}: "
                f"defect {first.defect:.3e} >= {first.tolerance:.1e}"
            )
            return EXIT_NUMERICAL
        return EXIT_OK

    def renyi_source(self, lam, system, L=None, cut=None):
        if L is not None:
            spec = finite_chain.ChainSpec(L=L, lam=lam, cut=cut)
            g = finite_chain.ground_state(spec, max_iter=self.config.finite_chain.max_iter)
            return finite_chain.schmidt_spectrum(g, spec.cut)
        if system == "dimer":
            return dimer.dimer_schmidt_spectrum(lam)
        return as_coupling(lam)

    def cmd_renyi(
        self, lam, alpha, system="infinite", L=None, cut=None, moments=False, output=None
    ):
        source = self.renyi_source(lam, system, L, cut)
        tol = self.config.generalized.tol
        inputs = {"lambda": lam, "alpha": alpha, "system": system if L is None else "finite"}
        if alpha == 1.0:
            logger.info("alpha = 1: Renyi and Tsallis both reduce to the von Neumann entropy")
            S = generalized_entropy.von_neumann(source, tol=tol)
            result = {"renyi": S, "tsallis": S, "log_trace": 0.0, "round_trip_residual": 0.0}
        else:
            r = generalized_entropy.renyi(source, alpha, tol=tol)
            t = generalized_entropy.tsallis(source, alpha, tol=tol)
            residual = abs(generalized_entropy.renyi_from_tsallis(t, alpha) - r)
            result = {
                "renyi": r,
                "tsallis": t,
                "log_trace": (1.0 - alpha) * r,
                "round_trip_residual": residual,
            }
        if moments:
            step = self.config.generalized.step
            first, second = (
                generalized_entropy.moment_by_alpha_derivative(source, n, step=step, tol=tol)
                for n in (1, 2)
            )
            result.update(first_moment=first, second_moment=second, D=second - first**2)
        self.emit(render_json(inputs, "result", result), output)
        return EXIT_OK

    def cmd_peak(self, sizes: Sequence[int], fmt="csv", output=None):
        """Position and height of the dS maximum of half-cut chains, one row per L."""
        finite = self.config.finite_chain
        rows = []
        for L in sizes:
            r = finite_chain.max_fluctuation_position(
                L, scan_points=finite.scan_points, xtol=finite.xtol, max_iter=finite.max_iter
            )
            rows.append({"L": L, "lambda": r.x, "dS": r.value})
        inputs = {"L": list(sizes), "range": list(finite_chain.LAMBDA_RANGE)}
        self.emit_table(("L", "lambda", "dS"), rows, fmt, output, inputs)
        return EXIT_OK

    # argparse glue

    def check_point_request(self, lam, system, L=None, cut=None, alpha=None):
        """Bad single-point inputs are usage errors; lambda = 1 is left to the solvers."""
        try:
            if alpha is not None:
                generalized_entropy.check_alpha(alpha)
            if L is not None:
                finite_chain.ChainSpec(L=L, lam=lam, cut=cut)
            elif system == "dimer":
                dimer.check_coupling(lam)
            else:
                as_coupling(lam)
        except CriticalPointError:
            pass
        except DomainError as e:
            raise UsageError(str(e)) from e

    def sweep_response(self, args):
        quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
        req = SweepRequest(
            lam_from=args.lam_from,
            lam_to=args.lam_to,
            points=args.points,
            scale=args.scale,
            quantities=quantities,
            fmt=args.format,
            output=args.output,
        )
        return self.cmd_sweep(req, series=args.series, workers=args.workers)

    def figure_response(self, args):
        return self.cmd_figure(FigureRequest(args.figure, fmt=args.format, output=args.output))

    def point_response(self, args):
        self.check_point_request(args.lam, args.system, args.L, args.cut)
        return self.cmd_point(
            args.lam, args.system, args.L, args.cut, series=args.series, output=args.output
        )

    def roots_response(self, args):
        return self.cmd_roots(args.which, output=args.output)

    def verify_response(self, args):
        return self.cmd_verify(tol=args.tol, only=args.only, output=args.output)

    def renyi_response(self, args):
        self.check_point_request(args.lam, args.system, args.L, args.cut, alpha=args.alpha)
        return self.cmd_renyi(
            args.lam,
            args.alpha,
            args.system,
            args.L,
            args.cut,
            moments=args.moments,
            output=args.output,
        )

    def peak_response(self, args):
        for L in args.L:
            self.check_point_request(finite_chain.LAMBDA_RANGE[0], "finite", L=L)
        return self.cmd_peak(args.L, fmt=args.format, output=args.output)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=None, type=Path)
    common.add_argument("-o", "--output", default=None, type=Path)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", default=False, action="store_true")
    verbosity.add_argument("-q", "--quiet", default=False, action="store_true")

    parser = IsingFluctArgumentParser(prog="ising-fluct", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(
        dest="command", required=True, parser_class=IsingFluctArgumentParser
    )

    sweep = subparsers.add_parser("sweep", parents=[common])
    sweep.add_argument("--from", dest="lam_from", required=True, type=float)
    sweep.add_argument("--to", dest="lam_to", required=True, type=float)
    sweep.add_argument("--points", required=True, type=int)
    sweep.add_argument("--scale", default="linear", choices=["linear", "log"])
    sweep.add_argument("--quantities", default="S,dS,delta")
    sweep.add_argument("--series", default=False, action="store_true")
    sweep.add_argument("--workers", default=None, type=int)
    sweep.add_argument("--format", default="csv", choices=["csv", "json"])

    figure = subparsers.add_parser("figure", parents=[common])
    figure.add_argument("figure", choices=["fig1", "fig2", "fig3", "fig4", "fig5"])
    figure.add_argument("--format", default="csv", choices=["csv", "json"])

    for name in ("point", "finite"):
        point = subparsers.add_parser(name, parents=[common])
        point.add_argument("--lambda", dest="lam", required=True, type=float)
        point.add_argument("--system", default="infinite", choices=["infinite", "dimer"])
        point.add_argument("--L", default=None, type=int, required=(name == "finite"))
        point.add_argument("--cut", default=None, type=int)
        point.add_argument("--series", default=False, action="store_true")

    roots = subparsers.add_parser("roots", parents=[common])
    roots.add_argument("which", choices=["dimer-lf", "inf-lf", "inf-lm"])

    verify = subparsers.add_parser("verify", parents=[common])
    verify.add_argument("--tol", default=None, type=float)
    verify.add_argument(
        "--only",
        default=None,
        action="append",
        choices=list(identities.IDENTITY_FAMILIES) + ["series"],
    )

    renyi = subparsers.add_parser("renyi", parents=[common])
    renyi.add_argument("--lambda", dest="lam", required=True, type=float)
    renyi.add_argument("--alpha", required=True, type=float)
    renyi.add_argument("--system", default="infinite", choices=["infinite", "dimer"])
    renyi.add_argument("--L", default=None, type=int)
    renyi.add_argument("--cut", default=None, type=int)
    renyi.add_argument("--moments", default=False, action="store_true")

    peak = subparsers.add_parser("peak", parents=[common])
    peak.add_argument("--L", required=True, action="append", type=int)
    peak.add_argument("--format", default="csv", choices=["csv", "json"])

    return parser


def _set_log_level(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.getLogger().setLevel(level)


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    _set_log_level(args)
    try:
        config = load_config(args.config)
    except (IsingFluctError, OSError, ValueError, yaml.YAMLError) as e:
        logger.error(f"could not load config {args.config}: {e}")
        return EXIT_USAGE
    return IsingFluctCli(config).respond(args)
