"""Command-line front end.

    puritylens figure1        reduced purity of the truncated construction, as CSV
    puritylens verify         randomized bound checks, JSON summary
    puritylens evolve CONFIG  evolve a user-specified system from a JSON file
    puritylens counterexample variance and difference-quotient tables

Exit codes: 0 success, 1 verification violations, 2 usage or config error,
3 numerical or I/O failure.
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _config, counterexample as ce
from .dynamics import (
    HamiltonianDecomposition,
    Propagator,
    assemble_total,
    purity_derivative_analytic,
    purity_derivative_fd,
)
from .errors import InvariantError, NotHermitianError, PurityLensError
from .opkernel import trace_norm
from .states import BipartiteState, DensityOperator, correlation_operator, mutual_information, purity
from .verify import SuiteConfig, run_suite

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# float phases beyond this many radians carry no useful digits
SIM_PHASE_LIMIT = 1e6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    t_min: float
    t_max: float
    samples: int

    def __post_init__(self):
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            raise ConfigError("time bounds must be finite")
        if not self.t_min < self.t_max:
            raise ConfigError(f"t_min ({self.t_min}) must be below t_max ({self.t_max})")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")

    def points(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.samples)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(rows, path, header=None) -> None:
    """Write rows as CSV with ``\\n`` line endings and 17 significant digits."""
    rows = [list(r) for r in rows]
    width = len(header) if header is not None else (len(rows[0]) if rows else 0)
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ValueError(f"row {i} has {len(r)} fields, expected {width}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(x) for x in r])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(x) for x in row] for row in reader]
    return header, np.array(data, dtype=float).reshape(len(data), len(header))


def write_plot_script(script_path, csv_path, columns, title) -> None:
    csv_ref = os.path.relpath(Path(csv_path).resolve(), Path(script_path).resolve().parent)
    plots = ", \\\n     ".join(
        f"'{csv_ref}' using 1:{i + 2} with lines title '{name}'" for i, name in enumerate(columns)
    )
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "set xlabel 't [hbar/E0]'",
        "set ylabel 'reduced purity'",
        f"plot {plots}",
        "",
    ]
    Path(script_path).write_text("\n".join(lines))


def _err(msg: str) -> None:
    print(f"puritylens: {msg}", file=sys.stderr)


def _can_simulate(cfg: ce.CounterexampleConfig, grid: TimeGrid) -> bool:
    if 4 * cfg.truncation > _config.max_dim():
        return False
    max_phase = 2.0 * float(cfg.energies_array().max()) * max(abs(grid.t_min), abs(grid.t_max))
    return max_phase <= SIM_PHASE_LIMIT


def cmd_figure1(case: str, terms: int, grid: TimeGrid, out, plot_script=None,
                renormalize: bool = True, threads: int = 1) -> int:
    try:
        cfg = ce.CounterexampleConfig(case, terms, renormalize=renormalize)
        if cfg.case == "custom":
            raise ConfigError("figure1 supports cases a and b")
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    times = grid.points()
    try:
        analytic = ce.analytic_purity(cfg, times)
        header = ["t", "purity_analytic"]
        columns = [times, analytic]
        if _can_simulate(cfg, grid):
            columns.append(ce.simulate_truncated(cfg, times, threads=threads).values)
            header.append("purity_simulated")
        write_csv(zip(*columns), out, header)
        if plot_script:
            write_plot_script(plot_script, out, header[1:], f"reduced purity, case {case}, N={terms}")
    except OSError as exc:
        _err(f"I/O failure: {exc}")
        return EXIT_NUMERIC
    except (PurityLensError, ArithmeticError) as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(dims_s, dims_e, trials: int, seed: int, out, threads: int = 1,
               tolerance: float = _config.EPS_VERIFY) -> int:
    try:
        cfg = SuiteConfig(tuple(dims_s), tuple(dims_e), trials, seed, tolerance=tolerance, threads=threads)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    try:
        summary = run_suite(cfg)
        text = json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
        if out is None or out == "-":
            sys.stdout.write(text)
        else:
            Path(out).write_text(text)
    except OSError as exc:
        _err(f"I/O failure: {exc}")
        return EXIT_NUMERIC
    except PurityLensError as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    if summary.violations:
        _err(f"{summary.violations} violations over {summary.trials} trials (worst slack {summary.worst_slack:.3e})")
        return EXIT_VIOLATIONS
    return EXIT_OK


def _parse_matrix(value, field: str, dim: int) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(f"field '{field}': expected {dim} rows")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError(f"field '{field}' row {i}: expected {dim} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            ):
                raise ConfigError(f"field '{field}'[{i}][{j}]: expected a [re, im] pair of numbers")
            out[i, j] = complex(entry[0], entry[1])
    return out


def _parse_times(value) -> np.ndarray:
    if isinstance(value, dict):
        try:
            grid = TimeGrid(float(value["t_min"]), float(value["t_max"]), int(value["samples"]))
        except KeyError as exc:
            raise ConfigError(f"field 'times': missing {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'times': {exc}") from None
        return grid.points()
    if isinstance(value, list) and value and all(isinstance(x, (int, float)) for x in value):
        return np.array(value, dtype=float)
    raise ConfigError("field 'times': expected {t_min, t_max, samples} or a list of numbers")


def load_evolve_config(text: str) -> dict:
    """Parse an evolve config; raises ConfigError with line/field diagnostics."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    for key in ("d_S", "d_E", "rho_tot", "H_S", "H_E", "H_int", "times"):
        if key not in raw:
            raise ConfigError(f"field '{key}': missing")
    d_s, d_e = raw["d_S"], raw["d_E"]
    for key, val in (("d_S", d_s), ("d_E", d_e)):
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise ConfigError(f"field '{key}': expected a positive integer")
    if d_s * d_e > _config.max_dim():
        raise ConfigError(f"d_S*d_E = {d_s * d_e} exceeds the dimension guard {_config.max_dim()}")
    fd_step = raw.get("fd_step", 1e-4)
    if not isinstance(fd_step, (int, float)) or not fd_step > 0:
        raise ConfigError("field 'fd_step': expected a positive number")
    return {
        "d_S": d_s,
        "d_E": d_e,
        "rho_tot": _parse_matrix(raw["rho_tot"], "rho_tot", d_s * d_e),
        "H_S": _parse_matrix(raw["H_S"], "H_S", d_s),
        "H_E": _parse_matrix(raw["H_E"], "H_E", d_e),
        "H_int": _parse_matrix(raw["H_int"], "H_int", d_s * d_e),
        "times": _parse_times(raw["times"]),
        "fd_step": float(fd_step),
    }


EVOLVE_HEADER = [
    "t",
    "purity",
    "purity_derivative_analytic",
    "purity_derivative_fd",
    "mutual_information",
    "corr_trace_norm",
]


def evolve_rows(cfg: dict) -> list[tuple]:
    state = BipartiteState(DensityOperator(cfg["rho_tot"]), cfg["d_S"], cfg["d_E"])
    h = HamiltonianDecomposition(cfg["H_S"], cfg["H_E"], cfg["H_int"])
    prop = Propagator(assemble_total(h))
    rows = []
    for t in cfg["times"]:
        st = prop.evolve(state, float(t))
        rows.append((
            float(t),
            purity(st.rho_s),
            purity_derivative_analytic(st, h),
            purity_derivative_fd(st, prop, cfg["fd_step"], richardson=True),
            mutual_information(st),
            trace_norm(correlation_operator(st).matrix, hermitian=True),
        ))
    return rows


def cmd_evolve(config_path, out) -> int:
    try:
        text = Path(config_path).read_text()
    except OSError as exc:
        _err(f"cannot read config: {exc}")
        return EXIT_CONFIG
    try:
        cfg = load_evolve_config(text)
    except ConfigError as exc:
        _err(f"{config_path}: {exc}")
        return EXIT_CONFIG
    try:
        rows = evolve_rows(cfg)
    except (NotHermitianError, InvariantError) as exc:
        _err(f"{config_path}: {exc}")
        return EXIT_NUMERIC
    except (PurityLensError, ArithmeticError) as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    try:
        write_csv(rows, out, EVOLVE_HEADER)
    except OSError as exc:
        _err(f"I/O failure: {exc}")
        return EXIT_NUMERIC
    return EXIT_OK


def counterexample_report(terms_a: int = 40, terms_b: int = 6, scales: int = 4) -> str:
    """Plain-text report: echoed options, variance tables, quotient tables, verdicts."""
    if terms_a < 1 or terms_b < 1 or scales < 1:
        raise ConfigError("terms and scales must be >= 1")
    lines = [
        "# puritylens counterexample report (deterministic, no randomness)",
        f"# terms_a = {terms_a}",
        f"# terms_b = {terms_b}",
        f"# scales = {scales}",
        "",
    ]
    verdicts = {}
    for case, n_terms in (("a", terms_a), ("b", terms_b)):
        cfg = ce.CounterexampleConfig(case, n_terms)
        var = ce.variance_series(cfg, n_terms)
        lines.append(f"[variance case={case}]")
        lines.append("N,mean,variance")
        lines.extend(",".join(_fmt(x) for x in (int(r[0]), r[1], r[2])) for r in var)
        lines.append("")
        probe = ce.nondiff_probe(None if case == "b" else terms_a, scales, case=case)
        lines.append(f"[quotients case={case}]")
        lines.append("h,quotient")
        lines.extend(f"{_fmt(h)},{_fmt(q)}" for h, q in probe)
        lines.append("")
        q = np.abs(probe[:, 1])
        if case == "a":
            flat = bool(np.all(np.diff(q) < 0)) and q[-1] < 1e-3
            verdicts[case] = "differentiable, flat at t=0" if flat else "inconclusive"
        else:
            grows = bool(np.all(np.diff(q) > 0)) and q[0] >= 2
            verdicts[case] = "quotient divergence observed" if grows else "inconclusive"
    for case, text in verdicts.items():
        lines.append(f"verdict case={case}: {text}")
    return "\n".join(lines) + "\n"


def cmd_counterexample(out=None, terms_a: int = 40, terms_b: int = 6, scales: int = 4) -> int:
    try:
        text = counterexample_report(terms_a, terms_b, scales)
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except PurityLensError as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    try:
        if out is None or out == "-":
            sys.stdout.write(text)
        else:
            Path(out).write_text(text)
    except OSError as exc:
        _err(f"I/O failure: {exc}")
        return EXIT_NUMERIC
    return EXIT_OK


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty dimension list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="puritylens", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure1", help="reduced purity time series of the truncated construction")
    p.add_argument("--case", choices=("a", "b"), default="a")
    p.add_argument("--terms", type=int, default=8, help="truncation level N")
    p.add_argument("--tmin", type=float, default=0.0)
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--samples", type=int, default=3000)
    p.add_argument("--no-renormalize", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--plot-script", default=None, help="also write a gnuplot script")

    p = sub.add_parser("verify", help="randomized checks of the derivative bounds")
    p.add_argument("--ds", type=_int_list, default=(2, 3, 4))
    p.add_argument("--de", type=_int_list, default=(2, 3, 4))
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=_config.EPS_VERIFY)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("evolve", help="evolve a system described by a JSON config")
    p.add_argument("config")
    p.add_argument("--out", required=True)

    p = sub.add_parser("counterexample", help="energy variance and difference-quotient tables")
    p.add_argument("--terms", type=int, default=40, help="largest truncation for case a")
    p.add_argument("--terms-b", type=int, default=6, help="largest truncation for case b")
    p.add_argument("--scales", type=int, default=4, help="probe h = 25**-k for k = 1..scales")
    p.add_argument("--out", default="-")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure1":
            try:
                grid = TimeGrid(args.tmin, args.tmax, args.samples)
            except ConfigError as exc:
                _err(str(exc))
                return EXIT_CONFIG
            return cmd_figure1(args.case, args.terms, grid, args.out, args.plot_script,
                               renormalize=not args.no_renormalize, threads=args.threads)
        if args.command == "verify":
            return cmd_verify(args.ds, args.de, args.trials, args.seed, args.out, args.threads, args.tol)
        if args.command == "evolve":
            return cmd_evolve(args.config, args.out)
        return cmd_counterexample(args.out, args.terms, args.terms_b, args.scales)
    except ValueError as exc:
        # PURITYLENS_MAX_DIM and similar environment problems
        _err(str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
