"""Command-line front end.

Exit codes: 0 success, 1 statistical verification failed, 2 invalid input,
3 output could not be written.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .distribution import FiniteNDistribution, GasParams, MaxwellianDistribution
from .errors import DomainError
from .sampler import check_seed, sample_marginal
from .shellsim import KacSimulation, SimConfig
from .specialfn import gamma_factor

EXIT_OK = 0
EXIT_STAT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

KS_ALPHA = 0.01
AUTOCORR_LIMIT = 0.1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt_number(x) -> str:
    """10 significant digits, positional notation, '.' separator."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return np.format_float_positional(x, precision=10, unique=False, fractional=False, trim="0")


def fmt_fixed(x, decimals: int = 10) -> str:
    return f"{float(x):.{decimals}f}"


def _json_value(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def table_csv(columns, data, formatters) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in data:
        buf.write(",".join(f(v) for f, v in zip(formatters, row)) + "\n")
    return buf.getvalue()


def table_json(columns, data, int_columns=()) -> str:
    obj = {}
    for j, name in enumerate(columns):
        col = data[:, j]
        if name in int_columns:
            obj[name] = [int(v) for v in col]
        else:
            obj[name] = [_json_value(v) for v in col]
    return json.dumps(obj) + "\n"


def report_text(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: _json_value(v) for k, v in report.items()}, indent=2) + "\n"
    lines = ["key,value"]
    for k, v in report.items():
        lines.append(f"{k},{fmt_number(v) if isinstance(v, (int, float, np.number)) else v}")
    return "\n".join(lines) + "\n"


def emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(path).write_text(text, encoding="utf-8")


def parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise DomainError(f"grid must be min:max:points, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1 or (n > 1 and hi <= lo):
        raise DomainError(f"grid needs finite min < max and points >= 1, got {text!r}")
    return np.linspace(lo, hi, n)


def _params(args) -> GasParams:
    if args.n_molecules is None:
        raise DomainError("--n-molecules is required (N >= 2)")
    return GasParams(args.n_molecules, args.mass, args.boltzmann, args.temperature)


def _table_out(args, columns, data, int_columns=()):
    if args.format == "json":
        return table_json(columns, data, int_columns)
    fmts = [(lambda v: str(int(v))) if c in int_columns else fmt_number for c in columns]
    return table_csv(columns, data, fmts)


def cmd_pdf(args) -> int:
    params = _params(args)
    grid = parse_grid(args.grid)
    dist = FiniteNDistribution(params)
    maxw = MaxwellianDistribution.from_params(params)
    data = np.column_stack([grid, np.atleast_1d(dist.pdf(grid)), np.atleast_1d(maxw.pdf(grid))])
    emit(_table_out(args, ["v", "pdf", "maxwellian_pdf"], data), args.output)
    return EXIT_OK


def cmd_cdf(args) -> int:
    params = _params(args)
    grid = parse_grid(args.grid)
    dist = FiniteNDistribution(params)
    maxw = MaxwellianDistribution.from_params(params)
    data = np.column_stack([grid, np.atleast_1d(dist.cdf(grid)), np.atleast_1d(maxw.cdf(grid))])
    emit(_table_out(args, ["v", "cdf", "maxwellian_cdf"], data), args.output)
    return EXIT_OK


def _write_samples(args, batch) -> None:
    if args.format == "json":
        text = json.dumps({"v": [float(x) for x in batch.values]}) + "\n"
    else:
        text = "v\n" + "".join(fmt_number(x) + "\n" for x in batch.values)
    meta = json.dumps(batch.metadata(), indent=2) + "\n"
    emit(text, args.output)
    if args.output is None or args.output == "-":
        sys.stderr.write(meta)
    else:
        Path(args.output + ".meta.json").write_text(meta, encoding="utf-8")


def cmd_sample(args) -> int:
    params = _params(args)
    seed = check_seed(args.seed)
    if args.count is None or args.count < 1:
        raise DomainError("--count must be >= 1")
    batch = sample_marginal(FiniteNDistribution(params), seed, args.count)
    _write_samples(args, batch)
    return EXIT_OK


def cmd_moments(args) -> int:
    params = _params(args)
    dist = FiniteNDistribution(params)
    maxw_v2, maxw_speed = MaxwellianDistribution.from_params(params).moments()
    ev2 = dist.expected_v2()
    espeed = dist.expected_speed()
    q_norm = analysis.quad_pdf_integral(dist, 0)
    q_v2 = analysis.quad_pdf_integral(dist, 2)
    q_speed = analysis.quad_pdf_integral(dist, 1)
    report = {
        "n_molecules": params.N,
        "mass": params.m,
        "boltzmann": params.k,
        "temperature": params.T,
        "expected_v2": ev2,
        "expected_speed": espeed,
        "gamma_factor": gamma_factor(params.N),
        "maxwellian_expected_v2": maxw_v2,
        "maxwellian_expected_speed": maxw_speed,
        "quad_normalization": q_norm,
        "quad_expected_v2": q_v2,
        "quad_expected_speed": q_speed,
        "abs_diff_normalization": abs(q_norm - 1.0),
        "abs_diff_v2": abs(q_v2 - ev2),
        "abs_diff_speed": abs(q_speed - espeed),
    }
    fmt = "json" if args.format is None else args.format
    emit(report_text(report, fmt), args.output)
    return EXIT_OK


def cmd_gamma(args) -> int:
    table = analysis.figure2_series(args.n_max)
    emit(_table_out(args, table.columns, table.data, table.int_columns), args.output)
    return EXIT_OK


def cmd_converge(args) -> int:
    try:
        n_values = [int(x) for x in args.n_values.split(",") if x.strip()]
    except ValueError:
        raise DomainError(f"--n-values must be comma-separated integers, got {args.n_values!r}") from None
    report = analysis.convergence_report(n_values, parse_grid(args.grid))
    cols = ["n_molecules", "sup_norm", "total_variation", "kl_divergence"]
    data = np.array([[r[c] for c in cols] for r in report.rows()], dtype=float).reshape(-1, 4)
    emit(_table_out(args, cols, data, {"n_molecules"}), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = _params(args)
    config = SimConfig(
        params,
        steps=args.steps,
        burn_in=args.burn_in,
        sample_stride=args.stride,
        seed=check_seed(args.seed),
        init_mode=args.init.replace("-", "_"),
    )
    if config.expected_samples < analysis.KS_MIN_COUNT:
        raise DomainError(
            f"run collects {config.expected_samples} samples; the KS check needs "
            f"at least {analysis.KS_MIN_COUNT}"
        )
    sim = KacSimulation(config)
    batch = sim.run()
    gof = analysis.ks_test(batch, FiniteNDistribution(params).cdf)
    rho = analysis.autocorrelation(batch.values, 1)
    if args.output is not None:
        _write_samples(args, batch)
    summary = {
        "n_molecules": params.N,
        "steps": config.steps,
        "burn_in": config.burn_in,
        "stride": config.sample_stride,
        "seed": config.seed,
        "sample_count": gof.sample_count,
        "ks_statistic": gof.statistic,
        "p_value": gof.p_value,
        "max_energy_drift": sim.max_drift,
        "lag1_autocorrelation": rho,
        "passed": gof.p_value >= KS_ALPHA,
    }
    text = report_text(summary, "json" if args.format == "json" else "csv")
    # samples (if any) went to --output; the summary always goes to stdout
    sys.stdout.write(text)
    if abs(rho) >= AUTOCORR_LIMIT:
        sys.stderr.write(
            f"warning: lag-1 autocorrelation {rho:.3f} >= {AUTOCORR_LIMIT}; increase --stride\n"
        )
    return EXIT_OK if gof.p_value >= KS_ALPHA else EXIT_STAT_FAIL


def cmd_figures(args) -> int:
    outdir = Path(args.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    decimals = max(0, -int(math.floor(math.log10(args.step) + 1e-12)))
    fig1 = analysis.figure1_series(step=args.step)
    fmts = [lambda v: fmt_fixed(v, decimals)] + [fmt_fixed] * (len(fig1.columns) - 1)
    (outdir / "figure1.csv").write_text(table_csv(fig1.columns, fig1.data, fmts), encoding="utf-8")
    fig2 = analysis.figure2_series(args.n_max)
    fmts = [lambda v: str(int(v)), fmt_fixed]
    (outdir / "figure2.csv").write_text(table_csv(fig2.columns, fig2.data, fmts), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n-molecules", type=int, default=None, help="molecule count N >= 2")
    common.add_argument("--mass", type=float, default=1.0)
    common.add_argument("--boltzmann", type=float, default=1.0)
    common.add_argument("--temperature", type=float, default=1.0)
    common.add_argument("--seed", type=int, default=0, help="64-bit unsigned RNG seed")
    common.add_argument("--count", type=int, default=None)
    common.add_argument("--output", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--grid", default="-4:4:801", help="min:max:points")

    parser = _Parser(prog="shellgas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("pdf", parents=[common], help="finite-N and Maxwellian densities on a grid")
    sub.add_parser("cdf", parents=[common], help="finite-N and Maxwellian CDFs on a grid")
    sub.add_parser("sample", parents=[common], help="draw single-molecule velocities")
    sub.add_parser("moments", parents=[common], help="analytic and quadrature moments")
    p = sub.add_parser("gamma", parents=[common], help="mean-speed factor gamma(N)")
    p.add_argument("--n-max", type=int, default=1000)
    p = sub.add_parser("converge", parents=[common], help="distance to the Maxwellian")
    p.add_argument("--n-values", default="3,10,100,1000")
    p = sub.add_parser("simulate", parents=[common], help="Kac collision run with KS check")
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--init", choices=("equal-speeds", "shell-uniform"), default="equal-speeds")
    p = sub.add_parser("figures", parents=[common], help="write figure1.csv and figure2.csv")
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--step", type=float, default=0.01)
    return parser


COMMANDS = {
    "pdf": cmd_pdf,
    "cdf": cmd_cdf,
    "sample": cmd_sample,
    "moments": cmd_moments,
    "gamma": cmd_gamma,
    "converge": cmd_converge,
    "simulate": cmd_simulate,
    "figures": cmd_figures,
}


def _join_grid(argv: list[str]) -> list[str]:
    # "--grid -2:2:5" would be read as an option; glue it to its flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_join_grid(argv))
        if args.format is None and args.command != "moments":
            args.format = "csv"
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"shellgas: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"shellgas: cannot write output: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
