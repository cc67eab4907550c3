"""Command line experiment runner.

Every CSV starts with ``#`` comment lines holding the tool version and the
full resolved parameter set, then a header row. Floats are written with
``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from cowu import __version__
from cowu.core import (
    QueryRange,
    Scenario,
    SystemConfig,
    load_scenario,
    scenario_from_mapping,
)
from cowu.errors import DomainError, InfeasibleError
from cowu.metrics import MetricInputs, evaluate, rr_gamma_u, rr_pull_energy
from cowu.opt import GridSpec, alpha_opt, index_grid, lambda_max, sweep
from cowu.sim import DEFAULT_FRAMES, run_campaign

EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
NA = "NA"

FIG3_ALPHAS = index_grid(0.0, 1.0, 0.2)
FIG3_L = (25, 50, 75)
FIG4_NW = (5, 15, 25, 35, 45)
FIG4_NU = (15, 25, 35)
FIG5_RANGES = ((0.94, 0.98), (0.93, 0.99), (0.92, 1.0))
FIG5_LAMBDAS = index_grid(0.005, 0.025, 0.005)


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return NA
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return NA if math.isnan(x) else repr(x)
    return str(x)


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def write_csv(out, params: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [f"# cowu {__version__}"]
    lines += [f"# {k}={_fmt(v) if not isinstance(v, str) else v}" for k, v in params.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def read_header(path) -> dict[str, str]:
    """Parameters recorded in the comment header of a CSV written by this tool."""
    params = {}
    for line in Path(path).read_text().splitlines():
        if not line.startswith("#"):
            break
        key, sep, value = line[1:].strip().partition("=")
        if sep:
            params[key] = value
    return params


def resolve_scenario(args) -> Scenario:
    base = Scenario(SystemConfig(), QueryRange(0.6, 0.9)).to_mapping()
    if args.config:
        base.update(load_scenario(args.config).to_mapping())
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        base[key.strip()] = value.strip()
    return scenario_from_mapping(base)


def _alphas(args, scenario: Scenario) -> list[float]:
    if args.alpha:
        return _float_list(args.alpha)
    if scenario.alpha is not None:
        return [scenario.alpha]
    return list(FIG3_ALPHAS)


# -- subcommands --------------------------------------------------------------


def cmd_analyze(args) -> None:
    sc = resolve_scenario(args)
    alphas = _alphas(args, sc)
    rows = []
    for a in alphas:
        r = evaluate(MetricInputs.for_alpha(sc.config, sc.query, a))
        rows.append((a, r.gamma_w, r.gamma_u, r.e_tot))
    params = sc.to_mapping() | {"alphas": ",".join(map(repr, alphas))}
    write_csv(args.out, params, ("alpha", "gamma_w", "gamma_u", "e_tot_joules"), rows)


SIM_COLUMNS = (
    "alpha", "gamma_w", "gamma_w_stderr", "gamma_u", "gamma_u_stderr",
    "e_tot_joules", "e_tot_stderr", "frames", "seed",
)


def _sim_rows(sc: Scenario, alphas, frames, seed, workers):
    for a in alphas:
        est = run_campaign(sc.config, sc.query, a, frames=frames, master_seed=seed, workers=workers)
        yield (
            a, est.gamma_w.mean, est.gamma_w.stderr, est.gamma_u.mean, est.gamma_u.stderr,
            est.e_tot.mean, est.e_tot.stderr, frames, seed,
        )


def cmd_simulate(args) -> None:
    if args.frames < 1:
        raise UsageError("--frames must be >= 1")
    sc = resolve_scenario(args)
    alphas = _alphas(args, sc)
    params = sc.to_mapping() | {
        "alphas": ",".join(map(repr, alphas)), "frames": args.frames, "seed": args.seed,
    }
    rows = list(_sim_rows(sc, alphas, args.frames, args.seed, args.workers))
    write_csv(args.out, params, SIM_COLUMNS, rows)


def _grid(args) -> GridSpec:
    kw = {"gamma_th": args.gamma_th}
    if args.alpha:
        kw["alpha_values"] = tuple(_float_list(args.alpha))
    if getattr(args, "lambdas", None):
        kw["lambda_values"] = tuple(_float_list(args.lambdas))
    return GridSpec(**kw)


def _grid_params(grid: GridSpec) -> dict:
    return {
        "alpha_grid": ",".join(map(repr, grid.alpha_values)),
        "lambda_grid": ",".join(map(repr, grid.lambda_values)),
        "gamma_th": grid.gamma_th,
    }


def cmd_sweep(args) -> None:
    sc = resolve_scenario(args)
    grid = _grid(args)
    res = sweep(sc.config, sc.query, grid)
    write_csv(
        args.out,
        sc.to_mapping() | _grid_params(grid),
        ("lambda", "alpha", "gamma_w", "gamma_u", "e_tot_joules", "feasible"),
        res.rows(),
    )


def cmd_lambda_max(args) -> None:
    sc = resolve_scenario(args)
    grid = _grid(args)
    if args.scheme == "rr" and sc.config.n_pull > sc.config.slots_per_frame:
        raise InfeasibleError("Round-Robin needs N_w <= L")
    lam, alphas = lambda_max(sc.config, sc.query, grid, scheme=args.scheme)
    write_csv(
        args.out,
        sc.to_mapping() | _grid_params(grid) | {"scheme": args.scheme},
        ("scheme", "n_pull", "n_push", "lambda_max", "feasible_alphas"),
        [(args.scheme, sc.config.n_pull, sc.config.n_push, lam, " ".join(map(repr, alphas)))],
    )


def _alpha_opt_rows(sc: Scenario, grid: GridSpec, lambdas):
    rr = rr_pull_energy(sc.config.n_pull, sc.config)
    for lam in lambdas:
        c = alpha_opt(sc.config, sc.query, lam, grid)
        if c is None:
            yield (lam, "infeasible", NA, NA, NA, NA)
        else:
            eta = c.e_tot / rr if rr > 0 else math.nan
            yield (lam, c.alpha, c.e_tot, eta, c.gamma_w, c.gamma_u)


ALPHA_OPT_COLUMNS = ("lambda", "alpha_opt", "e_tot_joules", "eta", "gamma_w", "gamma_u")


def cmd_alpha_opt(args) -> None:
    sc = resolve_scenario(args)
    grid = _grid(args)
    lambdas = _float_list(args.lambdas) if args.lambdas else list(FIG5_LAMBDAS)
    write_csv(
        args.out,
        sc.to_mapping() | _grid_params(grid) | {"lambdas": ",".join(map(repr, lambdas))},
        ALPHA_OPT_COLUMNS,
        list(_alpha_opt_rows(sc, grid, lambdas)),
    )


# -- figure reproduction ------------------------------------------------------


def _gnuplot(path: Path, title: str, xlabel: str, ylabel: str, series: list[tuple[str, str, str]]) -> None:
    """Write a gnuplot script; ``series`` is ``(csv file, using clause, label)``."""
    parts = [f"'{f}' using {u} with linespoints title '{t}'" for f, u, t in series]
    path.write_text(
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        f"set title '{title}'\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"
        "set terminal pngcairo size 800,500\n"
        f"set output '{path.stem}.png'\n"
        "plot " + ", \\\n     ".join(parts) + "\n"
    )


def reproduce_fig3(out: Path, frames: int, seed: int, workers: int | None) -> dict:
    files = {}
    for L in FIG3_L:
        sc = Scenario(SystemConfig(slots_per_frame=L), QueryRange(0.6, 0.9))
        params = sc.to_mapping() | {"alphas": ",".join(map(repr, FIG3_ALPHAS))}
        theory = out / f"fig3_theory_L{L}.csv"
        rows = []
        for a in FIG3_ALPHAS:
            r = evaluate(MetricInputs.for_alpha(sc.config, sc.query, a))
            rows.append((a, r.gamma_w, r.gamma_u, r.e_tot))
        write_csv(theory, params, ("alpha", "gamma_w", "gamma_u", "e_tot_joules"), rows)
        files[theory.name] = params
        if frames > 0:
            sim = out / f"fig3_sim_L{L}.csv"
            sparams = params | {"frames": frames, "seed": seed}
            write_csv(sim, sparams, SIM_COLUMNS, list(_sim_rows(sc, FIG3_ALPHAS, frames, seed, workers)))
            files[sim.name] = sparams
    for col, metric, label in ((2, "gamma_w", "gamma_w"), (3, "gamma_u", "gamma_u"), (4, "e_tot", "E_tot [J]")):
        series = []
        for L in FIG3_L:
            series.append((f"fig3_theory_L{L}.csv", f"1:{col}", f"theory L={L}"))
            if frames > 0:
                sim_col = {2: 2, 3: 4, 4: 6}[col]
                series.append((f"fig3_sim_L{L}.csv", f"1:{sim_col}", f"simulation L={L}"))
        _gnuplot(out / f"fig3_{metric}.gp", f"{label} vs alpha", "alpha", label, series)
    return files


def reproduce_fig4(out: Path) -> dict:
    grid = GridSpec()
    query = QueryRange(0.94, 0.98)
    rows = []
    for Nu in FIG4_NU:
        for Nw in FIG4_NW:
            cfg = SystemConfig(n_pull=Nw, n_push=Nu, slots_per_frame=50)
            lam, alphas = lambda_max(cfg, query, grid)
            rows.append(("cowu", Nu, Nw, lam, " ".join(map(repr, alphas))))
            lam_rr, _ = lambda_max(cfg, None, grid, scheme="rr")
            rows.append(("rr", Nu, Nw, lam_rr, ""))
    path = out / "fig4_lambda_max.csv"
    params = Scenario(SystemConfig(slots_per_frame=50), query).to_mapping() | _grid_params(grid) | {
        "n_pull": ",".join(map(str, FIG4_NW)),
        "n_push": ",".join(map(str, FIG4_NU)),
    }
    write_csv(path, params, ("scheme", "n_push", "n_pull", "lambda_max", "feasible_alphas"), rows)
    (out / "fig4_lambda_max.gp").write_text(
        "set datafile separator ','\n"
        "set xlabel 'N_w'\nset ylabel 'lambda_max [packet/slot]'\n"
        "set terminal pngcairo size 800,500\nset output 'fig4_lambda_max.png'\n"
        "plot "
        + ", \\\n     ".join(
            f"'fig4_lambda_max.csv' using ((strcol(1) eq '{s}' && $2 == {nu}) ? $3 : 1/0):4 "
            f"with linespoints title '{s.upper()} (N_u={nu})'"
            for nu in FIG4_NU
            for s in ("cowu", "rr")
        )
        + "\n"
    )
    return {path.name: params}


def reproduce_fig5(out: Path) -> dict:
    grid = GridSpec()
    files = {}
    series_a, series_eta = [], []
    for lo, hi in FIG5_RANGES:
        sc = Scenario(SystemConfig(n_pull=25, n_push=25, slots_per_frame=50), QueryRange(lo, hi))
        path = out / f"fig5_alpha_opt_{lo}_{hi}.csv"
        params = sc.to_mapping() | _grid_params(grid) | {"lambdas": ",".join(map(repr, FIG5_LAMBDAS))}
        write_csv(path, params, ALPHA_OPT_COLUMNS, list(_alpha_opt_rows(sc, grid, FIG5_LAMBDAS)))
        files[path.name] = params
        series_a.append((path.name, "1:2", f"V_th=[{lo}, {hi}]"))
        series_eta.append((path.name, "1:4", f"V_th=[{lo}, {hi}]"))
    _gnuplot(out / "fig5_alpha_opt.gp", "alpha_opt vs lambda", "lambda", "alpha_opt", series_a)
    _gnuplot(out / "fig5_eta.gp", "eta vs lambda", "lambda", "eta", series_eta)
    return files


def cmd_reproduce(args) -> None:
    out = Path(args.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    if args.figure == "fig3":
        files = reproduce_fig3(out, args.frames, args.seed, args.workers)
    elif args.figure == "fig4":
        files = reproduce_fig4(out)
    elif args.figure == "fig5":
        files = reproduce_fig5(out)
    else:
        raise UsageError(f"unknown figure {args.figure!r}; choose fig3, fig4 or fig5")
    manifest = {
        "tool": "cowu",
        "version": __version__,
        "figure": args.figure,
        "seed": args.seed if args.figure == "fig3" else None,
        "frames": args.frames if args.figure == "fig3" else None,
        "files": files,
    }
    (out / f"{args.figure}_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cowu", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cowu {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--config", metavar="PATH", help="flat YAML/JSON key-value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
        p.add_argument("--out", metavar="PATH", help="output file ('-' or omitted: stdout)")

    def grid_args(p):
        p.add_argument("--alpha", metavar="LIST", help="alpha grid (default 0:0.05:1)")
        p.add_argument("--gamma-th", type=float, default=0.8, help="threshold for both metrics")

    p = sub.add_parser("analyze", help="closed-form metrics per alpha")
    scenario_args(p)
    p.add_argument("--alpha", metavar="LIST", help="comma-separated alphas")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo estimates per alpha")
    scenario_args(p)
    p.add_argument("--alpha", metavar="LIST")
    p.add_argument("--frames", type=int, default=DEFAULT_FRAMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="threads (results do not depend on it)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="metrics and feasibility on the (lambda, alpha) grid")
    scenario_args(p)
    grid_args(p)
    p.add_argument("--lambda", dest="lambdas", metavar="LIST", help="lambda grid (default 0.005:0.005:0.05)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lambda-max", help="largest supportable push arrival rate")
    scenario_args(p)
    grid_args(p)
    p.add_argument("--lambda", dest="lambdas", metavar="LIST")
    p.add_argument("--scheme", choices=("cowu", "rr"), default="cowu")
    p.set_defaults(func=cmd_lambda_max)

    p = sub.add_parser("alpha-opt", help="energy-minimizing alpha and CoWu/RR energy ratio")
    scenario_args(p)
    grid_args(p)
    p.add_argument("--lambda", dest="lambdas", metavar="LIST", help="arrival rates (default 0.005:0.005:0.025)")
    p.set_defaults(func=cmd_alpha_opt)

    p = sub.add_parser("reproduce", help="regenerate a figure's data and gnuplot scripts")
    p.add_argument("--figure", required=True, metavar="ID", help="fig3, fig4 or fig5")
    p.add_argument("--out", metavar="DIR", help="output directory (default ./results)")
    p.add_argument("--frames", type=int, default=DEFAULT_FRAMES, help="fig3 simulation frames (0 skips)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InfeasibleError as exc:
        print(f"cowu: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, DomainError, OSError) as exc:
        print(f"cowu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
