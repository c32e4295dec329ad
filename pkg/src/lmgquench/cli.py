"""Command-line front end: ``lmgquench <subcommand> ...``.

Exit status is 0 on success, 2 for parameter errors and 3 when a numerical
check (eigensolver residual) fails.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .model import ModelParams, build_hamiltonian
from .quench import InitialStateSpec, run_quench
from .semiclassics import (
    alpha_gs,
    critical_energy,
    critical_field,
    quenched_energy_sc,
    to_spectrum_units,
)
from .spectral import ConvergenceError, density_of_states, diagonalize
from .sweep import SweepError, SweepPlan, fit_entropy_scaling, parse_grid, run_sweep, write_sweep_csv
from .output import write_json, write_manifest, write_table

EXIT_PARAM = 2
EXIT_NUMERIC = 3


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be a comma-separated list of integers, got {text!r}")


def _grid(text: str) -> np.ndarray:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _state(text: str) -> InitialStateSpec:
    try:
        return InitialStateSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _prepare_out(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k == "func":
            continue
        if isinstance(v, InitialStateSpec):
            v = v.label
        elif isinstance(v, list) and v and isinstance(v[0], InitialStateSpec):
            v = [s.label for s in v]
        elif isinstance(v, np.ndarray):
            v = v.tolist()
        cfg[k] = v
    return cfg


def cmd_spectrum(args) -> None:
    out = _prepare_out(args)
    rows = []
    for h in args.grid:
        eig = diagonalize(build_hamiltonian(ModelParams(args.n, float(h), args.eps)))
        rows.extend((float(h), k, e, int(p)) for k, (e, p) in enumerate(zip(eig.values, eig.parities)))
    write_table(out, "spectrum", ("h", "index", "energy", "parity"), rows, args.format)
    eig = diagonalize(build_hamiltonian(ModelParams(args.n, args.h, args.eps)))
    dos = density_of_states(eig.values, args.bin_width)
    write_table(
        out, "dos", ("bin_center", "count", "nu"),
        zip(dos.bin_centers, dos.counts, dos.smoothed), args.format,
    )
    write_manifest(out, "spectrum", _config(args))


def _times(args):
    if args.t_max is None:
        return None
    return np.linspace(0.0, args.t_max, args.t_points)


def cmd_quench(args) -> None:
    out = _prepare_out(args)
    res = run_quench(args.n, args.hi, args.hf, args.state, bias=args.eps, times=_times(args))
    write_json(os.path.join(out, "quench.json"), res.to_json())
    s = res.survival
    write_table(out, "survival", ("t", "L"), zip(s.times, s.values), args.format)
    d = res.distribution
    write_table(out, "work", ("W", "p"), zip(d.work, d.probabilities), args.format)
    write_manifest(out, "quench", _config(args))


def _plan(args) -> SweepPlan:
    return SweepPlan(
        h_i=args.hi,
        hf_grid=args.grid,
        sizes=args.sizes,
        state_kinds=args.state or ["sym"],
        epsilon=args.eps,
        observables=args.observables.split(","),
    )


def _write_rows(out, rows, fmt):
    if fmt == "csv":
        with open(os.path.join(out, "sweep.csv"), "w", encoding="utf-8", newline="\n") as fh:
            write_sweep_csv(rows, fh)
    else:
        from .sweep import CSV_COLUMNS

        write_table(out, "sweep", CSV_COLUMNS, ([getattr(r, c) for c in CSV_COLUMNS] for r in rows), fmt)


def cmd_sweep(args) -> None:
    out = _prepare_out(args)
    rows = run_sweep(_plan(args), n_jobs=args.jobs)
    _write_rows(out, rows, args.format)
    write_manifest(out, "sweep", _config(args))


def cmd_scaling(args) -> None:
    out = _prepare_out(args)
    plan = _plan(args)
    rows = run_sweep(plan, n_jobs=args.jobs)
    _write_rows(out, rows, args.format)
    fit = fit_entropy_scaling(rows, kind=plan.state_kinds[0].label)
    write_json(os.path.join(out, "scaling.json"), fit.to_json())
    write_manifest(out, "scaling", _config(args))


def semiclassics_summary(h_i: float, h_f: float, n_spins: int) -> dict:
    e_q = quenched_energy_sc(h_i, h_f)
    summary = {
        "hi": h_i,
        "hf": h_f,
        "N": n_spins,
        "alpha_gs": list(alpha_gs(h_i)),
        "E_q": e_q,
        "E_q_spectrum": to_spectrum_units(e_q, h_f, n_spins),
        "hf_c": critical_field(h_i) if 0 <= h_i <= 1 else None,
        "E_c": critical_energy(h_f) if 0 <= h_f <= 1 else None,
        "E_c_spectrum": 0.0 if 0 <= h_f <= 1 else None,
    }
    return summary


def cmd_semiclassics(args) -> None:
    summary = semiclassics_summary(args.hi, args.hf, args.n)
    text = json.dumps(summary, indent=2)
    print(text)
    if args.out:
        out = _prepare_out(args)
        write_json(os.path.join(out, "semiclassics.json"), summary)
        write_manifest(out, "semiclassics", _config(args))


def cmd_reproduce(args) -> None:
    from .figures import panels_for, reproduce

    panels_for(args.figure)
    out = _prepare_out(args)
    files = reproduce(args.figure, out, args.format, n_jobs=args.jobs)
    write_manifest(out, "reproduce", _config(args))
    for f in files:
        print(f)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmgquench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default="lmg_out"):
        p.add_argument("--out", default=out_default, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("spectrum", help="eigenvalues over an h grid and the density of states")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--grid", type=_grid, default=parse_grid("0:1.5:0.01"), help="h grid a:b:step")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--h", type=float, default=0.5, help="field for the density of states")
    p.add_argument("--bin-width", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("quench", help="one sudden quench: work distribution, moments, survival")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--hi", type=float, default=0.5)
    p.add_argument("--hf", type=float, default=0.75)
    p.add_argument("--eps", type=float, default=0.0, help="bias of the final Hamiltonian")
    p.add_argument("--state", type=_state, default=InitialStateSpec.symmetric_ground())
    p.add_argument("--t-max", type=float, default=None, help="default: 20 revival periods")
    p.add_argument("--t-points", type=int, default=2048)
    common(p)
    p.set_defaults(func=cmd_quench)

    for name, func, help_ in (
        ("sweep", cmd_sweep, "observables over an h_f grid and system sizes"),
        ("scaling", cmd_scaling, "fit of max S_W against log2 N"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--hi", type=float, default=0.5)
        p.add_argument("--grid", type=_grid, default=parse_grid("0.55:0.95:0.01"), help="h_f grid a:b:step")
        p.add_argument("--sizes", type=_sizes, default=[100, 200, 400, 800])
        p.add_argument("--state", type=_state, action="append", help="repeatable; default sym")
        p.add_argument("--eps", type=float, default=0.0)
        p.add_argument("--observables", default="entropy,moments,peak_probability")
        p.add_argument("--jobs", type=int, default=1)
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("semiclassics", help="coherent-state predictions as JSON")
    p.add_argument("--hi", type=float, default=0.5)
    p.add_argument("--hf", type=float, default=0.75)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--out", default=None, help="also write semiclassics.json here")
    p.set_defaults(func=cmd_semiclassics)

    p = sub.add_parser("reproduce", help="data behind one figure, plus a gnuplot script")
    p.add_argument("figure", help="fig1, fig2a..fig6c, or fig2..fig6 for all panels")
    p.add_argument("--jobs", type=int, default=1)
    common(p, out_default=None)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "reproduce" and args.out is None:
        args.out = os.path.join("lmg_out", args.figure)
    try:
        args.func(args)
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc.__cause__, ConvergenceError) else EXIT_PARAM
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return 0


if __name__ == "__main__":
    sys.exit(main())
