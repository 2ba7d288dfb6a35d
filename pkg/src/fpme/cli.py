"""Command-line front end.

Subcommands: ``catalog`` (build and serialize a solution), ``verify``
(profile-equation residuals), ``derive`` (exponent re-derivation trace)
and ``simulate`` (spectral-solver experiments).  Every run writes a JSON
manifest listing its outputs.  Exit codes: 0 success, 1 verification
failure, 2 usage or parameter error, 3 numerical failure.

Flags may be preloaded from a JSON config file (``--config``); explicit
flags override config values.  The only environment variable read is
``FPME_NUM_THREADS``, bounding the verify command's worker threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from ._errors import InstabilityError, ParameterError, QuadratureError
from . import catalog as cat
from . import derive as drv
from . import evolve as evo
from . import residual as res
from .fraclap import RadialProfile


def _num_threads() -> int:
    try:
        return max(1, int(os.environ.get("FPME_NUM_THREADS", "1")))
    except ValueError:
        return 1


def _write_manifest(out_dir, command, parameters, seed, outputs,
                    warnings=0):
    manifest = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": sorted(outputs),
        "warnings": warnings,
        "threads": _num_threads(),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.16e}" for v in row])


def _build_solution(args):
    kwargs = {}
    if getattr(args, "m", None) is not None:
        kwargs["m"] = args.m
    sol = cat.make_family(args.family, args.N, args.s, **kwargs)
    fix = {}
    if getattr(args, "mass", None) is not None:
        fix["mass"] = args.mass
    if getattr(args, "radius", None) is not None:
        fix["radius"] = args.radius
    if getattr(args, "extinction_time", None) is not None:
        fix["extinction_time"] = args.extinction_time
    return cat.fix_constants(sol, **fix)


def cmd_catalog(args) -> int:
    sol = _build_solution(args)
    os.makedirs(args.out, exist_ok=True)
    outputs = []

    sol_path = os.path.join(args.out, "solution.json")
    with open(sol_path, "w") as fh:
        fh.write(cat.to_json(sol))
    outputs.append(sol_path)

    csv_path = os.path.join(args.out, "profile.csv")
    if sol.family.startswith("vss"):
        y = np.geomspace(1e-2, 1e2, 200)
        t0 = 0.0 if sol.family == "vss-ext" else 1.0
        phi = cat.evaluate(sol, y, t0)
    else:
        y = np.geomspace(1e-2 * sol.R, 1e2 * sol.R, 200)
        phi = cat.profile(sol)(y)
    _write_csv(csv_path, ["y", "phi"], zip(y, phi))
    outputs.append(csv_path)

    outputs.append(_write_manifest(args.out, "catalog", _params(args),
                                   args.seed, outputs))
    print(f"family={sol.family} N={sol.N} s={sol.s} m={sol.m:.12g} "
          f"q={sol.q:.12g} alpha={sol.alpha:.12g} beta={sol.beta:.12g} "
          f"lam={sol.lam:.12g} R={sol.R:.12g}")
    return 0


def _threaded_grid_eval(fn, grid, workers):
    if workers <= 1 or len(grid) < 8:
        return fn(grid)
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(grid, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(fn, chunks))
    return res.ResidualReport(
        np.concatenate([r.grid for r in reports]),
        np.concatenate([r.residual for r in reports]),
        np.concatenate([r.normalization for r in reports]),
    )


def _apply_perturbation(sol, spec: str):
    key, _, delta = spec.partition("=")
    if key not in ("m", "q", "alpha", "beta") or not delta:
        raise ParameterError(f"bad perturbation {spec!r}; use e.g. q=+0.1")
    from dataclasses import replace
    return replace(sol, **{key: getattr(sol, key) + float(delta)})


def cmd_verify(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    workers = _num_threads()
    outputs = []

    if args.family == "fpme3-compact":
        if args.m is None:
            raise ParameterError("the compact check needs an explicit --m")
        sol_m = args.m
        beta = 1.0 / (args.N * (sol_m - 1.0) + 2.0 - 2.0 * args.s)
        q = args.q if args.q is not None else 1.0
        pr = RadialProfile("compact", q, 1.0, 1.0, args.N)
        grid = np.geomspace(1e-2, 0.5, args.grid_n)
        report = _threaded_grid_eval(
            lambda g: res.residual_fpme3(pr, beta, args.s, args.N, sol_m, g),
            grid, workers)
        note = ("no compact-profile solution exists here; the residual "
                "cannot be driven to zero")
    else:
        sol = _build_solution(args)
        if args.perturb:
            sol = _apply_perturbation(sol, args.perturb)
        pr = cat.profile(sol)
        grid = np.geomspace(1e-2 * sol.R, 1e2 * sol.R, args.grid_n)
        family = sol.family
        if family == "fpme1-mc":
            fn = lambda g: res.residual_fpme1(pr, sol.beta, sol.s, sol.N,
                                              sol.m, g)
        elif family in ("fpme1-ext", "fpme1-im"):
            fn = lambda g: res.residual_fpme1_secondkind(
                pr, sol.alpha, sol.beta, sol.s, sol.N, sol.m, g)
        else:
            fn = lambda g: res.residual_fpme3(pr, sol.beta, sol.s, sol.N,
                                              sol.m, g)
        report = _threaded_grid_eval(fn, grid, workers)
        note = None

    csv_path = os.path.join(args.out, "residual.csv")
    report.to_csv(csv_path)
    outputs.append(csv_path)
    outputs.append(_write_manifest(args.out, "verify", _params(args),
                                   args.seed, outputs))
    ok = report.norm <= args.tol
    print(f"residual norm = {report.norm:.3e} (tolerance {args.tol:.1e}): "
          f"{'pass' if ok else 'FAIL'}")
    if not ok and note:
        print(note)
    return 0 if ok else 1


def cmd_derive(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    cases = drv.beta_cases(args.N, args.s)
    trace = {"N": args.N, "s": args.s, "cases": []}
    for case in cases:
        entry = {"bt": case.bt, "label": case.label, "family": case.family}
        if case.bt is not None:
            try:
                q = drv.solve_q(args.N, args.s, case.bt)
                m = drv.solve_m(args.N, args.s, q, case.bt)
                series = drv.gap_coefficients(args.N, args.s, m, q, case.bt)
                entry["q"] = q
                entry["m"] = m
                entry["gap_coefficients"] = list(series.coefficients)
            except ParameterError as exc:
                entry["note"] = str(exc)
        if case.family is not None:
            sol = drv.rederive_family(args.N, args.s, case)
            entry["assembled"] = {
                "family": sol.family, "m": sol.m, "q": sol.q,
                "alpha": sol.alpha, "beta": sol.beta,
            }
        trace["cases"].append(entry)

    path = os.path.join(args.out, "derivation.json")
    with open(path, "w") as fh:
        json.dump(trace, fh, indent=2, sort_keys=True)
    outputs = [path]
    outputs.append(_write_manifest(args.out, "derive", _params(args),
                                   args.seed, outputs))
    for entry in trace["cases"]:
        print(f"bt={entry['bt']}: {entry['label']}"
              + (f" -> {entry['family']}" if entry["family"] else ""))
    return 0


def cmd_simulate(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    snaps = []

    def snapshot_fn(u, t):
        if len(snaps) < args.snapshots:
            path = os.path.join(args.out, f"snapshot_{len(snaps):03d}.bin")
            evo.write_snapshot(path, u, args.L if args.L else -1.0, t)
            snaps.append(path)

    kw = dict(n=args.n, L=args.L)
    if args.experiment == "decay":
        family = "fpme3-mc" if args.equation == "fpme3" else "fpme1-mc"
        result = evo.run_decay_experiment(
            family, args.N, args.s, t_end=args.t_end,
            snapshot_fn=snapshot_fn, **kw)
        series = result.series
        print(f"measured exponent {result.measured:.6f} vs reference "
              f"{result.reference:.6f} "
              f"({abs(result.measured / result.reference - 1) * 100:.2f}% "
              "off)")
    elif args.experiment == "extinction":
        result = evo.run_extinction_experiment(
            args.N, args.s, T=args.T, snapshot_fn=snapshot_fn, **kw)
        series = result.series
        print(f"fitted extinction time {result.fitted_time:.6f} vs "
              f"prescribed {result.prescribed_time:.6f}; threshold "
              f"crossing: {result.threshold_time}; shape error "
              f"{result.shape_error:.4f}")
    else:
        family = "fpme3-mc" if args.equation == "fpme3" else "fpme1-mc"
        result = evo.run_profile_convergence(
            family, args.eps, args.N, args.s, t_end=args.t_end, **kw)
        series = result.series
        print(f"profile error: start {result.errors[0]:.4e}, "
              f"end {result.errors[-1]:.4e}")

    csv_path = os.path.join(args.out, "timeseries.csv")
    series.to_csv(csv_path)
    outputs.append(csv_path)
    outputs.extend(snaps)
    outputs.append(_write_manifest(args.out, "simulate", _params(args),
                                   args.seed, outputs,
                                   warnings=series.warnings))
    if series.warnings:
        print(f"tail monitor warnings: {series.warnings} (box too small "
              "for the profile tails)")
    return 0


def _params(args) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _add_common(p):
    p.add_argument("--out", default="fpme-out", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None,
                   help="JSON file of flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpme",
        description="explicit self-similar solutions of fractional porous "
                    "medium equations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="build and serialize a solution")
    p.add_argument("--family", required=True,
                   choices=list(cat.FAMILIES))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--m", type=float, default=None,
                   help="nonlinearity (separated-variables families only)")
    p.add_argument("--mass", type=float, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--extinction-time", dest="extinction_time",
                   type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", help="profile-equation residuals")
    p.add_argument("--family", required=True,
                   choices=["fpme1-mc", "fpme1-ext", "fpme1-im",
                            "fpme3-mc", "fpme3-compact"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--m", type=float, default=None,
                   help="nonlinearity (compact check only)")
    p.add_argument("--q", type=float, default=None,
                   help="compact profile exponent (compact check only)")
    p.add_argument("--mass", type=float, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--extinction-time", dest="extinction_time",
                   type=float, default=None)
    p.add_argument("--grid-n", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--perturb", default=None, metavar="KEY=DELTA",
                   help="perturb one exponent, e.g. q=+0.1")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("derive", help="re-derive admissible exponents")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("simulate", help="spectral-solver experiments")
    p.add_argument("--experiment", required=True,
                   choices=["decay", "extinction", "convergence"])
    p.add_argument("--equation", default="fpme1",
                   choices=["fpme1", "fpme3"])
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--t-end", dest="t_end", type=float, default=10.0)
    p.add_argument("--T", type=float, default=1.0,
                   help="prescribed extinction time")
    p.add_argument("--eps", type=float, default=0.1,
                   help="perturbation amplitude (convergence)")
    p.add_argument("--snapshots", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def _merge_config(parser, argv):
    """Give --config values the force of defaults, flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    args = parser.parse_args(argv)
    if known.config:
        with open(known.config) as fh:
            overrides = json.load(fh)
        explicit = {a.lstrip("-").split("=")[0].replace("-", "_")
                    for a in argv if a.startswith("--")}
        for key, value in overrides.items():
            key = key.replace("-", "_")
            if hasattr(args, key) and key not in explicit:
                setattr(args, key, value)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _merge_config(parser, argv)
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, InstabilityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
