"""Command-line front end.

Subcommands: ``seed``, ``check``, ``continue``, ``embed`` and ``verify``.

Exit codes:
    0  success (a branch stopping at a fold is a result, not an error)
    2  bad input or I/O problem
    3  seed rejected (degenerate, or refinement of a custom guess failed)
    4  dynamical verification failed (drift above threshold or integration error)
"""
from __future__ import annotations

import argparse
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .continuation import continue_family
from .dynamics import verify_re
from .embedding import embed, latitude_report, rescale_unit
from .errors import ConvergenceError, CurvedNBodyError, DegenerateSeedError, IntegrationError
from .seeds import lagrange_seed, polygon_seed, refine_cc
from .serialize import (
    DEFAULT_KAPPA_LIMIT,
    RunConfig,
    atomic_write_text,
    branch_paths,
    default_manifest_path,
    embedded_to_csv,
    family_to_csv,
    fmt,
    read_family_csv,
    read_json,
    seed_to_dict,
    write_json,
)

log = logging.getLogger("curved_nbody")

EXIT_OK, EXIT_INPUT, EXIT_SEED, EXIT_VERIFY = 0, 2, 3, 4


class InputError(Exception):
    pass


def _add_seed_source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lagrange3", nargs=3, type=float, metavar=("M1", "M2", "M3"),
                   help="Lagrange equilateral triangle with these masses")
    g.add_argument("--polygon", type=int, metavar="N", help="regular N-gon of unit masses")
    g.add_argument("--seed-file", metavar="JSON", help="seed JSON (u and masses); refined by Newton")
    p.add_argument("--masses", nargs="+", type=float, help="masses (override those in --seed-file)")


def _config_from_args(args) -> RunConfig:
    common = {}
    for name in ("direction", "delta_kappa", "kappa_limit", "tol", "reflect_z", "out", "manifest"):
        if getattr(args, name, None) is not None:
            common[name] = getattr(args, name)
    if getattr(args, "fixed_step", False):
        common["adaptive"] = False
    if args.lagrange3:
        return RunConfig(masses=list(args.lagrange3), seed_kind="lagrange3", **common)
    if args.polygon:
        if args.polygon < 2:
            raise InputError("--polygon needs N >= 2")
        return RunConfig(masses=[1.0] * args.polygon, seed_kind="polygon",
                         polygon_n=args.polygon, **common)
    if args.seed_file:
        d = read_json(args.seed_file)
        masses = args.masses or d.get("masses")
        if masses is None or "u" not in d:
            raise InputError(f"{args.seed_file}: seed file needs 'u' and 'masses'")
        return RunConfig(masses=masses, seed_kind="custom", seed_u=list(d["u"]), **common)
    raise InputError("choose a seed: --lagrange3, --polygon or --seed-file")


def build_seed(config: RunConfig):
    if config.seed_kind == "lagrange3":
        return lagrange_seed(*config.masses)
    if config.seed_kind == "polygon":
        return polygon_seed(config.polygon_n)
    report = refine_cc(config.seed_u, config.masses)
    report.kind = "custom"
    return report


def _print_seed(report) -> None:
    d = seed_to_dict(report)
    print(f"seed kind        : {d['kind']}")
    print(f"masses           : {' '.join(fmt(m) for m in d['masses'])}")
    print(f"circumradius     : {d['circumradius']:.10f}")
    if "side" in d:
        print(f"side             : {d['side']:.10f}")
    print(f"residual |gradL| : {d['residual']:.3e}")
    print(f"hessian spectrum : {' '.join(f'{v:.6g}' for v in d['hessian_spectrum'])}")
    print(f"kernel dimension : {d['kernel_dimension']}")
    if d["kernel_alignment"] is not None:
        print(f"kernel alignment : {d['kernel_alignment']:.12f}")
    print(f"degenerate       : {'yes' if d['degenerate'] else 'no'}")
    if "routh_beta" in d:
        print(f"routh beta       : {d['routh_beta']:.10g} (informational)")


def cmd_seed(args) -> int:
    config = _config_from_args(args)
    report = build_seed(config)
    _print_seed(report)
    out = args.out or "seed.json"
    write_json(out, seed_to_dict(report))
    print(f"wrote {out}")
    return EXIT_SEED if report.degenerate else EXIT_OK


def cmd_check(args) -> int:
    report = build_seed(_config_from_args(args))
    _print_seed(report)
    return EXIT_SEED if report.degenerate else EXIT_OK


def _software() -> dict:
    return {
        "name": "curved-nbody",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def run_continuation(config: RunConfig, argv=None) -> dict:
    """Run every requested branch, write the CSV files and the shared manifest."""
    seed = build_seed(config)
    if seed.degenerate:
        raise DegenerateSeedError(f"seed is degenerate (kernel dimension {seed.kernel_dimension})",
                                  report=seed)
    config.seed_u = [float(x) for x in seed.configuration]
    limit = abs(config.kappa_limit)
    branches = []
    t0 = time.perf_counter()
    for direction, path in branch_paths(config.out, config.direction).items():
        sign = 1 if direction == "pos" else -1
        fam = continue_family(seed, direction, delta_kappa=config.delta_kappa,
                              kappa_limit=sign * limit, tol=config.tol, adaptive=config.adaptive)
        atomic_write_text(path, family_to_csv(fam))
        term = fam.termination
        branches.append({
            "direction": direction,
            "file": str(path),
            "records": len(fam),
            "terminal_kappa": fam.terminal_kappa,
            "termination": {"cause": term.cause, "kappa": term.kappa, "message": term.message},
            "max_residual": max(r.residual for r in fam.records),
            "max_abs_alpha": max(abs(r.alpha) for r in fam.records),
        })
        print(f"{direction}: {len(fam)} records, terminal kappa {fam.terminal_kappa:.8g} "
              f"({term.cause}) -> {path}")
    manifest = {
        "format": "curved-nbody/manifest",
        "software": _software(),
        "command": list(argv) if argv is not None else None,
        "config": config.to_dict(),
        "seed": seed_to_dict(seed),
        "branches": branches,
        "wall_time_s": time.perf_counter() - t0,
    }
    mpath = config.manifest or default_manifest_path(config.out)
    write_json(mpath, manifest)
    print(f"manifest -> {mpath}")
    return manifest


def cmd_continue(args) -> int:
    if args.config:
        d = read_json(args.config)
        config = RunConfig.from_dict(d.get("config", d))
        if args.out:
            config.out = args.out
        if args.manifest:
            config.manifest = args.manifest
    else:
        config = _config_from_args(args)
    run_continuation(config, argv=getattr(args, "argv", None))
    return EXIT_OK


def _masses_for(args):
    if getattr(args, "masses", None):
        return np.asarray(args.masses, dtype=float)
    if getattr(args, "manifest", None):
        return np.asarray(read_json(args.manifest)["config"]["masses"], dtype=float)
    return None


def cmd_embed(args) -> int:
    table = read_family_csv(args.family)
    reflect = args.reflect_z
    if not reflect and args.manifest:
        reflect = bool(read_json(args.manifest)["config"].get("reflect_z", False))
    masses = _masses_for(args)
    rows, skipped, worst = [], 0, 0.0
    for kappa, u in zip(table.kappa, table.u):
        if kappa == 0:
            skipped += 1
            continue
        ec = rescale_unit(embed(u, kappa), reflect=reflect)
        worst = max(worst, float(np.max(np.abs(ec.constraint_residual()))))
        rows.append((kappa, ec))
    out = args.out or str(Path(args.family).with_name(Path(args.family).stem + "_xyz.csv"))
    atomic_write_text(out, embedded_to_csv(rows))
    if skipped:
        log.warning("skipped %d flat (kappa = 0) row(s)", skipped)
    print(f"embedded {len(rows)} rows ({skipped} flat rows skipped), "
          f"max constraint residual {worst:.3e} -> {out}")
    if masses is not None and rows:
        kappa, ec = rows[-1]
        rep = latitude_report(ec, masses)
        print(f"last row kappa={kappa:.8g}: bodies by increasing mass "
              + ", ".join(f"m={m:g} z={z:.6f} rho={r:.6f}"
                          for m, z, r in zip(rep.masses, rep.z, rep.axis_distance)))
    return EXIT_OK


def _select_rows(table, args) -> list[int]:
    if args.rows:
        return [i if i >= 0 else len(table) + i for i in args.rows]
    if args.kappa:
        return [int(np.argmin(np.abs(table.kappa - k))) for k in args.kappa]
    count = min(args.samples, len(table))
    return sorted(set(np.linspace(0, len(table) - 1, count).round().astype(int).tolist()))


def cmd_verify(args) -> int:
    table = read_family_csv(args.family)
    masses = _masses_for(args)
    if masses is None:
        raise InputError("verify needs --masses or --manifest")
    if table.u.shape[1] != 2 * len(masses):
        raise InputError(f"{len(masses)} masses do not match {table.u.shape[1] // 2} bodies")
    results, ok = [], True
    for i in _select_rows(table, args):
        kappa = float(table.kappa[i])
        try:
            drift = verify_re(table.u[i], masses, kappa, period=args.period, tol=args.tol)
            passed = drift <= args.threshold
            entry = {"row": i, "kappa": kappa, "drift": drift, "passed": passed}
        except (IntegrationError, CurvedNBodyError) as exc:
            passed = False
            entry = {"row": i, "kappa": kappa, "drift": None, "passed": False, "error": str(exc)}
        ok &= passed
        results.append(entry)
        drift_s = "   failed" if entry["drift"] is None else f"{entry['drift']:.3e}"
        print(f"row {i:6d}  kappa {kappa:+.8f}  drift {drift_s}  {'ok' if passed else 'FLAGGED'}")
    drifts = [r["drift"] for r in results if r["drift"] is not None]
    summary = max(drifts) if drifts else None
    print(f"max drift {summary if summary is None else format(summary, '.3e')} "
          f"(threshold {args.threshold:g})")
    if args.out:
        write_json(args.out, {"family": str(args.family), "threshold": args.threshold,
                              "period": args.period, "max_drift": summary, "rows": results})
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curved-nbody", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("seed", help="build a planar central configuration and write it as JSON")
    _add_seed_source(s)
    s.add_argument("--out", help="seed JSON path (default seed.json)")
    s.set_defaults(func=cmd_seed)

    c = sub.add_parser("check", help="report Hessian non-degeneracy of a seed")
    _add_seed_source(c)
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("continue", help="continue a seed in curvature and write family CSV(s)")
    _add_seed_source(k)
    k.add_argument("--config", help="RunConfig or manifest JSON to rerun")
    k.add_argument("--direction", choices=("pos", "neg", "both"))
    k.add_argument("--dk", dest="delta_kappa", type=float, help="curvature step (default 0.01)")
    k.add_argument("--kappa-limit", type=float,
                   help=f"|kappa| at which to stop (default {DEFAULT_KAPPA_LIMIT:g})")
    k.add_argument("--tol", type=float, help="residual tolerance (default 1e-13)")
    k.add_argument("--fixed-step", action="store_true",
                   help="no step adaptation; stop at the first failed step")
    k.add_argument("--reflect-z", action="store_true", default=None,
                   help="recorded in the manifest for later embedding")
    k.add_argument("--out", help="family CSV (default family.csv)")
    k.add_argument("--manifest", help="manifest JSON (default <out>.manifest.json)")
    k.set_defaults(func=cmd_continue)

    e = sub.add_parser("embed", help="lift family rows onto the unit sphere/hyperboloid")
    e.add_argument("family")
    e.add_argument("--reflect-z", action="store_true")
    e.add_argument("--masses", nargs="+", type=float)
    e.add_argument("--manifest")
    e.add_argument("--out")
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("verify", help="integrate family rows for one period and measure drift")
    v.add_argument("family")
    v.add_argument("--masses", nargs="+", type=float)
    v.add_argument("--manifest")
    sel = v.add_mutually_exclusive_group()
    sel.add_argument("--rows", nargs="+", type=int)
    sel.add_argument("--kappa", nargs="+", type=float, help="verify the rows nearest these kappas")
    sel.add_argument("--samples", type=int, default=5, help="evenly spaced rows (default 5)")
    v.add_argument("--threshold", type=float, default=1e-6)
    v.add_argument("--period", type=float, default=2 * np.pi)
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--out", help="write the report as JSON")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except DegenerateSeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            _print_seed(exc.report)
        return EXIT_SEED
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEED
    except (InputError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
