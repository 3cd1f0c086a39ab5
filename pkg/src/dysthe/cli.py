"""Command line entry point: ``dysthe <subcommand> [--config FILE] [--out DIR]``.

Every subcommand writes into its output directory a manifest.json, one or
more CSV files and, only once everything succeeded, an empty DONE marker.
Exit status: 0 success, 1 a checked invariant failed, 2 bad configuration,
3 the solver became unstable.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import metadata
from pathlib import Path

import numpy as np

from . import io as dio
from .config import ConfigError, RunConfig, build_grid, build_initial, build_model, load_config
from .evolve import BlowUpError, Controls, evolve

SUBCOMMANDS = ("simulate", "verify-cov", "verify-scaling", "estimate-strichartz",
               "estimate-bilinear", "scattering", "airy1d", "coeffs")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3


def code_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


class RunDirectory:
    """Output folder with manifest and DONE-marker handling."""

    def __init__(self, path, subcommand: str, cfg: RunConfig | None):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.done = self.path / "DONE"
        if self.done.exists():
            self.done.unlink()
        self.manifest = {
            "subcommand": subcommand,
            "code_version": code_version(),
            "seed": cfg.seed if cfg else 0,
            "config": _jsonable(cfg.as_dict()) if cfg else None,
            "results": {},
        }

    def csv(self, name: str, header, rows) -> None:
        dio.write_csv(self.path / name, header, rows)

    def finish(self, ok: bool) -> int:
        self.manifest["passed"] = bool(ok)
        dio.atomic_write_text(self.path / "manifest.json",
                              json.dumps(_jsonable(self.manifest), indent=2, sort_keys=True) + "\n")
        if ok:
            self.done.write_text("")
            return EXIT_OK
        return EXIT_FAILED


def _study(cfg: RunConfig | None, key: str, default):
    if cfg is None or cfg.study.get(key) is None:
        return default
    return cfg.study[key]


def _grid_value(cfg: RunConfig | None, section: str, key: str, default):
    if cfg is None:
        return default
    value = getattr(cfg, section)[key]
    return default if value is None else value


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(cfg: RunConfig, out: RunDirectory) -> int:
    grid = build_grid(cfg)
    spec = build_model(cfg, grid)
    u0 = build_initial(cfg, grid)
    it = cfg.integrator
    controls = Controls(dt=it["dt"], integrator=it["scheme"],
                        snapshot_times=tuple(cfg.output["snapshot_times"]),
                        diag_every=cfg.output["diag_every"] or max(1, int(round(it["T"] / it["dt"]))))
    try:
        traj = evolve(u0, spec, it["T"], controls)
    except BlowUpError as exc:
        dio.write_snapshot(exc.last_state, out.path / "last_valid.bin")
        if exc.trajectory is not None:
            _write_diagnostics(out, exc.trajectory.diagnostics)
        out.manifest["results"]["error"] = str(exc)
        out.finish(False)
        return EXIT_BLOWUP
    for k, snap in enumerate(traj.snapshots):
        dio.write_snapshot(snap, out.path / f"snap_{k:04d}.bin")
    _write_diagnostics(out, traj.diagnostics)
    m = np.array([row["mass"] for row in traj.diagnostics])
    out.manifest["results"]["relative_mass_drift"] = float(np.max(np.abs(m / m[0] - 1.0))) if m[0] else 0.0
    out.manifest["results"]["snapshots"] = len(traj.snapshots)
    return out.finish(True)


def _write_diagnostics(out: RunDirectory, rows) -> None:
    header = ["t", "mass", "h1_norm", "edge_mass"]
    out.csv("diagnostics.csv", header, ([row[h] for h in header] for row in rows))


def cmd_verify_cov(cfg, out) -> int:
    from .studies import cov_equivalence

    alphas = _study(cfg, "alphas", ((1.0, 3.0, 0.0), (2.0, 1.0, 1.0)))
    c = _grid_value(cfg, "model", "c", (0.1, 0.1, -0.1, 0.1))
    tol = _study(cfg, "tolerance", 1e-6)
    n = _grid_value(cfg, "grid", "nx", 128)
    L = _grid_value(cfg, "grid", "Lx", 12 * np.pi)
    dt = _grid_value(cfg, "integrator", "dt", 5e-4)
    T = _grid_value(cfg, "integrator", "T", 0.5)
    rows, ok = [], True
    for alpha in alphas:
        err = cov_equivalence(alpha, c, n=n, L=L, dt=dt, T=T)
        rows.append((*alpha, err, err <= tol))
        ok &= err <= tol
    out.csv("cov.csv", ["alpha1", "alpha2", "alpha3", "max_l2_difference", "passed"], rows)
    return out.finish(ok)


def cmd_verify_scaling(cfg, out) -> int:
    from .studies import scaling_commutation

    lam = _study(cfg, "lam", 2.0)
    c = _grid_value(cfg, "model", "c", (0.0, -6.0, 1.0, 2j))
    tol = _study(cfg, "tolerance", 1e-6)
    n = _grid_value(cfg, "grid", "nx", 128)
    L = _grid_value(cfg, "grid", "Lx", 40.0)
    dt = _grid_value(cfg, "integrator", "dt", 4e-3)
    T = _grid_value(cfg, "integrator", "T", 0.4)
    try:
        err = scaling_commutation(lam, c, n=n, L=L, dt=dt, T=T)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out.csv("scaling.csv", ["lambda", "l2_difference", "passed"], [(lam, err, err <= tol)])
    return out.finish(err <= tol)


def cmd_estimate_strichartz(cfg, out) -> int:
    from .studies import strichartz_refinement, strichartz_scaling

    n_values = _study(cfg, "n_values", (128, 256))
    L = _study(cfg, "L", 12 * np.pi)
    T = _study(cfg, "T_window", 0.5)
    nt = _study(cfg, "nt", 65)
    lam = _study(cfg, "lam", 2.0)
    width = _study(cfg, "width", 1.0)
    ratios = strichartz_refinement(n_values, L, T, nt, width)
    base, scaled = strichartz_scaling(lam, n_values[0], L, T, nt, width)
    rows = [(n, L, T, nt, 1.0, r) for n, r in zip(n_values, ratios)]
    rows.append((n_values[0], L / lam, T / lam**3, nt, lam, scaled))
    out.csv("strichartz.csv", ["n", "L", "T_window", "nt", "lambda", "ratio"], rows)
    refinement = max(ratios) / min(ratios) - 1.0
    scaling = abs(scaled / base - 1.0)
    out.manifest["results"].update(refinement_variation=refinement, scaling_variation=scaling)
    return out.finish(refinement < 0.05 and scaling < 0.02)


def cmd_estimate_bilinear(cfg, out) -> int:
    from .estimates import bilinear_study

    N1 = _study(cfg, "N1", (8, 16, 32, 64, 128))
    N2 = _study(cfg, "N2", 2)
    draws = _study(cfg, "draws", 20)
    study = bilinear_study(N1, N2, draws, seed=cfg.seed if cfg else 0,
                           L=_study(cfg, "L", 4 * np.pi), tau0=_study(cfg, "tau0", 1.0),
                           nt=_study(cfg, "nt", 33), width=_study(cfg, "width", 1.0))
    rows = [(int(n1), N2, d, study.constants[i, d], study.product_norms[i, d])
            for i, n1 in enumerate(study.N1) for d in range(draws)]
    out.csv("bilinear.csv", ["N1", "N2", "draw", "constant", "product_norm"], rows)
    out.csv("bilinear_summary.csv", ["N1", "mean_constant", "spread"],
            [(int(n1), m, s) for n1, m, s in zip(study.N1, study.mean_constants, study.spread)])
    out.manifest["results"].update(slope=study.slope, raw_slope=study.raw_slope)
    return out.finish(abs(study.slope) <= 0.15 and bool(np.all(study.spread < 10)))


def cmd_scattering(cfg, out) -> int:
    from .studies import scattering_run

    times = _study(cfg, "times", (1.0, 2.0, 4.0, 8.0))
    kwargs = {}
    if cfg is not None:
        kwargs.update(n=cfg.grid["nx"], L=cfg.grid["Lx"], dt=cfg.integrator["dt"],
                      delta=cfg.init["amplitude"], sigma=cfg.init["sigma_x"], carrier=cfg.init["carrier"][0])
        if cfg.model["c"] is not None:
            kwargs["c"] = cfg.model["c"]
    run = scattering_run(times=tuple(times), **kwargs)
    p = run.profile
    ratios = np.r_[np.nan, p.ratios]
    rows = [(a, b, d, r, e) for a, b, d, r, e in
            zip(p.times[:-1], p.times[1:], p.differences, ratios, run.edge_masses[1:])]
    out.csv("scattering.csv", ["t_prev", "t", "difference", "ratio", "edge_mass"], rows)
    ok = (bool(np.all(np.diff(p.differences) < 0)) and bool(np.all(p.ratios <= 0.5))
          and float(run.edge_masses.max()) < 1e-6)
    return out.finish(ok)


def cmd_airy1d(cfg, out) -> int:
    from .studies import airy_refinement

    n_values = _study(cfg, "n_values", (4096, 8192))
    L = _study(cfg, "L", 580.0)
    t = _study(cfg, "t", 1.0)
    errors = airy_refinement(n_values, L, t)
    out.csv("airy.csv", ["n", "L", "t", "relative_l2_error"], [(n, L, t, e) for n, e in zip(n_values, errors)])
    ok = errors[0] <= 1e-4 and all(b <= 0.5 * a for a, b in zip(errors[:-1], errors[1:]))
    return out.finish(ok)


def kappa_rows(kappas) -> list:
    from .symbols import kappa_coefficients

    rows = []
    for k in kappas:
        kc = kappa_coefficients(Fraction(k))
        rows.append([float(v) for v in kc.as_row().values()])
    return rows


def cmd_coeffs(cfg, out, kappas) -> int:
    from .symbols import KappaCoefficients

    header = list(KappaCoefficients.__dataclass_fields__)
    rows = kappa_rows(kappas)
    sys.stdout.write(dio.csv_text(header, rows))
    if out is not None:
        out.csv("coeffs.csv", header, rows)
        return out.finish(True)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dysthe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        if name == "coeffs":
            p.add_argument("--kappa", nargs="+", help="kappa values, e.g. 0 1/4 2")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else None
        if args.command == "simulate" and cfg is None:
            raise ConfigError("simulate needs --config")
        if args.command == "coeffs":
            raw = args.kappa or _study(cfg, "kappas", ["0"])
            kappas = [Fraction(str(k)) for k in raw]
            out = RunDirectory(args.out, args.command, cfg) if args.out else None
            return cmd_coeffs(cfg, out, kappas)
        directory = args.out or (cfg.output["directory"] if cfg else args.command)
        out = RunDirectory(directory, args.command, cfg)
        handler = {
            "simulate": cmd_simulate,
            "verify-cov": cmd_verify_cov,
            "verify-scaling": cmd_verify_scaling,
            "estimate-strichartz": cmd_estimate_strichartz,
            "estimate-bilinear": cmd_estimate_bilinear,
            "scattering": cmd_scattering,
            "airy1d": cmd_airy1d,
        }[args.command]
        return handler(cfg, out)
    except (ConfigError, ValueError, dio.SnapshotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
