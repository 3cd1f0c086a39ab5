"""Run configuration: a TOML document with sections model, grid, integrator, init, output, study.

Every key is checked against the schema below; unknown keys and wrong types
raise ConfigError naming the offending key.  Complex numbers are written as
``[re, im]`` pairs, plain numbers, or strings such as ``"-2j"``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import symbols
from .models import KINDS
from .spectral import FieldState, SpectralGrid, field_from_function, make_grid, make_grid_1d


class ConfigError(ValueError):
    """Invalid run configuration."""


REQUIRED = object()


def _real(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    return float(v)


def _int(key, v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    return v


def _bool(key, v):
    if not isinstance(v, bool):
        raise ConfigError(f"{key} must be true or false, got {v!r}")
    return v


def _str(key, v):
    if not isinstance(v, str):
        raise ConfigError(f"{key} must be a string, got {v!r}")
    return v


def _complex(key, v):
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"{key}: cannot read {v!r} as a complex number") from None
    if isinstance(v, list) and len(v) == 2:
        return complex(_real(key, v[0]), _real(key, v[1]))
    return complex(_real(key, v))


def _list_of(conv, length=None):
    def check(key, v):
        if not isinstance(v, list):
            raise ConfigError(f"{key} must be a list, got {v!r}")
        if length is not None and len(v) != length:
            raise ConfigError(f"{key} must have {length} entries, got {len(v)}")
        return tuple(conv(f"{key}[{i}]", x) for i, x in enumerate(v))
    return check


SCHEMA: dict[str, dict[str, tuple]] = {
    "model": {
        "kind": (_str, "normalized"),
        "c": (_list_of(_complex, 4), None),
        "kappa": (_real, None),
        "h": (_real, None),
        "alpha": (_list_of(_real, 3), None),
        "omega0": (_real, 1.0),
        "k0": (_real, 1.0),
        "n4_coeff": (_complex, None),
        "comoving": (_bool, True),
        "dealiasing": (_str, "truncate"),
    },
    "grid": {
        "nx": (_int, REQUIRED),
        "ny": (_int, None),
        "Lx": (_real, REQUIRED),
        "Ly": (_real, None),
    },
    "integrator": {
        "scheme": (_str, "etdrk4"),
        "dt": (_real, 1e-3),
        "T": (_real, 1.0),
    },
    "init": {
        "type": (_str, "gaussian"),
        "amplitude": (_real, 1.0),
        "sigma_x": (_real, 1.0),
        "sigma_y": (_real, None),
        "carrier": (_list_of(_real, 2), (0.0, 0.0)),
        "center": (_list_of(_real, 2), (0.0, 0.0)),
        "l2_norm": (_real, None),
        "path": (_str, None),
    },
    "output": {
        "directory": (_str, "run"),
        "snapshot_times": (_list_of(_real), ()),
        "diag_every": (_int, 10),
    },
    "study": {
        "alphas": (_list_of(_list_of(_real, 3)), None),
        "lam": (_real, None),
        "T_window": (_real, None),
        "nt": (_int, None),
        "n_values": (_list_of(_int), None),
        "N1": (_list_of(_int), None),
        "N2": (_int, None),
        "draws": (_int, None),
        "tau0": (_real, None),
        "L": (_real, None),
        "width": (_real, None),
        "times": (_list_of(_real), None),
        "kappas": (_list_of(_real), None),
        "t": (_real, None),
        "tolerance": (_real, None),
    },
}

TOP_LEVEL = {"seed": (_int, 0)}


@dataclass(frozen=True)
class RunConfig:
    model: dict
    grid: dict
    integrator: dict
    init: dict
    output: dict
    study: dict = field(default_factory=dict)
    seed: int = 0

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def dims(self) -> int:
        return 1 if self.model["kind"] == "dysthe_1d" else 2


def _section(name: str, raw: Any) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"[{name}] must be a table")
    schema = SCHEMA[name]
    for key in raw:
        if key not in schema:
            raise ConfigError(f"unknown key {name}.{key!r}")
    out = {}
    for key, (conv, default) in schema.items():
        full = f"{name}.{key}"
        if key in raw:
            out[key] = conv(full, raw[key])
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {full}")
        else:
            out[key] = default
    return out


def _validate(cfg: RunConfig) -> None:
    m, g, it, ini = cfg.model, cfg.grid, cfg.integrator, cfg.init
    if m["kind"] not in KINDS:
        raise ConfigError(f"model.kind must be one of {KINDS}, got {m['kind']!r}")
    if m["kind"] == "gravity_capillary":
        try:
            symbols.kappa_coefficients(0.0 if m["kappa"] is None else m["kappa"])
        except ValueError as exc:
            raise ConfigError(f"model.kappa: {exc}") from None
    if m["h"] is not None and not m["h"] > 0:
        raise ConfigError(f"model.h must be positive, got {m['h']}")
    if m["kind"] == "finite_depth" and m["h"] is None:
        raise ConfigError("model.h is required for finite_depth")
    if m["alpha"] is not None and m["alpha"][0] == 0:
        raise ConfigError("model.alpha: alpha1 must be nonzero")
    if m["dealiasing"] not in ("truncate", "pad"):
        raise ConfigError(f"model.dealiasing must be 'truncate' or 'pad', got {m['dealiasing']!r}")
    if cfg.dims == 2 and g["ny"] is None:
        raise ConfigError("grid.ny is required for a two-dimensional model")
    for key in ("nx", "ny"):
        n = g[key]
        if n is not None and (n < 8 or n % 2):
            raise ConfigError(f"grid.{key} must be an even integer >= 8, got {n}")
    for key in ("Lx", "Ly"):
        if g[key] is not None and not (g[key] > 0 and math.isfinite(g[key])):
            raise ConfigError(f"grid.{key} must be positive, got {g[key]}")
    if it["scheme"] not in ("etdrk4", "strang"):
        raise ConfigError(f"integrator.scheme must be 'etdrk4' or 'strang', got {it['scheme']!r}")
    if not it["dt"] > 0:
        raise ConfigError(f"integrator.dt must be positive, got {it['dt']}")
    if not it["T"] > 0:
        raise ConfigError(f"integrator.T must be positive, got {it['T']}")
    if ini["type"] not in ("gaussian", "plane_wave", "file"):
        raise ConfigError(f"init.type must be gaussian, plane_wave or file, got {ini['type']!r}")
    if ini["type"] == "file" and not ini["path"]:
        raise ConfigError("init.path is required for init.type = 'file'")
    if cfg.output["diag_every"] < 0:
        raise ConfigError("output.diag_every must be >= 0")
    if cfg.seed < 0:
        raise ConfigError("seed must be a non-negative integer")


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}") from None
    for key in raw:
        if key not in SCHEMA and key not in TOP_LEVEL:
            raise ConfigError(f"unknown key {key!r}")
    if "grid" not in raw:
        raise ConfigError("missing required section [grid]")
    sections = {name: _section(name, raw.get(name, {})) for name in SCHEMA}
    seed = _int("seed", raw.get("seed", 0))
    cfg = RunConfig(seed=seed, **sections)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# building run objects


def build_grid(cfg: RunConfig) -> SpectralGrid:
    g = cfg.grid
    if cfg.dims == 1:
        return make_grid_1d(g["nx"], g["Lx"])
    return make_grid(g["nx"], g["ny"], g["Lx"], g["Lx"] if g["Ly"] is None else g["Ly"])


def model_params(cfg: RunConfig) -> dict:
    """Keyword arguments for models.assemble, dropping unset entries."""
    m = cfg.model
    out = {"omega0": m["omega0"], "k0": m["k0"], "comoving": m["comoving"],
           "dealiasing": m["dealiasing"]}
    for key in ("c", "kappa", "h", "alpha", "n4_coeff"):
        if m[key] is not None:
            out[key] = m[key]
    return out


def build_model(cfg: RunConfig, grid: SpectralGrid | None = None):
    from .models import ModelError, assemble

    grid = grid or build_grid(cfg)
    try:
        return assemble(cfg.model["kind"], grid, **model_params(cfg))
    except ModelError as exc:
        raise ConfigError(str(exc)) from None


def gaussian(grid: SpectralGrid, amplitude: float, sigma_x: float, sigma_y: float | None = None,
             carrier=(0.0, 0.0), center=(0.0, 0.0)) -> FieldState:
    sigma_y = sigma_x if sigma_y is None else sigma_y
    if not (sigma_x > 0 and sigma_y > 0):
        raise ConfigError("Gaussian widths must be positive")

    def f(x, y):
        X, Y = x - center[0], y - center[1]
        r2 = X**2 / sigma_x**2 + (Y**2 / sigma_y**2 if grid.dims == 2 else 0.0)
        return amplitude * np.exp(-0.5 * r2) * np.exp(1j * (carrier[0] * x + carrier[1] * y))

    return field_from_function(grid, f)


def build_initial(cfg: RunConfig, grid: SpectralGrid) -> FieldState:
    from .io import read_snapshot

    ini = cfg.init
    if ini["type"] == "gaussian":
        u = gaussian(grid, ini["amplitude"], ini["sigma_x"], ini["sigma_y"], ini["carrier"], ini["center"])
    elif ini["type"] == "plane_wave":
        kx, ky = ini["carrier"]
        u = field_from_function(grid, lambda x, y: ini["amplitude"] * np.exp(1j * (kx * x + ky * y)))
    else:
        u = read_snapshot(ini["path"])
        if u.grid.shape != grid.shape or u.grid.Lx != grid.Lx or u.grid.Ly != grid.Ly:
            raise ConfigError("init.path snapshot grid does not match [grid]")
        u = FieldState(grid, u.values, "physical", u.time)
    if ini["l2_norm"] is not None:
        m = math.sqrt(grid.cell * float(np.sum(np.abs(u.values) ** 2)))
        if m == 0:
            raise ConfigError("cannot normalize a zero initial field")
        u = u.with_values(u.values * (ini["l2_norm"] / m))
    return u
