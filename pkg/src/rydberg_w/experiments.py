"""Declarative numerical experiments: configs, parameter sweeps, CSV output.

A config names an experiment, overrides some :class:`SystemParams` fields,
and optionally lists grid axes. Sweep points are independent steady-state
solves; they may run in a process pool, and results are always emitted in
grid order so that output bytes never depend on scheduling.
"""

from __future__ import annotations

import dataclasses
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .effective import build_effective_model
from .exceptions import ConfigError, RydbergWError
from .model import SystemParams, build_full_model
from .observables import basis_state, fidelity, purity, w_state
from .solvers import evolve, steady_state

__all__ = [
    "SCHEMA_VERSION",
    "EXPERIMENTS",
    "GridAxis",
    "ExperimentConfig",
    "SweepResult",
    "default_config",
    "load_config",
    "resolve_params",
    "run_experiment",
    "run_fig3a",
    "run_fig3b",
    "run_fig3c",
    "run_urp_sweep",
    "run_expt_table",
    "run_custom",
    "write_csv",
    "EXPT_SETS",
]

SCHEMA_VERSION = 1
EXPERIMENTS = ("fig3a", "fig3b", "fig3c", "urp-sweep", "expt-table", "custom")
PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(SystemParams))
SOLVERS = ("nullspace", "longtime")


@dataclass(frozen=True)
class GridAxis:
    """One sweep axis.

    ``relative_to`` expresses values as multiples of another parameter (for
    example ``u_rp`` in units of ``delta``); ``include`` adds exact points
    to the regular grid.
    """

    name: str
    start: float
    stop: float
    points: int
    scale: str = "linear"
    relative_to: str | None = None
    include: tuple = ()

    def __post_init__(self):
        if self.name not in PARAM_FIELDS or self.name in ("n_c", "g"):
            raise ConfigError(f"grid axis {self.name!r} is not a sweepable parameter")
        if self.relative_to is not None and self.relative_to not in PARAM_FIELDS:
            raise ConfigError(f"relative_to {self.relative_to!r} is not a parameter")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError(f"axis {self.name!r} needs at least 2 points")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ConfigError("log axes need positive bounds")
        object.__setattr__(self, "include", tuple(float(x) for x in self.include))

    def values(self) -> np.ndarray:
        if self.scale == "log":
            v = np.geomspace(self.start, self.stop, int(self.points))
        else:
            v = np.linspace(self.start, self.stop, int(self.points))
        return np.unique(np.concatenate([v, self.include])) if self.include else v

    @property
    def column(self) -> str:
        return f"{self.name}_over_{self.relative_to or 'g'}"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run.

    Attributes
    ----------
    experiment : str
        One of :data:`EXPERIMENTS`.
    params : dict
        :class:`SystemParams` overrides, in units of ``g`` unless
        ``units == "MHz"`` (then ``g`` itself must be given in MHz).
    grid : tuple of GridAxis
    options : dict
        Experiment-specific settings (horizons, tied rates).
    """

    experiment: str
    params: dict = field(default_factory=dict)
    grid: tuple = ()
    output: str | None = None
    solver: str = "nullspace"
    tol: float = 1e-8
    units: str = "g"
    options: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        unknown = set(self.params) - set(PARAM_FIELDS)
        if unknown:
            raise ConfigError(f"unknown parameters: {sorted(unknown)}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}")
        if self.units not in ("g", "MHz"):
            raise ConfigError("units must be 'g' or 'MHz'")
        if not (isinstance(self.tol, (int, float)) and 1e-12 <= self.tol <= 1e-4):
            raise ConfigError("tol must lie in [1e-12, 1e-4]")
        grid = tuple(a if isinstance(a, GridAxis) else GridAxis(**a) for a in self.grid)
        object.__setattr__(self, "grid", grid)
        try:
            resolve_params(self)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid parameters: {exc}") from exc

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["grid"] = [dict(dataclasses.asdict(a), include=list(a.include)) for a in self.grid]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in d:
            raise ConfigError("config needs an 'experiment' key")
        try:
            grid = tuple(GridAxis(**a) for a in d.get("grid", ()))
        except TypeError as exc:
            raise ConfigError(f"bad grid axis: {exc}") from exc
        return cls(**{**d, "grid": grid})

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            return ExperimentConfig.from_json(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def resolve_params(config: ExperimentConfig) -> SystemParams:
    """Base parameters of a config, converted to units of ``g``."""
    p = dict(config.params)
    if config.units == "MHz":
        g = p.pop("g", None)
        if g is None:
            raise ConfigError("MHz configs must give g")
        n_c = p.pop("n_c", 2)
        return SystemParams.from_mhz(g, n_c=n_c, **p)
    return SystemParams(**p)


_FIG3C = dict(omega=0.05, omega_r=1.0, delta=45.0, gamma=0.002, gamma_e=0.1, kappa=0.0)


def default_config(experiment: str) -> ExperimentConfig:
    """Built-in configs; grids are our choice where only extents are known."""
    if experiment == "fig3a":
        return ExperimentConfig(
            experiment, params=dict(omega_r=1.0, gamma=0.002, gamma_e=0.1, kappa=0.0),
            grid=(GridAxis("delta", 20.0, 60.0, 21), GridAxis("omega", 0.005, 0.1, 21, "log")),
        )
    if experiment == "fig3b":
        return ExperimentConfig(
            experiment, params=dict(omega=0.01, omega_r=1.0, delta=35.0),
            grid=(GridAxis("kappa", 0.0, 0.15, 15), GridAxis("gamma_e", 0.02, 0.15, 15)),
            options={"gamma_over_gamma_e": 1 / 50},
        )
    if experiment == "fig3c":
        return ExperimentConfig(experiment, params=dict(_FIG3C),
                                options={"t_full": 5e3, "t_eff": 5e4, "record_step": 250.0})
    if experiment == "urp-sweep":
        return ExperimentConfig(
            experiment, params=dict(_FIG3C, delta=42.0),
            grid=(GridAxis("u_rp", 0.25, 2.5, 25, relative_to="delta", include=(1.5,)),),
        )
    if experiment == "expt-table":
        return ExperimentConfig(experiment)
    if experiment == "custom":
        return ExperimentConfig(experiment, params=dict(_FIG3C))
    raise ConfigError(f"unknown experiment {experiment!r}")


@dataclass(frozen=True)
class SweepResult:
    """Rows of one experiment; ``wall_time`` is kept in memory only."""

    columns: tuple
    rows: list
    meta: dict
    wall_time: list = field(default_factory=list)

    def column(self, name) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)


# ---------------------------------------------------------------- sweep engine


def _solve_point(task):
    params, solver, tol = task
    t0 = time.perf_counter()
    try:
        p = SystemParams(**params)
        model = build_full_model(p)
        kw = {"tol": min(tol, 1e-10)} if solver == "longtime" else {}
        res = steady_state(model, solver, **kw)
        out = (fidelity(res.rho_ss, w_state(model)), purity(res.rho_ss), res.residual, "")
    except (RydbergWError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        out = (math.nan, math.nan, math.nan, type(exc).__name__)
    return out + (time.perf_counter() - t0,)


def _map(tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [_solve_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_point, tasks, chunksize=1))


def _grid_points(config, base: SystemParams):
    axes = config.grid
    for combo in itertools.product(*(a.values() for a in axes)):
        p = base.to_dict()
        for axis, v in zip(axes, combo):
            p[axis.name] = float(v) * (p[axis.relative_to] if axis.relative_to else 1.0)
        ratio = config.options.get("gamma_over_gamma_e")
        if ratio is not None:
            p["gamma"] = ratio * p["gamma_e"]
        yield combo, p


def _meta(config, base, extra=None):
    from . import __version__

    meta = {
        "experiment": config.experiment,
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "solver": config.solver,
        "tol": config.tol,
        "params": base.to_dict(),
        "grid": [dict(dataclasses.asdict(a), include=list(a.include)) for a in config.grid],
        "options": config.options,
        "fidelity": "sqrt(<W|rho|W>)",
        "units": "frequencies and rates in units of g",
    }
    meta.update(extra or {})
    return meta


def _sweep(config, workers, base=None):
    base = resolve_params(config) if base is None else base
    points = list(_grid_points(config, base))
    results = _map([(p, config.solver, config.tol) for _, p in points], workers)
    columns = tuple(a.column for a in config.grid) + ("fidelity", "purity", "residual", "error")
    rows = [tuple(float(v) for v in combo) + r[:4] for (combo, _), r in zip(points, results)]
    return SweepResult(columns, rows, _meta(config, base), [r[4] for r in results])


def run_fig3a(config: ExperimentConfig | None = None, workers: int = 1) -> SweepResult:
    """Steady-state fidelity over ``(delta, omega)`` for a perfect cavity."""
    return _sweep(config or default_config("fig3a"), workers)


def run_fig3b(config: ExperimentConfig | None = None, workers: int = 1) -> SweepResult:
    """Steady-state fidelity over ``(kappa, gamma_e)`` with ``gamma`` tied to ``gamma_e``."""
    return _sweep(config or default_config("fig3b"), workers)


def run_urp_sweep(config: ExperimentConfig | None = None, workers: int = 1) -> SweepResult:
    """Steady-state fidelity and purity against the cross interaction ``u_rp``."""
    return _sweep(config or default_config("urp-sweep"), workers)


def run_custom(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Any grid over parameter fields; a config without axes solves one point."""
    if config.grid:
        return _sweep(config, workers)
    base = resolve_params(config)
    r = _solve_point((base.to_dict(), config.solver, config.tol))
    if r[3]:
        raise RydbergWError(f"steady-state solve failed: {r[3]}")
    return SweepResult(("fidelity", "purity", "residual", "error"), [r[:4]],
                       _meta(config, base), [r[4]])


# Parameter sets in MHz (a common factor 2*pi cancels); other entries in units of g.
EXPT_SETS = (
    ("set1", dict(g=10.6, kappa=1.3, gamma_e=3.0, gamma=0.03),
     dict(omega_r=2.0, omega=0.002, delta=100.0)),
    ("set2", dict(g=185.0, kappa=53.0, gamma_e=3.0, gamma=0.144, omega_r=100.0),
     dict(omega=0.002, delta=24.0)),
    ("set3", dict(g=14.4, kappa=0.66, gamma_e=3.0, gamma=0.03),
     dict(omega_r=1.6, omega=0.006, delta=80.0)),
)


def _expt_params(mhz: dict, in_g: dict, n_c: int) -> SystemParams:
    mhz = dict(mhz)
    g = mhz.pop("g")
    return SystemParams.from_mhz(g, n_c=n_c, **mhz).replace(**in_g)


def run_expt_table(config: ExperimentConfig | None = None, workers: int = 1) -> SweepResult:
    """The three experimental parameter sets, one steady-state solve each."""
    config = config or default_config("expt-table")
    n_c = config.params.get("n_c", 2)
    params = [_expt_params(m, g, n_c) for _, m, g in EXPT_SETS]
    results = _map([(p.to_dict(), config.solver, config.tol) for p in params], workers)
    columns = ("set", "g_mhz", "kappa_over_g", "gamma_e_over_g", "gamma_over_g",
               "omega_r_over_g", "omega_over_g", "delta_over_g",
               "fidelity", "purity", "residual", "error")
    rows = []
    for (name, mhz, _), p, r in zip(EXPT_SETS, params, results):
        rows.append((name, mhz["g"], p.kappa, p.gamma_e, p.gamma, p.omega_r, p.omega, p.delta)
                    + r[:4])
    meta = _meta(config, SystemParams(n_c=n_c),
                 {"sets_mhz": {n: m for n, m, _ in EXPT_SETS},
                  "sets_in_g": {n: g for n, _, g in EXPT_SETS}})
    del meta["params"]
    return SweepResult(columns, rows, meta, [r[4] for r in results])


def run_fig3c(config: ExperimentConfig | None = None, workers: int = 1):
    """Fidelity against time from ``|000>|0>`` for the full and effective models.

    Returns
    -------
    (TrajectoryResult, TrajectoryResult, SweepResult)
        Full model, effective model, and the merged table with columns
        ``t_g, fidelity_full, fidelity_eff``.
    """
    config = config or default_config("fig3c")
    opts = {**default_config("fig3c").options, **config.options}
    base = resolve_params(config)
    step = float(opts["record_step"])
    n_full = int(round(opts["t_full"] / step)) + 1
    n_eff = int(round(opts["t_eff"] / step)) + 1

    eff = build_effective_model(base)
    w_eff = w_state(eff)
    traj_eff = evolve(eff, basis_state(eff, "000"), (n_eff - 1) * step, n_eff, config.tol,
                      observables={"fidelity": lambda r: fidelity(r, w_eff)})
    full = build_full_model(base)
    w_full = w_state(full)
    if n_full > 1:
        traj_full = evolve(full, basis_state(full, "000"), (n_full - 1) * step, n_full, config.tol,
                           observables={"fidelity": lambda r: fidelity(r, w_full)})
    else:
        traj_full = None

    rows = []
    f_full = traj_full.observables["fidelity"] if traj_full else []
    for k in range(max(n_eff, n_full)):
        t = k * step
        a = f_full[k] if k < len(f_full) else None
        b = traj_eff.observables["fidelity"][k] if k < n_eff else None
        rows.append((t, a, b))
    table = SweepResult(("t_g", "fidelity_full", "fidelity_eff"), rows,
                        _meta(config, base, {"options": opts}))
    return traj_full, traj_eff, table


def run_experiment(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    runners = {
        "fig3a": run_fig3a,
        "fig3b": run_fig3b,
        "urp-sweep": run_urp_sweep,
        "expt-table": run_expt_table,
        "custom": run_custom,
    }
    if config.experiment == "fig3c":
        return run_fig3c(config, workers)[2]
    return runners[config.experiment](config, workers)


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    return "nan" if math.isnan(v) else repr(v)


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    for line in json.dumps(result.meta, indent=1, sort_keys=True).splitlines():
        buf.write(f"# {line}\n")
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(result: SweepResult, path) -> None:
    """Write a '#'-prefixed JSON header block followed by comma-separated rows."""
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(result))
