"""The one-knot and two-knot timber beam studies, and their output files.

Every run writes one directory holding ``convergence.csv``, ``sobol.csv``,
``pdf_surrogate.csv``, ``pdf_fom.csv``, ``scatter.csv`` and
``manifest.json``. Floats are written with ``repr`` and the manifest has no
timestamps, so a rerun with the same configuration reproduces every byte.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import platform
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from .adaptive import adapt
from .exceptions import DegenerateError, InvalidConfigurationError
from .iga import (
    KN_PER_M,
    MPA,
    BeamGeometry,
    OneKnotMaterial,
    TractionProblem,
    TwoKnotMaterial,
    DisplacementField,
    get_solver,
    l2_relative_field_error,
    qoi_corner,
    solve_traction_problem,
)
from .montecarlo import mc_expectation
from .multiindex import smolyak_set
from .params import ParameterSpace, sample_uniform
from .postprocess import kde_pdf, ks_distance, moments, sobol_indices, to_legendre, write_pdf_csv
from .sparse_grid import Surrogate, build_sparse_grid, evaluate_on_grid, evaluate_points, save_surrogate

log = logging.getLogger(__name__)

__version__ = "0.1.0"

EXPERIMENTS = ("one-knot", "two-knot")

ONE_KNOT_RANGES = [[0.5, 1.5], [0.25, 0.75], [0.1, 0.2]]
TWO_KNOT_RANGES = [[0.5, 1.5], [0.3, 1.0], [0.3, 1.0], [0.03, 0.1], [0.03, 0.1], [1.0, 8.0], [-0.5, 0.5]]


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings of one study.

    Lengths are in m, ``E0`` in MPa and ``load`` in kN/m; they are
    converted to SI before reaching the solver. ``reference_level`` is used
    by the one-knot study, ``reference_budget`` by the two-knot study.
    ``mc_samples`` of ``None`` matches the Monte Carlo sample counts to the
    Smolyak costs.
    """

    experiment: str = "one-knot"
    length: float = 1.0
    height: float = 1.0
    load: tuple[float, float] = (1.0e3, 0.0)
    E0: float = 1.0e4
    gamma: float = 0.4
    gamma2: float = 0.4
    anchor: tuple[float, float] = (1.0, 0.5)
    ranges: tuple[tuple[float, float], ...] = tuple(map(tuple, ONE_KNOT_RANGES))
    degrees: tuple[int, int] = (4, 4)
    basis_counts: tuple[int, int] = (32, 32)
    levels: tuple[int, ...] = (1, 2, 3, 4, 5)
    reference_level: int = 7
    reference_budget: int = 30105
    adaptive_budgets: tuple[int, ...] | None = None
    validation_samples: int = 2000
    seed: int = 0
    mc_seeds: tuple[int, ...] = (1, 2, 3)
    mc_samples: tuple[int, ...] | None = None
    sobol_level: int | None = None
    kde_level: int = 3
    kde_samples: int = 10000
    kde_points: int = 200
    scatter_samples: int = 150
    out: str = "results"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidConfigurationError(f"unknown experiment {self.experiment!r}")
        if not self.levels or any(b <= a for a, b in zip(self.levels, self.levels[1:])) or min(self.levels) < 0:
            raise InvalidConfigurationError("levels must be nonempty, nonnegative and increasing")
        if len(self.ranges) != (3 if self.experiment == "one-knot" else 7):
            raise InvalidConfigurationError("wrong number of parameter ranges for the experiment")
        if self.experiment == "one-knot" and self.reference_level <= max(self.levels):
            raise InvalidConfigurationError("reference level must exceed every studied level")
        budgets = [self.reference_budget] + list(self.adaptive_budgets or [])
        if min(budgets) <= 0:
            raise InvalidConfigurationError("budgets must be positive")
        if self.validation_samples < 2 or self.kde_samples < 2 or self.kde_points < 2:
            raise InvalidConfigurationError("sample counts must be at least 2")
        if self.mc_samples is not None and (not self.mc_samples or min(self.mc_samples) < 2):
            raise InvalidConfigurationError("Monte Carlo sample counts must be at least 2")
        if self.sobol_level is not None and self.sobol_level not in self.levels:
            raise InvalidConfigurationError("sobol_level must be one of the studied levels")
        if self.experiment == "one-knot" and self.kde_level not in self.levels:
            raise InvalidConfigurationError("kde_level must be one of the studied levels")

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in dataclasses.asdict(self).items()}


_PAPER = {
    "one-knot": {},
    "two-knot": {"length": 10.0, "ranges": TWO_KNOT_RANGES, "levels": [1, 2, 3, 4, 5, 6], "validation_samples": 2000},
}
_DESK = {
    "one-knot": {"reference_level": 5, "levels": [1, 2, 3, 4], "validation_samples": 500},
    "two-knot": {"reference_budget": 3000, "levels": [1, 2, 3], "validation_samples": 1000},
}


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


def make_config(experiment: str, overrides: dict | None = None, desk: bool = False) -> ExperimentConfig:
    """Paper-scale defaults (or the desk-scale preset) with ``overrides`` applied.

    Unknown keys are rejected so that typos in a config file do not pass silently.
    """
    if experiment not in EXPERIMENTS:
        raise InvalidConfigurationError(f"unknown experiment {experiment!r}")
    values = dict(_PAPER[experiment])
    if desk:
        values.update(_DESK[experiment])
    overrides = dict(overrides or {})
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(overrides) - names
    if unknown:
        raise InvalidConfigurationError(f"unknown config keys: {sorted(unknown)}")
    if overrides.get("experiment", experiment) != experiment:
        raise InvalidConfigurationError("config file is for a different experiment")
    values.update(overrides)
    values["experiment"] = experiment
    return ExperimentConfig(**{k: _tupled(v) for k, v in values.items()})


def load_config(path, experiment: str, desk: bool = False) -> ExperimentConfig:
    with open(path) as fh:
        return make_config(experiment, json.load(fh), desk)


@dataclass(frozen=True)
class ConvergenceRecord:
    method: str
    cost: int
    error: float
    metric: str
    run: str = ""

    def __post_init__(self):
        if self.cost <= 0:
            raise InvalidConfigurationError("cost must be positive")
        if not self.error >= 0:
            raise InvalidConfigurationError("error must be nonnegative")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    manifest: dict
    out_dir: Path
    surrogates: dict = field(default_factory=dict)
    validation: tuple | None = None


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def max_norm_relative_error(surrogate_values, fom_values) -> float:
    """``max_i |(s_i - f_i) / f_i|``."""
    s = np.asarray(surrogate_values, dtype=float).ravel()
    f = np.asarray(fom_values, dtype=float).ravel()
    if s.shape != f.shape:
        raise InvalidConfigurationError("value lists must have equal length")
    if np.any(f == 0.0):
        raise DegenerateError("a reference value is zero; relative error undefined")
    return float(np.max(np.abs((s - f) / f)))


def fit_slope(costs, errors) -> float | None:
    """Least-squares slope of ``log(error)`` against ``log(cost)``; ``None`` with fewer than two usable points."""
    c = np.asarray(costs, dtype=float)
    e = np.asarray(errors, dtype=float)
    ok = (c > 0) & (e > 0)
    if np.unique(c[ok]).size < 2:
        return None
    return float(np.polyfit(np.log(c[ok]), np.log(e[ok]), 1)[0])


def _relative(value: float, reference: float) -> float:
    if reference == 0.0:
        raise DegenerateError("reference mean is zero; relative error undefined")
    return abs(value - reference) / abs(reference)


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

class CountingModel:
    """Callable wrapper that counts full-order solves (thread safe)."""

    def __init__(self, fn: Callable):
        self.fn = fn
        self.calls = 0
        self._lock = threading.Lock()

    def __call__(self, p):
        with self._lock:
            self.calls += 1
        return self.fn(p)


def _problem(config: ExperimentConfig) -> TractionProblem:
    geometry = BeamGeometry(config.length, config.height)
    return TractionProblem(geometry, (config.load[0] * KN_PER_M, config.load[1] * KN_PER_M))


def _material(config: ExperimentConfig):
    if config.experiment == "one-knot":
        return OneKnotMaterial(E0=config.E0 * MPA, gamma=config.gamma)
    return TwoKnotMaterial(E0=config.E0 * MPA, gamma1=config.gamma, gamma2=config.gamma2, anchor=config.anchor)


def one_knot_model(config: ExperimentConfig) -> Callable:
    """``p -> [u_x(L, 0), u_x control coefficients...]``."""
    problem, material = _problem(config), _material(config)

    def model(p):
        sol = solve_traction_problem(problem, material, p, config.degrees, config.basis_counts)
        return np.concatenate([[qoi_corner(sol, problem.geometry)], sol.ux.ravel()])

    return model


def two_knot_model(config: ExperimentConfig) -> Callable:
    """``p -> u_x(L, 0)``."""
    problem, material = _problem(config), _material(config)

    def model(p):
        sol = solve_traction_problem(problem, material, p, config.degrees, config.basis_counts)
        return qoi_corner(sol, problem.geometry)

    return model


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def write_convergence_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "run", "cost", "metric", "error"])
        for r in records:
            w.writerow([r.method, r.run, r.cost, r.metric, repr(float(r.error))])


def write_sobol_csv(path, indices) -> None:
    """One row per parameter; header only when the indices are undefined (``None``)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "principal", "total"])
        if indices is None:
            return
        for n, (sp, st) in enumerate(zip(indices.principal, indices.total)):
            w.writerow([f"p{n + 1}", repr(float(sp)), repr(float(st))])


def write_scatter_csv(path, fom, columns: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample", "fom"] + list(columns))
        for k, v in enumerate(fom):
            w.writerow([k, repr(float(v))] + [repr(float(c[k])) for c in columns.values()])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(manifest), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _versions() -> dict:
    return {"sgtimber": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _slopes(records) -> dict:
    groups: dict = {}
    for r in records:
        groups.setdefault((r.method, r.run, r.metric), []).append((r.cost, r.error))
    out: dict = {}
    for (method, run, metric), pts in sorted(groups.items()):
        key = method if not run else f"{method}:{run}"
        out.setdefault(key, {})[metric] = fit_slope(*zip(*pts))
    return out


def _pdf_outputs(out: Path, surrogate_samples, fom_samples, points: int) -> dict:
    lo = min(np.min(surrogate_samples), np.min(fom_samples))
    hi = max(np.max(surrogate_samples), np.max(fom_samples))
    pad = 0.1 * (hi - lo)
    support = "positive" if lo > 0 else "unbounded"
    xs = np.linspace(max(lo - pad, 0.5 * lo) if support == "positive" else lo - pad, hi + pad, points)
    for name, samples in (("pdf_surrogate.csv", surrogate_samples), ("pdf_fom.csv", fom_samples)):
        try:
            density = kde_pdf(samples, xs, support)
        except DegenerateError:
            log.warning("%s: samples are all identical; no density written", name)
            xs_used, density = [], []
        else:
            xs_used = xs
        write_pdf_csv(out / name, xs_used, density)
    return {"support": support, "ks_distance": ks_distance(surrogate_samples, fom_samples)}


def _sobol(surrogate: Surrogate):
    try:
        return sobol_indices(to_legendre(surrogate))
    except DegenerateError:
        log.warning("surrogate has zero variance; Sobol indices undefined")
        return None


def _sobol_json(indices) -> dict | None:
    return None if indices is None else {"principal": indices.principal, "total": indices.total}


def _moments_json(m) -> dict:
    return {"mean": m.mean, "variance": m.variance, "skewness": m.skewness, "kurtosis": m.kurtosis}


def _mc_records(model, space, costs, seeds, map_fn, metrics: Callable) -> list:
    records = []
    for seed in seeds:
        for est in mc_expectation(model, space, max(costs), seed, map_fn, checkpoints=costs):
            for metric, err in metrics(est.mean):
                records.append(ConvergenceRecord("mc", est.sample_count, err, metric, str(seed)))
    return records


# ---------------------------------------------------------------------------
# Studies
# ---------------------------------------------------------------------------

def run_one_knot(config: ExperimentConfig, map_fn: Callable = map, out_dir=None) -> ExperimentResult:
    """Smolyak convergence, Monte Carlo baseline, Sobol indices and pdfs for the one-knot beam."""
    out = Path(out_dir or config.out)
    out.mkdir(parents=True, exist_ok=True)
    space = ParameterSpace(config.ranges)
    model = CountingModel(one_knot_model(config))
    n, m = config.basis_counts
    problem = _problem(config)
    solver = get_solver(problem, config.degrees, config.basis_counts)

    def field_of(vec):
        ux = np.asarray(vec[1:], dtype=float).reshape(n, m)
        return DisplacementField(ux, np.zeros_like(ux), solver.kv_x, solver.kv_y)

    cache: dict = {}
    log.info("reference grid w=%d", config.reference_level)
    ref = evaluate_on_grid(model, build_sparse_grid(space, smolyak_set(3, config.reference_level)),
                           map_fn=map_fn, cache=cache)
    ref_mean = ref.quadrature()
    ref_field = field_of(ref_mean)

    def metrics(mean):
        return [("L2-field", l2_relative_field_error(field_of(mean), ref_field)),
                ("abs-mean", abs(float(mean[0]) - float(ref_mean[0]))),
                ("rel-mean", _relative(float(mean[0]), float(ref_mean[0])))]

    log.info("validation samples M=%d", config.validation_samples)
    val_pts = sample_uniform(space, config.validation_samples, config.seed)
    fom = np.array([v[0] for v in evaluate_points(model, val_pts, map_fn)])

    records, corner, cards = [], {}, {}
    for w in config.levels:
        s = evaluate_on_grid(model, build_sparse_grid(space, smolyak_set(3, w)), map_fn=map_fn, cache=cache)
        cards[w] = s.size
        corner[w] = s.with_values(s.values[:, :1], scalar=True)
        for metric, err in metrics(s.quadrature()):
            records.append(ConvergenceRecord("smolyak", s.size, err, metric))
        records.append(ConvergenceRecord("smolyak", s.size,
                                         max_norm_relative_error(corner[w](val_pts), fom), "max-norm"))

    costs = config.mc_samples or tuple(cards[w] for w in config.levels if cards[w] >= 2)
    if costs and config.mc_seeds:
        log.info("Monte Carlo at %s samples, seeds %s", list(costs), list(config.mc_seeds))
        records += _mc_records(model, space, costs, config.mc_seeds, map_fn, metrics)

    sobol_w = config.sobol_level if config.sobol_level is not None else max(config.levels)
    sobol = _sobol(corner[sobol_w])
    kde_pts = sample_uniform(space, config.kde_samples, config.seed + 1)
    pdf = _pdf_outputs(out, corner[config.kde_level](kde_pts), fom, config.kde_points)
    k = min(config.scatter_samples, fom.size)
    ref_corner = ref.with_values(ref.values[:, :1], scalar=True)
    write_scatter_csv(out / "scatter.csv", fom[:k],
                      {f"smolyak_w{w}": corner[w](val_pts[:k]) for w in config.levels})
    write_convergence_csv(out / "convergence.csv", records)
    write_sobol_csv(out / "sobol.csv", sobol)
    save_surrogate(ref_corner, out / "surrogate_reference.json")

    manifest = {
        "config": config.to_json(),
        "versions": _versions(),
        "fom_solves": model.calls,
        "reference": {"level": config.reference_level, "cost": ref.size, "mean_corner": float(ref_mean[0]),
                      "moments_corner": _moments_json(moments(ref_corner))},
        "cardinalities": cards,
        "slopes": _slopes(records),
        "sobol": {"level": sobol_w, **(_sobol_json(sobol) or {"principal": None, "total": None})},
        "pdf": {"level": config.kde_level, "surrogate_samples": config.kde_samples,
                "fom_samples": int(fom.size), **pdf},
    }
    write_manifest(out / "manifest.json", manifest)
    return ExperimentResult(config, records, manifest, out, {"reference": ref_corner, **corner}, (val_pts, fom))


def _negative_alpha_count(config: ExperimentConfig, points) -> int:
    material, geometry = _material(config), BeamGeometry(config.length, config.height)
    return int(sum(material.min_alpha(geometry, p, samples=101) <= 0.0 for p in points))


def run_two_knot(config: ExperimentConfig, map_fn: Callable = map, out_dir=None) -> ExperimentResult:
    """Smolyak against adaptive sparse grids for the seven-parameter two-knot beam."""
    out = Path(out_dir or config.out)
    out.mkdir(parents=True, exist_ok=True)
    N = len(config.ranges)
    space = ParameterSpace(config.ranges)
    model = CountingModel(two_knot_model(config))
    cache: dict = {}

    log.info("adaptive reference, budget %d", config.reference_budget)
    ref, ref_state = adapt(model, space, budget=config.reference_budget, map_fn=map_fn, cache=cache)
    ref_mean = float(ref.quadrature())

    def metrics(mean):
        return [("abs-mean", abs(float(mean) - ref_mean)), ("rel-mean", _relative(float(mean), ref_mean))]

    log.info("validation samples M=%d", config.validation_samples)
    val_pts = sample_uniform(space, config.validation_samples, config.seed)
    fom = np.asarray(evaluate_points(model, val_pts, map_fn), dtype=float)

    records, smol, adaptive = [], {}, {}
    for w in config.levels:
        s = evaluate_on_grid(model, build_sparse_grid(space, smolyak_set(N, w)), map_fn=map_fn, cache=cache)
        smol[w] = s
        for metric, err in metrics(s.quadrature()):
            records.append(ConvergenceRecord("smolyak", s.size, err, metric))
        records.append(ConvergenceRecord("smolyak", s.size, max_norm_relative_error(s(val_pts), fom), "max-norm"))
    cards = {w: s.size for w, s in smol.items()}

    budgets = config.adaptive_budgets or tuple(cards[w] for w in config.levels)
    for b in budgets:
        s, st = adapt(model, space, budget=b, map_fn=map_fn, cache=cache)
        adaptive[b] = (s, st)
        cost = max(st.evaluations_used, 1)
        for metric, err in metrics(s.quadrature()):
            records.append(ConvergenceRecord("adaptive", cost, err, metric))
        records.append(ConvergenceRecord("adaptive", cost, max_norm_relative_error(s(val_pts), fom), "max-norm"))

    costs = config.mc_samples or tuple(c for c in cards.values() if c >= 2)
    if costs and config.mc_seeds:
        log.info("Monte Carlo at %s samples, seeds %s", list(costs), list(config.mc_seeds))
        records += _mc_records(model, space, costs, config.mc_seeds, map_fn, metrics)

    sobol = _sobol(ref)
    kde_pts = sample_uniform(space, config.kde_samples, config.seed + 1)
    pdf = _pdf_outputs(out, ref(kde_pts), fom, config.kde_points)
    k = min(config.scatter_samples, fom.size)
    cols = {"adaptive_reference": ref(val_pts[:k])}
    cols.update({f"smolyak_w{w}": smol[w](val_pts[:k]) for w in config.levels})
    write_scatter_csv(out / "scatter.csv", fom[:k], cols)
    write_convergence_csv(out / "convergence.csv", records)
    write_sobol_csv(out / "sobol.csv", sobol)
    ref_state.write_history_csv(out / "adaptive_history.csv")
    save_surrogate(ref, out / "surrogate_reference.json")

    largest = max(budgets)
    matched = None
    if largest in cards.values():
        w = [w for w in config.levels if cards[w] == largest][0]
        sm = _relative(float(smol[w].quadrature()), ref_mean)
        ad = _relative(float(adaptive[largest][0].quadrature()), ref_mean)
        matched = {"cost": largest, "smolyak_level": w, "smolyak_error": sm, "adaptive_error": ad,
                   "ratio": ad / sm if sm > 0 else None}

    manifest = {
        "config": config.to_json(),
        "versions": _versions(),
        "fom_solves": model.calls,
        "reference": {"budget": config.reference_budget, "cost": ref_state.evaluations_used,
                      "accepted": len(ref_state.accepted), "stop_reason": ref_state.stop_reason,
                      "mean": ref_mean, "moments": _moments_json(moments(ref))},
        "cardinalities": cards,
        "adaptive_costs": {str(b): adaptive[b][1].evaluations_used for b in budgets},
        "matched_cost": matched,
        "slopes": _slopes(records),
        "sobol": _sobol_json(sobol),
        "pdf": {"surrogate_samples": config.kde_samples, "fom_samples": int(fom.size), **pdf},
        "negative_alpha_points": {"reference_grid": _negative_alpha_count(config, ref.reduced.points),
                                  "validation": _negative_alpha_count(config, val_pts)},
    }
    write_manifest(out / "manifest.json", manifest)
    return ExperimentResult(config, records, manifest, out, {"reference": ref, **smol}, (val_pts, fom))


def run_experiment(config: ExperimentConfig, map_fn: Callable = map, out_dir=None) -> ExperimentResult:
    runner = run_one_knot if config.experiment == "one-knot" else run_two_knot
    return runner(config, map_fn, out_dir)
