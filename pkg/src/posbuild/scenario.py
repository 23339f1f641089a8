"""JSON scenario files: parsing, running and writing CSV/JSON artifacts.

A scenario is one self-describing JSON object. Modes:

``best_response``
    Trader ``perspective`` (default ``"A"``) responds to ``adversary``.
``equilibrium``
    Relaxed alternating best responses from the risk-neutral pair.
``closed_form``
    The closed-form equilibrium pair, projected onto ``n_terms`` modes.
``sweep``
    Cartesian product of the lists in ``grid`` (keys ``kappa``, ``lambda``,
    ``gamma``, ``n_terms``) applied to the remaining keys, run with
    ``cell_mode`` (default ``equilibrium``).

Relative paths inside a scenario resolve against the scenario file's
directory. All floats are written with 12 significant digits so that
identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import closed_forms
from .analysis import compare_to_closed_form, state_space_series
from .constraints import KINDS, ConstraintSpec, make_grid
from .cost import assemble_cost, strategy_costs
from .equilibrium import DEFAULT_TOLERANCE, EquilibriumParams, RunStatus, best_response_step, run
from .exceptions import PosbuildError, SolverError
from .qp import QpSettings
from .strategy import StrategyCoeffs, fit_from_function, l2_distance_quad, reconstruct

logger = logging.getLogger(__name__)

MODES = ("best_response", "equilibrium", "closed_form", "sweep")
SWEEP_KEYS = ("kappa", "lambda", "gamma", "n_terms")
EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
FLOAT_FMT = ".12g"

_TOP_KEYS = {
    "mode", "kappa", "lambda", "sigma", "n_terms", "gamma", "tolerance", "max_iterations", "perspective",
    "adversary", "initial_b", "constraints_a", "constraints_b", "output", "grid_points_out", "kkt_tolerance",
    "grid", "cell_mode", "description",
}
_CURVE_KINDS = ("risk_neutral", "risk_averse", "eager", "equilibrium_a", "equilibrium_b", "coefficients", "file")
_GRID_KEYS = {"grid_points", "t_start", "t_end"}
_CONSTRAINT_PARAMS = {
    "path_upper": {"bound"},
    "path_lower": {"bound"},
    "channel": {"lower", "upper"},
    "overbuy": {"rho"},
    "end_strategy": {"t_star", "c"},
    "short_sell": {"floor"},
    "no_sell": set(),
}


class ConfigError(PosbuildError, ValueError):
    """Invalid scenario; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# ---------------------------------------------------------------------------
# parsing


def _number(raw: dict, key: str, default=None, *, integer=False, path=None):
    name = path or key
    if key not in raw:
        if default is None:
            raise ConfigError(name, "required")
        return default
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(name, f"expected a number, got {v!r}")
    if integer and not float(v).is_integer():
        raise ConfigError(name, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(name, "must be finite")
    return int(v) if integer else float(v)


def _curve_from_spec(spec, key: str, base_dir: Path, kappa: float, lam: float, n_terms: int):
    """A unit-strategy callable from a number-free curve description."""
    if isinstance(spec, str):
        spec = {"kind": spec}
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(key, "expected an object with a 'kind'")
    kind = spec["kind"]
    if kind not in _CURVE_KINDS:
        raise ConfigError(f"{key}.kind", f"unknown curve kind {kind!r}; expected one of {list(_CURVE_KINDS)}")
    try:
        if kind in ("risk_averse", "eager"):
            return closed_forms.passive(kind, _number(spec, "sigma", path=f"{key}.sigma"))
        if kind == "risk_neutral":
            return closed_forms.risk_neutral()
        if kind in ("equilibrium_a", "equilibrium_b"):
            pair = closed_forms.equilibrium_pair(kappa, lam)
            return pair[0] if kind == "equilibrium_a" else pair[1]
        if kind == "coefficients":
            coeffs = spec.get("coefficients")
        else:
            if "path" not in spec:
                raise ConfigError(f"{key}.path", "required")
            path = base_dir / spec["path"]
            try:
                doc = json.loads(path.read_text())
            except (OSError, ValueError) as exc:
                raise ConfigError(f"{key}.path", f"cannot read coefficients from {path}: {exc}") from None
            coeffs = doc.get(spec.get("key", "coefficients")) if isinstance(doc, dict) else doc
        if not isinstance(coeffs, list) or not all(isinstance(c, (int, float)) for c in coeffs):
            raise ConfigError(f"{key}.coefficients", "expected a list of numbers")
        coeffs = [float(c) for c in coeffs] + [0.0] * max(0, n_terms - len(coeffs))
        if len(coeffs) != n_terms:
            raise ConfigError(f"{key}.coefficients", f"has {len(coeffs)} entries, more than n_terms={n_terms}")
        return StrategyCoeffs(np.array(coeffs))
    except PosbuildError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(key, str(exc)) from None


def _bound(value, key, base_dir, kappa, lam, n_terms):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    return _curve_from_spec(value, key, base_dir, kappa, lam, n_terms)


def _constraints(raw, key: str, base_dir: Path, kappa: float, lam: float, n_terms: int) -> tuple[ConstraintSpec, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ConfigError(key, "expected a list of constraint objects")
    specs = []
    aliases = {a: k for k, al in KINDS.items() for a in (k, *al)}
    for i, entry in enumerate(raw):
        here = f"{key}[{i}]"
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(here, "expected an object with a 'kind'")
        kind = aliases.get(entry["kind"])
        if kind is None:
            raise ConfigError(f"{here}.kind", f"unknown constraint kind {entry['kind']!r}; expected one of {sorted(KINDS)}")
        allowed = _CONSTRAINT_PARAMS[kind] | _GRID_KEYS | {"kind"}
        extra = sorted(set(entry) - allowed)
        if extra:
            raise ConfigError(f"{here}.{extra[0]}", f"unknown key for {kind}")
        params = {}
        for p in _CONSTRAINT_PARAMS[kind] & set(entry):
            if p in ("bound", "lower", "upper"):
                params[p] = _bound(entry[p], f"{here}.{p}", base_dir, kappa, lam, n_terms)
            else:
                params[p] = _number(entry, p, path=f"{here}.{p}")
        try:
            grid = None
            if _GRID_KEYS & set(entry):
                k = _number(entry, "grid_points", 200, integer=True, path=f"{here}.grid_points")
                default_start = params.get("t_star", 0.0) if kind == "end_strategy" else 0.0
                grid = make_grid(
                    k,
                    _number(entry, "t_start", default_start, path=f"{here}.t_start"),
                    _number(entry, "t_end", 1.0, path=f"{here}.t_end"),
                )
            specs.append(ConstraintSpec(kind, params, grid))
        except PosbuildError as exc:
            raise ConfigError(here, str(exc)) from None
    return tuple(specs)


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario. ``raw`` keeps the parsed JSON for sweeps."""

    mode: str
    kappa: float
    lam: float
    n_terms: int
    gamma: float = 0.8
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = 100
    sigma: float | None = None
    perspective: str = "A"
    adversary: Any = None
    adversary_spec: dict = field(default_factory=dict)
    initial_b: StrategyCoeffs | None = None
    constraints_a: tuple[ConstraintSpec, ...] = ()
    constraints_b: tuple[ConstraintSpec, ...] = ()
    output: Path = Path("out")
    grid_points_out: int = 201
    kkt_tolerance: float = 1e-8
    raw: dict = field(default_factory=dict, repr=False, compare=False)
    base_dir: Path = Path(".")

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path = Path("."), *, mode: str | None = None) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "scenario must be a JSON object")
        unknown = sorted(set(raw) - _TOP_KEYS)
        if unknown:
            raise ConfigError(unknown[0], "unknown key")
        mode = mode or raw.get("mode")
        if mode not in MODES:
            raise ConfigError("mode", f"expected one of {list(MODES)}, got {mode!r}")
        kappa = _number(raw, "kappa")
        lam = _number(raw, "lambda")
        n_terms = _number(raw, "n_terms", 20, integer=True)
        if kappa < 0:
            raise ConfigError("kappa", "must be >= 0")
        if lam <= 0:
            raise ConfigError("lambda", "must be > 0")
        if n_terms < 1:
            raise ConfigError("n_terms", "must be >= 1")
        gamma = _number(raw, "gamma", 0.8)
        if not 0 < gamma <= 1:
            raise ConfigError("gamma", "must lie in (0, 1]")
        tolerance = _number(raw, "tolerance", DEFAULT_TOLERANCE)
        if tolerance <= 0:
            raise ConfigError("tolerance", "must be > 0")
        max_iterations = _number(raw, "max_iterations", 100, integer=True)
        if max_iterations < 1:
            raise ConfigError("max_iterations", "must be >= 1")
        grid_out = _number(raw, "grid_points_out", 201, integer=True)
        if grid_out < 2:
            raise ConfigError("grid_points_out", "must be >= 2")
        kkt = _number(raw, "kkt_tolerance", 1e-8)
        if kkt <= 0:
            raise ConfigError("kkt_tolerance", "must be > 0")
        sigma = _number(raw, "sigma", None) if "sigma" in raw else None
        perspective = str(raw.get("perspective", "A")).upper()
        if perspective not in ("A", "B"):
            raise ConfigError("perspective", "expected 'A' or 'B'")

        adversary, adversary_spec = None, {}
        if mode == "best_response":
            if "adversary" not in raw:
                raise ConfigError("adversary", "required for best_response mode")
            spec = raw["adversary"]
            if isinstance(spec, dict) and "sigma" not in spec and sigma is not None and spec.get("kind") in ("risk_averse", "eager"):
                spec = {**spec, "sigma": sigma}
            adversary = _curve_from_spec(spec, "adversary", base_dir, kappa, lam, n_terms)
            adversary_spec = {"kind": spec} if isinstance(spec, str) else dict(spec)
        initial_b = None
        if raw.get("initial_b") is not None:
            curve = _curve_from_spec(raw["initial_b"], "initial_b", base_dir, kappa, lam, n_terms)
            initial_b = curve if isinstance(curve, StrategyCoeffs) else fit_from_function(curve, n_terms)
        if mode == "sweep":
            grid = raw.get("grid", {})
            if not isinstance(grid, dict):
                raise ConfigError("grid", "expected an object of parameter lists")
            for k, v in grid.items():
                if k not in SWEEP_KEYS:
                    raise ConfigError(f"grid.{k}", f"not sweepable; expected one of {list(SWEEP_KEYS)}")
                if not isinstance(v, list):
                    raise ConfigError(f"grid.{k}", "expected a list")
            cell_mode = raw.get("cell_mode", "equilibrium")
            if cell_mode not in MODES or cell_mode == "sweep":
                raise ConfigError("cell_mode", f"expected best_response, equilibrium or closed_form, got {cell_mode!r}")

        return cls(
            mode=mode, kappa=kappa, lam=lam, n_terms=n_terms, gamma=gamma, tolerance=tolerance,
            max_iterations=max_iterations, sigma=sigma, perspective=perspective, adversary=adversary,
            adversary_spec=adversary_spec,
            initial_b=initial_b,
            constraints_a=_constraints(raw.get("constraints_a"), "constraints_a", base_dir, kappa, lam, n_terms),
            constraints_b=_constraints(raw.get("constraints_b"), "constraints_b", base_dir, kappa, lam, n_terms),
            output=base_dir / raw.get("output", "out"), grid_points_out=grid_out, kkt_tolerance=kkt,
            raw=dict(raw), base_dir=base_dir,
        )

    def equilibrium_params(self) -> EquilibriumParams:
        return EquilibriumParams(
            self.kappa, self.lam, self.n_terms, self.gamma, self.tolerance, self.max_iterations,
            self.constraints_a, self.constraints_b, self.initial_b,
            qp_settings=QpSettings(kkt_tolerance=self.kkt_tolerance),
        )


def load_config(path, *, output=None) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from None
    cfg = ScenarioConfig.from_dict(raw, path.parent)
    if output is not None:
        cfg = replace(cfg, output=Path(output))
    return cfg


# ---------------------------------------------------------------------------
# deterministic writers


def fmt(x) -> str:
    return format(float(x), FLOAT_FMT)


def _rounded(obj):
    """Round every float to 12 significant digits for JSON output."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(fmt(x)) if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_rounded(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return str(obj)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_rounded(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


# ---------------------------------------------------------------------------
# running


@dataclass
class ScenarioResult:
    """What a scenario produced; ``exit_code`` follows the CLI convention."""

    exit_code: int
    status: str
    a: np.ndarray
    b: np.ndarray
    report: dict
    iterations: int = 0
    l2_a: float = float("nan")
    l2_b: float = float("nan")
    costs: tuple[float, float] = (float("nan"), float("nan"))


def _times(cfg: ScenarioConfig) -> np.ndarray:
    return np.linspace(0.0, 1.0, cfg.grid_points_out)


def _write_artifacts(cfg, a, b, columns, state, report, coeffs_extra=None) -> None:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    t = _times(cfg)
    header = ["t", "a", "b", *columns]
    data = [t, reconstruct(a, t), reconstruct(b, t), *[np.asarray(c(t), dtype=float) for c in columns.values()]]
    write_csv(out / "strategies.csv", header, zip(*(list(map(float, col)) for col in data)))
    write_csv(out / "state_space.csv", ["phase", "iteration", "cost_a", "cost_b"], state)
    write_json(out / "report.json", report)
    coeffs = {"a": a, "b": b, "n_terms": cfg.n_terms, "kappa": cfg.kappa, "lambda": cfg.lam, "gamma": cfg.gamma}
    coeffs.update(coeffs_extra or {})
    write_json(out / "coefficients.json", coeffs)


def _params_echo(cfg: ScenarioConfig) -> dict:
    return {
        "mode": cfg.mode, "kappa": cfg.kappa, "lambda": cfg.lam, "n_terms": cfg.n_terms, "gamma": cfg.gamma,
        "tolerance": cfg.tolerance, "max_iterations": cfg.max_iterations, "perspective": cfg.perspective,
        "n_constraints_a": len(cfg.constraints_a), "n_constraints_b": len(cfg.constraints_b),
    }


def _run_best_response(cfg: ScenarioConfig) -> ScenarioResult:
    adv = cfg.adversary
    opp = adv if isinstance(adv, StrategyCoeffs) else fit_from_function(adv, cfg.n_terms)
    params = replace(cfg.equilibrium_params(), gamma=1.0)
    own_specs = cfg.constraints_a if cfg.perspective == "A" else cfg.constraints_b
    columns = {}
    report = {"params": _params_echo(cfg), "adversary": cfg.adversary_spec.get("kind")}
    try:
        x, rep = best_response_step(cfg.perspective, opp, params)
    except SolverError as exc:
        report.update(status="solver_failure", error=str(exc), solver=exc.report.summary() if exc.report else None)
        zeros = np.zeros(cfg.n_terms)
        a, b = (zeros, opp.coeffs) if cfg.perspective == "A" else (opp.coeffs, zeros)
        _write_artifacts(cfg, a, b, columns, [], report)
        return ScenarioResult(EXIT_SOLVER, "solver_failure", a, b, report)
    cost = assemble_cost(cfg.perspective, opp, cfg.kappa, cfg.lam).evaluate(x)
    a, b = (x, opp.coeffs) if cfg.perspective == "A" else (opp.coeffs, x)
    kind = cfg.adversary_spec.get("kind")
    if cfg.perspective == "A" and not own_specs and kind in closed_forms.PASSIVE_KINDS:
        ref = closed_forms.best_response_to_passive(kind, cfg.kappa, cfg.lam, cfg.adversary_spec.get("sigma"))
        columns["a_closed_form"] = ref
        report["l2_a_closed_form"] = l2_distance_quad(StrategyCoeffs(x), ref)
    ca, cb = strategy_costs(a, b, cfg.kappa, cfg.lam)
    report.update(status="optimal", cost=cost, cost_a=ca, cost_b=cb, solver=rep.summary())
    _write_artifacts(cfg, a, b, columns, [], report)
    return ScenarioResult(EXIT_OK, "optimal", a, b, report, 0, costs=(ca, cb))


def _run_equilibrium(cfg: ScenarioConfig) -> ScenarioResult:
    params = cfg.equilibrium_params()
    unconstrained = not cfg.constraints_a and not cfg.constraints_b
    columns = {}
    if unconstrained:
        a_eq, b_eq = closed_forms.equilibrium_pair(cfg.kappa, cfg.lam)
        columns = {"a_closed_form": a_eq, "b_closed_form": b_eq}
    error = None
    try:
        a_s, b_s, trace = run(params)
        a, b = a_s.coeffs, b_s.coeffs
        status = trace.status.value
    except SolverError as exc:
        trace = exc.trace
        error = str(exc)
        last = trace.records[-1] if trace.records else None
        a = last.a if last is not None else trace.init_a
        b = last.b if last is not None else trace.init_b
        status = "solver_failure"
    comp = compare_to_closed_form(a, b, cfg.kappa, cfg.lam, trace) if all(np.all(np.isfinite(v)) for v in (a, b)) and \
        max(np.max(np.abs(a)), np.max(np.abs(b))) < 1e6 else None
    report = {
        "params": _params_echo(cfg),
        "status": status,
        "iterations": trace.iterations,
        "final_costs": list(trace.final_costs),
        "comparison": comp.to_dict() if comp is not None else None,
        "closed_form_applies": unconstrained,
    }
    if trace.records:
        last = trace.records[-1]
        report["solver_a"] = last.report_a.summary()
        report["solver_b"] = last.report_b.summary()
        report["final_delta"] = max(last.delta_a, last.delta_b)
    if error:
        report["error"] = error
    state = state_space_series(trace)
    _write_artifacts(cfg, a, b, columns, state, report)
    code = EXIT_OK if status == RunStatus.CONVERGED.value else EXIT_SOLVER
    l2 = (comp.l2_a, comp.l2_b) if comp is not None else (float("nan"), float("nan"))
    return ScenarioResult(code, status, a, b, report, trace.iterations, *l2, costs=trace.final_costs)


def _run_closed_form(cfg: ScenarioConfig) -> ScenarioResult:
    a_eq, b_eq = closed_forms.equilibrium_pair(cfg.kappa, cfg.lam)
    a = fit_from_function(a_eq, cfg.n_terms).coeffs
    b = fit_from_function(b_eq, cfg.n_terms).coeffs
    comp = compare_to_closed_form(a, b, cfg.kappa, cfg.lam)
    report = {"params": _params_echo(cfg), "status": "closed_form", "comparison": comp.to_dict()}
    # strategies.csv carries the exact curves; coefficients.json their projections
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    t = _times(cfg)
    write_csv(out / "strategies.csv", ["t", "a", "b"], zip(map(float, t), map(float, a_eq(t)), map(float, b_eq(t))))
    write_csv(out / "state_space.csv", ["phase", "iteration", "cost_a", "cost_b"], [])
    write_json(out / "report.json", report)
    write_json(out / "coefficients.json",
               {"a": a, "b": b, "n_terms": cfg.n_terms, "kappa": cfg.kappa, "lambda": cfg.lam, "gamma": cfg.gamma})
    return ScenarioResult(EXIT_OK, "closed_form", a, b, report, 0, comp.l2_a, comp.l2_b,
                          (comp.cost_a_final, comp.cost_b_final))


_RUNNERS = {"best_response": _run_best_response, "equilibrium": _run_equilibrium, "closed_form": _run_closed_form}


def run_config(cfg: ScenarioConfig) -> ScenarioResult:
    """Run a non-sweep scenario and write its artifacts."""
    if cfg.mode == "sweep":
        raise ConfigError("mode", "use run_sweep for sweep scenarios")
    logger.info("running %s scenario into %s", cfg.mode, cfg.output)
    return _RUNNERS[cfg.mode](cfg)


def run_scenario(path, *, output=None) -> int:
    """Run the scenario file at ``path``; returns the process exit code."""
    try:
        cfg = load_config(path, output=output)
        if cfg.mode == "sweep":
            return run_sweep(cfg)
        return run_config(cfg).exit_code
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG


# ---------------------------------------------------------------------------
# sweeps

SUMMARY_HEADER = ["cell", "kappa", "lambda", "gamma", "n_terms", "status", "exit_code", "iterations",
                  "l2_a", "l2_b", "cost_a_final", "cost_b_final"]


def sweep_cells(cfg: ScenarioConfig) -> list[dict]:
    """Parameter overrides for every cell, in a fixed order; empty grid gives none."""
    grid = cfg.raw.get("grid") or {}
    keys = [k for k in SWEEP_KEYS if k in grid]
    if not keys or any(len(grid[k]) == 0 for k in keys):
        return []
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def _cell_name(i: int, cell: dict) -> str:
    parts = [f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in cell.items()]
    return "_".join([f"cell{i:03d}", *parts])


def _run_cell(args):
    raw, base_dir, out_dir, cell_mode, cell = args
    values = {k: cell.get(k, raw.get(k)) for k in SWEEP_KEYS}
    row = {"kappa": values["kappa"], "lambda": values["lambda"], "gamma": values["gamma"], "n_terms": values["n_terms"]}
    cell_raw = {k: v for k, v in raw.items() if k not in ("grid", "cell_mode", "output")}
    cell_raw.update({k: v for k, v in cell.items()})
    cell_raw["mode"] = cell_mode
    try:
        cfg = replace(ScenarioConfig.from_dict(cell_raw, base_dir), output=out_dir)
        res = run_config(cfg)
        row.update(gamma=cfg.gamma, n_terms=cfg.n_terms, status=res.status, exit_code=res.exit_code,
                   iterations=res.iterations, l2_a=res.l2_a, l2_b=res.l2_b,
                   cost_a_final=res.costs[0], cost_b_final=res.costs[1])
    except ConfigError as exc:
        logger.error("cell %s: config error: %s", out_dir.name, exc)
        row.update(status="config_error", exit_code=EXIT_CONFIG, iterations=0, l2_a=float("nan"),
                   l2_b=float("nan"), cost_a_final=float("nan"), cost_b_final=float("nan"))
    return row


def run_sweep(cfg: ScenarioConfig, *, jobs: int = 1) -> int:
    """Run every cell into its own sub-directory and write ``summary.csv``.

    Cells that fail are recorded and the sweep carries on; the exit code is
    0 unless the sweep itself is misconfigured.
    """
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    cells = sweep_cells(cfg)
    cell_mode = cfg.raw.get("cell_mode", "equilibrium")
    tasks = [(cfg.raw, cfg.base_dir, out / _cell_name(i, c), cell_mode, c) for i, c in enumerate(cells)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, tasks))
    else:
        rows = [_run_cell(t) for t in tasks]
    write_csv(out / "summary.csv", SUMMARY_HEADER,
              ([_cell_name(i, c), *(row[k] for k in SUMMARY_HEADER[1:])] for i, (c, row) in enumerate(zip(cells, rows))))
    return EXIT_OK
