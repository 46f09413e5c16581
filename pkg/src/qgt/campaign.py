"""Randomized verification campaigns over seeded matrix ensembles.

A campaign is the product ``suites x q_grid x dims`` of cells, each run
``trials_per_cell`` times. Trial seeds are derived with splitmix64 from
``(seed, suite id, q index, dim index, trial index)``, so any trial can be
regenerated on its own, and every failed trial is stored together with its
input matrices for :func:`replay`.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__, config
from ._backend import BACKEND_NAME
from .deformed import (
    random_density_array,
    tsallis_entropy,
    tsallis_entropy_trace_form,
)
from .functionals import (
    IsometryFamily,
    carlen_lieb,
    make_isometry_family,
    phi,
)
from .inequalities import (
    EQ,
    InequalityVerdict,
    check_classical_gt,
    check_corollary6,
    check_differential_inequality,
    check_theorem1,
    convexity_probe,
    decoupled_bound,
    theorem1_sides,
    verdict,
)
from .spectral import random_pd_array, random_symmetric_array

SUITES = (
    "theorem1",
    "classical_gt",
    "phi_concavity",
    "carlen_lieb",
    "corollary6",
    "differential",
    "decoupling",
    "entropy",
)
DEFAULT_Q_GRID = (1.0, 1.1, 1.5, 1.9, 2.0, 2.1, 2.5, 3.0)
DEFAULT_DIMS = (1, 2, 3, 5, 8)
CSV_COLUMNS = ("suite", "q", "dim", "trial_index", "seed", "lhs", "rhs", "gap",
               "relative_margin", "holds")
PROBE_LAMBDAS = (0.25, 0.5, 0.75)
FD_CROSS_CHECK_TOL = 1e-5
REPLAY_RTOL = 1e-12

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Invalid campaign configuration or unreadable input file."""


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed by chained splitmix64."""
    h = 0
    for p in parts:
        h = splitmix64(h ^ (int(p) & _MASK64))
    return h


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CampaignConfig:
    suite: str = "all"
    q_grid: tuple = DEFAULT_Q_GRID
    dims: tuple = DEFAULT_DIMS
    trials_per_cell: int = 200
    seed: int = 0
    eigenvalue_range: tuple = (0.05, 20.0)
    tolerance_scale: float = config.TOL_SCALE
    output_format: str = "json"

    def __post_init__(self):
        object.__setattr__(self, "q_grid", tuple(float(q) for q in self.q_grid))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "eigenvalue_range",
                           tuple(float(x) for x in self.eigenvalue_range))
        if self.suite != "all" and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if not self.q_grid:
            raise ConfigError("q_grid must not be empty")
        if any(not config.Q_MIN <= q <= config.Q_MAX for q in self.q_grid):
            raise ConfigError(f"q values must lie in [1, 3]: {self.q_grid}")
        if not self.dims or any(not 1 <= d <= config.MAX_DIM for d in self.dims):
            raise ConfigError(f"dims must be in [1, {config.MAX_DIM}]: {self.dims}")
        if self.trials_per_cell < 1:
            raise ConfigError("trials_per_cell must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if len(self.eigenvalue_range) != 2:
            raise ConfigError("eigenvalue_range needs two values")
        lo, hi = self.eigenvalue_range
        if not 0.0 < lo <= hi:
            raise ConfigError(f"need 0 < lambda_min <= lambda_max, got {self.eigenvalue_range}")
        if not self.tolerance_scale > 0.0:
            raise ConfigError("tolerance_scale must be positive")
        if self.output_format not in ("json", "csv"):
            raise ConfigError("output_format must be 'json' or 'csv'")

    @property
    def suites(self) -> tuple:
        return SUITES if self.suite == "all" else (self.suite,)


@dataclass
class TrialRecord:
    suite: str
    q: float
    dim: int
    trial_index: int
    seed: int
    lhs: float
    rhs: float
    gap: float
    relative_margin: float
    holds: bool
    wall_time_ns: int
    error: str | None = None
    inputs: dict | None = field(default=None, repr=False)

    def to_dict(self, with_inputs=False) -> dict:
        d = asdict(self)
        if not with_inputs:
            d.pop("inputs")
        return d


# -- serialization of inputs -------------------------------------------------

def encode_matrix(m) -> dict:
    a = np.asarray(m, dtype=np.float64)
    return {"shape": list(a.shape), "data": [float(x) for x in a.ravel()]}


def decode_matrix(obj) -> np.ndarray:
    try:
        return np.array(obj["data"], dtype=np.float64).reshape(obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed matrix: {exc}") from exc


def _encode(value):
    if isinstance(value, np.ndarray):
        return encode_matrix(value)
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _decode(value):
    if isinstance(value, dict) and "shape" in value and "data" in value:
        return decode_matrix(value)
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


# -- suites --------------------------------------------------------------------
#
# generate(rng, q, dim, cfg) -> inputs (numpy arrays, lists, floats)
# evaluate(inputs, q, tol_scale) -> InequalityVerdict

def _pd(rng, dim, cfg):
    return random_pd_array(rng, dim, cfg.eigenvalue_range)


def _family_inputs(rng, dim):
    k = int(rng.integers(1, 4))
    family = make_isometry_family(k, dim, int(rng.integers(0, 2**63)))
    return list(family.members)


def _probe_lambdas(rng):
    return list(PROBE_LAMBDAS) + [float(x) for x in rng.uniform(0.0, 1.0, 2)]


def _gen_theorem1(rng, q, dim, cfg):
    return {"A": _pd(rng, dim, cfg), "B": _pd(rng, dim, cfg)}


def _eval_theorem1(inp, q, tol_scale):
    return check_theorem1(inp["A"], inp["B"], q, tol_scale)


def _gen_classical_gt(rng, q, dim, cfg):
    return {"A": random_symmetric_array(rng, dim), "B": random_symmetric_array(rng, dim)}


def _eval_classical_gt(inp, q, tol_scale):
    return check_classical_gt(inp["A"], inp["B"], tol_scale)


def _gen_pair_of_points(rng, q, dim, cfg):
    members = _family_inputs(rng, dim)
    k = len(members)
    return {
        "H": members,
        "X": [_pd(rng, dim, cfg) for _ in range(k)],
        "Y": [_pd(rng, dim, cfg) for _ in range(k)],
        "lambdas": _probe_lambdas(rng),
    }


def _eval_phi_concavity(inp, q, tol_scale):
    family = IsometryFamily(tuple(inp["H"]))
    return convexity_probe(lambda pt: phi(family, pt, q), inp["X"], inp["Y"],
                           concave=q < 2.0, lambdas=inp["lambdas"], tol_scale=tol_scale)


def _gen_carlen_lieb(rng, q, dim, cfg):
    if q == 1.0:
        return _gen_pair_of_points(rng, q, dim, cfg)
    k = int(rng.integers(1, 4))
    return {
        "H": [rng.standard_normal((dim, dim)) for _ in range(k)],
        "X": [_pd(rng, dim, cfg) for _ in range(k)],
        "Y": [_pd(rng, dim, cfg) for _ in range(k)],
        "lambdas": _probe_lambdas(rng),
    }


def _eval_carlen_lieb(inp, q, tol_scale):
    # p = q - 1; at q = 1 the p -> 0 limit over an exact family is phi at q = 1.
    if q == 1.0:
        return _eval_phi_concavity(inp, q, tol_scale)
    p = q - 1.0
    members = inp["H"]
    return convexity_probe(lambda pt: carlen_lieb(members, pt, p), inp["X"], inp["Y"],
                           concave=p < 1.0, lambdas=inp["lambdas"], tol_scale=tol_scale)


def _gen_two_points(rng, q, dim, cfg):
    members = _family_inputs(rng, dim)
    k = len(members)
    return {
        "H": members,
        "A": [_pd(rng, dim, cfg) for _ in range(k)],
        "B": [_pd(rng, dim, cfg) for _ in range(k)],
    }


def _eval_corollary6(inp, q, tol_scale):
    return check_corollary6(IsometryFamily(tuple(inp["H"])), inp["A"], inp["B"], q, tol_scale)


def _eval_differential(inp, q, tol_scale):
    v = check_differential_inequality(IsometryFamily(tuple(inp["H"])), inp["A"], inp["B"],
                                      q, tol_scale, cross_check=True)
    if v.details["fd_relative_error"] > FD_CROSS_CHECK_TOL:
        raise ArithmeticError(
            f"chain-rule derivative disagrees with finite difference "
            f"(relative error {v.details['fd_relative_error']:.3e})"
        )
    return v


def _gen_decoupling(rng, q, dim, cfg):
    eps = float(math.exp(rng.uniform(math.log(1e-8), math.log(0.9))))
    return {"L1": _pd(rng, dim, cfg), "L2": _pd(rng, dim, cfg), "eps": eps}


def _eval_decoupling(inp, q, tol_scale):
    return decoupled_bound(inp["L1"], inp["L2"], q, inp["eps"], tol_scale)


def _gen_entropy(rng, q, dim, cfg):
    return {"rho": random_density_array(rng, dim)}


def _eval_entropy(inp, q, tol_scale):
    rho = inp["rho"]
    return verdict(tsallis_entropy(rho, q), tsallis_entropy_trace_form(rho, q), EQ, tol_scale)


_SUITE_IMPL = {
    "theorem1": (_gen_theorem1, _eval_theorem1),
    "classical_gt": (_gen_classical_gt, _eval_classical_gt),
    "phi_concavity": (_gen_pair_of_points, _eval_phi_concavity),
    "carlen_lieb": (_gen_carlen_lieb, _eval_carlen_lieb),
    "corollary6": (_gen_two_points, _eval_corollary6),
    "differential": (_gen_two_points, _eval_differential),
    "decoupling": (_gen_decoupling, _eval_decoupling),
    "entropy": (_gen_entropy, _eval_entropy),
}


def evaluate_inputs(suite: str, inputs: dict, q: float,
                    tol_scale: float = config.TOL_SCALE) -> InequalityVerdict:
    """Re-run the checker of ``suite`` on explicit (decoded) inputs."""
    if suite not in _SUITE_IMPL:
        raise ConfigError(f"unknown suite {suite!r}")
    return _SUITE_IMPL[suite][1](inputs, q, tol_scale)


def trial_seed(cfg: CampaignConfig, suite: str, qi: int, di: int, trial: int) -> int:
    return derive_seed(cfg.seed, SUITES.index(suite), qi, di, trial)


def run_trial(suite: str, q: float, dim: int, trial_index: int, seed: int,
              cfg: CampaignConfig, keep_inputs: bool = False) -> TrialRecord:
    """Generate inputs from ``seed`` and check them; numerical errors become violations."""
    generate, evaluate = _SUITE_IMPL[suite]
    start = time.perf_counter_ns()
    inputs = None
    try:
        inputs = generate(_rng(seed), q, dim, cfg)
        v = evaluate(inputs, q, cfg.tolerance_scale)
        lhs, rhs, gap, margin, holds, error = (v.lhs, v.rhs, v.gap, v.relative_margin,
                                               v.holds, None)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        lhs = rhs = gap = margin = math.nan
        holds = False
        error = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter_ns() - start
    record = TrialRecord(suite, q, dim, trial_index, seed, lhs, rhs, gap, margin, holds,
                         elapsed, error)
    if inputs is not None and (keep_inputs or not holds):
        record.inputs = {k: _encode(v) for k, v in inputs.items()}
    return record


def _cells(cfg: CampaignConfig):
    for suite in cfg.suites:
        for qi, q in enumerate(cfg.q_grid):
            for di, dim in enumerate(cfg.dims):
                yield suite, qi, q, di, dim


def _run_cell(args):
    cfg, suite, qi, q, di, dim, keep_inputs = args
    return [
        run_trial(suite, q, dim, t, trial_seed(cfg, suite, qi, di, t), cfg, keep_inputs)
        for t in range(cfg.trials_per_cell)
    ]


def default_workers() -> int:
    env = os.environ.get("QGT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"QGT_THREADS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def _aggregate(records):
    margins = [r.relative_margin for r in records if not math.isnan(r.relative_margin)]
    violations = sum(1 for r in records if not r.holds)
    if margins:
        agg = {"min_relative_margin": min(margins),
               "median_relative_margin": statistics.median(margins),
               "max_relative_margin": max(margins)}
    else:
        agg = {"min_relative_margin": None, "median_relative_margin": None,
               "max_relative_margin": None}
    agg["trials"] = len(records)
    agg["violations"] = violations
    return agg


def run_campaign(cfg: CampaignConfig, workers: int | None = None,
                 keep_inputs: bool = False) -> dict:
    """Run every cell of ``cfg`` and return the JSON-ready report.

    Cells are farmed out to a process pool when ``workers > 1``; the report
    is assembled in cell order, so it does not depend on ``workers``.
    """
    if workers is None:
        workers = default_workers()
    tasks = [(cfg, suite, qi, q, di, dim, keep_inputs)
             for suite, qi, q, di, dim in _cells(cfg)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    cells = []
    failures = []
    for (_, suite, _, q, _, dim, _), records in zip(tasks, results):
        agg = _aggregate(records)
        cells.append({
            "suite": suite,
            "q": q,
            "dim": dim,
            "aggregates": agg,
            "violations": agg["violations"],
            "records": [r.to_dict() for r in records],
        })
        for r in records:
            if not r.holds:
                failures.append(failure_entry(r, cfg.tolerance_scale))
    return {
        "version": __version__,
        "backend": BACKEND_NAME,
        "config": config_to_dict(cfg),
        "cells": cells,
        "failures": failures,
        "pass": not failures,
    }


def failure_entry(record: TrialRecord, tolerance_scale: float) -> dict:
    """Self-contained replay payload for one trial."""
    d = record.to_dict(with_inputs=True)
    d["tolerance_scale"] = tolerance_scale
    d["version"] = __version__
    return d


def config_to_dict(cfg: CampaignConfig) -> dict:
    d = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    d["q_grid"] = list(cfg.q_grid)
    d["dims"] = list(cfg.dims)
    d["eigenvalue_range"] = list(cfg.eigenvalue_range)
    return d


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def report_records(report: dict):
    for cell in report["cells"]:
        yield from cell["records"]


def _csv_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_csv_value(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


# -- q sweep -------------------------------------------------------------------

SWEEP_COLUMNS = ("q", "lhs", "rhs", "gap", "relative_margin")


def sweep_gap_matrices(a, b, q_grid) -> list[dict]:
    """Both sides of the deformed trace inequality for a fixed pair along ``q_grid``.

    Here ``gap`` is the raw ``rhs - lhs`` (not branch-oriented) so its sign
    change at ``q = 2`` is visible.
    """
    rows = []
    for q in q_grid:
        lhs, rhs = theorem1_sides(a, b, q)
        gap = rhs - lhs
        rows.append({"q": float(q), "lhs": lhs, "rhs": rhs, "gap": gap,
                     "relative_margin": gap / max(1.0, abs(lhs), abs(rhs))})
    return rows


def sweep_gap(a_seed: int, b_seed: int, q_grid, dim: int,
              eigenvalue_range=(0.05, 20.0)) -> list[dict]:
    """:func:`sweep_gap_matrices` for a seeded pair drawn like :func:`qgt.spectral.random_pd`."""
    if any(not config.Q_MIN <= q <= config.Q_MAX for q in q_grid):
        raise ConfigError("q values must lie in [1, 3]")
    a = random_pd_array(_rng(a_seed), dim, eigenvalue_range)
    b = random_pd_array(_rng(b_seed), dim, eigenvalue_range)
    return sweep_gap_matrices(a, b, q_grid)


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([repr(float(row[c])) for c in SWEEP_COLUMNS])
    return buf.getvalue()


# -- replay --------------------------------------------------------------------

def load_record(path, index: int = 0) -> dict:
    """Read a replay file; campaign reports yield their ``index``-th failure."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if isinstance(obj, dict) and "failures" in obj and "cells" in obj:
        try:
            obj = obj["failures"][index]
        except IndexError as exc:
            raise ConfigError(f"report has no failure #{index}") from exc
    if not isinstance(obj, dict) or not {"suite", "q", "inputs", "lhs", "rhs"} <= obj.keys():
        raise ConfigError("record needs suite, q, inputs, lhs and rhs")
    if not isinstance(obj["inputs"], dict):
        raise ConfigError("record inputs must be an object")
    return obj


def replay_record(record: dict) -> tuple[InequalityVerdict, dict]:
    """Re-evaluate a stored trial and compare with its recorded sides.

    Returns the fresh verdict and a summary with ``reproduced`` (both sides
    within 1e-12 relative) and ``bitwise`` (exact float equality) flags.
    """
    inputs = {k: _decode(v) for k, v in record["inputs"].items()}
    tol_scale = float(record.get("tolerance_scale", config.TOL_SCALE))
    try:
        v = evaluate_inputs(record["suite"], inputs, float(record["q"]), tol_scale)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed record inputs: {exc}") from exc
    rec_lhs = _as_float(record["lhs"])
    rec_rhs = _as_float(record["rhs"])

    def close(a, b):
        if math.isnan(a) or math.isnan(b):
            return math.isnan(a) and math.isnan(b)
        return abs(a - b) <= REPLAY_RTOL * max(1.0, abs(a), abs(b))

    summary = {
        "suite": record["suite"],
        "q": float(record["q"]),
        "recorded_lhs": rec_lhs,
        "recorded_rhs": rec_rhs,
        "lhs": v.lhs,
        "rhs": v.rhs,
        "holds": v.holds,
        "recorded_holds": record.get("holds"),
        "reproduced": close(v.lhs, rec_lhs) and close(v.rhs, rec_rhs),
        "bitwise": v.lhs == rec_lhs and v.rhs == rec_rhs,
    }
    return v, summary


def _as_float(x):
    if x is None:
        return math.nan
    try:
        return float(x)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"not a number: {x!r}") from exc
