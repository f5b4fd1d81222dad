"""Seed-deterministic simulation experiments and their JSON reports.

Every random draw in an experiment comes from a stream keyed by
``(master_seed, kind_id, n_index, role, index)``; see ``rng``. Bootstrap
replicates of a dataset add the replicate number below that key. Cells can
therefore be computed in any order, or concurrently, and the report is
assembled by cell index.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .diagnostics import DEFAULT_EPSILON_GRID, full_report
from .limitdist import EmpiricalCdf, ks_distance, sample_weighted_chisquare
from .model import SpectralModel, TruncationRule, dn_of, generate_sample
from .rng import check_seed, derive_seed, stream
from .statistic import bootstrap_replicates, critical_value, v_statistic

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

KINDS = {"level_study": 1, "bootstrap_ks": 2, "limit_law": 3, "diagnostics_sweep": 4}

# stream roles below (kind, n_index)
ROLE_DATA = 0
ROLE_BOOT = 1
ROLE_LIMIT = 2
ROLE_OMEGA = 3
ROLE_OMEGA_BOOT = 4
ROLE_SELF = 5

KOLMOGOROV_SD = 0.2603  # standard deviation of the Kolmogorov distribution


class PlanError(ValueError):
    """Invalid experiment plan; the message starts with the offending key."""


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str
    model: SpectralModel = field(default_factory=SpectralModel)
    truncation: TruncationRule = field(default_factory=TruncationRule)
    n_grid: tuple = (100,)
    m_datasets: int = 1000
    b_replicates: int = 1000
    alpha_list: tuple = (0.05,)
    master_seed: int = 0
    omegas: int = 10
    ks_reference: str = "bootstrap"
    epsilon_grid: tuple = DEFAULT_EPSILON_GRID
    l_projection: Optional[int] = None
    limit_truncation: int = 2000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlanError(f"kind: unknown experiment {self.kind!r}; expected one of {sorted(KINDS)}")
        for key in ("m_datasets", "b_replicates", "omegas", "limit_truncation"):
            _require_count(key, getattr(self, key))
        if not self.n_grid:
            raise PlanError("n_grid: must not be empty")
        for i, n in enumerate(self.n_grid):
            _require_count(f"n_grid[{i}]", n)
        if not self.alpha_list:
            raise PlanError("alpha_list: must not be empty")
        for i, a in enumerate(self.alpha_list):
            if isinstance(a, bool) or not isinstance(a, (int, float)) or not 0 < a < 1:
                raise PlanError(f"alpha_list[{i}]: must lie in (0, 1), got {a!r}")
        if not self.epsilon_grid:
            raise PlanError("epsilon_grid: must not be empty")
        for i, e in enumerate(self.epsilon_grid):
            if isinstance(e, bool) or not isinstance(e, (int, float)) or not (math.isfinite(e) and e > 0):
                raise PlanError(f"epsilon_grid[{i}]: must be positive, got {e!r}")
        if self.l_projection is not None:
            _require_count("l_projection", self.l_projection)
        if self.ks_reference not in ("bootstrap", "self"):
            raise PlanError(f"ks_reference: expected 'bootstrap' or 'self', got {self.ks_reference!r}")
        try:
            check_seed(self.master_seed)
        except (TypeError, ValueError) as exc:
            raise PlanError(f"master_seed: {exc}") from None

    def to_dict(self) -> dict:
        """Flat key-value echo; ``plan_from_mapping`` reads it back."""
        out = {
            "kind": self.kind,
            "n_grid": list(self.n_grid),
            "m_datasets": self.m_datasets,
            "b_replicates": self.b_replicates,
            "alpha_list": [float(a) for a in self.alpha_list],
            "master_seed": self.master_seed,
            "omegas": self.omegas,
            "ks_reference": self.ks_reference,
            "epsilon_grid": [float(e) for e in self.epsilon_grid],
            "limit_truncation": self.limit_truncation,
            "truncation": self.truncation.kind,
            "truncation_d": self.truncation.d,
            "truncation_beta": self.truncation.beta,
        }
        if self.l_projection is not None:
            out["l_projection"] = self.l_projection
        for f in fields(SpectralModel):
            value = getattr(self.model, f.name)
            if value is not None:
                out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


def _require_count(key: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise PlanError(f"{key} must be ≥ 1, got {value!r}")


_PLAN_KEYS = {
    "kind", "n_grid", "m_datasets", "b_replicates", "alpha_list", "master_seed", "omegas",
    "ks_reference", "epsilon_grid", "l_projection", "limit_truncation",
}
_MODEL_KEYS = {f.name for f in fields(SpectralModel)}
_TRUNCATION_KEYS = {"truncation": "kind", "truncation_d": "d", "truncation_beta": "beta"}
_LIST_KEYS = {"n_grid", "alpha_list", "epsilon_grid", "eigenvalues", "shift_direction"}


def plan_from_mapping(raw: dict) -> ExperimentPlan:
    """Build a plan from flat keys (as found in a TOML or JSON plan file)."""
    unknown = sorted(set(raw) - _PLAN_KEYS - _MODEL_KEYS - set(_TRUNCATION_KEYS))
    if unknown:
        raise PlanError(f"{unknown[0]}: unknown key")
    if "kind" not in raw:
        raise PlanError("kind: required key missing")
    for key in _LIST_KEYS & set(raw):
        if not isinstance(raw[key], list):
            raise PlanError(f"{key}: expected a list, got {type(raw[key]).__name__}")
    model_args = {k: (tuple(v) if isinstance(v, list) else v) for k, v in raw.items() if k in _MODEL_KEYS}
    try:
        model = SpectralModel(**model_args)
    except (ValueError, TypeError) as exc:
        raise PlanError(f"model: {exc}") from None
    trunc_args = {_TRUNCATION_KEYS[k]: v for k, v in raw.items() if k in _TRUNCATION_KEYS}
    try:
        truncation = TruncationRule(**trunc_args)
    except (ValueError, TypeError) as exc:
        raise PlanError(f"truncation: {exc}") from None
    plan_args = {k: (tuple(v) if isinstance(v, list) else v) for k, v in raw.items() if k in _PLAN_KEYS}
    return ExperimentPlan(model=model, truncation=truncation, **plan_args)


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    text = path.read_text()
    try:
        raw = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise PlanError(f"<file>: cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise PlanError("<file>: top level must be a key-value mapping")
    return plan_from_mapping(raw)


@dataclass
class ExperimentReport:
    plan: dict
    cells: list
    version: str = __version__
    failed: bool = False

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "master_seed": self.plan.get("master_seed"),
            "plan": self.plan,
            "failed": self.failed,
            "cells": self.cells,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        obj = json.loads(text)
        return cls(plan=obj["plan"], cells=obj["cells"], version=obj["version"], failed=obj["failed"])

    def to_csv(self) -> str:
        cols = ["index", "n", "d_n", "alpha", "metric", "value", "stderr", "wall_time", "status"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for cell in self.cells:
            writer.writerow(["" if cell.get(c) is None else cell.get(c) for c in cols])
        return buf.getvalue()


def _cell(index, n, d_n, metric, value, stderr, wall_time, alpha=None, extra=None) -> dict:
    return {
        "index": index,
        "n": n,
        "d_n": d_n,
        "alpha": alpha,
        "metric": metric,
        "value": value,
        "stderr": stderr,
        "wall_time": wall_time,
        "status": "ok",
        "error": None,
        "extra": extra or {},
    }


def _failed_cell(index, n, d_n, metric, exc, alpha=None) -> dict:
    cell = _cell(index, n, d_n, metric, None, None, 0.0, alpha=alpha)
    cell["status"] = "failed"
    cell["error"] = f"{type(exc).__name__}: {exc}"
    return cell


def _map(fn, items, workers: int) -> list:
    """Ordered map; results never depend on ``workers``."""
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def v_draws(model: SpectralModel, n: int, d: int, count: int, seed: int, *path: int, workers: int = 1) -> np.ndarray:
    """``count`` independent values of ``V_n``; dataset ``i`` uses ``stream(seed, *path, i)``."""
    def one(i):
        return v_statistic(generate_sample(model, n, d, stream(seed, *path, i)))

    return np.array(_map(one, range(count), workers))


def limit_length(plan: ExperimentPlan, d_n: int) -> int:
    """Number of weights kept when sampling the limit law for a cell of width ``d_n``."""
    if plan.truncation.kind == "fixed":
        return d_n
    return max(plan.limit_truncation, d_n)


def _ks_stderr(m: int, b: int) -> float:
    return KOLMOGOROV_SD * math.sqrt((m + b) / (m * b))


def run_level_study(plan: ExperimentPlan, workers: int = 1, progress=None) -> ExperimentReport:
    """Empirical rejection rate of the bootstrap test per ``(n, alpha)``.

    All levels share the same datasets and replicates, so rejection regions
    are nested across ``alpha``. With a non-zero model shift the rate is the
    empirical power.
    """
    _check_kind(plan, "level_study")
    kind = KINDS["level_study"]
    cells, failed = [], False
    seed = plan.master_seed
    for ni, n in enumerate(plan.n_grid):
        d = dn_of(plan.truncation, n)
        t0 = time.perf_counter()
        try:
            def one(i):
                x = generate_sample(plan.model, n, d, stream(seed, kind, ni, ROLE_DATA, i))
                stat = v_statistic(x)
                reps = np.sort(bootstrap_replicates(x, derive_seed(seed, kind, ni, ROLE_BOOT, i), plan.b_replicates))
                return [stat > critical_value(reps, a) for a in plan.alpha_list]

            decisions = np.array(_map(one, range(plan.m_datasets), workers), dtype=bool)
        except Exception as exc:  # noqa: BLE001 - recorded in the report
            failed = True
            for a in plan.alpha_list:
                cells.append(_failed_cell(len(cells), n, d, "rejection_rate", exc, alpha=float(a)))
            _notify(progress, cells[-1])
            continue
        wall = time.perf_counter() - t0
        for ai, a in enumerate(plan.alpha_list):
            rate = float(decisions[:, ai].mean())
            stderr = math.sqrt(rate * (1.0 - rate) / plan.m_datasets)
            cells.append(_cell(len(cells), n, d, "rejection_rate", rate, stderr, wall, alpha=float(a),
                               extra={"rejections": int(decisions[:, ai].sum())}))
            _notify(progress, cells[-1])
    return ExperimentReport(plan.to_dict(), cells, failed=failed)


def run_bootstrap_ks(plan: ExperimentPlan, workers: int = 1, progress=None) -> ExperimentReport:
    """KS distance between the bootstrap law on fixed datasets and the sampling law of ``V_n``.

    The sampling law is estimated from ``m_datasets`` fresh datasets. For each
    of ``omegas`` further datasets the bootstrap law is estimated from
    ``b_replicates`` replicates. With ``ks_reference = "self"``, fresh values
    of ``V_n`` stand in for the bootstrap replicates, which measures the noise
    floor of the comparison.
    """
    _check_kind(plan, "bootstrap_ks")
    kind = KINDS["bootstrap_ks"]
    cells, failed = [], False
    seed = plan.master_seed
    for ni, n in enumerate(plan.n_grid):
        d = dn_of(plan.truncation, n)
        t0 = time.perf_counter()
        try:
            truth = EmpiricalCdf(v_draws(plan.model, n, d, plan.m_datasets, seed, kind, ni, ROLE_DATA, workers=workers))

            def one(w):
                if plan.ks_reference == "self":
                    ref = v_draws(plan.model, n, d, plan.b_replicates, seed, kind, ni, ROLE_SELF, w)
                else:
                    x = generate_sample(plan.model, n, d, stream(seed, kind, ni, ROLE_OMEGA, w))
                    ref = bootstrap_replicates(x, derive_seed(seed, kind, ni, ROLE_OMEGA_BOOT, w), plan.b_replicates)
                return ks_distance(truth, EmpiricalCdf(ref))

            ks = np.array(_map(one, range(plan.omegas), workers))
        except Exception as exc:  # noqa: BLE001
            failed = True
            cells.append(_failed_cell(len(cells), n, d, "ks", exc))
            _notify(progress, cells[-1])
            continue
        wall = time.perf_counter() - t0
        stderr = float(ks.std(ddof=1) / math.sqrt(ks.size)) if ks.size > 1 else _ks_stderr(plan.m_datasets, plan.b_replicates)
        cells.append(_cell(len(cells), n, d, "ks", float(ks.mean()), stderr, wall, extra={
            "ks_values": [float(v) for v in ks],
            "reference": plan.ks_reference,
            "null_ks_95": 1.36 * math.sqrt((plan.m_datasets + plan.b_replicates) / (plan.m_datasets * plan.b_replicates)),
        }))
        _notify(progress, cells[-1])
    return ExperimentReport(plan.to_dict(), cells, failed=failed)


def run_limit_law(plan: ExperimentPlan, workers: int = 1, progress=None) -> ExperimentReport:
    """KS distance between the law of ``V_n(d_n)`` and the weighted chi-square limit.

    Both sides are Monte-Carlo estimates of size ``m_datasets``. For growing
    truncation rules the limit keeps ``limit_truncation`` weights of the
    infinite spectrum; the dropped mass is reported.
    """
    _check_kind(plan, "limit_law")
    kind = KINDS["limit_law"]
    cells, failed = [], False
    seed = plan.master_seed
    m = plan.m_datasets
    for ni, n in enumerate(plan.n_grid):
        d = dn_of(plan.truncation, n)
        t0 = time.perf_counter()
        try:
            values = v_draws(plan.model, n, d, m, seed, kind, ni, ROLE_DATA, workers=workers)
            law = plan.model.limit(limit_length(plan, d))
            ref = sample_weighted_chisquare(law, m, stream(seed, kind, ni, ROLE_LIMIT))
            ks = ks_distance(values, ref)
        except Exception as exc:  # noqa: BLE001
            failed = True
            cells.append(_failed_cell(len(cells), n, d, "ks", exc))
            _notify(progress, cells[-1])
            continue
        wall = time.perf_counter() - t0
        cells.append(_cell(len(cells), n, d, "ks", ks, _ks_stderr(m, m), wall, extra={
            "limit_weights": int(law.lambdas.size),
            "limit_tail": law.truncation_tail,
            "limit_trace": law.trace,
            "mean_v": float(values.mean()),
        }))
        _notify(progress, cells[-1])
    return ExperimentReport(plan.to_dict(), cells, failed=failed)


def run_diagnostics_sweep(plan: ExperimentPlan, workers: int = 1, progress=None) -> ExperimentReport:
    """Mean Lindeberg terms and trace sums over ``m_datasets`` samples per ``n``."""
    _check_kind(plan, "diagnostics_sweep")
    kind = KINDS["diagnostics_sweep"]
    cells, failed = [], False
    seed = plan.master_seed
    grid = [float(e) for e in plan.epsilon_grid]
    for ni, n in enumerate(plan.n_grid):
        d = dn_of(plan.truncation, n)
        t0 = time.perf_counter()
        try:
            l = d if plan.l_projection is None else min(plan.l_projection, d)

            def one(i):
                x = generate_sample(plan.model, n, d, stream(seed, kind, ni, ROLE_DATA, i))
                rep = full_report(x, grid, l_projection=l, cov_pairs=[])
                return [rep.trace_sum] + [rep.lindeberg[e] for e in grid]

            rows = np.array(_map(one, range(plan.m_datasets), workers))
        except Exception as exc:  # noqa: BLE001
            failed = True
            cells.append(_failed_cell(len(cells), n, d, "trace_sum", exc))
            _notify(progress, cells[-1])
            continue
        wall = time.perf_counter() - t0
        m = rows.shape[0]

        def se(col):
            return float(col.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0

        lind = rows[:, 1:]
        cells.append(_cell(len(cells), n, d, "trace_sum", float(rows[:, 0].mean()), se(rows[:, 0]), wall, extra={
            "trace_target": float(plan.model.spectrum(d).sum()),
            "l_projection": l,
            "lindeberg_mean": {repr(e): float(lind[:, j].mean()) for j, e in enumerate(grid)},
            "lindeberg_stderr": {repr(e): se(lind[:, j]) for j, e in enumerate(grid)},
        }))
        _notify(progress, cells[-1])
    return ExperimentReport(plan.to_dict(), cells, failed=failed)


RUNNERS = {
    "level_study": run_level_study,
    "bootstrap_ks": run_bootstrap_ks,
    "limit_law": run_limit_law,
    "diagnostics_sweep": run_diagnostics_sweep,
}


def run_plan(plan: ExperimentPlan, workers: int = 1, progress=None) -> ExperimentReport:
    return RUNNERS[plan.kind](plan, workers=workers, progress=progress)


def _check_kind(plan: ExperimentPlan, kind: str) -> None:
    if plan.kind != kind:
        raise PlanError(f"kind: expected {kind!r}, got {plan.kind!r}")


def _notify(progress, cell: dict) -> None:
    if progress is not None:
        progress(cell)


def strip_timing(report: dict) -> dict:
    """Copy of a report dict without wall-clock fields, for reproducibility checks."""
    out = json.loads(json.dumps(report))
    for cell in out["cells"]:
        cell.pop("wall_time", None)
    return out
