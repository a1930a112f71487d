"""Scenario grid runner: sample sizes x prevalences x strategies x models.

Every cell simulates a fresh panel, cross-validates one model under one
imbalance strategy, and aggregates over replicates. Cell seeds derive from
the base seed and the scenario descriptor alone, so reports are identical
whatever the worker count or execution order.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from threading import Lock
from typing import Optional

import numpy as np

from .balance import ResamplePlan
from .crossval import ModelSpec, cross_validate, kfold
from .simgen import SimConfig, config_from_dict, panel_to_dataset, simulate_panel

STRATEGY_NAMES = ("smote", "raw", "weighted", "anomaly")


@dataclass(frozen=True)
class ModelEntry:
    """A benchmark model: its spec plus an optional row cap (None = unlimited)."""

    spec: ModelSpec
    max_rows: Optional[int] = None


def default_models() -> dict:
    """The shipped model roster; SVM and the angle-based detector carry the
    2,000-row caps that make the full grid tractable."""
    return {
        "glm": ModelEntry(ModelSpec("glm")),
        "lasso": ModelEntry(ModelSpec("lasso")),
        "ridge": ModelEntry(ModelSpec("ridge")),
        "elastic": ModelEntry(ModelSpec("elastic")),
        "random_forest": ModelEntry(ModelSpec("random_forest")),
        "gbt": ModelEntry(ModelSpec("gbt")),
        "svm": ModelEntry(ModelSpec("svm"), max_rows=2_000),
        "lof": ModelEntry(ModelSpec("lof", {"k": 100})),
        "iforest": ModelEntry(ModelSpec("iforest")),
        "abof": ModelEntry(ModelSpec("abof"), max_rows=2_000),
        "knn": ModelEntry(ModelSpec("knn", {"k": 20})),
        "mahalanobis": ModelEntry(ModelSpec("mahalanobis")),
        "autoencoder": ModelEntry(ModelSpec("autoencoder")),
    }


@dataclass(frozen=True)
class ScenarioConfig:
    sample_sizes: tuple = (800, 10_000)
    prevalences: tuple = (0.5, 0.1, 0.05, 0.01)
    strategies: tuple = STRATEGY_NAMES
    models: dict = field(default_factory=default_models)
    replicates: int = 3
    base_seed: int = 42
    n_years: int = 4
    k_folds: int = 5
    sim_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.sample_sizes or not self.prevalences or not self.strategies:
            raise ValueError("sample_sizes, prevalences and strategies must be non-empty")
        for rho in self.prevalences:
            if not 0 < rho <= 1:
                raise ValueError("prevalences must be in (0, 1]")
        for s in self.strategies:
            if s not in STRATEGY_NAMES:
                raise ValueError(f"unknown strategy {s!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


@dataclass(frozen=True)
class ScenarioReport:
    sample_size: int
    prevalence: float
    strategy: str
    model: str
    replicates: int
    seeds: tuple
    ppv: Optional[float]
    sensitivity: Optional[float]
    f1: Optional[float]
    auc: Optional[float]
    tp: int
    fp: int
    tn: int
    fn: int
    runtime_seconds: float
    status: str


def _derive_seed(*parts) -> int:
    digest = hashlib.sha256("|".join(repr(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _strategy_models(config: ScenarioConfig, strategy: str) -> list:
    anomaly = strategy == "anomaly"
    return [
        (name, entry)
        for name, entry in config.models.items()
        if entry.spec.is_anomaly == anomaly
    ]


class _PanelCache:
    def __init__(self, config: ScenarioConfig):
        self.config = config
        self._lock = Lock()
        self._panels = {}

    def dataset(self, n: int, rho: float, replicate: int):
        key = (n, rho, replicate)
        with self._lock:
            if key not in self._panels:
                seed = _derive_seed(self.config.base_seed, "panel", n, rho, replicate)
                sim = dict(self.config.sim_overrides)
                sim.update(
                    n_herds=n,
                    n_years=self.config.n_years,
                    target_prevalence=rho,
                    seed=seed,
                )
                panel = simulate_panel(config_from_dict(sim))
                self._panels[key] = (seed, panel_to_dataset(panel))
            return self._panels[key]


def _run_cell(config: ScenarioConfig, cache: _PanelCache, n: int, rho: float,
              strategy: str, model_name: str, entry: ModelEntry) -> ScenarioReport:
    start = time.perf_counter()
    seeds = []
    sums = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    metric_lists = {"ppv": [], "sensitivity": [], "f1": [], "auc": []}
    status = "ok"
    try:
        for rep in range(config.replicates):
            panel_seed, ds = cache.dataset(n, rho, rep)
            seeds.append(panel_seed)
            if entry.max_rows is not None and ds.n_rows > entry.max_rows:
                status = "skipped: size cap"
                break
            plan = kfold(
                ds.labels,
                k=config.k_folds,
                stratified=True,
                seed=_derive_seed(config.base_seed, "folds", n, rho, rep),
            )
            if strategy == "smote":
                cv_strategy = "resample"
                rplan = ResamplePlan(
                    mode="under_then_smote",
                    target_ratio=1.0,
                    k_neighbors=5,
                    seed=_derive_seed(config.base_seed, "plan", n, rho, rep),
                )
            else:
                cv_strategy = "raw" if strategy in ("raw", "anomaly") else "weighted"
                rplan = None
            result = cross_validate(
                ds,
                entry.spec,
                strategy=cv_strategy,
                fold_plan=plan,
                resample_plan=rplan,
                seed=_derive_seed(config.base_seed, "model", n, rho, strategy, model_name, rep),
            )
            sums["tp"] += result.confusion.tp
            sums["fp"] += result.confusion.fp
            sums["tn"] += result.confusion.tn
            sums["fn"] += result.confusion.fn
            for key in ("ppv", "sensitivity", "f1"):
                metric_lists[key].append(getattr(result.metrics, key))
            metric_lists["auc"].append(result.auc)
    except Exception as exc:  # cell failures never abort the grid
        status = f"error: {exc}"

    def mean_defined(values):
        defined = [v for v in values if v is not None]
        return float(np.mean(defined)) if defined else None

    return ScenarioReport(
        sample_size=n,
        prevalence=rho,
        strategy=strategy,
        model=model_name,
        replicates=config.replicates,
        seeds=tuple(seeds),
        ppv=mean_defined(metric_lists["ppv"]),
        sensitivity=mean_defined(metric_lists["sensitivity"]),
        f1=mean_defined(metric_lists["f1"]),
        auc=mean_defined(metric_lists["auc"]),
        tp=sums["tp"],
        fp=sums["fp"],
        tn=sums["tn"],
        fn=sums["fn"],
        runtime_seconds=time.perf_counter() - start,
        status=status,
    )


def run_scenarios(config: ScenarioConfig, workers: int = 1) -> list:
    """Run the whole grid; results are ordered by the config's own list order."""
    cache = _PanelCache(config)
    cells = []
    for n in config.sample_sizes:
        for rho in config.prevalences:
            for strategy in config.strategies:
                for model_name, entry in _strategy_models(config, strategy):
                    cells.append((n, rho, strategy, model_name, entry))

    if workers <= 1:
        return [_run_cell(config, cache, *cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_cell, config, cache, *cell) for cell in cells]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# report emission

def _fmt(v: Optional[float]) -> str:
    return "-" if v is None else f"{v:.3f}"


def _report_dict(r: ScenarioReport) -> dict:
    return {
        "sample_size": r.sample_size,
        "prevalence": r.prevalence,
        "strategy": r.strategy,
        "model": r.model,
        "replicates": r.replicates,
        "seeds": list(r.seeds),
        "ppv": r.ppv,
        "sensitivity": r.sensitivity,
        "f1": r.f1,
        "auc": r.auc,
        "tp": r.tp,
        "fp": r.fp,
        "tn": r.tn,
        "fn": r.fn,
        "runtime_seconds": r.runtime_seconds,
        "status": r.status,
    }


def report_from_dict(d: dict) -> ScenarioReport:
    d = dict(d)
    d["seeds"] = tuple(d["seeds"])
    return ScenarioReport(**d)


def _emit_csv(reports, path):
    import csv as _csv

    cols = [
        "sample_size", "prevalence", "strategy", "model", "replicates",
        "ppv", "sensitivity", "f1", "auc", "tp", "fp", "tn", "fn",
        "runtime_seconds", "status", "seeds",
    ]
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(cols)
        for r in reports:
            d = _report_dict(r)
            d["seeds"] = ";".join(str(s) for s in r.seeds)
            writer.writerow([d[c] for c in cols])


def _bold_best(rows, col):
    """Indices of rows attaining the maximum of a metric column (ties all bold)."""
    defined = [(i, row[col]) for i, row in enumerate(rows) if row[col] is not None]
    if not defined:
        return set()
    best = max(v for _, v in defined)
    return {i for i, v in defined if v == best}


def _emit_markdown(reports, path):
    groups = {}
    for r in reports:
        groups.setdefault((r.strategy, r.prevalence), {}).setdefault(r.model, {})[
            r.sample_size
        ] = r
    lines = ["# Benchmark results", ""]
    for (strategy, rho), models in groups.items():
        sizes = sorted({s for m in models.values() for s in m})
        lines.append(f"## strategy: {strategy}, positive share: {rho:g}")
        lines.append("")
        header = ["Model"]
        for n in sizes:
            header += [f"PPV (n={n})", f"Sens (n={n})", f"F1 (n={n})", f"AUC (n={n})"]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        model_names = list(models)
        per_size_best = {}
        for n in sizes:
            rows = [
                {"auc": models[m].get(n).auc if models[m].get(n) else None,
                 "sensitivity": models[m].get(n).sensitivity if models[m].get(n) else None}
                for m in model_names
            ]
            per_size_best[n] = {
                "auc": _bold_best(rows, "auc"),
                "sensitivity": _bold_best(rows, "sensitivity"),
            }
        for i, m in enumerate(model_names):
            cells = [m]
            for n in sizes:
                r = models[m].get(n)
                if r is None:
                    cells += ["", "", "", ""]
                    continue
                if r.status != "ok":
                    cells += [r.status, "", "", ""]
                    continue
                sens = _fmt(r.sensitivity)
                if i in per_size_best[n]["sensitivity"]:
                    sens = f"**{sens}**"
                auc = _fmt(r.auc)
                if i in per_size_best[n]["auc"]:
                    auc = f"**{auc}**"
                cells += [_fmt(r.ppv), sens, _fmt(r.f1), auc]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))


def _emit_json(reports, path, config_echo=None):
    payload = {
        "config": config_echo,
        "reports": [_report_dict(r) for r in reports],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)


def reports_from_json(path):
    with open(path) as fh:
        payload = json.load(fh)
    return payload.get("config"), [report_from_dict(d) for d in payload["reports"]]


def emit_report(reports, format: str, out_path, config_echo=None) -> list:
    """Write the reports in one format; returns the paths written."""
    if not reports:
        raise ValueError("no reports to emit")
    if format == "csv":
        _emit_csv(reports, out_path)
    elif format in ("md", "markdown"):
        _emit_markdown(reports, out_path)
    elif format == "json":
        _emit_json(reports, out_path, config_echo=config_echo)
    else:
        raise ValueError(f"unknown format {format!r}")
    return [out_path]


def config_echo_dict(config: ScenarioConfig) -> dict:
    return {
        "sample_sizes": list(config.sample_sizes),
        "prevalences": list(config.prevalences),
        "strategies": list(config.strategies),
        "replicates": config.replicates,
        "base_seed": config.base_seed,
        "n_years": config.n_years,
        "k_folds": config.k_folds,
        "sim_overrides": config.sim_overrides,
        "models": {
            name: {
                "kind": entry.spec.kind,
                "params": entry.spec.params,
                "max_rows": entry.max_rows,
            }
            for name, entry in config.models.items()
        },
    }


def scenario_config_from_dict(d: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a JSON-style dict; absent fields keep defaults."""
    d = dict(d)
    if "models" in d and d["models"] is not None:
        models = {}
        for name, md in d["models"].items():
            models[name] = ModelEntry(
                spec=ModelSpec(md["kind"], md.get("params", {})),
                max_rows=md.get("max_rows"),
            )
        d["models"] = models
    for key in ("sample_sizes", "prevalences", "strategies"):
        if key in d:
            d[key] = tuple(d[key])
    return ScenarioConfig(**d)


def resolve_workers(cli_value: Optional[int]) -> int:
    """BVDBENCH_WORKERS overrides the command-line worker count."""
    env = os.environ.get("BVDBENCH_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, cli_value or 1)
