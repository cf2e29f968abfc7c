"""End-to-end pipeline: cohort -> risk scores -> copula fit/test -> strata.

A single JSON config drives the run; all randomness flows from the seeds it
contains, so identical configs reproduce identical reports byte for byte.
Stage failures re-raise with a stage tag so the CLI can map them to exit
codes.
"""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .cohort import CohortTable, EndpointVector, ViewSpec, build_endpoint, filter_cohort, load_cohort, split_views, variance_filter
from .copulas import FAMILIES, fit_family, kendall_tau, pseudo_observations
from .errors import ConfigError, FuseError
from .folds import stratified_kfold
from .gof import GofResult, parametric_bootstrap, select_best_copula
from .metrics import roc_auc, roc_points
from .scoring import CVRecord, MODEL_FAMILIES, ModelSpec, oof_scores, select_best_model
from .survival import StrataKMResult, StratumAssignment, joint_strata, strata_km
from . import svgplot

STAGES = ("load", "endpoint", "views", "scores", "copula", "gof", "strata")

DEFAULT_MODELS = {
    "elastic_net_lr": {"alpha": 0.5, "lam": "auto", "grid_points": 10, "inner_folds": 3,
                       "max_iter": 10000, "tol": 1e-8},
    "random_forest": {"n_trees": 300, "max_depth": None, "mtry": None, "min_leaf": 5},
    "gradient_boosting": {"n_rounds": 200, "learning_rate": 0.1, "max_depth": 3},
}

TABLE_FILES = ("scores.csv", "model_auc.csv", "copula_fit.json", "gof.json",
               "strata.csv", "km_curves.csv", "manifest.json")
PLOT_FILES = ("roc.svg", "score_hist.svg", "score_scatter.svg", "copula_heat.svg",
              "copula_contours.svg", "km.svg")


@dataclass(frozen=True)
class PipelineConfig:
    input_csv: str
    output_dir: str
    view_spec: ViewSpec = ViewSpec()
    horizon_months: float = 60.0
    genomic_top_k: int = 50
    cv_k: int = 5
    cv_seed: int = 0
    models: dict = field(default_factory=lambda: json.loads(json.dumps(DEFAULT_MODELS)))
    copula_families: tuple = FAMILIES
    copula_b: int = 1000
    copula_m: int | None = None
    copula_seed: int = 1
    copula_refit: bool = True
    strata_min_size: int = 10
    status_column: str | None = None

    @staticmethod
    def from_dict(d: dict) -> "PipelineConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        for key in ("input_csv", "output_dir"):
            if key not in d:
                raise ConfigError(f"config is missing required key {key!r}")
        cv = d.get("cv", {})
        k = int(cv.get("k", 5))
        if k < 2:
            raise ConfigError("cv.k must be at least 2")
        cop = d.get("copula", {})
        b = int(cop.get("B", 1000))
        if b < 1:
            raise ConfigError("copula.B must be at least 1")
        families = tuple(cop.get("families", FAMILIES))
        for fam in families:
            if fam not in FAMILIES:
                raise ConfigError(f"unknown copula family {fam!r}")
        models = json.loads(json.dumps(DEFAULT_MODELS))
        for fam, hp in d.get("models", {}).items():
            if fam not in MODEL_FAMILIES:
                raise ConfigError(f"unknown model family {fam!r}")
            models[fam].update(hp)
        m = cop.get("m")
        min_size = int(d.get("strata", {}).get("min_size", 10))
        if min_size < 1:
            raise ConfigError("strata.min_size must be positive")
        top_k = int(d.get("genomic_top_k", 50))
        if top_k < 1:
            raise ConfigError("genomic_top_k must be positive")
        return PipelineConfig(
            input_csv=str(d["input_csv"]),
            output_dir=str(d["output_dir"]),
            view_spec=ViewSpec.from_dict(d.get("view_spec", {})),
            horizon_months=float(d.get("horizon_months", 60.0)),
            genomic_top_k=top_k,
            cv_k=k,
            cv_seed=int(cv.get("seed", 0)),
            models=models,
            copula_families=families,
            copula_b=b,
            copula_m=None if m is None else int(m),
            copula_seed=int(cop.get("seed", 1)),
            copula_refit=bool(cop.get("refit", True)),
            strata_min_size=min_size,
            status_column=d.get("endpoint", {}).get("status_column"),
        )

    def to_dict(self) -> dict:
        return {
            "input_csv": self.input_csv,
            "output_dir": self.output_dir,
            "view_spec": {
                "id_column": self.view_spec.id_column,
                "clinical_columns": list(self.view_spec.clinical_columns),
                "survival_columns": list(self.view_spec.survival_columns),
            },
            "horizon_months": self.horizon_months,
            "genomic_top_k": self.genomic_top_k,
            "cv": {"k": self.cv_k, "seed": self.cv_seed},
            "models": self.models,
            "copula": {
                "families": list(self.copula_families),
                "B": self.copula_b,
                "m": self.copula_m,
                "seed": self.copula_seed,
                "refit": self.copula_refit,
            },
            "strata": {"min_size": self.strata_min_size},
            "endpoint": {"status_column": self.status_column},
        }


@dataclass
class ReportBundle:
    config: PipelineConfig
    n_loaded: int = 0
    n_analytic: int = 0
    patient_ids: list = field(default_factory=list)
    endpoint: EndpointVector | None = None
    cv_records: list = field(default_factory=list)
    oof: dict = field(default_factory=dict)  # (view, family) -> scores
    best: dict = field(default_factory=dict)  # view -> CVRecord
    p_clin: np.ndarray | None = None
    p_gen: np.ndarray | None = None
    pseudo_u: np.ndarray | None = None
    pseudo_v: np.ndarray | None = None
    tau: float | None = None
    copula_fits: list = field(default_factory=list)
    gof_results: list = field(default_factory=list)
    best_copula: GofResult | None = None
    strata: StratumAssignment | None = None
    strata_result: StrataKMResult | None = None
    written_files: list = field(default_factory=list)
    stages_run: list = field(default_factory=list)


class _Stage:
    """Tags any error raised inside with the stage name, same error class."""

    def __init__(self, name, bundle):
        self.name = name
        self.bundle = bundle

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, FuseError) and not str(exc).startswith("[stage"):
            raise exc_type(f"[stage {self.name}] {exc}") from exc
        if exc is None:
            self.bundle.stages_run.append(self.name)
        return False


def _seed_from(*parts) -> int:
    import hashlib

    digest = hashlib.blake2b(":".join(str(p) for p in parts).encode(), digest_size=4).digest()
    return int.from_bytes(digest, "big")


def run_pipeline(config: PipelineConfig, stop_after: str | None = None, emit: bool = True) -> ReportBundle:
    """Execute the pipeline (optionally a prefix) and write the report files."""
    if stop_after is not None and stop_after not in STAGES:
        raise ConfigError(f"unknown stage {stop_after!r}; stages are {', '.join(STAGES)}")
    bundle = ReportBundle(config=config)

    def should_stop(stage):
        return stop_after is not None and STAGES.index(stage) >= STAGES.index(stop_after)

    with _Stage("load", bundle):
        table = load_cohort(config.input_csv)
        bundle.n_loaded = table.n_rows
    if not should_stop("load"):
        with _Stage("endpoint", bundle):
            endpoint = build_endpoint(table, horizon=config.horizon_months, status_column=config.status_column)
            table, endpoint = filter_cohort(table, endpoint)
            bundle.endpoint = endpoint
            bundle.n_analytic = table.n_rows
            id_col = table.column(config.view_spec.id_column)
            bundle.patient_ids = [str(v) for v in id_col.values]
        if not should_stop("endpoint"):
            with _Stage("views", bundle):
                clinical, genomic = split_views(table, config.view_spec)
                genomic = variance_filter(genomic, k=config.genomic_top_k)
            if not should_stop("views"):
                _run_scores(bundle, clinical, genomic, endpoint)
                if not should_stop("scores"):
                    with _Stage("copula", bundle):
                        bundle.pseudo_u = pseudo_observations(bundle.p_clin)
                        bundle.pseudo_v = pseudo_observations(bundle.p_gen)
                        bundle.tau = kendall_tau(bundle.pseudo_u, bundle.pseudo_v)
                        bundle.copula_fits = [fit_family(f, bundle.tau) for f in config.copula_families]
                    if not should_stop("copula"):
                        with _Stage("gof", bundle):
                            bundle.gof_results = [
                                parametric_bootstrap(
                                    bundle.pseudo_u,
                                    bundle.pseudo_v,
                                    fam,
                                    n_boot=config.copula_b,
                                    replicate_size=config.copula_m,
                                    seed=config.copula_seed,
                                    refit=config.copula_refit,
                                )
                                for fam in config.copula_families
                            ]
                            bundle.best_copula = select_best_copula(bundle.gof_results)
                        if not should_stop("gof"):
                            with _Stage("strata", bundle):
                                bundle.strata = joint_strata(bundle.p_clin, bundle.p_gen)
                                bundle.strata_result = strata_km(
                                    bundle.strata,
                                    endpoint.t_months,
                                    endpoint.delta.astype(int),
                                    min_size=config.strata_min_size,
                                )
    if emit:
        out_dir = Path(config.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        emit_tables(bundle, out_dir)
        render_plots(bundle, out_dir)
    return bundle


def _run_scores(bundle: ReportBundle, clinical: CohortTable, genomic: CohortTable, endpoint: EndpointVector):
    config = bundle.config
    with _Stage("scores", bundle):
        y = endpoint.y.astype(int)
        folds = stratified_kfold(y, k=config.cv_k, seed=config.cv_seed, row_ids=bundle.patient_ids)
        views = {"clinical": clinical, "genomic": genomic}
        for view_name, view in views.items():
            records = []
            for family in MODEL_FAMILIES:
                spec = ModelSpec(family, config.models[family], _seed_from(config.cv_seed, view_name, family))
                scores = oof_scores(view, y, spec, folds, row_ids=bundle.patient_ids)
                bundle.oof[(view_name, family)] = scores
                records.append(CVRecord(view_name, spec, roc_auc(scores, y)))
            bundle.cv_records.extend(records)
            bundle.best[view_name] = select_best_model(records)
        bundle.p_clin = bundle.oof[("clinical", bundle.best["clinical"].spec.family)]
        bundle.p_gen = bundle.oof[("genomic", bundle.best["genomic"].spec.family)]


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit_tables(bundle: ReportBundle, out_dir) -> list:
    """Write the machine-readable report files for everything computed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    if bundle.p_clin is not None:
        ep = bundle.endpoint
        rows = [
            [pid, str(pc), str(pg), int(yy), str(tt), int(dd)]
            for pid, pc, pg, yy, tt, dd in zip(
                bundle.patient_ids, bundle.p_clin, bundle.p_gen, ep.y.astype(int), ep.t_months, ep.delta.astype(int)
            )
        ]
        path = out_dir / "scores.csv"
        _write_csv(path, ["patient_id", "p_clin", "p_gen", "y", "t_months", "event"], rows)
        written.append(path)

        rows = [[r.view, r.spec.family, str(r.auc)] for r in bundle.cv_records]
        path = out_dir / "model_auc.csv"
        _write_csv(path, ["view", "model", "auc"], rows)
        written.append(path)

    if bundle.copula_fits:
        path = out_dir / "copula_fit.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"tau": bundle.tau, "fits": [m.to_dict() for m in bundle.copula_fits]}, fh, indent=2)
        written.append(path)

    if bundle.gof_results:
        path = out_dir / "gof.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "results": [r.to_dict() for r in bundle.gof_results],
                    "selected": bundle.best_copula.family,
                },
                fh,
                indent=2,
            )
        written.append(path)

    if bundle.strata is not None:
        path = out_dir / "strata.csv"
        _write_csv(
            path,
            ["patient_id", "stratum"],
            [[pid, lab] for pid, lab in zip(bundle.patient_ids, bundle.strata.labels)],
        )
        written.append(path)

        rows = []
        for label, curve in bundle.strata_result.curves.items():
            for t, s, d, r in zip(curve.times, curve.survival, curve.events, curve.at_risk):
                rows.append([label, str(float(t)), str(float(s)), int(d), int(r), curve.n_start])
        path = out_dir / "km_curves.csv"
        _write_csv(path, ["stratum", "t", "S_hat", "d", "r", "n_start"], rows)
        written.append(path)

    manifest = {
        "tool": {"name": "riskfuse", "version": __version__},
        "environment": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "config": bundle.config.to_dict(),
        "stages_run": bundle.stages_run,
        "rows_loaded": bundle.n_loaded,
        "rows_analytic": bundle.n_analytic,
    }
    if bundle.best:
        manifest["selected_models"] = {view: rec.spec.family for view, rec in bundle.best.items()}
        manifest["cv_auc"] = {f"{r.view}:{r.spec.family}": r.auc for r in bundle.cv_records}
    if bundle.tau is not None:
        manifest["kendall_tau"] = bundle.tau
    if bundle.best_copula is not None:
        manifest["selected_copula"] = bundle.best_copula.family
        manifest["gof_p_values"] = {r.family: r.p_value for r in bundle.gof_results}
    if bundle.strata is not None:
        manifest["strata"] = {
            "median_clin": bundle.strata.median_clin,
            "median_gen": bundle.strata.median_gen,
            "sizes": bundle.strata_result.sizes,
            "omitted": bundle.strata_result.omitted,
        }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    written.append(path)

    bundle.written_files.extend(str(p) for p in written)
    return written


def render_plots(bundle: ReportBundle, out_dir) -> list:
    """Write the SVG figures for everything computed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if bundle.p_clin is not None:
        y = bundle.endpoint.y.astype(int)
        curves = {}
        for view in ("clinical", "genomic"):
            scores = bundle.p_clin if view == "clinical" else bundle.p_gen
            fpr, tpr = roc_points(scores, y)
            curves[view] = (fpr, tpr, bundle.best[view].auc)
        path = out_dir / "roc.svg"
        svgplot.render_roc(path, curves)
        written.append(path)

        path = out_dir / "score_hist.svg"
        svgplot.render_score_hist(path, bundle.p_clin, bundle.p_gen)
        written.append(path)

        path = out_dir / "score_scatter.svg"
        svgplot.render_scatter(path, bundle.p_clin, bundle.p_gen, y)
        written.append(path)

    if bundle.best_copula is not None:
        model = bundle.best_copula.model
        path = out_dir / "copula_heat.svg"
        svgplot.render_copula_heat(path, bundle.pseudo_u, bundle.pseudo_v, model)
        written.append(path)
        path = out_dir / "copula_contours.svg"
        svgplot.render_copula_contours(path, bundle.pseudo_u, bundle.pseudo_v, model)
        written.append(path)

    if bundle.strata_result is not None:
        path = out_dir / "km.svg"
        svgplot.render_km(path, bundle.strata_result.curves, bundle.strata_result.omitted)
        written.append(path)

    bundle.written_files.extend(str(p) for p in written)
    return written
