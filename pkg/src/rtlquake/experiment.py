"""Experiment pipeline binding catalogs, features, models, and metrics:
ingest or synthesize a catalog, build the lagged RTL feature matrix over
the hyperparameter grid, split chronologically, optionally resample the
training rows, normalize on training statistics, fit every configured
model per grid cell, and emit the report table plus audit data.
"""

from __future__ import annotations

import inspect
import json
import math
import os

import numpy as np

from .catalog import Catalog, CatalogError, SpatialIndex, parse_catalog, write_catalog
from .config import ConfigError, ExperimentConfig
from .dataset import (
    BuildReport,
    Dataset,
    FeatureNormalizer,
    build_dataset,
    chronological_split,
    feature_name,
    oversample,
    undersample,
)
from .metrics import error_row, evaluate, write_report_csv
from .models import MODEL_KINDS, save_model
from .rtl import RtlConfig
from .synth import GrParams, OuParams, SynthSpec, generate_catalog


class DataError(RuntimeError):
    """Missing or unusable input data."""


class DegenerateError(RuntimeError):
    """The experiment produced no evaluable (cell, model) result."""


def synth_spec_from_config(cfg: ExperimentConfig) -> SynthSpec:
    s = cfg.synth
    return SynthSpec(
        duration_days=s.duration_days,
        background_rate=s.background_rate,
        gr=GrParams(b=s.gr_b, m_min=s.gr_m_min, a=s.gr_a),
        ou=OuParams(c1=s.omori_c1, c2=s.omori_c2, p=s.omori_p),
        region=(s.lat_min, s.lat_max, s.lon_min, s.lon_max),
        aftershock_trigger_mag=s.aftershock_trigger_mag,
        cluster_sigma_km=s.cluster_sigma_km,
        generations=int(s.generations),
        seed=cfg.seed,
    )


def run_synth(cfg: ExperimentConfig) -> tuple[str, int]:
    os.makedirs(cfg.out_dir, exist_ok=True)
    catalog = generate_catalog(synth_spec_from_config(cfg))
    path = os.path.join(cfg.out_dir, "catalog.csv")
    write_catalog(catalog, path)
    return path, len(catalog)


def _load_catalog(cfg: ExperimentConfig) -> Catalog:
    if not cfg.catalog_path:
        raise DataError("no catalog configured ([data] catalog = path)")
    if not os.path.exists(cfg.catalog_path):
        raise DataError(f"catalog file not found: {cfg.catalog_path}")
    try:
        return parse_catalog(cfg.catalog_path)
    except CatalogError as exc:
        raise DataError(f"{cfg.catalog_path}: {exc}") from exc


def cell_configs(cfg: ExperimentConfig) -> list[RtlConfig]:
    return [
        RtlConfig(
            r0_km=r0,
            t0_days=t0,
            cutoff_factor=cfg.cutoff_factor,
            min_mag=cfg.feature_min_mag,
            min_r_km=cfg.min_r_km,
        )
        for r0, t0 in cfg.cells()
    ]


def build_features(cfg: ExperimentConfig, catalog: Catalog) -> tuple[Dataset, BuildReport]:
    """Feature matrix over every grid cell, one index per distinct radius."""
    configs = cell_configs(cfg)
    if len(catalog) == 0:
        raise DataError("catalog is empty")
    # one shared index sized for the largest query radius keeps every
    # cylinder query exact; radius never exceeds cutoff * max(r0)
    cell_km = max(max(c.cutoff_factor * c.r0_km for c in configs), cfg.label_rule.r_c_km)
    index = SpatialIndex(catalog, cell_size_km=cell_km)
    try:
        return build_dataset(
            catalog,
            index,
            configs,
            n_lags=cfg.n_lags,
            lag_step_days=cfg.lag_step_days,
            rule=cfg.label_rule,
            sample_min_mag=cfg.sample_min_mag,
        )
    except ValueError as exc:
        raise DataError(str(exc)) from exc


def run_features(cfg: ExperimentConfig) -> tuple[str, BuildReport]:
    if not cfg.aggregate and len(cfg.cells()) != 1:
        raise ConfigError(
            "single-cell feature mode needs grids of length 1; "
            "set [features] aggregate = true for the full grid"
        )
    catalog = _load_catalog(cfg)
    ds, report = build_features(cfg, catalog)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "dataset.csv")
    ds.to_csv(path)
    return path, report


def _make_model(kind: str, params: dict, seed: int, threshold: float):
    cls = MODEL_KINDS[kind]
    kwargs = dict(params)
    accepted = inspect.signature(cls.__init__).parameters
    if "seed" in accepted:
        kwargs.setdefault("seed", seed)
    kwargs.setdefault("decision_threshold", threshold)
    return cls(**kwargs)


def _histogram_rows(values: np.ndarray, n_bins: int, bin_width: float | None = None):
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        return []
    if bin_width is not None:
        lo = math.floor(values.min() / bin_width) * bin_width
        hi = math.ceil(values.max() / bin_width) * bin_width
        edges = np.arange(lo, hi + bin_width / 2, bin_width)
        if len(edges) < 2:
            edges = np.array([lo, lo + bin_width])
    else:
        edges = np.linspace(values.min(), values.max(), n_bins + 1)
        if edges[0] == edges[-1]:
            edges = np.array([edges[0], edges[0] + 1.0])
    counts, edges = np.histogram(values, bins=edges)
    return [
        (repr(float(edges[i])), repr(float(edges[i + 1])), str(int(counts[i])))
        for i in range(len(counts))
    ]


def _write_histogram(path: str, rows) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "count"])
        writer.writerows(rows)


def run_train_eval(cfg: ExperimentConfig) -> tuple[str, list]:
    """Train/evaluate every (grid cell, model) pair; returns the report
    path and the in-memory rows. Per-cell failures become error rows and
    the run continues; a run with no successful row raises DegenerateError
    after the report is written.
    """
    os.makedirs(cfg.out_dir, exist_ok=True)
    catalog = None
    if cfg.dataset_path:
        if not os.path.exists(cfg.dataset_path):
            raise DataError(f"dataset file not found: {cfg.dataset_path}")
        full = Dataset.from_csv(cfg.dataset_path)
        build_report = None
    else:
        catalog = _load_catalog(cfg)
        full, build_report = build_features(cfg, catalog)

    configs = cell_configs(cfg)
    wanted = [feature_name(c, lag) for c in configs for lag in range(cfg.n_lags)]
    try:
        full = full.select_columns(wanted)
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    try:
        train_full, test_full = chronological_split(full, cfg.train_fraction)
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    if cfg.aggregate:
        blocks = [("aggregate", wanted)]
    else:
        blocks = [
            (c.tag, [feature_name(c, lag) for lag in range(cfg.n_lags)]) for c in configs
        ]

    models_dir = os.path.join(cfg.out_dir, "models")
    norms_dir = os.path.join(cfg.out_dir, "normalizers")
    os.makedirs(models_dir, exist_ok=True)
    os.makedirs(norms_dir, exist_ok=True)

    rows: list = []
    cell_audit = []
    rtl_hist_rows = None
    n_ok = 0
    for tag, names in blocks:
        train = train_full.select_columns(names)
        test = test_full.select_columns(names)
        status = {"cell": tag, "train_counts": dict(zip(("neg", "pos"), train.class_counts()))}
        try:
            if cfg.resampling == "over":
                train = oversample(train, cfg.seed)
            elif cfg.resampling == "under":
                train = undersample(train, cfg.seed)
            status["train_counts_after_resampling"] = dict(
                zip(("neg", "pos"), train.class_counts())
            )
            norm = FeatureNormalizer(mode=cfg.norm_mode, window=cfg.norm_window)
            x_train = norm.fit_transform(train.features)
            x_test = norm.transform(test.features)
            norm.to_csv(os.path.join(norms_dir, f"{tag}.csv"), names)
        except ValueError as exc:
            status["error"] = str(exc)
            cell_audit.append(status)
            rows.extend(error_row(tag, kind) for kind in cfg.models)
            continue

        if rtl_hist_rows is None:
            lag0 = np.concatenate([x_train[:, 0], x_test[:, 0]])
            rtl_hist_rows = _histogram_rows(lag0, n_bins=50)

        cell_errors = {}
        for kind in cfg.models:
            try:
                model = _make_model(
                    kind, cfg.model_params.get(kind, {}), cfg.seed, cfg.decision_threshold
                )
                model.fit(x_train, train.labels)
                scores = model.predict_proba(x_test)[:, 1]
                report = evaluate(
                    scores,
                    test.labels,
                    threshold=cfg.decision_threshold,
                    config_tag=tag,
                    model_kind=kind,
                )
                rows.append(report)
                n_ok += 1
                save_model(model, os.path.join(models_dir, f"{tag}__{kind}.json"))
            except ValueError as exc:
                cell_errors[kind] = str(exc)
                rows.append(error_row(tag, kind))
        if cell_errors:
            status["model_errors"] = cell_errors
        cell_audit.append(status)

    report_path = os.path.join(cfg.out_dir, "report.csv")
    write_report_csv(report_path, rows)

    if catalog is not None:
        _write_histogram(
            os.path.join(cfg.out_dir, "magnitude_histogram.csv"),
            _histogram_rows(np.array([e.mag for e in catalog.events]), n_bins=0, bin_width=0.1),
        )
    if rtl_hist_rows is not None:
        _write_histogram(os.path.join(cfg.out_dir, "rtl_histogram.csv"), rtl_hist_rows)

    audit = {
        "seed": cfg.seed,
        "n_samples": len(full),
        "n_train": len(train_full),
        "n_test": len(test_full),
        "split": "chronological",
        "train_fraction": cfg.train_fraction,
        "normalization": {
            "mode": cfg.norm_mode,
            "window": cfg.norm_window,
            "fitted_on": "train",
        },
        "resampling": {"mode": cfg.resampling, "applied_to": "train"},
        "decision_threshold": cfg.decision_threshold,
        "dropped_rows": None
        if build_report is None
        else {
            "before_catalog_start": build_report.n_dropped_before_start,
            "after_catalog_end": build_report.n_dropped_after_end,
        },
        "cells": cell_audit,
    }
    with open(os.path.join(cfg.out_dir, "audit.json"), "w", encoding="utf-8") as fh:
        json.dump(audit, fh, indent=1)
        fh.write("\n")

    if n_ok == 0:
        raise DegenerateError(
            f"no (cell, model) pair could be evaluated; see {report_path} and audit.json"
        )
    return report_path, rows


def _parse_tag(tag: str):
    if not tag.startswith("r") or "_t" not in tag:
        return None
    try:
        r_part, t_part = tag[1:].split("_t", 1)
        return float(r_part), float(t_part)
    except ValueError:
        return None


def render_report(rows: list[dict]) -> str:
    """Text table: one block per r0 showing the t0 with the best ROC AUC
    across models (aggregate rows form their own block)."""
    if not rows:
        raise DataError("empty report")

    def fmt(row, col):
        return f"{float(row[col]):.2f}" if row[col] != "" else "  - "

    by_cell: dict[str, list[dict]] = {}
    order: list[str] = []
    for row in rows:
        if row["config"] not in by_cell:
            order.append(row["config"])
        by_cell.setdefault(row["config"], []).append(row)

    blocks: list[tuple[str, str, list[dict]]] = []
    grouped: dict[float, list[str]] = {}
    for tag in order:
        parsed = _parse_tag(tag)
        if parsed is None:
            blocks.append((tag, "", by_cell[tag]))
        else:
            grouped.setdefault(parsed[0], []).append(tag)

    def best_roc(tag):
        aucs = [float(r["roc_auc"]) for r in by_cell[tag] if r["roc_auc"] != ""]
        return max(aucs) if aucs else -1.0

    for r0 in sorted(grouped):
        best_tag = max(grouped[r0], key=best_roc)
        blocks.append((f"{r0:g}", f"{_parse_tag(best_tag)[1]:g}", by_cell[best_tag]))

    header = f"{'r0':>6} {'t0':>6} {'model':<20} {'prec':>6} {'rec':>6} {'f1':>6} {'roc_auc':>8} {'pr_auc':>7}"
    lines = [header, "-" * len(header)]
    for r0_text, t0_text, cell_rows in blocks:
        for i, row in enumerate(cell_rows):
            lines.append(
                f"{r0_text if i == 0 else '':>6} {t0_text if i == 0 else '':>6} "
                f"{row['model']:<20} {fmt(row, 'precision'):>6} {fmt(row, 'recall'):>6} "
                f"{fmt(row, 'f1'):>6} {fmt(row, 'roc_auc'):>8} {fmt(row, 'pr_auc'):>7}"
            )
        lines.append("-" * len(header))
    return "\n".join(lines) + "\n"
