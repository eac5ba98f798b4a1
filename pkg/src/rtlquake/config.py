"""Experiment configuration: flat INI-style files (key = value under
sections) mapped onto a typed config object. Defaults follow the
experiment protocol: r0 grid [10, 25, 50, 100] km, t0 grid
[30, 90, 180, 365] days, 20 lags of 1 day, label rule
(M>=5, 50 km, 10..180 days), chronological 70/30 split.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .dataset import LabelRule


class ConfigError(ValueError):
    """Invalid or missing experiment configuration."""


DEFAULT_MODELS = ["major_rtl", "logreg", "random_forest", "adaboost", "gradient_boosting"]

MODEL_PARAM_DEFAULTS = {
    "major_rtl": {"feature_index": 0},
    "logreg": {"lr": 0.1, "l2": 1e-4, "max_iter": 5000, "tol": 1e-6},
    "tree": {"max_depth": 8, "min_samples_leaf": 5},
    "random_forest": {
        "n_trees": 200,
        "max_depth": 8,
        "min_samples_leaf": 5,
        "max_features": "sqrt",
        "bootstrap": True,
        "class_weight": None,
    },
    "adaboost": {"n_rounds": 100, "base_depth": 1},
    "gradient_boosting": {
        "n_trees": 200,
        "learning_rate": 0.1,
        "max_depth": 3,
        "min_samples_leaf": 5,
        "subsample": 1.0,
        "class_weight": None,
    },
}


@dataclass
class SynthSection:
    duration_days: float = 3000.0
    background_rate: float = 1.0
    gr_b: float = 1.0
    gr_m_min: float = 3.0
    gr_a: float = 0.0
    omori_c1: float = 0.0
    omori_c2: float = 0.1
    omori_p: float = 1.1
    lat_min: float = -2.0
    lat_max: float = 2.0
    lon_min: float = -2.0
    lon_max: float = 2.0
    aftershock_trigger_mag: float = 5.0
    cluster_sigma_km: float = 10.0
    generations: int = 1


@dataclass
class ExperimentConfig:
    catalog_path: str | None = None
    dataset_path: str | None = None
    synth: SynthSection = field(default_factory=SynthSection)

    r0_grid: list[float] = field(default_factory=lambda: [10.0, 25.0, 50.0, 100.0])
    t0_grid: list[float] = field(default_factory=lambda: [30.0, 90.0, 180.0, 365.0])
    n_lags: int = 20
    lag_step_days: float = 1.0
    cutoff_factor: float = 1.0
    feature_min_mag: float = 5.0
    min_r_km: float = 0.1
    aggregate: bool = False
    sample_min_mag: float | None = None

    label_rule: LabelRule = field(default_factory=LabelRule)

    norm_mode: str = "zscore"
    norm_window: int = 100
    train_fraction: float = 0.7
    models: list[str] = field(default_factory=lambda: list(DEFAULT_MODELS))
    model_params: dict = field(default_factory=dict)
    resampling: str = "none"
    decision_threshold: float = 0.5
    seed: int = 0
    out_dir: str = "out"

    def cells(self) -> list[tuple[float, float]]:
        return [(r0, t0) for r0 in self.r0_grid for t0 in self.t0_grid]


def _float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{what}: expected a list of numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{what}: list must be non-empty")
    return values


def _coerce(text: str):
    low = text.strip().lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text.strip()


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    cfg = ExperimentConfig()

    def get(section, key, cast, default):
        if parser.has_option(section, key):
            raw = parser.get(section, key)
            try:
                return cast(raw)
            except (ValueError, TypeError):
                raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None
        return default

    if parser.has_section("data"):
        cfg.catalog_path = parser.get("data", "catalog", fallback=None)
        cfg.dataset_path = parser.get("data", "dataset", fallback=None)

    s = cfg.synth
    if parser.has_section("synth"):
        for name in vars(s):
            kind = int if name == "generations" else float
            setattr(s, name, get("synth", name, kind, getattr(s, name)))

    if parser.has_section("features"):
        if parser.has_option("features", "r0_grid"):
            cfg.r0_grid = _float_list(parser.get("features", "r0_grid"), "[features] r0_grid")
        if parser.has_option("features", "t0_grid"):
            cfg.t0_grid = _float_list(parser.get("features", "t0_grid"), "[features] t0_grid")
        cfg.n_lags = get("features", "n_lags", int, cfg.n_lags)
        cfg.lag_step_days = get("features", "lag_step_days", float, cfg.lag_step_days)
        cfg.cutoff_factor = get("features", "cutoff_factor", float, cfg.cutoff_factor)
        cfg.feature_min_mag = get("features", "min_mag", float, cfg.feature_min_mag)
        cfg.min_r_km = get("features", "min_r_km", float, cfg.min_r_km)
        cfg.aggregate = get("features", "aggregate", _parse_bool, cfg.aggregate)
        if parser.has_option("features", "sample_min_mag"):
            raw = parser.get("features", "sample_min_mag").strip()
            cfg.sample_min_mag = float(raw) if raw and raw.lower() != "none" else None

    if parser.has_section("label"):
        try:
            cfg.label_rule = LabelRule(
                m_c=get("label", "m_c", float, cfg.label_rule.m_c),
                r_c_km=get("label", "r_c_km", float, cfg.label_rule.r_c_km),
                delta_c_days=get("label", "delta_c_days", float, cfg.label_rule.delta_c_days),
                t_c_days=get("label", "t_c_days", float, cfg.label_rule.t_c_days),
            )
        except ValueError as exc:
            raise ConfigError(f"[label]: {exc}") from None

    if parser.has_section("normalize"):
        cfg.norm_mode = get("normalize", "mode", str, cfg.norm_mode).strip()
        cfg.norm_window = get("normalize", "window", int, cfg.norm_window)
    if cfg.norm_mode not in ("zscore", "moving_average"):
        raise ConfigError(f"[normalize] mode must be zscore or moving_average, got {cfg.norm_mode!r}")

    if parser.has_section("split"):
        cfg.train_fraction = get("split", "train_fraction", float, cfg.train_fraction)
    if not 0.0 < cfg.train_fraction < 1.0:
        raise ConfigError("[split] train_fraction must be in (0, 1)")

    if parser.has_section("train"):
        if parser.has_option("train", "models"):
            cfg.models = [
                tok.strip()
                for tok in parser.get("train", "models").replace(",", " ").split()
                if tok.strip()
            ]
        cfg.resampling = get("train", "resampling", str, cfg.resampling).strip()
        cfg.decision_threshold = get(
            "train", "decision_threshold", float, cfg.decision_threshold
        )
        cfg.seed = get("train", "seed", int, cfg.seed)
    if cfg.resampling not in ("none", "over", "under"):
        raise ConfigError(f"[train] resampling must be none/over/under, got {cfg.resampling!r}")
    if not cfg.models:
        raise ConfigError("[train] models must be non-empty")
    for name in cfg.models:
        if name not in MODEL_PARAM_DEFAULTS:
            raise ConfigError(
                f"[train] unknown model {name!r}; known: {sorted(MODEL_PARAM_DEFAULTS)}"
            )

    for name in MODEL_PARAM_DEFAULTS:
        section = f"model.{name}"
        params = dict(MODEL_PARAM_DEFAULTS[name])
        if parser.has_section(section):
            for key, raw in parser.items(section):
                if key not in params:
                    raise ConfigError(f"[{section}] unknown parameter {key!r}")
                params[key] = _coerce(raw)
        cfg.model_params[name] = params

    if parser.has_section("output"):
        cfg.out_dir = parser.get("output", "dir", fallback=cfg.out_dir)

    if cfg.n_lags < 1:
        raise ConfigError("[features] n_lags must be >= 1")
    if cfg.lag_step_days <= 0:
        raise ConfigError("[features] lag_step_days must be positive")
    return cfg


def _parse_bool(raw: str) -> bool:
    value = _coerce(raw)
    if not isinstance(value, bool):
        raise ValueError(f"expected a boolean, got {raw!r}")
    return value
