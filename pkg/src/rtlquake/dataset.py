"""Labeled sample construction, feature matrices, normalization, splitting,
and resampling.

A sample is a space-time point (by default the epicenter and time of each
catalog event). Its features are lagged RTL values for one or more RTL
configurations; its label says whether a quake of magnitude >= m_c occurs
within r_c_km during the future window (t + delta_c, t + t_c), both time
bounds strict, distance bound inclusive.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .catalog import Catalog, SpatialIndex
from .rtl import RtlConfig, rtl_series


@dataclass(frozen=True)
class LabelRule:
    m_c: float = 5.0
    r_c_km: float = 50.0
    delta_c_days: float = 10.0
    t_c_days: float = 180.0

    def __post_init__(self):
        if not 0.0 <= self.delta_c_days < self.t_c_days:
            raise ValueError("need 0 <= delta_c_days < t_c_days")
        if self.r_c_km <= 0:
            raise ValueError("r_c_km must be positive")


def make_label(index: SpatialIndex, point: tuple[float, float], t: float, rule: LabelRule) -> int:
    """1 iff some event has mag >= m_c, distance <= r_c_km, and
    delta_c < t_e - t < t_c (both bounds strict)."""
    idx, _ = index.query_disc(point, rule.r_c_km, t_lo=t + rule.delta_c_days, t_hi=t + rule.t_c_days)
    if len(idx) == 0:
        return 0
    times = index.times[idx]
    mags = index.mags[idx]
    return int(np.any((times > t + rule.delta_c_days) & (mags >= rule.m_c)))


@dataclass
class Dataset:
    """Feature matrix with labels, sample times/locations, column names."""

    features: np.ndarray
    labels: np.ndarray
    sample_times: np.ndarray
    sample_locations: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.sample_times = np.asarray(self.sample_times, dtype=np.float64)
        self.sample_locations = np.asarray(self.sample_locations, dtype=np.float64)
        n = self.features.shape[0]
        if not (len(self.labels) == len(self.sample_times) == len(self.sample_locations) == n):
            raise ValueError("row count mismatch across dataset columns")
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError("feature_names length must match feature columns")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature_names must be unique")

    def __len__(self):
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        n_pos = int(self.labels.sum())
        return len(self.labels) - n_pos, n_pos

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(
            features=self.features[rows],
            labels=self.labels[rows],
            sample_times=self.sample_times[rows],
            sample_locations=self.sample_locations[rows],
            feature_names=list(self.feature_names),
        )

    def select_columns(self, names: list[str]) -> "Dataset":
        pos = {name: i for i, name in enumerate(self.feature_names)}
        missing = [n for n in names if n not in pos]
        if missing:
            raise ValueError(f"dataset lacks feature columns: {missing[:5]}")
        cols = [pos[n] for n in names]
        return Dataset(
            features=self.features[:, cols],
            labels=self.labels,
            sample_times=self.sample_times,
            sample_locations=self.sample_locations,
            feature_names=list(names),
        )

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["sample_time", "lat", "lon", "label"] + list(self.feature_names))
            for i in range(len(self)):
                row = [
                    repr(float(self.sample_times[i])),
                    repr(float(self.sample_locations[i, 0])),
                    repr(float(self.sample_locations[i, 1])),
                    str(int(self.labels[i])),
                ]
                row.extend(repr(float(v)) for v in self.features[i])
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path: str) -> "Dataset":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[:4] != ["sample_time", "lat", "lon", "label"]:
                raise ValueError(f"{path}: not a dataset CSV")
            names = header[4:]
            times, lats, lons, labels, feats = [], [], [], [], []
            for row in reader:
                if not row:
                    continue
                times.append(float(row[0]))
                lats.append(float(row[1]))
                lons.append(float(row[2]))
                labels.append(int(row[3]))
                feats.append([float(v) for v in row[4:]])
        return cls(
            features=np.array(feats, dtype=np.float64).reshape(len(times), len(names)),
            labels=np.array(labels, dtype=np.int64),
            sample_times=np.array(times, dtype=np.float64),
            sample_locations=np.column_stack([lats, lons]) if times else np.empty((0, 2)),
            feature_names=names,
        )


def feature_name(cfg: RtlConfig, lag: int) -> str:
    return f"rtl_{cfg.tag}_lag{lag:02d}"


@dataclass
class BuildReport:
    n_samples: int
    n_dropped_before_start: int
    n_dropped_after_end: int


def build_dataset(
    catalog: Catalog,
    index: SpatialIndex,
    configs: list[RtlConfig],
    n_lags: int,
    lag_step_days: float,
    rule: LabelRule,
    sample_points=None,
    sample_min_mag: float | None = None,
) -> tuple[Dataset, BuildReport]:
    """One row per sample point; features are rtl_series blocks in config
    order (lag order within each block); labels follow the rule.

    Sample points default to the catalog events (optionally only those
    with mag >= sample_min_mag); pass an (n, 3) array of (lat, lon, time)
    rows to sample elsewhere. Rows whose feature window would start
    before the catalog or whose label window would end after it are
    dropped; the report carries the counts.
    """
    if not configs:
        raise ValueError("configs must be non-empty")
    tags = [c.tag for c in configs]
    if len(set(tags)) != len(tags):
        raise ValueError("duplicate RTL configs")

    if sample_points is None:
        events = catalog.events
        if sample_min_mag is not None:
            events = [e for e in events if e.mag >= sample_min_mag]
        points = np.array([[e.lat, e.lon, e.time] for e in events]).reshape(len(events), 3)
    else:
        points = np.asarray(sample_points, dtype=np.float64).reshape(-1, 3)

    if len(catalog) == 0:
        raise ValueError("cannot build a dataset from an empty catalog")
    lookback = max(
        (n_lags - 1) * lag_step_days + c.cutoff_factor * c.t0_days for c in configs
    )
    t_start, t_end = catalog.start_time, catalog.end_time
    ok_start = points[:, 2] - lookback >= t_start
    ok_end = points[:, 2] + rule.t_c_days <= t_end
    dropped_start = int(np.sum(~ok_start))
    dropped_end = int(np.sum(ok_start & ~ok_end))
    points = points[ok_start & ok_end]
    if len(points) == 0:
        raise ValueError(
            "no usable samples: every candidate row fell outside the catalog's "
            f"feature/label coverage ({dropped_start} before start, {dropped_end} after end)"
        )

    names = [feature_name(cfg, lag) for cfg in configs for lag in range(n_lags)]
    features = np.empty((len(points), len(names)), dtype=np.float64)
    labels = np.empty(len(points), dtype=np.int64)
    for i, (lat, lon, t) in enumerate(points):
        blocks = [
            rtl_series(index, (lat, lon), t, cfg, n_lags, lag_step_days) for cfg in configs
        ]
        features[i] = np.concatenate(blocks)
        labels[i] = make_label(index, (lat, lon), t, rule)

    ds = Dataset(
        features=features,
        labels=labels,
        sample_times=points[:, 2],
        sample_locations=points[:, :2],
        feature_names=names,
    )
    return ds, BuildReport(len(points), dropped_start, dropped_end)


class FeatureNormalizer(BaseEstimator, TransformerMixin):
    """Column normalizer fitted on training rows only.

    mode='zscore': subtract the column mean, divide by the population
    standard deviation. mode='moving_average': subtract each column's
    trailing moving average (over `window` rows including the current
    one, rows assumed time-ordered), then divide by the population std
    of the training residuals. Constant columns pass through with
    divisor 1 and are flagged in `constant_columns_`.
    """

    def __init__(self, mode: str = "zscore", window: int = 100):
        self.mode = mode
        self.window = window

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if self.mode not in ("zscore", "moving_average"):
            raise ValueError(f"unknown normalization mode {self.mode!r}")
        if self.mode == "moving_average":
            if self.window < 1:
                raise ValueError("window must be >= 1")
            if self.window > X.shape[0]:
                raise ValueError(
                    f"moving-average window {self.window} exceeds {X.shape[0]} training rows"
                )
            centered = X - _trailing_mean(X, self.window)
        else:
            centered = X - X.mean(axis=0)
        self.means_ = X.mean(axis=0)
        stds = centered.std(axis=0)
        self.constant_columns_ = stds == 0.0
        self.stds_ = np.where(self.constant_columns_, 1.0, stds)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("feature count mismatch in normalizer")
        if self.mode == "moving_average":
            centered = X - _trailing_mean(X, min(self.window, X.shape[0]))
        else:
            centered = X - self.means_
        return centered / self.stds_

    def stats_rows(self, feature_names) -> list[tuple[str, float, float]]:
        return [
            (name, float(m), float(s))
            for name, m, s in zip(feature_names, self.means_, self.stds_)
        ]

    def to_csv(self, path: str, feature_names) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["feature", "mean", "std"])
            for name, m, s in self.stats_rows(feature_names):
                writer.writerow([name, repr(m), repr(s)])


def _trailing_mean(X: np.ndarray, window: int) -> np.ndarray:
    """Row i gets the mean of rows max(0, i-window+1)..i, per column."""
    csum = np.cumsum(X, axis=0)
    out = np.empty_like(X, dtype=np.float64)
    w = min(window, X.shape[0])
    out[:w] = csum[:w] / np.arange(1, w + 1)[:, None]
    if X.shape[0] > w:
        out[w:] = (csum[w:] - csum[:-w]) / w
    return out


def chronological_split(ds: Dataset, train_fraction: float = 0.7) -> tuple[Dataset, Dataset]:
    """Time-ordered split: first ceil(fraction * n) rows train, rest test
    (train clamped to n-1 so the test side is never empty)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n = len(ds)
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    order = np.argsort(ds.sample_times, kind="mergesort")
    n_train = min(math.ceil(train_fraction * n), n - 1)
    return ds.take(order[:n_train]), ds.take(order[n_train:])


def _check_two_classes(ds: Dataset):
    neg, pos = ds.class_counts()
    if neg == 0 or pos == 0:
        raise ValueError("resampling requires both classes present")
    return neg, pos


def oversample(ds: Dataset, seed: int) -> Dataset:
    """Duplicate uniformly-sampled minority rows until class counts match;
    result is re-sorted by sample time. Rows are copied verbatim."""
    neg, pos = _check_two_classes(ds)
    minority = 1 if pos < neg else 0
    n_extra = abs(neg - pos)
    rng = np.random.default_rng(seed)
    minority_rows = np.nonzero(ds.labels == minority)[0]
    extra = rng.choice(minority_rows, size=n_extra, replace=True)
    rows = np.concatenate([np.arange(len(ds)), extra])
    rows = rows[np.argsort(ds.sample_times[rows], kind="mergesort")]
    return ds.take(rows)


def undersample(ds: Dataset, seed: int) -> Dataset:
    """Keep a uniform random majority subset of minority size; re-sorted
    by sample time. Rows are kept verbatim."""
    neg, pos = _check_two_classes(ds)
    minority = 1 if pos < neg else 0
    rng = np.random.default_rng(seed)
    majority_rows = np.nonzero(ds.labels != minority)[0]
    kept_majority = rng.choice(majority_rows, size=min(neg, pos), replace=False)
    rows = np.concatenate([np.nonzero(ds.labels == minority)[0], kept_majority])
    rows = rows[np.argsort(ds.sample_times[rows], kind="mergesort")]
    return ds.take(rows)
