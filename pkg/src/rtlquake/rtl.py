"""Region-Time-Length seismicity features.

The RTL statistic at a space-time point is the product of three sums over
nearby past earthquakes: distance weights exp(-r_i/r0), recency weights
exp(-(t - t_i)/t0), and rupture-length ratios l_i/r_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import SpatialIndex


@dataclass(frozen=True)
class RtlConfig:
    """Hyperparameters of one RTL feature family.

    Events are included when r_i <= cutoff_factor * r0_km and
    0 < t - t_i <= cutoff_factor * t0_days and mag >= min_mag. Distances
    are clamped to min_r_km in the L term (and, for exactly co-located
    events, in the radius test).
    """

    r0_km: float
    t0_days: float
    cutoff_factor: float = 1.0
    min_mag: float = 5.0
    min_r_km: float = 0.1

    def __post_init__(self):
        if self.r0_km <= 0 or self.t0_days <= 0:
            raise ValueError("r0_km and t0_days must be positive")
        if self.cutoff_factor < 1.0:
            raise ValueError("cutoff_factor must be >= 1")
        if self.min_r_km <= 0:
            raise ValueError("min_r_km must be positive")

    @property
    def tag(self) -> str:
        return f"r{self.r0_km:g}_t{self.t0_days:g}"


@dataclass(frozen=True)
class RtlValue:
    r_comp: float
    t_comp: float
    l_comp: float
    product: float
    n_events: int


def rupture_length_km(mag: float) -> float:
    """Empirical rupture length: 10**(0.5 * mag - 1.8) km."""
    return 10.0 ** (0.5 * mag - 1.8)


def _included_terms(cfg: RtlConfig, ages, dists, mags):
    """Apply the inclusion rule and return (r_eff, ages, mags) of kept events."""
    radius = cfg.cutoff_factor * cfg.r0_km
    window = cfg.cutoff_factor * cfg.t0_days
    r_test = np.where(dists == 0.0, cfg.min_r_km, dists)
    keep = (r_test <= radius) & (ages > 0.0) & (ages <= window) & (mags >= cfg.min_mag)
    r_eff = np.maximum(dists[keep], cfg.min_r_km)
    return r_eff, ages[keep], mags[keep]


def rtl_at(index: SpatialIndex, point: tuple[float, float], t: float, cfg: RtlConfig) -> RtlValue:
    """RTL components and product at one space-time point."""
    radius = cfg.cutoff_factor * cfg.r0_km
    window = cfg.cutoff_factor * cfg.t0_days
    idx, dists = index.query_disc(point, max(radius, cfg.min_r_km), t_lo=t - window, t_hi=t)
    ages = t - index.times[idx]
    r_eff, ages, mags = _included_terms(cfg, ages, dists, index.mags[idx])
    if len(r_eff) == 0:
        return RtlValue(0.0, 0.0, 0.0, 0.0, 0)
    r_comp = float(np.exp(-r_eff / cfg.r0_km).sum())
    t_comp = float(np.exp(-ages / cfg.t0_days).sum())
    lengths = 10.0 ** (0.5 * mags - 1.8)
    l_comp = float((lengths / r_eff).sum())
    return RtlValue(r_comp, t_comp, l_comp, r_comp * t_comp * l_comp, int(len(r_eff)))


def rtl_series(
    index: SpatialIndex,
    point: tuple[float, float],
    t: float,
    cfg: RtlConfig,
    n_lags: int,
    lag_step_days: float = 1.0,
) -> np.ndarray:
    """RTL products at t, t - step, ..., t - (n_lags-1)*step (lag order).

    One disc query covers the union of all lag windows; per-lag inclusion
    masks then reproduce rtl_at exactly at each lagged time.
    """
    if n_lags < 1:
        raise ValueError("n_lags must be >= 1")
    if lag_step_days <= 0:
        raise ValueError("lag_step_days must be positive")
    radius = cfg.cutoff_factor * cfg.r0_km
    window = cfg.cutoff_factor * cfg.t0_days
    t_lo = t - (n_lags - 1) * lag_step_days - window
    idx, dists = index.query_disc(point, max(radius, cfg.min_r_km), t_lo=t_lo, t_hi=t)
    times = index.times[idx]
    mags = index.mags[idx]

    r_test = np.where(dists == 0.0, cfg.min_r_km, dists)
    in_disc = (r_test <= radius) & (mags >= cfg.min_mag)
    dists, times = dists[in_disc], times[in_disc]
    r_eff = np.maximum(dists, cfg.min_r_km)
    r_weight = np.exp(-r_eff / cfg.r0_km)
    l_ratio = (10.0 ** (0.5 * mags[in_disc] - 1.8)) / r_eff

    out = np.zeros(n_lags, dtype=np.float64)
    for k in range(n_lags):
        tk = t - k * lag_step_days
        ages = tk - times
        keep = (ages > 0.0) & (ages <= window)
        if not keep.any():
            continue
        r_comp = r_weight[keep].sum()
        t_comp = np.exp(-ages[keep] / cfg.t0_days).sum()
        l_comp = l_ratio[keep].sum()
        out[k] = r_comp * t_comp * l_comp
    return out
