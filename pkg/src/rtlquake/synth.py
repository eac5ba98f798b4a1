"""Synthetic earthquake catalogs: Poisson background with power-law
magnitudes, plus decaying aftershock sequences simulated by thinning.
Also the maximum-likelihood b-value estimator for magnitude-frequency
slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import EARTH_RADIUS_KM, Catalog, CatalogEvent

_LOG10_E = math.log10(math.e)
_KM_PER_DEG_LAT = EARTH_RADIUS_KM * math.pi / 180.0


@dataclass(frozen=True)
class GrParams:
    """Magnitude-frequency law log10 N(>=M) = a - b*M above m_min."""

    b: float = 1.0
    m_min: float = 3.0
    a: float = 0.0  # informational intercept; generation uses explicit rates

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("b must be positive")


@dataclass(frozen=True)
class OuParams:
    """Aftershock rate c1 / (c2 + t)^p, t in days since the mainshock."""

    c1: float = 0.0
    c2: float = 0.1
    p: float = 1.1

    def __post_init__(self):
        if self.c1 < 0 or self.c2 <= 0 or self.p <= 0:
            raise ValueError("need c1 >= 0, c2 > 0, p > 0")


@dataclass(frozen=True)
class SynthSpec:
    duration_days: float
    background_rate: float  # events/day
    gr: GrParams = field(default_factory=GrParams)
    ou: OuParams = field(default_factory=OuParams)
    region: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)  # lat_min, lat_max, lon_min, lon_max
    aftershock_trigger_mag: float = 5.0
    cluster_sigma_km: float = 10.0
    generations: int = 1  # aftershock generations; 1 = no secondary triggering
    seed: int = 0

    def __post_init__(self):
        if self.duration_days <= 0 or self.background_rate < 0:
            raise ValueError("duration must be positive and rate non-negative")
        lat_min, lat_max, lon_min, lon_max = self.region
        if not (lat_min < lat_max and lon_min < lon_max):
            raise ValueError("region must be a non-empty (lat_min, lat_max, lon_min, lon_max) box")
        if self.cluster_sigma_km < 0 or self.generations < 1:
            raise ValueError("cluster_sigma_km >= 0 and generations >= 1 required")


def sample_gr_magnitude(gr: GrParams, u) -> float | np.ndarray:
    """Inverse-transform sample of the exceedance law: M = m_min - log10(u)/b."""
    return gr.m_min - np.log10(u) / gr.b


def fit_b_value(mags, m_min: float) -> float:
    """Aki maximum-likelihood estimate log10(e) / (mean(M) - m_min).

    Requires at least 30 magnitudes, all >= m_min.
    """
    mags = np.asarray(mags, dtype=np.float64)
    if len(mags) < 30:
        raise ValueError(f"b-value estimation needs n >= 30, got {len(mags)}")
    if mags.min() < m_min:
        raise ValueError("all magnitudes must be >= m_min")
    mean_excess = float(mags.mean()) - m_min
    if mean_excess <= 0:
        raise ValueError("mean magnitude equals m_min; b-value undefined")
    return _LOG10_E / mean_excess


def omori_rate(t_since_mainshock, ou: OuParams):
    """Aftershock rate c1 / (c2 + t)^p (events/day), decreasing in t."""
    t = np.asarray(t_since_mainshock, dtype=np.float64)
    out = ou.c1 / (ou.c2 + t) ** ou.p
    return float(out) if np.isscalar(t_since_mainshock) else out


def _aftershock_times(rng: np.random.Generator, ou: OuParams, horizon: float) -> list[float]:
    """Inhomogeneous Poisson times on (0, horizon] by thinning against the
    t=0 envelope rate c1/c2^p."""
    lam_max = ou.c1 / ou.c2**ou.p
    if lam_max <= 0 or horizon <= 0:
        return []
    times = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / lam_max)
        if t > horizon:
            return times
        if rng.random() <= omori_rate(t, ou) / lam_max:
            times.append(t)


def generate_catalog(spec: SynthSpec) -> Catalog:
    """Deterministic (per seed) synthetic catalog, sorted by time.

    Stream order: background count, times, locations, magnitudes; then,
    for each triggering event in chronological order, its thinning stream
    followed by offsets and magnitudes of the accepted aftershocks.
    """
    rng = np.random.default_rng(spec.seed)
    lat_min, lat_max, lon_min, lon_max = spec.region

    events: list[CatalogEvent] = []
    n_bg = rng.poisson(spec.background_rate * spec.duration_days)
    bg_times = np.sort(rng.uniform(0.0, spec.duration_days, size=n_bg))
    bg_lats = rng.uniform(lat_min, lat_max, size=n_bg)
    bg_lons = rng.uniform(lon_min, lon_max, size=n_bg)
    bg_mags = sample_gr_magnitude(spec.gr, rng.random(size=n_bg))
    for t, lat, lon, mag in zip(bg_times, bg_lats, bg_lons, bg_mags):
        events.append(CatalogEvent(time=float(t), lat=float(lat), lon=float(lon), mag=float(mag)))

    parents = [e for e in events if e.mag >= spec.aftershock_trigger_mag]
    for generation in range(spec.generations):
        children: list[CatalogEvent] = []
        for parent in sorted(parents, key=lambda e: (e.time, e.lat, e.lon)):
            offsets = _aftershock_times(rng, spec.ou, spec.duration_days - parent.time)
            for dt in offsets:
                dy, dx = rng.normal(0.0, spec.cluster_sigma_km, size=2)
                lat = parent.lat + dy / _KM_PER_DEG_LAT
                lon = parent.lon + dx / (
                    _KM_PER_DEG_LAT * max(math.cos(math.radians(parent.lat)), 1e-9)
                )
                lat = min(max(lat, -90.0), 90.0)
                lon = min(max(lon, -180.0), 180.0)
                mag = float(sample_gr_magnitude(spec.gr, rng.random()))
                children.append(
                    CatalogEvent(time=float(parent.time + dt), lat=lat, lon=lon, mag=mag)
                )
        events.extend(children)
        parents = [e for e in children if e.mag >= spec.aftershock_trigger_mag]
        if not parents:
            break
    return Catalog(events=events, source_name=f"synthetic(seed={spec.seed})")
