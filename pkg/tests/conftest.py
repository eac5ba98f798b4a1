import math

import numpy as np
import pytest

from rtlquake.catalog import Catalog, CatalogEvent, surface_distance_km
from rtlquake.synth import _KM_PER_DEG_LAT


def random_catalog(rng, n, lat_span=(-2.0, 2.0), lon_span=(-2.0, 2.0), t_span=(0.0, 1000.0),
                   mag_span=(3.0, 7.0)):
    events = [
        CatalogEvent(
            time=float(rng.uniform(*t_span)),
            lat=float(rng.uniform(*lat_span)),
            lon=float(rng.uniform(*lon_span)),
            mag=float(rng.uniform(*mag_span)),
        )
        for _ in range(n)
    ]
    return Catalog(events=events, source_name="random")


def naive_cylinder_scan(catalog, center, t, radius_km, t_window, min_mag=-np.inf):
    """Independent O(N) oracle for query_cylinder."""
    hits = []
    for e in catalog.events:
        age = t - e.time
        if not (0.0 < age <= t_window):
            continue
        if e.mag < min_mag:
            continue
        if surface_distance_km(center, (e.lat, e.lon)) <= radius_km:
            hits.append(e)
    return hits


def plant_swarms(
    rng,
    n_mainshocks,
    swarm_size,
    duration,
    inner_region=(-1.5, 1.5, -1.5, 1.5),
    sigma_km=25.0,
    lead_window=(11.0, 170.0),
    mainshock_mag=(5.1, 6.5),
    swarm_mag=(4.0, 4.9),
):
    """Mainshocks preceded by spatio-temporal swarm clusters.

    Each mainshock (magnitude above the usual label threshold) gets
    swarm_size smaller events in the lead_window days before it,
    Gaussian-scattered sigma_km around its epicenter: the planted
    precursor signal for end-to-end pipeline tests.
    """
    lat_min, lat_max, lon_min, lon_max = inner_region
    t_lo = lead_window[1] + 30.0
    events = []
    for _ in range(n_mainshocks):
        t_m = float(rng.uniform(t_lo, duration - 185.0))
        lat_m = float(rng.uniform(lat_min, lat_max))
        lon_m = float(rng.uniform(lon_min, lon_max))
        events.append(
            CatalogEvent(
                time=t_m, lat=lat_m, lon=lon_m, mag=float(rng.uniform(*mainshock_mag))
            )
        )
        for _ in range(swarm_size):
            dt = float(rng.uniform(*lead_window))
            dy, dx = rng.normal(0.0, sigma_km, size=2)
            lat = lat_m + dy / _KM_PER_DEG_LAT
            lon = lon_m + dx / (_KM_PER_DEG_LAT * math.cos(math.radians(lat_m)))
            events.append(
                CatalogEvent(
                    time=t_m - dt,
                    lat=float(lat),
                    lon=float(lon),
                    mag=float(rng.uniform(*swarm_mag)),
                )
            )
    return events


def plant_hotspots(
    rng,
    n_hotspots,
    events_per_hotspot,
    duration,
    inner_region=(-2.0, 2.0, -2.0, 2.0),
    sigma_km=30.0,
    active_days=700.0,
    gr_b=1.0,
    m_min=5.0,
):
    """Persistent clusters of larger events: each hotspot emits
    events_per_hotspot quakes с magnitudes >= m_min, Gaussian-scattered
    sigma_km around a fixed center, uniformly over an active window.
    Past activity of a hotspot is then genuinely predictive of its
    future activity: the planted signal for end-to-end pipeline tests.
    """
    lat_min, lat_max, lon_min, lon_max = inner_region
    events = []
    for _ in range(n_hotspots):
        t_start = float(rng.uniform(150.0, duration - active_days - 200.0))
        lat_c = float(rng.uniform(lat_min, lat_max))
        lon_c = float(rng.uniform(lon_min, lon_max))
        for _ in range(events_per_hotspot):
            t = float(rng.uniform(t_start, t_start + active_days))
            dy, dx = rng.normal(0.0, sigma_km, size=2)
            lat = lat_c + dy / _KM_PER_DEG_LAT
            lon = lon_c + dx / (_KM_PER_DEG_LAT * math.cos(math.radians(lat_c)))
            mag = m_min - math.log10(float(rng.random())) / gr_b
            events.append(
                CatalogEvent(time=t, lat=float(lat), lon=float(lon), mag=min(mag, 7.5))
            )
    return events


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
