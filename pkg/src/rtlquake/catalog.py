"""Earthquake catalog parsing, validation, and spatial indexing.

Catalog CSV contract: header ``time,lat,lon,depth,mag``; ``time`` is either
ISO-8601 (``YYYY-MM-DDThh:mm:ssZ``) or a decimal number of days since
1970-01-01 UTC; ``depth`` may be empty; UTF-8; LF or CRLF line endings.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

EARTH_RADIUS_KM = 6371.0088
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

CSV_HEADER = ["time", "lat", "lon", "depth", "mag"]


class CatalogError(ValueError):
    """Malformed or invalid catalog input."""


@dataclass(frozen=True)
class CatalogEvent:
    """One earthquake: time in fractional days since 1970-01-01 UTC."""

    time: float
    lat: float
    lon: float
    mag: float
    depth_km: float | None = None

    def __post_init__(self):
        for name in ("time", "lat", "lon", "mag"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.depth_km is not None:
            object.__setattr__(self, "depth_km", float(self.depth_km))
        if not (math.isfinite(self.time) and math.isfinite(self.mag)):
            raise CatalogError("event time and magnitude must be finite")
        if not -90.0 <= self.lat <= 90.0:
            raise CatalogError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise CatalogError(f"longitude {self.lon} outside [-180, 180]")


@dataclass
class Catalog:
    """Time-sorted sequence of catalog events.

    Events are re-sorted (stably) on construction, so callers may pass rows
    in any order.
    """

    events: list[CatalogEvent]
    source_name: str = ""

    def __post_init__(self):
        self.events = sorted(self.events, key=lambda e: e.time)

    def __len__(self):
        return len(self.events)

    def times(self) -> np.ndarray:
        return np.array([e.time for e in self.events], dtype=np.float64)

    def mags(self) -> np.ndarray:
        return np.array([e.mag for e in self.events], dtype=np.float64)

    @property
    def start_time(self) -> float:
        if not self.events:
            raise CatalogError("empty catalog has no start time")
        return self.events[0].time

    @property
    def end_time(self) -> float:
        if not self.events:
            raise CatalogError("empty catalog has no end time")
        return self.events[-1].time


def _parse_time_field(text: str) -> float:
    """ISO-8601 timestamp or decimal epoch days -> fractional epoch days."""
    try:
        return float(text)
    except ValueError:
        pass
    iso = text.strip()
    if iso.endswith(("Z", "z")):
        iso = iso[:-1] + "+00:00"
    dt = datetime.fromisoformat(iso)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return (dt - _EPOCH).total_seconds() / 86400.0


def parse_catalog(source, source_name: str = "") -> Catalog:
    """Parse catalog CSV from a text stream, file path, or string.

    Raises :class:`CatalogError` naming the offending 1-based line number on
    malformed rows or out-of-range coordinates.
    """
    if isinstance(source, str) and "\n" not in source and "," not in source:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return parse_catalog(fh, source_name or source)
    if isinstance(source, str):
        source = io.StringIO(source)

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise CatalogError("line 1: missing header") from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise CatalogError(
            f"line 1: expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
        )

    events = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise CatalogError(f"line {lineno}: expected 5 fields, got {len(row)}")
        t_raw, lat_raw, lon_raw, depth_raw, mag_raw = row
        try:
            t = _parse_time_field(t_raw)
            lat = float(lat_raw)
            lon = float(lon_raw)
            depth = float(depth_raw) if depth_raw.strip() else None
            mag = float(mag_raw)
        except ValueError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
        try:
            events.append(CatalogEvent(time=t, lat=lat, lon=lon, mag=mag, depth_km=depth))
        except CatalogError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
    return Catalog(events=events, source_name=source_name)


def write_catalog(catalog: Catalog, path: str) -> None:
    """Write catalog CSV (times as decimal epoch days, LF endings)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for e in catalog.events:
            depth = "" if e.depth_km is None else repr(e.depth_km)
            writer.writerow([repr(e.time), repr(e.lat), repr(e.lon), depth, repr(e.mag)])


def _haversine_vec(lat_deg, lon_deg, lat0: float, lon0: float) -> np.ndarray:
    # the single distance kernel: the scalar API and the index filter must
    # agree bit-for-bit, so both call this
    lat = np.radians(np.asarray(lat_deg, dtype=np.float64))
    lon = np.radians(np.asarray(lon_deg, dtype=np.float64))
    la0 = np.radians(np.float64(lat0))
    lo0 = np.radians(np.float64(lon0))
    h = np.sin((lat - la0) / 2.0) ** 2 + np.cos(la0) * np.cos(lat) * np.sin((lon - lo0) / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def surface_distance_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in km (haversine, Earth radius 6371.0088 km)."""
    return float(_haversine_vec(a[0], a[1], b[0], b[1]))


@dataclass
class _Cell:
    times: np.ndarray  # sorted ascending (catalog order)
    idx: np.ndarray  # indices into the index-wide event arrays


class SpatialIndex:
    """Immutable grid index over a catalog for fast disc queries.

    Events are binned on a local equirectangular projection centered at the
    catalog centroid; candidate cells for a query are taken from the exact
    spherical-cap bounding box of the query disc, then filtered with the
    haversine distance, so query results are exact (identical to a full
    scan) for any cell size. Safe for concurrent read-only use.
    """

    def __init__(self, catalog: Catalog, cell_size_km: float):
        if cell_size_km <= 0:
            raise ValueError("cell_size_km must be positive")
        self.cell_size_km = float(cell_size_km)
        self._events = list(catalog.events)
        n = len(self._events)
        self.times = np.fromiter((e.time for e in self._events), dtype=np.float64, count=n)
        self.lats = np.fromiter((e.lat for e in self._events), dtype=np.float64, count=n)
        self.lons = np.fromiter((e.lon for e in self._events), dtype=np.float64, count=n)
        self.mags = np.fromiter((e.mag for e in self._events), dtype=np.float64, count=n)
        if n:
            self.projection_origin = (float(self.lats.mean()), float(self.lons.mean()))
        else:
            self.projection_origin = (0.0, 0.0)

        xs, ys = self._project(self.lats, self.lons)
        cx = np.floor(xs / self.cell_size_km).astype(np.int64)
        cy = np.floor(ys / self.cell_size_km).astype(np.int64)
        self._cells: dict[tuple[int, int], _Cell] = {}
        order = np.lexsort((np.arange(n), cy, cx))  # stable grouping, time order kept
        for key, group in _group_runs(cx[order], cy[order], order):
            self._cells[key] = _Cell(times=self.times[group], idx=group)

    def __len__(self):
        return len(self.times)

    @property
    def n_cells(self) -> int:
        return len(self._cells)

    def event(self, i: int) -> CatalogEvent:
        return self._events[i]

    def _project(self, lat_deg, lon_deg):
        lat0, lon0 = self.projection_origin
        x = np.radians(np.asarray(lon_deg) - lon0) * EARTH_RADIUS_KM * math.cos(math.radians(lat0))
        y = np.radians(np.asarray(lat_deg) - lat0) * EARTH_RADIUS_KM
        return x, y

    def _candidate_cells(self, lat: float, lon: float, radius_km: float):
        """Cells intersecting the spherical-cap bounding box of the disc.

        The box is padded by a hair so floating-point rounding can never
        shrink it below the true cap; the exact haversine filter runs on
        the gathered candidates afterwards.
        """
        pad = 1e-12 * max(1.0, radius_km) + 1e-9
        dlat = math.degrees(radius_km / EARTH_RADIUS_KM) + pad
        lat_lo, lat_hi = lat - dlat, lat + dlat
        if lat_lo <= -90.0 or lat_hi >= 90.0:
            lon_lo, lon_hi = -180.0, 180.0
        else:
            sin_r = math.sin(radius_km / EARTH_RADIUS_KM)
            cos_lat = math.cos(math.radians(lat))
            if sin_r >= cos_lat * (1.0 - 1e-12):
                lon_lo, lon_hi = -180.0, 180.0
            else:
                dlon = math.degrees(math.asin(sin_r / cos_lat)) + pad
                lon_lo, lon_hi = lon - dlon, lon + dlon
                if lon_lo < -180.0 or lon_hi > 180.0:
                    # wrap-around: fall back to the full longitude range
                    lon_lo, lon_hi = -180.0, 180.0
        x_lo, y_lo = self._project(lat_lo, lon_lo)
        x_hi, y_hi = self._project(lat_hi, lon_hi)
        s = self.cell_size_km
        cx_lo, cx_hi = int(math.floor(x_lo / s)), int(math.floor(x_hi / s))
        cy_lo, cy_hi = int(math.floor(y_lo / s)), int(math.floor(y_hi / s))
        for cx in range(cx_lo, cx_hi + 1):
            for cy in range(cy_lo, cy_hi + 1):
                cell = self._cells.get((cx, cy))
                if cell is not None:
                    yield cell

    def query_disc(
        self,
        center: tuple[float, float],
        radius_km: float,
        t_lo: float = -math.inf,
        t_hi: float = math.inf,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Indices and distances of events with distance <= radius_km and
        time in the half-open window [t_lo, t_hi)."""
        picked = []
        for cell in self._candidate_cells(center[0], center[1], radius_km):
            lo = np.searchsorted(cell.times, t_lo, side="left")
            hi = np.searchsorted(cell.times, t_hi, side="left")
            if hi > lo:
                picked.append(cell.idx[lo:hi])
        if not picked:
            return np.empty(0, dtype=np.int64), np.empty(0)
        cand = np.concatenate(picked)
        dist = _haversine_vec(self.lats[cand], self.lons[cand], center[0], center[1])
        keep = dist <= radius_km
        return cand[keep], dist[keep]


def _group_runs(cx_sorted, cy_sorted, order):
    n = len(order)
    start = 0
    while start < n:
        stop = start
        kx, ky = cx_sorted[start], cy_sorted[start]
        while stop < n and cx_sorted[stop] == kx and cy_sorted[stop] == ky:
            stop += 1
        yield (int(kx), int(ky)), order[start:stop]
        start = stop


def build_index(catalog: Catalog, cell_size_km: float) -> SpatialIndex:
    return SpatialIndex(catalog, cell_size_km)


def query_cylinder(
    index: SpatialIndex,
    center: tuple[float, float],
    t: float,
    radius_km: float,
    t_window: float,
    min_mag: float = -math.inf,
) -> list[CatalogEvent]:
    """Events with distance <= radius_km, 0 < t - t_i <= t_window (strictly
    before t, no lookahead), and mag >= min_mag, sorted by time."""
    if radius_km <= 0 or t_window <= 0:
        raise ValueError("radius_km and t_window must be positive")
    idx, _ = index.query_disc(center, radius_km, t_lo=t - t_window, t_hi=t)
    if min_mag > -math.inf:
        idx = idx[index.mags[idx] >= min_mag]
    idx = np.sort(idx)  # catalog indices are time-ordered
    return [index.event(int(i)) for i in idx]
