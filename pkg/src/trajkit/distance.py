"""Point-to-point base distances.

Two modes are supported: ``euclidean`` for coordinates in a projected plane
(any dimension) and ``haversine`` for geographic coordinates given as
``(lon, lat)`` degree pairs, returning meters on the mean-radius sphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionUnsupported, InvalidParameter

EARTH_RADIUS_M = 6371008.8  # mean Earth radius

MODES = ("euclidean", "haversine")


def euclidean(a, b) -> float:
    """Euclidean distance between two coordinate vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.sqrt(((a - b) ** 2).sum()))


def haversine(a, b) -> float:
    """Great-circle distance in meters between two (lon, lat) degree pairs."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (2,) or b.shape != (2,):
        raise DimensionUnsupported("haversine distance requires (lon, lat) pairs")
    return float(_haversine_arrays(a[None, :], b[None, :])[0])


def _haversine_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized haversine over (k, 2) arrays of (lon, lat) degrees."""
    lon1, lat1 = np.radians(a[:, 0]), np.radians(a[:, 1])
    lon2, lat2 = np.radians(b[:, 0]), np.radians(b[:, 1])
    s_lat = np.sin((lat2 - lat1) * 0.5)
    s_lon = np.sin((lon2 - lon1) * 0.5)
    h = s_lat * s_lat + np.cos(lat1) * np.cos(lat2) * s_lon * s_lon
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(h, 1.0)))


@dataclass(frozen=True)
class BaseDistance:
    """Selects how raw point-to-point distances are measured.

    ``euclidean`` treats coordinates as meters in a projected plane;
    ``haversine`` treats them as (lon, lat) degrees and yields meters.
    """

    mode: str = "euclidean"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameter(f"unknown base distance mode {self.mode!r}")

    def __call__(self, a, b) -> float:
        if self.mode == "euclidean":
            return euclidean(a, b)
        return haversine(a, b)

    def aligned(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Distances between index-aligned rows of two (k, n) arrays."""
        if self.mode == "euclidean":
            return np.sqrt(((xs - ys) ** 2).sum(axis=1))
        if xs.shape[1] != 2:
            raise DimensionUnsupported("haversine distance requires (lon, lat) pairs")
        return _haversine_arrays(xs, ys)

    def consecutive(self, coords: np.ndarray) -> np.ndarray:
        """Segment lengths between consecutive rows of a (k, n) array."""
        if len(coords) < 2:
            return np.zeros(0)
        return self.aligned(coords[:-1], coords[1:])


EUCLIDEAN = BaseDistance("euclidean")
HAVERSINE = BaseDistance("haversine")
