"""Compiled dynamic-programming kernels for the sequence metrics.

All kernels take (p, d) float64 coordinate arrays. ``mode`` selects the
point distance: 0 = Euclidean, 1 = haversine on (lon, lat) degrees.
Window arguments use -1 for "unbounded".
"""

import math

import numpy as np
from numba import njit

from .distance import EARTH_RADIUS_M

MODE_EUCLIDEAN = 0
MODE_HAVERSINE = 1


@njit(cache=True)
def point_pair_distance(a, i, b, j, mode):
    if mode == MODE_EUCLIDEAN:
        s = 0.0
        for t in range(a.shape[1]):
            diff = a[i, t] - b[j, t]
            s += diff * diff
        return math.sqrt(s)
    lon1 = math.radians(a[i, 0])
    lat1 = math.radians(a[i, 1])
    lon2 = math.radians(b[j, 0])
    lat2 = math.radians(b[j, 1])
    s_lat = math.sin((lat2 - lat1) * 0.5)
    s_lon = math.sin((lon2 - lon1) * 0.5)
    h = s_lat * s_lat + math.cos(lat1) * math.cos(lat2) * s_lon * s_lon
    if h > 1.0:
        h = 1.0
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


@njit(cache=True)
def dtw_kernel(a, b, mode, window):
    p = a.shape[0]
    q = b.shape[0]
    prev = np.empty(q)
    cur = np.empty(q)
    for j in range(q):
        if window >= 0 and j > window:
            prev[j] = np.inf
        else:
            c = point_pair_distance(a, 0, b, j, mode)
            prev[j] = c if j == 0 else prev[j - 1] + c
    for i in range(1, p):
        for j in range(q):
            if window >= 0 and abs(i - j) > window:
                cur[j] = np.inf
                continue
            c = point_pair_distance(a, i, b, j, mode)
            if j == 0:
                cur[0] = prev[0] + c
            else:
                m = prev[j]
                if prev[j - 1] < m:
                    m = prev[j - 1]
                if cur[j - 1] < m:
                    m = cur[j - 1]
                cur[j] = m + c
        tmp = prev
        prev = cur
        cur = tmp
    return prev[q - 1]


@njit(cache=True)
def frechet_kernel(a, b, mode):
    p = a.shape[0]
    q = b.shape[0]
    prev = np.empty(q)
    cur = np.empty(q)
    prev[0] = point_pair_distance(a, 0, b, 0, mode)
    for j in range(1, q):
        c = point_pair_distance(a, 0, b, j, mode)
        prev[j] = c if c > prev[j - 1] else prev[j - 1]
    for i in range(1, p):
        c = point_pair_distance(a, i, b, 0, mode)
        cur[0] = c if c > prev[0] else prev[0]
        for j in range(1, q):
            m = prev[j]
            if prev[j - 1] < m:
                m = prev[j - 1]
            if cur[j - 1] < m:
                m = cur[j - 1]
            c = point_pair_distance(a, i, b, j, mode)
            cur[j] = c if c > m else m
        tmp = prev
        prev = cur
        cur = tmp
    return prev[q - 1]


@njit(cache=True)
def edr_kernel(a, b, eps, mode):
    p = a.shape[0]
    q = b.shape[0]
    prev = np.empty(q + 1, dtype=np.int64)
    cur = np.empty(q + 1, dtype=np.int64)
    for j in range(q + 1):
        prev[j] = j
    for i in range(1, p + 1):
        cur[0] = i
        for j in range(1, q + 1):
            sub = 0 if point_pair_distance(a, i - 1, b, j - 1, mode) <= eps else 1
            m = prev[j - 1] + sub
            if prev[j] + 1 < m:
                m = prev[j] + 1
            if cur[j - 1] + 1 < m:
                m = cur[j - 1] + 1
            cur[j] = m
        tmp = prev
        prev = cur
        cur = tmp
    return prev[q]


@njit(cache=True)
def lcss_suffix_table(a, b, eps, delta, mode):
    """Suffix-LCSS table: S[i, j] = best match count using points i.. and j.. ."""
    p = a.shape[0]
    q = b.shape[0]
    table = np.zeros((p + 1, q + 1), dtype=np.int64)
    for i in range(p - 1, -1, -1):
        for j in range(q - 1, -1, -1):
            in_window = delta < 0 or abs(i - j) <= delta
            if in_window and point_pair_distance(a, i, b, j, mode) <= eps:
                table[i, j] = table[i + 1, j + 1] + 1
            else:
                m = table[i + 1, j]
                if table[i, j + 1] > m:
                    m = table[i, j + 1]
                table[i, j] = m
    return table
