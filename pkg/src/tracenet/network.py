"""Weighted temporal contact networks.

A day of contacts is stored as a sparse, upper-triangular edge list with
integer durations measured in 20-second units. Snapshots are immutable and
can be shared between trials.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigurationError, ParseError, RejectedRecordError

SECONDS_PER_SLOT = 20
SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class ContactEvent:
    time_slot: int
    person_a: int
    person_b: int

    def __post_init__(self):
        if self.person_a == self.person_b:
            raise ValueError("a contact needs two distinct people")
        if self.time_slot < 0:
            raise ValueError("time_slot must be non-negative")


def _freeze(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DaySnapshot:
    """Cumulative contact durations for one day.

    ``i < j`` for every edge, edges are sorted by ``i * n + j`` and every
    duration is a positive integer.
    """

    n: int
    i: np.ndarray
    j: np.ndarray
    d: np.ndarray
    keys: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, n, a, b, d):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        d = np.asarray(d, dtype=np.int64)
        if a.shape != b.shape or a.shape != d.shape:
            raise ValueError("edge arrays must have equal length")
        if np.any(a == b):
            raise ValueError("self-pairs are not allowed")
        if a.size and (min(a.min(), b.min()) < 0 or max(a.max(), b.max()) >= n):
            raise ValueError("person id out of range")
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = lo * n + hi
        keys, inverse = np.unique(keys, return_inverse=True)
        d = np.bincount(inverse, weights=d, minlength=keys.size).astype(np.int64)
        keep = d > 0
        if np.any(d < 0):
            raise ValueError("durations must be non-negative")
        return cls._trusted(n, keys[keep], d[keep])

    @classmethod
    def _trusted(cls, n, keys, d):
        keys = np.asarray(keys, dtype=np.int64)
        return cls(n, _freeze(keys // n, np.int64), _freeze(keys % n, np.int64),
                   _freeze(d, np.int64), _freeze(keys, np.int64))

    @classmethod
    def from_dict(cls, n, durations: Mapping[tuple[int, int], int]):
        if not durations:
            return cls.empty(n)
        pairs = np.array(list(durations.keys()), dtype=np.int64).reshape(-1, 2)
        return cls.from_arrays(n, pairs[:, 0], pairs[:, 1], list(durations.values()))

    @classmethod
    def empty(cls, n):
        z = np.zeros(0, dtype=np.int64)
        return cls._trusted(n, z, z)

    def __len__(self):
        return int(self.keys.size)

    def as_dict(self):
        return {(int(a), int(b)): int(w) for a, b, w in zip(self.i, self.j, self.d)}

    def duration(self, a, b):
        if a == b:
            return 0
        key = min(a, b) * self.n + max(a, b)
        pos = np.searchsorted(self.keys, key)
        if pos < self.keys.size and self.keys[pos] == key:
            return int(self.d[pos])
        return 0

    def lookup(self, keys):
        """Durations for an array of pair keys, 0 where absent."""
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, max(self.keys.size - 1, 0))
        if self.keys.size == 0:
            return np.zeros(len(keys), dtype=np.int64)
        hit = self.keys[pos] == keys
        return np.where(hit, self.d[pos], 0)

    def degrees(self):
        return np.bincount(self.i, minlength=self.n) + np.bincount(self.j, minlength=self.n)

    def with_population(self, n):
        if n < self.n:
            raise ValueError("cannot shrink a snapshot")
        return DaySnapshot._trusted(n, self.i * n + self.j, self.d)

    def __eq__(self, other):
        if not isinstance(other, DaySnapshot):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.keys, other.keys)
                and np.array_equal(self.d, other.d))


@dataclass(frozen=True)
class TemporalContactGraph:
    population_size: int
    base_days: tuple

    def __post_init__(self):
        if len(self.base_days) < 1:
            raise ConfigurationError("a temporal graph needs at least one day")
        for day in self.base_days:
            if day.n != self.population_size:
                raise ConfigurationError("snapshot population does not match graph")

    def mean_degree(self):
        """Mean per-day vertex degree averaged over the base days."""
        return float(np.mean([2 * len(day) / self.population_size for day in self.base_days]))


@dataclass(frozen=True)
class ProximityFormat:
    """Column layout of a whitespace-separated proximity log."""

    time_col: int = 0
    a_col: int = 1
    b_col: int = 2
    slot_seconds: int = SECONDS_PER_SLOT
    day_seconds: int = SECONDS_PER_DAY


THIERS_FORMAT = ProximityFormat()


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb")
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source)
    return source


def parse_records(source, fmt: ProximityFormat = THIERS_FORMAT):
    """Parse ``(timestamp, id_a, id_b)`` rows, returning three int64 arrays."""
    stream = _open_text(source)
    ts, aa, bb = [], [], []
    ncols = max(fmt.time_col, fmt.a_col, fmt.b_col) + 1
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.decode() if isinstance(raw, bytes) else raw
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) < ncols:
                raise ParseError(lineno, f"expected at least {ncols} columns, got {len(parts)}")
            try:
                t = int(parts[fmt.time_col])
                a = int(parts[fmt.a_col])
                b = int(parts[fmt.b_col])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            if a == b:
                raise RejectedRecordError(lineno, f"self-contact record for id {a}")
            ts.append(t)
            aa.append(a)
            bb.append(b)
    finally:
        if stream is not source:
            stream.close()
    return (np.array(ts, dtype=np.int64), np.array(aa, dtype=np.int64),
            np.array(bb, dtype=np.int64))


def load_contact_data(source, fmt: ProximityFormat = THIERS_FORMAT):
    """Aggregate a proximity log into one DaySnapshot per calendar day present.

    Each record adds one slot to its pair's duration on that day. Ids are
    remapped to ``0..n-1`` in ascending order of the original id.
    """
    ts, a, b = parse_records(source, fmt)
    if ts.size == 0:
        return []
    ids, inverse = np.unique(np.concatenate([a, b]), return_inverse=True)
    n = ids.size
    a, b = inverse[: a.size], inverse[a.size:]
    cal = ts // fmt.day_seconds
    cal = cal - cal.min()
    days = []
    for day in np.unique(cal):
        sel = cal == day
        days.append(DaySnapshot.from_arrays(n, a[sel], b[sel], np.ones(int(sel.sum()), dtype=np.int64)))
    return days


def load_graph(source, fmt: ProximityFormat = THIERS_FORMAT):
    days = load_contact_data(source, fmt)
    if not days:
        raise ConfigurationError("proximity log contains no records")
    return TemporalContactGraph(days[0].n, tuple(days))


def synthesize_day(base_days, rng):
    """Mix two distinct observed days edge by edge.

    Starting from day ``a``, every pair present in ``a`` or ``b`` takes day
    ``b``'s duration with probability 0.5 (a zero removes the edge).
    """
    if len(base_days) < 2:
        raise ConfigurationError("day synthesis needs at least two base days")
    ia, ib = rng.choice(len(base_days), size=2, replace=False)
    ha, hb = base_days[ia], base_days[ib]
    keys = np.union1d(ha.keys, hb.keys)
    swap = rng.random(keys.size) < 0.5
    d = np.where(swap, hb.lookup(keys), ha.lookup(keys))
    keep = d > 0
    return DaySnapshot._trusted(ha.n, keys[keep], d[keep])


def _as_mask(people, n):
    if people is None:
        return np.zeros(n, dtype=bool)
    arr = np.asarray(people)
    if arr.dtype == bool and arr.shape == (n,):
        return arr
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter(people, dtype=np.int64) if not isinstance(people, np.ndarray) else arr
    mask[idx] = True
    return mask


def _as_factors(reduction, n):
    if reduction is None:
        return None
    if isinstance(reduction, Mapping):
        if not reduction:
            return None
        f = np.ones(n)
        for k, v in reduction.items():
            f[k] = v
    else:
        f = np.asarray(reduction, dtype=float)
    if np.any(f <= 0) or np.any(f > 1):
        raise ValueError("reduction factors must lie in (0, 1]")
    return f


def effective_day(day: DaySnapshot, quarantined=None, reduction=None):
    """Apply quarantine and contact-reduction modifiers to a physical day.

    ``quarantined`` is a boolean mask or iterable of ids; ``reduction`` a
    mapping or array of per-person factors. A pair is scaled by the smaller
    of its two factors and rounded half away from zero.
    """
    n = day.n
    q = _as_mask(quarantined, n)
    f = _as_factors(reduction, n)
    keep = ~(q[day.i] | q[day.j])
    d = day.d
    if f is not None:
        scale = np.minimum(np.minimum(f[day.i], f[day.j]), 1.0)
        d = np.floor(d * scale + 0.5).astype(np.int64)
        keep &= d > 0
    elif keep.all():
        return day
    return DaySnapshot._trusted(n, day.keys[keep], d[keep])


def extend_graph(graph: TemporalContactGraph, target_n: int, rng) -> TemporalContactGraph:
    """Grow a temporal graph to ``target_n`` vertices.

    Each new vertex ``v`` copies, for every existing ``w``, the whole weight
    series of ``(u, w)`` for a uniformly drawn ``u != w``. Afterwards every
    pre-existing edge series is deleted with probability ``1/(n-1)``, ``n``
    being the vertex count before the insertion.
    """
    n0 = graph.population_size
    if target_n < n0:
        raise ConfigurationError(f"target_n={target_n} is smaller than the population {n0}")
    if target_n == n0:
        return graph
    ndays = len(graph.base_days)

    # Union of all day edges; one row of durations per temporal edge.
    all_keys = np.unique(np.concatenate([day.keys for day in graph.base_days]))
    series = np.stack([day.lookup(all_keys) for day in graph.base_days], axis=1)
    cap = max(16, int(all_keys.size * target_n / n0 * 1.5) + 1024)
    src = np.zeros(cap, dtype=np.int64)
    dst = np.zeros(cap, dtype=np.int64)
    weights = np.zeros((cap, ndays), dtype=np.int64)
    m = all_keys.size
    src[:m], dst[:m] = all_keys // n0, all_keys % n0
    weights[:m] = series

    edge_id = np.full((target_n, target_n), -1, dtype=np.int32)
    edge_id[src[:m], dst[:m]] = np.arange(m)
    edge_id[dst[:m], src[:m]] = np.arange(m)
    alive = np.arange(m)

    for n in range(n0, target_n):
        v = n
        w = np.arange(n)
        u = rng.integers(0, n - 1, size=n)
        u += u >= w
        ids = edge_id[u, w]
        hit = ids >= 0
        new_w = w[hit]
        new_ids = ids[hit]
        deleted = rng.random(alive.size) < 1.0 / (n - 1)

        k = new_w.size
        if m + k > cap:
            grow = max(cap, k)
            src = np.concatenate([src, np.zeros(grow, dtype=np.int64)])
            dst = np.concatenate([dst, np.zeros(grow, dtype=np.int64)])
            weights = np.concatenate([weights, np.zeros((grow, ndays), dtype=np.int64)])
            cap += grow
        rows = np.arange(m, m + k)
        src[rows], dst[rows] = new_w, v
        weights[rows] = weights[new_ids]
        m += k

        dead = alive[deleted]
        edge_id[src[dead], dst[dead]] = -1
        edge_id[dst[dead], src[dead]] = -1
        edge_id[new_w, v] = rows
        edge_id[v, new_w] = rows
        alive = np.concatenate([alive[~deleted], rows])

    alive.sort()
    lo, hi = src[alive], dst[alive]
    days = []
    for t in range(ndays):
        d = weights[alive, t]
        sel = d > 0
        days.append(DaySnapshot.from_arrays(target_n, lo[sel], hi[sel], d[sel]))
    return TemporalContactGraph(target_n, tuple(days))
