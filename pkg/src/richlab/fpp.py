"""One-type first-passage computations: passage times, descent labels, records.

Everything here is a thin wrapper around the compiled multi-source Dijkstra in
:mod:`richlab._kernels`; weights are sampled lazily on first touch through the
pure counter-based field, so two calls with overlapping domains and the same
(master_seed, replication) share weights on shared edges exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError, ContractViolation, DomainError
from .lattice import Coords, Domain, Region, axis_point
from .weights import WeightField


@dataclass
class PassageResult:
    """Per-site passage times, descent labels and predecessors over a finite domain.

    ``source_index[f] == i`` means site f descends from ``sources[i]``; -1 marks
    sites the run never settled (outside reach of the sources, beyond a stop
    time, or behind a restriction).
    """

    domain: Domain
    sources: tuple
    time: np.ndarray
    source_index: np.ndarray
    pred: np.ndarray

    def reached(self, p: Coords) -> bool:
        return math.isfinite(self.time[self.domain.flat_index(p)])

    def time_at(self, p: Coords) -> float:
        return float(self.time[self.domain.flat_index(p)])

    def descent_at(self, p: Coords):
        """The source whose infection first reaches p (None if unreached)."""
        i = self.source_index[self.domain.flat_index(p)]
        return self.sources[i] if i >= 0 else None

    def predecessor_at(self, p: Coords):
        f = self.pred[self.domain.flat_index(p)]
        return self.domain.site_at(int(f)) if f >= 0 else None

    def times_at(self, points) -> np.ndarray:
        return self.time[[self.domain.flat_index(p) for p in points]]


def _prep_sources(dom: Domain, sources) -> tuple:
    pts = sorted(set(tuple(p) for p in sources))
    if not pts:
        raise ContractViolation("sources must be nonempty")
    for p in pts:
        if not dom.contains(p):
            raise DomainError(f"source {p!r} is outside {dom}")
    flats = np.asarray([dom.flat_index(p) for p in pts], dtype=np.int64)
    return tuple(pts), flats


def _run(dom, src_flats, field: WeightField, type_index, x1_cap, target_mask, stop_time):
    clock, rate = field.clock_and_rate(type_index)
    return _kernels.one_type_run(
        dom.lo_array(),
        dom.hi_array(),
        src_flats,
        np.uint64(field.master_seed & ((1 << 64) - 1)),
        np.int64(field.replication_index),
        np.int64(clock),
        np.float64(rate),
        np.int64(x1_cap if x1_cap is not None else dom.hi[0]),
        target_mask if target_mask is not None else np.zeros(0, np.uint8),
        np.float64(stop_time if stop_time is not None else np.inf),
    )


def passage_times(
    dom: Domain,
    sources,
    field: WeightField,
    type_index: int = 1,
    *,
    stop_time=None,
) -> PassageResult:
    """Exact multi-source shortest-path passage times within dom.

    The descent label of a settled site is the source attaining the minimum
    (ties, a probability-zero event, go to the lexicographically smallest
    source).  With ``stop_time`` the run halts once the growing front passes
    that time; later sites stay unreached.
    """
    pts, flats = _prep_sources(dom, sources)
    time, label, pred, _, _ = _run(dom, flats, field, type_index, None, None, stop_time)
    return PassageResult(dom, pts, time, label, pred)


def restricted_passage_times(
    dom: Domain, sources, field: WeightField, type_index: int, b: int
) -> PassageResult:
    """Passage times over paths that never visit a vertex with first coordinate > b."""
    pts, flats = _prep_sources(dom, sources)
    for p in pts:
        if p[0] > b:
            raise ContractViolation(f"restricted run requires sources with x1 <= {b}, got {p!r}")
    time, label, pred, _, _ = _run(dom, flats, field, type_index, b, None, None)
    return PassageResult(dom, pts, time, label, pred)


def _target_mask(dom: Domain, target) -> np.ndarray:
    mask = np.zeros(dom.size, np.uint8)
    if isinstance(target, Region):
        hits = [p for p in target.sites(dom.dim) if dom.contains(p)]
        for p in hits:
            mask[dom.flat_index(p)] = 1
    elif isinstance(target, np.ndarray) and target.dtype == np.uint8 and target.shape == (dom.size,):
        mask = target
    else:
        for p in target:
            p = tuple(p)
            if dom.contains(p):
                mask[dom.flat_index(p)] = 1
    if not mask.any():
        raise DomainError("target does not intersect the domain")
    return mask


def first_hit_time(
    dom: Domain, sources, target, field: WeightField, type_index: int = 1
) -> float:
    """Minimal passage time from the source set to any site of target."""
    mask = _target_mask(dom, target)
    pts, flats = _prep_sources(dom, sources)
    _, _, _, hit_flat, hit_time = _run(dom, flats, field, type_index, None, mask, None)
    if hit_flat < 0:
        raise DomainError("target unreachable from the sources within the domain")
    return float(hit_time)


def passage_time_to_set(
    dom: Domain, source: Coords, target, field: WeightField, type_index: int = 1
) -> float:
    """Minimal passage time from source to any site of target (region or point list)."""
    return first_hit_time(dom, [source], target, field, type_index)


# ---------------------------------------------------------------------------
# Descent counts through a hyperplane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DescentCounts:
    """Number of depth-b hyperplane sites whose infection descends from the origin.

    ``count`` uses unrestricted paths within the slab; ``confined_count`` uses
    paths that never pass the target plane (first coordinate kept <= b).  Both
    are computed on the same weights.
    """

    count: int
    confined_count: int


def descent_counts(
    b: int, W: int, overshoot: int | None, field: WeightField, d: int = 2
) -> DescentCounts:
    """Run the hyperplane-seeded growth on a slab and count origin-descended sites at depth b.

    ``overshoot`` is the extra room beyond the planes x1=0 and x1=b that paths
    may wander through before the counts are read; None defaults it to b.
    """
    if b < 0:
        raise ConfigurationError("b must be >= 0")
    if overshoot is None:
        overshoot = b
    if overshoot < 0:
        raise ConfigurationError("overshoot must be >= 0")
    if W < b:
        raise ConfigurationError(
            f"lateral half-width W={W} must be >= b={b}: otherwise truncation bias is unbounded"
        )
    dom = Domain.slab(d, -overshoot, b + overshoot, W)
    src_flats = dom.plane_flats(0)
    origin_label = int(np.searchsorted(src_flats, dom.flat_index((0,) * d)))
    target_flats = dom.plane_flats(b)

    free = _run(dom, src_flats, field, 1, None, None, None)
    confined = _run(dom, src_flats, field, 1, b, None, None)
    n_free = int(np.count_nonzero(free[1][target_flats] == origin_label))
    n_conf = int(np.count_nonzero(confined[1][target_flats] == origin_label))
    return DescentCounts(n_free, n_conf)


# ---------------------------------------------------------------------------
# Axis records
# ---------------------------------------------------------------------------


@dataclass
class RecordTrace:
    """Axis passage times with rightmost-at-infection record flags and counts.

    A node n is flagged as a record when its time beats every axis node beyond
    it up to the horizon n_max; flags within k_guard of the horizon carry a
    finite-horizon caveat and are marked unreliable.  ``axis_counts[j]`` is the
    number of axis nodes n >= 1 infected by probe_times[j]; ``record_counts``
    restricts that to flagged records.
    """

    n_max: int
    k_guard: int
    axis_times: np.ndarray
    record_flags: np.ndarray
    reliable: np.ndarray
    probe_times: tuple
    axis_counts: np.ndarray
    record_counts: np.ndarray


def record_trace(
    dom: Domain,
    field: WeightField,
    n_max: int,
    probe_times,
    k_guard: int = 16,
    *,
    stop_time=None,
    type_index: int = 1,
) -> RecordTrace:
    d = dom.dim
    origin = (0,) * d
    for l in (0, n_max):
        if not dom.contains(axis_point(l, d)):
            raise DomainError(f"domain must contain the axis segment 0..{n_max}")
    res = passage_times(dom, [origin], field, type_index, stop_time=stop_time)
    axis_flats = np.asarray([dom.flat_index(axis_point(l, d)) for l in range(n_max + 1)], np.int64)
    t_axis = res.time[axis_flats]

    suffix = np.empty(n_max + 2)
    suffix[n_max + 1] = np.inf
    for l in range(n_max, -1, -1):
        suffix[l] = min(t_axis[l], suffix[l + 1])
    flags = t_axis < suffix[1:]
    reliable = np.arange(n_max + 1) <= n_max - k_guard

    probes = tuple(float(t) for t in probe_times)
    y = np.empty(len(probes), np.int64)
    yr = np.empty(len(probes), np.int64)
    for j, t in enumerate(probes):
        infected = t_axis[1:] <= t
        y[j] = int(np.count_nonzero(infected))
        yr[j] = int(np.count_nonzero(infected & flags[1:]))
    return RecordTrace(n_max, k_guard, t_axis, flags, reliable, probes, y, yr)


# ---------------------------------------------------------------------------
# Hampered (tube-confined) growth
# ---------------------------------------------------------------------------


def hampered_front(
    b: int, lam: float, x1_max: int, field: WeightField, d: int = 2, back: int = 16
) -> np.ndarray:
    """Axis passage times of a single-origin run confined to the radius-b tube.

    Returns T(0..x1_max) along the first axis; used to estimate the tube speed
    constant lim T(n)/n.  ``back`` adds room behind the origin so mildly
    backtracking paths are not cut off.
    """
    if b < 0:
        raise ConfigurationError("tube radius b must be >= 0")
    dom = Domain.tube(d, b, -back, x1_max)
    clock, _ = field.clock_and_rate(1)
    pts, flats = _prep_sources(dom, [(0,) * d])
    time, _, _, _, _ = _kernels.one_type_run(
        dom.lo_array(),
        dom.hi_array(),
        flats,
        np.uint64(field.master_seed & ((1 << 64) - 1)),
        np.int64(field.replication_index),
        np.int64(clock),
        np.float64(lam),
        np.int64(dom.hi[0]),
        np.zeros(0, np.uint8),
        np.float64(np.inf),
    )
    axis_flats = np.asarray([dom.flat_index(axis_point(l, d)) for l in range(x1_max + 1)], np.int64)
    return time[axis_flats]
