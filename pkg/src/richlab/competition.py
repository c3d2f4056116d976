"""The two-type process: weight-based competing growth, a Markov oracle, couplings.

Two engines realize the same law by different mechanisms:

* :func:`run_two_type` races the two infections over the static per-edge clock
  variables of the deterministic weight field (competing multi-source Dijkstra,
  compiled).  Identical (master_seed, replication) pairs share weights exactly,
  which is what makes the monotone couplings checkable pathwise.
* :func:`run_two_type_markov` is an independent event-driven simulation drawing
  fresh exponential race times for every active (infected site -> uninfected
  neighbor) bond.  It agrees with the weight-based engine in distribution, not
  pathwise, and serves as a cross-validation oracle.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DomainError
from .fpp import passage_times
from .lattice import Coords, Domain, SeedConfig, enumerate_seeds
from .weights import WeightField

_REASONS = {
    _kernels.REASON_EXHAUSTED: "exhausted",
    _kernels.REASON_REACHED: "reached",
    _kernels.REASON_ENCLOSED: "enclosed",
    _kernels.REASON_HORIZON: "horizon",
}

_ARMS = {"none": 0, "type2": 1, "both": 2}


@dataclass(frozen=True)
class StopRule:
    """When a two-type run ends early.

    mode "type2": stop once type 2 reaches L-inf distance ``radius`` from its
    reference point, or has no uninfected neighbor left (enclosure).
    mode "both": stop once both types reach ``radius`` from their own reference,
    or either is enclosed short of it.  mode "none": run to exhaustion.
    ``horizon`` is a hard time stop, always reported distinctly.
    """

    radius: int | None = None
    horizon: float | None = None
    mode: str = "type2"

    def __post_init__(self):
        if self.mode not in _ARMS:
            raise ConfigurationError(f"stop mode must be one of {sorted(_ARMS)}, got {self.mode!r}")
        if self.radius is not None and self.radius < 0:
            raise ConfigurationError("stop radius must be >= 0")
        if self.mode == "both" and self.radius is None:
            raise ConfigurationError("mode 'both' needs a radius")


@dataclass
class EventLog:
    """Infection events in time order: (time, site, type)."""

    domain: Domain
    times: np.ndarray
    flats: np.ndarray
    types: np.ndarray

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        for t, f, y in zip(self.times, self.flats, self.types):
            yield float(t), self.domain.site_at(int(f)), int(y)


@dataclass
class InfectionMap:
    """Write-once per-site outcome of a two-type run."""

    domain: Domain
    state: np.ndarray  # 0 uninfected, 1, 2
    time: np.ndarray
    pred: np.ndarray
    events: EventLog | None = None

    def state_at(self, p: Coords) -> int:
        return int(self.state[self.domain.flat_index(p)])

    def time_at(self, p: Coords) -> float:
        return float(self.time[self.domain.flat_index(p)])

    def predecessor_at(self, p: Coords):
        f = self.pred[self.domain.flat_index(p)]
        return self.domain.site_at(int(f)) if f >= 0 else None

    def sites_of(self, type_index: int) -> np.ndarray:
        """(k, d) coordinates of all sites claimed by the given type."""
        return self.domain.coords_of(np.flatnonzero(self.state == type_index))


@dataclass
class RunOutcome:
    survived_to_R: bool | None
    max_type2_distance: int
    enclosure_time: float | None
    event_count: int
    max_type1_distance: int
    type1_enclosure_time: float | None
    stop_reason: str
    end_time: float

    @property
    def horizon_hit(self) -> bool:
        return self.stop_reason == "horizon"


def _seed_flats(dom: Domain, cfg: SeedConfig):
    s1, s2 = enumerate_seeds(cfg, dom.dim)
    for p in s1 + s2:
        if not dom.contains(p):
            raise DomainError(f"seed {p!r} is outside {dom}")
    s1 = sorted(s1)
    s2 = sorted(s2)
    f1 = np.asarray([dom.flat_index(p) for p in s1], dtype=np.int64)
    f2 = np.asarray([dom.flat_index(p) for p in s2], dtype=np.int64)
    return s1, s2, f1, f2


def _check_radius(dom: Domain, stop: StopRule):
    if stop.radius is not None and 2 * stop.radius > dom.half_width():
        raise ConfigurationError(
            f"stop radius {stop.radius} exceeds half the domain half-width "
            f"{dom.half_width()}: grow the domain (default rule M = 2R)"
        )


def _refs_array(dom: Domain, refs) -> np.ndarray:
    d = dom.dim
    if refs is None:
        refs = ((0,) * d, (0,) * d)
    out = np.zeros((2, d), dtype=np.int64)
    out[0] = refs[0]
    out[1] = refs[1]
    return out


def run_two_type(
    dom: Domain,
    cfg: SeedConfig,
    field: WeightField,
    stop: StopRule = StopRule(mode="none"),
    *,
    refs=None,
    keep_events: bool = True,
):
    """Race the two infections over the field's clock variables.

    Returns (InfectionMap, RunOutcome).  With a single clock and equal rates
    the claimed types equal the descent-label partition of one labeled
    multi-source passage-time run, site by site.
    """
    s1, s2, f1, f2 = _seed_flats(dom, cfg)
    if not s1 and not s2:
        raise ConfigurationError("both seed sets are empty")
    _check_radius(dom, stop)
    clock1, rate1 = field.clock_and_rate(1)
    clock2, rate2 = field.clock_and_rate(2)
    (
        state,
        time,
        pred,
        ev_t,
        ev_f,
        ev_y,
        max1,
        max2,
        enc1,
        enc2,
        reason,
        t_end,
    ) = _kernels.two_type_run(
        dom.lo_array(),
        dom.hi_array(),
        f1,
        f2,
        np.uint64(field.master_seed & ((1 << 64) - 1)),
        np.int64(field.replication_index),
        np.int64(clock1),
        np.int64(clock2),
        np.float64(rate1),
        np.float64(rate2),
        np.int64(stop.radius if stop.radius is not None else -1),
        _refs_array(dom, refs),
        np.float64(stop.horizon if stop.horizon is not None else np.inf),
        np.int64(_ARMS[stop.mode]),
    )
    events = EventLog(dom, ev_t, ev_f, ev_y) if keep_events else None
    imap = InfectionMap(dom, state, time, pred, events)
    outcome = RunOutcome(
        survived_to_R=(int(max2) >= stop.radius) if stop.radius is not None else None,
        max_type2_distance=int(max2),
        enclosure_time=None if math.isnan(enc2) else float(enc2),
        event_count=int(len(ev_t)),
        max_type1_distance=int(max1),
        type1_enclosure_time=None if math.isnan(enc1) else float(enc1),
        stop_reason=_REASONS[int(reason)],
        end_time=float(t_end),
    )
    return imap, outcome


# ---------------------------------------------------------------------------
# Independent Markov oracle
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _neighbor_table(dom: Domain) -> np.ndarray:
    """(n, 2d) in-domain neighbor flats, -1 padded, axis order minus-then-plus."""
    n = dom.size
    d = dom.dim
    flats = np.arange(n, dtype=np.int64)
    coords = dom.coords_of(flats)
    lo = dom.lo_array()
    hi = dom.hi_array()
    strides = np.asarray(dom._strides(), dtype=np.int64)
    out = np.full((n, 2 * d), -1, dtype=np.int64)
    col = 0
    for axis in range(d):
        for delta in (-1, 1):
            ok = (coords[:, axis] + delta >= lo[axis]) & (coords[:, axis] + delta <= hi[axis])
            out[ok, col] = flats[ok] + delta * strides[axis]
            col += 1
    return out


def run_two_type_markov(
    dom: Domain,
    cfg: SeedConfig,
    lam1: float,
    lam2: float,
    rng,
    stop: StopRule = StopRule(mode="none"),
    *,
    refs=None,
    keep_events: bool = True,
):
    """Event-driven continuous-time simulation with fresh exponential bond clocks.

    ``rng`` is a numpy Generator or an int seed.  Same stop semantics and
    outcome fields as :func:`run_two_type`; the two engines agree in law.
    """
    if lam1 <= 0 or lam2 <= 0:
        raise ConfigurationError("rates must be positive")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    s1, s2, f1, f2 = _seed_flats(dom, cfg)
    if not s1 and not s2:
        raise ConfigurationError("both seed sets are empty")
    _check_radius(dom, stop)

    d = dom.dim
    n = dom.size
    nbrs = _neighbor_table(dom)
    refarr = _refs_array(dom, refs)
    lo = dom.lo_array()
    strides = np.asarray(dom._strides(), dtype=np.int64)
    scales = {1: 1.0 / lam1, 2: 1.0 / lam2}
    radius = stop.radius if stop.radius is not None else -1
    horizon = stop.horizon if stop.horizon is not None else math.inf
    arm = _ARMS[stop.mode]

    state = np.zeros(n, np.uint8)
    time = np.full(n, np.inf)
    pred = np.full(n, -1, np.int64)
    ev_t, ev_f, ev_y = [], [], []
    cnt = [0, 0, 0]
    maxd = [0, -1, -1]
    enc = [None, None, None]
    heap: list = []

    def linf(flat: int, typ: int) -> int:
        c = flat // strides % np.asarray(dom.shape, dtype=np.int64) + lo
        return int(np.max(np.abs(c - refarr[typ - 1])))

    def place(flat: int, typ: int, t: float, pflat: int):
        state[flat] = typ
        time[flat] = t
        pred[flat] = pflat
        ev_t.append(t)
        ev_f.append(flat)
        ev_y.append(typ)
        dist = linf(flat, typ)
        if dist > maxd[typ]:
            maxd[typ] = dist
        live = []
        for y in nbrs[flat]:
            if y < 0:
                continue
            sy = state[y]
            if sy == 0:
                cnt[typ] += 1
                live.append(int(y))
            else:
                cnt[sy] -= 1
        if live:
            draws = rng.exponential(scale=scales[typ], size=len(live))
            for y, w in zip(live, draws):
                heapq.heappush(heap, (t + float(w), y, typ, flat))

    for f in f1:
        state[f] = 1
        time[f] = 0.0
        ev_t.append(0.0)
        ev_f.append(int(f))
        ev_y.append(1)
    for f in f2:
        state[f] = 2
        time[f] = 0.0
        ev_t.append(0.0)
        ev_f.append(int(f))
        ev_y.append(2)
    for f, typ in [(int(f), 1) for f in f1] + [(int(f), 2) for f in f2]:
        dist = linf(f, typ)
        if dist > maxd[typ]:
            maxd[typ] = dist
        live = [y for y in nbrs[f] if y >= 0 and state[y] == 0]
        cnt[typ] += len(live)
        if live:
            draws = rng.exponential(scale=scales[typ], size=len(live))
            for y, w in zip(live, draws):
                heapq.heappush(heap, (float(w), int(y), typ, f))

    for typ in (1, 2):
        if cnt[typ] == 0:
            enc[typ] = 0.0

    reason = "exhausted"
    t_end = 0.0

    def stopped() -> str | None:
        if radius >= 0:
            if arm == 1 and maxd[2] >= radius:
                return "reached"
            if arm == 2 and maxd[1] >= radius and maxd[2] >= radius:
                return "reached"
        if arm == 1 and cnt[2] == 0:
            return "enclosed"
        if arm == 2 and ((cnt[2] == 0 and maxd[2] < radius) or (cnt[1] == 0 and maxd[1] < radius)):
            return "enclosed"
        return None

    early = stopped()
    if early is None:
        while heap:
            t, flat, typ, pflat = heapq.heappop(heap)
            if state[flat] != 0:
                continue  # stale entry: the site was claimed earlier
            if t > horizon:
                reason = "horizon"
                t_end = horizon
                break
            place(flat, typ, t, pflat)
            t_end = t
            for k in (1, 2):
                if cnt[k] == 0 and enc[k] is None:
                    enc[k] = t
            early = stopped()
            if early is not None:
                reason = early
                break
    else:
        reason = early

    events = None
    if keep_events:
        events = EventLog(
            dom,
            np.asarray(ev_t, dtype=np.float64),
            np.asarray(ev_f, dtype=np.int64),
            np.asarray(ev_y, dtype=np.uint8),
        )
    imap = InfectionMap(dom, state, time, pred, events)
    outcome = RunOutcome(
        survived_to_R=(maxd[2] >= radius) if stop.radius is not None else None,
        max_type2_distance=maxd[2],
        enclosure_time=enc[2],
        event_count=len(ev_t),
        max_type1_distance=maxd[1],
        type1_enclosure_time=enc[1],
        stop_reason=reason,
        end_time=t_end,
    )
    return imap, outcome


# ---------------------------------------------------------------------------
# Pathwise couplings
# ---------------------------------------------------------------------------


@dataclass
class CouplingReport:
    ok: bool
    sites_checked: int
    violations: int
    first_violation: tuple | None


def _containment_check(run_small, run_big) -> CouplingReport:
    """Verify xi1_A(t) subset xi1_B(t) and xi2_A(t) superset xi2_B(t) at all times.

    Because states are write-once, containment at every event time is
    equivalent to the per-site condition checked here.
    """
    a, b = run_small, run_big
    if a.domain == b.domain:
        fa = np.arange(a.domain.size)
        fb = fa
    else:
        fa = np.arange(a.domain.size)
        fb = b.domain.flats_of(a.domain.coords_of(fa))
    bad1 = (a.state[fa] == 1) & ~((b.state[fb] == 1) & (b.time[fb] <= a.time[fa]))
    bad2 = (b.state[fb] == 2) & ~((a.state[fa] == 2) & (a.time[fa] <= b.time[fb]))
    # any type-2 site of B outside A's domain breaks the superset relation
    extra = 0
    first = None
    if a.domain != b.domain:
        outside = np.ones(b.domain.size, bool)
        outside[fb] = False
        extra = int(np.count_nonzero((b.state == 2) & outside))
    bad = bad1 | bad2
    viol = int(np.count_nonzero(bad)) + extra
    if viol and bad.any():
        f = int(np.flatnonzero(bad)[0])
        first = (a.domain.site_at(f), "type1-subset" if bad1[f] else "type2-superset")
    return CouplingReport(viol == 0, int(len(fa)), viol, first)


def coupled_pair(
    dom_a: Domain,
    cfg_a: SeedConfig,
    dom_b: Domain,
    cfg_b: SeedConfig,
    field: WeightField,
    *,
    variant: str = "containment",
) -> CouplingReport:
    """Run two processes on identical weights and report pathwise monotonicity.

    variant "containment": two-type runs; requires cfg_a.type1 within
    cfg_b.type1, cfg_a.type2 containing cfg_b.type2 and dom_a within dom_b.
    variant "subgraph-time": one-type runs with the same sources on nested
    domains; reports whether every site is infected no later in the supergraph.
    """
    if not dom_b.contains_domain(dom_a):
        raise ConfigurationError("dom_a must be contained in dom_b")
    if variant == "containment":
        d = dom_a.dim
        a1, a2 = enumerate_seeds(cfg_a, d)
        b1, b2 = enumerate_seeds(cfg_b, d)
        if not set(a1) <= set(b1) or not set(a2) >= set(b2):
            raise ConfigurationError(
                "containment coupling needs cfg_a.type1 within cfg_b.type1 "
                "and cfg_a.type2 containing cfg_b.type2"
            )
        ia, _ = run_two_type(dom_a, cfg_a, field, StopRule(mode="none"), keep_events=False)
        ib, _ = run_two_type(dom_b, cfg_b, field, StopRule(mode="none"), keep_events=False)
        return _containment_check(ia, ib)
    if variant == "subgraph-time":
        if cfg_a != cfg_b:
            raise ConfigurationError("subgraph-time coupling uses the same cfg on both domains")
        s1, s2 = enumerate_seeds(cfg_a, dom_a.dim)
        sources = s1 + s2
        ra = passage_times(dom_a, sources, field, 1)
        rb = passage_times(dom_b, sources, field, 1)
        fa = np.arange(dom_a.size)
        fb = dom_b.flats_of(dom_a.coords_of(fa)) if dom_a != dom_b else fa
        bad = rb.time[fb] > ra.time[fa]
        viol = int(np.count_nonzero(bad))
        first = None
        if viol:
            f = int(np.flatnonzero(bad)[0])
            first = (dom_a.site_at(f), "supergraph-later")
        return CouplingReport(viol == 0, int(len(fa)), viol, first)
    raise ConfigurationError(f"unknown coupling variant {variant!r}")
