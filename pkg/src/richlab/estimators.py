"""Monte Carlo experiments and statistics over the growth engines.

Every estimator is a pure function of (master_seed, parameters): replication r
uses the weight field at replication_index r, so repeated invocations are
bit-identical and replications can run on any number of threads without
changing a single output byte (results are gathered per replication index and
reduced in a fixed order).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import calibration
from .competition import StopRule, run_two_type, run_two_type_markov
from .errors import ConfigurationError, ContractViolation, UnsupportedError
from .fpp import first_hit_time, hampered_front, passage_time_to_set, passage_times, record_trace
from .lattice import (
    Domain,
    Empty,
    Explicit,
    HalfAxisMinusOrigin,
    HyperplaneMinusOrigin,
    Origin,
    Region,
    SeedConfig,
    axis_point,
    dihedral_symmetries,
)
from .weights import SINGLE_CLOCK, TWO_CLOCK, WeightField

Z95 = 1.959963984540054  # two-sided 95% normal quantile


# ---------------------------------------------------------------------------
# Point estimates with confidence intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a 95% confidence interval and sample count."""

    mean: float
    ci_lo: float
    ci_hi: float
    n: int
    kind: str  # "mean-clt" or "proportion-wilson"

    def overlaps(self, other: "Estimate") -> bool:
        return max(self.ci_lo, other.ci_lo) <= min(self.ci_hi, other.ci_hi)

    @property
    def half_width(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2.0


def mean_estimate(values) -> Estimate:
    """Sample mean with a CLT interval (needs at least two values)."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise ContractViolation("mean_estimate needs at least 2 samples")
    m = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(x.size))
    return Estimate(m, m - Z95 * se, m + Z95 * se, int(x.size), "mean-clt")


def wilson_estimate(successes: int, n: int) -> Estimate:
    """Wilson score interval for a binomial proportion (never Wald)."""
    if n < 1 or not 0 <= successes <= n:
        raise ContractViolation(f"bad proportion inputs: {successes}/{n}")
    p = successes / n
    z2 = Z95 * Z95
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    hw = (Z95 / denom) * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    lo = 0.0 if successes == 0 else max(0.0, center - hw)
    hi = 1.0 if successes == n else min(1.0, center + hw)
    return Estimate(p, lo, hi, n, "proportion-wilson")


def ks_two_sample(samples_a, samples_b):
    """Classical two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = np.sort(np.asarray(samples_a, dtype=np.float64))
    b = np.sort(np.asarray(samples_b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ContractViolation("ks_two_sample needs nonempty samples")
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / a.size
    cdf_b = np.searchsorted(b, both, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    lam = (en + 0.12 + 0.11 / en) * d
    if lam <= 0.0:
        return d, 1.0
    # Kolmogorov tail Q(lam) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2)
    p = 0.0
    for k in range(1, 101):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        p += term
        if abs(term) < 1e-12:
            break
    return d, float(min(1.0, max(0.0, p)))


def _map_reps(worker, reps: int, threads: int) -> list:
    """Run worker(0..reps-1), gathered in replication order regardless of threads."""
    if reps < 1:
        raise ConfigurationError("reps must be >= 1")
    if threads <= 1:
        return [worker(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, range(reps)))


# ---------------------------------------------------------------------------
# Axis time constant
# ---------------------------------------------------------------------------


@dataclass
class MuResult:
    estimate: Estimate
    samples: np.ndarray  # per-replication T(n e1)/n
    params: dict


def estimate_mu(
    lam: float,
    n: int,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    lateral: int | None = None,
    back: int | None = None,
    threads: int = 1,
) -> MuResult:
    """Mean of T^0(n e1)/n over replications, with a CLT interval.

    The domain is auto-sized with lateral margin >= n/2 unless overridden.
    """
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    lateral = max(16, -(-n // 2)) if lateral is None else lateral
    if lateral < n // 2:
        raise ConfigurationError(f"lateral margin {lateral} below the n/2 rule for n={n}")
    back = max(8, n // 8) if back is None else back
    dom = Domain.slab(d, -back, n + back, lateral)
    target = [axis_point(n, d)]
    origin = [(0,) * d]

    def worker(r: int) -> float:
        f = WeightField(seed, r, TWO_CLOCK, lam, lam)
        return passage_time_to_set(dom, origin[0], target, f, 1) / n

    samples = np.asarray(_map_reps(worker, reps, threads))
    return MuResult(
        mean_estimate(samples),
        samples,
        {"lam": lam, "n": n, "reps": reps, "seed": seed, "d": d, "lateral": lateral, "back": back},
    )


@dataclass
class HyperplaneMuResult:
    """Hyperplane-seeded axis estimate plus its origin-seeded pair and duality check.

    ``samples_origin`` shares weights with ``samples_hyperplane`` replication by
    replication (pathwise comparable); ``samples_origin_to_plane`` uses fresh
    replications so the Kolmogorov-Smirnov comparison sees independent sides.
    """

    estimate: Estimate
    origin_estimate: Estimate
    samples_hyperplane: np.ndarray
    samples_origin: np.ndarray
    samples_origin_to_plane: np.ndarray
    ks_stat: float
    ks_pvalue: float
    pathwise_violations: int
    params: dict


def estimate_mu_hyperplane(
    lam: float,
    n: int,
    reps: int,
    W: int,
    seed: int,
    *,
    d: int = 2,
    back: int | None = None,
    threads: int = 1,
) -> HyperplaneMuResult:
    """T^H(n e1)/n with the paired origin estimate and the plane-target dual sample."""
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    if W < 4 * n:
        raise ConfigurationError(f"hyperplane truncation W={W} must be >= 4n = {4 * n}")
    back = max(8, n // 4) if back is None else back
    dom = Domain.slab(d, -back, n + back, W)
    plane0 = [tuple(c) for c in dom.coords_of(dom.plane_flats(0))]
    target_pt = axis_point(n, d)
    origin = (0,) * d
    plane_n_mask = np.zeros(dom.size, np.uint8)
    plane_n_mask[dom.plane_flats(n)] = 1

    def worker(r: int):
        f = WeightField(seed, r, TWO_CLOCK, lam, lam)
        th = first_hit_time(dom, plane0, [target_pt], f, 1)
        t0 = passage_time_to_set(dom, origin, [target_pt], f, 1)
        return th, t0

    def worker_dual(r: int) -> float:
        f = WeightField(seed, reps + r, TWO_CLOCK, lam, lam)
        return passage_time_to_set(dom, origin, plane_n_mask, f, 1)

    pairs = _map_reps(worker, reps, threads)
    th = np.asarray([p[0] for p in pairs])
    t0 = np.asarray([p[1] for p in pairs])
    dual = np.asarray(_map_reps(worker_dual, reps, threads))
    ks_d, ks_p = ks_two_sample(th, dual)
    return HyperplaneMuResult(
        mean_estimate(th / n),
        mean_estimate(t0 / n),
        th,
        t0,
        dual,
        ks_d,
        ks_p,
        int(np.count_nonzero(th > t0)),
        {"lam": lam, "n": n, "reps": reps, "W": W, "seed": seed, "d": d, "back": back},
    )


def estimate_mu_hampered(
    lam: float,
    b: int,
    n: int,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    back: int = 16,
    threads: int = 1,
) -> MuResult:
    """Tube speed constant estimate: mean of T(n e1)/n in the radius-b tube."""
    if n < 1:
        raise ConfigurationError("n must be >= 1")

    def worker(r: int) -> float:
        f = WeightField(seed, r, TWO_CLOCK, lam, lam)
        return float(hampered_front(b, lam, n, f, d, back)[n]) / n

    samples = np.asarray(_map_reps(worker, reps, threads))
    return MuResult(
        mean_estimate(samples),
        samples,
        {"lam": lam, "b": b, "n": n, "reps": reps, "seed": seed, "d": d, "back": back},
    )


# ---------------------------------------------------------------------------
# Two-type survival
# ---------------------------------------------------------------------------


@dataclass
class SurvivalPoint:
    radius: int
    survived: int
    reps: int
    estimate: Estimate


@dataclass
class SurvivalCurve:
    points: list
    reach: np.ndarray  # per-replication max type-2 L-inf distance
    horizon_hits: int
    params: dict


def _type1_region(type1, M: int) -> Region:
    """Resolve a family name or region; truncated regions must span the domain.

    Regions wider than the domain are clipped to it (the seed line runs wall to
    wall either way); narrower ones are rejected, because a seed line that
    stops short of the wall changes the experiment (type 2 can slip around a
    short hyperplane, and a short half-axis is a bounded configuration).
    """
    if isinstance(type1, str):
        if type1 == "hyperplane":
            return HyperplaneMinusOrigin(M)
        if type1 == "halfaxis":
            return HalfAxisMinusOrigin(M)
        if type1 == "empty":
            return Empty()
        raise ConfigurationError(f"unknown seed family {type1!r}")
    if isinstance(type1, HyperplaneMinusOrigin):
        if type1.half_width < M:
            raise ConfigurationError(
                f"hyperplane W={type1.half_width} must span the domain (W >= M = {M}), "
                "or type 2 could slip around the truncated seed line"
            )
        return HyperplaneMinusOrigin(M)
    if isinstance(type1, HalfAxisMinusOrigin):
        if type1.depth < M:
            raise ConfigurationError(
                f"half-axis L={type1.depth} must span the domain (L >= M = {M}); "
                "a shorter axis is a bounded configuration, a different experiment"
            )
        return HalfAxisMinusOrigin(M)
    return type1


def survival_curve(
    type1,
    radii,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    lam1: float = 1.0,
    lam2: float = 1.0,
    clock_mode: str = TWO_CLOCK,
    M: int | None = None,
    horizon: float | None = None,
    engine: str = "weights",
    threads: int = 1,
) -> SurvivalCurve:
    """Proportion of runs in which type 2 reaches L-inf distance R, per R.

    One run per replication on the domain sized for max(radii); the per-R
    indicators are read off the same run (nested design), so each curve is
    monotone nonincreasing in R pathwise by construction.
    """
    radii = [int(R) for R in radii]
    if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigurationError("radii must be a nonempty increasing list")
    if any(R < 0 for R in radii):
        raise ConfigurationError("radii must be >= 0")
    r_max = radii[-1]
    M = 2 * r_max if M is None else M
    if 2 * r_max > M:
        raise ConfigurationError(f"largest radius {r_max} exceeds the domain rule M = 2R (M={M})")
    region1 = _type1_region(type1, M)
    cfg = SeedConfig(region1, Origin())
    dom = Domain.box(d, M)
    if horizon is None:
        horizon = (
            calibration.HORIZON_FACTOR
            * r_max
            * calibration.AXIS_TIME_CONSTANT_D2
            / min(lam1, lam2)
        )
    stop = StopRule(radius=r_max, horizon=horizon, mode="type2")
    if engine not in ("weights", "markov"):
        raise ConfigurationError(f"unknown engine {engine!r}")

    def worker(r: int):
        if engine == "weights":
            f = WeightField(seed, r, clock_mode, lam1, lam2)
            _, out = run_two_type(dom, cfg, f, stop, keep_events=False)
        else:
            rng = np.random.default_rng(np.random.SeedSequence((seed, r, 0x757276)))
            _, out = run_two_type_markov(dom, cfg, lam1, lam2, rng, stop, keep_events=False)
        return out.max_type2_distance, out.horizon_hit

    results = _map_reps(worker, reps, threads)
    reach = np.asarray([r for r, _ in results], dtype=np.int64)
    horizon_hits = sum(1 for _, h in results if h)
    points = [
        SurvivalPoint(R, int(np.count_nonzero(reach >= R)), reps, wilson_estimate(int(np.count_nonzero(reach >= R)), reps))
        for R in radii
    ]
    return SurvivalCurve(
        points,
        reach,
        horizon_hits,
        {
            "type1": type1 if isinstance(type1, str) else type(region1).__name__,
            "radii": radii,
            "reps": reps,
            "seed": seed,
            "d": d,
            "lam1": lam1,
            "lam2": lam2,
            "clock_mode": clock_mode,
            "M": M,
            "horizon": horizon,
            "engine": engine,
        },
    )


# ---------------------------------------------------------------------------
# Records along the axis
# ---------------------------------------------------------------------------


@dataclass
class RecordProbabilityResult:
    estimate: Estimate
    indicators: np.ndarray
    params: dict


def record_probability(
    n: int,
    K: int,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    lam: float = 1.0,
    lateral: int | None = None,
    back: int | None = None,
    threads: int = 1,
) -> RecordProbabilityResult:
    """Proportion of runs where T(n e1) is minimal among T(l e1), n <= l <= n+K."""
    if n < 0 or K < 0:
        raise ConfigurationError("n and K must be >= 0")
    span = n + K
    lateral = max(16, -(-span // 2)) if lateral is None else lateral
    back = max(8, span // 8) if back is None else back
    dom = Domain.slab(d, -back, span + back, lateral)
    axis_flats = [dom.flat_index(axis_point(l, d)) for l in range(n, span + 1)]
    origin = (0,) * d

    def worker(r: int) -> bool:
        f = WeightField(seed, r, TWO_CLOCK, lam, lam)
        t = passage_times(dom, [origin], f, 1).time[axis_flats]
        return bool(t[0] <= t.min())

    ind = np.asarray(_map_reps(worker, reps, threads), dtype=bool)
    return RecordProbabilityResult(
        wilson_estimate(int(ind.sum()), reps),
        ind,
        {"n": n, "K": K, "reps": reps, "seed": seed, "d": d, "lam": lam,
         "lateral": lateral, "back": back},
    )


@dataclass
class RecordRatesResult:
    axis_rate: Estimate  # mean of Y(t)/t
    record_rate: Estimate  # mean of Y->(t)/t
    axis_samples: np.ndarray
    record_samples: np.ndarray
    params: dict


def record_rates(
    t: float,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    lam: float = 1.0,
    lateral: int | None = None,
    guard: int = 16,
    threads: int = 1,
) -> RecordRatesResult:
    """Per-time rates of axis infections Y(t)/t and rightmost records Y->(t)/t."""
    if t <= 0:
        raise ConfigurationError("probe time t must be > 0")
    front = t * lam * calibration.AXIS_SPEED_D2
    n_max = int(math.ceil(front * calibration.RECORD_DOMAIN_MARGIN)) + guard
    lateral = max(32, int(front**0.7) + 16) if lateral is None else lateral
    dom = Domain.slab(d, -16, n_max + 16, lateral)

    def worker(r: int):
        f = WeightField(seed, r, TWO_CLOCK, lam, lam)
        tr = record_trace(dom, f, n_max, [t], guard, stop_time=t)
        return tr.axis_counts[0] / t, tr.record_counts[0] / t

    pairs = _map_reps(worker, reps, threads)
    ya = np.asarray([p[0] for p in pairs])
    yr = np.asarray([p[1] for p in pairs])
    return RecordRatesResult(
        mean_estimate(ya),
        mean_estimate(yr),
        ya,
        yr,
        {"t": t, "reps": reps, "seed": seed, "d": d, "lam": lam,
         "n_max": n_max, "lateral": lateral, "guard": guard},
    )


# ---------------------------------------------------------------------------
# Shape diagnostics (d = 2)
# ---------------------------------------------------------------------------


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain convex hull of integer points, counterclockwise, (h, 2)."""
    pts = np.unique(np.asarray(points, dtype=np.int64), axis=0)
    if pts.shape[0] <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1], dtype=np.int64)


def _sites_inside_hull(hull: np.ndarray) -> int:
    """Number of lattice sites inside or on the hull polygon (row-interval count)."""
    if hull.shape[0] == 1:
        return 1
    xs = hull[:, 0]
    x_min, x_max = int(xs.min()), int(xs.max())
    lo = np.full(x_max - x_min + 1, np.inf)
    hi = np.full(x_max - x_min + 1, -np.inf)
    h = hull.shape[0]
    eps = 1e-9
    for i in range(h):
        p = hull[i]
        q = hull[(i + 1) % h]
        x0, y0 = int(p[0]), float(p[1])
        x1, y1 = int(q[0]), float(q[1])
        if x0 == x1:
            j = x0 - x_min
            lo[j] = min(lo[j], y0, y1)
            hi[j] = max(hi[j], y0, y1)
            continue
        step = 1 if x1 > x0 else -1
        for x in range(x0, x1 + step, step):
            y = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            j = x - x_min
            lo[j] = min(lo[j], y)
            hi[j] = max(hi[j], y)
    total = 0
    for j in range(lo.shape[0]):
        if hi[j] >= lo[j]:
            total += int(math.floor(hi[j] + eps)) - int(math.ceil(lo[j] - eps)) + 1
    return total


@dataclass
class ShapeSnapshot:
    """Scaled infected set with convexity and lattice-symmetry scores (d=2).

    Points are scaled by rate * time, so shared-seed runs at (lam, t) and
    (2 lam, t/2) produce identical snapshots.  Scores are in [0, 1]: the
    deficiency is the fraction of hull-covered lattice cells not infected, the
    symmetry deviation the mean normalized set difference under the 7
    non-identity dihedral symmetries.
    """

    scaled_points: np.ndarray
    hull: np.ndarray
    deficiency: float
    symmetry_deviation: float
    t: float
    lam: float


def shape_snapshot(coords: np.ndarray, t: float, lam: float) -> ShapeSnapshot:
    coords = np.asarray(coords, dtype=np.int64)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise UnsupportedError("shape diagnostics are restricted to d=2")
    if coords.shape[0] == 0:
        raise ContractViolation("empty infected set")
    k = coords.shape[0]
    hull = convex_hull(coords)
    inside = _sites_inside_hull(hull)
    deficiency = 1.0 - k / inside if inside > 0 else 0.0

    c = int(np.abs(coords).max()) + 1
    keys = (coords[:, 0] + c) * (2 * c + 1) + (coords[:, 1] + c)
    keys = np.sort(keys)
    devs = []
    for g in dihedral_symmetries()[1:]:
        m = np.zeros((2, 2), dtype=np.int64)
        m[0, g.perm[0]] = g.signs[0]
        m[1, g.perm[1]] = g.signs[1]
        tc = coords @ m.T
        tkeys = np.sort((tc[:, 0] + c) * (2 * c + 1) + (tc[:, 1] + c))
        common = np.intersect1d(keys, tkeys, assume_unique=True).size
        devs.append(1.0 - common / k)
    return ShapeSnapshot(
        coords / (lam * t),
        hull,
        float(max(0.0, deficiency)),
        float(np.mean(devs)),
        t,
        lam,
    )


@dataclass
class ShapeCheckResult:
    mean_deficiency: float
    mean_symmetry_deviation: float
    deficiency_samples: np.ndarray
    deviation_samples: np.ndarray
    params: dict


def shape_check(
    lam: float,
    t: float,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    margin: float | None = None,
    threads: int = 1,
) -> ShapeCheckResult:
    """Aggregate shape scores of single-origin runs stopped at time t (d=2 only)."""
    if d != 2:
        raise UnsupportedError("shape diagnostics are restricted to d=2")
    if t <= 0:
        raise ConfigurationError("snapshot time t must be > 0")
    margin = calibration.SHAPE_DOMAIN_MARGIN if margin is None else margin
    M = int(math.ceil(t * lam * calibration.AXIS_SPEED_D2 * margin)) + 8
    dom = Domain.box(2, M)
    origin = (0, 0)

    def worker(r: int):
        f = WeightField(seed, r, TWO_CLOCK, lam, lam)
        res = passage_times(dom, [origin], f, 1, stop_time=t)
        coords = dom.coords_of(np.flatnonzero(res.time <= t))
        snap = shape_snapshot(coords, t, lam)
        return snap.deficiency, snap.symmetry_deviation

    pairs = _map_reps(worker, reps, threads)
    defs = np.asarray([p[0] for p in pairs])
    devs = np.asarray([p[1] for p in pairs])
    return ShapeCheckResult(
        float(defs.mean()),
        float(devs.mean()),
        defs,
        devs,
        {"lam": lam, "t": t, "reps": reps, "seed": seed, "M": M, "margin": margin},
    )


# ---------------------------------------------------------------------------
# Coexistence scan (two single seeds, critical rates, one clock)
# ---------------------------------------------------------------------------


@dataclass
class CoexistencePoint:
    separation: int
    both_reached: int
    reps: int
    estimate: Estimate


@dataclass
class CoexistenceScan:
    points: list
    params: dict


def coexistence_scan(
    separations,
    R: int,
    reps: int,
    seed: int,
    *,
    d: int = 2,
    M: int | None = None,
    threads: int = 1,
) -> CoexistenceScan:
    """P(both types reach L-inf distance R from their own seed), per seed separation.

    Type 1 at the origin, type 2 at (n, 0, ..., 0), unit rates on a single
    clock, so the partition equals the descent partition of the shared metric.
    """
    seps = [int(v) for v in separations]
    if any(v == 0 for v in seps):
        raise ConfigurationError("separation 0 would overlap the seeds")
    M = 2 * R if M is None else M
    if 2 * R > M:
        raise ConfigurationError(f"R={R} exceeds the domain rule M = 2R (M={M})")
    if any(abs(v) > M for v in seps):
        raise ConfigurationError("separation outside the domain")
    dom = Domain.box(d, M)
    horizon = calibration.HORIZON_FACTOR * R * calibration.AXIS_TIME_CONSTANT_D2
    points = []
    for sep in seps:
        origin = (0,) * d
        other = axis_point(sep, d)
        cfg = SeedConfig(Explicit((origin,)), Explicit((other,)))
        stop = StopRule(radius=R, horizon=horizon, mode="both")

        def worker(r: int) -> bool:
            f = WeightField(seed, r, SINGLE_CLOCK, 1.0, 1.0)
            _, out = run_two_type(dom, cfg, f, stop, refs=(origin, other), keep_events=False)
            return out.max_type1_distance >= R and out.max_type2_distance >= R

        hits = sum(_map_reps(worker, reps, threads))
        points.append(CoexistencePoint(sep, int(hits), reps, wilson_estimate(int(hits), reps)))
    return CoexistenceScan(
        points,
        {"separations": seps, "R": R, "reps": reps, "seed": seed, "d": d, "M": M,
         "horizon": horizon},
    )
