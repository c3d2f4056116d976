import numpy as np
import pytest

from richlab.competition import (
    StopRule,
    coupled_pair,
    run_two_type,
    run_two_type_markov,
)
from richlab.errors import ConfigurationError, DomainError
from richlab.estimators import wilson_estimate
from richlab.fpp import passage_times
from richlab.lattice import (
    Domain,
    Empty,
    Explicit,
    HyperplaneMinusOrigin,
    Origin,
    SeedConfig,
    canonical_edge,
    enumerate_seeds,
)
from richlab.weights import SINGLE_CLOCK, TWO_CLOCK, WeightField

STAR = Domain.tube(2, 0, -1, 1)  # 3-site path: the two outer sites seed the race
STAR_CFG = SeedConfig(Explicit(((-1, 0),)), Explicit(((1, 0),)))


def _star_wins(engine, lam2, reps, seed):
    wins = 0
    for r in range(reps):
        if engine == "weights":
            f = WeightField(seed, r, TWO_CLOCK, 1.0, lam2)
            imap, _ = run_two_type(STAR, STAR_CFG, f, StopRule(mode="none"))
        else:
            rng = np.random.default_rng(np.random.SeedSequence((seed, r)))
            imap, _ = run_two_type_markov(STAR, STAR_CFG, 1.0, lam2, rng, StopRule(mode="none"))
        wins += imap.state_at((0, 0)) == 2
    return wins


@pytest.mark.parametrize("engine", ["weights", "markov"])
@pytest.mark.parametrize("lam2,expect", [(1.0, 0.5), (3.0, 0.75)])
def test_star_race_probability(engine, lam2, expect):
    reps = 3000
    wins = _star_wins(engine, lam2, reps, 101)
    est = wilson_estimate(wins, reps)
    assert est.ci_lo <= expect <= est.ci_hi


def test_empty_type2_reduces_to_one_type_run():
    dom = Domain.box(2, 4)
    cfg = SeedConfig(HyperplaneMinusOrigin(4), Empty())
    f = WeightField(21, 0)
    imap, out = run_two_type(dom, cfg, f, StopRule(mode="none"))
    s1, _ = enumerate_seeds(cfg, 2)
    res = passage_times(dom, s1, f, 1)
    assert np.all(imap.state[np.isfinite(res.time)] == 1)
    assert np.array_equal(imap.time, res.time)
    assert out.max_type2_distance == -1
    assert out.enclosure_time == 0.0  # no type-2 sites at all


def test_single_clock_identity_with_labeled_passage():
    dom = Domain.box(2, 6)
    cfg = SeedConfig.hyperplane_vs_origin(6)
    for r in range(10):
        f = WeightField(22, r, SINGLE_CLOCK, 1.0, 1.0)
        imap, _ = run_two_type(dom, cfg, f, StopRule(mode="none"))
        s1, s2 = enumerate_seeds(cfg, 2)
        res = passage_times(dom, s1 + s2, f, 1)
        set2 = frozenset(s2)
        is2 = np.asarray([p in set2 for p in res.sources])
        assert np.array_equal(np.where(is2[res.source_index], 2, 1), imap.state)
        assert np.array_equal(res.time, imap.time)


def test_event_log_is_write_once_and_time_ordered():
    dom = Domain.box(2, 5)
    f = WeightField(23, 0, TWO_CLOCK, 1.0, 2.0)
    imap, out = run_two_type(dom, SeedConfig.halfaxis_vs_origin(5), f, StopRule(mode="none"))
    ev = imap.events
    assert len(ev) == out.event_count == dom.size  # exhausted: every site claimed once
    assert len(set(ev.flats.tolist())) == len(ev)
    assert np.all(np.diff(ev.times) >= 0)


def test_local_consistency_time_equals_pred_plus_edge():
    dom = Domain.box(2, 5)
    f = WeightField(24, 1, TWO_CLOCK, 1.0, 1.7)
    imap, _ = run_two_type(dom, SeedConfig.hyperplane_vs_origin(5), f, StopRule(mode="none"))
    for p in dom.sites():
        q = imap.predecessor_at(p)
        if q is None:
            continue
        typ = imap.state_at(p)
        assert typ == imap.state_at(q)
        w = f.edge_weight(canonical_edge(q, p), typ)
        assert imap.time_at(p) == imap.time_at(q) + w


def test_every_nonseed_site_has_earlier_same_type_neighbor():
    dom = Domain.box(2, 4)
    f = WeightField(25, 2, TWO_CLOCK, 1.0, 1.0)
    cfg = SeedConfig.hyperplane_vs_origin(4)
    imap, _ = run_two_type(dom, cfg, f, StopRule(mode="none"))
    seeds = set(sum(enumerate_seeds(cfg, 2), []))
    for p in dom.sites():
        if p in seeds or imap.state_at(p) == 0:
            continue
        ok = False
        for axis in range(2):
            for d in (-1, 1):
                q = tuple(c + d if i == axis else c for i, c in enumerate(p))
                if dom.contains(q) and imap.state_at(q) == imap.state_at(p):
                    ok |= imap.time_at(q) < imap.time_at(p)
        assert ok


def test_enclosed_origin_reports_time_zero():
    dom = Domain.box(2, 3)
    ring = Explicit(((1, 0), (-1, 0), (0, 1), (0, -1)))
    imap, out = run_two_type(
        dom, SeedConfig(ring, Origin()), WeightField(26, 0), StopRule(radius=1, mode="type2")
    )
    assert out.enclosure_time == 0.0
    assert out.survived_to_R is False
    assert out.stop_reason == "enclosed"
    assert out.max_type2_distance == 0


def test_reach_stop_and_survival_flag():
    dom = Domain.box(2, 8)
    cfg = SeedConfig(Empty(), Origin())
    imap, out = run_two_type(dom, cfg, WeightField(27, 0), StopRule(radius=4, mode="type2"))
    assert out.stop_reason == "reached"
    assert out.survived_to_R is True
    assert out.max_type2_distance >= 4


def test_horizon_is_reported_distinctly():
    dom = Domain.box(2, 8)
    cfg = SeedConfig(Empty(), Origin())
    imap, out = run_two_type(
        dom, cfg, WeightField(28, 0), StopRule(radius=4, horizon=1e-6, mode="type2")
    )
    assert out.stop_reason == "horizon"
    assert out.horizon_hit
    assert out.end_time == 1e-6


def test_completed_run_is_exhausted_not_horizon():
    # a horizon beyond the last event must not be reported as a horizon hit
    dom = Domain.box(2, 3)
    cfg = SeedConfig(Empty(), Origin())
    imap, full = run_two_type(dom, cfg, WeightField(28, 1), StopRule(mode="none"))
    imap2, out = run_two_type(
        dom, cfg, WeightField(28, 1), StopRule(horizon=full.end_time + 1.0, mode="none")
    )
    assert out.stop_reason == "exhausted"
    assert out.event_count == full.event_count


def test_radius_too_large_for_domain_rejected():
    dom = Domain.box(2, 8)
    with pytest.raises(ConfigurationError):
        run_two_type(dom, SeedConfig(Empty(), Origin()), WeightField(0, 0),
                     StopRule(radius=5, mode="type2"))


def test_overlapping_seeds_rejected():
    dom = Domain.box(2, 4)
    cfg = SeedConfig(Explicit(((0, 0),)), Origin())
    with pytest.raises(ConfigurationError):
        run_two_type(dom, cfg, WeightField(0, 0))


def test_seed_outside_domain_rejected():
    dom = Domain.box(2, 2)
    cfg = SeedConfig(Explicit(((5, 0),)), Origin())
    with pytest.raises(DomainError):
        run_two_type(dom, cfg, WeightField(0, 0))


def test_stop_rule_validation():
    with pytest.raises(ConfigurationError):
        StopRule(mode="sometimes")
    with pytest.raises(ConfigurationError):
        StopRule(radius=-2)
    with pytest.raises(ConfigurationError):
        StopRule(mode="both")  # needs a radius


def test_markov_agrees_with_weights_on_one_type_axis_time():
    # degenerate two-type: markov vs weight engine, mean time to (6,0)
    dom = Domain.box(2, 8)
    cfg = SeedConfig(Empty(), Origin())
    reps = 400
    tw, tm = [], []
    for r in range(reps):
        imap, _ = run_two_type(dom, cfg, WeightField(29, r), StopRule(mode="none"))
        tw.append(imap.time_at((6, 0)))
        rng = np.random.default_rng(np.random.SeedSequence((29, r)))
        imap, _ = run_two_type_markov(dom, cfg, 1.0, 1.0, rng, StopRule(mode="none"))
        tm.append(imap.time_at((6, 0)))
    tw, tm = np.asarray(tw), np.asarray(tm)
    se = np.hypot(tw.std(ddof=1), tm.std(ddof=1)) / np.sqrt(reps)
    assert abs(tw.mean() - tm.mean()) < 4 * se


def test_two_type_runs_in_three_dimensions():
    dom = Domain.box(3, 2)
    cfg = SeedConfig(Explicit(((-1, 0, 0),)), Explicit(((1, 0, 0),)))
    imap, out = run_two_type(dom, cfg, WeightField(33, 0), StopRule(mode="none"))
    assert out.event_count == dom.size
    assert set(np.unique(imap.state)) <= {1, 2}
    assert imap.state_at((-1, 0, 0)) == 1 and imap.state_at((1, 0, 0)) == 2


def test_coupled_identical_configs_are_equal():
    dom = Domain.box(2, 5)
    cfg = SeedConfig.hyperplane_vs_origin(5)
    rep = coupled_pair(dom, cfg, dom, cfg, WeightField(30, 0))
    assert rep.ok and rep.violations == 0


def test_coupled_containment_seed_monotonicity():
    dom = Domain.box(2, 8)
    lprime = Explicit(tuple((0, -k) for k in range(1, 9)))
    big = SeedConfig(HyperplaneMinusOrigin(8), Origin())
    small = SeedConfig(lprime, Origin())
    for r in range(30):
        rep = coupled_pair(dom, small, dom, big, WeightField(31, r, TWO_CLOCK, 1.0, 1.4))
        assert rep.ok, rep.first_violation


def test_coupled_containment_precondition_rejected():
    dom = Domain.box(2, 4)
    a = SeedConfig(HyperplaneMinusOrigin(4), Origin())
    b = SeedConfig(Explicit(((0, 1),)), Origin())
    with pytest.raises(ConfigurationError):
        coupled_pair(dom, a, dom, b, WeightField(0, 0))  # a.type1 not within b.type1


def test_coupled_subgraph_time_dominance():
    sub = Domain.plane(2, 3, 10)
    sup = Domain.slab(2, -2, 3, 10)
    cfg = SeedConfig(Explicit(((3, 2),)), Empty())
    for r in range(30):
        rep = coupled_pair(sub, cfg, sup, cfg, WeightField(32, r), variant="subgraph-time")
        assert rep.ok, rep.first_violation


def test_coupled_subgraph_requires_same_cfg():
    sub = Domain.plane(2, 0, 4)
    sup = Domain.slab(2, -1, 0, 4)
    a = SeedConfig(Explicit(((0, 1),)), Empty())
    b = SeedConfig(Explicit(((0, 2),)), Empty())
    with pytest.raises(ConfigurationError):
        coupled_pair(sub, a, sup, b, WeightField(0, 0), variant="subgraph-time")


def test_coupled_domains_must_nest():
    with pytest.raises(ConfigurationError):
        coupled_pair(
            Domain.box(2, 6),
            SeedConfig(Empty(), Origin()),
            Domain.box(2, 4),
            SeedConfig(Empty(), Origin()),
            WeightField(0, 0),
        )
