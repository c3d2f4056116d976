"""Compiled engines: lazy-weight multi-source shortest paths and the two-type race.

The graph is an axis-aligned integer box; neighbors are generated arithmetically
so nothing about the lattice is materialized.  Edge weights are never stored:
every relaxation rehashes the edge key through the counter-based mix documented
in :mod:`richlab.weights` (the two implementations agree bit-for-bit and the
test suite checks that), so identical (master_seed, replication) pairs see
identical weights across kernels, domains and restrictions.

Heap entries are (time, flat_index * 4 + tag) compared lexicographically, which
makes pop order, and therefore every output, fully deterministic.  Tag is 0 for
the one-type kernel and the claiming type (1 or 2) for the race.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import weights as _w

_GOLD = np.uint64(_w.GOLDEN64)
_MIX_A = np.uint64(_w.MIX_A)
_MIX_B = np.uint64(_w.MIX_B)
_U_SCALE = 2.0**-52

# stop reasons shared with the python wrappers
REASON_EXHAUSTED = 0
REASON_REACHED = 1
REASON_ENCLOSED = 2
REASON_HORIZON = 3


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _edge_u(master, rep, clock, c, axis, low_axis_val):
    """Uniform draw for the edge with canonical-low coords c (axis coord replaced)."""
    h = _mix64((master + _GOLD) ^ np.uint64(rep))
    h = _mix64((h + _GOLD) ^ np.uint64(clock))
    h = _mix64((h + _GOLD) ^ np.uint64(axis))
    for i in range(c.shape[0]):
        w = low_axis_val if i == axis else c[i]
        h = _mix64((h + _GOLD) ^ np.uint64(w))
    return (np.float64(h >> np.uint64(12)) + 0.5) * _U_SCALE


@njit(cache=True, inline="always")
def _heap_push(ht, hk, hn, t, k):
    ht[hn] = t
    hk[hn] = k
    i = hn
    while i > 0:
        p = (i - 1) >> 1
        if ht[i] < ht[p] or (ht[i] == ht[p] and hk[i] < hk[p]):
            ht[i], ht[p] = ht[p], ht[i]
            hk[i], hk[p] = hk[p], hk[i]
            i = p
        else:
            break
    return hn + 1


@njit(cache=True, inline="always")
def _heap_pop(ht, hk, hn):
    hn -= 1
    ht[0] = ht[hn]
    hk[0] = hk[hn]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= hn:
            break
        r = l + 1
        m = l
        if r < hn and (ht[r] < ht[l] or (ht[r] == ht[l] and hk[r] < hk[l])):
            m = r
        if ht[m] < ht[i] or (ht[m] == ht[i] and hk[m] < hk[i]):
            ht[i], ht[m] = ht[m], ht[i]
            hk[i], hk[m] = hk[m], hk[i]
            i = m
        else:
            break
    return hn


@njit(cache=True, nogil=True)
def one_type_run(lo, hi, src, master, rep, clock, lam, x1_cap, target_mask, stop_time):
    """Multi-source Dijkstra with per-source descent labels.

    lo, hi        i8[d] domain bounds (closed)
    src           i8[k] source flat indices; label of source i is i
    master        u64 master seed; rep/clock i8 counters
    lam           rate: weight = -log(u) / lam
    x1_cap        relaxation never enters first-coordinate > x1_cap
    target_mask   u1[n] (or empty = disabled): stop when a marked site settles
    stop_time     stop once popped time exceeds this (inf = run to exhaustion)

    Returns (time, label, pred, hit_flat, hit_time); unreached sites keep
    time=inf, label=-1, pred=-1.  Ties by (time, site, source order).
    """
    d = lo.shape[0]
    shape = np.empty(d, np.int64)
    strides = np.empty(d, np.int64)
    n = np.int64(1)
    for i in range(d):
        shape[i] = hi[i] - lo[i] + 1
        n *= shape[i]
    strides[d - 1] = 1
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]

    inf = np.inf
    tent = np.full(n, inf)
    tlabel = np.full(n, -1, np.int64)
    tpred = np.full(n, -1, np.int64)
    done = np.zeros(n, np.uint8)
    time = np.full(n, inf)
    label = np.full(n, -1, np.int64)
    pred = np.full(n, -1, np.int64)

    k = src.shape[0]
    cap = 2 * d * n + k + 8
    ht = np.empty(cap, np.float64)
    hk = np.empty(cap, np.int64)
    hn = 0
    for i in range(k):
        s = src[i]
        tent[s] = 0.0
        tlabel[s] = i
        hn = _heap_push(ht, hk, hn, 0.0, s * 4)

    use_target = target_mask.shape[0] == n
    hit_flat = np.int64(-1)
    hit_time = np.float64(np.nan)
    c = np.empty(d, np.int64)

    while hn > 0:
        t = ht[0]
        kk = hk[0]
        hn = _heap_pop(ht, hk, hn)
        x = kk >> 2
        if done[x]:
            continue
        if t > stop_time:
            break
        done[x] = 1
        time[x] = t
        lab = tlabel[x]
        label[x] = lab
        pred[x] = tpred[x]
        if use_target and target_mask[x] != 0:
            hit_flat = x
            hit_time = t
            break
        f = x
        for i in range(d):
            c[i] = f // strides[i] % shape[i] + lo[i]
        for axis in range(d):
            ca = c[axis]
            for delta in (-1, 1):
                v = ca + delta
                if v < lo[axis] or v > hi[axis]:
                    continue
                if axis == 0 and v > x1_cap:
                    continue
                y = x + delta * strides[axis]
                if done[y]:
                    continue
                low_axis = ca if delta == 1 else v
                u = _edge_u(master, rep, clock, c, axis, low_axis)
                nt = t + (-np.log(u) / lam)
                if nt < tent[y]:
                    tent[y] = nt
                    tlabel[y] = lab
                    tpred[y] = x
                    hn = _heap_push(ht, hk, hn, nt, y * 4)
                elif nt == tent[y] and lab < tlabel[y]:
                    tlabel[y] = lab
                    tpred[y] = x
    return time, label, pred, hit_flat, hit_time


@njit(cache=True, nogil=True)
def two_type_run(
    lo,
    hi,
    src1,
    src2,
    master,
    rep,
    clock1,
    clock2,
    lam1,
    lam2,
    radius,
    ref,
    horizon,
    arm,
):
    """Two-type competing growth on shared deterministic weights.

    A priority queue of tentative (time, site, type) arrivals; popping the
    minimum claims the site for that type (first claim is final) and relaxes
    its uninfected neighbors through that type's clock and rate.

    radius   L-inf reach threshold measured from ref[type-1] (-1 disables)
    ref      i8[2, d] reference points for the per-type reach distances
    horizon  hard time stop (reported distinctly, reason=3)
    arm      0 run to exhaustion; 1 stop on type-2 reach/enclosure;
             2 stop once both types reach radius or either is enclosed short

    Returns (state, time, pred, ev_time, ev_flat, ev_type, max1, max2,
    enc1_time, enc2_time, reason, t_end).  enc*_time is the event time at
    which the type ran out of uninfected neighbors (nan if it never did).
    """
    d = lo.shape[0]
    shape = np.empty(d, np.int64)
    strides = np.empty(d, np.int64)
    n = np.int64(1)
    for i in range(d):
        shape[i] = hi[i] - lo[i] + 1
        n *= shape[i]
    strides[d - 1] = 1
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]

    inf = np.inf
    state = np.zeros(n, np.uint8)
    time = np.full(n, inf)
    pred = np.full(n, -1, np.int64)
    tent1 = np.full(n, inf)
    tent2 = np.full(n, inf)
    tpred1 = np.full(n, -1, np.int64)
    tpred2 = np.full(n, -1, np.int64)

    cap = 2 * d * n + 8
    ht = np.empty(cap, np.float64)
    hk = np.empty(cap, np.int64)
    hn = 0

    ev_time = np.empty(n, np.float64)
    ev_flat = np.empty(n, np.int64)
    ev_type = np.empty(n, np.uint8)
    m = 0

    max1 = np.int64(-1)
    max2 = np.int64(-1)
    cnt1 = np.int64(0)
    cnt2 = np.int64(0)
    enc1 = np.float64(np.nan)
    enc2 = np.float64(np.nan)
    reason = REASON_EXHAUSTED
    t_end = 0.0

    c = np.empty(d, np.int64)

    # place all seeds at t=0 (type 1 first, then type 2, in given order)
    for i in range(src1.shape[0]):
        s = src1[i]
        state[s] = 1
        time[s] = 0.0
        ev_time[m] = 0.0
        ev_flat[m] = s
        ev_type[m] = 1
        m += 1
    for i in range(src2.shape[0]):
        s = src2[i]
        state[s] = 2
        time[s] = 0.0
        ev_time[m] = 0.0
        ev_flat[m] = s
        ev_type[m] = 2
        m += 1

    # seed reach distances, live-bond counts, and first relaxations
    for m0 in range(m):
        x = ev_flat[m0]
        typ = ev_type[m0]
        f = x
        dist = np.int64(0)
        for i in range(d):
            c[i] = f // strides[i] % shape[i] + lo[i]
            a = c[i] - ref[typ - 1, i]
            if a < 0:
                a = -a
            if a > dist:
                dist = a
        if typ == 1:
            if dist > max1:
                max1 = dist
        else:
            if dist > max2:
                max2 = dist
        clock = clock1 if typ == 1 else clock2
        lam = lam1 if typ == 1 else lam2
        for axis in range(d):
            ca = c[axis]
            for delta in (-1, 1):
                v = ca + delta
                if v < lo[axis] or v > hi[axis]:
                    continue
                y = x + delta * strides[axis]
                if state[y] != 0:
                    continue
                if typ == 1:
                    cnt1 += 1
                else:
                    cnt2 += 1
                low_axis = ca if delta == 1 else v
                u = _edge_u(master, rep, clock, c, axis, low_axis)
                nt = -np.log(u) / lam
                if typ == 1:
                    if nt < tent1[y]:
                        tent1[y] = nt
                        tpred1[y] = x
                        hn = _heap_push(ht, hk, hn, nt, y * 4 + 1)
                else:
                    if nt < tent2[y]:
                        tent2[y] = nt
                        tpred2[y] = x
                        hn = _heap_push(ht, hk, hn, nt, y * 4 + 2)

    if cnt1 == 0:
        enc1 = 0.0
    if cnt2 == 0:
        enc2 = 0.0

    stop = False
    if radius >= 0:
        if arm == 1:
            if max2 >= radius:
                reason = REASON_REACHED
                stop = True
        elif arm == 2:
            if max1 >= radius and max2 >= radius:
                reason = REASON_REACHED
                stop = True
    if not stop and arm == 1 and cnt2 == 0:
        reason = REASON_ENCLOSED
        stop = True
    if not stop and arm == 2:
        if (cnt2 == 0 and max2 < radius) or (cnt1 == 0 and max1 < radius):
            reason = REASON_ENCLOSED
            stop = True

    while not stop and hn > 0:
        t = ht[0]
        kk = hk[0]
        hn = _heap_pop(ht, hk, hn)
        x = kk >> 2
        typ = np.uint8(kk & 3)
        if state[x] != 0:
            continue  # stale entry: the site was claimed earlier
        if t > horizon:
            reason = REASON_HORIZON
            t_end = horizon
            stop = True
            break
        state[x] = typ
        time[x] = t
        pred[x] = tpred1[x] if typ == 1 else tpred2[x]
        ev_time[m] = t
        ev_flat[m] = x
        ev_type[m] = typ
        m += 1
        t_end = t

        f = x
        dist = np.int64(0)
        for i in range(d):
            c[i] = f // strides[i] % shape[i] + lo[i]
            a = c[i] - ref[typ - 1, i]
            if a < 0:
                a = -a
            if a > dist:
                dist = a
        if typ == 1:
            if dist > max1:
                max1 = dist
        else:
            if dist > max2:
                max2 = dist

        clock = clock1 if typ == 1 else clock2
        lam = lam1 if typ == 1 else lam2
        for axis in range(d):
            ca = c[axis]
            for delta in (-1, 1):
                v = ca + delta
                if v < lo[axis] or v > hi[axis]:
                    continue
                y = x + delta * strides[axis]
                sy = state[y]
                if sy == 0:
                    if typ == 1:
                        cnt1 += 1
                    else:
                        cnt2 += 1
                    low_axis = ca if delta == 1 else v
                    u = _edge_u(master, rep, clock, c, axis, low_axis)
                    nt = t + (-np.log(u) / lam)
                    if typ == 1:
                        if nt < tent1[y]:
                            tent1[y] = nt
                            tpred1[y] = x
                            hn = _heap_push(ht, hk, hn, nt, y * 4 + 1)
                    else:
                        if nt < tent2[y]:
                            tent2[y] = nt
                            tpred2[y] = x
                            hn = _heap_push(ht, hk, hn, nt, y * 4 + 2)
                elif sy == 1:
                    cnt1 -= 1
                else:
                    cnt2 -= 1

        if cnt2 == 0 and np.isnan(enc2):
            enc2 = t
        if cnt1 == 0 and np.isnan(enc1):
            enc1 = t

        if radius >= 0:
            if arm == 1 and max2 >= radius:
                reason = REASON_REACHED
                break
            if arm == 2 and max1 >= radius and max2 >= radius:
                reason = REASON_REACHED
                break
        if arm == 1 and cnt2 == 0:
            reason = REASON_ENCLOSED
            break
        if arm == 2:
            if (cnt2 == 0 and max2 < radius) or (cnt1 == 0 and max1 < radius):
                reason = REASON_ENCLOSED
                break

    return (
        state,
        time,
        pred,
        ev_time[:m],
        ev_flat[:m],
        ev_type[:m],
        max1,
        max2,
        enc1,
        enc2,
        reason,
        t_end,
    )


@njit(cache=True)
def edge_u_probe(master, rep, clock, low_coords, axis):
    """Expose the kernel-side uniform draw for cross-implementation tests."""
    return _edge_u(master, rep, clock, low_coords, axis, low_coords[axis])
