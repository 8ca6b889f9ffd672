"""Compiled inner loops: assignment solver, slot simulation, reflected walk.

Everything here is numba-jitted and deliberately free of Python objects.
Randomness inside kernels comes from numba's own generator, seeded once
per call with a value drawn from the caller's stream, which keeps runs
reproducible for a fixed configuration.
"""

import numpy as np
from numba import njit

_INF = 1e30


@njit(cache=True)
def hungarian_dual(qmat):
    """Maximum-weight perfect matching with dual certificates.

    Returns (perm, w, wt) where perm[i] is the column matched to row i and
    the potentials satisfy w[i] + wt[j] >= qmat[i, j] everywhere, with
    equality on matched pairs; hence sum(w) + sum(wt) equals the optimal
    weight.  O(n^3) shortest-augmenting-path scheme run on negated weights.
    """
    n = qmat.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.full(n + 1, n, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    minv = np.empty(n + 1)
    used = np.empty(n + 1, dtype=np.bool_)
    for i in range(n):
        p[n] = i
        j0 = n
        for j in range(n + 1):
            minv[j] = _INF
            used[j] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = _INF
            j1 = -1
            for j in range(n):
                if not used[j]:
                    cur = -qmat[i0, j] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == n:
                break
        while j0 != n:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    for j in range(n):
        perm[p[j]] = j
    w = np.empty(n)
    wt = np.empty(n)
    for i in range(n):
        w[i] = -u[i]
        wt[i] = -v[i]
    return perm, w, wt


@njit(cache=True)
def _shuffled_max_weight(q, work, rp, cp, chosen):
    """Max-weight matching after a random relabeling of rows and columns.

    q is the integer queue matrix; work is a float scratch of the same
    shape.  Ties between optimal matchings are broken by the relabeling;
    exact uniformity over the argmax set is only provided by the
    enumeration path in simulate_chunk.
    """
    n = q.shape[0]
    for i in range(n):
        rp[i] = i
        cp[i] = i
    for i in range(n - 1, 0, -1):
        j = np.random.randint(0, i + 1)
        t = rp[i]
        rp[i] = rp[j]
        rp[j] = t
        j = np.random.randint(0, i + 1)
        t = cp[i]
        cp[i] = cp[j]
        cp[j] = t
    for i in range(n):
        for j in range(n):
            work[i, j] = q[rp[i], cp[j]]
    perm, w, wt = hungarian_dual(work)
    for i in range(n):
        chosen[rp[i]] = cp[perm[i]]


@njit(cache=True)
def simulate_chunk(
    q,
    arr,
    perms,
    tie_buf,
    tie_mode,
    seed,
    accumulate,
    acc,
    snap_stride,
    snap_phase,
    snaps_pre,
    snaps_post,
    couple_row,
    couple_col,
    phi_state,
    sums,
):
    """Advance the switch over one chunk of pre-drawn arrivals, in place.

    q: (n, n) int64 queue state.  arr: (T, n, n) int64 arrivals.
    tie_mode 0 scans the permutation table `perms` and breaks ties
    uniformly; tie_mode 1 relabels rows/columns at random and solves the
    assignment problem.  acc collects [sum of total queue, snapshots
    filled, row dominance violations, col dominance violations]; sums
    collects the coupled single-server statistics
    [phi_row, unused_row, rowsum, phi_col, unused_col, colsum].
    Violations are counted on every slot; the other accumulators and the
    snapshot buffers only advance when `accumulate` is set.
    """
    np.random.seed(seed)
    n = q.shape[0]
    t_chunk = arr.shape[0]
    cap = snaps_pre.shape[0]
    n_perms = perms.shape[0]
    work = np.empty((n, n), dtype=np.float64)
    rp = np.empty(n, dtype=np.int64)
    cp = np.empty(n, dtype=np.int64)
    chosen = np.empty(n, dtype=np.int64)

    for t in range(t_chunk):
        if accumulate:
            tot = 0
            for i in range(n):
                for j in range(n):
                    tot += q[i, j]
            acc[0] += tot
            if couple_row >= 0:
                sums[0] += phi_state[0]
                rq = 0
                for j in range(n):
                    rq += q[couple_row, j]
                sums[2] += rq
            if couple_col >= 0:
                sums[3] += phi_state[1]
                cq = 0
                for i in range(n):
                    cq += q[i, couple_col]
                sums[5] += cq
        snap_here = False
        if accumulate and snap_stride > 0 and acc[1] < cap:
            if (snap_phase + t) % snap_stride == 0:
                snap_here = True
                k = acc[1]
                for i in range(n):
                    for j in range(n):
                        snaps_pre[k, i, j] = q[i, j]

        if tie_mode == 0:
            best = np.int64(-1)
            cnt = 0
            for pidx in range(n_perms):
                wsum = np.int64(0)
                for i in range(n):
                    wsum += q[i, perms[pidx, i]]
                if wsum > best:
                    best = wsum
                    tie_buf[0] = pidx
                    cnt = 1
                elif wsum == best:
                    tie_buf[cnt] = pidx
                    cnt += 1
            pick = int(np.random.random() * cnt)
            if pick >= cnt:
                pick = cnt - 1
            sel = tie_buf[pick]
            for i in range(n):
                chosen[i] = perms[sel, i]
        else:
            _shuffled_max_weight(q, work, rp, cp, chosen)

        for i in range(n):
            for j in range(n):
                q[i, j] += arr[t, i, j]
        for i in range(n):
            j = chosen[i]
            if q[i, j] > 0:
                q[i, j] -= 1

        if couple_row >= 0:
            al = 0
            for j in range(n):
                al += arr[t, couple_row, j]
            dep = phi_state[0] + al - 1
            if dep < 0:
                if accumulate:
                    sums[1] += -dep
                phi_state[0] = 0
            else:
                phi_state[0] = dep
            rq = 0
            for j in range(n):
                rq += q[couple_row, j]
            if phi_state[0] > rq:
                acc[2] += 1
        if couple_col >= 0:
            al = 0
            for i in range(n):
                al += arr[t, i, couple_col]
            dep = phi_state[1] + al - 1
            if dep < 0:
                if accumulate:
                    sums[4] += -dep
                phi_state[1] = 0
            else:
                phi_state[1] = dep
            cq = 0
            for i in range(n):
                cq += q[i, couple_col]
            if phi_state[1] > cq:
                acc[3] += 1

        if snap_here:
            k = acc[1]
            for i in range(n):
                for j in range(n):
                    snaps_post[k, i, j] = q[i, j]
            acc[1] = k + 1


@njit(cache=True)
def reflected_walk_chunk(state, u, p_up, hist):
    """Reflected +/-1 random walk driven by uniforms; histogram the states.

    state is a length-1 int64 carrier so the position persists across
    chunks.  Values beyond the histogram are clamped into the last bin.
    """
    z = state[0]
    top = hist.shape[0] - 1
    for t in range(u.shape[0]):
        if u[t] < p_up:
            z += 1
        elif z > 0:
            z -= 1
        idx = z if z < top else top
        hist[idx] += 1
    state[0] = z
