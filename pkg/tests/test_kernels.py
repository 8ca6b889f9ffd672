"""Compiled slot loop against a plain-Python bitwise mirror."""

import itertools

import numpy as np

from iqswitch._kernels import hungarian_dual, reflected_walk_chunk, simulate_chunk
from oracles import geometric_tail, mirror_chunk, perm_weight_oracle


def _perm_table(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def _run_both(n, slots, seed, tie_mode, couple_row=-1, couple_col=-1, stride=0, phase=0):
    rng = np.random.default_rng(seed + 1000)
    arr = rng.integers(0, 2, size=(slots, n, n)).astype(np.int64)
    q0 = rng.integers(0, 3, size=(n, n)).astype(np.int64)
    perms = _perm_table(n)
    cap = (slots + stride - 1) // stride if stride else 0

    q = q0.copy()
    acc = np.zeros(4, dtype=np.int64)
    sums = np.zeros(6, dtype=np.int64)
    snaps_pre = np.zeros((cap, n, n), dtype=np.int64)
    snaps_post = np.zeros((cap, n, n), dtype=np.int64)
    phi = np.zeros(2, dtype=np.int64)
    simulate_chunk(
        q, arr, perms, np.zeros(len(perms), dtype=np.int64), tie_mode, seed,
        True, acc, stride, phase, snaps_pre, snaps_post,
        couple_row, couple_col, phi, sums,
    )
    mq, macc, msums, mpre, mpost, mphi = mirror_chunk(
        q0, arr, perms, tie_mode, seed, True, stride, phase, cap,
        couple_row, couple_col, np.zeros(2, dtype=np.int64),
    )
    assert np.array_equal(q, mq), f"state diverged (tie_mode {tie_mode})"
    assert np.array_equal(acc, macc)
    assert np.array_equal(sums, msums)
    assert np.array_equal(phi, mphi)
    filled = int(acc[1])
    assert filled == len(mpre)
    for k in range(filled):
        assert np.array_equal(snaps_pre[k], mpre[k])
        assert np.array_equal(snaps_post[k], mpost[k])
    return q


def test_kernel_matches_mirror_uniform_ties():
    for n in (2, 3):
        for seed in (1, 2, 3, 44):
            _run_both(n, 400, seed, tie_mode=0)


def test_kernel_matches_mirror_shuffle():
    for n in (2, 3, 4):
        for seed in (5, 6, 77):
            _run_both(n, 300, seed, tie_mode=1)


def test_kernel_matches_mirror_with_coupling_and_snaps():
    for n in (2, 3):
        for seed in (9, 10):
            _run_both(n, 500, seed, tie_mode=0, couple_row=0, couple_col=n - 1, stride=7, phase=3)
            _run_both(n, 500, seed, tie_mode=1, couple_row=n - 1, couple_col=0, stride=11, phase=0)


def test_kernel_single_port_is_single_server():
    # n=1: the switch serves the one queue every slot
    arr = np.random.default_rng(3).integers(0, 2, size=(200, 1, 1)).astype(np.int64)
    q = np.zeros((1, 1), dtype=np.int64)
    acc = np.zeros(4, dtype=np.int64)
    simulate_chunk(
        q, arr, _perm_table(1), np.zeros(1, dtype=np.int64), 0, 0,
        True, acc, 0, 0, np.zeros((0, 1, 1), dtype=np.int64),
        np.zeros((0, 1, 1), dtype=np.int64), -1, -1,
        np.zeros(2, dtype=np.int64), np.zeros(6, dtype=np.int64),
    )
    ref = 0
    tot = 0
    for t in range(200):
        tot += ref
        ref = max(ref + int(arr[t, 0, 0]) - 1, 0)
    assert q[0, 0] == ref
    assert acc[0] == tot


def test_hungarian_dual_certificates_random():
    rng = np.random.default_rng(123)
    for n in (2, 3, 5, 8):
        for _ in range(25):
            q = rng.integers(0, 100, size=(n, n)).astype(np.float64)
            perm, w, wt = hungarian_dual(q)
            best, _ = perm_weight_oracle(q)
            got = q[np.arange(n), perm].sum()
            assert got == best
            assert (w[:, None] + wt[None, :] - q).min() > -1e-9
            assert abs(w.sum() + wt.sum() - best) < 1e-9


def test_reflected_walk_histogram_matches_geometric_law():
    state = np.zeros(1, dtype=np.int64)
    hist = np.zeros(80, dtype=np.int64)
    u = np.random.default_rng(42).random(2_000_000)
    reflected_walk_chunk(state, u, 0.3, hist)
    assert hist.sum() == 2_000_000
    p = hist / hist.sum()
    rho = 0.3 / 0.7
    for k in range(6):
        expect = (1 - rho) * rho**k
        assert abs(p[k] - expect) < 0.002
    # tail comparison
    tail3 = p[4:].sum()
    assert abs(tail3 - geometric_tail(rho, 3)) < 0.002


def test_reflected_walk_state_persists_across_chunks():
    state = np.zeros(1, dtype=np.int64)
    hist_a = np.zeros(30, dtype=np.int64)
    rng = np.random.default_rng(7)
    reflected_walk_chunk(state, rng.random(1000), 0.45, hist_a)
    mid = state[0]
    hist_b = np.zeros(30, dtype=np.int64)
    reflected_walk_chunk(state, rng.random(1000), 0.45, hist_b)
    assert hist_a.sum() == hist_b.sum() == 1000
    assert mid >= 0 and state[0] >= 0
