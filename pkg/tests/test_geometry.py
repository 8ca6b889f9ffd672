"""Subspace and cone projections against independent least-squares oracles."""

import numpy as np
import pytest

from iqswitch import (
    additivity_residual,
    cone_membership,
    perp_norms,
    project_onto_cone,
    project_onto_subspace,
)
from iqswitch.errors import ConvergenceFailure
from oracles import cone_projection_oracle, subspace_fit_oracle


def _rays(n):
    out = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, :] = 1.0
        out.append(e)
    for j in range(n):
        e = np.zeros((n, n))
        e[:, j] = 1.0
        out.append(e)
    return out


def test_subspace_projection_matches_normal_equations():
    rng = np.random.default_rng(31)
    for n in (2, 3, 4, 5):
        for _ in range(30):
            x = rng.normal(0, 3, size=(n, n))
            got = project_onto_subspace(x)
            want = subspace_fit_oracle(x)
            assert np.abs(got - want).max() < 1e-10


def test_subspace_projection_fixed_points():
    # additive matrices are fixed; row/col-sum-free matrices map to zero
    x = np.array([[4.0, 5.0], [5.0, 6.0]])  # w=(1,2), wt=(3,4)
    assert np.abs(project_onto_subspace(x) - x).max() < 1e-12
    z = np.array([[1.0, -1.0], [-1.0, 1.0]])  # all row and column sums zero
    assert np.abs(project_onto_subspace(z)).max() < 1e-12


def test_additivity_residual_zero_on_constructions():
    rng = np.random.default_rng(101)
    for n in (2, 3, 4, 5, 6):
        for _ in range(40):
            w = rng.normal(0, 5, n)  # signs unrestricted
            wt = rng.normal(0, 5, n)
            x = w[:, None] + wt[None, :]
            assert additivity_residual(x) < 1e-10


def test_additivity_residual_frozen_value():
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1.0
    assert abs(additivity_residual(e11) - 0.25) < 1e-12


def test_additivity_residual_of_subspace_output():
    rng = np.random.default_rng(55)
    for _ in range(20):
        x = rng.normal(0, 2, size=(4, 4))
        assert additivity_residual(project_onto_subspace(x)) < 1e-10


def test_cone_projection_matches_active_set_oracle():
    rng = np.random.default_rng(77)
    for n in (2, 3, 4):
        for _ in range(40):
            x = rng.normal(0, 2, size=(n, n))
            d = project_onto_cone(x)
            want = cone_projection_oracle(x)
            dist_got = np.linalg.norm(x - d.q_para)
            dist_want = np.linalg.norm(x - want)
            assert abs(dist_got - dist_want) < 1e-8
            assert np.abs(d.q_para - want).max() < 1e-6  # unique projection point


def test_cone_projection_invariants():
    rng = np.random.default_rng(13)
    for n in (2, 3, 5):
        for _ in range(20):
            x = rng.normal(0, 4, size=(n, n))
            d = project_onto_cone(x)
            assert d.kkt_residual <= 1e-8
            assert (d.q_para >= -1e-9).all()
            assert (d.w >= 0).all() and (d.w_tilde >= 0).all()
            rebuilt = d.w[:, None] + d.w_tilde[None, :]
            assert np.abs(rebuilt - d.q_para).max() < 1e-9
            assert np.abs(d.q_para + d.q_perp - x).max() < 1e-12
            # Pythagoras within 1e-8 relative
            lhs = np.dot(x.ravel(), x.ravel())
            rhs = np.dot(d.q_para.ravel(), d.q_para.ravel()) + np.dot(
                d.q_perp.ravel(), d.q_perp.ravel()
            )
            assert abs(lhs - rhs) <= 1.01e-8 * max(1.0, lhs)
            # polar certificate: overlap with every ray at most 1e-8, absolute
            for ray in _rays(n):
                assert np.dot(d.q_perp.ravel(), ray.ravel()) <= 1.01e-8
            # orthogonality scaled by 1 + ||x||^2
            assert abs(np.dot(d.q_para.ravel(), d.q_perp.ravel())) <= 1.01e-8 * (1.0 + lhs)


def test_cone_projection_trivial_points():
    ones = np.ones((3, 3))
    d = project_onto_cone(ones)
    assert np.abs(d.q_para - ones).max() < 1e-8
    assert np.abs(d.q_perp).max() < 1e-8
    d = project_onto_cone(-ones)
    assert np.abs(d.q_para).max() < 1e-8
    assert np.abs(d.q_perp + ones).max() < 1e-8


def test_cone_projection_idempotent():
    rng = np.random.default_rng(21)
    for _ in range(20):
        x = rng.normal(0, 3, size=(3, 3))
        first = project_onto_cone(x)
        second = project_onto_cone(first.q_para)
        assert np.abs(second.q_para - first.q_para).max() < 1e-6
        assert cone_membership(first.q_para, tol=1e-6)


def test_cone_projection_nonexpansive():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        x = rng.normal(0, 3, size=(n, n))
        y = rng.normal(0, 3, size=(n, n))
        dx = project_onto_cone(x)
        dy = project_onto_cone(y)
        gap = np.linalg.norm(x - y)
        assert np.linalg.norm(dx.q_para - dy.q_para) <= gap * (1 + 1e-9) + 1e-9
        assert np.linalg.norm(dx.q_perp - dy.q_perp) <= gap * (1 + 1e-9) + 1e-9


def test_cone_projection_scaling_equivariant():
    rng = np.random.default_rng(6)
    x = rng.normal(0, 2, size=(3, 3))
    base = project_onto_cone(x).q_para
    for c in (0.0, 0.5, 2.0, 17.0):
        scaled = project_onto_cone(c * x).q_para
        assert np.abs(scaled - c * base).max() < 1e-6 * max(1.0, c)


def test_cone_projection_not_additive():
    # witness: x = 2*ones projects to itself, y = -ones projects to 0,
    # but x + y = ones projects to itself, not to 2*ones + 0
    n = 2
    x = 2.0 * np.ones((n, n))
    y = -np.ones((n, n))
    px = project_onto_cone(x).q_para
    py = project_onto_cone(y).q_para
    pxy = project_onto_cone(x + y).q_para
    assert np.abs(px - 2.0).max() < 1e-8
    assert np.abs(py).max() < 1e-8
    assert np.abs(pxy - 1.0).max() < 1e-8
    assert np.abs(pxy - (px + py)).max() > 0.9


def test_face_differences_are_orthogonal_to_rays():
    # differences of doubly stochastic matrices have zero row/col sums
    rng = np.random.default_rng(8)
    n = 4
    eye = np.eye(n)
    for _ in range(50):
        perms = [eye[rng.permutation(n)] for _ in range(4)]
        u = rng.dirichlet(np.ones(4))
        v = rng.dirichlet(np.ones(4))
        x = sum(ui * pi for ui, pi in zip(u, perms))
        y = sum(vi * pi for vi, pi in zip(v, perms))
        diff = x - y
        for ray in _rays(n):
            assert abs(np.dot(diff.ravel(), ray.ravel())) < 1e-12


def test_cone_membership_cases():
    e_row = np.zeros((3, 3))
    e_row[1, :] = 1.0
    assert cone_membership(e_row)
    bad = np.ones((3, 3))
    bad[0, 2] = -0.5
    assert not cone_membership(bad, tol=0.4)


def test_perp_norms_matches_single_projection():
    rng = np.random.default_rng(15)
    batch = rng.normal(0, 3, size=(40, 3, 3))
    para, perp = perp_norms(batch)
    for k in range(0, 40, 7):
        d = project_onto_cone(batch[k])
        assert abs(para[k] - np.linalg.norm(d.q_para)) < 1e-6
        assert abs(perp[k] - np.linalg.norm(d.q_perp)) < 1e-6


def test_budget_exhaustion_raises():
    x = np.array([[5.0, -3.0, 1.0], [0.2, 4.0, -7.0], [1.0, 2.0, 3.0]])
    with pytest.raises(ConvergenceFailure):
        project_onto_cone(x, max_iter=1)
