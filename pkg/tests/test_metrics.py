import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colinv.engine import estimate_inverse
from colinv.errors import InputError
from colinv.linalg import direct_inverse_oracle
from colinv.metrics import (
    additive_bound,
    check_corollary,
    check_prop1,
    column_residuals_sq,
    corollary_bounds,
    error_report,
    prop1_bounds,
    residual_bound,
)
from colinv.solvers import SolverConfig
from conftest import random_spd, well_conditioned
from oracles import jacobi_eigenvalues


def test_zero_error():
    A = np.random.default_rng(0).standard_normal((4, 4))
    r = error_report(A, A.copy())
    assert (r.err_l2, r.err_F, r.err_rF) == (0.0, 0.0, 0.0)


def test_rank_one_perturbation():
    E = np.eye(2)
    E[0, 0] += 0.1
    r = error_report(np.eye(2), E)
    assert r.err_F == pytest.approx(0.01, rel=1e-12)
    assert r.err_rF == pytest.approx(0.005, rel=1e-12)
    assert r.err_l2 == pytest.approx(0.01, rel=1e-12)


def test_against_jacobi_oracle():
    rng = np.random.default_rng(1)
    R = rng.standard_normal((20, 20))
    X = R + 1e-3 * rng.standard_normal((20, 20))
    D = X - R
    r = error_report(R, X)
    assert r.err_F == pytest.approx(float(np.sum(D * D)), rel=1e-10)
    assert r.err_l2 == pytest.approx(jacobi_eigenvalues(D.T @ D)[-1], rel=1e-10)
    assert r.err_rF == pytest.approx(r.err_F / float(np.sum(R * R)), rel=1e-12)


@given(st.integers(0, 2**31), st.integers(1, 8), st.integers(1, 8))
def test_report_invariants(seed, n, m):
    rng = np.random.default_rng(seed)
    R = rng.standard_normal((n, m)) + 0.1
    X = R + rng.standard_normal((n, m))
    r = error_report(R, X)
    assert r.err_l2 <= r.err_F
    assert r.err_rF == pytest.approx(r.err_F / np.sum(R * R), rel=1e-12)


def test_shape_mismatch():
    with pytest.raises(InputError):
        error_report(np.eye(2), np.eye(3))


def test_prop1_bound_formula():
    A = np.eye(100)
    bF, brF = prop1_bounds(A, 1e-3)
    assert bF == pytest.approx(5e-5, rel=1e-15)
    assert brF == pytest.approx(bF, rel=1e-9)
    # halving epsilon quarters the bound exactly
    assert prop1_bounds(A, 5e-4)[0] * 4 == bF
    _, inf = prop1_bounds(np.array([[1.0, 1.0], [1.0, 1.0]]), 1e-3)
    assert inf == math.inf


def test_corollary_bound_formula():
    Q, _ = np.linalg.qr(np.random.default_rng(2).standard_normal((9, 5)))
    bF, brF = corollary_bounds(Q, 1e-2)
    assert bF == pytest.approx(2.5e-4, rel=1e-9)
    assert brF == pytest.approx(2.5e-4, rel=1e-9)
    A = np.random.default_rng(3).standard_normal((10, 4))
    c = 3.0
    assert corollary_bounds(c * A, 1e-3)[0] == pytest.approx(corollary_bounds(A, 1e-3)[0] / c**2, rel=1e-8)
    with pytest.raises(InputError):
        corollary_bounds(np.eye(3), 1e-3)


@pytest.mark.parametrize("seed", range(5))
def test_prop1_holds_on_spd(seed):
    rng = np.random.default_rng(seed)
    A = random_spd(rng, 12)
    eps = 1e-4
    est = estimate_inverse(A, SolverConfig(epsilon=eps, max_iters=10**6))
    assert est.all_converged
    rep = check_prop1(A, est.matrix, eps, direct_inverse_oracle(A))
    assert rep.hypothesis_holds and all(rep.bound_satisfied)
    assert rep.err_F <= rep.bound_F_general
    sigma_min = np.sqrt(jacobi_eigenvalues(A.T @ A)[0])
    assert np.max(column_residuals_sq(A, est.matrix)) <= residual_bound(sigma_min, eps)


def test_prop1_hypothesis_flag_on_general_matrix(rng):
    A = well_conditioned(rng, 6)
    est = estimate_inverse(A, SolverConfig(epsilon=1e-6))
    rep = check_prop1(A, est.matrix, 1e-6, direct_inverse_oracle(A))
    assert rep.hypothesis_holds is False
    assert rep.sigma_tol == pytest.approx(1e-10)


def test_published_frobenius_bound_needs_sigma_min_at_least_one():
    # 1x1 A = 0.1: SD stops at |2a(ab - 1)| <= eps, so |b - 1/a| can reach eps / (2 a^2)
    a, eps = 0.1, 1e-2
    A = np.array([[a]])
    est = estimate_inverse(A, SolverConfig(epsilon=eps, max_iters=10**6))
    rep = check_prop1(A, est.matrix, eps, direct_inverse_oracle(A))
    assert rep.hypothesis_holds
    assert rep.err_F > rep.bound_F  # the n eps^2 / 2 form fails here
    assert rep.err_F <= rep.bound_F_general  # n eps^2 / (2 sigma_min^4) holds
    assert rep.err_rF <= rep.bound_rF


def test_err_F_identity_through_the_inverse(rng):
    # err_F = sum_i ||A^-1 (A b_i - e_i)||^2, sandwiched by the residuals
    A = well_conditioned(rng, 8, shift=1.0)
    X = estimate_inverse(A, SolverConfig(epsilon=1e-3)).matrix
    Ainv = direct_inverse_oracle(A)
    R = A @ X - np.eye(8)
    err_F = error_report(Ainv, X).err_F
    assert err_F == pytest.approx(float(np.sum((Ainv @ R) ** 2)), rel=1e-9)
    sv = np.linalg.svd(A, compute_uv=False)
    res = float(np.sum(R * R))
    assert res / sv[0] ** 2 * (1 - 1e-9) <= err_F <= res / sv[-1] ** 2 * (1 + 1e-9)


def test_check_corollary_and_additive(rng):
    A = rng.standard_normal((14, 5))
    from colinv.engine import estimate_pseudoinverse
    from colinv.linalg import direct_pseudoinverse_oracle

    est = estimate_pseudoinverse(A, SolverConfig(epsilon=1e-4, max_iters=10**6))
    rep = check_corollary(A, est.matrix, 1e-4, direct_pseudoinverse_oracle(A))
    assert rep.hypothesis_holds and rep.bound_satisfied[0]
    assert additive_bound(np.eye(3), np.eye(3)) == pytest.approx(1.0 + 2.0)
