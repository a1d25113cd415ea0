import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colinv.errors import BreakdownError, DivergenceError, InputError
from colinv.linalg import direct_inverse_oracle, gram
from colinv.solvers import (
    CGVariant,
    InitRule,
    Method,
    SolverConfig,
    Termination,
    backtracking_steps,
    cg_least_squares,
    least_squares,
    ls_gradient,
    ls_objective,
    sd_least_squares,
    solve_many,
)
from conftest import random_spd, well_conditioned
from oracles import central_difference_gradient

SD = SolverConfig(method=Method.SD, epsilon=1e-10, max_iters=100_000)
CG = SolverConfig(method=Method.CG, epsilon=1e-12, max_iters=1000)


def test_config_validation():
    for kw in [dict(epsilon=0), dict(epsilon=float("nan")), dict(max_iters=0), dict(ls_alpha=0.5),
               dict(ls_beta=1.0), dict(t_init=0), dict(refresh_every=0), dict(method="newton")]:
        with pytest.raises((InputError, ValueError)):
            SolverConfig(**kw)
    cfg = SolverConfig()
    assert (cfg.ls_alpha, cfg.ls_beta, cfg.t_init, cfg.init_rule) == (0.25, 0.5, 1.0, InitRule.ZERO)
    assert cfg.iteration_cap(7) == 350


def test_sd_identity_one_step():
    out = sd_least_squares(np.eye(2), [1.0, 0.0], SD)
    assert out.iterations == 1 and out.termination is Termination.TOLERANCE_MET
    assert np.array_equal(out.solution, [1.0, 0.0])


def test_sd_diagonal():
    out = sd_least_squares(np.diag([2.0, 1.0]), [1.0, 1.0], SD)
    np.testing.assert_allclose(out.solution, [0.5, 1.0], atol=1e-10 * 2)
    assert out.final_criterion_value <= SD.epsilon


def test_sd_spd_against_oracle(rng):
    A = random_spd(rng, 5)
    y = rng.standard_normal(5)
    cfg = SolverConfig(epsilon=1e-8, max_iters=10**6)
    out = sd_least_squares(A, y, cfg)
    sigma_min = np.linalg.svd(A, compute_uv=False)[-1]
    err = np.linalg.norm(out.solution - direct_inverse_oracle(A) @ y)
    # ||b - b*|| <= ||grad|| / (2 sigma_min^2)
    assert err <= cfg.epsilon / (2 * sigma_min**2) * (1 + 1e-6)


def test_sd_iteration_cap_returns_last_iterate():
    A = np.diag([1.0, 1e-3])
    out = sd_least_squares(A, [1.0, 1.0], SolverConfig(epsilon=1e-12, max_iters=5), history=True)
    assert out.termination is Termination.MAX_ITERS_REACHED and out.iterations == 5
    assert not out.converged
    assert out.history["objective"][-1] == pytest.approx(ls_objective(A, out.solution, [1.0, 1.0]), rel=1e-12)


def test_sd_divergence_named():
    with pytest.raises(DivergenceError) as info:
        sd_least_squares(np.array([[1e200, 0.0], [0.0, 1.0]]), [1.0, 1.0], SD)
    assert info.value.iteration is not None and "iteration" in str(info.value)


def test_dimension_and_method_mismatch():
    with pytest.raises(InputError, match="dimension"):
        sd_least_squares(np.eye(3), [1.0, 2.0], SD)
    with pytest.raises(InputError):
        cg_least_squares(np.eye(2), [1.0, 2.0], SD)
    with pytest.raises(InputError):
        sd_least_squares(np.eye(2), [1.0, 2.0], SD, x0=[1.0, 2.0])


def test_given_initial_iterate():
    cfg = SolverConfig(epsilon=1e-10, init_rule="given")
    out = sd_least_squares(np.eye(2), [1.0, 2.0], cfg, x0=[1.0, 2.0])
    assert out.iterations == 0 and np.array_equal(out.solution, [1.0, 2.0])
    with pytest.raises(InputError):
        sd_least_squares(np.eye(2), [1.0, 2.0], cfg)


def test_cg_identity_one_iteration():
    out = cg_least_squares(np.eye(3), [0.0, 1.0, 0.0], CG)
    assert np.array_equal(out.solution, [0.0, 1.0, 0.0]) and out.iterations == 1


@pytest.mark.parametrize("variant", ["normal", "spd"])
def test_cg_2x2(variant):
    A = np.array([[4.0, 1.0], [1.0, 3.0]])
    cfg = SolverConfig(method="cg", epsilon=1e-12, cg_variant=variant)
    out = cg_least_squares(A, [1.0, 2.0], cfg)
    np.testing.assert_allclose(out.solution, [1 / 11, 7 / 11], atol=1e-8)
    if variant == "spd":
        # the displacement test needs one extra step to observe a zero move
        assert out.iterations <= 3


def test_cgnr_rectangular(rng):
    A = rng.standard_normal((10, 6))
    y = rng.standard_normal(10)
    out = cg_least_squares(A, y, CG)
    expected = direct_inverse_oracle(gram(A)) @ (A.T @ y)
    assert np.linalg.norm(out.solution - expected) <= 1e-6


def test_cg_breakdown_on_indefinite():
    A = np.diag([1.0, -1.0])
    with pytest.raises(BreakdownError):
        cg_least_squares(A, [0.0, 1.0], SolverConfig(method="cg", cg_variant="spd"))
    out = cg_least_squares(A, [2.0, 1.0], SolverConfig(method="cg", cg_variant="symmetric", epsilon=1e-12))
    np.testing.assert_allclose(out.solution, [2.0, -1.0])
    # the first direction is y itself and yᵀAy = 0 here
    with pytest.raises(BreakdownError):
        cg_least_squares(A, [1.0, 1.0], SolverConfig(method="cg", cg_variant="symmetric"))
    with pytest.raises(InputError):
        cg_least_squares(np.array([[1.0, 2.0], [0.0, 1.0]]), [1.0, 1.0], SolverConfig(method="cg", cg_variant="spd"))


def test_least_squares_dispatch():
    assert least_squares(np.eye(2), [1.0, 0.0], SD).iterations == 1
    assert least_squares(np.eye(2), [1.0, 0.0], CG).iterations >= 1


def test_backtracking_steps():
    # t q <= 0.75 g2 with t = 0.5^s
    t = backtracking_steps([1.0, 4.0, 1.0], [10.0, 1.0, 0.75], 0.25, 0.5, 1.0)
    assert np.array_equal(t, [0.0625, 1.0, 1.0])
    t = backtracking_steps([1.0], [3.0], 0.1, 0.3, 2.0)
    assert t[0] == pytest.approx(2.0 * 0.3 * 0.3)


@st.composite
def ls_instances(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, 6))
    m = draw(st.integers(n, n + 3))
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) + 3.0 * np.eye(m, n)
    return A, rng.standard_normal(m)


@given(ls_instances())
def test_sd_monotone_descent_and_armijo(inst):
    A, y = inst
    cfg = SolverConfig(epsilon=1e-6, max_iters=20_000)
    out = sd_least_squares(A, y, cfg, history=True)
    f = out.history["objective"]
    t = out.history["step"]
    g = out.history["criterion"]
    assert len(f) == out.iterations + 1 and len(t) == out.iterations
    assert np.all(np.diff(f) <= 1e-12 * max(1.0, f[0]))
    # Armijo from the logged step and gradient norm
    armijo = f[1:] <= f[:-1] - cfg.ls_alpha * t * g[:-1] ** 2 + 1e-10 * max(1.0, f[0])
    assert np.all(armijo)
    if out.termination is Termination.TOLERANCE_MET:
        assert out.final_criterion_value <= cfg.epsilon


@given(ls_instances())
def test_gradient_matches_finite_differences(inst):
    A, y = inst
    b = np.random.default_rng(0).standard_normal(A.shape[1])
    num = central_difference_gradient(lambda x: ls_objective(A, x, y), b, 1e-5)
    ana = ls_gradient(A, b, y)
    assert np.linalg.norm(ana - num) <= 1e-5 * max(np.linalg.norm(ana), 1e-8)


@given(st.integers(0, 10_000), st.integers(2, 12))
def test_cg_finishes_within_n_plus_2(seed, n):
    rng = np.random.default_rng(seed)
    A = random_spd(rng, n, shift=n)  # keeps kappa well below 100
    assert np.linalg.cond(A) <= 100
    y = rng.standard_normal(n)
    cfg = SolverConfig(method="cg", epsilon=1e-10, cg_variant="spd", max_iters=10 * n)
    out = cg_least_squares(A, y, cfg)
    assert out.converged and out.iterations <= n + 2


def test_determinism(rng):
    A = well_conditioned(rng, 6)
    y = rng.standard_normal(6)
    for cfg in (SolverConfig(epsilon=1e-9), SolverConfig(method="cg", epsilon=1e-9)):
        a = least_squares(A, y, cfg, history=True)
        b = least_squares(A, y, cfg, history=True)
        assert np.array_equal(a.solution, b.solution)
        assert (a.iterations, a.final_criterion_value, a.termination) == (b.iterations, b.final_criterion_value, b.termination)
        for k in a.history:
            assert np.array_equal(a.history[k], b.history[k], equal_nan=True)


def test_batch_matches_single_bitwise(rng):
    A = well_conditioned(rng, 7)
    Y = rng.standard_normal((7, 5))
    for cfg in (SolverConfig(epsilon=1e-9), SolverConfig(method="cg", epsilon=1e-9)):
        batch = solve_many(A, Y, cfg)[0]
        for j in range(5):
            single = least_squares(A, Y[:, j], cfg)
            assert np.array_equal(batch[j].solution, single.solution)
            assert batch[j].iterations == single.iterations


def test_epsilon_sweep_equals_separate_runs(rng):
    A = well_conditioned(rng, 6)
    Y = np.eye(6)
    eps = [1e-2, 1e-4, 1e-7]
    for method in ("sd", "cg"):
        levels = solve_many(A, Y, SolverConfig(method=method), epsilons=eps)
        for e, level in zip(eps, levels):
            sep = solve_many(A, Y, SolverConfig(method=method, epsilon=e))[0]
            for a, b in zip(level, sep):
                assert np.array_equal(a.solution, b.solution) and a.iterations == b.iterations
    with pytest.raises(InputError, match="decreasing"):
        solve_many(A, Y, SD, epsilons=[1e-3, 1e-2])


def test_refresh_period_keeps_accuracy(rng):
    A = well_conditioned(rng, 6, shift=1.0)
    y = rng.standard_normal(6)
    exact = direct_inverse_oracle(A) @ y
    for every in (1, 7, 64, 10**9):
        out = sd_least_squares(A, y, SolverConfig(epsilon=1e-9, max_iters=10**6, refresh_every=every))
        assert out.converged
        assert np.linalg.norm(ls_gradient(A, out.solution, y)) <= 1e-9
        assert np.linalg.norm(out.solution - exact) <= 1e-6
