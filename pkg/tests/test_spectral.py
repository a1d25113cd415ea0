import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colinv.errors import InputError
from colinv.spectral import spectral_norm_sq, spectral_summary
from oracles import jacobi_singular_values


def test_diagonal_and_identity():
    s = spectral_summary(np.diag([3.0, 1.0]))
    assert s.sigma_min == pytest.approx(1.0, rel=1e-10)
    assert s.sigma_max == pytest.approx(3.0, rel=1e-10)
    assert s.kappa2 == pytest.approx(3.0, rel=1e-10)
    s = spectral_summary(np.eye(5))
    assert (s.sigma_min, s.sigma_max, s.kappa2) == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)
    assert s.converged and s.termination == "converged"


@pytest.mark.parametrize("seed", range(4))
def test_against_jacobi_oracle(seed):
    A = np.random.default_rng(seed).standard_normal((8, 8))
    sv = jacobi_singular_values(A)
    s = spectral_summary(A, tol=1e-14)
    assert s.sigma_min == pytest.approx(sv[0], rel=1e-8)
    assert s.sigma_max == pytest.approx(sv[-1], rel=1e-8)


def test_rectangular_both_orientations():
    A = np.random.default_rng(5).standard_normal((12, 5))
    sv = np.linalg.svd(A, compute_uv=False)
    for M in (A, A.T):
        s = spectral_summary(M, tol=1e-14)
        assert s.sigma_min == pytest.approx(sv[-1], rel=1e-8)
        assert s.sigma_max == pytest.approx(sv[0], rel=1e-8)


@given(st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3), st.integers(1, 8))
def test_scaled_identity(c, n):
    s = spectral_summary(c * np.eye(n))
    assert s.sigma_min == pytest.approx(abs(c), rel=1e-10)
    assert s.sigma_max == pytest.approx(abs(c), rel=1e-10)


def test_singular_reports_zero():
    s = spectral_summary([[1.0, 1.0], [1.0, 1.0]])
    assert s.sigma_min == 0.0 and s.kappa2 == float("inf")
    assert s.sigma_max == pytest.approx(2.0)


def test_unconverged_is_flagged_not_raised():
    A = np.diag([1.0, 0.999999, 0.5])
    s = spectral_summary(A, tol=1e-16, max_iter=2)
    assert not s.converged and s.termination == "max_iters_reached"
    assert s.sigma_max <= 1.0 + 1e-12


def test_spectral_norm_sq():
    assert spectral_norm_sq(np.zeros((3, 3))) == (0.0, True)
    D = np.random.default_rng(2).standard_normal((6, 4))
    value, ok = spectral_norm_sq(D)
    assert ok and value == pytest.approx(np.linalg.norm(D, 2) ** 2, rel=1e-10)
    with pytest.raises(InputError):
        spectral_summary(np.eye(2), tol=0.0)
