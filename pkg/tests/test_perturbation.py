import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fredlag.errors import ConvergenceError, InvalidInputError, NumericalError
from fredlag.perturbation import (
    RankTracked,
    complementary_perturbation,
    find_common_complement,
    numerical_rank,
    polar_unitary,
    sqrt_psd,
    transitive_unitary,
)
from fredlag.charts import is_transverse
from fredlag.symplectic import SymplecticSpace, intersection_dim, symplectic_matrix

from cases import engineered_pair, random_pair


def test_sqrt_of_diagonal():
    S = sqrt_psd(np.diag([4.0, 9.0, 0.0]))
    assert np.allclose(S, np.diag([2.0, 3.0, 0.0]), atol=1e-9)


def test_sqrt_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        sqrt_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        sqrt_psd(np.diag([1.0, -1.0]))
    with pytest.raises(InvalidInputError):
        sqrt_psd(np.eye(2), method="newton")


def test_sqrt_budget_exhaustion():
    with pytest.raises(ConvergenceError):
        sqrt_psd(np.diag([1.0, 1e-6]), max_iter=5)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 6), seed=st.integers(0, 5000))
def test_iterative_sqrt_matches_spectral(m, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, m))
    A = X @ X.T + 0.1 * np.eye(m)
    S = sqrt_psd(A, max_iter=100_000)
    assert np.allclose(S, sqrt_psd(A, method="spectral"), atol=1e-9)
    assert np.allclose(S @ S, A, atol=1e-9 * max(1, np.linalg.norm(A, 2)))


def test_polar_of_rotation_times_scaling():
    c, s = np.cos(0.4), np.sin(0.4)
    R = np.array([[c, -s], [s, c]])
    U, S = polar_unitary(R @ np.diag([2.0, 0.5]))
    assert np.allclose(U, R, atol=1e-9)
    assert np.allclose(S, np.diag([2.0, 0.5]), atol=1e-9)
    with pytest.raises(InvalidInputError):
        polar_unitary(np.zeros((2, 2)))


def test_rank_tracked_enforces_bound():
    X = np.eye(3)
    X[0, 1] = 1.0
    assert RankTracked(X, 1).perturbation_rank == 1
    with pytest.raises(NumericalError):
        RankTracked(X, 0)
    assert numerical_rank(np.zeros((0, 0))) == 0


def test_transport_horizontal_to_vertical_is_J():
    space = SymplecticSpace(1)
    res = transitive_unitary(space.horizontal(), space.vertical())
    assert np.allclose(res.U.X, symplectic_matrix(1), atol=1e-9)
    assert res.K_rank == 1


def test_transport_identity():
    space = SymplecticSpace(3)
    L = space.horizontal()
    res = transitive_unitary(L, L)
    assert np.allclose(res.U.X, np.eye(6), atol=1e-12)
    assert res.U.perturbation_rank == 0 and res.K_rank == 0


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 5000))
def test_transport_postconditions(n, seed):
    L0, L = random_pair(n, seed)
    res = transitive_unitary(L0, L)
    U, J = res.U.X, symplectic_matrix(n)
    assert np.allclose(U.T @ U, np.eye(2 * n), atol=1e-8)
    assert np.allclose(U @ J, J @ U, atol=1e-8)
    image = U @ L0.Q
    assert np.allclose(image @ image.T, L.projection, atol=1e-8)
    assert res.U.perturbation_rank <= 3 * res.T.perturbation_rank


def test_common_complement_default_order():
    space = SymplecticSpace(2)
    L0 = space.horizontal()
    assert find_common_complement(L0, L0).same_subspace(space.vertical())


@pytest.mark.parametrize("d", [0, 1, 2])
def test_complementary_perturbation(d):
    L0, L1 = engineered_pair(3, d, 4)
    out = complementary_perturbation(L0, L1)
    assert intersection_dim(L0, out) == 0 and is_transverse(out, L0)
    assert numerical_rank(out.projection - L1.projection) <= 2 * d
    if d == 0:
        assert out is L1


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 5000), d=st.integers(0, 4))
def test_complementary_perturbation_property(n, seed, d):
    d = min(d, n)
    L0, L1 = engineered_pair(n, d, seed)
    out = complementary_perturbation(L0, L1, seed=seed)
    assert intersection_dim(L0, out) == 0
    assert numerical_rank(out.projection - L1.projection) <= 2 * d
