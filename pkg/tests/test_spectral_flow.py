import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fredlag.errors import AdmissibilityError, InvalidInputError
from fredlag.spectral_flow import SymmetricPath, concatenate, find_barrier, reverse, spectral_flow


def ramp(m=11):
    return SymmetricPath.from_function(lambda t: np.array([[t - 0.5]]), m)


def test_trivial_flows():
    assert spectral_flow(SymmetricPath.from_function(lambda t: np.eye(2), 3))[0] == 0
    assert spectral_flow(ramp())[0] == 1
    assert spectral_flow(reverse(ramp()))[0] == -1
    assert spectral_flow(SymmetricPath.from_function(lambda t: np.diag([t - 0.5, 0.5 - t]), 11))[0] == 0


def test_zero_counts_as_nonnegative():
    # -1/2 -> 0 is a full crossing, 0 -> 1/2 is none
    up = SymmetricPath(np.array([0.0, 1.0]), np.array([[[-0.5]], [[0.0]]]))
    assert spectral_flow(up)[0] == 1
    on = SymmetricPath(np.array([0.0, 1.0]), np.array([[[0.0]], [[0.5]]]))
    assert spectral_flow(on)[0] == 0


def test_coarse_path_is_inadmissible():
    # a single 0.05-spaced cluster across a jump of 4 leaves no barrier below 1
    mats = np.array([np.diag([-2.0, 0.05, 0.1, 0.5, 0.9]), np.diag([2.0, 0.05, 0.1, 0.5, 0.9])])
    path = SymmetricPath(np.array([0.0, 1.0]), mats)
    with pytest.raises(AdmissibilityError) as err:
        spectral_flow(path)
    assert err.value.interval == (0, 1)
    total, rep = spectral_flow(path, strict=False)
    assert not rep.admissible and total == 1


def test_find_barrier():
    assert find_barrier(np.array([-1.0]), np.array([1.0]), 2.0) is None
    assert find_barrier(np.array([-1.0]), np.array([1.0]), 2.0, barrier_cap=2.0) == 1.0
    assert find_barrier(np.array([0.5]), np.array([0.5]), 0.1) == 0.0
    assert find_barrier(np.array([0.3, 0.6, 0.9]), np.array([0.3]), 0.5, barrier_cap=0.5) is None


def test_path_validation():
    with pytest.raises(InvalidInputError):
        SymmetricPath(np.array([0.0, 0.5]), np.zeros((2, 1, 1)))
    with pytest.raises(InvalidInputError):
        SymmetricPath(np.array([0.0, 1.0]), np.array([[[0.0, 1.0], [0.0, 0.0]]] * 2))
    with pytest.raises(InvalidInputError):
        concatenate(ramp(), ramp())


def eigen_path(n, seed):
    rng = np.random.default_rng(seed)
    C, D = rng.standard_normal((2, n, n))
    C, D = C + C.T, D + D.T
    return lambda t: np.cos(3 * t) * C + np.sin(3 * t) * D


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 5000))
def test_flow_equals_change_in_nonnegative_count(n, seed):
    # in finite dimensions the flow telescopes to n_+(end) - n_+(start)
    path = SymmetricPath.from_function(eigen_path(n, seed), 300)
    nplus = [int(np.count_nonzero(np.linalg.eigvalsh(A) >= 0)) for A in (path.matrices[0], path.matrices[-1])]
    assert spectral_flow(path)[0] == nplus[1] - nplus[0]


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 5000))
def test_reverse_and_concatenate(n, seed):
    p = SymmetricPath.from_function(eigen_path(n, seed), 300)
    q = SymmetricPath.from_function(lambda t, f=eigen_path(n, seed + 1), A=p.matrices[-1]: A + t * 0.3 * f(t), 100)
    assert spectral_flow(reverse(p))[0] == -spectral_flow(p)[0]
    assert spectral_flow(concatenate(p, q))[0] == spectral_flow(p)[0] + spectral_flow(q)[0]


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 5000))
def test_partition_independence(n, seed):
    f = eigen_path(n, seed)
    coarse = SymmetricPath.from_function(f, 200)
    t = np.unique(np.concatenate([coarse.times, np.random.default_rng(seed).uniform(0, 1, 500)]))
    fine = SymmetricPath(t, np.array([f(x) for x in t]))
    assert spectral_flow(fine)[0] == spectral_flow(coarse)[0]
