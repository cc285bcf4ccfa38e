"""
Unitary transport between Lagrangians and complementary perturbations.

Compactness of an operator perturbation is modelled by its numerical rank:
a :class:`RankTracked` matrix X carries a declared bound on rank(X - I).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import ComplementaryPair, chart, chart_inverse, is_transverse
from .errors import ConvergenceError, FredlagError, InvalidInputError, NumericalError
from .symplectic import (
    TOL_FRAME,
    TOL_RANK,
    LagrangianFrame,
    _same_space,
    apply_unitary,
    intersection_dim,
    random_unitary_J,
)

TOL_SQRT = 1e-9
MAX_ITER = 200
# Floored singular values of 1e-3 give condition numbers near 1e6, which the
# monotone iteration needs roughly 2e4 steps to resolve.
TRANSPORT_MAX_ITER = 100_000
SV_FLOOR = 1e-3
MAX_TRIES = 64
COMPLEMENT_MARGIN = 0.1


def numerical_rank(X, tol_rank: float = TOL_RANK) -> int:
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return 0
    return int(np.count_nonzero(np.linalg.svd(X, compute_uv=False) > tol_rank))


@dataclass(frozen=True, eq=False)
class RankTracked:
    """Matrix X together with a declared upper bound on rank(X - I)."""

    X: np.ndarray
    rank_bound: int
    tol_rank: float = TOL_RANK

    def __post_init__(self):
        r = self.perturbation_rank
        if r > self.rank_bound:
            raise NumericalError(f"rank(X - I) = {r} exceeds declared bound {self.rank_bound}")

    @property
    def perturbation_rank(self) -> int:
        return numerical_rank(self.X - np.eye(self.X.shape[0]), self.tol_rank)


@dataclass(frozen=True, eq=False)
class TransportResult:
    U: RankTracked
    T: RankTracked
    S: RankTracked
    K_rank: int


def _check_psd(A: np.ndarray, tol_frame: float) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max()) if A.size else 0.0)
    if np.abs(A - A.T).max(initial=0.0) > tol_frame * scale:
        raise InvalidInputError("matrix is not symmetric")
    if A.size and np.linalg.eigvalsh(A).min() < -tol_frame * scale:
        raise InvalidInputError("matrix is not positive semidefinite")


def sqrt_psd(
    A,
    method: str = "iterative",
    tol_sqrt: float = TOL_SQRT,
    max_iter: int = MAX_ITER,
    tol_frame: float = TOL_FRAME,
) -> np.ndarray:
    """Positive square root of a symmetric positive-semidefinite matrix.

    Parameters
    ----------
    A : array-like, (m, m)
    method : {"iterative", "spectral"}
        ``"iterative"`` scales A by c = ||A|| and runs the monotone iteration
        B_0 = 0, B_{k+1} = B_k + (A/c - B_k^2)/2, which increases to sqrt(A/c).
        Every iterate is a polynomial in A, so the result commutes with
        everything that commutes with A.  ``"spectral"`` uses an
        eigendecomposition and serves as the independent reference.
    tol_sqrt : float
        Required accuracy of S @ S = A (relative to max(1, ||A||)).
    max_iter : int
        Step budget for the iteration; exhausting it raises ConvergenceError.

    Returns
    -------
    S : ndarray, (m, m)
    """
    A = np.array(A, dtype=float)
    _check_psd(A, tol_frame)
    A = 0.5 * (A + A.T)
    if method == "spectral":
        w, V = np.linalg.eigh(A)
        S = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    elif method == "iterative":
        S = _monotone_sqrt(A, max_iter)
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    S = 0.5 * (S + S.T)
    scale = max(1.0, float(np.linalg.norm(A, 2)) if A.size else 0.0)
    resid = float(np.abs(S @ S - A).max(initial=0.0))
    if resid > tol_sqrt * scale:
        raise NumericalError(f"square root residual {resid:.3g} exceeds tol_sqrt")
    return S


def _monotone_sqrt(A: np.ndarray, max_iter: int) -> np.ndarray:
    c = float(np.linalg.norm(A, 2)) if A.size else 0.0
    if c == 0.0:
        return np.zeros_like(A)
    Ac = A / c
    B = np.zeros_like(A)
    # Exact iterates increase monotonically; stop once the update reaches the
    # rounding floor or stops shrinking.
    floor = 8 * np.finfo(float).eps * max(1, A.shape[0])
    prev = np.inf
    stalled = 0
    for _ in range(max_iter):
        step = 0.5 * (Ac - B @ B)
        B = B + step
        size = float(np.abs(step).max())
        if size <= floor:
            return np.sqrt(c) * B
        if size >= prev:
            stalled += 1
            if stalled >= 3:
                return np.sqrt(c) * B
        else:
            stalled = 0
        prev = size
    raise ConvergenceError(
        f"square-root iteration did not converge in {max_iter} steps (last update {prev:.3g})"
    )


def polar_unitary(
    T,
    method: str = "iterative",
    max_iter: int = TRANSPORT_MAX_ITER,
    tol_rank: float = TOL_RANK,
    tol_sqrt: float = TOL_SQRT,
):
    """Polar decomposition T = U S with S = sqrt(T^T T) and U = T S^{-1}."""
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {T.shape}")
    smin = np.linalg.svd(T, compute_uv=False)[-1]
    if smin <= tol_rank:
        raise InvalidInputError(f"T is singular (smallest singular value {smin:.3g})")
    S = sqrt_psd(T.T @ T, method=method, tol_sqrt=tol_sqrt, max_iter=max_iter)
    U = np.linalg.solve(S, T.T).T
    return U, S


def transitive_unitary(
    L0: LagrangianFrame,
    L: LagrangianFrame,
    sv_floor: float = SV_FLOOR,
    method: str = "iterative",
    max_iter: int = TRANSPORT_MAX_ITER,
    tol_frame: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
) -> TransportResult:
    """Orthogonal J-commuting U with U(L0) = L, differing from I by finite rank.

    Steps: T1 = P_L restricted to L0 (matrix Q_L^T Q0); K raises the singular
    values of T1 below ``sv_floor`` to ``sv_floor`` so that T2 = T1 + K is
    invertible; T = T2 P0 - J T2 J P0^perp is the J-linear extension of T2;
    finally U = T S^{-1} with S = sqrt(T^T T).
    """
    _same_space(L0, L)
    space = L0.space
    J = space.J
    eye = np.eye(space.dim)
    T1 = L.Q.T @ L0.Q
    W, sig, Vt = np.linalg.svd(T1)
    raised = sig < sv_floor
    K = (W * np.where(raised, sv_floor - sig, 0.0)) @ Vt
    K_rank = int(np.count_nonzero(raised))
    T2 = L.Q @ (T1 + K) @ L0.Q.T
    P0 = L0.projection
    T = T2 @ P0 - J @ T2 @ J @ (eye - P0)

    S = sqrt_psd(T.T @ T, method=method, max_iter=max_iter, tol_frame=tol_frame)
    U = np.linalg.solve(S, T.T).T

    check_tol = max(tol_frame, 1e2 * np.finfo(float).eps / sv_floor**2)
    err_orth = np.abs(U.T @ U - eye).max()
    err_comm = np.abs(U @ J - J @ U).max()
    image = U @ L0.Q
    err_map = np.abs(image @ image.T - L.projection).max()
    if max(err_orth, err_comm, err_map) > check_tol:
        raise NumericalError(
            f"transport postconditions failed (orthogonality {err_orth:.3g}, "
            f"J-commutation {err_comm:.3g}, image {err_map:.3g})"
        )

    r = numerical_rank(T - eye, tol_rank)
    return TransportResult(
        U=RankTracked(U, 3 * r, tol_rank),
        T=RankTracked(T, r, tol_rank),
        S=RankTracked(S, 2 * r, tol_rank),
        K_rank=K_rank,
    )


def find_common_complement(
    L0: LagrangianFrame,
    L1: LagrangianFrame,
    seed: int = 0,
    margin: float = COMPLEMENT_MARGIN,
    max_tries: int = MAX_TRIES,
    tol_rank: float = TOL_RANK,
) -> LagrangianFrame:
    """A Lagrangian transverse to both L0 and L1 with gap at least ``margin``.

    Candidates are tried in a fixed order: J(L0), J(L1), then images of J(L0)
    under ``random_unitary_J(seed + i)`` for i = 0, 1, ...
    """
    _same_space(L0, L1)
    space = L0.space

    def candidates():
        yield L0.j_image()
        yield L1.j_image()
        base = L0.j_image()
        for i in range(max_tries):
            yield apply_unitary(random_unitary_J(space, seed + i), base)

    for cand in candidates():
        if is_transverse(cand, L0, margin, tol_rank) and is_transverse(cand, L1, margin, tol_rank):
            return cand
    raise FredlagError(f"no common complement with margin {margin} after {max_tries} random tries; lower the margin")


def complementary_perturbation(
    L0: LagrangianFrame,
    L1: LagrangianFrame,
    seed: int = 0,
    margin: float = COMPLEMENT_MARGIN,
    tol_frame: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
) -> LagrangianFrame:
    """A Lagrangian L1' transverse to L0 that differs from L1 by finite rank.

    With L2 a common complement, T is the chart value of L1 in the chart of
    (L0, L2).  Adding the projection onto ker T (which is L1 ∩ L0 in chart
    coordinates) makes T' = T + P_{ker T} invertible, and L1' is the Lagrangian
    with chart value T'.  If L1 is already transverse to L0 it is returned as is.
    """
    L2 = find_common_complement(L0, L1, seed, margin, tol_rank=tol_rank)
    pair = ComplementaryPair(L0, L2, tol_rank=tol_rank)
    T = chart(pair, L1, tol_frame, tol_rank).A
    w, V = np.linalg.eigh(T)
    ker = V[:, np.abs(w) < tol_rank]
    if ker.shape[1] == 0:
        return L1
    T_prime = T + ker @ ker.T
    out = chart_inverse(pair, T_prime, tol_frame)
    if intersection_dim(out, L0, tol_rank) != 0:
        raise NumericalError("perturbed Lagrangian still meets L0")
    return out
