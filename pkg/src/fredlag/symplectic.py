"""
Finite-dimensional symplectic space R^n x R^n, Lagrangian frames and the
subspace metrics used throughout the package.

Coordinates are ordered (x_1, ..., x_n, y_1, ..., y_n) and the complex
structure is J = [[0, -I], [I, 0]], so J e_j = e_{n+j}.  A real 2n x 2n matrix
commuting with J is the realification of an n x n complex matrix A + iB,
namely [[A, -B], [B, A]].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import AdmissibilityError, InvalidInputError

TOL_FRAME = 1e-10
TOL_RANK = 1e-8


def symplectic_matrix(n: int) -> np.ndarray:
    """Return the 2n x 2n complex structure J in block form."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True)
class SymplecticSpace:
    """The space R^{2n} with the standard complex structure.

    Parameters
    ----------
    n : int
        Complex dimension; the ambient real dimension is ``2 * n``.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidInputError(f"n must be a positive integer, got {self.n!r}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @cached_property
    def J(self) -> np.ndarray:
        J = symplectic_matrix(self.n)
        J.setflags(write=False)
        return J

    def horizontal(self) -> "LagrangianFrame":
        """The Lagrangian R^n x 0."""
        return LagrangianFrame(self, np.eye(2 * self.n)[:, : self.n])

    def vertical(self) -> "LagrangianFrame":
        """The Lagrangian 0 x R^n (equal to J applied to the horizontal one)."""
        return LagrangianFrame(self, np.eye(2 * self.n)[:, self.n :])


def _check_vector(space: SymplecticSpace, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (space.dim,):
        raise InvalidInputError(f"expected a vector of length {space.dim}, got shape {v.shape}")
    return v


def omega(space: SymplecticSpace, u, v) -> float:
    """Symplectic form <Ju, v>."""
    u = _check_vector(space, u)
    v = _check_vector(space, v)
    return float(space.J @ u @ v)


def frame_violations(space: SymplecticSpace, Q, tol_frame: float = TOL_FRAME) -> dict:
    """Measure how far ``Q`` is from an orthonormal Lagrangian frame.

    Returns a dict mapping violation names to magnitudes; empty when ``Q`` is valid.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (space.dim, space.n):
        return {"shape": float("inf")}
    violations = {}
    orth = np.abs(Q.T @ Q - np.eye(space.n)).max()
    if orth > tol_frame:
        violations["orthonormality"] = float(orth)
    iso = np.abs(Q.T @ space.J @ Q).max()
    if iso > tol_frame:
        violations["isotropy"] = float(iso)
    return violations


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    """A Lagrangian subspace stored as a 2n x n orthonormal frame ``Q``.

    The frame is validated on construction: ``Q.T @ Q = I`` and
    ``Q.T @ J @ Q = 0`` within ``tol_frame``.  Use :func:`lagrangian_from_basis`
    to build one from an arbitrary spanning set.
    """

    space: SymplecticSpace
    Q: np.ndarray
    tol_frame: float = TOL_FRAME

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        bad = frame_violations(self.space, Q, self.tol_frame)
        if bad:
            detail = ", ".join(f"{k}={v:.3g}" for k, v in bad.items())
            raise InvalidInputError(f"not an orthonormal Lagrangian frame ({detail})")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.space.n

    @cached_property
    def projection(self) -> np.ndarray:
        P = self.Q @ self.Q.T
        P.setflags(write=False)
        return P

    def j_image(self) -> "LagrangianFrame":
        """J(L), which for a Lagrangian is its orthogonal complement."""
        return LagrangianFrame(self.space, self.space.J @ self.Q, self.tol_frame)

    def same_subspace(self, other: "LagrangianFrame", tol: float = TOL_RANK) -> bool:
        return projection_distance(self, other) <= tol

    def __repr__(self):
        return f"LagrangianFrame(n={self.n}, Q={self.Q.round(6).tolist()})"


def projection_distance(L: LagrangianFrame, M: LagrangianFrame) -> float:
    """Spectral norm of P_L - P_M (the sine of the largest principal angle)."""
    _same_space(L, M)
    return float(np.linalg.norm(L.projection - M.projection, 2))


def lagrangian_from_basis(
    space: SymplecticSpace,
    vectors: Iterable,
    tol_frame: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
) -> LagrangianFrame:
    """Orthonormalize ``n`` spanning vectors into a Lagrangian frame.

    ``vectors`` is a sequence of n vectors of length 2n (or a 2n x n array whose
    columns are the vectors).  The orthonormal frame comes from a QR
    factorization with the diagonal of R made positive, so a single vector is
    simply normalized.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        V = np.array(vectors, dtype=float)
    else:
        cols = [_check_vector(space, v) for v in vectors]
        V = np.column_stack(cols) if cols else np.zeros((space.dim, 0))
    if V.shape != (space.dim, space.n):
        raise InvalidInputError(
            f"need exactly {space.n} vectors of length {space.dim}, got array of shape {V.shape}"
        )
    sv = np.linalg.svd(V, compute_uv=False)
    if sv[-1] <= tol_rank * max(sv[0], 1.0):
        raise InvalidInputError(f"vectors are rank deficient (smallest singular value {sv[-1]:.3g})")
    Q, R = np.linalg.qr(V)
    Q = Q * np.sign(np.diag(R))
    iso = np.abs(Q.T @ space.J @ Q).max()
    if iso > tol_frame:
        raise InvalidInputError(f"span is not isotropic (|Q^T J Q| = {iso:.3g}); input is not Lagrangian")
    return LagrangianFrame(space, Q, tol_frame)


def _same_space(*frames: LagrangianFrame) -> None:
    n = frames[0].space.n
    for f in frames[1:]:
        if f.space.n != n:
            raise InvalidInputError(f"dimension mismatch: n={n} vs n={f.space.n}")


def _as_frame(M) -> np.ndarray:
    return M.Q if isinstance(M, LagrangianFrame) else np.asarray(M, dtype=float)


def residual_sines(M, N) -> np.ndarray:
    """Sines of the principal angles from span(M) to span(N), ascending.

    Computed as singular values of (I - P_N) Q_M, which stays accurate for
    nearly coincident directions where cosines would saturate at 1.
    """
    QM = _as_frame(M)
    QN = _as_frame(N)
    if QM.shape[0] != QN.shape[0]:
        raise InvalidInputError("subspaces live in different ambient dimensions")
    if QM.shape[1] == 0:
        return np.zeros(0)
    R = QM - QN @ (QN.T @ QM)
    return np.sort(np.linalg.svd(R, compute_uv=False))


def intersection_dim(L: LagrangianFrame, M: LagrangianFrame, tol_rank: float = TOL_RANK) -> int:
    """dim(L ∩ M): number of principal angles whose sine is below ``tol_rank``."""
    _same_space(L, M)
    return int(np.count_nonzero(residual_sines(L, M) < tol_rank))


@dataclass(frozen=True)
class PairData:
    dim_intersection: int
    dim_cokernel: int

    @property
    def index(self) -> int:
        return self.dim_intersection - self.dim_cokernel


def pair_data(L: LagrangianFrame, M: LagrangianFrame, tol_rank: float = TOL_RANK) -> PairData:
    """Kernel and cokernel dimensions of the pair (L, M).

    The cokernel is H / (L + M); its dimension is found independently of the
    intersection from the numerical rank of the stacked frame [Q_L, Q_M].
    """
    _same_space(L, M)
    sv = np.linalg.svd(np.hstack([L.Q, M.Q]), compute_uv=False)
    rank_sum = int(np.count_nonzero(sv > tol_rank))
    return PairData(intersection_dim(L, M, tol_rank), L.space.dim - rank_sum)


def reduced_min_modulus(T, tol_rank: float = TOL_RANK) -> float:
    """Smallest singular value above ``tol_rank``; ``inf`` if there is none."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if T.size == 0:
        return float("inf")
    sv = np.linalg.svd(T, compute_uv=False)
    nz = sv[sv > tol_rank]
    return float(nz.min()) if nz.size else float("inf")


def minimum_gap(M, N, tol_rank: float = TOL_RANK) -> float:
    """Kato's minimum gap inf_{u in M \\ N} dist(u, N) / dist(u, M ∩ N).

    Splitting u into its part in M ∩ N and its part in M ⊖ (M ∩ N) shows the
    infimum equals the smallest principal sine exceeding ``tol_rank``.  When
    M ⊆ N the infimum is vacuous and 1 is returned.
    """
    s = residual_sines(M, N)
    s = s[s >= tol_rank]
    return float(s.min()) if s.size else 1.0


def is_orthogonal(U, tol: float = TOL_FRAME) -> bool:
    U = np.asarray(U, dtype=float)
    return bool(np.abs(U.T @ U - np.eye(U.shape[0])).max() <= tol)


def commutes_with_J(U, tol: float = TOL_FRAME) -> bool:
    U = np.asarray(U, dtype=float)
    J = symplectic_matrix(U.shape[0] // 2)
    return bool(np.abs(U @ J - J @ U).max() <= tol)


def apply_unitary(U, L: LagrangianFrame, tol_frame: float = TOL_FRAME) -> LagrangianFrame:
    """Image U(L) of a Lagrangian under an orthogonal, J-commuting map.

    The frame of the image is U @ Q, whose projection is U P_L U^T.
    """
    U = np.asarray(U, dtype=float)
    if U.shape != (L.space.dim, L.space.dim):
        raise InvalidInputError(f"U has shape {U.shape}, expected {(L.space.dim,) * 2}")
    if not is_orthogonal(U, tol_frame):
        raise InvalidInputError("U is not orthogonal")
    if not commutes_with_J(U, tol_frame):
        raise InvalidInputError("U does not commute with J")
    return LagrangianFrame(L.space, U @ L.Q, L.tol_frame)


def realify(W: np.ndarray) -> np.ndarray:
    """Real 2n x 2n form [[A, -B], [B, A]] of the complex matrix A + iB."""
    A, B = W.real, W.imag
    return np.block([[A, -B], [B, A]])


def complexify(Q: np.ndarray) -> np.ndarray:
    """Complex n x n matrix X + iY of a 2n x n real frame [X; Y]."""
    n = Q.shape[1]
    return Q[:n] + 1j * Q[n:]


def random_unitary_J(space: SymplecticSpace, seed: int) -> np.ndarray:
    """Seeded orthogonal J-commuting matrix (realified Haar-random unitary)."""
    rng = np.random.default_rng(seed)
    n = space.n
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    W, R = np.linalg.qr(Z)
    d = np.diag(R)
    W = W * (d / np.abs(d))
    return realify(W)


def random_lagrangian(space: SymplecticSpace, seed: int) -> LagrangianFrame:
    """Image of the horizontal Lagrangian under :func:`random_unitary_J`."""
    return apply_unitary(random_unitary_J(space, seed), space.horizontal())


def det_squared_winding(path, loop_tol: float = TOL_RANK) -> int:
    """Winding number of t -> det(U_t)^2 around a loop of Lagrangians.

    Each frame Q = [X; Y] of the loop is the image of R^n x 0 under the unitary
    U = X + iY; the square of its determinant does not depend on the choice of
    orthonormal frame.  Phases are accumulated sample to sample, and each step
    must stay below pi/2 so the unwrapping is unambiguous.

    Parameters
    ----------
    path : LagrangianPath or sequence of LagrangianFrame
    loop_tol : float
        Allowed projection distance between the first and last subspace.
    """
    frames: Sequence[LagrangianFrame] = getattr(path, "frames", path)
    frames = list(frames)
    if len(frames) < 2:
        raise InvalidInputError("a loop needs at least two samples")
    if projection_distance(frames[0], frames[-1]) > loop_tol:
        raise InvalidInputError("path is not a loop: first and last subspaces differ")
    dets = np.array([np.linalg.det(complexify(f.Q)) ** 2 for f in frames])
    steps = np.angle(dets[1:] / dets[:-1])
    worst = int(np.argmax(np.abs(steps)))
    if abs(steps[worst]) >= np.pi / 2:
        raise AdmissibilityError(
            f"det^2 phase step {steps[worst]:.3f} on interval {worst} exceeds pi/2; refine sampling",
            interval=(worst, worst + 1),
        )
    turns = steps.sum() / (2 * np.pi)
    return int(np.rint(turns))
