"""
Graph charts on the Lagrangian Grassmannian.

For a complementary pair (L0, L1), every Lagrangian L transverse to L1 is the
graph of a unique S: L0 -> L1, and the chart sends L to the symmetric operator
P_{L0} J S on L0.  Matrices are written in the orthonormal frames Q0, Q1:
S(Q0 c) = Q1 B c and the chart value is A = Q0^T J Q1 B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import InvalidInputError, TransversalityError
from .symplectic import (
    TOL_FRAME,
    TOL_RANK,
    LagrangianFrame,
    _same_space,
    intersection_dim,
    lagrangian_from_basis,
    minimum_gap,
    reduced_min_modulus,
)

GAP_FLOOR = 1e-6


def _asymmetry(A: np.ndarray) -> float:
    return float(np.abs(A - A.T).max()) if A.size else 0.0


def _sym_tol(A: np.ndarray, tol_frame: float) -> float:
    return tol_frame * max(1.0, float(np.abs(A).max()) if A.size else 0.0)


@dataclass(frozen=True, eq=False)
class ComplementaryPair:
    """Lagrangians L0, L1 with L0 ∩ L1 = 0, checked with a gap margin."""

    L0: LagrangianFrame
    L1: LagrangianFrame
    gap_floor: float = GAP_FLOOR
    tol_rank: float = TOL_RANK
    margin: float = field(init=False)

    def __post_init__(self):
        _same_space(self.L0, self.L1)
        if intersection_dim(self.L0, self.L1, self.tol_rank) != 0:
            raise TransversalityError("L0 and L1 intersect; not a complementary pair")
        margin = minimum_gap(self.L0, self.L1, self.tol_rank)
        if margin <= self.gap_floor:
            raise TransversalityError(
                f"pair is nearly degenerate: minimum gap {margin:.3g} <= gap_floor {self.gap_floor:.3g}"
            )
        object.__setattr__(self, "margin", margin)

    @property
    def space(self):
        return self.L0.space

    @cached_property
    def coupling(self) -> np.ndarray:
        """Q0^T J Q1, the matrix of (P_{L0} J)|_{L1}; invertible for complementary Lagrangians."""
        return self.L0.Q.T @ self.space.J @ self.L1.Q

    @cached_property
    def _basis(self) -> np.ndarray:
        return np.hstack([self.L0.Q, self.L1.Q])


@dataclass(frozen=True, eq=False)
class GraphMap:
    """S: L0 -> L1 in frame coordinates, S(Q0 c) = Q1 B c."""

    pair: ComplementaryPair
    B: np.ndarray

    def embedding(self) -> np.ndarray:
        """Q0 + Q1 B, the matrix of u -> u + Su on L0."""
        return self.pair.L0.Q + self.pair.L1.Q @ self.B

    def graph(self, tol_frame: float = TOL_FRAME) -> LagrangianFrame:
        return lagrangian_from_basis(self.pair.space, self.embedding(), tol_frame=tol_frame)


@dataclass(frozen=True, eq=False)
class ChartValue:
    """Symmetric matrix A = Q0^T J Q1 B representing L in the chart of ``pair``."""

    pair: ComplementaryPair
    A: np.ndarray
    asymmetry: float = 0.0

    def kernel_dim(self, tol_rank: float = TOL_RANK) -> int:
        return int(np.count_nonzero(np.abs(np.linalg.eigvalsh(self.A)) < tol_rank))


def is_transverse(L: LagrangianFrame, L1: LagrangianFrame, margin: float = 0.0, tol_rank: float = TOL_RANK) -> bool:
    """True iff L ∩ L1 = 0 and the minimum gap between them is at least ``margin``."""
    _same_space(L, L1)
    return intersection_dim(L, L1, tol_rank) == 0 and minimum_gap(L, L1, tol_rank) >= margin


def graph_map(L: LagrangianFrame, pair: ComplementaryPair, tol_rank: float = TOL_RANK) -> GraphMap:
    """The unique S: L0 -> L1 whose graph is L.

    Writes Q_L = Q0 X + Q1 Y in the basis [Q0, Q1]; L is transverse to L1
    exactly when X is invertible, and then B = Y X^{-1}.
    """
    _same_space(L, pair.L0)
    n = L.n
    coeffs = np.linalg.solve(pair._basis, L.Q)
    X, Y = coeffs[:n], coeffs[n:]
    sx = np.linalg.svd(X, compute_uv=False)
    if sx[-1] < tol_rank:
        raise TransversalityError(
            f"L is not transverse to L1 (smallest singular value of the L0-component {sx[-1]:.3g})"
        )
    B = np.linalg.solve(X.T, Y.T).T
    return GraphMap(pair, B)


def chart(pair: ComplementaryPair, L: LagrangianFrame, tol_frame: float = TOL_FRAME, tol_rank: float = TOL_RANK) -> ChartValue:
    """Chart value A = Q0^T J Q1 B of L; symmetric, with ker A = L ∩ L0."""
    g = graph_map(L, pair, tol_rank)
    A = pair.coupling @ g.B
    asym = _asymmetry(A)
    if asym > _sym_tol(A, tol_frame):
        raise InvalidInputError(f"chart value is not symmetric (|A - A^T| = {asym:.3g})")
    return ChartValue(pair, 0.5 * (A + A.T), asym)


def chart_inverse(pair: ComplementaryPair, A, tol_frame: float = TOL_FRAME) -> LagrangianFrame:
    """The Lagrangian transverse to L1 whose chart value is ``A``."""
    A = np.asarray(A, dtype=float)
    n = pair.space.n
    if A.shape != (n, n):
        raise InvalidInputError(f"chart value must be {n} x {n}, got {A.shape}")
    asym = _asymmetry(A)
    if asym > _sym_tol(A, tol_frame):
        raise InvalidInputError(f"chart value is not symmetric (|A - A^T| = {asym:.3g})")
    B = np.linalg.solve(pair.coupling, 0.5 * (A + A.T))
    return GraphMap(pair, B).graph(tol_frame)


@dataclass(frozen=True)
class GapReport:
    """The quantities entering the two-sided minimum-gap estimate for L against L0.

    ``lower_holds`` and ``upper_holds`` are None in the degenerate case L = L0,
    where the chart value vanishes and its reduced minimum modulus is infinite.
    """

    kernel_dim: int
    gap_L_L0: float
    min_modulus: float
    graph_norm: float
    gap_L0_L1: float
    lower_bound: float
    upper_bound: float
    lower_holds: Optional[bool]
    upper_holds: Optional[bool]
    degenerate: bool

    @property
    def holds(self) -> bool:
        return self.degenerate or bool(self.lower_holds and self.upper_holds)


def gap_inequality_report(
    pair: ComplementaryPair,
    L: LagrangianFrame,
    slack: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
) -> GapReport:
    """Check ||I+S||^{-1} γ(A) <= γ(L, L0) <= γ(L0, L1)^{-1} γ(A).

    Here A is the chart value of L, γ(A) its reduced minimum modulus, and
    ||I+S|| the norm of the graph embedding u -> u + Su, which is the largest
    singular value of Q0 + Q1 B.
    """
    g = graph_map(L, pair, tol_rank)
    A = pair.coupling @ g.B
    A = 0.5 * (A + A.T)
    kdim = int(np.count_nonzero(np.abs(np.linalg.eigvalsh(A)) < tol_rank))
    gap_L = minimum_gap(L, pair.L0, tol_rank)
    modulus = reduced_min_modulus(A, tol_rank)
    graph_norm = float(np.linalg.norm(g.embedding(), 2))
    gap01 = minimum_gap(pair.L0, pair.L1, tol_rank)
    degenerate = not np.isfinite(modulus)
    if degenerate:
        lower = upper = float("nan")
        lower_ok = upper_ok = None
    else:
        lower = modulus / graph_norm
        upper = modulus / gap01
        lower_ok = bool(lower <= gap_L + slack)
        upper_ok = bool(gap_L <= upper + slack)
    return GapReport(kdim, gap_L, modulus, graph_norm, gap01, lower, upper, lower_ok, upper_ok, degenerate)
