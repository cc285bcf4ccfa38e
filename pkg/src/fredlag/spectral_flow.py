"""
Spectral flow of sampled paths of symmetric matrices.

On each sample interval a barrier level is placed where no eigenvalue branch
can cross it: since eigenvalues of symmetric matrices are 1-Lipschitz in the
spectral norm, a level at distance more than step/2 from every endpoint
eigenvalue (step = ||A_{k+1} - A_k||) is safe.  The interval then contributes
the change in the number of eigenvalues in [0, level).  Eigenvalues within
tol_rank of zero are snapped to zero and count as nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import AdmissibilityError, InvalidInputError
from .symplectic import TOL_FRAME, TOL_RANK

BARRIER_CAP = 1.0


@dataclass(frozen=True, eq=False)
class SymmetricPath:
    """Samples (t_k, A_k) with 0 = t_0 < ... < t_m = 1 and each A_k symmetric."""

    times: np.ndarray
    matrices: np.ndarray
    tol_frame: float = TOL_FRAME

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        A = np.array(self.matrices, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise InvalidInputError(f"matrices must have shape (m, n, n), got {A.shape}")
        if t.shape != (A.shape[0],):
            raise InvalidInputError("need exactly one time per sample")
        if len(t) < 1:
            raise InvalidInputError("path has no samples")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise InvalidInputError("times must start at 0 and end at 1")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise InvalidInputError("times must be strictly increasing")
        asym = np.abs(A - A.transpose(0, 2, 1)).max(axis=(1, 2)) if A.size else np.zeros(len(t))
        scale = np.maximum(1.0, np.abs(A).max(axis=(1, 2))) if A.size else np.ones(len(t))
        bad = np.flatnonzero(asym > self.tol_frame * scale)
        if bad.size:
            k = int(bad[0])
            raise InvalidInputError(f"sample {k} is not symmetric (|A - A^T| = {asym[k]:.3g})")
        A = 0.5 * (A + A.transpose(0, 2, 1))
        t.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "matrices", A)

    @classmethod
    def from_samples(cls, samples: Sequence[Tuple[float, np.ndarray]], tol_frame: float = TOL_FRAME):
        ts = [s[0] for s in samples]
        As = [np.asarray(s[1], dtype=float) for s in samples]
        return cls(np.array(ts), np.array(As), tol_frame)

    @classmethod
    def from_function(cls, f, m: int):
        """Sample ``f`` at ``m`` uniform times in [0, 1]."""
        ts = np.linspace(0.0, 1.0, m)
        return cls(ts, np.array([np.atleast_2d(f(t)) for t in ts]))

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class IntervalRecord:
    index: int
    step: float
    barrier: Optional[float]
    level: float
    count_start: int
    count_end: int
    contribution: int


@dataclass(frozen=True)
class CrossingReport:
    intervals: Tuple[IntervalRecord, ...]
    total: int
    admissible: bool
    convention: str = "zero eigenvalues count as nonnegative"


def snapped_eigvals(A: np.ndarray, tol_rank: float = TOL_RANK) -> np.ndarray:
    w = np.linalg.eigvalsh(A)
    w[np.abs(w) < tol_rank] = 0.0
    return w


def find_barrier(
    ev_start, ev_end, step: float, barrier_cap: float = BARRIER_CAP, slack: float = TOL_RANK
) -> Optional[float]:
    """Smallest eps >= 0 below ``barrier_cap`` with no endpoint eigenvalue in (eps, eps + step].

    Only eps = 0 and nonnegative endpoint eigenvalues need to be tried: any
    valid eps can be lowered to the nearest such candidate.  The window is
    widened by ``slack`` so that a branch moving by exactly ``step`` is not
    let through by rounding.
    """
    ev = np.concatenate([ev_start, ev_end])
    for eps in np.unique(np.concatenate([[0.0], ev[ev >= 0.0]])):
        if eps >= barrier_cap:
            return None
        if not np.any((ev > eps) & (ev <= eps + step + slack)):
            return float(eps)
    return None


def _interval(k, A0, A1, ev0, ev1, barrier_cap, tol_rank) -> IntervalRecord:
    step = float(np.linalg.norm(A1 - A0, 2)) if A0.size else 0.0
    eps = find_barrier(ev0, ev1, step, barrier_cap, tol_rank)
    if eps is None:
        level = float(max(ev0.max(initial=0.0), ev1.max(initial=0.0)) + step / 2 + 1.0)
    else:
        level = eps + step / 2
    c0 = int(np.count_nonzero((ev0 >= 0) & (ev0 < level)))
    c1 = int(np.count_nonzero((ev1 >= 0) & (ev1 < level)))
    return IntervalRecord(k, step, eps, level, c0, c1, c1 - c0)


def spectral_flow(
    path: SymmetricPath,
    tol_rank: float = TOL_RANK,
    barrier_cap: float = BARRIER_CAP,
    strict: bool = True,
):
    """Net number of eigenvalues crossing from negative to nonnegative along ``path``.

    Returns
    -------
    total : int
    report : CrossingReport

    Raises
    ------
    AdmissibilityError
        If ``strict`` and some interval has no barrier below ``barrier_cap``;
        the error carries the interval so the caller can refine it.  With
        ``strict=False`` such intervals are counted with a barrier above the
        whole endpoint spectrum and the report is marked inadmissible.
    """
    evs = [snapped_eigvals(A, tol_rank) for A in path.matrices]
    records = []
    for k in range(len(path) - 1):
        rec = _interval(k, path.matrices[k], path.matrices[k + 1], evs[k], evs[k + 1], barrier_cap, tol_rank)
        if rec.barrier is None and strict:
            t0, t1 = path.times[k], path.times[k + 1]
            raise AdmissibilityError(
                f"no spectral barrier below {barrier_cap} on interval {k} (t in [{t0:.6g}, {t1:.6g}]); refine sampling",
                interval=(k, k + 1),
            )
        records.append(rec)
    total = sum(r.contribution for r in records)
    admissible = all(r.barrier is not None for r in records)
    return total, CrossingReport(tuple(records), total, admissible)


def interval_admissible(A0, A1, tol_rank: float = TOL_RANK, barrier_cap: float = BARRIER_CAP) -> bool:
    """Whether the single interval A0 -> A1 has a barrier below ``barrier_cap``."""
    step = float(np.linalg.norm(A1 - A0, 2))
    ev0, ev1 = snapped_eigvals(A0, tol_rank), snapped_eigvals(A1, tol_rank)
    return find_barrier(ev0, ev1, step, barrier_cap, tol_rank) is not None


def concatenate(p: SymmetricPath, q: SymmetricPath) -> SymmetricPath:
    """Run ``p`` on [0, 1/2] and ``q`` on [1/2, 1]; the shared endpoint appears once."""
    if p.n != q.n:
        raise InvalidInputError("paths have different matrix sizes")
    tol = max(p.tol_frame, q.tol_frame)
    end, start = p.matrices[-1], q.matrices[0]
    if np.abs(end - start).max() > tol * max(1.0, np.abs(end).max()):
        raise InvalidInputError("p does not end where q begins")
    times = np.concatenate([0.5 * p.times, 0.5 + 0.5 * q.times[1:]])
    mats = np.concatenate([p.matrices, q.matrices[1:]])
    return SymmetricPath(times, mats, tol)


def reverse(path: SymmetricPath) -> SymmetricPath:
    return SymmetricPath((1.0 - path.times)[::-1], path.matrices[::-1], path.tol_frame)
