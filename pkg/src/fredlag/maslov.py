"""
Maslov index of sampled curves of Lagrangians relative to a fixed L0.

A curve is cut into segments, each lying in the chart domain of a complement
L_j of L0; the index is the sum over segments of the spectral flow of the chart
values.  Sign conventions: the chart is +P_{L0} J S and zero eigenvalues count
as nonnegative, which makes the once-around rotation loop in R^2 have index -1
relative to the vertical line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .charts import ComplementaryPair, chart, is_transverse
from .errors import AdmissibilityError, InvalidInputError, TransversalityError
from .perturbation import MAX_TRIES
from .spectral_flow import BARRIER_CAP, CrossingReport, SymmetricPath, interval_admissible, spectral_flow
from .symplectic import (
    TOL_FRAME,
    TOL_RANK,
    LagrangianFrame,
    SymplecticSpace,
    _same_space,
    apply_unitary,
    minimum_gap,
    projection_distance,
    random_unitary_J,
    realify,
)

STEP_CAP = 0.3
MARGIN_FLOOR = 1e-3


@dataclass(frozen=True, eq=False)
class LagrangianPath:
    """Samples (t_k, L_k) of a curve of Lagrangians on [0, 1].

    Consecutive samples must satisfy ||P_{k+1} - P_k|| <= step_cap; a coarser
    path raises AdmissibilityError naming the first offending interval.
    """

    times: np.ndarray
    frames: Tuple[LagrangianFrame, ...]
    step_cap: float = STEP_CAP

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        frames = tuple(self.frames)
        if len(frames) < 2 or t.shape != (len(frames),):
            raise InvalidInputError("a path needs at least two samples and one time per sample")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise InvalidInputError("times must increase strictly from 0 to 1")
        _same_space(*frames)
        for k, d in enumerate(self.steps(frames)):
            if d > self.step_cap:
                raise AdmissibilityError(
                    f"projection step {d:.3g} on interval {k} exceeds step_cap {self.step_cap}; refine sampling",
                    interval=(k, k + 1),
                )
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "frames", frames)

    @staticmethod
    def steps(frames) -> List[float]:
        return [projection_distance(a, b) for a, b in zip(frames[:-1], frames[1:])]

    @classmethod
    def uniform(cls, frames: Sequence[LagrangianFrame], step_cap: float = STEP_CAP):
        return cls(np.linspace(0.0, 1.0, len(frames)), tuple(frames), step_cap)

    @property
    def space(self) -> SymplecticSpace:
        return self.frames[0].space

    def __len__(self):
        return len(self.frames)

    def is_loop(self, tol: float = TOL_RANK) -> bool:
        return projection_distance(self.frames[0], self.frames[-1]) <= tol


def concatenate(p: LagrangianPath, q: LagrangianPath, tol: float = TOL_RANK) -> LagrangianPath:
    """Traverse ``p`` on [0, 1/2], then ``q`` on [1/2, 1]."""
    if projection_distance(p.frames[-1], q.frames[0]) > tol:
        raise InvalidInputError("p does not end where q begins")
    times = np.concatenate([0.5 * p.times, 0.5 + 0.5 * q.times[1:]])
    return LagrangianPath(times, p.frames + q.frames[1:], max(p.step_cap, q.step_cap))


def reverse(path: LagrangianPath) -> LagrangianPath:
    return LagrangianPath((1.0 - path.times)[::-1], path.frames[::-1], path.step_cap)


@dataclass(frozen=True, eq=False)
class PartitionCertificate:
    """Breakpoints (sample indices) and the complement used on each segment.

    Segment j covers samples ``breakpoints[j] .. breakpoints[j + 1]`` and lies in
    the chart domain of ``complements[j]``; ``margins[j]`` is the smallest gap
    seen between the complement and either L0 or a segment sample.
    """

    breakpoints: Tuple[int, ...]
    complements: Tuple[LagrangianFrame, ...]
    margins: Tuple[float, ...]
    margin_floor: float

    @property
    def segments(self) -> List[Tuple[int, int]]:
        b = self.breakpoints
        return list(zip(b[:-1], b[1:]))

    def problems(self, path: LagrangianPath, L0: LagrangianFrame, tol_rank: float = TOL_RANK) -> List[str]:
        """Independent re-check of the certificate; an empty list means it is valid."""
        out = []
        b = self.breakpoints
        if b[0] != 0 or b[-1] != len(path) - 1 or any(x >= y for x, y in zip(b[:-1], b[1:])):
            out.append("breakpoints must increase strictly from 0 to the last sample")
        if len(self.complements) != len(b) - 1:
            out.append("need one complement per segment")
            return out
        for j, ((lo, hi), Lj) in enumerate(zip(self.segments, self.complements)):
            if not is_transverse(Lj, L0, self.margin_floor, tol_rank):
                out.append(f"segment {j}: complement not transverse to L0 with margin {self.margin_floor}")
            gaps = [_gap(path.frames[k], Lj, tol_rank) for k in range(lo, hi + 1)]
            for k, g in zip(range(lo, hi + 1), gaps):
                if g < self.margin_floor:
                    out.append(f"segment {j}: sample {k} not transverse to its complement")
            for k in range(lo, hi):
                step = projection_distance(path.frames[k], path.frames[k + 1])
                if min(gaps[k - lo], gaps[k - lo + 1]) <= step:
                    out.append(f"segment {j}: interval {k} may cross its complement (gap <= step {step:.3g})")
        return out


class MaslovResult(NamedTuple):
    index: int
    certificate: PartitionCertificate
    reports: Tuple[CrossingReport, ...]


def _candidates(start: LagrangianFrame, L0: LagrangianFrame, seed: int, max_tries: int):
    yield start.j_image()
    base = L0.j_image()
    for i in range(max_tries):
        yield apply_unitary(random_unitary_J(L0.space, seed + i), base)


def _gap(L, M, tol_rank):
    return minimum_gap(L, M, tol_rank) if is_transverse(L, M, 0.0, tol_rank) else 0.0


def _extend(path, L0, cand, i, margin_floor, tol_frame, tol_rank, barrier_cap):
    """Last sample index reachable from ``i`` inside the chart of (L0, cand), and the margin used.

    The minimum gap is 1-Lipschitz in projection distance, so an interval whose
    endpoints both keep a gap larger than its projection step cannot meet the
    complement along the geodesic joining the samples.
    """
    frames = path.frames
    gap_prev = _gap(frames[i], cand, tol_rank)
    if gap_prev < margin_floor:
        return i, 0.0
    pair = ComplementaryPair(L0, cand, tol_rank=tol_rank)
    margin = min(pair.margin, gap_prev)
    prev = chart(pair, frames[i], tol_frame, tol_rank).A
    end = i
    for k in range(i + 1, len(frames)):
        gap = _gap(frames[k], cand, tol_rank)
        step = projection_distance(frames[k - 1], frames[k])
        if min(gap, gap_prev) < max(margin_floor, step) or (step > 0 and min(gap, gap_prev) == step):
            break
        A = chart(pair, frames[k], tol_frame, tol_rank).A
        if not interval_admissible(prev, A, tol_rank, barrier_cap):
            break
        margin = min(margin, gap)
        prev, gap_prev = A, gap
        end = k
    return end, margin


def find_partition(
    path: LagrangianPath,
    L0: LagrangianFrame,
    seed: int = 0,
    margin_floor: float = MARGIN_FLOOR,
    max_tries: int = MAX_TRIES,
    tol_frame: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
    barrier_cap: float = BARRIER_CAP,
) -> PartitionCertificate:
    """Greedy partition of ``path`` into chart segments.

    From the current breakpoint, candidates are tried in order: J applied to the
    current sample, then seeded J-commuting rotations of J(L0).  The first
    candidate transverse to L0 that covers at least one step is kept and the
    segment is extended until a sample comes within ``margin_floor`` of the
    candidate, or until the chart values jump too far for a spectral barrier
    to be certified on the next interval.
    """
    _same_space(path.frames[0], L0)
    breakpoints = [0]
    complements, margins = [], []
    i, last = 0, len(path) - 1
    while i < last:
        for cand in _candidates(path.frames[i], L0, seed, max_tries):
            if not is_transverse(cand, L0, margin_floor, tol_rank):
                continue
            end, margin = _extend(path, L0, cand, i, margin_floor, tol_frame, tol_rank, barrier_cap)
            if end > i:
                break
        else:
            raise AdmissibilityError(
                f"no complement covers interval {i} (t = {path.times[i]:.6g}); refine sampling or lower margin_floor",
                interval=(i, i + 1),
            )
        breakpoints.append(end)
        complements.append(cand)
        margins.append(margin)
        i = end
    return PartitionCertificate(tuple(breakpoints), tuple(complements), tuple(margins), margin_floor)


def chart_path(path: LagrangianPath, pair: ComplementaryPair, lo: int = 0, hi: Optional[int] = None,
               tol_frame: float = TOL_FRAME, tol_rank: float = TOL_RANK) -> SymmetricPath:
    """Chart values of samples lo..hi, reparametrized to [0, 1]."""
    hi = len(path) - 1 if hi is None else hi
    t = path.times[lo : hi + 1]
    t = (t - t[0]) / (t[-1] - t[0])
    t[-1] = 1.0
    mats = [chart(pair, f, tol_frame, tol_rank).A for f in path.frames[lo : hi + 1]]
    return SymmetricPath(t, np.array(mats), tol_frame)


def maslov_index(
    path: LagrangianPath,
    L0: LagrangianFrame,
    seed: int = 0,
    margin_floor: float = MARGIN_FLOOR,
    tol_frame: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
    barrier_cap: float = BARRIER_CAP,
) -> MaslovResult:
    """Sum of spectral flows of the chart curves over a certified partition."""
    cert = find_partition(path, L0, seed, margin_floor, tol_frame=tol_frame, tol_rank=tol_rank, barrier_cap=barrier_cap)
    total, reports = 0, []
    for (lo, hi), Lj in zip(cert.segments, cert.complements):
        pair = ComplementaryPair(L0, Lj, tol_rank=tol_rank)
        sf, report = spectral_flow(chart_path(path, pair, lo, hi, tol_frame, tol_rank), tol_rank, barrier_cap)
        total += sf
        reports.append(report)
    return MaslovResult(total, cert, tuple(reports))


def rotation_frames(space: SymplecticSpace, angles: np.ndarray) -> List[LagrangianFrame]:
    """Frames of span{cos a_j e_j + sin a_j e_{n+j}}, one row of ``angles`` per sample."""
    n = space.n
    frames = []
    for a in np.atleast_2d(angles):
        Q = np.zeros((2 * n, n))
        Q[np.arange(n), np.arange(n)] = np.cos(a)
        Q[n + np.arange(n), np.arange(n)] = np.sin(a)
        frames.append(LagrangianFrame(space, Q))
    return frames


def torus_loop(space: SymplecticSpace, ks: Sequence[int], m: int, step_cap: float = STEP_CAP) -> LagrangianPath:
    """Loop rotating factor j by k_j half-turns; det^2 winds sum(k_j) times."""
    ks = np.asarray(ks, dtype=float)
    if ks.shape != (space.n,):
        raise InvalidInputError(f"need {space.n} rotation counts, got {ks.shape}")
    if m < 2:
        raise AdmissibilityError("need at least two samples", interval=(0, 1))
    dtheta = np.pi * np.abs(ks).max() / (m - 1)
    if dtheta > np.arcsin(min(step_cap, 1.0)):
        need = int(np.ceil(np.pi * np.abs(ks).max() / np.arcsin(min(step_cap, 1.0)))) + 1
        raise AdmissibilityError(
            f"{m} samples are too few for step_cap {step_cap}; use at least {need}", interval=(0, 1)
        )
    t = np.linspace(0.0, 1.0, m)
    angles = np.pi * np.outer(t, ks)
    return LagrangianPath(t, tuple(rotation_frames(space, angles)), step_cap)


def generator_loop(space: SymplecticSpace, k: int, m: int, step_cap: float = STEP_CAP) -> LagrangianPath:
    """Rotate the first factor through k half-turns, keep the others horizontal.

    Relative to the vertical Lagrangian 0 x R^n the index is -k.
    """
    ks = np.zeros(space.n, dtype=int)
    ks[0] = k
    return torus_loop(space, ks, m, step_cap)


def coherence_check(
    path: LagrangianPath,
    L0: LagrangianFrame,
    L1: LagrangianFrame,
    L2: LagrangianFrame,
    tol_frame: float = TOL_FRAME,
    tol_rank: float = TOL_RANK,
    barrier_cap: float = BARRIER_CAP,
) -> bool:
    """Whether the chart curves through (L0, L1) and (L0, L2) have equal spectral flow."""
    for Lj in (L1, L2):
        for k, f in enumerate(path.frames):
            if not is_transverse(f, Lj, 0.0, tol_rank):
                raise TransversalityError(f"sample {k} is not transverse to a chart complement", interval=(k, k))
    flows = []
    for Lj in (L1, L2):
        pair = ComplementaryPair(L0, Lj, tol_rank=tol_rank)
        flows.append(spectral_flow(chart_path(path, pair, tol_frame=tol_frame, tol_rank=tol_rank), tol_rank, barrier_cap)[0])
    return flows[0] == flows[1]


def _random_hermitian(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = 0.5 * (Z + Z.conj().T)
    return H / np.linalg.norm(H, 2)


def _expi(H: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w)) @ V.conj().T


def homotopy_perturb(path: LagrangianPath, seed: int, magnitude: float) -> LagrangianPath:
    """Move interior samples by exp(i m (sin(pi t) H1 + sin(2 pi t) H2 / 2)) for seeded Hermitian H1, H2.

    The unitaries are the identity at t = 0 and t = 1, so the endpoints stay put
    and the result is homotopic to ``path`` with endpoints fixed.
    """
    rng = np.random.default_rng(seed)
    n = path.space.n
    H1, H2 = _random_hermitian(rng, n), _random_hermitian(rng, n)
    frames = list(path.frames)
    for k in range(1, len(frames) - 1):
        t = path.times[k]
        U = realify(_expi(magnitude * (np.sin(np.pi * t) * H1 + 0.5 * np.sin(2 * np.pi * t) * H2)))
        frames[k] = apply_unitary(U, frames[k])
    return LagrangianPath(path.times, tuple(frames), path.step_cap)


def transform(path: LagrangianPath, U) -> LagrangianPath:
    """Apply one J-commuting orthogonal map to every sample."""
    return LagrangianPath(path.times, tuple(apply_unitary(U, f) for f in path.frames), path.step_cap)
