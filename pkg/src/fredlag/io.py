"""JSON records for frames, symmetric paths and Lagrangian paths."""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import InvalidInputError
from .maslov import STEP_CAP, LagrangianPath, generator_loop
from .spectral_flow import SymmetricPath
from .symplectic import TOL_FRAME, LagrangianFrame, SymplecticSpace


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def record_kind(obj) -> str:
    """One of "frame", "rotation", "lagrangian_path", "symmetric_path"."""
    if not isinstance(obj, dict):
        raise InvalidInputError("record must be a JSON object")
    if obj.get("type") == "rotation":
        return "rotation"
    if "frame" in obj:
        return "frame"
    samples = obj.get("samples")
    if isinstance(samples, list) and samples and isinstance(samples[0], dict):
        if "frame" in samples[0]:
            return "lagrangian_path"
        if "A" in samples[0]:
            return "symmetric_path"
    raise InvalidInputError("unrecognized record: expected a frame, a path, or a rotation record")


def _n(obj) -> int:
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInputError(f'field "n" must be a positive integer, got {n!r}')
    return n


def _matrix(rows, shape, what):
    try:
        M = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{what}: not a numeric array") from exc
    if M.shape != shape:
        raise InvalidInputError(f"{what}: expected shape {shape}, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{what}: non-finite entries")
    return M


def raw_frame(obj):
    n = _n(obj)
    return SymplecticSpace(n), _matrix(obj.get("frame"), (2 * n, n), "frame")


def frame_from_record(obj, tol_frame: float = TOL_FRAME) -> LagrangianFrame:
    space, Q = raw_frame(obj)
    return LagrangianFrame(space, Q, tol_frame)


def frame_to_record(L: LagrangianFrame) -> dict:
    return {"n": L.n, "frame": L.Q.tolist()}


def raw_lagrangian_samples(obj):
    n = _n(obj)
    samples = obj.get("samples")
    if not isinstance(samples, list) or len(samples) < 2:
        raise InvalidInputError('"samples" must be a list of at least two entries')
    times, Qs = [], []
    for i, s in enumerate(samples):
        if not isinstance(s, dict) or "t" not in s or "frame" not in s:
            raise InvalidInputError(f'sample {i} needs "t" and "frame"')
        times.append(float(s["t"]))
        Qs.append(_matrix(s["frame"], (2 * n, n), f"sample {i} frame"))
    return SymplecticSpace(n), np.array(times), Qs


def lagrangian_path_from_record(obj, tol_frame: float = TOL_FRAME, step_cap: float = STEP_CAP) -> LagrangianPath:
    """Explicit samples, or the parametric form {"type": "rotation", "n", "k", "samples"}."""
    if record_kind(obj) == "rotation":
        n = _n(obj)
        k, m = obj.get("k"), obj.get("samples")
        if not isinstance(k, int) or not isinstance(m, int):
            raise InvalidInputError('rotation record needs integer "k" and "samples"')
        return generator_loop(SymplecticSpace(n), k, m, step_cap)
    space, times, Qs = raw_lagrangian_samples(obj)
    frames = tuple(LagrangianFrame(space, Q, tol_frame) for Q in Qs)
    return LagrangianPath(times, frames, step_cap)


def lagrangian_path_to_record(path: LagrangianPath) -> dict:
    return {
        "n": path.space.n,
        "samples": [{"t": float(t), "frame": f.Q.tolist()} for t, f in zip(path.times, path.frames)],
    }


def symmetric_path_from_record(obj, tol_frame: float = TOL_FRAME) -> SymmetricPath:
    n = _n(obj)
    samples = obj.get("samples")
    if not isinstance(samples, list) or not samples:
        raise InvalidInputError('"samples" must be a non-empty list')
    times, mats = [], []
    for i, s in enumerate(samples):
        if not isinstance(s, dict) or "t" not in s or "A" not in s:
            raise InvalidInputError(f'sample {i} needs "t" and "A"')
        times.append(float(s["t"]))
        mats.append(_matrix(s["A"], (n, n), f"sample {i} A"))
    return SymmetricPath(np.array(times), np.array(mats), tol_frame)


def symmetric_path_to_record(path: SymmetricPath) -> dict:
    return {
        "n": path.n,
        "samples": [{"t": float(t), "A": A.tolist()} for t, A in zip(path.times, path.matrices)],
    }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def format_number(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits.

    Infinite and NaN values use the ``Infinity``/``NaN`` tokens that Python's
    json module reads back.
    """
    return _dump(_plain(obj), indent, 0)


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
