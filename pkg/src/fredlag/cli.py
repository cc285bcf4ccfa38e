"""
Command-line interface.

Exit codes: 0 success, 1 invalid input, 2 partition or admissibility failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import io
from .charts import ComplementaryPair, gap_inequality_report
from .errors import FredlagError, InvalidInputError
from .maslov import MARGIN_FLOOR, STEP_CAP, generator_loop, maslov_index
from .perturbation import COMPLEMENT_MARGIN, complementary_perturbation, numerical_rank, transitive_unitary
from .spectral_flow import spectral_flow
from .symplectic import (
    TOL_FRAME,
    TOL_RANK,
    SymplecticSpace,
    det_squared_winding,
    frame_violations,
    intersection_dim,
    projection_distance,
)


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.verdicts.values())

    def render(self, fmt: str) -> str:
        d = asdict(self)
        if fmt == "machine":
            return io.dumps(d)
        return _text(d)


def _text(obj, level=0) -> str:
    lines = []
    pad = "  " * level
    for k, v in obj.items():
        if isinstance(v, dict):
            if not v:
                continue
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, level + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for i, item in enumerate(v):
                lines.append(f"{pad}  [{i}]")
                lines.append(_text(item, level + 2))
        else:
            lines.append(f"{pad}{k}: {_scalar(v)}")
    return "\n".join(line for line in lines if line)


def _scalar(v) -> str:
    v = io._plain(v)
    if isinstance(v, float):
        return io.format_number(v)
    if isinstance(v, list):
        return io.dumps(v)
    return str(v)


def _echo(path) -> dict:
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    return {"file": str(path), "sha256": digest}


def _settings(args, **extra) -> dict:
    out = {"tol_frame": args.tol_frame, "tol_rank": args.tol_rank}
    out.update(extra)
    return out


def _load_frame(path, args):
    return io.frame_from_record(io.load_json(path), args.tol_frame)


def cmd_check(args) -> RunReport:
    obj = io.load_json(args.file)
    kind = io.record_kind(obj)
    report = RunReport("check", inputs={"path": _echo(args.file), "kind": kind}, settings=_settings(args))
    violations = []
    if kind == "frame":
        space, Q = io.raw_frame(obj)
        violations += [{"where": "frame", "violation": k, "magnitude": v}
                       for k, v in frame_violations(space, Q, args.tol_frame).items()]
    elif kind == "lagrangian_path":
        space, times, Qs = io.raw_lagrangian_samples(obj)
        if times[0] != 0.0 or times[-1] != 1.0 or np.any(np.diff(times) <= 0):
            violations.append({"where": "times", "violation": "not strictly increasing from 0 to 1", "magnitude": None})
        for i, Q in enumerate(Qs):
            violations += [{"where": f"sample {i}", "violation": k, "magnitude": v}
                           for k, v in frame_violations(space, Q, args.tol_frame).items()]
        if not violations:
            for i in range(len(Qs) - 1):
                d = float(np.linalg.norm(Qs[i] @ Qs[i].T - Qs[i + 1] @ Qs[i + 1].T, 2))
                if d > STEP_CAP:
                    violations.append({"where": f"interval {i}", "violation": "step_cap", "magnitude": d})
    elif kind == "symmetric_path":
        try:
            io.symmetric_path_from_record(obj, args.tol_frame)
        except InvalidInputError as exc:
            violations.append({"where": "path", "violation": str(exc), "magnitude": None})
    else:
        try:
            io.lagrangian_path_from_record(obj, args.tol_frame)
        except FredlagError as exc:
            violations.append({"where": "rotation", "violation": str(exc), "magnitude": None})
    report.results["violations"] = violations
    report.verdicts["ok"] = not violations
    return report


def cmd_maslov(args) -> RunReport:
    path = io.lagrangian_path_from_record(io.load_json(args.path_file), args.tol_frame)
    L0 = _load_frame(args.L0_file, args)
    res = maslov_index(path, L0, seed=args.seed, margin_floor=args.margin,
                       tol_frame=args.tol_frame, tol_rank=args.tol_rank)
    cert = res.certificate
    report = RunReport(
        "maslov",
        inputs={"path": _echo(args.path_file), "L0": _echo(args.L0_file), "samples": len(path)},
        settings=_settings(args, seed=args.seed, margin_floor=args.margin,
                           convention="chart +P_L0 J S; zero eigenvalues count as nonnegative"),
    )
    report.results["maslov_index"] = res.index
    report.results["segment_flows"] = [r.total for r in res.reports]
    report.certificates["partition"] = {
        "breakpoints": list(cert.breakpoints),
        "breakpoint_times": [float(path.times[b]) for b in cert.breakpoints],
        "margins": list(cert.margins),
        "complements": [io.frame_to_record(L) for L in cert.complements],
    }
    report.verdicts["certificate_valid"] = not cert.problems(path, L0, args.tol_rank)
    if path.is_loop():
        try:
            w = det_squared_winding(path)
            report.results["det2_winding"] = w
            report.verdicts["oracle_consistent"] = w == -res.index
        except FredlagError as exc:
            report.results["det2_winding"] = None
            report.results["det2_winding_error"] = str(exc)
    return report


def cmd_specflow(args) -> RunReport:
    path = io.symmetric_path_from_record(io.load_json(args.path_file), args.tol_frame)
    total, rep = spectral_flow(path, args.tol_rank)
    report = RunReport("specflow", inputs={"path": _echo(args.path_file), "samples": len(path)},
                       settings=_settings(args, convention=rep.convention))
    report.results["spectral_flow"] = total
    report.certificates["intervals"] = {
        "t_start": [float(path.times[r.index]) for r in rep.intervals],
        "t_end": [float(path.times[r.index + 1]) for r in rep.intervals],
        "step": [r.step for r in rep.intervals],
        "barrier": [r.barrier for r in rep.intervals],
        "level": [r.level for r in rep.intervals],
        "count_start": [r.count_start for r in rep.intervals],
        "count_end": [r.count_end for r in rep.intervals],
        "contribution": [r.contribution for r in rep.intervals],
    }
    report.verdicts["admissible"] = rep.admissible
    return report


def cmd_transport(args) -> RunReport:
    L0 = _load_frame(args.L0_file, args)
    L = _load_frame(args.L_file, args)
    res = transitive_unitary(L0, L, tol_frame=args.tol_frame, tol_rank=args.tol_rank)
    U = res.U.X
    eye = np.eye(U.shape[0])
    J = L0.space.J
    image = U @ L0.Q
    report = RunReport("transport", inputs={"L0": _echo(args.L0_file), "L": _echo(args.L_file)},
                       settings=_settings(args))
    report.results.update({
        "U": U,
        "K_rank": res.K_rank,
        "rank_U_minus_I": res.U.perturbation_rank,
        "rank_T_minus_I": res.T.perturbation_rank,
        "orthogonality_residual": float(np.abs(U.T @ U - eye).max()),
        "J_commutation_residual": float(np.abs(U @ J - J @ U).max()),
        "image_residual": float(np.abs(image @ image.T - L.projection).max()),
    })
    report.verdicts["rank_bound"] = res.U.perturbation_rank <= 3 * res.T.perturbation_rank
    return report


def cmd_complement(args) -> RunReport:
    L0 = _load_frame(args.L0_file, args)
    L1 = _load_frame(args.L1_file, args)
    out = complementary_perturbation(L0, L1, seed=args.seed, margin=args.margin,
                                     tol_frame=args.tol_frame, tol_rank=args.tol_rank)
    k = intersection_dim(L0, L1, args.tol_rank)
    r = numerical_rank(out.projection - L1.projection, args.tol_rank)
    report = RunReport("complement", inputs={"L0": _echo(args.L0_file), "L1": _echo(args.L1_file)},
                       settings=_settings(args, seed=args.seed, margin=args.margin))
    report.results.update({
        "L1_prime": io.frame_to_record(out),
        "dim_L0_cap_L1": k,
        "dim_L0_cap_L1_prime": intersection_dim(L0, out, args.tol_rank),
        "rank_P_diff": r,
        "projection_distance": projection_distance(out, L1),
    })
    report.verdicts["transverse"] = report.results["dim_L0_cap_L1_prime"] == 0
    report.verdicts["rank_bound"] = r <= 2 * k
    return report


def cmd_gap(args) -> RunReport:
    L0, L1, L = (_load_frame(f, args) for f in (args.L0_file, args.L1_file, args.L_file))
    pair = ComplementaryPair(L0, L1, tol_rank=args.tol_rank)
    g = gap_inequality_report(pair, L, slack=args.tol_frame, tol_rank=args.tol_rank)
    report = RunReport("gap", inputs={"L0": _echo(args.L0_file), "L1": _echo(args.L1_file), "L": _echo(args.L_file)},
                       settings=_settings(args))
    report.results.update({
        "kernel_dim": g.kernel_dim,
        "gap_L_L0": g.gap_L_L0,
        "min_modulus": g.min_modulus,
        "graph_norm": g.graph_norm,
        "gap_L0_L1": g.gap_L0_L1,
        "degenerate": g.degenerate,
    })
    report.verdicts["lower_inequality"] = g.lower_holds
    report.verdicts["upper_inequality"] = g.upper_holds
    return report


def cmd_gen(args) -> str:
    path = generator_loop(SymplecticSpace(args.n), args.k, args.samples)
    return io.dumps(io.lagrangian_path_to_record(path))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-frame", type=float, default=TOL_FRAME)
    common.add_argument("--tol-rank", type=float, default=TOL_RANK)
    common.add_argument("--format", choices=["text", "machine"], default="text")

    p = argparse.ArgumentParser(prog="fredlag", description="Lagrangian charts, spectral flow and Maslov index.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="validate a frame or path file")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("maslov", parents=[common], help="Maslov index of a path relative to L0")
    s.add_argument("path_file")
    s.add_argument("L0_file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--margin", type=float, default=MARGIN_FLOOR)
    s.set_defaults(func=cmd_maslov)

    s = sub.add_parser("specflow", parents=[common], help="spectral flow of a symmetric path")
    s.add_argument("path_file")
    s.set_defaults(func=cmd_specflow)

    s = sub.add_parser("transport", parents=[common], help="unitary U with U(L0) = L")
    s.add_argument("L0_file")
    s.add_argument("L_file")
    s.set_defaults(func=cmd_transport)

    s = sub.add_parser("complement", parents=[common], help="finite-rank perturbation of L1 transverse to L0")
    s.add_argument("L0_file")
    s.add_argument("L1_file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--margin", type=float, default=COMPLEMENT_MARGIN)
    s.set_defaults(func=cmd_complement)

    s = sub.add_parser("gap", parents=[common], help="minimum-gap inequalities for L in the chart of (L0, L1)")
    s.add_argument("L0_file")
    s.add_argument("L1_file")
    s.add_argument("L_file")
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("gen", help="write the k-fold rotation loop as a path file")
    s.add_argument("n", type=int)
    s.add_argument("k", type=int)
    s.add_argument("samples", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means an admissibility failure
        return 0 if exc.code in (0, None) else 1
    try:
        out = args.func(args)
    except FredlagError as exc:
        hint = f" [interval {exc.interval[0]}-{exc.interval[1]}]" if getattr(exc, "interval", None) else ""
        print(f"error: {exc}{hint}", file=sys.stderr)
        return exc.exit_code
    if isinstance(out, str):
        if getattr(args, "output", None):
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out + "\n")
        else:
            print(out)
        return 0
    print(out.render(args.format))
    if args.command == "check" and not out.ok:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
