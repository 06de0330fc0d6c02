"""Command-line front end: experiment orchestration and artifact emission.

Every command writes delimited output (CSV/JSON) into the output directory
and renders the matching matplotlib figures next to it.  Exit codes: 0 on
success (verify reports may still contain failing checks — that is data),
1 on solver failure, 2 on configuration problems.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, SolverError
from .estimates import run_estimates
from .fields import ScalarField
from .geometry import (BoundaryData, DomainSpec, check_existence_hypotheses,
                       compute_quantities)
from .reportio import dumps_json, load_problem, write_csv, write_json
from .surfaces import CLI_NAMES, classify_numerically, oracle_from_name

DEFAULT_BOXES = {
    "geodesic-plane": (0.5, 1.5, 0.0, 1.0),
    "horocylinder": (0.0, 1.0, 0.0, 1.0),
    "euclidean-plane": (0.0, 1.0, 0.0, 1.0),
    "x-sinh-t": (1.0, 2.0, 1.0, 2.0),
}


def _apply_thread_cap() -> None:
    cap = os.environ.get("HOROGRAPH_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        nx, nt = (int(v) for v in text.split(","))
        return nx, nt
    except ValueError as exc:
        raise ConfigError(f"--grid wants NX,NT, got {text!r}") from exc


def _parse_box(text: str) -> tuple[float, float, float, float]:
    m = re.fullmatch(r"\[([^,\]]+),([^,\]]+)\]x\[([^,\]]+),([^,\]]+)\]",
                     text.replace(" ", ""))
    if not m:
        raise ConfigError(f"--domain wants [a,b]x[c,d], got {text!r}")
    return tuple(float(v) for v in m.groups())


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"--param wants key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        out[key] = float(val)
    return out


def _load(args) -> tuple[DomainSpec, BoundaryData]:
    if not args.config:
        raise ConfigError("this command needs --config PATH")
    domain, boundary, doc = load_problem(args.config)
    if args.grid:
        nx, nt = _parse_grid(args.grid)
        if domain.kind == "rectangle":
            domain = DomainSpec.rectangle(domain.x_min, domain.x_max,
                                          domain.t_min, domain.t_max, nx, nt)
        else:
            domain = DomainSpec.polygon(domain.vertices, nx, nt)
        # boundary nodes moved with the grid: rebuild from the document
        from .reportio import boundary_from_config
        boundary = boundary_from_config(doc, domain)
    return domain, boundary


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_bounds(args) -> int:
    from .barriers import global_gradient_bound
    from .errors import HypothesisViolated

    domain, boundary = _load(args)
    out = _outdir(args)
    q = compute_quantities(domain, boundary)
    hyp = check_existence_hypotheses(q)
    table = []
    for c3 in (0.0, 0.5, 1.0, 2.0):
        try:
            ggb = global_gradient_bound(q.f_min, q.barrier_radius, c3)
            table.append({"boundary_grad": c3, **ggb.to_dict()})
        except HypothesisViolated:
            table.append({"boundary_grad": c3, "bound": "hypothesis violated"})
    doc = {
        "quantities": {
            "horizontal_width": q.horizontal_width, "x_center": q.x_center,
            "enclosing_radius": q.enclosing_radius,
            "barrier_radius": q.barrier_radius,
            "f_min": q.f_min, "f_max": q.f_max, "f_osc": q.f_osc,
        },
        "hypotheses": hyp.to_dict(),
        "global_gradient_bounds": table,
    }
    write_json(out / "bounds.json", doc)
    sys.stdout.write(dumps_json(doc))
    return 0


def _cmd_oracle(args) -> int:
    from . import plotting

    oracle = oracle_from_name(args.kind, _parse_params(args.param))
    box = _parse_box(args.domain) if args.domain else DEFAULT_BOXES[args.kind]
    nx, nt = _parse_grid(args.grid) if args.grid else (64, 64)
    domain = DomainSpec.rectangle(*box, nx, nt)
    field = ScalarField.from_oracle(domain, oracle)
    out = _outdir(args)
    field.to_csv(out / "oracle_field.csv")
    rng = np.random.default_rng(args.seed)
    pts = np.column_stack([
        rng.uniform(domain.x_min, domain.x_max, size=500),
        rng.uniform(domain.t_min, domain.t_max, size=500),
    ])
    pts = [tuple(p) for p in pts if oracle.in_validity(tuple(p))]
    label = classify_numerically(oracle, pts, args.eps_target)
    doc = {"kind": args.kind, "eps": args.eps_target, "samples": len(pts),
           "classification": label,
           "declared": oracle.classification(args.eps_target)}
    write_json(out / "oracle.json", doc)
    plotting.save_field_heatmap(field, out / "oracle_field.png",
                                title=f"{args.kind} (classified {label})")
    sys.stdout.write(dumps_json(doc))
    return 0


def _cmd_solve(args) -> int:
    from . import plotting
    from .solver import SolverConfig, newton_solve

    domain, boundary = _load(args)
    out = _outdir(args)
    start = ScalarField.blend(domain, boundary)
    result = newton_solve(start, args.eps_target, 1.0, SolverConfig())
    field = result.field
    field.to_csv(out / "field.csv")
    doc = {"grid": [domain.n_x, domain.n_t], "eps": args.eps_target,
           "min": float(np.min(field.in_values)),
           "max": float(np.max(field.in_values)),
           "residual_norm": result.residual_norm,
           "iterations": result.iterations}
    write_json(out / "solve.json", doc)
    plotting.save_field_heatmap(field, out / "field.png", title="solved field")
    sys.stdout.write(dumps_json(doc))
    return 0


def _cmd_continuation(args) -> int:
    from . import plotting
    from .solver import ContinuationSchedule, SolverConfig, continuation_solve

    domain, boundary = _load(args)
    out = _outdir(args)
    schedule = ContinuationSchedule.uniform(n_s=args.s_steps,
                                            eps_target=args.eps_target)
    result = continuation_solve(domain, boundary, schedule, SolverConfig())
    steps_dir = out / "steps"
    steps_dir.mkdir(exist_ok=True)
    for k, (rec, fld) in enumerate(zip(result.steps, result.fields)):
        fld.to_csv(steps_dir / f"step_{k:03d}_s{rec.s:.3f}_eps{rec.eps:.6g}.csv")
    result.final.to_csv(out / "final.csv")
    doc = {"grid": [domain.n_x, domain.n_t], **result.to_dict()}
    write_json(out / "continuation.json", doc)
    plotting.save_field_heatmap(result.final, out / "final.png",
                                title=f"final field (eps = {result.final_eps:g})")
    gaps = result.eps_gaps()
    if gaps:
        plotting.save_continuation_gaps(gaps, out / "eps_gaps.png")
    sys.stdout.write(dumps_json({"steps": len(result.steps),
                                 "final_eps": result.final_eps,
                                 "degenerate_limit": result.degenerate_limit}))
    return 0


def _cmd_verify(args) -> int:
    from . import plotting

    domain, boundary = _load(args)
    if not args.field:
        raise ConfigError("verify needs --field PATH (a field CSV)")
    field = ScalarField.from_csv(args.field, domain)
    out = _outdir(args)
    report = run_estimates(field, boundary, eps=args.eps_target)
    write_json(out / "estimate_report.json", report.to_dict())
    plotting.save_gradient_heatmap(field, out / "gradient.png", title="|Dg|")
    rows = [
        ("length_bound", report.length.passed),
        ("boundary_gradient", report.boundary_gradient.passed),
        ("modulus", report.modulus.passed),
        ("global_gradient", report.global_gradient.passed
         if report.global_gradient.hypothesis_ok else "skipped"),
    ]
    width = max(len(r[0]) for r in rows)
    for name, status in rows:
        sys.stdout.write(f"{name:<{width}}  {status}\n")
    sys.stdout.write(f"overall pass: {report.passed}\n")
    return 0


def _cmd_convergence(args) -> int:
    from . import plotting
    from .solver import convergence_study

    oracle = oracle_from_name(args.oracle, _parse_params(args.param))
    if args.config:
        domain, _, _ = load_problem(args.config)
        box = (domain.x_min, domain.x_max, domain.t_min, domain.t_max)
    else:
        box = DEFAULT_BOXES[args.oracle]
    nodes = tuple(int(v) for v in args.grids.split(","))
    rows = convergence_study(oracle, box, nodes, eps=args.eps_target)
    out = _outdir(args)
    write_csv(out / "convergence.csv", ["nodes", "h", "error", "iterations", "order"],
              [(r["nodes"], r["h"], r["error"], r["iterations"], r["order"])
               for r in rows])
    write_json(out / "convergence.json", {"oracle": args.oracle, "rows": rows})
    plotting.save_convergence_plot([(r["h"], r["error"], r["order"]) for r in rows],
                                   out / "convergence.png",
                                   title=f"{args.oracle} convergence")
    sys.stdout.write(dumps_json({"rows": rows}))
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horograph",
        description="Horizontal minimal graph solver and estimate checker")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="domain+boundary JSON document")
        p.add_argument("--out", default="horograph_out", help="output directory")
        p.add_argument("--grid", help="override resolution as NX,NT")
        p.add_argument("--eps-target", type=float, default=0.0,
                       help="target regularization eps")
        p.add_argument("--s-steps", type=int, default=11,
                       help="number of homotopy steps on [1/2, 1]")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized sweeps")

    common(sub.add_parser("bounds", help="comparison quantities and hypotheses"))
    common(sub.add_parser("solve", help="single Newton solve at fixed eps"))
    common(sub.add_parser("continuation", help="s- then eps-continuation"))

    p_verify = sub.add_parser("verify", help="run estimate checks on a field CSV")
    common(p_verify)
    p_verify.add_argument("--field", help="field CSV produced by solve/continuation")

    p_oracle = sub.add_parser("oracle", help="sample and classify a model surface")
    common(p_oracle)
    p_oracle.add_argument("--kind", required=True, choices=CLI_NAMES)
    p_oracle.add_argument("--domain", help="sampling box as [a,b]x[c,d]")
    p_oracle.add_argument("--param", action="append",
                          help="oracle parameter key=value (repeatable)")

    p_conv = sub.add_parser("convergence", help="grid-doubling study vs an oracle")
    common(p_conv)
    p_conv.add_argument("--oracle", required=True, choices=CLI_NAMES)
    p_conv.add_argument("--grids", default="33,65,129",
                        help="comma-separated node counts")
    p_conv.add_argument("--param", action="append",
                        help="oracle parameter key=value (repeatable)")
    return parser


COMMANDS = {
    "bounds": _cmd_bounds,
    "oracle": _cmd_oracle,
    "solve": _cmd_solve,
    "continuation": _cmd_continuation,
    "verify": _cmd_verify,
    "convergence": _cmd_convergence,
}


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except SolverError as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
