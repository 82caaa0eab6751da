"""Command-line entry point.

Subcommands: solve (end-to-end pipeline over an input JSON), verify
(re-check an existing solution.json), radial-demo (the smooth radial
gaussian example), admissibility (weight/beta scan).  Exit codes are a
stable contract:

    0  success (converged and verified / scan passed)
    2  schema or configuration error (no partial outputs)
    3  solver did not converge
    4  atoms concentrated on an affine hyperplane
    5  weight/beta rejected by the admissibility scan
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConcentratedOnHyperplane, SchemaError
from .estimator import solve_instance
from .jsonio import canonical_dumps, load_instance, parse_weight, solution_to_dict, write_json
from .measures import QuadratureSpec, Weight, admissibility_scan
from .verification import gaussian_sphere_radii, radial_solution_residual

RADIAL_RESIDUAL_GATE = 1e-6


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _svg_polyline(points, color: str, width: float = 2.0) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return (
        f'<polyline points="{coords}" fill="none" stroke="{color}" '
        f'stroke-width="{width}" />'
    )


def _map_to_box(pts: np.ndarray, box: tuple[float, float, float, float]) -> np.ndarray:
    """Affine map of points into an SVG box (y axis flipped)."""
    x0, y0, w, h = box
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    scale = min(w / span[0], h / span[1])
    mid = (lo + hi) / 2.0
    out = (pts - mid) * scale
    out[:, 1] *= -1.0
    out[:, 0] += x0 + w / 2.0
    out[:, 1] += y0 + h / 2.0
    return out


def _solution_svg(solution) -> str:
    body = solution.body
    order = np.argsort(np.arctan2(body.vertices[:, 1], body.vertices[:, 0]))
    ring = body.vertices[order]
    ring = np.vstack([ring, ring[:1]])
    xs = np.linspace(-3.0, 3.0, 201)
    us = solution.potential(xs[:, None])
    graph = np.column_stack([xs, us])

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 840 420" '
        'font-family="monospace" font-size="13">',
        '<rect width="840" height="420" fill="white" />',
        '<text x="110" y="24">body K</text>',
        '<text x="530" y="24">potential u</text>',
    ]
    parts.append(_svg_polyline(_map_to_box(ring, (30, 40, 360, 340)), "#1f4e8c"))
    parts.append(_svg_polyline(_map_to_box(graph, (450, 40, 360, 340)), "#8c1f2e"))
    atoms = solution.measure.points[:, 0]
    marks = np.column_stack([atoms, solution.potential(atoms[:, None])])
    graph_box = _map_to_box(np.vstack([graph, marks]), (450, 40, 360, 340))
    for x, y in graph_box[len(graph):]:
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="#8c1f2e" />')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _write_csv(path: Path, rows) -> None:
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def _emit_solution(outdir: Path, solution) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "solution.json", solution_to_dict(solution))
    write_json(outdir / "verification.json", solution.verification.to_dict())
    _write_csv(outdir / "verification.csv", solution.verification.csv_rows())
    if solution.measure.dimension == 1:
        (outdir / "figure.svg").write_text(_solution_svg(solution))
    else:
        _write_csv(
            outdir / "body_vertices.csv",
            [["x", "y", "z"], *solution.body.vertices.tolist()],
        )
        grid = np.linspace(-3.0, 3.0, 41)
        xx, yy = np.meshgrid(grid, grid, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        vals = solution.potential(pts)
        _write_csv(
            outdir / "potential_samples.csv",
            [["x", "y", "u"], *np.column_stack([pts, vals]).tolist()],
        )


def _cmd_solve(args) -> int:
    try:
        if args.tol <= 0 or args.max_iters < 1:
            raise SchemaError("--tol must be > 0 and --max-iters >= 1")
        quad = QuadratureSpec(order=args.quad_order, seed=args.seed)
        measure, weight = load_instance(args.input)
        if args.beta is not None:
            record = {**weight.to_dict(), "beta": args.beta}
            weight = parse_weight(record, measure.dimension)
    except (SchemaError, ValueError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    scan = admissibility_scan(weight, measure.dimension + 1)
    if not scan.passed:
        print("weight/beta rejected by the admissibility scan:", file=sys.stderr)
        _print_scan(scan, file=sys.stderr)
        return 5
    quad = QuadratureSpec(order=args.quad_order, seed=args.seed)
    try:
        solution = solve_instance(
            measure, weight, quad,
            tol=args.tol, max_iters=args.max_iters, check_admissibility=False,
        )
    except ConcentratedOnHyperplane as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    _emit_solution(Path(args.out), solution)
    report = solution.report
    verification = solution.verification
    print(
        f"converged={report.converged} iterations={report.iterations} "
        f"c={report.c:.12g} max_residual={report.max_relative_residual:.3e} "
        f"verify_max_error={verification.max_relative_error:.3e}"
    )
    if not report.converged:
        return 3
    return 0 if verification.passed else 1


def _cmd_verify(args) -> int:
    from .envelope import PWLConvexFunction
    from .geometry import Polytope
    from .jsonio import parse_instance
    from .verification import verify_instance

    try:
        data = json.loads(Path(args.input).read_text())
        measure, weight = parse_instance(data["input"])
        body = Polytope.from_dict(data["polytope"])
        potential = PWLConvexFunction.from_dict(data["potential"])
        c = float(data["c"])
        q = data.get("quadrature", {})
        quad = QuadratureSpec(
            order=int(q.get("order", 8)),
            mc_samples=int(q.get("mc_samples", 200_000)),
            seed=int(q.get("seed", 0)),
        )
    except (OSError, KeyError, ValueError, json.JSONDecodeError, SchemaError) as exc:
        print(f"schema error: cannot read solution file: {exc}", file=sys.stderr)
        return 2
    report = verify_instance(measure, body, potential, weight, c, quad)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "verification.json", report.to_dict())
    _write_csv(outdir / "verification.csv", report.csv_rows())
    print(
        f"max_relative_error={report.max_relative_error:.3e} "
        f"max_route_gap={report.max_route_gap:.3e} passed={report.passed}"
    )
    return 0 if report.passed else 1


def _cmd_radial_demo(args) -> int:
    roots = gaussian_sphere_radii(args.level, args.dim)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = roots.to_dict()
    summary["solutions"] = []
    worst = 0.0
    for k, r in enumerate(dict.fromkeys(roots.radii), start=1):
        report = radial_solution_residual(r, args.dim)
        worst = max(worst, report.max_relative_residual)
        summary["solutions"].append(report.to_dict())
        _write_csv(
            outdir / f"residuals_r{k}.csv",
            [["|x|", "relative_residual"],
             *np.column_stack([report.grid, report.residuals]).tolist()],
        )
    summary["max_relative_residual"] = worst
    summary["residual_gate"] = RADIAL_RESIDUAL_GATE
    write_json(outdir / "summary.json", summary)
    names = {"two": "two solutions", "double": "one double solution", "none": "no solution"}
    print(
        f"{names[roots.status]} at level {roots.level:g} "
        f"(peak {roots.peak_level:.12g} at r={roots.peak_radius:.12g}); "
        f"radii={[f'{r:.12g}' for r in roots.radii]} "
        f"max_residual={worst:.3e}"
    )
    return 0 if worst <= RADIAL_RESIDUAL_GATE else 1


def _print_scan(scan, file=None) -> None:
    file = file or sys.stdout
    print(f"{'r':>12}  {'ball mass':>16}  {'ratio':>16}", file=file)
    for r, m, q in scan.rows():
        print(f"{r:12.6g}  {m:16.10g}  {q:16.10g}", file=file)
    print(
        f"trend r->0+: {'PASS' if scan.passes_small_r else 'FAIL'}   "
        f"trend r->inf: {'PASS' if scan.passes_large_r else 'FAIL'}",
        file=file,
    )


def _cmd_admissibility(args) -> int:
    record: dict = {"kind": args.kind}
    if args.beta is not None:
        record["beta"] = args.beta
    if args.kind == "constant":
        record["value"] = args.value
    if args.kind == "radial_profile":
        if args.profile is None:
            print("schema error: --profile required for radial_profile", file=sys.stderr)
            return 2
        record["profile"] = json.loads(args.profile)
    try:
        weight = parse_weight(record, args.dim)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    scan = admissibility_scan(weight, args.dim + 1)
    _print_scan(scan)
    print("PASS" if scan.passed else "FAIL")
    return 0 if scan.passed else 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minklift",
        description="Solve and verify weighted Monge-Ampere instances "
        "via lifted Minkowski problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an input instance end to end")
    p.add_argument("--input", required=True, help="instance JSON path")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--beta", type=float, default=None, help="override weight beta")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--quad-order", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_solve)

    p = sub.add_parser("verify", help="re-check an existing solution.json")
    p.add_argument("--input", required=True, help="solution.json path")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("radial-demo", help="radial gaussian example")
    p.add_argument("--level", type=float, required=True, help="prescribed density level")
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(run=_cmd_radial_demo)

    p = sub.add_parser("admissibility", help="scan a weight/beta combination")
    p.add_argument("--kind", choices=("constant", "gaussian", "radial_profile"),
                   default="gaussian")
    p.add_argument("--value", type=float, default=1.0, help="constant weight level")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--profile", default=None, help="JSON list of [r, g] breakpoints")
    p.set_defaults(run=_cmd_admissibility)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
