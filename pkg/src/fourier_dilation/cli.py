"""Command line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 construction error.

Input file::

    {"group": {"kind": "dihedral", "n": 4}, "psi": {"kind": "delta", "scale": 1}}

The shorthand ``{"cyclic": 2, "delta": 1}`` is accepted as well.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cocycle import (
    CndFunction,
    CocycleConstructionError,
    build_cocycle,
    is_cnd,
    psi_from_descriptor,
    schoenberg_certificate,
)
from .crossed import DilationContext, pi_t
from .dilation import (
    SCHEMA_VERSION,
    DEFAULT_GRID,
    DilationReport,
    explain,
    time_pairs,
    verify_markov,
    verify_reversed,
    verify_structure,
)
from .groups import GroupAlgebraElement, GroupAxiomError, group_from_descriptor
from .montecarlo import Z_THRESHOLD, cross_validate_conditional, cross_validate_expectation
from .weyl import StepVector, as_time

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CONSTRUCTION = 0, 1, 2, 3

_GROUP_KINDS = ("cyclic", "dihedral", "hypercube", "symmetric")


class UsageError(Exception):
    pass


def parse_times(text: str) -> list[Fraction]:
    try:
        return [as_time(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad time list {text!r}: {exc}") from exc


def normalize_input(data) -> tuple[dict, dict]:
    """Return (group descriptor, psi descriptor) from either input form."""
    if not isinstance(data, dict):
        raise UsageError("input must be a JSON object")
    if "group" in data:
        group, psi = data["group"], data.get("psi", {"kind": "delta", "scale": 1.0})
        if not isinstance(group, dict) or not isinstance(psi, dict):
            raise UsageError("'group' and 'psi' must be objects")
        return group, psi
    group = psi = None
    for kind in _GROUP_KINDS:
        if kind in data:
            group = {"kind": kind, "n": data[kind]}
    if "table" in data:
        group = {"kind": "table", "mult": data["table"]}
    if "delta" in data:
        psi = {"kind": "delta", "scale": data["delta"]}
    elif "hamming" in data:
        psi = {"kind": "hamming"}
    elif "values" in data:
        psi = {"kind": "table", "values": data["values"]}
    if group is None or psi is None:
        raise UsageError("input needs a group and a psi descriptor")
    return group, psi


def load_psi(path: str) -> CndFunction:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input {path}: {exc}") from exc
    gdesc, pdesc = normalize_input(data)
    try:
        g = group_from_descriptor(gdesc)
        return psi_from_descriptor(pdesc, g)
    except GroupAxiomError as exc:
        raise UsageError(f"invalid group table: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"invalid descriptor: {exc}") from exc


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_check_cnd(args) -> int:
    psi = load_psi(args.input)
    cert = is_cnd(psi.values, psi.group, args.tol_cnd)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "group": psi.group.name,
        "psi": psi.descriptor,
        "passed": cert.ok,
        "reason": cert.reason,
        "kernel_eigenvalues": cert.eigenvalues.tolist(),
        "min_eigenvalue": cert.min_eigenvalue if cert.eigenvalues.size else None,
    }
    if cert.ok:
        certs = schoenberg_certificate(psi)
        payload["schoenberg"] = {str(t): v for t, v in certs.items()}
        try:
            payload["cocycle_dim"] = build_cocycle(psi).dim
        except CocycleConstructionError as exc:
            payload["cocycle_error"] = str(exc)
            _emit(payload, args.out)
            return EXIT_CONSTRUCTION
        payload["passed"] = all(v >= -1e-10 for v in certs.values())
    _emit(payload, args.out)
    if not cert.ok:
        print(f"not conditionally negative definite: {cert.reason}", file=sys.stderr)
    return EXIT_PASS if payload["passed"] else EXIT_FAIL


def monte_carlo_section(ctx: DilationContext, grid, N: int, seed: int) -> dict:
    """Cross-check symbolic expectations of pi_t fibers and conditional pairings."""
    g = ctx.group
    rng = np.random.default_rng(seed)
    grid = sorted(grid)
    t, u = grid[-1], grid[len(grid) // 2]
    if u == t and len(grid) > 1:
        u = grid[-2]
    elements = [s for s in range(g.order) if s != g.identity][:3]
    results = []
    for i, s in enumerate(elements):
        fiber = pi_t(t, GroupAlgebraElement.basis(g, s), ctx)[s]
        r = cross_validate_expectation(fiber, N, seed + i)
        results.append({"kind": "expectation", "s": s, "t": str(t), **r.to_json()})
        if u > 0:
            probes = [StepVector.indicator(0, u, ctx.cocycle.b[s]),
                      StepVector.indicator(0, u, rng.normal(size=ctx.dim))]
            for j, r in enumerate(cross_validate_conditional(fiber, u, probes, N, seed + 100 + i)):
                results.append({"kind": "conditional", "s": s, "u": str(u), "t": str(t), "probe": j, **r.to_json()})
    ok = sum(not r["flagged"] for r in results)
    return {
        "samples": N,
        "seed": seed,
        "z_threshold": Z_THRESHOLD,
        "checks": results,
        "fraction_ok": ok / len(results) if results else 1.0,
        "passed": (ok / len(results) if results else 1.0) >= 0.95,
    }


def _context(args, psi: CndFunction) -> DilationContext:
    horizon = as_time(args.horizon) if args.horizon else None
    ctx = DilationContext.build(psi, tolerance=args.tol, horizon=horizon)
    if args.corrupt_pi is not None or args.corrupt_psi is not None:
        pi_entry = None
        if args.corrupt_pi is not None:
            s = args.corrupt_pi % psi.group.order
            pi_entry = (s, 0, 0) if ctx.dim else None
        ctx = ctx.corrupted(pi_entry=pi_entry, psi_index=args.corrupt_psi)
    return ctx


def cmd_verify(args) -> int:
    psi = load_psi(args.input)
    grid = parse_times(args.times) if args.times else list(DEFAULT_GRID)
    try:
        ctx = _context(args, psi)
    except CocycleConstructionError as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    report = DilationReport(ctx.group.name, ctx.psi.descriptor, ctx.dim, ctx.tolerance)
    report.merge(verify_structure(ctx, samples=args.samples, seed=args.seed, times=grid))
    report.merge(verify_markov(ctx, times=time_pairs(grid), seed=args.seed))
    if ctx.horizon is not None:
        report.merge(verify_reversed(ctx, times=time_pairs(grid, reversed_=True, horizon=ctx.horizon), seed=args.seed))
    mc = None
    if args.mc_samples > 0:
        mc = monte_carlo_section(ctx, grid, args.mc_samples, args.seed)
        report.extra["monte_carlo"] = mc
    report.extra["seed"] = args.seed
    report.extra["times"] = [str(x) for x in grid]
    passed = report.passed and (mc is None or mc["passed"])
    payload = report.to_dict()
    payload["passed"] = passed
    _emit(payload, args.out)
    for c in report.failures()[:10]:
        print(f"FAILED {c.kind} {c.params} residual={c.residual:.3e} tol={c.tolerance:.1e}", file=sys.stderr)
    if mc is not None and not mc["passed"]:
        print("FAILED monte_carlo cross-validation", file=sys.stderr)
    print(f"{'PASS' if passed else 'FAIL'}: {len(report.checks)} checks, max residual {report.max_residual:.3e}",
          file=sys.stderr)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_explain(args) -> int:
    psi = load_psi(args.input)
    try:
        ctx = DilationContext.build(psi, tolerance=args.tol)
    except CocycleConstructionError as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    if not 0 <= args.s < ctx.group.order:
        raise UsageError(f"element {args.s} not in {ctx.group.name}")
    u, t = as_time(args.u), as_time(args.t)
    if u > t:
        raise UsageError("explain needs u <= t")
    print(explain(ctx, args.s, u, t))
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fourier-dilation", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="JSON file with group and psi descriptors")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("check-cnd", help="certify psi and report Schoenberg eigenvalues")
    common(p)
    p.add_argument("--tol-cnd", type=float, default=1e-10)
    p.set_defaults(func=cmd_check_cnd)

    p = sub.add_parser("verify", help="build the dilation and verify it")
    common(p)
    p.add_argument("--times", help='comma separated rationals, e.g. "0,1/4,1/2,1"')
    p.add_argument("--mc-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", help="horizon C for the reversed dilation, as p/q")
    p.add_argument("--samples", type=int, default=20, help="random instances per structural property")
    # negative-control hooks
    p.add_argument("--corrupt-pi", type=int, metavar="S", help=argparse.SUPPRESS)
    p.add_argument("--corrupt-psi", type=int, metavar="S", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("explain", help="print the symbolic intermediates for one (s, u, t)")
    common(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
