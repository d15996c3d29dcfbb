"""Command-line front end: input files in, per-order tables or a JSON report
out.

Exit codes: 0 when a certificate was found, 2 when the order budget ran out,
3 when the relaxation is infeasible, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .pipeline import (
    CERTIFIED,
    EXHAUSTED_T,
    CertificateReport,
    OrderRecord,
    SolverInfo,
    apply_coordinate_change,
    run,
    run_with_retry,
    spec_from_text,
)
from .poly import ParseError, VariableOrder, format_poly, parse_polynomial
from .sdp import INFEASIBLE

_EXIT = {CERTIFIED: 0, EXHAUSTED_T: 2, INFEASIBLE: 3}
_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def report_to_json(report: CertificateReport, order: VariableOrder) -> str:
    """Serialize a report with a stable key order; bases as canonical text."""
    doc = {
        "status": report.status,
        "certified_t": report.certified_t,
        "records": [
            {
                "t": r.t,
                "rank": list(r.rank),
                "corank": list(r.corank),
                "alpha": list(r.alpha),
                "weighted_sum": r.weighted_sum,
                "corank_diff": r.corank_diff,
                "pass": r.passed,
            }
            for r in report.records
        ],
        "weak_basis": [format_poly(p, order) for p in report.weak_basis],
        "strong_basis": [format_poly(p, order) for p in report.strong_basis],
        "rationalized": report.rationalized,
        "solver": None
        if report.solver is None
        else {
            "residuals": {
                "equality": report.solver.residual_eq,
                "psd": report.solver.min_eig,
            },
            "iterations": report.solver.iterations,
            "seed": report.solver.seed,
        },
    }
    return json.dumps(doc, indent=2, ensure_ascii=False)


def report_from_json(text: str, order: VariableOrder) -> CertificateReport:
    """Rebuild a report from its JSON form; exactness of the strong basis
    follows the rationalized flag."""
    doc = json.loads(text)
    records = tuple(
        OrderRecord(
            r["t"],
            tuple(r["rank"]),
            tuple(r["corank"]),
            tuple(r["alpha"]),
            r["weighted_sum"],
            r["corank_diff"],
            r["pass"],
        )
        for r in doc["records"]
    )
    weak = tuple(parse_polynomial(s, order).to_float() for s in doc["weak_basis"])
    strong = tuple(parse_polynomial(s, order) for s in doc["strong_basis"])
    if not doc["rationalized"]:
        strong = tuple(p.to_float() for p in strong)
    solver = None
    if doc["solver"] is not None:
        solver = SolverInfo(
            doc["solver"]["residuals"]["equality"],
            doc["solver"]["residuals"]["psd"],
            doc["solver"]["iterations"],
            doc["solver"]["seed"],
        )
    return CertificateReport(
        doc["status"],
        doc["certified_t"],
        records,
        weak,
        strong,
        doc["rationalized"],
        solver,
    )


def render_table(report: CertificateReport, order: VariableOrder) -> str:
    """Human-readable sweep summary: one line per order, then the bases."""
    lines = []
    for r in report.records:
        lines.append(
            "t={}: {} / {} / α: {} → {}".format(
                r.t,
                " ".join(str(v) for v in r.rank),
                " ".join(str(v) for v in r.corank),
                " ".join(str(v) for v in r.alpha),
                r.weighted_sum,
            )
        )
    if report.status == CERTIFIED:
        lines.append(f"status: CERTIFIED at t={report.certified_t}")
    else:
        lines.append(f"status: {report.status}")
        if report.message:
            lines.append(report.message)
    if report.weak_basis:
        lines.append(f"weak basis ({len(report.weak_basis)} elements):")
        lines.extend(f"  {format_poly(p, order)}" for p in report.weak_basis)
    if report.strong_basis:
        kind = "exact" if report.rationalized else "floating-point"
        lines.append(f"strong basis ({len(report.strong_basis)} elements, {kind}):")
        lines.extend(f"  {format_poly(p, order)}" for p in report.strong_basis)
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="realrad",
        description="Numerical certificates and generator bases for the real "
        "radical of a polynomial ideal.",
    )
    p.add_argument("input", help="system description file")
    p.add_argument("--tol", type=float, default=1e-8, help="rank tolerance (default 1e-8)")
    p.add_argument("--tmax", type=int, default=None, help="last relaxation order to try")
    p.add_argument("--tstart", type=int, default=None, help="first relaxation order")
    p.add_argument("--ball", default="off", help="ball radius, or 'off' (default)")
    p.add_argument("--seed", type=int, default=0, help="solver seed (default 0)")
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument(
        "--coord-change",
        default=None,
        metavar="FILE",
        help="file with an n×n rational matrix: new variables in rows",
    )
    p.add_argument(
        "--auto-retry",
        action="store_true",
        help="after an exhausted sweep, retry with random coordinate changes",
    )
    return p


def _read_matrix(path: str) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            body = raw.split("#", 1)[0].strip()
            if body:
                rows.append([Fraction(tok) for tok in body.split()])
    return rows


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    level = _LOG_LEVELS.get(os.environ.get("REALRAD_LOG", "quiet"), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(name)s: %(message)s")
    logging.getLogger("realrad").setLevel(level)

    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"realrad: cannot read '{args.input}': {e.strerror}", file=sys.stderr)
        return 1

    ball = None
    if args.ball != "off":
        try:
            ball = float(args.ball)
        except ValueError:
            print(f"realrad: --ball needs a number or 'off', got '{args.ball}'", file=sys.stderr)
            return 1
        if ball <= 0:
            print("realrad: --ball radius must be positive", file=sys.stderr)
            return 1

    try:
        spec = spec_from_text(
            text,
            tol=args.tol,
            t_start=args.tstart,
            t_max=args.tmax,
            ball=ball,
            seed=args.seed,
        )
        if args.coord_change is not None:
            spec = apply_coordinate_change(spec, _read_matrix(args.coord_change))
    except (ParseError, ValueError, OSError, ZeroDivisionError) as e:
        print(f"realrad: {e}", file=sys.stderr)
        return 1

    retry_change = None
    try:
        if args.auto_retry:
            report, retry_change = run_with_retry(spec)
        else:
            report = run(spec)
    except ValueError as e:
        print(f"realrad: {e}", file=sys.stderr)
        return 1

    if args.json:
        print(report_to_json(report, spec.order))
    else:
        if retry_change is not None:
            rows = " / ".join(" ".join(str(x) for x in row) for row in retry_change)
            print(f"coordinate change rows: {rows}")
        print(render_table(report, spec.order))
    return _EXIT[report.status]


if __name__ == "__main__":
    sys.exit(main())
