"""Command-line front end: construct witnesses, factor matrices, verify, sweep.

Exit codes: 0 all verdicts passed, 1 at least one verdict failed, 2 on
input/usage errors.  Reports are emitted as JSON with --json, otherwise as
human-readable lines; matrices read JSON or CSV and are always written as
JSON.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .constructions import (
    halmos_nilpotent_majorant,
    halmos_pair_scaled,
    nilpotent_commutator_factors,
    trace_zero_commutator_factors,
)
from .lazyops import compress
from .matrices import (
    UnconvergedError,
    entrywise_leq,
    matrix_to_json_dict,
    max_abs,
    operator_norm,
    read_matrix,
)
from .verdict import Verdict
from .verifiers import (
    finite_dim_obstructions,
    popa_bound,
    power_inequality_report,
    wielandt_violation_witness,
)

SCHEMA_VERSION = 1

_EXACT_CHECK_DEPTH = 2000


@dataclass
class RunReport:
    command: str
    parameters: dict[str, Any]
    verdicts: list[Verdict]
    tables: list[dict[str, Any]] | None = None
    slopes: dict[str, float] | None = None
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "verdicts": [v.to_json_dict() for v in self.verdicts],
            "tables": self.tables,
            "slopes": self.slopes,
            "notes": self.notes,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "version": __version__,
        }

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def _emit(report: RunReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_json_dict(), indent=2))
        return
    print(f"commkit {report.command}")
    for key, value in report.parameters.items():
        print(f"  {key} = {value}")
    for vd in report.verdicts:
        status = "PASS" if vd.passed else "FAIL"
        extra = ""
        if vd.margin is not None:
            extra = f"  margin={vd.margin:.6g}"
        print(f"{status} {vd.claim}{extra}")
        if not vd.passed and vd.witness:
            print(f"     witness: {vd.witness}")
    if report.tables:
        for row in report.tables:
            cells = "  ".join(f"{k}={_fmt(v)}" for k, v in row.items())
            print(f"  {cells}")
    if report.slopes:
        for name, slope in report.slopes.items():
            print(f"  slope {name} = {slope:.4f}")
    for note in report.notes:
        print(f"  note: {note}")


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _exact_identity_verdict(pair, depth: int) -> Verdict:
    defect = pair.commutator_defect()
    for g in range(1, depth + 1):
        col = defect.apply(g)
        if col:
            idx, value = next(iter(col.items()))
            return Verdict(
                passed=False,
                claim="exact-commutator-identity",
                witness={"column": g, "basis_index": idx, "value": repr(value)},
                inputs={"columns_checked": depth},
            )
    return Verdict(
        passed=True,
        claim="exact-commutator-identity",
        witness=None,
        margin=0.0,
        inputs={"columns_checked": depth},
    )


def _nil_index_verdict(pair, depth: int) -> Verdict:
    nil = pair.nilpotent
    cube = nil @ nil @ nil
    for g in range(1, depth + 1):
        col = cube.apply(g)
        if col:
            return Verdict(
                passed=False,
                claim="nil-index-three",
                witness={"cube_column": g, "support": sorted(col)},
                inputs={"columns_checked": depth},
            )
    square = nil @ nil
    square_support = next((g for g in range(1, 65) if square.apply(g)), None)
    if square_support is None:
        return Verdict(
            passed=False,
            claim="nil-index-three",
            witness={"inconsistency": "square vanished on all columns up to 64"},
            inputs={"columns_checked": depth},
        )
    return Verdict(
        passed=True,
        claim="nil-index-three",
        witness=None,
        margin=None,
        inputs={"columns_checked": depth, "square_nonzero_column": square_support},
    )


def _norm_row(pair, eps: float, window: int, rel_tol: float = 1e-6) -> dict[str, Any]:
    row: dict[str, Any] = {"eps": eps, "window": window, "converged": True}
    try:
        lower_a = operator_norm(compress(pair.a, window, eps), rel_tol=rel_tol).lower
        lower_b = operator_norm(compress(pair.b, window, eps), rel_tol=rel_tol).lower
        lower_n = operator_norm(compress(pair.nilpotent, window, eps), rel_tol=rel_tol).lower
    except UnconvergedError as exc:
        row["converged"] = False
        row["error"] = str(exc)
        return row
    upper_n = operator_norm(halmos_nilpotent_majorant(eps), rel_tol=1e-12).upper
    bound = 0.5 * math.log(1.0 / upper_n)
    row.update(
        norm_a_lower=lower_a,
        norm_b_lower=lower_b,
        norm_n_lower=lower_n,
        norm_n_upper=upper_n,
        bound=bound,
        margin=lower_a * lower_b - bound,
    )
    return row


def _cmd_construct_halmos(args) -> RunReport:
    eps = args.eps
    if not (0.0 < eps <= 1.0):
        raise ValueError("--eps must lie in (0, 1]")
    if args.window < 16:
        raise ValueError("--window must be at least 16")
    pair = halmos_pair_scaled()
    depth = max(args.window, _EXACT_CHECK_DEPTH)
    verdicts = [
        _exact_identity_verdict(pair, depth),
        _nil_index_verdict(pair, depth),
    ]
    row = _norm_row(pair, eps, args.window)
    payload = {
        "eps": eps,
        "window": args.window,
        "A": matrix_to_json_dict(compress(pair.a, args.window, eps)),
        "B": matrix_to_json_dict(compress(pair.b, args.window, eps)),
        "N": matrix_to_json_dict(compress(pair.nilpotent, args.window, eps)),
    }
    Path(args.out).write_text(json.dumps(payload), encoding="utf-8")
    report = RunReport(
        command="construct-halmos",
        parameters={"eps": eps, "window": args.window, "out": str(args.out)},
        verdicts=verdicts,
        tables=[row],
    )
    return report


def _cmd_factor(args) -> RunReport:
    c = read_matrix(args.input)
    tol = args.tol
    if args.kind == "nilpotent":
        if args.eps is None:
            raise ValueError("--eps is required for kind=nilpotent")
        pair = nilpotent_commutator_factors(c, args.eps)
        n = c.shape[0]
        ratio = (1.0 + args.eps) / args.eps
        residual_tol = tol * (1.0 + max_abs(c)) * ratio ** (n - 1)
    else:
        pair = trace_zero_commutator_factors(c)
        residual_tol = tol * c.shape[0] * max(max_abs(c), 1.0)
    recon = pair.a @ pair.b - pair.b @ pair.a
    residual = max_abs(recon - c)
    verdicts = [
        Verdict(
            passed=residual <= residual_tol,
            claim="reconstruction-residual",
            witness=None if residual <= residual_tol else {"residual": residual},
            margin=residual_tol - residual,
            inputs={"residual": residual, "tolerance": residual_tol},
        )
    ]
    if args.kind == "nilpotent":
        vd = entrywise_leq(pair.b @ pair.a, args.eps * c, tol)
        verdicts.append(dataclasses.replace(vd, claim="ba-below-eps-c"))
    Path(args.out).write_text(json.dumps(pair.to_json_dict()), encoding="utf-8")
    return RunReport(
        command="factor",
        parameters={
            "kind": args.kind,
            "input": str(args.input),
            "eps": args.eps,
            "out": str(args.out),
            "tol": tol,
        },
        verdicts=verdicts,
    )


def _cmd_verify(args) -> RunReport:
    suite = args.suite
    parameters: dict[str, Any] = {"suite": suite}
    if suite == "popa":
        if args.norm_a is None or args.norm_b is None or args.eps is None:
            raise ValueError("verify popa needs --norm-a, --norm-b and --eps")
        verdicts = [popa_bound(args.norm_a, args.norm_b, args.eps, args.alpha)]
        parameters.update(norm_a=args.norm_a, norm_b=args.norm_b, eps=args.eps, alpha=args.alpha)
    elif suite == "obstructions":
        a, b, x = _need_matrices(args, "obstructions", "input_a", "input_b", "input_x")
        verdicts = finite_dim_obstructions(a, b, x, tol=args.tol)
        parameters.update(input_a=args.input_a, input_b=args.input_b, input_x=args.input_x)
    elif suite == "wielandt":
        a, b = _need_matrices(args, "wielandt", "input_a", "input_b")
        verdicts = [wielandt_violation_witness(a, b)]
        parameters.update(input_a=args.input_a, input_b=args.input_b)
    elif suite == "power":
        a, b, x = _need_matrices(args, "power", "input_a", "input_b", "input_x")
        verdicts = power_inequality_report(
            a, b, x, n_max=args.n_max, tol=args.tol, interior=args.interior
        )
        parameters.update(
            input_a=args.input_a,
            input_b=args.input_b,
            input_x=args.input_x,
            n_max=args.n_max,
            interior=args.interior,
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown suite {suite}")
    return RunReport(command="verify", parameters=parameters, verdicts=verdicts)


def _need_matrices(args, suite: str, *names: str):
    paths = []
    for name in names:
        value = getattr(args, name)
        if value is None:
            flag = "--" + name.replace("_", "-")
            raise ValueError(f"verify {suite} needs {flag}")
        paths.append(value)
    return tuple(read_matrix(p) for p in paths)


def _cmd_sweep(args) -> RunReport:
    grid = _parse_grid(args.grid)
    if args.window < 64:
        raise ValueError("--window must be at least 64")
    pair = halmos_pair_scaled()
    rows = []
    verdicts = []
    notes = []
    for eps in grid:
        row = _norm_row(pair, eps, args.window)
        rows.append(row)
        if not row["converged"]:
            continue
        product = row["norm_a_lower"] * row["norm_b_lower"]
        margin = product - row["bound"]
        verdicts.append(
            Verdict(
                passed=margin >= 0.0,
                claim=f"certified-popa-eps-{eps:g}",
                witness=None if margin >= 0.0 else {"product": product, "bound": row["bound"]},
                margin=margin,
                inputs={"eps": eps, "window": args.window},
            )
        )
    slopes = None
    good = [r for r in rows if r["converged"]]
    if len(good) < len(rows):
        notes.append(f"{len(rows) - len(good)} grid point(s) did not converge; rows marked")
    if len(good) >= 2:
        log_eps = np.log([r["eps"] for r in good])
        slopes = {
            "norm_a": float(np.polyfit(log_eps, np.log([r["norm_a_lower"] for r in good]), 1)[0]),
            "norm_b": float(np.polyfit(log_eps, np.log([r["norm_b_lower"] for r in good]), 1)[0]),
            "norm_n": float(np.polyfit(log_eps, np.log([r["norm_n_lower"] for r in good]), 1)[0]),
        }
    else:
        notes.append("slopes need at least 2 converged grid points")
    report = RunReport(
        command="sweep",
        parameters={"grid": grid, "window": args.window, "out": str(args.out)},
        verdicts=verdicts,
        tables=rows,
        slopes=slopes,
        notes=notes,
    )
    Path(args.out).write_text(json.dumps(report.to_json_dict(), indent=2), encoding="utf-8")
    return report


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(cell) for cell in text.split(",") if cell.strip()]
    except ValueError:
        raise ValueError(f"--grid must be comma-separated numbers, got {text!r}") from None
    if not grid:
        raise ValueError("--grid is empty")
    for eps in grid:
        if not (0.0 < eps <= 1.0):
            raise ValueError(f"grid value {eps} outside (0, 1]")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commkit",
        description="Construct and verify commutator phenomena for positive matrices and operators.",
    )
    parser.add_argument("--json", action="store_true", help="emit the run report as JSON on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p_con = sub.add_parser("construct-halmos", help="build the scaled operator pair and compress it")
    p_con.add_argument("--eps", type=float, required=True)
    p_con.add_argument("--window", type=int, default=512)
    p_con.add_argument("--out", required=True, help="output JSON path for the compressed matrices")
    p_con.set_defaults(handler=_cmd_construct_halmos)

    p_fac = sub.add_parser("factor", help="factor a positive matrix as a commutator")
    p_fac.add_argument("kind", choices=["nilpotent", "tracezero"])
    p_fac.add_argument("--input", required=True, help="matrix file (JSON or CSV)")
    p_fac.add_argument("--eps", type=float, default=None)
    p_fac.add_argument("--tol", type=float, default=1e-9)
    p_fac.add_argument("--out", required=True, help="output JSON path for the factor pair")
    p_fac.set_defaults(handler=_cmd_factor)

    p_ver = sub.add_parser("verify", help="run one verification suite")
    p_ver.add_argument("suite", choices=["popa", "obstructions", "wielandt", "power"])
    p_ver.add_argument("--norm-a", dest="norm_a", type=float, default=None)
    p_ver.add_argument("--norm-b", dest="norm_b", type=float, default=None)
    p_ver.add_argument("--eps", type=float, default=None)
    p_ver.add_argument("--alpha", type=float, default=1.0)
    p_ver.add_argument("--tol", type=float, default=1e-9)
    p_ver.add_argument("--n-max", dest="n_max", type=int, default=6)
    p_ver.add_argument("--interior", type=int, default=None)
    p_ver.add_argument("--input-a", dest="input_a", default=None)
    p_ver.add_argument("--input-b", dest="input_b", default=None)
    p_ver.add_argument("--input-x", dest="input_x", default=None)
    p_ver.set_defaults(handler=_cmd_verify)

    p_sw = sub.add_parser("sweep", help="norm scaling table over an eps grid")
    p_sw.add_argument("--grid", required=True, help="comma-separated eps values in (0, 1]")
    p_sw.add_argument("--window", type=int, default=512)
    p_sw.add_argument("--out", required=True, help="output JSON path for the report")
    p_sw.set_defaults(handler=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.handler(args)
    except (ValueError, OSError, UnconvergedError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(report, args.json)
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
