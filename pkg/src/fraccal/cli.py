"""Command-line convergence studies.

Example::

    fraccal --problem example1 --solver ns2 --scheme gl_trunc \\
        --alpha 0.2,0.5,0.9 --h-start 0.00625 --h-steps 4 --format md

Each ``(alpha, h)`` cell is one independent solver run; cells are spread over
up to ``FRACCAL_THREADS`` worker processes and the output is assembled in a
fixed order, so identical arguments always give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from fraccal.errors import FraccalError
from fraccal.problems import BUILTIN, get_problem, load_custom
from fraccal.solver import (
    CaputoProblem,
    SystemProblem,
    max_error,
    solve_ns1,
    solve_ns2,
    solve_ns3,
    solve_ns4,
)
from fraccal.weights import SchemeKind, TailPolicy

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

#: Errors below this level are treated as roundoff, so no order is reported.
ORDER_FLOOR = 1.0e-13
#: markdown placeholder for an undefined order (U+2014)
MISSING_ORDER = "\u2014"

_SOLVERS = {
    "ns1": (solve_ns1, False, False),
    "ns2": (solve_ns2, True, False),
    "ns3": (solve_ns3, False, True),
    "ns4": (solve_ns4, True, True),
}


class UsageError(ValueError):
    """Invalid command-line arguments."""


class NumericFailure(RuntimeError):
    """A solver run failed; the message names the offending cell."""


# {{{ experiment spec


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str
    solver: str
    scheme: SchemeKind
    alphas: tuple[float, ...]
    hs: tuple[float, ...]
    policy: TailPolicy = field(default_factory=TailPolicy)
    fmt: str = "csv"
    out: str | None = None
    custom: dict[str, str] | None = None
    component: str = "u"

    def __post_init__(self) -> None:
        if not self.alphas:
            raise UsageError("need at least one alpha")
        for a in self.alphas:
            if not 0.0 < a < 1.0:
                raise UsageError(f"alpha must be in (0, 1), got {a}")
        _check_hs(self.hs)

        if self.solver not in _SOLVERS:
            raise UsageError(f"unknown solver {self.solver!r} (known: {', '.join(_SOLVERS)})")
        _, shifted, _ = _SOLVERS[self.solver]
        if self.scheme.shifted != shifted:
            want = "shifted" if shifted else "non-shifted"
            got = "shifted" if self.scheme.shifted else "non-shifted"
            raise UsageError(
                f"solver {self.solver} needs a {want} scheme, "
                f"but {self.scheme.value!r} is {got} (shift mismatch)"
            )
        if self.fmt not in ("csv", "md"):
            raise UsageError(f"unknown format {self.fmt!r} (known: csv, md)")

    @property
    def caption(self) -> str:
        return (
            f"Maximum error and order: {self.problem}, "
            f"{self.solver} with {self.scheme.value}"
        )


def _check_hs(hs: Sequence[float]) -> None:
    if not hs:
        raise UsageError("need at least one step size")
    for h in hs:
        if not (0.0 < h <= 1.0) or not math.isclose(1.0 / h, round(1.0 / h), rel_tol=1e-9):
            raise UsageError(f"step size must be 1/N for an integer N, got h = {h}")
    for prev, cur in zip(hs, hs[1:]):
        if not math.isclose(prev / cur, 2.0, rel_tol=1e-9):
            raise UsageError(f"step sizes must be strictly halving: {list(hs)}")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fraccal",
        description="Convergence tables for Caputo derivative schemes.",
        fromfile_prefix_chars="@",
    )
    parser.add_argument(
        "--problem", default="example1",
        help=f"one of {', '.join(BUILTIN)}, or the path of a custom problem file",
    )
    parser.add_argument("--solver", default="ns2", help="ns1, ns2, ns3 or ns4")
    parser.add_argument(
        "--scheme", default="gl_trunc",
        help=f"one of {', '.join(k.value for k in SchemeKind)}",
    )
    parser.add_argument("--alpha", type=_float_list, default=None,
                        help="comma separated orders, e.g. 0.2,0.5,0.9")
    parser.add_argument("--h-start", type=float, default=0.0125, help="largest step")
    parser.add_argument("--h-steps", type=int, default=5, help="number of halvings")
    parser.add_argument("--p", type=float, default=5.0, help="tail divisor")
    parser.add_argument("--l1-tail", choices=("derived", "printed"), default="derived",
                        help="second coefficient of the L1 tail: 1/12 or alpha/12")
    parser.add_argument("--component", choices=("u", "v"), default="u",
                        help="solution component measured for systems")
    parser.add_argument("--format", dest="fmt", choices=("csv", "md"), default="csv", help="csv or markdown table")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    return parser


def parse_spec(argv: Sequence[str] | None = None) -> ExperimentSpec:
    """Parse and validate command-line arguments.

    :raises UsageError: for malformed flags and incompatible choices.
    """
    args = make_parser().parse_args(argv)

    try:
        scheme = SchemeKind.parse(args.scheme)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    custom = None
    alphas = args.alpha
    if args.problem not in BUILTIN:
        path = Path(args.problem)
        if not path.is_file():
            known = ", ".join(BUILTIN)
            raise UsageError(f"unknown problem {args.problem!r} (known: {known}, or a file)")
        try:
            custom = load_custom(path)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
        if alphas is None and "alpha" in custom:
            alphas = _float_list(custom["alpha"])
    if alphas is None:
        alphas = (0.2, 0.5, 0.9)

    if args.h_steps < 1:
        raise UsageError(f"--h-steps must be positive, got {args.h_steps}")
    hs = tuple(args.h_start / 2**i for i in range(args.h_steps))

    try:
        policy = TailPolicy(p=args.p, l1_printed_tail=args.l1_tail == "printed")
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    spec = ExperimentSpec(
        problem="custom" if custom is not None else args.problem,
        solver=args.solver,
        scheme=scheme,
        alphas=alphas,
        hs=hs,
        policy=policy,
        fmt=args.fmt,
        out=args.out,
        custom=custom,
        component=args.component,
    )

    # the problem type has to match the solver
    _, _, system = _SOLVERS[spec.solver]
    probe = _problem(spec, spec.alphas[0])
    if system != isinstance(probe, SystemProblem):
        kind = "2x2 system" if system else "scalar equation"
        raise UsageError(f"solver {spec.solver} needs a {kind}, {spec.problem!r} is not one")
    return spec


def _problem(spec: ExperimentSpec, alpha: float) -> CaputoProblem | SystemProblem:
    try:
        return get_problem(spec.problem, alpha, spec.custom)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# }}}


# {{{ running


@dataclass(frozen=True)
class TableRow:
    alpha: float
    h: float
    max_error: float
    order: float | None


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[TableRow, ...]
    caption: str = ""


def run_cell(spec: ExperimentSpec, alpha: float, h: float) -> float:
    """Maximum error of one solver run; picklable for worker processes."""
    problem = _problem(spec, alpha)
    solve, _, system = _SOLVERS[spec.solver]
    N = round(1.0 / h)
    try:
        t = solve(problem, spec.scheme, N, spec.policy)
        if system:
            exact = problem.exact_y if spec.component == "u" else problem.exact_z
        else:
            exact = problem.exact
        if exact is None:
            raise NumericFailure(f"problem {spec.problem!r} has no exact solution")
        err = max_error(t, exact, component=spec.component)
    except (FraccalError, ArithmeticError) as exc:
        raise NumericFailure(f"alpha = {alpha}, h = {h}: {exc}") from exc

    if not math.isfinite(err):
        raise NumericFailure(f"alpha = {alpha}, h = {h}: solution is not finite")
    return err


def _order(coarse: float, fine: float) -> float | None:
    if coarse < ORDER_FLOOR or fine < ORDER_FLOOR:
        return None
    return math.log2(coarse / fine)


def _threads() -> int:
    raw = os.environ.get("FRACCAL_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FRACCAL_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"FRACCAL_THREADS must be positive, got {n}")
    return n


def run_table(spec: ExperimentSpec, threads: int | None = None) -> ConvergenceTable:
    """Run every cell; a warm-up run at ``2 h_start`` gives the first order."""
    # warm-up grids must still be 1/N
    warm = 2.0 * spec.hs[0]
    hs = (warm, *spec.hs) if warm <= 1.0 and math.isclose(1 / warm, round(1 / warm)) else spec.hs
    cells = [(a, h) for a in spec.alphas for h in hs]

    if threads is None:
        threads = _threads()
    threads = max(1, min(threads, len(cells)))

    if threads == 1:
        errors = [run_cell(spec, a, h) for a, h in cells]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_cell, spec, a, h) for a, h in cells]
            errors = [f.result() for f in futures]

    by_cell = dict(zip(cells, errors))
    rows = []
    for a in spec.alphas:
        prev = by_cell.get((a, warm))
        for h in spec.hs:
            err = by_cell[a, h]
            rows.append(TableRow(a, h, err, None if prev is None else _order(prev, err)))
            prev = err

    return ConvergenceTable(rows=tuple(rows), caption=spec.caption)


# }}}


# {{{ output


def _sci(x: float, digits: int) -> str:
    mantissa, exp = f"{x:.{digits}e}".split("e")
    return f"{mantissa}e{int(exp)}"


def format_h(h: float) -> str:
    """Shortest scientific form, e.g. ``6.25e-3``."""
    for digits in range(0, 17):
        text = _sci(h, digits)
        if float(text) == h:
            return text
    return repr(h)  # pragma: no cover


def format_error(e: float) -> str:
    return _sci(e, 4)


def format_order(o: float | None, empty: str = "") -> str:
    return empty if o is None else f"{o:.4f}"


def format_alpha(a: float) -> str:
    return f"{a:g}"


def emit_table(table: ConvergenceTable, fmt: str = "csv") -> str:
    if not table.rows:
        raise ValueError("cannot emit an empty table")

    if fmt == "csv":
        buf = io.StringIO()
        buf.write("alpha,h,max_error,order\n")
        for r in table.rows:
            buf.write(
                f"{format_alpha(r.alpha)},{format_h(r.h)},"
                f"{format_error(r.max_error)},{format_order(r.order)}\n"
            )
        return buf.getvalue()

    if fmt == "md":
        alphas = list(dict.fromkeys(r.alpha for r in table.rows))
        hs = list(dict.fromkeys(r.h for r in table.rows))
        cell = {(r.alpha, r.h): r for r in table.rows}

        lines = []
        if table.caption:
            lines += [f"**{table.caption}**", ""]
        header = ["h"]
        for a in alphas:
            header += [f"error (alpha={format_alpha(a)})", f"order (alpha={format_alpha(a)})"]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for h in hs:
            entries = [format_h(h)]
            for a in alphas:
                r = cell.get((a, h))
                if r is None:
                    entries += ["", ""]
                else:
                    entries += [format_error(r.max_error), format_order(r.order, MISSING_ORDER)]
            lines.append("| " + " | ".join(entries) + " |")
        return "\n".join(lines) + "\n"

    raise ValueError(f"unknown format {fmt!r} (known: csv, md)")


def parse_csv(text: str) -> list[TableRow]:
    """Read back the output of :func:`emit_table` with ``fmt="csv"``."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        order = rec["order"]
        rows.append(TableRow(
            float(rec["alpha"]), float(rec["h"]), float(rec["max_error"]),
            float(order) if order else None,
        ))
    return rows


def parse_markdown(text: str) -> list[TableRow]:
    """Read back the output of :func:`emit_table` with ``fmt="md"``."""
    table = [
        [c.strip() for c in line.strip().strip("|").split("|")]
        for line in text.splitlines()
        if line.startswith("|") and not line.startswith("|---")
    ]
    header, body = table[0], table[1:]
    alphas = [float(c.split("=")[1].rstrip(")")) for c in header[1::2]]

    rows = []
    for a_idx, a in enumerate(alphas):
        for line in body:
            err, order = line[1 + 2 * a_idx], line[2 + 2 * a_idx]
            if not err:
                continue
            rows.append(TableRow(
                a, float(line[0]), float(err),
                None if order in ("", MISSING_ORDER) else float(order),
            ))
    return rows


# }}}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        spec = parse_spec(argv)
        table = run_table(spec)
    except UsageError as exc:
        print(f"fraccal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"fraccal: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = emit_table(table, spec.fmt)
    if spec.out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(spec.out).write_text(text)
        except OSError as exc:
            print(f"fraccal: error: cannot write {spec.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
