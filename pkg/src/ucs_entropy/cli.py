"""Command-line front end.

Exit codes: 0 success, 1 domain failure, 2 parse error, 3 budget exhausted.
Results go to stdout, diagnostics to stderr. Output is deterministic.
"""

from __future__ import annotations

import argparse
import sys as _sys
from pathlib import Path
from typing import Sequence, TextIO

from . import cover as cv
from . import oracles, spanning
from .errors import BudgetExceeded, ConditionsNotMet, DomainError, ParseError
from .graphnum import DEFAULT_TOL
from .logvalue import LogValue
from .system import UncertainSystem, is_controlled_invariant
from .textio import Table, emit_tsv, fixture_path, load_cover, load_system, matrix_table

DEFAULT_N = 4
DEFAULT_M_MAX = 12
DEFAULT_BUDGET = spanning.DEFAULT_BUDGET


def _split(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [t for t in text.split(",") if t]


def _resolve(path: str) -> Path:
    """A path on disk, or else the bundled example of that name."""
    p = Path(path)
    if not p.exists():
        bundled = fixture_path(p.name)
        if bundled.exists():
            return bundled
    return p


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucs-entropy",
        description="Invariance entropy and invariance feedback entropy of finite uncertain control systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-s", "--system", required=True, help="system file (or a bundled example name such as ex4.sys)")
    common.add_argument("--format", choices=("plain", "tsv"), default="plain")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL, help="spectral enclosure width")
    common.add_argument("--budget", type=_nonneg_int, default=DEFAULT_BUDGET, help="search budget (node expansions)")

    target = argparse.ArgumentParser(add_help=False)
    target.add_argument("--target", required=True, help="comma-separated target states Q")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--inputs", help="comma-separated input subset V (default: all inputs)")

    cover = argparse.ArgumentParser(add_help=False)
    cover.add_argument("-c", "--cover", required=True, help="cover file")

    horizon = argparse.ArgumentParser(add_help=False)
    horizon.add_argument("-n", type=_positive_int, default=DEFAULT_N, help="horizon")

    p = sub.add_parser("validate", parents=[common], help="parse a system (and optionally a cover) and summarize it")
    p.add_argument("-c", "--cover")
    p.add_argument("--target", help="also test controlled invariance of these states")

    p = sub.add_parser("rinv", parents=[common, target, horizon], help="minimal (n,K,Q)-spanning set size")
    p.add_argument("--k", help="comma-separated subset K of the target (default: the target)")
    p.add_argument("--certificate", action="store_true", help="print the spanning words and per-point families")

    p = sub.add_parser("entropy-report", parents=[common, target], help="log2 r_inv(n)/n for n = 1..n-max")
    p.add_argument("--k")
    p.add_argument("--n-max", type=_positive_int, default=DEFAULT_N)

    sub.add_parser("cover-check", parents=[common, cover], help="validate a cover and test the quasi-partition property")
    sub.add_parser("cover-rinv", parents=[common, cover, horizon], help="minimal expansion number of a cover")

    p = sub.add_parser("cover-entropy", parents=[common, cover], help="mean-cycle entropy, spectral bounds and W_m terms")
    p.add_argument("--m-max", type=_positive_int, default=DEFAULT_M_MAX)

    p = sub.add_parser("matrices", parents=[common, inputs], help="M and W of a cover, or M_{Q,V}")
    p.add_argument("-c", "--cover")
    p.add_argument("--target")

    sub.add_parser("conditions", parents=[common, target, inputs], help="cover property and C.1-C.3")
    sub.add_parser("hinv-exact", parents=[common, target, inputs], help="h_inv as log2 rho(M_{Q,V})")
    sub.add_parser("ife", parents=[common, target, inputs], help="invariance feedback entropy")

    p = sub.add_parser("refine-search", parents=[common, target, inputs], help="best refinement upper bound on h_fb")
    p.add_argument("--max-cells", type=_positive_int)
    p.add_argument("--horizon", type=_positive_int, default=6, help="horizon for non-quasi-partition refinements")

    p = sub.add_parser("oracle", parents=[common, target, horizon], help="brute-force cross-checks")
    p.add_argument("-c", "--cover")
    return parser


# -- helpers ---------------------------------------------------------------------------


class _Out:
    def __init__(self, fmt: str, stream: TextIO) -> None:
        self.fmt = fmt
        self.stream = stream

    def line(self, text: str) -> None:
        self.stream.write(text + "\n")

    def table(self, table: Table, title: str | None = None) -> None:
        if self.fmt == "plain" and title:
            self.line(f"# {title}")
        self.stream.write(emit_tsv(table))


def _lv(v: LogValue | None) -> str:
    if v is None:
        return "-"
    return f"exact={v.exact_str()}\tdecimal={v.decimal_str()}"


def _word(w: Sequence[str]) -> str:
    return "".join(w) if all(len(u) == 1 for u in w) else ".".join(w)


def _system(args) -> UncertainSystem:
    return load_system(_resolve(args.system))


def _cover(args, sys: UncertainSystem) -> cv.InvariantCover:
    return load_cover(_resolve(args.cover), sys).build()


def _V(args, sys: UncertainSystem) -> list[str]:
    return _split(args.inputs) or list(sys.inputs)


# -- commands --------------------------------------------------------------------------


def cmd_validate(args, out: _Out) -> int:
    sys = _system(args)
    out.line(f"system {sys.name}\tstates={sys.n_states}\tinputs={sys.n_inputs}")
    status = 0
    if args.target:
        chk = is_controlled_invariant(sys, _split(args.target))
        if chk.ok:
            w = ",".join(f"{x}:{u}" for x, u in chk.witness.items())
            out.line(f"controlled_invariant=true\twitness={w}")
        else:
            out.line(f"controlled_invariant=false\tviolators={','.join(chk.violators)}")
            status = 1
    if args.cover:
        c = _cover(args, sys)
        out.line(f"cover {c.name}\tcells={len(c)}\tpartition={str(c.is_partition()).lower()}")
    return status


def cmd_rinv(args, out: _Out) -> int:
    sys = _system(args)
    res = spanning.r_inv(sys, _split(args.target), _split(args.k), args.n, args.budget)
    if out.fmt == "tsv":
        out.table(Table(("n", "r_inv"), ((res.n, res.count),)))
    else:
        out.line(f"r_inv={res.count}")
    if args.certificate:
        out.table(Table(("word",), tuple((_word(w),) for w in res.certificate.words)), "words")
        rows = tuple(
            (x, ",".join(sorted(_word(w) for w in t.words))) for x, t in sorted(res.certificate.trees.items())
        )
        out.table(Table(("point", "family"), rows), "families")
    return 0


def cmd_entropy_report(args, out: _Out) -> int:
    sys = _system(args)
    rep = spanning.entropy_report(sys, _split(args.target), _split(args.k), args.n_max, args.budget)
    rows = tuple((r.n, r.r_inv, r.ratio, r.running_inf) for r in rep.rows)
    out.table(Table(("n", "r_inv", "ratio", "running_inf"), rows), "log2(r_inv)/n")
    if rep.upper_bound is not None:
        out.line(f"upper_bound\t{_lv(rep.upper_bound)}")
    out.line("note\tfinite-horizon ratios bound h_inv from above only")
    return 0


def cmd_cover_check(args, out: _Out) -> int:
    sys = _system(args)
    c = _cover(args, sys)
    dg = cv.cover_digraph(c)
    q = cv.is_quasi_invariant_partition(c)
    rows = tuple(
        (cid, ",".join(sorted(c.cells[cid])), c.G[cid], ",".join(dg.D[cid]), n) for cid, n in zip(c.ids, dg.counts)
    )
    out.table(Table(("cell", "states", "input", "D", "size_D"), rows), "cells")
    out.line(f"partition={str(c.is_partition()).lower()}")
    out.line(f"quasi_invariant_partition={str(q.ok).lower()}")
    for v in q.violations:
        out.line("violation\t" + "\t".join(v))
    return 0


def cmd_cover_rinv(args, out: _Out) -> int:
    sys = _system(args)
    c = _cover(args, sys)
    res = cv.cover_rinv(c, args.n)
    if out.fmt == "tsv":
        out.table(Table(("n", "cover_rinv"), ((res.n, res.value),)))
    else:
        out.line(f"cover_rinv={res.value}")
    out.line("initial\t" + ",".join(res.initial))
    return 0


def cmd_cover_entropy(args, out: _Out) -> int:
    sys = _system(args)
    c = _cover(args, sys)
    m = cv.mmcw(c)
    if m.exact:
        out.line(f"mmcw\t{_lv(m.value)}\tcycle={','.join(m.cycle.cells)}")
    else:
        out.line(f"mmcw\tapprox={m.karp:.12f}\tinexact (cycle cap reached)")
    b = cv.entropy_bounds(c, args.tol)
    out.line(f"lower\t{b.lower}")
    out.line(f"upper\t{b.upper}")
    out.line(f"exact\t{_lv(b.exact)}")
    out.line(f"rho_M\tlo={b.rho_M.lo:.12f}\thi={b.rho_M.hi:.12f}\texact_one={str(b.rho_M.exact_one).lower()}")
    out.line(f"rho_W\tlo={b.rho_W.lo:.12f}\thi={b.rho_W.hi:.12f}")
    out.line(f"norm_inf_W\t{b.norm_inf_W}")
    rows = tuple((r.m, r.product, r.term, r.predicted, r.cover_rinv) for r in cv.wm_entropy_terms(c, args.m_max))
    out.table(Table(("m", "max_product", "max_term", "predicted_rinv", "cover_rinv"), rows), "W_m terms")
    return 0


def cmd_matrices(args, out: _Out) -> int:
    sys = _system(args)
    if args.cover:
        dg = cv.cover_digraph(_cover(args, sys))
        out.table(matrix_table(dg.M), "M")
        if out.fmt == "tsv":
            out.line("")
        out.table(matrix_table(dg.W), "W")
        return 0
    if not args.target:
        raise DomainError("matrices needs --cover or --target")
    M = spanning.admissible_matrix(sys, _split(args.target), _V(args, sys))
    out.table(matrix_table(M), "M_{Q,V}")
    return 0


def cmd_conditions(args, out: _Out) -> int:
    sys = _system(args)
    rep = spanning.check_conditions(sys, _split(args.target), _V(args, sys))
    for name, ok in rep.flags().items():
        out.line(f"{name}\t{'ok' if ok else 'fail'}")
    for x in rep.cover_violations:
        out.line(f"cover_violation\t{x}")
    for a, b, s in rep.c1_violations:
        out.line(f"C.1_violation\t{a}\t{b}\t{','.join(s)}")
    for a, b, s in rep.c2_violations:
        out.line(f"C.2_violation\t{a}\t{b}\t{','.join(s)}")
    for cc, s in rep.c3_violations:
        out.line(f"C.3_violation\t{cc}\t{','.join(s)}")
    return 0 if rep.all_ok else 1


def cmd_hinv_exact(args, out: _Out) -> int:
    sys = _system(args)
    res = spanning.h_inv_exact(sys, _split(args.target), _V(args, sys), args.tol)
    if res.structural_one:
        out.line("h_inv exact=0 (rho=1 structural)")
    elif res.exact is not None:
        out.line(f"h_inv {_lv(res.exact)} (cycle structure)")
    else:
        out.line(f"h_inv {res.value}")
    return 0


def cmd_ife(args, out: _Out) -> int:
    sys = _system(args)
    res = cv.ife(sys, _split(args.target), _V(args, sys), args.budget)
    tag = "" if res.exact else " (upper bound only)"
    out.line(f"h_fb {_lv(res.value)}{tag}")
    out.line(f"method\t{res.method}")
    return 0


def cmd_refine_search(args, out: _Out) -> int:
    sys = _system(args)
    res = cv.refinement_search(sys, _split(args.target), _V(args, sys), args.budget, args.max_cells, args.horizon)
    out.line(f"h_fb_upper {_lv(res.value)}")
    out.line(f"evaluated\t{res.evaluated}\tcomplete={str(res.complete).lower()}")
    for cid in res.cover.ids:
        out.line(f"cell\t{','.join(sorted(res.cover.cells[cid]))}\t{res.cover.G[cid]}")
    return 0


def cmd_oracle(args, out: _Out) -> int:
    sys = _system(args)
    Q = _split(args.target)
    mismatch = False
    for n in range(1, args.n + 1):
        fast = spanning.r_inv(sys, Q, None, n, args.budget).count
        slow = oracles.brute_rinv(sys, Q, None, n)
        verdict = "skipped" if slow is None else ("ok" if slow == fast else "MISMATCH")
        mismatch |= verdict == "MISMATCH"
        out.line(f"rinv\tn={n}\tsearch={fast}\tbrute={'-' if slow is None else slow}\t{verdict}")
    if args.cover:
        c = _cover(args, sys)
        for n in range(1, args.n + 1):
            fast = cv.cover_rinv(c, n).value
            slow = oracles.brute_cover_rinv(c, n)
            verdict = "skipped" if slow is None else ("ok" if slow == fast else "MISMATCH")
            mismatch |= verdict == "MISMATCH"
            out.line(f"cover_rinv\tn={n}\tdp={fast}\tbrute={'-' if slow is None else slow}\t{verdict}")
    return 1 if mismatch else 0


COMMANDS = {
    "validate": cmd_validate,
    "rinv": cmd_rinv,
    "entropy-report": cmd_entropy_report,
    "cover-check": cmd_cover_check,
    "cover-rinv": cmd_cover_rinv,
    "cover-entropy": cmd_cover_entropy,
    "matrices": cmd_matrices,
    "conditions": cmd_conditions,
    "hinv-exact": cmd_hinv_exact,
    "ife": cmd_ife,
    "refine-search": cmd_refine_search,
    "oracle": cmd_oracle,
}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or _sys.stdout
    stderr = stderr or _sys.stderr
    args = build_parser().parse_args(argv)
    out = _Out(args.format, stdout)
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        for d in exc.diagnostics:
            stderr.write(f"{d}\n")
        return 2
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except BudgetExceeded as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 3
    except ConditionsNotMet as exc:
        stderr.write(f"error: ConditionsNotMet: {exc}\n")
        if exc.upper_bound is not None:
            stderr.write(f"upper_bound\t{exc.upper_bound}\n")
        return 1
    except DomainError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
