"""System and cover file formats, plus TSV rendering.

System file::

    system NAME
    states ID+
    inputs ID+
    trans STATE INPUT -> STATE+      (exactly one line per state/input pair)

Cover file::

    cover NAME
    over SYSTEMNAME
    target STATE+
    cell CELLID : STATE+ input INPUT  (one or more)

``#`` starts a comment. Ids match ``[A-Za-z0-9_]+``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import ParseError
from .graphnum import CountMatrix, Interval
from .logvalue import LogValue
from .system import UncertainSystem

E_PARSE = "E_PARSE"
E_DUP_TRANS = "E_DUP_TRANS"
E_NOT_STRICT = "E_NOT_STRICT"
E_UNKNOWN_ID = "E_UNKNOWN_ID"
E_EMPTY_IMAGE = "E_EMPTY_IMAGE"

_ID = re.compile(r"[A-Za-z0-9_]+\Z")
_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class SourceDiagnostic:
    file: str
    line: int
    column: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}: {self.code}: {self.message}"


@dataclass(frozen=True)
class _Tok:
    text: str
    col: int


def _lines(text: str):
    """Yield ``(line number, tokens)`` for every non-empty logical line."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [_Tok(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if toks:
            yield no, toks


def _eof_line(text: str) -> int:
    return len(text.splitlines()) + 1


class _Diag:
    def __init__(self, file: str) -> None:
        self.file = file
        self.items: list[SourceDiagnostic] = []

    def __call__(self, line: int, col: int, code: str, msg: str) -> None:
        self.items.append(SourceDiagnostic(self.file, line, col, code, msg))

    def check_ids(self, line: int, toks: Sequence[_Tok]) -> bool:
        ok = True
        for t in toks:
            if not _ID.match(t.text):
                self(line, t.col, E_PARSE, f"invalid id {t.text!r}")
                ok = False
        return ok


def parse_system(text: str, file: str = "<system>") -> UncertainSystem:
    """Parse a system file; raises :class:`ParseError` with all diagnostics."""
    diag = _Diag(file)
    name = None
    states: list[str] | None = None
    inputs: list[str] | None = None
    trans: dict[tuple[str, str], tuple[int, list[str]]] = {}
    expect = "system"

    for no, toks in _lines(text):
        head = toks[0].text
        if expect == "system":
            if head != "system" or len(toks) != 2:
                diag(no, toks[0].col, E_PARSE, "expected 'system NAME'")
                return _fail(diag)
            if diag.check_ids(no, toks[1:]):
                name = toks[1].text
            expect = "states"
        elif expect == "states":
            if head != "states" or len(toks) < 2:
                diag(no, toks[0].col, E_PARSE, "expected 'states ID+'")
                return _fail(diag)
            states = _unique_ids(diag, no, toks[1:], "state")
            expect = "inputs"
        elif expect == "inputs":
            if head != "inputs" or len(toks) < 2:
                diag(no, toks[0].col, E_PARSE, "expected 'inputs ID+'")
                return _fail(diag)
            inputs = _unique_ids(diag, no, toks[1:], "input")
            expect = "trans"
        else:
            if head != "trans":
                diag(no, toks[0].col, E_PARSE, f"unexpected keyword {head!r}")
                continue
            arrow = next((i for i, t in enumerate(toks) if t.text == "->"), None)
            if arrow != 3:
                diag(no, toks[0].col, E_PARSE, "expected 'trans STATE INPUT -> STATE+'")
                continue
            if not diag.check_ids(no, toks[1:3] + toks[4:]):
                continue
            x, u = toks[1].text, toks[2].text
            bad = False
            if x not in states:
                diag(no, toks[1].col, E_UNKNOWN_ID, f"unknown state {x!r}")
                bad = True
            if u not in inputs:
                diag(no, toks[2].col, E_UNKNOWN_ID, f"unknown input {u!r}")
                bad = True
            for t in toks[4:]:
                if t.text not in states:
                    diag(no, t.col, E_UNKNOWN_ID, f"unknown state {t.text!r}")
                    bad = True
            if len(toks) == 4:
                diag(no, toks[3].col, E_EMPTY_IMAGE, f"F({x},{u}) has no successors")
                bad = True
            if (x, u) in trans:
                diag(no, toks[1].col, E_DUP_TRANS, f"second transition for ({x},{u}); first on line {trans[(x, u)][0]}")
                continue
            if not bad:
                trans[(x, u)] = (no, [t.text for t in toks[4:]])
            else:
                trans.setdefault((x, u), (no, []))

    if expect != "trans":
        diag(_eof_line(text), 1, E_PARSE, f"unexpected end of file, expected '{expect}'")
        return _fail(diag)
    for x in states:
        for u in inputs:
            if (x, u) not in trans:
                diag(_eof_line(text), 1, E_NOT_STRICT, f"missing transition for ({x},{u})")
    if diag.items:
        return _fail(diag)
    return UncertainSystem.from_table(name, states, inputs, {k: v[1] for k, v in trans.items()})


def _unique_ids(diag: _Diag, no: int, toks: Sequence[_Tok], what: str) -> list[str]:
    diag.check_ids(no, toks)
    seen: list[str] = []
    for t in toks:
        if t.text in seen:
            diag(no, t.col, E_PARSE, f"duplicate {what} {t.text!r}")
        else:
            seen.append(t.text)
    return seen


def _fail(diag: _Diag):
    raise ParseError(diag.items)


@dataclass(frozen=True)
class ParsedCover:
    name: str
    system: UncertainSystem
    target: tuple[str, ...]
    cells: tuple[tuple[str, tuple[str, ...], str], ...]  # (id, states, input)

    @property
    def cell_map(self) -> dict:
        return {cid: states for cid, states, _ in self.cells}

    @property
    def G(self) -> dict:
        return {cid: u for cid, _, u in self.cells}

    def build(self):
        from .cover import build_cover

        return build_cover(self.system, self.target, self.cell_map, self.G, name=self.name)


def parse_cover(text: str, sys: UncertainSystem, file: str = "<cover>") -> ParsedCover:
    """Parse a cover file against an already-parsed system."""
    diag = _Diag(file)
    name = None
    target: list[str] | None = None
    cells: list[tuple[str, tuple[str, ...], str]] = []
    first_line: dict[str, int] = {}
    expect = "cover"

    for no, toks in _lines(text):
        head = toks[0].text
        if expect == "cover":
            if head != "cover" or len(toks) != 2:
                diag(no, toks[0].col, E_PARSE, "expected 'cover NAME'")
                return _fail(diag)
            diag.check_ids(no, toks[1:])
            name = toks[1].text
            expect = "over"
        elif expect == "over":
            if head != "over" or len(toks) != 2:
                diag(no, toks[0].col, E_PARSE, "expected 'over SYSTEMNAME'")
                return _fail(diag)
            if toks[1].text != sys.name:
                diag(no, toks[1].col, E_PARSE, f"cover is over system {toks[1].text!r}, not {sys.name!r}")
            expect = "target"
        elif expect == "target":
            if head != "target" or len(toks) < 2:
                diag(no, toks[0].col, E_PARSE, "expected 'target STATE+'")
                return _fail(diag)
            target = _unique_ids(diag, no, toks[1:], "target state")
            for t in toks[1:]:
                if _ID.match(t.text) and t.text not in sys.states:
                    diag(no, t.col, E_UNKNOWN_ID, f"unknown state {t.text!r}")
            expect = "cell"
        else:
            if head != "cell":
                diag(no, toks[0].col, E_PARSE, f"unexpected keyword {head!r}")
                continue
            kw = [t.text for t in toks]
            if len(toks) < 6 or kw[2] != ":" or kw[-2] != "input" or "input" in kw[3:-2]:
                diag(no, toks[0].col, E_PARSE, "expected 'cell CELLID : STATE+ input INPUT'")
                continue
            cid = toks[1]
            members = toks[3:-2]
            if not diag.check_ids(no, [cid, *members, toks[-1]]):
                continue
            if cid.text in first_line:
                diag(no, cid.col, E_PARSE, f"duplicate cell id {cid.text!r}; first on line {first_line[cid.text]}")
                continue
            first_line[cid.text] = no
            bad = False
            for t in members:
                if t.text not in target:
                    diag(no, t.col, E_UNKNOWN_ID, f"state {t.text!r} is not in the target")
                    bad = True
            if toks[-1].text not in sys.inputs:
                diag(no, toks[-1].col, E_UNKNOWN_ID, f"unknown input {toks[-1].text!r}")
                bad = True
            if not bad:
                ordered = tuple(s for s in sys.states if s in {t.text for t in members})
                cells.append((cid.text, ordered, toks[-1].text))

    if expect != "cell" or not first_line:
        diag(_eof_line(text), 1, E_PARSE, "cover needs a target and at least one cell")
    if diag.items:
        return _fail(diag)
    ordered_target = tuple(s for s in sys.states if s in set(target))
    return ParsedCover(name, sys, ordered_target, tuple(cells))


# -- serialization ---------------------------------------------------------------


def serialize_system(sys: UncertainSystem) -> str:
    out = [f"system {sys.name}", "states " + " ".join(sys.states), "inputs " + " ".join(sys.inputs)]
    for x, s in enumerate(sys.states):
        for u, a in enumerate(sys.inputs):
            out.append(f"trans {s} {a} -> " + " ".join(sys.labels(sys.images[x][u])))
    return "\n".join(out) + "\n"


def serialize_cover(cover) -> str:
    sys = cover.system
    out = [f"cover {cover.name}", f"over {sys.name}", "target " + " ".join(sys.labels(cover.target))]
    for cid, mask, u in zip(cover.ids, cover.masks, cover.inputs):
        out.append(f"cell {cid} : " + " ".join(sys.labels(mask)) + f" input {sys.inputs[u]}")
    return "\n".join(out) + "\n"


def load_system(path: str | Path) -> UncertainSystem:
    p = Path(path)
    return parse_system(p.read_text(encoding="utf-8"), str(p))


def load_cover(path: str | Path, sys: UncertainSystem) -> ParsedCover:
    p = Path(path)
    return parse_cover(p.read_text(encoding="utf-8"), sys, str(p))


def fixture_path(name: str) -> Path:
    """Path of a bundled example file (``ex1.sys`` ... ``ex4_a3.cov``)."""
    return Path(str(resources.files("ucs_entropy") / "fixtures" / name))


def fixture_names() -> list[str]:
    return sorted(p.name for p in Path(str(resources.files("ucs_entropy") / "fixtures")).iterdir())


# -- TSV ------------------------------------------------------------------------


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...] = ()


def _fmt(v: Any) -> str:
    if isinstance(v, LogValue):
        return f"exact={v.exact_str()}\tdecimal={v.decimal_str()}"
    if isinstance(v, Interval):
        return f"lo={v.lo:.12f}\thi={v.hi:.12f}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12f}"
    if v is None:
        return "-"
    if isinstance(v, (tuple, list, frozenset, set)):
        return ",".join(str(x) for x in v)
    return str(v)


def _header(table: Table) -> list[str]:
    out = []
    for j, name in enumerate(table.columns):
        kinds = {type(r[j]) for r in table.rows if r[j] is not None}
        if LogValue in kinds:
            out.append(f"{name}_exact\t{name}_decimal")
        elif Interval in kinds:
            out.append(f"{name}_lo\t{name}_hi")
        else:
            out.append(name)
    return out


def emit_tsv(tables: Table | Iterable[Table]) -> str:
    """Render tables as tab-separated text; tables are separated by a blank line.

    A LogValue cell expands to ``exact=...`` and ``decimal=...`` fields and
    an Interval cell to ``lo=...`` and ``hi=...``.
    """
    if isinstance(tables, Table):
        tables = [tables]
    blocks = []
    for t in tables:
        lines = ["\t".join(_header(t))]
        lines.extend("\t".join(_fmt(v) for v in r) for r in t.rows)
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def matrix_table(M: CountMatrix) -> Table:
    return Table(("row",) + M.labels, tuple((lab,) + r for lab, r in zip(M.labels, M.rows)))
