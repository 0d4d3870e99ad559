"""Line-oriented input files describing a connection and a task.

The format has four bracketed sections with ``key = value`` lines::

    [field]
    n = 1
    vars = t
    precision = 32

    [connection]
    rank = 2
    A1 = [["0", "1"], ["0", "-1/t^2"]]

    [forms]
    nu1 = ["1"]

    [task]
    command = epsilon

Matrix and form values are bracketed rows of quoted expressions on a single
line; ``#`` starts a comment.  All diagnostics carry 1-based line/column
positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple

from .connection import Connection
from .errors import (
    DimensionMismatch,
    SpecSyntaxError,
    UnknownKey,
)
from .exprparse import ExpressionParser
from .linalg import SeriesMatrix
from .series import OneForm, TowerField

_SECTIONS = ("field", "connection", "forms", "task")
_FIELD_KEYS = {"n", "vars", "precision"}
_TASK_KEYS = {"command", "seed", "sigma"}
_COMMANDS = ("cohomology", "irregularity", "cyclic", "epsilon", "verify")


@dataclass
class SpecFile:
    level: int
    names: Tuple[str, ...]
    precision: int
    rank: int
    raw_matrices: Tuple[Tuple[Tuple[str, ...], ...], ...]  # per variable
    raw_forms: Tuple[Tuple[str, ...], ...]  # component strings per form
    command: str
    seed: int
    sigma: int
    field: TowerField = dc_field(init=False)
    connection: Connection = dc_field(init=False)
    forms: Tuple[OneForm, ...] = dc_field(init=False)

    def __post_init__(self):
        self.field = TowerField(self.level, self.names)
        parser = ExpressionParser(self.field, self.precision)
        mats = []
        for rows in self.raw_matrices:
            mats.append(
                SeriesMatrix([[parser.parse(s) for s in row] for row in rows])
            )
        self.connection = Connection(self.field, mats)
        forms = []
        for comps in self.raw_forms:
            forms.append(OneForm(tuple(parser.parse(s) for s in comps)))
        self.forms = tuple(forms)

    def structural_key(self):
        return (
            self.level,
            self.names,
            self.precision,
            self.rank,
            self.raw_matrices,
            self.raw_forms,
            self.command,
            self.seed,
            self.sigma,
        )


def render_specfile(spec: SpecFile) -> str:
    """Canonical text form; reparsing yields an identical structure."""
    lines = ["[field]", f"n = {spec.level}"]
    lines.append("vars = " + " ".join(spec.names))
    lines.append(f"precision = {spec.precision}")
    lines.append("")
    lines.append("[connection]")
    lines.append(f"rank = {spec.rank}")
    for i, rows in enumerate(spec.raw_matrices, start=1):
        rendered_rows = ", ".join(
            "[" + ", ".join(f'"{s}"' for s in row) + "]" for row in rows
        )
        lines.append(f"A{i} = [{rendered_rows}]")
    lines.append("")
    if spec.raw_forms:
        lines.append("[forms]")
        for i, comps in enumerate(spec.raw_forms, start=1):
            lines.append(
                f"nu{i} = [" + ", ".join(f'"{s}"' for s in comps) + "]"
            )
        lines.append("")
    lines.append("[task]")
    lines.append(f"command = {spec.command}")
    lines.append(f"seed = {spec.seed}")
    lines.append(f"sigma = {spec.sigma}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Bracketed value parsing with positions
# ---------------------------------------------------------------------------

@dataclass
class _QuotedString:
    text: str
    line: int
    column: int


def _parse_bracketed(value: str, line: int, col0: int):
    """Parse nested brackets of quoted strings; returns the nested lists."""
    i = 0
    n = len(value)

    def err(msg, at):
        raise SpecSyntaxError(msg, line, col0 + at)

    def skip_ws(j):
        while j < n and value[j] in " \t":
            j += 1
        return j

    def parse_item(j):
        j = skip_ws(j)
        if j >= n:
            err("unexpected end of value", j)
        if value[j] == "[":
            return parse_list(j)
        if value[j] == '"':
            k = value.find('"', j + 1)
            if k < 0:
                err("unterminated string", j)
            return _QuotedString(value[j + 1 : k], line, col0 + j + 1), k + 1
        err(f"expected '[' or quoted string, found {value[j]!r}", j)

    def parse_list(j):
        assert value[j] == "["
        j += 1
        items = []
        j = skip_ws(j)
        if j < n and value[j] == "]":
            return items, j + 1
        while True:
            item, j = parse_item(j)
            items.append(item)
            j = skip_ws(j)
            if j < n and value[j] == ",":
                j += 1
                continue
            if j < n and value[j] == "]":
                return items, j + 1
            err("expected ',' or ']'", min(j, n - 1) if n else 0)

    j = skip_ws(0)
    if j >= n or value[j] != "[":
        raise SpecSyntaxError("expected a bracketed value", line, col0 + j)
    items, j = parse_list(j)
    j = skip_ws(j)
    if j != n:
        raise SpecSyntaxError(f"trailing input {value[j:]!r}", line, col0 + j)
    return items


def parse_specfile(text: str) -> SpecFile:
    sections: Dict[str, List[Tuple[str, str, int, int]]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        if stripped.strip().startswith("["):
            name = stripped.strip()
            if not name.endswith("]"):
                raise SpecSyntaxError("unterminated section header", lineno, len(raw))
            section = name[1:-1].strip()
            if section not in _SECTIONS:
                raise UnknownKey(f"unknown section [{section}] at line {lineno}")
            current = section
            sections.setdefault(section, [])
            continue
        if current is None:
            raise SpecSyntaxError("content before the first section", lineno, 1)
        if "=" not in stripped:
            raise SpecSyntaxError("expected 'key = value'", lineno, 1)
        key, value = stripped.split("=", 1)
        col0 = len(key) + 2  # position of the value text, 1-based
        sections[current].append((key.strip(), value.strip(), lineno, col0 + (len(value) - len(value.lstrip()))))

    def section(name) -> Dict[str, Tuple[str, int, int]]:
        out = {}
        for key, value, lineno, colv in sections.get(name, []):
            out[key] = (value, lineno, colv)
        return out

    fld = section("field")
    for key in fld:
        if key not in _FIELD_KEYS:
            raise UnknownKey(f"unknown key {key!r} in [field]")
    if "n" not in fld:
        raise UnknownKey("missing key 'n' in [field]")
    level = int(fld["n"][0])
    if level < 1:
        raise DimensionMismatch("n must be >= 1")
    if "vars" in fld:
        names = tuple(fld["vars"][0].split())
    else:
        names = tuple(f"t{i+1}" for i in range(level))
    if len(names) != level:
        raise DimensionMismatch(
            f"{len(names)} variable names for n = {level}"
        )
    precision = int(fld["precision"][0]) if "precision" in fld else 32

    conn = section("connection")
    for key in conn:
        if key != "rank" and not (key.startswith("A") and key[1:].isdigit()):
            raise UnknownKey(f"unknown key {key!r} in [connection]")
    if "rank" not in conn:
        raise UnknownKey("missing key 'rank' in [connection]")
    rank = int(conn["rank"][0])
    if rank < 1:
        raise DimensionMismatch("rank must be >= 1")
    raw_matrices = []
    for i in range(1, level + 1):
        key = f"A{i}"
        if key not in conn:
            raise UnknownKey(f"missing matrix {key} in [connection]")
        value, lineno, colv = conn[key]
        rows = _parse_bracketed(value, lineno, colv)
        if len(rows) != rank:
            raise DimensionMismatch(
                f"{key} has {len(rows)} rows for rank {rank} (line {lineno})"
            )
        mat_rows = []
        for row in rows:
            if not isinstance(row, list) or len(row) != rank:
                raise DimensionMismatch(
                    f"{key} rows must have {rank} quoted entries (line {lineno})"
                )
            if not all(isinstance(x, _QuotedString) for x in row):
                raise DimensionMismatch(
                    f"{key} entries must be quoted expressions (line {lineno})"
                )
            mat_rows.append(tuple(x.text for x in row))
        raw_matrices.append(tuple(mat_rows))
    extra = [
        k for k in conn if k.startswith("A") and k[1:].isdigit() and int(k[1:]) > level
    ]
    if extra:
        raise DimensionMismatch(f"matrix {extra[0]} exceeds n = {level}")

    frm = section("forms")
    raw_forms = []
    for key in frm:
        if not (key.startswith("nu") and key[2:].isdigit()):
            raise UnknownKey(f"unknown key {key!r} in [forms]")
    # the forms block is optional but must be complete when present
    form_indices = range(1, level + 1) if frm else ()
    for i in form_indices:
        key = f"nu{i}"
        if key not in frm:
            raise UnknownKey(f"missing form {key} in [forms]")
        value, lineno, colv = frm[key]
        comps = _parse_bracketed(value, lineno, colv)
        if len(comps) != level or not all(
            isinstance(x, _QuotedString) for x in comps
        ):
            raise DimensionMismatch(
                f"{key} needs {level} quoted components (line {lineno})"
            )
        raw_forms.append(tuple(x.text for x in comps))

    tsk = section("task")
    for key in tsk:
        if key not in _TASK_KEYS:
            raise UnknownKey(f"unknown key {key!r} in [task]")
    if "command" not in tsk:
        raise UnknownKey("missing key 'command' in [task]")
    command = tsk["command"][0]
    if command not in _COMMANDS:
        raise UnknownKey(f"unknown command {command!r}")
    seed = int(tsk["seed"][0]) if "seed" in tsk else 0
    sigma = int(tsk["sigma"][0]) if "sigma" in tsk else 1
    if sigma not in (1, -1):
        raise DimensionMismatch("sigma must be 1 or -1")

    # evaluate expressions with positional diagnostics
    field_obj = TowerField(level, names)
    parser = ExpressionParser(field_obj, precision)
    for i, rows in enumerate(raw_matrices, start=1):
        value, lineno, colv = conn[f"A{i}"]
        parsed_rows = _parse_bracketed(value, lineno, colv)
        for row in parsed_rows:
            for q in row:
                parser.parse(q.text, q.line, q.column)
    for i, comps in enumerate(raw_forms, start=1):
        value, lineno, colv = frm[f"nu{i}"]
        parsed = _parse_bracketed(value, lineno, colv)
        for q in parsed:
            parser.parse(q.text, q.line, q.column)

    return SpecFile(
        level,
        names,
        precision,
        rank,
        tuple(raw_matrices),
        tuple(raw_forms),
        command,
        seed,
        sigma,
    )
