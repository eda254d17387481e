"""Recursive-descent parser for spreadsheet formulas.

Covers numbers, strings, A1-style cell references with any combination of $
anchors, rectangular ranges, sheet- and workbook-qualified references,
arbitrary function calls, the usual arithmetic / comparison / concatenation
operators, postfix percent, unary sign, and parentheses.

Unknown function names parse as opaque calls.  Anything outside the grammar
(R1C1 addresses, structured references, array formulas, bare names) raises
FormulaParseError; callers are expected to degrade such cells to text.

Precedence, loosest to tightest: comparisons, "&", "+ -", "* /", "^"
(right-associative), unary sign, postfix "%".  Unary sign binds tighter
than "^", so -2^2 means (-2)^2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .model import GridlintError, letters_to_column

MAX_RANGE_CELLS = 2**20


class FormulaParseError(GridlintError):
    """Formula text falls outside the supported grammar."""

    def __init__(self, message: str, position: int, expected: Sequence[str] = ()):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.expected = tuple(expected)


class RangeTooLargeError(GridlintError):
    """Range expansion would exceed MAX_RANGE_CELLS cells."""


@dataclass(frozen=True)
class RawReference:
    """A single cell reference as written: 1-based coordinates plus
    per-axis absolute flags and optional sheet / workbook qualifiers."""

    column: int
    row: int
    column_absolute: bool = False
    row_absolute: bool = False
    sheet: str | None = None
    workbook: str | None = None


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class NumberLit(Node):
    value: float


@dataclass(frozen=True)
class StringLit(Node):
    value: str


@dataclass(frozen=True)
class CellRef(Node):
    ref: RawReference
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class RangeRef(Node):
    start: RawReference
    end: RawReference
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class FunctionCall(Node):
    name: str
    args: tuple[Node, ...]


@dataclass(frozen=True)
class BinaryOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class UnaryOp(Node):
    """op is '+', '-' (prefix) or '%' (postfix)."""

    op: str
    operand: Node


@dataclass(frozen=True)
class Paren(Node):
    inner: Node


_NUMBER_RE = re.compile(r"(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")
_A1_RE = re.compile(r"(\$?)([A-Za-z]{1,8})(\$?)([0-9]{1,7})")
_SHEET_PREFIX_RE = re.compile(
    r"(?:\[(?P<wb>[^\[\]]+)\])?(?:'(?P<qsheet>(?:[^']|'')*)'|(?P<sheet>[A-Za-z_][A-Za-z0-9_.]*))!"
)
_CMP_OPS = ("<=", ">=", "<>", "=", "<", ">")


class _Scanner:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = offset

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def match(self, literal: str) -> bool:
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def match_re(self, pattern: re.Pattern) -> re.Match | None:
        m = pattern.match(self.text, self.pos)
        if m:
            self.pos = m.end()
        return m

    def expect(self, literal: str) -> None:
        if not self.match(literal):
            raise FormulaParseError(f"expected {literal!r}", self.pos, [literal])


def parse_formula(text: str) -> Node:
    """Parse a full formula string (with its leading '=') into an AST."""
    if not text.startswith("="):
        raise FormulaParseError("formula must start with '='", 0, ["="])
    sc = _Scanner(text, 1)
    node = _parse_compare(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise FormulaParseError("unexpected trailing input", sc.pos, ["end of formula"])
    return node


def _parse_compare(sc: _Scanner) -> Node:
    node = _parse_concat(sc)
    while True:
        sc.skip_ws()
        for op in _CMP_OPS:
            if sc.match(op):
                node = BinaryOp(op, node, _parse_concat(sc))
                break
        else:
            return node


def _parse_concat(sc: _Scanner) -> Node:
    node = _parse_additive(sc)
    while True:
        sc.skip_ws()
        if sc.match("&"):
            node = BinaryOp("&", node, _parse_additive(sc))
        else:
            return node


def _parse_additive(sc: _Scanner) -> Node:
    node = _parse_multiplicative(sc)
    while True:
        sc.skip_ws()
        if sc.match("+"):
            node = BinaryOp("+", node, _parse_multiplicative(sc))
        elif sc.match("-"):
            node = BinaryOp("-", node, _parse_multiplicative(sc))
        else:
            return node


def _parse_multiplicative(sc: _Scanner) -> Node:
    node = _parse_power(sc)
    while True:
        sc.skip_ws()
        if sc.match("*"):
            node = BinaryOp("*", node, _parse_power(sc))
        elif sc.match("/"):
            node = BinaryOp("/", node, _parse_power(sc))
        else:
            return node


def _parse_power(sc: _Scanner) -> Node:
    node = _parse_unary(sc)
    sc.skip_ws()
    if sc.match("^"):
        return BinaryOp("^", node, _parse_power(sc))
    return node


def _parse_unary(sc: _Scanner) -> Node:
    sc.skip_ws()
    if sc.match("-"):
        return UnaryOp("-", _parse_unary(sc))
    if sc.match("+"):
        return UnaryOp("+", _parse_unary(sc))
    return _parse_postfix(sc)


def _parse_postfix(sc: _Scanner) -> Node:
    node = _parse_atom(sc)
    while True:
        sc.skip_ws()
        if sc.match("%"):
            node = UnaryOp("%", node)
        else:
            return node


def _parse_atom(sc: _Scanner) -> Node:
    sc.skip_ws()
    ch = sc.peek()
    if ch == "(":
        sc.pos += 1
        inner = _parse_compare(sc)
        sc.skip_ws()
        sc.expect(")")
        return Paren(inner)
    if ch == '"':
        return _parse_string(sc)
    if ch.isdigit() or ch == ".":
        m = sc.match_re(_NUMBER_RE)
        if not m:
            raise FormulaParseError("malformed number", sc.pos, ["number"])
        return NumberLit(float(m.group(0)))
    return _parse_ref_or_call(sc)


def _parse_string(sc: _Scanner) -> StringLit:
    start = sc.pos
    sc.pos += 1
    chunks = []
    while True:
        if sc.pos >= len(sc.text):
            raise FormulaParseError("unterminated string literal", start, ['"'])
        ch = sc.text[sc.pos]
        if ch == '"':
            if sc.text.startswith('""', sc.pos):
                chunks.append('"')
                sc.pos += 2
                continue
            sc.pos += 1
            return StringLit("".join(chunks))
        chunks.append(ch)
        sc.pos += 1


def _unquote_sheet(quoted: str) -> str:
    return quoted.replace("''", "'")


def _try_a1(sc: _Scanner, sheet: str | None, workbook: str | None) -> RawReference | None:
    save = sc.pos
    m = sc.match_re(_A1_RE)
    if not m:
        return None
    # A bare name like SUM( or A1B would otherwise half-match as a reference.
    nxt = sc.peek()
    if nxt and (nxt.isalnum() or nxt in "_.("):
        sc.pos = save
        return None
    return RawReference(
        column=letters_to_column(m.group(2)),
        row=int(m.group(4)),
        column_absolute=m.group(1) == "$",
        row_absolute=m.group(3) == "$",
        sheet=sheet,
        workbook=workbook,
    )


def _parse_ref_or_call(sc: _Scanner) -> Node:
    start = sc.pos
    prefix = sc.match_re(_SHEET_PREFIX_RE)
    sheet = None
    workbook = None
    if prefix:
        workbook = prefix.group("wb")
        sheet = prefix.group("sheet") or _unquote_sheet(prefix.group("qsheet") or "")
        first = _try_a1(sc, sheet, workbook)
        if first is None:
            raise FormulaParseError("expected cell address after sheet qualifier", sc.pos, ["A1 reference"])
        return _finish_ref(sc, first, start)

    first = _try_a1(sc, None, None)
    if first is not None:
        return _finish_ref(sc, first, start)

    m = sc.match_re(_NAME_RE)
    if m:
        name = m.group(0)
        if sc.peek() == "(":
            sc.pos += 1
            args: list[Node] = []
            sc.skip_ws()
            if not sc.match(")"):
                args.append(_parse_compare(sc))
                sc.skip_ws()
                while sc.match(","):
                    args.append(_parse_compare(sc))
                    sc.skip_ws()
                sc.expect(")")
            return FunctionCall(name.upper(), tuple(args))
        raise FormulaParseError(f"unsupported name {name!r}", start, ["reference", "function call"])
    raise FormulaParseError("expected a value, reference, or function", sc.pos,
                            ["number", "string", "reference", "function call", "("])


def _finish_ref(sc: _Scanner, first: RawReference, start: int) -> Node:
    save = sc.pos
    if sc.match(":"):
        prefix = sc.match_re(_SHEET_PREFIX_RE)
        if prefix:
            other = prefix.group("sheet") or _unquote_sheet(prefix.group("qsheet") or "")
            if other != first.sheet or prefix.group("wb") != first.workbook:
                raise FormulaParseError("range endpoints on different sheets", save + 1, [])
        second = _try_a1(sc, first.sheet, first.workbook)
        if second is None:
            # "A1:" followed by non-address; ranges are the only use of ':'.
            raise FormulaParseError("expected cell address after ':'", sc.pos, ["A1 reference"])
        return RangeRef(first, second, span=(start, sc.pos))
    return CellRef(first, span=(start, sc.pos))


def references(node: Node) -> list[RawReference]:
    """All references in source order; ranges expand to their member cells.

    Duplicates are preserved.  Expansion normalizes reversed corners, and
    each expanded cell inherits an absolute flag only when both corners
    agree on it.
    """
    out: list[RawReference] = []
    for item in _walk(node):
        if isinstance(item, CellRef):
            out.append(item.ref)
        elif isinstance(item, RangeRef):
            out.extend(expand_range(item.start, item.end))
    return out


def expand_range(start: RawReference, end: RawReference) -> list[RawReference]:
    lo_col, hi_col = sorted((start.column, end.column))
    lo_row, hi_row = sorted((start.row, end.row))
    count = (hi_col - lo_col + 1) * (hi_row - lo_row + 1)
    if count > MAX_RANGE_CELLS:
        raise RangeTooLargeError(f"range expands to {count} cells (limit {MAX_RANGE_CELLS})")
    col_abs = start.column_absolute and end.column_absolute
    row_abs = start.row_absolute and end.row_absolute
    return [
        RawReference(col, row, col_abs, row_abs, start.sheet, start.workbook)
        for row in range(lo_row, hi_row + 1)
        for col in range(lo_col, hi_col + 1)
    ]


def constant_count(node: Node) -> int:
    """Number of literal constants (numeric or string) in the formula."""
    return sum(1 for item in _walk(node) if isinstance(item, (NumberLit, StringLit)))


def numeric_constant_count(node: Node) -> int:
    return sum(1 for item in _walk(node) if isinstance(item, NumberLit))


def _walk(node: Node) -> Iterator[Node]:
    yield node
    if isinstance(node, FunctionCall):
        for arg in node.args:
            yield from _walk(arg)
    elif isinstance(node, BinaryOp):
        yield from _walk(node.left)
        yield from _walk(node.right)
    elif isinstance(node, (UnaryOp, Paren)):
        inner = node.operand if isinstance(node, UnaryOp) else node.inner
        yield from _walk(inner)


def _format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _needs_quoting(sheet: str) -> bool:
    return not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", sheet)


def _format_ref(ref: RawReference, with_prefix: bool = True) -> str:
    from .model import column_to_letters

    parts = []
    if with_prefix:
        if ref.workbook is not None:
            parts.append(f"[{ref.workbook}]")
        if ref.sheet is not None:
            name = ref.sheet.replace("'", "''")
            parts.append(f"'{name}'!" if _needs_quoting(ref.sheet) else f"{ref.sheet}!")
        elif ref.workbook is not None:
            parts.append("!")
    col_anchor = "$" if ref.column_absolute else ""
    row_anchor = "$" if ref.row_absolute else ""
    parts.append(f"{col_anchor}{column_to_letters(ref.column)}{row_anchor}{ref.row}")
    return "".join(parts)


_BINOP_LEVEL = {"=": 1, "<>": 1, "<": 1, "<=": 1, ">": 1, ">=": 1,
                "&": 2, "+": 3, "-": 3, "*": 4, "/": 4, "^": 5}


def _level(node: Node) -> int:
    if isinstance(node, BinaryOp):
        return _BINOP_LEVEL[node.op]
    if isinstance(node, UnaryOp):
        return 7 if node.op == "%" else 6
    return 8


def to_text(node: Node) -> str:
    """Print an AST back to formula text.  parse(to_text(n)) reproduces n
    whenever n does not need extra grouping; parentheses are inserted
    otherwise so the printed text always means what the tree means."""
    return "=" + _to_text(node, 0)


def _to_text(node: Node, required: int) -> str:
    if _level(node) < required:
        return f"({_to_text(node, 0)})"
    if isinstance(node, NumberLit):
        return _format_number(node.value)
    if isinstance(node, StringLit):
        return '"' + node.value.replace('"', '""') + '"'
    if isinstance(node, CellRef):
        return _format_ref(node.ref)
    if isinstance(node, RangeRef):
        return f"{_format_ref(node.start)}:{_format_ref(node.end, with_prefix=False)}"
    if isinstance(node, FunctionCall):
        return f"{node.name}({','.join(_to_text(a, 0) for a in node.args)})"
    if isinstance(node, BinaryOp):
        level = _BINOP_LEVEL[node.op]
        if node.op == "^":
            return f"{_to_text(node.left, level + 1)}^{_to_text(node.right, level)}"
        return f"{_to_text(node.left, level)}{node.op}{_to_text(node.right, level + 1)}"
    if isinstance(node, UnaryOp):
        if node.op == "%":
            return f"{_to_text(node.operand, 7)}%"
        return f"{node.op}{_to_text(node.operand, 6)}"
    if isinstance(node, Paren):
        return f"({_to_text(node.inner, 0)})"
    raise TypeError(f"unknown node type: {type(node).__name__}")
