"""Applicability-condition DSL: three-valued lattice, AST, parser, printer.

Concrete syntax (precedence NOT > AND > OR, left-associative):

    expr    := or
    or      := and (OR and)*
    and     := unary (AND unary)*
    unary   := NOT unary | '(' expr ')' | clause
    clause  := path op literal                      op in < <= > >= == !=
             | path BETWEEN literal AND literal
             | path IN '{' literal (',' literal)* '}'
             | EXISTS path
             | SCHEMA '(' role ',' schema-id ')'
             | ATTESTED '(' capability ')'
    literal := number [unit] | "text" | true | false | @rfc3339 | ref-token

A path is `subject.attribute` (attribute dot-free, so the split is the last
dot). Numeric literals without a unit are dimensionless ("1"). Keywords are
uppercase and reserved; they can never be read as unit tokens, which keeps
`x.y BETWEEN 20 AND 75 AND z.w > 2` unambiguous.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from decimal import Decimal

from .errors import DslSyntaxError, UnitSyntaxError
from .values import SlotValue, number, parse_rfc3339, split_path


class TriValue(enum.Enum):
    """Kleene lattice: AND is UNSAT-dominant, OR is SAT-dominant."""

    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


def kleene_and(left: TriValue, right: TriValue) -> TriValue:
    if TriValue.UNSAT in (left, right):
        return TriValue.UNSAT
    if TriValue.UNKNOWN in (left, right):
        return TriValue.UNKNOWN
    return TriValue.SAT


def kleene_or(left: TriValue, right: TriValue) -> TriValue:
    if TriValue.SAT in (left, right):
        return TriValue.SAT
    if TriValue.UNKNOWN in (left, right):
        return TriValue.UNKNOWN
    return TriValue.UNSAT


def kleene_not(value: TriValue) -> TriValue:
    if value is TriValue.SAT:
        return TriValue.UNSAT
    if value is TriValue.UNSAT:
        return TriValue.SAT
    return TriValue.UNKNOWN


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

COMPARISON_OPS = ("<", "<=", ">", ">=", "==", "!=")


@dataclass(frozen=True)
class Cmp:
    path: str
    op: str
    literal: SlotValue


@dataclass(frozen=True)
class Between:
    path: str
    lo: SlotValue
    hi: SlotValue


@dataclass(frozen=True)
class In:
    path: str
    values: tuple[SlotValue, ...]


@dataclass(frozen=True)
class Exists:
    path: str


@dataclass(frozen=True)
class SchemaConforms:
    input_role: str
    schema_id: str


@dataclass(frozen=True)
class Attested:
    capability: str


@dataclass(frozen=True)
class And:
    l: "ConditionExpr"
    r: "ConditionExpr"


@dataclass(frozen=True)
class Or:
    l: "ConditionExpr"
    r: "ConditionExpr"


@dataclass(frozen=True)
class Not:
    e: "ConditionExpr"


ConditionExpr = Cmp | Between | In | Exists | SchemaConforms | Attested | And | Or | Not


def paths_of(expr: ConditionExpr) -> frozenset[str]:
    """All `subject.attribute` paths the expression reads."""
    if isinstance(expr, (Cmp, Between, In, Exists)):
        return frozenset({expr.path})
    if isinstance(expr, (And, Or)):
        return paths_of(expr.l) | paths_of(expr.r)
    if isinstance(expr, Not):
        return paths_of(expr.e)
    return frozenset()


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

KEYWORDS = {"AND", "OR", "NOT", "BETWEEN", "IN", "EXISTS", "SCHEMA", "ATTESTED", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<word>[A-Za-z][A-Za-z0-9_.:-]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<timestamp>@[0-9][0-9T:+.Z-]*)
  | (?P<op><=|>=|==|!=|<|>)
  | (?P<punct>[(){},])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    type: str
    value: str
    pos: int


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if not match:
            raise DslSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(_Token("eof", "", len(src)))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, type_: str, value: str | None = None) -> _Token:
        tok = self.peek()
        if tok.type != type_ or (value is not None and tok.value != value):
            want = value or type_
            raise DslSyntaxError(f"expected {want}, found {tok.value or 'end of input'!r}", tok.pos)
        return self.advance()

    def at_keyword(self, kw: str) -> bool:
        tok = self.peek()
        return tok.type == "word" and tok.value == kw

    # ---- grammar ---------------------------------------------------------

    def parse(self) -> ConditionExpr:
        expr = self.parse_or()
        tok = self.peek()
        if tok.type != "eof":
            raise DslSyntaxError(f"unexpected trailing input {tok.value!r}", tok.pos)
        return expr

    def parse_or(self) -> ConditionExpr:
        left = self.parse_and()
        while self.at_keyword("OR"):
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> ConditionExpr:
        left = self.parse_unary()
        while self.at_keyword("AND"):
            self.advance()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> ConditionExpr:
        if self.at_keyword("NOT"):
            self.advance()
            return Not(self.parse_unary())
        if self.peek().type == "punct" and self.peek().value == "(":
            self.advance()
            expr = self.parse_or()
            self.expect("punct", ")")
            return expr
        return self.parse_clause()

    def parse_clause(self) -> ConditionExpr:
        tok = self.peek()
        if self.at_keyword("EXISTS"):
            self.advance()
            return Exists(self.parse_path())
        if self.at_keyword("SCHEMA"):
            self.advance()
            self.expect("punct", "(")
            role = self.parse_name("slot role")
            self.expect("punct", ",")
            schema_id = self.parse_name("schema id")
            self.expect("punct", ")")
            return SchemaConforms(role, schema_id)
        if self.at_keyword("ATTESTED"):
            self.advance()
            self.expect("punct", "(")
            capability = self.parse_name("capability")
            self.expect("punct", ")")
            return Attested(capability)
        if tok.type != "word":
            raise DslSyntaxError(f"expected a condition clause, found {tok.value or 'end of input'!r}", tok.pos)
        path = self.parse_path()
        tok = self.peek()
        if tok.type == "op":
            self.advance()
            literal = self.parse_literal()
            return Cmp(path, tok.value, literal)
        if self.at_keyword("BETWEEN"):
            self.advance()
            lo = self.parse_literal()
            kw = self.expect("word", "AND")
            hi = self.parse_literal()
            return self._make_between(path, lo, hi, kw.pos)
        if self.at_keyword("IN"):
            self.advance()
            self.expect("punct", "{")
            values = [self.parse_literal()]
            while self.peek().type == "punct" and self.peek().value == ",":
                self.advance()
                values.append(self.parse_literal())
            self.expect("punct", "}")
            return In(path, tuple(values))
        raise DslSyntaxError(
            f"expected a comparison operator, BETWEEN, or IN after {path!r}", tok.pos
        )

    def _make_between(self, path: str, lo: SlotValue, hi: SlotValue, pos: int) -> Between:
        if lo.kind != "number" or hi.kind != "number":
            raise DslSyntaxError("BETWEEN bounds must be numeric literals", pos)
        if lo.unit != hi.unit:
            raise UnitSyntaxError(f"BETWEEN bounds have mismatched units {lo.unit!r} and {hi.unit!r}", pos)
        if lo.magnitude > hi.magnitude:  # type: ignore[operator]
            raise DslSyntaxError("BETWEEN lower bound exceeds upper bound", pos)
        return Between(path, lo, hi)

    def parse_path(self) -> str:
        tok = self.expect("word")
        if tok.value in KEYWORDS:
            raise DslSyntaxError(f"expected a path, found keyword {tok.value!r}", tok.pos)
        try:
            split_path(tok.value)
        except Exception:
            raise DslSyntaxError(f"expected a subject.attribute path, found {tok.value!r}", tok.pos)
        return tok.value

    def parse_name(self, what: str) -> str:
        tok = self.expect("word")
        if tok.value in KEYWORDS:
            raise DslSyntaxError(f"expected {what}, found keyword {tok.value!r}", tok.pos)
        return tok.value

    def parse_literal(self) -> SlotValue:
        tok = self.peek()
        if tok.type == "number":
            self.advance()
            unit = "1"
            nxt = self.peek()
            if nxt.type == "word" and nxt.value not in KEYWORDS and "." not in nxt.value:
                if ":" in nxt.value or not re.match(r"[A-Za-z][A-Za-z0-9_]*\Z", nxt.value):
                    raise UnitSyntaxError(f"invalid unit token {nxt.value!r}", nxt.pos)
                unit = nxt.value
                self.advance()
            return number(Decimal(tok.value), unit)
        if tok.type == "string":
            self.advance()
            body = tok.value[1:-1]
            return SlotValue(kind="text", text=re.sub(r"\\(.)", r"\1", body))
        if tok.type == "timestamp":
            self.advance()
            ts = tok.value[1:]
            try:
                parse_rfc3339(ts)
            except Exception:
                raise DslSyntaxError(f"invalid timestamp literal {ts!r}", tok.pos)
            return SlotValue(kind="timestamp", timestamp=ts)
        if tok.type == "word":
            if tok.value == "true":
                self.advance()
                return SlotValue(kind="boolean", boolean=True)
            if tok.value == "false":
                self.advance()
                return SlotValue(kind="boolean", boolean=False)
            if tok.value in KEYWORDS:
                raise DslSyntaxError(f"expected a literal, found keyword {tok.value!r}", tok.pos)
            self.advance()
            return SlotValue(kind="ref", ref=tok.value)
        raise DslSyntaxError(f"expected a literal, found {tok.value or 'end of input'!r}", tok.pos)


def parse_condition(src: str) -> ConditionExpr:
    """Parse DSL source into a ConditionExpr; raises DslSyntaxError with position."""
    return _Parser(src).parse()


def parse_literal(src: str) -> SlotValue:
    """Parse one DSL literal (`40 pct`, `"text"`, `true`, `@ts`, `ex:ref`)."""
    parser = _Parser(src)
    value = parser.parse_literal()
    tok = parser.peek()
    if tok.type != "eof":
        raise DslSyntaxError(f"unexpected trailing input {tok.value!r}", tok.pos)
    return value


# --------------------------------------------------------------------------
# Printer (round-trip: parse(to_source(e)) == e)
# --------------------------------------------------------------------------

_PRECEDENCE = {Or: 1, And: 2, Not: 3}


def _prec(expr: ConditionExpr) -> int:
    return _PRECEDENCE.get(type(expr), 4)


def literal_to_source(value: SlotValue) -> str:
    if value.kind == "number":
        mag = str(value.magnitude)
        return mag if value.unit == "1" else f"{mag} {value.unit}"
    if value.kind == "text":
        body = (value.text or "").replace("\\", "\\\\").replace('"', '\\"')
        return f'"{body}"'
    if value.kind == "boolean":
        return "true" if value.boolean else "false"
    if value.kind == "ref":
        return value.ref or ""
    return f"@{value.timestamp}"


def to_source(expr: ConditionExpr) -> str:
    """Print an AST back to DSL source with minimal parentheses."""
    if isinstance(expr, Cmp):
        return f"{expr.path} {expr.op} {literal_to_source(expr.literal)}"
    if isinstance(expr, Between):
        return f"{expr.path} BETWEEN {literal_to_source(expr.lo)} AND {literal_to_source(expr.hi)}"
    if isinstance(expr, In):
        inner = ", ".join(literal_to_source(v) for v in expr.values)
        return f"{expr.path} IN {{{inner}}}"
    if isinstance(expr, Exists):
        return f"EXISTS {expr.path}"
    if isinstance(expr, SchemaConforms):
        return f"SCHEMA({expr.input_role}, {expr.schema_id})"
    if isinstance(expr, Attested):
        return f"ATTESTED({expr.capability})"
    if isinstance(expr, Not):
        inner = to_source(expr.e)
        if _prec(expr.e) < _prec(expr):
            inner = f"({inner})"
        return f"NOT {inner}"
    if isinstance(expr, (And, Or)):
        word = "AND" if isinstance(expr, And) else "OR"
        left, right = to_source(expr.l), to_source(expr.r)
        if _prec(expr.l) < _prec(expr):
            left = f"({left})"
        # the grammar is left-associative: a right-hand child at the same
        # precedence level must keep its parentheses to round-trip
        if _prec(expr.r) <= _prec(expr):
            right = f"({right})"
        return f"{left} {word} {right}"
    raise TypeError(f"not a ConditionExpr: {expr!r}")
