"""Temporal policy DSL: lexer, recursive-descent parser, and printer.

Seven expression forms over atomic event predicates:

    G !atom                      nothing matching atom may ever occur
    a -> F b                     after a, b must follow before a recurs
    a U b                        a must hold on every step until b occurs
    a -> F[<=k] b                after a, b must follow within k steps
    a -> F b -> F c              after a, the obligations follow in order
    (rule) AND (rule)            both sub-rules must hold
    (rule) OR (rule)             at least one sub-rule must hold

Atoms are "tool:name", "action:name", "decision:name", or a bare tag
name. Boolean combinations require fully parenthesized operands; nesting
temporal operators is not part of the language.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator

_IDENT = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")
_KEYWORDS = frozenset({"G", "F", "U", "AND", "OR"})
_PREFIXES = {"tool": "TOOL", "action": "ACTION", "decision": "DECISION"}


class AtomKind(enum.Enum):
    TOOL = "TOOL"
    ACTION = "ACTION"
    DECISION = "DECISION"
    TAG = "TAG"


@dataclass(frozen=True)
class Atom:
    kind: AtomKind
    name: str

    def __post_init__(self):
        if not _IDENT.fullmatch(self.name):
            raise ValueError(f"atom name {self.name!r} is not a valid identifier")

    def __str__(self) -> str:
        if self.kind is AtomKind.TAG:
            return self.name
        return f"{self.kind.value.lower()}:{self.name}"


class PolicyExpr:
    """Base class for the seven expression forms."""

    __slots__ = ()


@dataclass(frozen=True)
class Forbidden(PolicyExpr):
    atom: Atom


@dataclass(frozen=True)
class ImplFuture(PolicyExpr):
    trigger: Atom
    obligation: Atom


@dataclass(frozen=True)
class Until(PolicyExpr):
    holder: Atom
    release: Atom


@dataclass(frozen=True)
class Bounded(PolicyExpr):
    trigger: Atom
    obligation: Atom
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"bounded step count must be >= 1, got {self.k}")


@dataclass(frozen=True)
class Chain(PolicyExpr):
    trigger: Atom
    obligations: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "obligations", tuple(self.obligations))
        if len(self.obligations) < 2:
            raise ValueError("a chain needs at least two obligations")


@dataclass(frozen=True)
class And(PolicyExpr):
    left: PolicyExpr
    right: PolicyExpr


@dataclass(frozen=True)
class Or(PolicyExpr):
    left: PolicyExpr
    right: PolicyExpr


class ParseError(ValueError):
    """Syntax error with position, expected description, and found token."""

    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.column = position + 1
        self.expected = expected
        self.found = found
        super().__init__(f"column {self.column}: expected {expected}, found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # G ! ARROW F FBOUND RBRACK U AND OR LPAREN RPAREN INT ATOM EOF
    text: str
    pos: int
    value: object = None


def tokenize(text: str) -> list[Token]:
    """Lex a policy expression into tokens (whitespace-insensitive)."""
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "!":
            tokens.append(Token("!", "!", i))
            i += 1
        elif c == "(":
            tokens.append(Token("LPAREN", "(", i))
            i += 1
        elif c == ")":
            tokens.append(Token("RPAREN", ")", i))
            i += 1
        elif c == "]":
            tokens.append(Token("RBRACK", "]", i))
            i += 1
        elif text.startswith("->", i):
            tokens.append(Token("ARROW", "->", i))
            i += 2
        elif c.isdigit():
            m = re.match(r"[0-9]+", text[i:])
            digits = m.group(0)
            if digits[0] == "0":
                raise ParseError(i, "a positive integer without leading zero", repr(digits))
            tokens.append(Token("INT", digits, i, value=int(digits)))
            i += len(digits)
        elif _IDENT.match(c):
            m = _IDENT.match(text, i)
            word = m.group(0)
            end = m.end()
            if word in _PREFIXES and end < n and text[end] == ":":
                name_m = _IDENT.match(text, end + 1)
                if not name_m:
                    raise ParseError(end + 1, f"identifier after {word + ':'!r}", _describe_at(text, end + 1))
                atom = Atom(AtomKind[_PREFIXES[word]], name_m.group(0))
                tokens.append(Token("ATOM", text[i : name_m.end()], i, value=atom))
                i = name_m.end()
            elif word == "F" and end < n and text[end] == "[":
                if not text.startswith("[<=", end):
                    raise ParseError(end, "'[<=' after 'F'", _describe_at(text, end))
                tokens.append(Token("FBOUND", "F[<=", i))
                i = end + 3
            elif word in _KEYWORDS:
                tokens.append(Token(word, word, i))
                i = end
            else:
                tokens.append(Token("ATOM", word, i, value=Atom(AtomKind.TAG, word)))
                i = end
        else:
            raise ParseError(i, "a token", repr(c))
    tokens.append(Token("EOF", "<end of input>", n))
    return tokens


def _describe_at(text: str, pos: int) -> str:
    if pos >= len(text):
        return "<end of input>"
    return repr(text[pos])


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.cur
        self.i += 1
        return tok

    def expect(self, kind: str, expected: str) -> Token:
        if self.cur.kind != kind:
            raise ParseError(self.cur.pos, expected, repr(self.cur.text))
        return self.advance()

    def parse_rule(self) -> PolicyExpr:
        tok = self.cur
        if tok.kind == "G":
            self.advance()
            self.expect("!", "'!' after 'G'")
            atom = self.expect("ATOM", "an atom")
            return Forbidden(atom.value)  # type: ignore[arg-type]
        if tok.kind == "LPAREN":
            self.advance()
            left = self.parse_rule()
            self.expect("RPAREN", "')'")
            op = self.cur
            if op.kind not in ("AND", "OR"):
                raise ParseError(op.pos, "'AND' or 'OR'", repr(op.text))
            self.advance()
            self.expect("LPAREN", "'('")
            right = self.parse_rule()
            self.expect("RPAREN", "')'")
            return And(left, right) if op.kind == "AND" else Or(left, right)
        if tok.kind == "ATOM":
            first: Atom = self.advance().value  # type: ignore[assignment]
            if self.cur.kind == "U":
                self.advance()
                release = self.expect("ATOM", "an atom after 'U'")
                return Until(first, release.value)  # type: ignore[arg-type]
            self.expect("ARROW", "'->' or 'U' after atom")
            if self.cur.kind == "FBOUND":
                self.advance()
                k = self.expect("INT", "a step count")
                self.expect("RBRACK", "']'")
                obl = self.expect("ATOM", "an atom")
                return Bounded(first, obl.value, k.value)  # type: ignore[arg-type]
            self.expect("F", "'F' or 'F[<=k]' after '->'")
            obligations = [self.expect("ATOM", "an atom after 'F'").value]
            while self.cur.kind == "ARROW":
                self.advance()
                self.expect("F", "'F' after '->'")
                obligations.append(self.expect("ATOM", "an atom after 'F'").value)
            if len(obligations) == 1:
                return ImplFuture(first, obligations[0])  # type: ignore[arg-type]
            return Chain(first, tuple(obligations))  # type: ignore[arg-type]
        raise ParseError(tok.pos, "'G', '(' or an atom", repr(tok.text))


def parse(text: str) -> PolicyExpr:
    """Parse one policy expression; raises ParseError on bad syntax."""
    parser = _Parser(tokenize(text))
    expr = parser.parse_rule()
    if parser.cur.kind != "EOF":
        raise ParseError(parser.cur.pos, "end of input", repr(parser.cur.text))
    return expr


def format_expr(expr: PolicyExpr) -> str:
    """Canonical single-space rendering; parse(format_expr(e)) == e."""
    if isinstance(expr, Forbidden):
        return f"G !{expr.atom}"
    if isinstance(expr, ImplFuture):
        return f"{expr.trigger} -> F {expr.obligation}"
    if isinstance(expr, Until):
        return f"{expr.holder} U {expr.release}"
    if isinstance(expr, Bounded):
        return f"{expr.trigger} -> F[<={expr.k}] {expr.obligation}"
    if isinstance(expr, Chain):
        segments = " -> ".join(f"F {o}" for o in expr.obligations)
        return f"{expr.trigger} -> {segments}"
    if isinstance(expr, And):
        return f"({format_expr(expr.left)}) AND ({format_expr(expr.right)})"
    if isinstance(expr, Or):
        return f"({format_expr(expr.left)}) OR ({format_expr(expr.right)})"
    raise TypeError(f"not a policy expression: {expr!r}")


class HandlingLevel(enum.IntEnum):
    """Operational response to a violated rule, ordered by severity."""

    WARN = 1
    BLOCK = 2
    HALT = 3
    ESCALATE = 4

    @classmethod
    def from_name(cls, name: str) -> "HandlingLevel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(
                f"unknown handling level {name!r} (expected warn, block, halt, or escalate)"
            ) from None


@dataclass(frozen=True)
class PolicyRule:
    name: str
    handling: HandlingLevel
    expr: PolicyExpr
    line: int


class PolicyFileError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_policy_file(text: str) -> list[PolicyRule]:
    """Parse a rules file: one "name | handling | expression" per line.

    Lines starting with '#' and blank lines are skipped. Errors carry the
    offending line number.
    """
    rules: list[PolicyRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|", 2)
        if len(parts) != 3:
            raise PolicyFileError(lineno, "expected 'name | handling | expression'")
        name, handling_str, expr_text = (p.strip() for p in parts)
        if not name:
            raise PolicyFileError(lineno, "empty rule name")
        try:
            handling = HandlingLevel.from_name(handling_str)
        except ValueError as exc:
            raise PolicyFileError(lineno, str(exc)) from None
        try:
            expr = parse(expr_text)
        except ParseError as exc:
            raise PolicyFileError(lineno, f"in expression: {exc}") from None
        rules.append(PolicyRule(name=name, handling=handling, expr=expr, line=lineno))
    return rules


def atoms_of(expr: PolicyExpr) -> tuple[Atom, ...]:
    """Distinct atoms of an expression in first-appearance order."""
    out: list[Atom] = []

    def walk(e: PolicyExpr) -> Iterator[Atom]:
        if isinstance(e, Forbidden):
            yield e.atom
        elif isinstance(e, ImplFuture):
            yield e.trigger
            yield e.obligation
        elif isinstance(e, Until):
            yield e.holder
            yield e.release
        elif isinstance(e, Bounded):
            yield e.trigger
            yield e.obligation
        elif isinstance(e, Chain):
            yield e.trigger
            yield from e.obligations
        elif isinstance(e, (And, Or)):
            yield from walk(e.left)
            yield from walk(e.right)

    for atom in walk(expr):
        if atom not in out:
            out.append(atom)
    return tuple(out)
