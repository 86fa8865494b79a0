"""Parse the pragmatic Xtext subset into the grammar model and print it back.

The subset covers everything the transformation catalog touches: parser rules
with ``returns`` clauses, assignments with ``=``/``+=``/``?=``, quoted
keywords in either quote style, groups and alternatives with cardinalities,
``=>`` predicates, ``{Type}`` actions, ``[Type|Terminal]`` cross-references
and ``terminal`` declarations.  Top-level ``grammar``/``import``/``generate``
lines are captured verbatim and never interpreted.

Printing is deterministic: equal grammar values print to byte-identical text,
and printed text re-parses to a structurally equal grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .model import (
    ActionAnnotation,
    Alternatives,
    Assignment,
    Cardinality,
    CrossReference,
    Expression,
    Grammar,
    Group,
    Keyword,
    ParserRule,
    RuleCall,
    TerminalDecl,
)

MAX_NESTING_DEPTH = 64

_HEADER_STARTS = ("grammar", "import", "generate")
_PUNCT2 = ("=>", "+=", "?=")
_CARD_SUFFIXES = {"?": Cardinality.OPTIONAL, "*": Cardinality.STAR, "+": Cardinality.PLUS}
_INDENT = "    "


class Severity(Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class SourceSpan:
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    severity: Severity
    message: str

    def __str__(self) -> str:
        return f"{self.span} {self.severity.value}: {self.message}"


class TokenizeError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.span = span


# ---------------------------------------------------------------------------
# Lexing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    text: str
    kind: str  # "string" | "ident" | "punct"
    span: SourceSpan


def _lex(text: str, first_line: int = 1) -> list[_Token]:
    """Tokenize grammar text; comments are dropped, strings stay quoted."""
    tokens: list[_Token] = []
    line, col = first_line, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if text.startswith("/*", i):
            l0, c0 = line, col
            i += 2
            col += 2
            while i < n and not text.startswith("*/", i):
                if text[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if i >= n:
                raise TokenizeError("unterminated comment", SourceSpan(l0, c0, line, col))
            i += 2
            col += 2
            continue
        if ch in "'\"":
            l0, c0 = line, col
            j = i + 1
            col += 1
            while j < n:
                c = text[j]
                if c == "\\" and j + 1 < n:
                    j += 2
                    col += 2
                    continue
                if c == ch:
                    break
                if c == "\n":
                    raise TokenizeError(
                        "unterminated string literal", SourceSpan(l0, c0, line, col)
                    )
                j += 1
                col += 1
            if j >= n:
                raise TokenizeError(
                    "unterminated string literal", SourceSpan(l0, c0, line, col)
                )
            col += 1  # closing quote
            tokens.append(_Token(text[i : j + 1], "string", SourceSpan(l0, c0, line, col - 1)))
            i = j + 1
            continue
        two = text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(_Token(two, "punct", SourceSpan(line, col, line, col + 1)))
            i += 2
            col += 2
            continue
        if ch.isalpha() or ch == "_":
            l0, c0 = line, col
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
                col += 1
            tokens.append(_Token(text[i:j], "ident", SourceSpan(l0, c0, line, col - 1)))
            i = j
            continue
        if ch.isdigit():
            l0, c0 = line, col
            j = i
            while j < n and (text[j].isalnum() or text[j] in "._"):
                j += 1
                col += 1
            tokens.append(_Token(text[i:j], "ident", SourceSpan(l0, c0, line, col - 1)))
            i = j
            continue
        tokens.append(_Token(ch, "punct", SourceSpan(line, col, line, col)))
        i += 1
        col += 1
    return tokens


def tokenize(source_text: str) -> list[str]:
    """Split grammar text into comparison tokens.

    Whitespace separates; quoted literals are single tokens (quotes kept as
    written); ``=>``, ``+=`` and ``?=`` are two-character tokens; all other
    punctuation is one token per character.  Raises TokenizeError on an
    unterminated string literal.
    """
    return [t.text for t in _lex(source_text)]


def normalize_token(token: str) -> str:
    """Canonical form for comparison: double-quoted literals become single-quoted."""
    if len(token) >= 2 and token[0] == '"' and token[-1] == '"':
        return "'" + token[1:-1] + "'"
    return token


def normalized_tokens(source_text: str) -> list[str]:
    return [normalize_token(t) for t in tokenize(source_text)]


def token_distance(a: list[str], b: list[str]) -> int:
    """Levenshtein distance between two token streams."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, tb in enumerate(b, start=1):
            cost = 0 if ta == tb else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[-1]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _ParseAbort(Exception):
    """Internal: unwind to the rule level after an unrecoverable diagnostic."""


class _Parser:
    def __init__(self, tokens: list[_Token], diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    def peek(self, offset: int = 0) -> _Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def error(self, message: str, span: SourceSpan | None = None) -> None:
        if span is None:
            tok = self.peek() or self.tokens[-1] if self.tokens else None
            span = tok.span if tok else SourceSpan(1, 1, 1, 1)
        self.diagnostics.append(ParseDiagnostic(span, Severity.ERROR, message))

    def abort(self, message: str, span: SourceSpan | None = None) -> None:
        self.error(message, span)
        raise _ParseAbort()

    def skip_past_semicolon(self) -> None:
        while not self.at_end():
            if self.next().text == ";":
                return

    # -- top level ----------------------------------------------------------

    def parse_grammar_items(self) -> tuple[list[ParserRule], list[TerminalDecl]]:
        rules: list[ParserRule] = []
        terminals: list[TerminalDecl] = []
        while not self.at_end():
            tok = self.peek()
            assert tok is not None
            try:
                if tok.kind == "ident" and tok.text == "terminal":
                    terminals.append(self.parse_terminal_decl())
                elif tok.kind == "ident":
                    rules.append(self.parse_rule())
                else:
                    self.abort(f"unknown top-level construct starting at {tok.text!r}", tok.span)
            except _ParseAbort:
                self.skip_past_semicolon()
        return rules, terminals

    def parse_terminal_decl(self) -> TerminalDecl:
        self.next()  # 'terminal'
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "ident":
            self.abort("expected terminal name")
        name = self.next().text
        body_parts: list[str] = []
        tok = self.peek()
        if tok is not None and tok.text == ":":
            self.next()
            while not self.at_end() and self.peek().text != ";":
                body_parts.append(self.next().text)
        if self.at_end():
            self.abort(f"missing ';' after terminal {name}")
        self.next()  # ';'
        return TerminalDecl(name=name, body_text=" ".join(body_parts))

    def parse_rule(self) -> ParserRule:
        first = self.next()
        name = first.text
        # Enum rules parse like ordinary rules; the marker itself carries no
        # structure the transformations care about.
        if name == "enum" and self.peek() is not None and self.peek().kind == "ident":
            first = self.next()
            name = first.text
        returns_type: str | None = None
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.text == "returns":
            self.next()
            returns_type = self.parse_qualified_name("returns type")
        tok = self.peek()
        if tok is None or tok.text != ":":
            self.abort(f"expected ':' after rule name {name!r}", first.span)
        self.next()
        body = self.parse_alternatives(depth=1)
        tok = self.peek()
        if tok is None or tok.text != ";":
            self.abort(f"missing ';' terminating rule {name!r}", first.span)
        self.next()
        return ParserRule(name=name, returns_type=returns_type, body=body)

    def parse_qualified_name(self, what: str) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            self.abort(f"expected {what}")
        parts = [self.next().text]
        while True:
            tok = self.peek()
            if tok is not None and tok.text == ":" and self._peek_text(1) == ":":
                nxt = self.peek(2)
                if nxt is not None and nxt.kind == "ident":
                    self.next()
                    self.next()
                    parts.append("::" + self.next().text)
                    continue
            if tok is not None and tok.text == ".":
                nxt = self.peek(1)
                if nxt is not None and nxt.kind == "ident":
                    self.next()
                    parts.append("." + self.next().text)
                    continue
            break
        return "".join(parts)

    def _peek_text(self, offset: int) -> str | None:
        tok = self.peek(offset)
        return tok.text if tok is not None else None

    # -- expressions --------------------------------------------------------

    def parse_alternatives(self, depth: int) -> Expression:
        if depth > MAX_NESTING_DEPTH:
            self.abort(f"nesting deeper than {MAX_NESTING_DEPTH} levels")
        branches = [self.parse_branch(depth)]
        while True:
            tok = self.peek()
            if tok is None or tok.text != "|":
                break
            self.next()
            branches.append(self.parse_branch(depth))
        if len(branches) == 1:
            return branches[0]
        return Alternatives(branches=tuple(branches))

    def parse_branch(self, depth: int) -> Expression:
        elements: list[Expression] = []
        while True:
            tok = self.peek()
            if tok is None or tok.text in ("|", ";", ")"):
                break
            elements.append(self.parse_element(depth))
        if not elements:
            tok = self.peek()
            self.abort("empty group or alternative", tok.span if tok else None)
        if len(elements) == 1:
            # Branch and body positions print sequences bare, so a redundant
            # singleton paren group must normalize here or the printed form
            # would re-parse to a different tree.
            element = elements[0]
            while (
                isinstance(element, Group)
                and len(element.children) == 1
                and element.cardinality is Cardinality.ONE
                and not element.predicated
            ):
                element = element.children[0]
            return element
        return Group(children=tuple(elements))

    def parse_element(self, depth: int) -> Expression:
        predicated = False
        tok = self.peek()
        if tok is not None and tok.text == "=>":
            self.next()
            predicated = True
        node = self.parse_primary(depth)
        tok = self.peek()
        card = Cardinality.ONE
        if tok is not None and tok.text in _CARD_SUFFIXES:
            card = _CARD_SUFFIXES[self.next().text]
        if card is not Cardinality.ONE or predicated:
            node = replace(
                node,
                cardinality=card if card is not Cardinality.ONE else node.cardinality,
                predicated=predicated or node.predicated,
            )
        return node

    def parse_primary(self, depth: int) -> Expression:
        tok = self.peek()
        if tok is None:
            self.abort("unexpected end of input in rule body")
        assert tok is not None
        if tok.kind == "string":
            self.next()
            return Keyword(text=tok.text[1:-1], quote=tok.text[0])
        if tok.text == "(":
            open_tok = self.next()
            inner = self.parse_alternatives(depth + 1)
            closing = self.peek()
            if closing is None or closing.text != ")":
                self.abort("unbalanced '(': missing ')'", open_tok.span)
            self.next()
            if (
                isinstance(inner, (Alternatives, Group))
                and inner.cardinality is Cardinality.ONE
                and not inner.predicated
            ):
                return inner
            # The inner expression carries its own suffix or predicate, so
            # the parens are load-bearing: `(X?)?` must keep two levels.
            return Group(children=(inner,))
        if tok.text == "{":
            open_tok = self.next()
            name_tok = self.peek()
            if name_tok is None or name_tok.kind != "ident":
                self.abort("expected type name inside '{...}' action", open_tok.span)
            name = self.next().text
            closing = self.peek()
            if closing is None or closing.text != "}":
                self.abort("unbalanced '{' in action annotation", open_tok.span)
            self.next()
            return ActionAnnotation(type_name=name)
        if tok.text == "[":
            return self.parse_cross_reference()
        if tok.kind == "ident":
            nxt = self.peek(1)
            if nxt is not None and nxt.text in ("=", "+=", "?="):
                feature = self.next().text
                operator = self.next().text
                terminal = self.parse_assignment_terminal(feature)
                return Assignment(feature=feature, operator=operator, terminal=terminal)
            return RuleCall(rule_name=self.parse_qualified_name("rule call"))
        self.abort(f"unexpected token {tok.text!r} in rule body", tok.span)
        raise AssertionError("unreachable")

    def parse_cross_reference(self) -> CrossReference:
        open_tok = self.next()  # '['
        type_name = ""
        tok = self.peek()
        if tok is not None and tok.kind == "ident":
            type_name = self.parse_qualified_name("cross-reference type")
        terminal_name: str | None = None
        tok = self.peek()
        if tok is not None and tok.text == "|":
            self.next()
            name_tok = self.peek()
            if name_tok is None or name_tok.kind != "ident":
                self.abort("expected terminal name after '|' in cross-reference", open_tok.span)
            terminal_name = self.next().text
        closing = self.peek()
        if closing is None or closing.text != "]":
            self.abort("unbalanced '[': missing ']'", open_tok.span)
        self.next()
        return CrossReference(type_name=type_name, terminal_name=terminal_name)

    def parse_assignment_terminal(self, feature: str) -> Expression:
        tok = self.peek()
        if tok is None:
            self.abort(f"malformed assignment to {feature!r}: missing terminal")
        assert tok is not None
        if tok.kind == "string":
            self.next()
            return Keyword(text=tok.text[1:-1], quote=tok.text[0])
        if tok.text == "[":
            return self.parse_cross_reference()
        if tok.kind == "ident":
            return RuleCall(rule_name=self.parse_qualified_name("called rule"))
        self.abort(f"malformed assignment to {feature!r}: bad terminal {tok.text!r}", tok.span)
        raise AssertionError("unreachable")


def _split_header(text: str) -> tuple[str, str, int]:
    """Split verbatim header lines from the rule region.

    Returns (header_text, remainder, remainder_first_line).  Header lines are
    the leading run of ``grammar``/``import``/``generate`` lines, blank lines
    between them included, trailing blanks stripped.
    """
    lines = text.split("\n")
    last_header = -1
    for i, raw in enumerate(lines):
        stripped = raw.strip()
        if not stripped:
            continue
        first_word = stripped.split(None, 1)[0]
        if first_word in _HEADER_STARTS:
            last_header = i
        else:
            break
    if last_header < 0:
        return "", text, 1
    header = "\n".join(lines[: last_header + 1]).rstrip()
    remainder = "\n".join(lines[last_header + 1 :])
    return header, remainder, last_header + 2


def _grammar_name_from_header(header: str) -> str:
    for raw in header.split("\n"):
        stripped = raw.strip()
        if stripped.startswith("grammar"):
            parts = stripped.split()
            if len(parts) >= 2:
                return parts[1]
    return ""


def parse_grammar(source_text: str) -> Grammar | list[ParseDiagnostic]:
    """Parse grammar text; returns a Grammar or the error diagnostics."""
    text = source_text.replace("\r\n", "\n").replace("\r", "\n")
    header, remainder, first_line = _split_header(text)
    diagnostics: list[ParseDiagnostic] = []
    try:
        tokens = _lex(remainder, first_line=first_line)
    except TokenizeError as err:
        return [ParseDiagnostic(err.span, Severity.ERROR, str(err))]
    parser = _Parser(tokens, diagnostics)
    rules, terminals = parser.parse_grammar_items()
    errors = [d for d in diagnostics if d.severity is Severity.ERROR]
    if errors:
        return diagnostics
    return Grammar(
        name=_grammar_name_from_header(header),
        header_text=header,
        declared_terminals=tuple(terminals),
        rules=tuple(rules),
    )


def parse_rule_body(body_text: str) -> Expression | list[ParseDiagnostic]:
    """Parse a bare rule body (no name, no trailing ';')."""
    diagnostics: list[ParseDiagnostic] = []
    try:
        tokens = _lex(body_text)
    except TokenizeError as err:
        return [ParseDiagnostic(err.span, Severity.ERROR, str(err))]
    parser = _Parser(tokens, diagnostics)
    try:
        body = parser.parse_alternatives(depth=1)
    except _ParseAbort:
        return diagnostics
    if not parser.at_end():
        tok = parser.peek()
        assert tok is not None
        diagnostics.append(
            ParseDiagnostic(tok.span, Severity.ERROR, f"trailing input {tok.text!r} after body")
        )
    errors = [d for d in diagnostics if d.severity is Severity.ERROR]
    return diagnostics if errors else body


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _quote(kw: Keyword) -> str:
    return f"{kw.quote}{kw.text}{kw.quote}"


def _is_brace_keyword(expr: Expression, which: str) -> bool:
    return isinstance(expr, Keyword) and expr.text == which


def _render_inline(expr: Expression, *, bare: bool = False) -> str:
    """One-line rendering; ``bare`` drops the parens of a plain sequence
    (allowed only where a delimiter follows: branch or body position)."""
    prefix = "=> " if expr.predicated else ""
    suffix = expr.cardinality.suffix
    if isinstance(expr, Keyword):
        return prefix + _quote(expr) + suffix
    if isinstance(expr, RuleCall):
        return prefix + expr.rule_name + suffix
    if isinstance(expr, ActionAnnotation):
        return prefix + "{" + expr.type_name + "}" + suffix
    if isinstance(expr, CrossReference):
        inner = expr.type_name
        if expr.terminal_name is not None:
            inner += "|" + expr.terminal_name
        return prefix + "[" + inner + "]" + suffix
    if isinstance(expr, Assignment):
        return prefix + expr.feature + expr.operator + _render_inline(expr.terminal) + suffix
    if isinstance(expr, Group):
        body = " ".join(_render_inline(c) for c in expr.children)
        if bare and expr.cardinality is Cardinality.ONE and not expr.predicated:
            return body
        return prefix + "(" + body + ")" + suffix
    if isinstance(expr, Alternatives):
        body = " | ".join(_render_inline(b, bare=True) for b in expr.branches)
        return prefix + "(" + body + ")" + suffix
    raise TypeError(f"cannot render {type(expr).__name__}")


def render_body_inline(expr: Expression) -> str:
    """Single-line body text that re-parses to the same expression."""
    return _render_inline(expr, bare=True)


def _is_braced_group(expr: Expression) -> bool:
    return (
        isinstance(expr, Group)
        and not expr.predicated
        and len(expr.children) >= 2
        and _is_brace_keyword(expr.children[0], "{")
        and _is_brace_keyword(expr.children[-1], "}")
    )


def _sequence_lines(children: tuple[Expression, ...], indent: int) -> list[str]:
    lines: list[str] = []
    level = indent
    i = 0
    while i < len(children):
        child = children[i]
        if _is_brace_keyword(child, "}"):
            level = max(indent, level - 1)
        if _is_braced_group(child):
            lines.extend(_braced_group_lines(child, level))
        elif (
            isinstance(child, Keyword)
            and child.text not in ("{", "}")
            and i + 1 < len(children)
            and isinstance(children[i + 1], Assignment)
        ):
            # Generated grammars pair each attribute with its keyword; keep
            # the pair on one line.
            lines.append(
                _INDENT * level
                + _render_inline(child)
                + " "
                + _render_inline(children[i + 1])
            )
            i += 1
        else:
            lines.append(_INDENT * level + _render_inline(child))
        if _is_brace_keyword(child, "{"):
            level += 1
        i += 1
    return lines


def _braced_group_lines(group: Group, indent: int) -> list[str]:
    first = group.children[0]
    last = group.children[-1]
    assert isinstance(first, Keyword) and isinstance(last, Keyword)
    lines = [_INDENT * indent + "(" + _render_inline(first)]
    lines.extend(_sequence_lines(group.children[1:-1], indent + 1))
    lines.append(_INDENT * indent + _render_inline(last) + ")" + group.cardinality.suffix)
    return lines


def _body_lines(body: Expression) -> list[str]:
    if isinstance(body, Group) and body.cardinality is Cardinality.ONE and not body.predicated:
        return _sequence_lines(body.children, 1)
    if (
        isinstance(body, Alternatives)
        and body.cardinality is Cardinality.ONE
        and not body.predicated
    ):
        lines = []
        for i, branch in enumerate(body.branches):
            prefix = "" if i == 0 else "| "
            lines.append(_INDENT + prefix + _render_inline(branch, bare=True))
        return lines
    return [_INDENT + _render_inline(body, bare=True)]


def print_rule(rule: ParserRule) -> str:
    head = rule.name
    if rule.returns_type:
        head += f" returns {rule.returns_type}"
    head += ":"
    lines = _body_lines(rule.body)
    lines[-1] += ";"
    return "\n".join([head] + lines)


def print_grammar(grammar: Grammar) -> str:
    """Deterministic text for a grammar; re-parses structurally equal."""
    blocks: list[str] = []
    if grammar.header_text:
        blocks.append(grammar.header_text)
    blocks.extend(print_rule(rule) for rule in grammar.rules)
    for term in grammar.declared_terminals:
        if term.body_text:
            blocks.append(f"terminal {term.name}: {term.body_text};")
        else:
            blocks.append(f"terminal {term.name};")
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def rule_signature(rule: ParserRule) -> list[str]:
    """Comparison token stream of a rule: name, returns clause and body."""
    return normalized_tokens(print_rule(rule))


def rules_token_equal(a: ParserRule, b: ParserRule) -> bool:
    return rule_signature(a) == rule_signature(b)


def grammar_body_tokens(grammar: Grammar) -> list[str]:
    """Comparison tokens of all rules and terminals, header excluded."""
    tokens: list[str] = []
    for rule in grammar.rules:
        tokens.extend(rule_signature(rule))
    for term in grammar.declared_terminals:
        if term.body_text:
            tokens.extend(normalized_tokens(f"terminal {term.name}: {term.body_text};"))
        else:
            tokens.extend(normalized_tokens(f"terminal {term.name};"))
    return tokens
